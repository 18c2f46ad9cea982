//! Loop-perforation schedules.
//!
//! A schedule decides, for each iteration index of a loop, whether that
//! iteration runs or is dropped. Rates are exact fractions `skip / window`.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RateError {
    #[error("rate must satisfy 0 <= k < n, got {skip}/{window}")]
    OutOfRange { skip: u32, window: u32 },
    #[error("cannot parse rate `{0}` (expected `k/n` or a ladder decimal such as 0.75)")]
    Syntax(String),
}

/// Fraction of loop iterations dropped, kept unreduced: `3/4` and `6/8` give
/// different modulo patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rate {
    skip: u32,
    window: u32,
}

impl Rate {
    pub const ZERO: Rate = Rate { skip: 0, window: 1 };

    pub fn new(skip: u32, window: u32) -> Result<Self, RateError> {
        if window == 0 || skip >= window {
            return Err(RateError::OutOfRange { skip, window });
        }
        Ok(Rate { skip, window })
    }

    pub fn skip(self) -> u32 {
        self.skip
    }

    pub fn window(self) -> u32 {
        self.window
    }

    pub fn is_zero(self) -> bool {
        self.skip == 0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.skip) / f64::from(self.window)
    }

    /// `floor(rate * m)` in exact arithmetic.
    pub fn scaled_floor(self, m: u64) -> u64 {
        (u128::from(m) * u128::from(self.skip) / u128::from(self.window)) as u64
    }

    /// The sweep ladder: 0.2, 0.25, 0.33, 0.5, 0.6, 0.75, 0.8, 0.83, 0.85, 0.88.
    pub fn ladder() -> Vec<Rate> {
        LADDER
            .iter()
            .map(|&(_, k, n)| Rate { skip: k, window: n })
            .collect()
    }
}

const LADDER: [(&str, u32, u32); 10] = [
    ("0.2", 1, 5),
    ("0.25", 1, 4),
    ("0.33", 1, 3),
    ("0.5", 1, 2),
    ("0.6", 3, 5),
    ("0.75", 3, 4),
    ("0.8", 4, 5),
    ("0.83", 5, 6),
    ("0.85", 17, 20),
    ("0.88", 22, 25),
];

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.skip, self.window)
    }
}

impl FromStr for Rate {
    type Err = RateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((k, n)) = s.split_once('/') {
            let k = k.trim().parse().map_err(|_| RateError::Syntax(s.into()))?;
            let n = n.trim().parse().map_err(|_| RateError::Syntax(s.into()))?;
            return Rate::new(k, n);
        }
        if s == "0" || s == "0.0" {
            return Ok(Rate::ZERO);
        }
        LADDER
            .iter()
            .find(|(dec, _, _)| *dec == s)
            .map(|&(_, k, n)| Rate { skip: k, window: n })
            .ok_or_else(|| RateError::Syntax(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TruncateAt {
    Head,
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerforationMode {
    /// Within each window of `n` iterations the first `n - k` run.
    Modulo,
    /// A contiguous run of `floor(r * m)` iterations is dropped at one end of
    /// a loop of extent `m`. With no extent the planner measures it with an
    /// exact run of the same query.
    Truncation { at: TruncateAt, extent: Option<u64> },
    /// Each iteration is dropped independently with probability `r`.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Execute,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PerforationSpec {
    pub mode: PerforationMode,
    pub rate: Rate,
}

impl PerforationSpec {
    pub fn exact() -> Self {
        PerforationSpec {
            mode: PerforationMode::Modulo,
            rate: Rate::ZERO,
        }
    }

    pub fn modulo(rate: Rate) -> Self {
        PerforationSpec {
            mode: PerforationMode::Modulo,
            rate,
        }
    }

    pub fn truncation(rate: Rate, at: TruncateAt) -> Self {
        PerforationSpec {
            mode: PerforationMode::Truncation { at, extent: None },
            rate,
        }
    }

    pub fn random(rate: Rate, seed: u64) -> Self {
        PerforationSpec {
            mode: PerforationMode::Random { seed },
            rate,
        }
    }

    pub fn with_rate(self, rate: Rate) -> Self {
        PerforationSpec { rate, ..self }
    }

    /// Decision for iteration `i` of a loop whose extent is `extent`.
    ///
    /// `extent` only matters for truncation; a mode-embedded extent takes
    /// precedence over the argument.
    pub fn decide(&self, i: u64, extent: u64) -> Decision {
        if self.rate.is_zero() {
            return Decision::Execute;
        }
        let skip = match self.mode {
            PerforationMode::Modulo => {
                let window = u64::from(self.rate.window);
                let run = window - u64::from(self.rate.skip);
                i % window >= run
            }
            PerforationMode::Truncation { at, extent: hint } => {
                let m = hint.unwrap_or(extent);
                let dropped = self.rate.scaled_floor(m);
                match at {
                    TruncateAt::Head => i < dropped,
                    TruncateAt::Tail => i >= m - dropped,
                }
            }
            PerforationMode::Random { seed } => {
                // floor(u * n) < k with u uniform over 64-bit words
                let word = random_word(seed, i);
                let bucket = (u128::from(word) * u128::from(self.rate.window)) >> 64;
                bucket < u128::from(self.rate.skip)
            }
        };
        if skip {
            Decision::Skip
        } else {
            Decision::Execute
        }
    }
}

/// Stateless per-index draw: word `i` of the ChaCha8 stream keyed by `seed`.
fn random_word(seed: u64, i: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(u128::from(i) * 2);
    rng.next_u64()
}

/// Free-function form of [`PerforationSpec::decide`].
pub fn perforation_schedule(spec: &PerforationSpec, i: u64, extent: u64) -> Decision {
    spec.decide(i, extent)
}
