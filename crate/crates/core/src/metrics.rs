//! Path-quality and work metrics for approximate plans.

use std::time::Duration;

use thiserror::Error;

/// Weight of a dropped iteration relative to an executed expansion: a
/// perforated pop still costs the heap operation but generates no successors.
pub const SKIP_WEIGHT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("exact path length must be at least one edge")]
    ZeroExactLength,
    #[error("no case produced an approximate path")]
    AllFailed,
    #[error("expansion counts must be positive")]
    ZeroExpansions,
}

/// One exact-vs-approximate comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecord {
    pub case_id: usize,
    pub exact_len: usize,
    /// `None` when the approximate search found no path.
    pub approx_len: Option<usize>,
    pub exact_expansions: u64,
    pub approx_expansions: u64,
    pub approx_skipped: u64,
    pub exact_wall_time: Duration,
    pub approx_wall_time: Duration,
}

impl CaseRecord {
    pub fn speedup_proxy(&self) -> Result<f64, MetricsError> {
        speedup_proxy(
            self.exact_expansions,
            self.approx_expansions,
            self.approx_skipped,
        )
    }

    /// Wall-clock ratio; `None` when a timing rounds to zero.
    pub fn speedup_wall(&self) -> Option<f64> {
        let approx = self.approx_wall_time.as_secs_f64();
        (approx > 0.0).then(|| self.exact_wall_time.as_secs_f64() / approx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathErrorStats {
    /// Mean percentage increase over found cases.
    pub e_p: f64,
    pub n_cases: usize,
    pub n_increased: usize,
    pub n_failed: usize,
    pub max_increase_pct: f64,
}

impl PathErrorStats {
    pub fn n_unchanged(&self) -> usize {
        self.n_cases - self.n_increased - self.n_failed
    }
}

/// `100 * (approx - exact) / exact`.
pub fn case_error_pct(approx_len: usize, exact_len: usize) -> Result<f64, MetricsError> {
    if exact_len == 0 {
        return Err(MetricsError::ZeroExactLength);
    }
    Ok(100.0 * (approx_len as f64 - exact_len as f64) / exact_len as f64)
}

/// Averages the per-case error over cases with an approximate path. Failed
/// cases are only counted in `n_failed`.
pub fn aggregate_error(records: &[CaseRecord]) -> Result<PathErrorStats, MetricsError> {
    let mut sum = 0.0;
    let mut found = 0usize;
    let mut n_increased = 0;
    let mut max_increase_pct: f64 = 0.0;
    for r in records {
        let Some(approx) = r.approx_len else {
            continue;
        };
        let pct = case_error_pct(approx, r.exact_len)?;
        sum += pct;
        found += 1;
        if approx > r.exact_len {
            n_increased += 1;
        }
        max_increase_pct = max_increase_pct.max(pct);
    }
    if found == 0 {
        return Err(MetricsError::AllFailed);
    }
    Ok(PathErrorStats {
        e_p: sum / found as f64,
        n_cases: records.len(),
        n_increased,
        n_failed: records.len() - found,
        max_increase_pct,
    })
}

/// Deterministic speedup: exact expansions over executed approximate
/// expansions plus [`SKIP_WEIGHT`] per dropped iteration.
pub fn speedup_proxy(
    exact_expansions: u64,
    approx_expansions: u64,
    approx_skipped: u64,
) -> Result<f64, MetricsError> {
    let work = approx_expansions as f64 + SKIP_WEIGHT * approx_skipped as f64;
    if exact_expansions == 0 || work <= 0.0 {
        return Err(MetricsError::ZeroExpansions);
    }
    Ok(exact_expansions as f64 / work)
}
