//! CSV and plain-text tables for sweep and collision rows.
//!
//! Floats use Rust's shortest round-trip formatting so a parsed CSV compares
//! equal to the rows it came from. Missing values are empty fields.

use std::str::FromStr;

use thiserror::Error;

use super::{CollisionRow, SweepRow};
use crate::planner::Rate;

pub const SWEEP_HEADER: &str = "rate,rate_decimal,mean_speedup_wall,mean_speedup_proxy,pct_len_increase,pct_failed,e_p,max_increase_pct";
pub const COLLISION_HEADER: &str = "rate,n_trials,pct_collision_trials,mean_speedup_proxy";
pub const TRACE_HEADER: &str = "t,robot_id,x,y";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("nothing to report")]
    Empty,
    #[error("unexpected CSV header `{0}`")]
    Header(String),
    #[error("line {line}: {reason}")]
    Field { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Table,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "table" => Ok(ReportFormat::Table),
            other => Err(format!("unknown format `{other}` (csv or table)")),
        }
    }
}

pub trait ReportRow: Sized {
    const HEADER: &'static str;

    fn fields(&self) -> Vec<String>;

    fn from_fields(fields: &[&str]) -> Result<Self, String>;
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn num<T: FromStr>(field: &str, name: &str) -> Result<T, String> {
    field
        .parse()
        .map_err(|_| format!("bad {name} value `{field}`"))
}

fn opt_num(field: &str, name: &str) -> Result<Option<f64>, String> {
    if field.is_empty() {
        Ok(None)
    } else {
        num(field, name).map(Some)
    }
}

impl ReportRow for SweepRow {
    const HEADER: &'static str = SWEEP_HEADER;

    fn fields(&self) -> Vec<String> {
        vec![
            self.rate.to_string(),
            self.rate_decimal().to_string(),
            opt(self.mean_speedup_wall),
            self.mean_speedup_proxy.to_string(),
            self.pct_len_increase.to_string(),
            self.pct_failed.to_string(),
            opt(self.e_p),
            opt(self.max_increase_pct),
        ]
    }

    fn from_fields(f: &[&str]) -> Result<Self, String> {
        if f.len() != 8 {
            return Err(format!("expected 8 fields, found {}", f.len()));
        }
        let rate: Rate = f[0]
            .parse()
            .map_err(|e: crate::planner::RateError| e.to_string())?;
        Ok(SweepRow {
            rate,
            mean_speedup_wall: opt_num(f[2], "mean_speedup_wall")?,
            mean_speedup_proxy: num(f[3], "mean_speedup_proxy")?,
            pct_len_increase: num(f[4], "pct_len_increase")?,
            pct_failed: num(f[5], "pct_failed")?,
            e_p: opt_num(f[6], "e_p")?,
            max_increase_pct: opt_num(f[7], "max_increase_pct")?,
        })
    }
}

impl ReportRow for CollisionRow {
    const HEADER: &'static str = COLLISION_HEADER;

    fn fields(&self) -> Vec<String> {
        vec![
            self.rate.to_string(),
            self.n_trials.to_string(),
            self.pct_collision_trials.to_string(),
            self.mean_speedup_proxy.to_string(),
        ]
    }

    fn from_fields(f: &[&str]) -> Result<Self, String> {
        if f.len() != 4 {
            return Err(format!("expected 4 fields, found {}", f.len()));
        }
        Ok(CollisionRow {
            rate: f[0]
                .parse()
                .map_err(|e: crate::planner::RateError| e.to_string())?,
            n_trials: num(f[1], "n_trials")?,
            pct_collision_trials: num(f[2], "pct_collision_trials")?,
            mean_speedup_proxy: num(f[3], "mean_speedup_proxy")?,
        })
    }
}

pub fn emit_reports<R: ReportRow>(rows: &[R], format: ReportFormat) -> Result<String, ReportError> {
    if rows.is_empty() {
        return Err(ReportError::Empty);
    }
    let header: Vec<String> = R::HEADER.split(',').map(str::to_string).collect();
    let body: Vec<Vec<String>> = rows.iter().map(ReportRow::fields).collect();
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(R::HEADER);
            out.push('\n');
            for row in &body {
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
        ReportFormat::Table => {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| {
                    body.iter()
                        .map(|r| r[i].len())
                        .chain(std::iter::once(header[i].len()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect();
                padded.join("  ")
            };
            out.push_str(&line(&header));
            out.push('\n');
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&rule.join("  "));
            out.push('\n');
            for row in &body {
                out.push_str(&line(row));
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn parse_csv<R: ReportRow>(text: &str) -> Result<Vec<R>, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == R::HEADER => {}
        Some((_, h)) => return Err(ReportError::Header(h.to_string())),
        None => return Err(ReportError::Empty),
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split(',').collect();
            R::from_fields(&fields).map_err(|reason| ReportError::Field {
                line: i + 1,
                reason,
            })
        })
        .collect()
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, ReportError> {
    parse_csv(text)
}

pub fn parse_collision_csv(text: &str) -> Result<Vec<CollisionRow>, ReportError> {
    parse_csv(text)
}
