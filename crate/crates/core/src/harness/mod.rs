//! Command implementations behind the `singlet-sim` binary.
//!
//! Every command returns a serializable report; the binary only parses flags
//! and prints. Reports carry `"schema": 1`.

mod compare;
mod cost;
mod primitives;
mod simulate;
mod verify;

use std::ops::Range;
use std::str::FromStr;

use num_rational::Rational64;
use serde::Serialize;

pub use compare::{cmd_compare_joint, CompareReport};
pub use cost::{cmd_cost_table, CostRow, CostTable};
pub use primitives::{cmd_primitives_check, PrimitiveCheck, PrimitivesConfig, PrimitivesReport};
pub use simulate::{cmd_simulate, monte_carlo, MonteCarloSummary, SimulateReport};
pub use verify::{cmd_verify, Perturbation, VerifyConfig, VerifyReport};

use crate::direction::{Direction, INGEST_TOLERANCE};
use crate::error::{Error, Result};
use crate::spin::SpinValue;

pub const SCHEMA_VERSION: u32 = 1;

/// Largest spin the verification and cost commands accept.
pub const SPIN_MAX_GUARD: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "table" => Ok(Self::Table),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

/// Settings for a Monte Carlo simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spin: SpinValue,
    pub direction_a: Direction<f64>,
    pub direction_b: Direction<f64>,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub output_format: OutputFormat,
    /// Keep every trial's outcome for a transcript dump.
    pub record_transcripts: bool,
    /// Include wall-clock time in the report (makes it non-reproducible).
    pub timing: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.trials > u64::from(u32::MAX) * 16 {
            return Err(Error::Config(format!("trials = {} is too large", self.trials)));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parses `"x,y,z"`, or `"theta,phi"` (radians) when `spherical` is set.
/// Cartesian input must be within 1e-6 of unit norm and is renormalized.
pub fn parse_direction(text: &str, spherical: bool) -> Result<Direction<f64>> {
    let bad = || Error::DirectionParse(text.to_string());
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if parts.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    match (spherical, parts.as_slice()) {
        (false, [x, y, z]) => Direction::normalized(*x, *y, *z, INGEST_TOLERANCE),
        (true, [theta, phi]) => Ok(Direction::from_spherical(*theta, *phi)),
        _ => Err(bad()),
    }
}

/// Parses a seed in decimal or `0x` hexadecimal.
pub fn parse_seed(text: &str) -> Result<u64> {
    let t = text.trim().replace('_', "");
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| Error::Config(format!("invalid seed {text:?}")))
}

/// Parses a decimal such as `"0.01"` or a fraction `"1/100"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let bad = || Error::Config(format!("invalid rational {text:?}"));
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if frac.len() > 15 || (whole.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: i64 = digits.parse().map_err(|_| bad())?;
    let denom = 10i64.pow(frac.len() as u32);
    let r = Rational64::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Splits `0..total` into `workers` contiguous blocks, runs `job` on each in
/// its own thread and returns the results in block order.
pub(crate) fn parallel_blocks<P, F>(total: u64, workers: usize, job: F) -> Vec<P>
where
    P: Send,
    F: Fn(Range<u64>) -> P + Sync,
{
    let workers = workers.max(1) as u64;
    let per = total / workers;
    let extra = total % workers;
    let mut ranges = Vec::with_capacity(workers as usize);
    let mut start = 0;
    for w in 0..workers {
        let len = per + u64::from(w < extra);
        ranges.push(start..start + len);
        start += len;
    }
    if ranges.len() == 1 {
        return vec![job(ranges.pop().expect("one block"))];
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|r| {
                let job = &job;
                scope.spawn(move || job(r))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

/// Number of worker threads to use when the caller does not say.
pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// All spins `1/2, 1, ..., spin_max`.
pub fn spins_up_to(spin_max: SpinValue) -> Vec<SpinValue> {
    (1..=spin_max.twice())
        .map(|t| SpinValue::from_twice(i64::from(t)).expect("non-negative"))
        .collect()
}

pub(crate) fn check_spin_guard(spin_max: SpinValue) -> Result<()> {
    if spin_max.twice() > SPIN_MAX_GUARD {
        return Err(Error::Config(format!(
            "spin_max {spin_max} exceeds the enumeration guard of 20"
        )));
    }
    Ok(())
}
