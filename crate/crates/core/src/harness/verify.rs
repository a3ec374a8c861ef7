use std::fmt::Write as _;

use num_rational::Rational64;
use serde::Serialize;

use super::{check_spin_guard, monte_carlo, spins_up_to, MonteCarloSummary, SCHEMA_VERSION};
use crate::chain::{build_chain, BinaryChain};
use crate::direction::Direction;
use crate::enumeration::{exact_correlation, verify_recursion_identity, IdentityReport};
use crate::error::{Error, Result};
use crate::random::{sample_direction, RandomStream};
use crate::spin::SpinValue;
use crate::stats::{chi_square_uniform, z_test, CHI_SQUARE_ALPHA, SIGMA_BAND};

/// Deliberate protocol bugs, for checking that verification notices them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Perturbation {
    /// Added to the f-bias of every integer step.
    #[serde(serialize_with = "serialize_rational")]
    pub bias: Option<Rational64>,
    /// Added, in half units, to the coefficient of the last step.
    pub coefficient_twice: Option<i64>,
}

fn serialize_rational<S: serde::Serializer>(
    value: &Option<Rational64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match value {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

impl Perturbation {
    pub fn is_none(&self) -> bool {
        self.bias.is_none() && self.coefficient_twice.is_none()
    }

    pub fn apply(&self, chain: &BinaryChain) -> Result<BinaryChain> {
        let mut out = chain.clone();
        if let Some(delta) = self.bias {
            for &k in chain.integer_step_indices() {
                out = out.with_bias_offset(k, delta)?;
            }
        }
        if let (Some(delta), Some(last)) = (self.coefficient_twice, chain.len().checked_sub(1)) {
            out = out.with_coefficient_offset(last, delta)?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub spin_max: SpinValue,
    pub pairs: usize,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
    /// Tolerance for enumeration against the closed form.
    pub tol: f64,
    pub perturbation: Perturbation,
}

impl VerifyConfig {
    pub fn new(seed: u64, workers: usize) -> Self {
        Self {
            spin_max: SpinValue::from_twice(15).expect("non-negative"),
            pairs: 20,
            trials: 100_000,
            seed,
            workers,
            tol: 1e-10,
            perturbation: Perturbation::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCheck {
    pub pair: usize,
    pub cos_ab: f64,
    pub target: f64,
    pub enumerated: f64,
    pub enumeration_error: f64,
    pub monte_carlo: f64,
    pub std_error: f64,
    pub z_vs_enumeration: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinCheck {
    pub spin: SpinValue,
    pub comm_cost: usize,
    pub transcript_length_ok: bool,
    pub max_enumeration_error: f64,
    pub max_z: f64,
    pub p_value_alpha: f64,
    pub p_value_beta: f64,
    pub pairs: Vec<PairCheck>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub command: &'static str,
    pub spin_max: SpinValue,
    pub pairs: usize,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub sigma_band: f64,
    pub chi_square_alpha: f64,
    #[serde(skip_serializing_if = "Perturbation::is_none")]
    pub perturbation: Perturbation,
    pub identity: IdentityReport,
    pub spins: Vec<SpinCheck>,
    pub passed: bool,
}

/// Random direction pairs shared by every spin.
pub fn direction_pairs(seed: u64, pairs: usize) -> Vec<(Direction<f64>, Direction<f64>)> {
    let mut rng = RandomStream::new(seed).split(u64::MAX).generator();
    (0..pairs)
        .map(|_| (sample_direction(&mut rng), sample_direction(&mut rng)))
        .collect()
}

fn check_spin(
    config: &VerifyConfig,
    spin: SpinValue,
    directions: &[(Direction<f64>, Direction<f64>)],
) -> Result<SpinCheck> {
    let reference = build_chain(spin);
    let chain = config.perturbation.apply(&reference)?;
    let spin_stream = RandomStream::new(config.seed).split(u64::from(spin.twice()));
    let mut pooled = MonteCarloSummary::default();
    let mut pairs = Vec::with_capacity(directions.len());
    let mut transcript_length_ok = true;

    for (i, (a, b)) in directions.iter().enumerate() {
        let cos_ab = a.dot(b);
        let target = spin.singlet_correlation_factor() * cos_ab;
        let enumerated = exact_correlation(&chain, cos_ab)?;
        let enumeration_error = (enumerated - target).abs();

        let summary = monte_carlo(
            &chain,
            a,
            b,
            &spin_stream.split(i as u64),
            config.trials,
            config.workers,
            false,
        );
        transcript_length_ok &=
            summary.min_cbits == reference.len() && summary.max_cbits == reference.len();
        let estimate = summary.correlation.estimate()?;
        // a degenerate estimate away from the oracle is a failure, not an error
        let z = z_test(&estimate, enumerated).unwrap_or(f64::INFINITY);
        pairs.push(PairCheck {
            pair: i,
            cos_ab,
            target,
            enumerated,
            enumeration_error,
            monte_carlo: estimate.mean,
            std_error: estimate.std_error,
            z_vs_enumeration: z,
            passed: enumeration_error <= config.tol && z <= SIGMA_BAND,
        });
        pooled = pooled.merge(summary);
    }

    let support = spin.outcome_support();
    let p_value = |counts| -> Result<f64> {
        Ok(chi_square_uniform(&MonteCarloSummary::binned(counts, &support))?.p_value)
    };
    let p_value_alpha = p_value(&pooled.alpha_counts)?;
    let p_value_beta = p_value(&pooled.beta_counts)?;
    let passed = transcript_length_ok
        && pairs.iter().all(|p| p.passed)
        && p_value_alpha > CHI_SQUARE_ALPHA
        && p_value_beta > CHI_SQUARE_ALPHA;
    Ok(SpinCheck {
        spin,
        comm_cost: reference.len(),
        transcript_length_ok,
        max_enumeration_error: pairs.iter().map(|p| p.enumeration_error).fold(0.0, f64::max),
        max_z: pairs.iter().map(|p| p.z_vs_enumeration).fold(0.0, f64::max),
        p_value_alpha,
        p_value_beta,
        pairs,
        passed,
    })
}

/// Checks every spin from 1/2 to `spin_max` against the closed form, the
/// enumeration oracle and the uniform marginal law.
pub fn cmd_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    check_spin_guard(config.spin_max)?;
    if config.pairs == 0 {
        return Err(Error::Config("pairs must be at least 1".into()));
    }
    if config.trials < 2 {
        return Err(Error::Config("trials must be at least 2".into()));
    }
    if config.workers == 0 {
        return Err(Error::Config("workers must be at least 1".into()));
    }
    let directions = direction_pairs(config.seed, config.pairs);
    let spins = spins_up_to(config.spin_max)
        .into_iter()
        .map(|s| check_spin(config, s, &directions))
        .collect::<Result<Vec<_>>>()?;
    let identity = verify_recursion_identity(2..=config.spin_max.dimension().max(2));
    let passed = identity.all_hold && spins.iter().all(|s| s.passed);
    Ok(VerifyReport {
        schema: SCHEMA_VERSION,
        command: "verify",
        spin_max: config.spin_max,
        pairs: config.pairs,
        trials: config.trials,
        seed: config.seed,
        tol: config.tol,
        sigma_band: SIGMA_BAND,
        chi_square_alpha: CHI_SQUARE_ALPHA,
        perturbation: config.perturbation,
        identity,
        spins,
        passed,
    })
}

impl VerifyReport {
    /// One row per spin.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "spin,comm_cost,max_enumeration_error,max_z,p_value_alpha,p_value_beta,transcript_length_ok,passed\n",
        );
        for s in &self.spins {
            let _ = writeln!(
                out,
                "{},{},{:.3e},{:.3},{:.6},{:.6},{},{}",
                s.spin,
                s.comm_cost,
                s.max_enumeration_error,
                s.max_z,
                s.p_value_alpha,
                s.p_value_beta,
                s.transcript_length_ok,
                s.passed
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>6} {:>4} {:>12} {:>8} {:>10} {:>10}  result",
            "spin", "n", "enum err", "max z", "p(alpha)", "p(beta)"
        );
        for s in &self.spins {
            let _ = writeln!(
                out,
                "{:>6} {:>4} {:>12.3e} {:>8.3} {:>10.4} {:>10.4}  {}",
                s.spin.to_string(),
                s.comm_cost,
                s.max_enumeration_error,
                s.max_z,
                s.p_value_alpha,
                s.p_value_beta,
                if s.passed { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            out,
            "recursion identity: {}",
            if self.identity.all_hold { "holds" } else { "FAILS" }
        );
        let _ = writeln!(out, "overall: {}", if self.passed { "pass" } else { "FAIL" });
        out
    }
}
