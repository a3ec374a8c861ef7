use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use super::{parallel_blocks, RunConfig, SCHEMA_VERSION};
use crate::chain::{build_chain, randomness_budget, BinaryChain, RandomnessBudget};
use crate::direction::Direction;
use crate::error::Result;
use crate::protocol::run_trial;
use crate::random::RandomStream;
use crate::spin::{HalfIntegerValue, SpinValue};
use crate::stats::{
    chi_square_uniform, z_test, CorrelationAccumulator, CorrelationEstimate, UniformityReport,
};

type Outcome = HalfIntegerValue;

/// One line of a transcript dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscriptLine {
    pub trial: u64,
    pub alpha: Outcome,
    pub beta: Outcome,
    pub cbits: Vec<i8>,
    pub f_bits: Vec<i8>,
}

/// Integer tallies of a batch of trials. Merging is exact, so the result
/// does not depend on how trials were split across workers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MonteCarloSummary {
    pub alpha_counts: BTreeMap<Outcome, u64>,
    pub beta_counts: BTreeMap<Outcome, u64>,
    pub joint_counts: BTreeMap<(Outcome, Outcome), u64>,
    pub correlation: CorrelationAccumulator,
    pub min_cbits: usize,
    pub max_cbits: usize,
    pub transcripts: Option<Vec<TranscriptLine>>,
}

impl MonteCarloSummary {
    fn empty(record: bool) -> Self {
        Self {
            min_cbits: usize::MAX,
            transcripts: record.then(Vec::new),
            ..Self::default()
        }
    }

    pub(crate) fn merge(mut self, other: Self) -> Self {
        for (k, v) in other.alpha_counts {
            *self.alpha_counts.entry(k).or_default() += v;
        }
        for (k, v) in other.beta_counts {
            *self.beta_counts.entry(k).or_default() += v;
        }
        for (k, v) in other.joint_counts {
            *self.joint_counts.entry(k).or_default() += v;
        }
        self.correlation = self.correlation.merge(other.correlation);
        self.min_cbits = self.min_cbits.min(other.min_cbits);
        self.max_cbits = self.max_cbits.max(other.max_cbits);
        if let (Some(mine), Some(theirs)) = (self.transcripts.as_mut(), other.transcripts) {
            mine.extend(theirs);
        }
        self
    }

    pub fn trials(&self) -> u64 {
        self.correlation.count
    }

    /// Counts over `support`, in support order, with anything outside it
    /// appended as one extra bin.
    pub fn binned(counts: &BTreeMap<Outcome, u64>, support: &[Outcome]) -> Vec<u64> {
        let mut bins: Vec<u64> = support
            .iter()
            .map(|v| counts.get(v).copied().unwrap_or(0))
            .collect();
        let outside: u64 = counts
            .iter()
            .filter(|(k, _)| !support.contains(k))
            .map(|(_, v)| v)
            .sum();
        if outside > 0 {
            bins.push(outside);
        }
        bins
    }
}

/// Runs `trials` protocol trials, trial `i` drawing from `master.split(i)`.
pub fn monte_carlo(
    chain: &BinaryChain,
    a: &Direction<f64>,
    b: &Direction<f64>,
    master: &RandomStream,
    trials: u64,
    workers: usize,
    record_transcripts: bool,
) -> MonteCarloSummary {
    let blocks = parallel_blocks(trials, workers, |range| {
        let mut part = MonteCarloSummary::empty(record_transcripts);
        for trial in range {
            let out = run_trial(a, b, chain, &master.split(trial));
            *part.alpha_counts.entry(out.alpha).or_default() += 1;
            *part.beta_counts.entry(out.beta).or_default() += 1;
            *part.joint_counts.entry((out.alpha, out.beta)).or_default() += 1;
            part.correlation.push(out.alpha, out.beta);
            part.min_cbits = part.min_cbits.min(out.cbits.len());
            part.max_cbits = part.max_cbits.max(out.cbits.len());
            if let Some(lines) = part.transcripts.as_mut() {
                lines.push(TranscriptLine {
                    trial,
                    alpha: out.alpha,
                    beta: out.beta,
                    cbits: out.cbits,
                    f_bits: out.f_bits,
                });
            }
        }
        part
    });
    blocks
        .into_iter()
        .reduce(MonteCarloSummary::merge)
        .unwrap_or_else(|| MonteCarloSummary::empty(record_transcripts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeCount {
    pub value: Outcome,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointCount {
    pub alpha: Outcome,
    pub beta: Outcome,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub schema: u32,
    pub command: &'static str,
    pub spin: SpinValue,
    pub a: Direction<f64>,
    pub b: Direction<f64>,
    pub cos_ab: f64,
    pub trials: u64,
    pub seed: u64,
    pub comm_cost: usize,
    pub randomness: RandomnessBudget,
    /// Fewest and most cbits emitted in any trial.
    pub cbits_per_trial: [usize; 2],
    pub marginal_alpha: Vec<OutcomeCount>,
    pub marginal_beta: Vec<OutcomeCount>,
    pub joint: Vec<JointCount>,
    pub correlation: Option<CorrelationEstimate>,
    pub target_correlation: f64,
    pub z_score: Option<f64>,
    pub uniformity_alpha: Option<UniformityReport>,
    pub uniformity_beta: Option<UniformityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
    #[serde(skip)]
    pub transcripts: Option<Vec<TranscriptLine>>,
}

fn outcome_counts(counts: &BTreeMap<Outcome, u64>, n: u64) -> Vec<OutcomeCount> {
    // descending, matching the outcome support order
    counts
        .iter()
        .rev()
        .map(|(&value, &count)| OutcomeCount {
            value,
            count,
            frequency: count as f64 / n as f64,
        })
        .collect()
}

/// Runs the protocol for `config` and summarizes the outputs.
pub fn cmd_simulate(config: &RunConfig) -> Result<SimulateReport> {
    config.validate()?;
    let started = Instant::now();
    let chain = build_chain(config.spin);
    let (a, b) = (config.direction_a, config.direction_b);
    let summary = monte_carlo(
        &chain,
        &a,
        &b,
        &RandomStream::new(config.seed),
        config.trials,
        config.workers,
        config.record_transcripts,
    );
    let cos_ab = a.dot(&b);
    let target = config.spin.singlet_correlation_factor() * cos_ab;
    let n = summary.trials();

    let correlation = summary.correlation.estimate().ok();
    let z_score = correlation
        .as_ref()
        .map(|e| z_test(e, target))
        .transpose()
        .ok()
        .flatten();
    let support = config.spin.outcome_support();
    let uniformity = |counts| {
        if support.len() < 2 {
            return Ok(None);
        }
        chi_square_uniform(&MonteCarloSummary::binned(counts, &support)).map(Some)
    };

    Ok(SimulateReport {
        schema: SCHEMA_VERSION,
        command: "simulate",
        spin: config.spin,
        a,
        b,
        cos_ab,
        trials: n,
        seed: config.seed,
        comm_cost: chain.len(),
        randomness: randomness_budget(config.spin),
        cbits_per_trial: [summary.min_cbits, summary.max_cbits],
        marginal_alpha: outcome_counts(&summary.alpha_counts, n),
        marginal_beta: outcome_counts(&summary.beta_counts, n),
        joint: summary
            .joint_counts
            .iter()
            .rev()
            .map(|(&(alpha, beta), &count)| JointCount {
                alpha,
                beta,
                count,
                frequency: count as f64 / n as f64,
            })
            .collect(),
        correlation,
        target_correlation: target,
        z_score,
        uniformity_alpha: uniformity(&summary.alpha_counts)?,
        uniformity_beta: uniformity(&summary.beta_counts)?,
        wall_time_seconds: config.timing.then(|| started.elapsed().as_secs_f64()),
        transcripts: summary.transcripts,
    })
}

impl SimulateReport {
    /// Joint counts as `alpha,beta,count,frequency` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,count,frequency\n");
        for c in &self.joint {
            let _ = writeln!(out, "{},{},{},{:.17e}", c.alpha, c.beta, c.count, c.frequency);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "spin {}  trials {}  seed {:#x}", self.spin, self.trials, self.seed);
        let _ = writeln!(out, "a.b = {:.6}  cbits per trial = {}", self.cos_ab, self.comm_cost);
        let _ = writeln!(out, "{:>8} {:>12} {:>12}", "value", "P(alpha)", "P(beta)");
        for (x, y) in self.marginal_alpha.iter().zip(&self.marginal_beta) {
            let _ = writeln!(out, "{:>8} {:>12.6} {:>12.6}", x.value.to_string(), x.frequency, y.frequency);
        }
        if let Some(e) = &self.correlation {
            let _ = writeln!(
                out,
                "<alpha beta> = {:.6} +- {:.6}  target {:.6}  z {:.3}",
                e.mean,
                e.std_error,
                self.target_correlation,
                self.z_score.unwrap_or(f64::NAN)
            );
        }
        out
    }

    /// JSON-lines transcript dump, one object per trial.
    pub fn transcript_lines(&self) -> Option<String> {
        let lines = self.transcripts.as_ref()?;
        let mut out = String::new();
        for line in lines {
            out.push_str(&serde_json::to_string(line).expect("transcript serializes"));
            out.push('\n');
        }
        Some(out)
    }
}
