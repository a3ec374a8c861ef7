use std::fmt::Write as _;

use serde::Serialize;

use super::{check_spin_guard, SCHEMA_VERSION};
use crate::chain::build_chain;
use crate::direction::Direction;
use crate::enumeration::exact_joint;
use crate::error::Result;
use crate::quantum::quantum_joint;
use crate::spin::{HalfIntegerValue, SpinValue};
use crate::table::JointJson;

/// Agreement tolerance for marginals and correlation.
pub const COMPARE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareCell {
    pub alpha: HalfIntegerValue,
    pub beta: HalfIntegerValue,
    pub protocol: f64,
    pub quantum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub schema: u32,
    pub command: &'static str,
    pub spin: SpinValue,
    pub a: Direction<f64>,
    pub b: Direction<f64>,
    pub protocol: JointJson,
    pub quantum: JointJson,
    /// Every `(alpha, beta)` in the outcome support, both laws.
    pub cells: Vec<CompareCell>,
    pub total_variation: f64,
    pub max_cell_difference: f64,
    pub marginal_difference: f64,
    pub correlation_protocol: f64,
    pub correlation_quantum: f64,
    pub correlation_closed_form: f64,
    pub tolerance: f64,
    pub marginals_agree: bool,
    pub correlations_agree: bool,
}

/// Protocol and quantum joint laws side by side.
pub fn cmd_compare_joint(
    spin: SpinValue,
    a: &Direction<f64>,
    b: &Direction<f64>,
) -> Result<CompareReport> {
    check_spin_guard(spin)?;
    let cos_ab = a.dot(b);
    let protocol = exact_joint::<f64>(&build_chain(spin), cos_ab)?;
    let quantum = quantum_joint::<f64>(spin, a, b)?;

    let support = spin.outcome_support();
    let (pa, pb) = (protocol.marginal_alpha(), protocol.marginal_beta());
    let (qa, qb) = (quantum.marginal_alpha(), quantum.marginal_beta());
    let marginal_difference = support
        .iter()
        .map(|&v| {
            let da = pa.probability(v) - qa.probability(v);
            let db = pb.probability(v) - qb.probability(v);
            da.abs().max(db.abs())
        })
        .fold(0.0, f64::max);
    let cells = support
        .iter()
        .flat_map(|&alpha| support.iter().map(move |&beta| (alpha, beta)))
        .map(|(alpha, beta)| CompareCell {
            alpha,
            beta,
            protocol: protocol.probability(alpha, beta),
            quantum: quantum.probability(alpha, beta),
        })
        .collect();
    let correlation_protocol = protocol.correlation();
    let correlation_quantum = quantum.correlation();
    let correlations_agree = (correlation_protocol - correlation_quantum).abs() <= COMPARE_TOLERANCE;

    Ok(CompareReport {
        schema: SCHEMA_VERSION,
        command: "compare-joint",
        spin,
        a: *a,
        b: *b,
        total_variation: protocol.total_variation(&quantum),
        max_cell_difference: protocol.max_cell_difference(&quantum),
        protocol: protocol.to_json(),
        quantum: quantum.to_json(),
        cells,
        marginal_difference,
        correlation_protocol,
        correlation_quantum,
        correlation_closed_form: spin.singlet_correlation_factor() * cos_ab,
        tolerance: COMPARE_TOLERANCE,
        marginals_agree: marginal_difference <= COMPARE_TOLERANCE,
        correlations_agree,
    })
}

impl CompareReport {
    pub fn agrees(&self) -> bool {
        self.marginals_agree && self.correlations_agree
    }

    /// `alpha,beta,protocol,quantum` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,protocol,quantum\n");
        for c in &self.cells {
            let _ = writeln!(out, "{},{},{:.17e},{:.17e}", c.alpha, c.beta, c.protocol, c.quantum);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "spin {}  a.b = {:.6}", self.spin, self.protocol.cos_ab);
        let _ = writeln!(out, "{:>6} {:>6} {:>12} {:>12}", "alpha", "beta", "protocol", "quantum");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:>6} {:>6} {:>12.8} {:>12.8}",
                c.alpha.to_string(),
                c.beta.to_string(),
                c.protocol,
                c.quantum
            );
        }
        let _ = writeln!(out, "total variation {:.3e}", self.total_variation);
        let _ = writeln!(
            out,
            "<alpha beta>: protocol {:.10}  quantum {:.10}  closed form {:.10}",
            self.correlation_protocol, self.correlation_quantum, self.correlation_closed_form
        );
        out
    }
}
