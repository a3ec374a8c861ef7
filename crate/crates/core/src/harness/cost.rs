use std::fmt::Write as _;

use serde::Serialize;

use super::{check_spin_guard, SCHEMA_VERSION};
use crate::chain::build_chain;
use crate::error::Result;
use crate::spin::SpinValue;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BiasEntry {
    /// Dimension of the prefix at which the bit is used.
    pub prefix_dim: u32,
    pub bias: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostRow {
    pub spin: SpinValue,
    pub d: u32,
    pub binary: String,
    pub n: usize,
    pub n_lambda: usize,
    pub n_mu: usize,
    pub n_nu: usize,
    pub biases: Vec<BiasEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostTable {
    pub schema: u32,
    pub command: &'static str,
    pub rows: Vec<CostRow>,
}

/// Chain structure for every spin from 0 to `spin_max`.
pub fn cmd_cost_table(spin_max: SpinValue) -> Result<CostTable> {
    check_spin_guard(spin_max)?;
    let rows = (0..=spin_max.twice())
        .map(|t| {
            let spin = SpinValue::from_twice(i64::from(t)).expect("non-negative");
            let chain = build_chain(spin);
            CostRow {
                spin,
                d: spin.dimension(),
                binary: chain.binary_string(),
                n: chain.len(),
                n_lambda: chain.len(),
                n_mu: chain.len(),
                n_nu: chain.integer_step_count(),
                biases: chain
                    .steps()
                    .iter()
                    .filter_map(|s| {
                        s.f_bias.map(|p| BiasEntry {
                            prefix_dim: s.prefix_dim,
                            bias: p.to_string(),
                        })
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(CostTable {
        schema: SCHEMA_VERSION,
        command: "cost-table",
        rows,
    })
}

impl CostTable {
    /// `spin,d,binary,n,n_lambda,n_mu,n_nu,biases`; biases are
    /// `prefix_dim:p` pairs separated by `;`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("spin,d,binary,n,n_lambda,n_mu,n_nu,biases\n");
        for r in &self.rows {
            let biases: Vec<String> = r
                .biases
                .iter()
                .map(|b| format!("{}:{}", b.prefix_dim, b.bias))
                .collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.spin,
                r.d,
                r.binary,
                r.n,
                r.n_lambda,
                r.n_mu,
                r.n_nu,
                biases.join(";")
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>6} {:>4} {:>8} {:>3} {:>4} {:>4} {:>4}  biases",
            "s", "d", "binary", "n", "n_l", "n_m", "n_n"
        );
        for r in &self.rows {
            let biases: Vec<String> = r
                .biases
                .iter()
                .map(|b| format!("{} at d={}", b.bias, b.prefix_dim))
                .collect();
            let _ = writeln!(
                out,
                "{:>6} {:>4} {:>8} {:>3} {:>4} {:>4} {:>4}  {}",
                r.spin.to_string(),
                r.d,
                r.binary,
                r.n,
                r.n_lambda,
                r.n_mu,
                r.n_nu,
                biases.join(", ")
            );
        }
        out
    }
}
