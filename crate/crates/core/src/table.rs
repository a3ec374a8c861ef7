//! Probability tables over outcome values, with CSV and JSON export.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::BigRational;
use serde::Serialize;

use crate::scalar::Probability;
use crate::spin::HalfIntegerValue;

/// Distribution of a single outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable<T> {
    pub entries: BTreeMap<HalfIntegerValue, T>,
}

impl<T: Probability> DistributionTable<T> {
    pub fn total(&self) -> T {
        T::sum_terms(self.entries.values().cloned())
    }

    pub fn probability(&self, value: HalfIntegerValue) -> T {
        self.entries.get(&value).cloned().unwrap_or_else(T::zero)
    }

    pub fn mean(&self) -> T {
        T::sum_terms(
            self.entries
                .iter()
                .map(|(v, p)| T::from_ratio(v.twice(), 2) * p.clone()),
        )
    }

    /// Largest absolute deviation from the uniform law on `support`.
    pub fn max_deviation_from_uniform(&self, support: &[HalfIntegerValue]) -> f64 {
        let u = 1.0 / support.len() as f64;
        let keys: BTreeSet<_> = support.iter().chain(self.entries.keys()).copied().collect();
        keys.into_iter()
            .map(|k| {
                let target = if support.contains(&k) { u } else { 0.0 };
                (self.probability(k).to_f64() - target).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Joint distribution of `(alpha, beta)` for measurement directions with
/// `a.b = cos_ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T> {
    pub entries: BTreeMap<(HalfIntegerValue, HalfIntegerValue), T>,
    pub cos_ab: f64,
}

impl<T: Probability> JointDistribution<T> {
    pub fn total(&self) -> T {
        T::sum_terms(self.entries.values().cloned())
    }

    pub fn probability(&self, alpha: HalfIntegerValue, beta: HalfIntegerValue) -> T {
        self.entries
            .get(&(alpha, beta))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    fn marginal(&self, pick: impl Fn(&(HalfIntegerValue, HalfIntegerValue)) -> HalfIntegerValue) -> DistributionTable<T> {
        let mut terms: BTreeMap<HalfIntegerValue, Vec<T>> = BTreeMap::new();
        for (k, p) in &self.entries {
            terms.entry(pick(k)).or_default().push(p.clone());
        }
        DistributionTable {
            entries: terms.into_iter().map(|(k, v)| (k, T::sum_terms(v))).collect(),
        }
    }

    pub fn marginal_alpha(&self) -> DistributionTable<T> {
        self.marginal(|k| k.0)
    }

    pub fn marginal_beta(&self) -> DistributionTable<T> {
        self.marginal(|k| k.1)
    }

    /// `<alpha beta>` under this table.
    pub fn correlation(&self) -> T {
        T::sum_terms(
            self.entries
                .iter()
                .map(|((a, b), p)| T::from_ratio(a.quarter_product(*b), 4) * p.clone()),
        )
    }

    /// Whether `P(alpha, beta) == P(-alpha, -beta)` for every cell, up to `tol`
    /// (use `0.0` for exact scalars).
    pub fn is_sign_symmetric(&self, tol: f64) -> bool {
        self.entries.iter().all(|((a, b), p)| {
            let q = self.probability(-*a, -*b);
            if T::is_exact() {
                *p == q
            } else {
                (p.to_f64() - q.to_f64()).abs() <= tol
            }
        })
    }

    /// Half the sum of absolute cell differences.
    pub fn total_variation<U: Probability>(&self, other: &JointDistribution<U>) -> f64 {
        let keys: BTreeSet<_> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        0.5 * keys
            .into_iter()
            .map(|(a, b)| (self.probability(a, b).to_f64() - other.probability(a, b).to_f64()).abs())
            .sum::<f64>()
    }

    /// Largest absolute cell difference.
    pub fn max_cell_difference<U: Probability>(&self, other: &JointDistribution<U>) -> f64 {
        let keys: BTreeSet<_> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        keys.into_iter()
            .map(|(a, b)| (self.probability(a, b).to_f64() - other.probability(a, b).to_f64()).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> JointDistribution<f64> {
        JointDistribution {
            entries: self.entries.iter().map(|(k, p)| (*k, p.to_f64())).collect(),
            cos_ab: self.cos_ab,
        }
    }

    /// CSV with header `alpha,beta,probability`; one row per cell, ordered by
    /// `(alpha, beta)` ascending.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,probability\n");
        for ((a, b), p) in &self.entries {
            let _ = writeln!(out, "{a},{b},{}", format_probability(p));
        }
        out
    }

    pub fn to_rows(&self) -> Vec<JointRow> {
        self.entries
            .iter()
            .map(|((a, b), p)| JointRow {
                alpha: *a,
                beta: *b,
                probability: p.to_f64(),
                exact: exact_string(p),
            })
            .collect()
    }

    pub fn to_json(&self) -> JointJson {
        JointJson {
            cos_ab: self.cos_ab,
            cells: self.to_rows(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointRow {
    pub alpha: HalfIntegerValue,
    pub beta: HalfIntegerValue,
    pub probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointJson {
    pub cos_ab: f64,
    pub cells: Vec<JointRow>,
}

fn exact_string<T: Probability>(p: &T) -> Option<String> {
    // Only rationals carry an exact rendering.
    let any: &dyn std::any::Any = p;
    any.downcast_ref::<BigRational>().map(|r| r.to_string())
}

fn format_probability<T: Probability>(p: &T) -> String {
    exact_string(p).unwrap_or_else(|| format!("{:.17e}", p.to_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i64) -> HalfIntegerValue {
        HalfIntegerValue::from_twice(t)
    }

    fn sample() -> JointDistribution<f64> {
        let mut entries = BTreeMap::new();
        entries.insert((h(1), h(-1)), 0.5);
        entries.insert((h(-1), h(1)), 0.5);
        JointDistribution { entries, cos_ab: 1.0 }
    }

    #[test]
    fn marginals_and_correlation() {
        let t = sample();
        assert_eq!(t.total(), 1.0);
        assert_eq!(t.marginal_alpha().probability(h(1)), 0.5);
        assert_eq!(t.correlation(), -0.25);
        assert!(t.is_sign_symmetric(0.0));
        assert_eq!(t.total_variation(&t), 0.0);
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "alpha,beta,probability");
        assert!(lines[1].starts_with("-1/2,1/2,5.0"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn rational_rows_carry_exact_text() {
        let mut entries = BTreeMap::new();
        entries.insert((h(0), h(0)), BigRational::from_ratio(1, 3));
        let t = JointDistribution { entries, cos_ab: 0.0 };
        assert_eq!(t.to_rows()[0].exact.as_deref(), Some("1/3"));
        assert!(t.to_csv().contains("0,0,1/3"));
    }
}
