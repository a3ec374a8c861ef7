//! Exact output statistics of the protocol by finite enumeration.
//!
//! Each chain step contributes a pair of signs: Alice's `x_k = Sgn(a.lambda_k)`
//! and Bob's `y_k = Sgn(b.(lambda_k + c_k mu_k))`. Both are uniform on `{+1, -1}`
//! and `<x_k y_k> = a.b`, while signs from different steps are independent
//! because they are functions of disjoint sets of hidden variables.
//!
//! The law of a pair of `+-1` variables is fixed by its two means and its
//! correlation: writing `P(x, y) = (1 + m_x x + m_y y + r x y) / 4` covers all
//! four cells, and the coefficients are exactly `m_x = <x>`, `m_y = <y>`,
//! `r = <x y>`. With zero means and `r = a.b` this gives
//!
//! ```text
//! P(x, y) = (1 + x y cos_ab) / 4.
//! ```
//!
//! The f-bits are shared and independent of everything else, with
//! `P(f = +1) = (1 + p) / 2`. Summing over all `4^n 2^L` configurations gives
//! the joint law of `(alpha, beta)`. The accumulator logic here is written
//! independently of [`crate::protocol`] so the two can check each other.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use serde::Serialize;

use crate::chain::{BinaryChain, StepKind};
use crate::error::{Error, Result};
use crate::scalar::Probability;
use crate::spin::HalfIntegerValue;
use crate::table::{DistributionTable, JointDistribution};

/// Largest chain the enumerator accepts (`4^n 2^L` configurations).
pub const MAX_CONFIGURATIONS: u64 = 1 << 24;

fn bias_probability<T: Probability>(bias: Rational64, f: i8) -> T {
    let (p, q) = (*bias.numer(), *bias.denom());
    // (1 + f p) / 2 with p = num/den
    T::from_ratio(q + i64::from(f) * p, 2 * q)
}

fn configuration_count(chain: &BinaryChain, per_step: u64) -> Result<u64> {
    let n = chain.len() as u32;
    let l = chain.integer_step_count() as u32;
    per_step
        .checked_pow(n)
        .and_then(|x| x.checked_mul(1u64 << l))
        .filter(|&c| c <= MAX_CONFIGURATIONS)
        .ok_or_else(|| Error::Config(format!("chain with {n} steps is too long to enumerate")))
}

/// Evaluates Alice's and Bob's accumulators for one configuration.
/// `pair_bits` holds two bits per step (bit 0 Alice, bit 1 Bob; set = -1) and
/// `f_mask` one bit per integer step (set = f of -1).
fn accumulate(chain: &BinaryChain, pair_bits: u64, f_mask: u64, per_step_bits: u32) -> (i64, i64) {
    let mut acc_a = 0i64;
    let mut acc_b = 0i64;
    let mut f_index = 0;
    for (k, step) in chain.steps().iter().enumerate() {
        let code = (pair_bits >> (per_step_bits * k as u32)) & ((1 << per_step_bits) - 1);
        let x = if code & 1 == 0 { 1 } else { -1 };
        let y = if per_step_bits == 1 {
            x
        } else if code & 2 == 0 {
            1
        } else {
            -1
        };
        let c = step.coefficient.twice();
        acc_a += x * c;
        acc_b += y * c;
        if step.kind == StepKind::IntegerStep {
            if (f_mask >> f_index) & 1 == 1 {
                acc_a = 0;
                acc_b = 0;
            }
            f_index += 1;
        }
    }
    (acc_a, acc_b)
}

fn f_weight<T: Probability>(chain: &BinaryChain, f_mask: u64) -> T {
    let mut w = T::one();
    for (slot, &k) in chain.integer_step_indices().iter().enumerate() {
        let f = if (f_mask >> slot) & 1 == 1 { -1 } else { 1 };
        let bias = chain.steps()[k].f_bias.expect("integer step has a bias");
        w = w * bias_probability::<T>(bias, f);
    }
    w
}

/// Exact distribution of Alice's output.
pub fn exact_marginal<T: Probability>(chain: &BinaryChain) -> Result<DistributionTable<T>> {
    configuration_count(chain, 2)?;
    let n = chain.len() as u32;
    let l = chain.integer_step_count() as u32;
    let sign_weight = T::from_ratio(1, 1i64 << n);
    let mut terms: BTreeMap<HalfIntegerValue, Vec<T>> = BTreeMap::new();
    for f_mask in 0..(1u64 << l) {
        let w = f_weight::<T>(chain, f_mask) * sign_weight.clone();
        for signs in 0..(1u64 << n) {
            let (acc, _) = accumulate(chain, signs, f_mask, 1);
            terms
                .entry(HalfIntegerValue::from_twice(-acc))
                .or_default()
                .push(w.clone());
        }
    }
    Ok(DistributionTable {
        entries: terms.into_iter().map(|(k, v)| (k, T::sum_terms(v))).collect(),
    })
}

/// Exact joint distribution of `(alpha, beta)` for `a.b = cos_ab`.
pub fn exact_joint<T: Probability>(chain: &BinaryChain, cos_ab: T) -> Result<JointDistribution<T>> {
    let c = cos_ab.to_f64();
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::CosineOutOfRange(c));
    }
    configuration_count(chain, 4)?;
    let n = chain.len() as u32;
    let l = chain.integer_step_count() as u32;
    let quarter = T::from_ratio(1, 4);
    let agree = (T::one() + cos_ab.clone()) * quarter.clone();
    let differ = (T::one() - cos_ab) * quarter;

    let mut terms: BTreeMap<(HalfIntegerValue, HalfIntegerValue), Vec<T>> = BTreeMap::new();
    for f_mask in 0..(1u64 << l) {
        let fw = f_weight::<T>(chain, f_mask);
        for pairs in 0..(1u64 << (2 * n)) {
            let mut w = fw.clone();
            for k in 0..n {
                let code = (pairs >> (2 * k)) & 3;
                // x y = +1 when both bits agree
                w = w * if code == 0 || code == 3 { agree.clone() } else { differ.clone() };
            }
            let (acc_a, acc_b) = accumulate(chain, pairs, f_mask, 2);
            terms
                .entry((HalfIntegerValue::from_twice(-acc_a), HalfIntegerValue::from_twice(acc_b)))
                .or_default()
                .push(w);
        }
    }
    Ok(JointDistribution {
        entries: terms.into_iter().map(|(k, v)| (k, T::sum_terms(v))).collect(),
        cos_ab: c,
    })
}

/// `<alpha beta>` of the exact joint law.
pub fn exact_correlation<T: Probability>(chain: &BinaryChain, cos_ab: T) -> Result<T> {
    Ok(exact_joint(chain, cos_ab)?.correlation())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub dimension: u32,
    pub kind: StepKind,
    /// Left-hand side as an exact fraction.
    pub lhs: String,
    /// `(d^2 - 1) / 12`.
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
    pub all_hold: bool,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `(d^2 - 1) / 12 = s(s + 1) / 3` for `d = 2s + 1`.
fn correlation_scale(d: i64) -> BigRational {
    rat(d * d - 1, 12)
}

/// Checks, in exact arithmetic, that one chain step maps the correlation
/// scale of its parent prefix onto its own:
///
/// * even `d`: `(d/4)^2 + ((d/2)^2 - 1)/12 = (d^2 - 1)/12`
/// * odd `d`: `((d-1)/d) [((d+1)/4)^2 + (((d-1)/2)^2 - 1)/12] = (d^2 - 1)/12`
pub fn verify_recursion_identity(dimensions: impl IntoIterator<Item = u32>) -> IdentityReport {
    let checks: Vec<IdentityCheck> = dimensions
        .into_iter()
        .map(|dim| {
            let d = i64::from(dim);
            let (kind, lhs) = if d % 2 == 0 {
                let coeff = rat(d, 4);
                let parent = rat((d / 2) * (d / 2) - 1, 12);
                (StepKind::HalfIntegerStep, &coeff * &coeff + parent)
            } else {
                let coeff = rat(d + 1, 4);
                let half = (d - 1) / 2;
                let parent = rat(half * half - 1, 12);
                // E[((1 + f)/2)^2] = (1 + p)/2 = (d - 1)/d
                let keep = rat(d - 1, d);
                (StepKind::IntegerStep, keep * (&coeff * &coeff + parent))
            };
            let rhs = correlation_scale(d);
            IdentityCheck {
                dimension: dim,
                kind,
                holds: lhs == rhs,
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            }
        })
        .collect();
    let all_hold = !checks.is_empty() && checks.iter().all(|c| c.holds);
    IdentityReport { checks, all_hold }
}

/// Exact rational `cos_ab` from a float, for callers who want the oracle in
/// exact arithmetic.
pub fn exact_cosine(cos_ab: f64) -> Result<BigRational> {
    if !(-1.0..=1.0).contains(&cos_ab) {
        return Err(Error::CosineOutOfRange(cos_ab));
    }
    Ok(BigRational::from_float(cos_ab).unwrap_or_else(BigRational::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::chain::build_chain;
    use crate::spin::make_spin;

    fn chain(twice: i64) -> BinaryChain {
        build_chain(make_spin(twice).unwrap())
    }

    fn h(t: i64) -> HalfIntegerValue {
        HalfIntegerValue::from_twice(t)
    }

    #[test]
    fn marginal_examples() {
        let m = exact_marginal::<BigRational>(&chain(3)).unwrap();
        assert_eq!(m.entries.len(), 4);
        assert!(m.entries.values().all(|p| *p == rat(1, 4)));

        let m = exact_marginal::<BigRational>(&chain(4)).unwrap();
        assert_eq!(m.entries.len(), 5);
        assert!(m.entries.values().all(|p| *p == rat(1, 5)));

        let m = exact_marginal::<BigRational>(&chain(2)).unwrap();
        assert_eq!(m.probability(h(0)), rat(1, 3));
    }

    #[test]
    fn marginal_uniform_up_to_twenty() {
        for twice in 0..=40 {
            let sp = make_spin(twice).unwrap();
            let m = exact_marginal::<BigRational>(&build_chain(sp)).unwrap();
            let support = sp.outcome_support();
            assert_eq!(m.entries.len(), support.len(), "2s = {twice}");
            let u = rat(1, i64::from(sp.dimension()));
            for v in support {
                assert_eq!(m.probability(v), u, "2s = {twice}, value {v}");
            }
            assert_eq!(m.total(), BigRational::one());
        }
    }

    #[test]
    fn joint_spin_half() {
        let j = exact_joint(&chain(1), BigRational::one()).unwrap();
        assert_eq!(j.probability(h(1), h(-1)), rat(1, 2));
        assert_eq!(j.probability(h(-1), h(1)), rat(1, 2));
        assert_eq!(j.probability(h(1), h(1)), BigRational::zero());

        let j = exact_joint(&chain(1), BigRational::zero()).unwrap();
        for a in [1, -1] {
            for b in [1, -1] {
                assert_eq!(j.probability(h(a), h(b)), rat(1, 4));
            }
        }
    }

    #[test]
    fn joint_spin_one_correlation() {
        let j = exact_joint(&chain(2), BigRational::one()).unwrap();
        assert_eq!(j.correlation(), rat(-2, 3));
    }

    #[test]
    fn correlation_examples() {
        assert_eq!(exact_correlation(&chain(1), 1.0f64).unwrap(), -0.25);
        assert!((exact_correlation(&chain(6), -1.0f64).unwrap() - 4.0).abs() < 1e-12);
        assert!((exact_correlation(&chain(4), 0.3f64).unwrap() + 0.6).abs() < 1e-12);
        assert_eq!(exact_correlation(&chain(4), rat(3, 10)).unwrap(), rat(-3, 5));
    }

    #[test]
    fn rejects_bad_cosine() {
        assert_eq!(
            exact_joint(&chain(1), 1.5f64).unwrap_err(),
            Error::CosineOutOfRange(1.5)
        );
        assert!(exact_cosine(-1.01).is_err());
    }

    #[test]
    fn joint_marginals_and_symmetry() {
        for twice in 1..=15 {
            let c = chain(twice);
            let j = exact_joint(&c, rat(2, 7)).unwrap();
            let m = exact_marginal::<BigRational>(&c).unwrap();
            assert_eq!(j.marginal_alpha(), m);
            assert_eq!(j.marginal_beta(), m);
            assert!(j.is_sign_symmetric(0.0));
            assert_eq!(j.total(), BigRational::one());
        }
    }

    #[test]
    fn identity_examples() {
        let r = verify_recursion_identity([4, 3, 7]);
        assert!(r.all_hold);
        assert_eq!(r.checks[0].lhs, "5/4"); // 1 + 1/4 = 15/12
        assert_eq!(r.checks[1].lhs, "2/3"); // (2/3)(1 + 0) = 8/12
        assert_eq!(r.checks[2].lhs, "4"); // (6/7)(4 + 2/3) = 48/12
    }

    #[test]
    fn identity_fails_for_wrong_kind() {
        // An even dimension checked with the odd-step formula must not hold;
        // guards against a vacuous identity.
        let d = 6i64;
        let coeff = rat(d + 1, 4);
        let parent = rat(((d - 1) / 2).pow(2) - 1, 12);
        let lhs = rat(d - 1, d) * (&coeff * &coeff + parent);
        assert_ne!(lhs, correlation_scale(d));
    }

    #[test]
    fn configuration_guard() {
        assert!(exact_joint(&chain(2 * 4096), 0.5f64).is_err());
    }
}
