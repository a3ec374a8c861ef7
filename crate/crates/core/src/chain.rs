//! The binary chain that drives the output recursion.
//!
//! Write `d = 2s + 1` in binary as `a0 a1 ... an` with `a0 = 1`. Reading the
//! bits from the most significant end gives the prefixes `a0a1`, `a0a1a2`, ...,
//! `d`; every prefix after the leading `1` is one protocol step. An even prefix
//! `D` is a half-integer step that adds `(D/4) * sign` to the accumulator. An
//! odd prefix `D` is an integer step that does the same with coefficient
//! `(D+1)/4` and then multiplies by `(1+f)/2`, where the shared bit `f` is `+1`
//! with probability `(1+p)/2` for the bias `p = (D-2)/D`. The recursion starts
//! from the spin-0 value 0.

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin::{HalfIntegerValue, SpinValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StepKind {
    HalfIntegerStep,
    IntegerStep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub prefix_dim: u32,
    pub kind: StepKind,
    pub coefficient: HalfIntegerValue,
    /// Only present on integer steps.
    pub f_bias: Option<Rational64>,
}

impl ChainStep {
    /// The canonical step for the binary prefix `prefix_dim >= 2`.
    pub fn for_prefix(prefix_dim: u32) -> Self {
        debug_assert!(prefix_dim >= 2);
        let d = i64::from(prefix_dim);
        if prefix_dim.is_multiple_of(2) {
            Self {
                prefix_dim,
                kind: StepKind::HalfIntegerStep,
                // d/4 == (d/2)/2
                coefficient: HalfIntegerValue::from_twice(d / 2),
                f_bias: None,
            }
        } else {
            Self {
                prefix_dim,
                kind: StepKind::IntegerStep,
                coefficient: HalfIntegerValue::from_twice((d + 1) / 2),
                f_bias: Some(Rational64::new(d - 2, d)),
            }
        }
    }

    pub fn is_integer_step(&self) -> bool {
        self.kind == StepKind::IntegerStep
    }

    /// Spin whose dimension is this step's prefix.
    pub fn prefix_spin(&self) -> SpinValue {
        SpinValue::from_twice(i64::from(self.prefix_dim) - 1).expect("prefix_dim >= 2")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryChain {
    spin: SpinValue,
    bits: Vec<u8>,
    steps: Vec<ChainStep>,
    /// Indices into `steps` of the integer steps, in chain order.
    integer_steps: Vec<usize>,
}

impl BinaryChain {
    pub fn build(spin: SpinValue) -> Self {
        let d = spin.dimension();
        let width = u32::BITS - d.leading_zeros();
        let bits: Vec<u8> = (0..width).rev().map(|i| ((d >> i) & 1) as u8).collect();
        let mut steps = Vec::with_capacity(bits.len().saturating_sub(1));
        let mut prefix = 1u32;
        for &bit in &bits[1..] {
            prefix = 2 * prefix + u32::from(bit);
            steps.push(ChainStep::for_prefix(prefix));
        }
        Self::from_parts(spin, bits, steps)
    }

    fn from_parts(spin: SpinValue, bits: Vec<u8>, steps: Vec<ChainStep>) -> Self {
        let integer_steps = steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_integer_step())
            .map(|(i, _)| i)
            .collect();
        Self {
            spin,
            bits,
            steps,
            integer_steps,
        }
    }

    pub fn spin(&self) -> SpinValue {
        self.spin
    }

    /// Binary digits `a0, a1, ..., an` of `2s + 1`.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn binary_string(&self) -> String {
        self.bits.iter().map(|b| char::from(b'0' + b)).collect()
    }

    pub fn steps(&self) -> &[ChainStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Positions of the integer steps within [`steps`](Self::steps).
    pub fn integer_step_indices(&self) -> &[usize] {
        &self.integer_steps
    }

    pub fn integer_step_count(&self) -> usize {
        self.integer_steps.len()
    }

    /// Slot of step `k` among the integer steps, if it is one.
    pub fn nu_slot(&self, step: usize) -> Option<usize> {
        self.integer_steps.binary_search(&step).ok()
    }

    /// Copy with `delta` added to the f-bias of step `step`. Used to check
    /// that the verification harness notices a wrong bias.
    pub fn with_bias_offset(&self, step: usize, delta: Rational64) -> Result<Self> {
        let mut out = self.clone();
        let target = out
            .steps
            .get_mut(step)
            .ok_or_else(|| Error::Config(format!("chain has no step {step}")))?;
        let bias = target
            .f_bias
            .as_mut()
            .ok_or_else(|| Error::Config(format!("step {step} is not an integer step")))?;
        *bias += delta;
        Ok(out)
    }

    /// Copy with `delta_twice / 2` added to the coefficient of step `step`.
    pub fn with_coefficient_offset(&self, step: usize, delta_twice: i64) -> Result<Self> {
        let mut out = self.clone();
        let target = out
            .steps
            .get_mut(step)
            .ok_or_else(|| Error::Config(format!("chain has no step {step}")))?;
        target.coefficient = target.coefficient + HalfIntegerValue::from_twice(delta_twice);
        Ok(out)
    }
}

/// Chain for `spin`; empty when `s = 0`.
pub fn build_chain(spin: SpinValue) -> BinaryChain {
    BinaryChain::build(spin)
}

/// Worst-case number of cbits, `ceil(log2(s + 1))`.
pub fn comm_cost(spin: SpinValue) -> usize {
    BinaryChain::build(spin).len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RandomnessBudget {
    pub n_lambda: usize,
    pub n_mu: usize,
    pub n_nu: usize,
}

impl RandomnessBudget {
    pub fn total(&self) -> usize {
        self.n_lambda + self.n_mu + self.n_nu
    }
}

pub fn randomness_budget(spin: SpinValue) -> RandomnessBudget {
    let chain = BinaryChain::build(spin);
    RandomnessBudget {
        n_lambda: chain.len(),
        n_mu: chain.len(),
        n_nu: chain.integer_step_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::make_spin;

    fn spin(twice: i64) -> SpinValue {
        make_spin(twice).unwrap()
    }

    fn ceil_log2_s_plus_1(twice: u32) -> usize {
        // smallest n with s + 1 <= 2^n, i.e. twice + 2 <= 2^(n+1)
        let mut n = 0;
        while (twice as u64) + 2 > (1u64 << (n + 1)) {
            n += 1;
        }
        n
    }

    #[test]
    fn chain_for_spin_half() {
        let c = build_chain(spin(1));
        assert_eq!(c.bits(), &[1, 0]);
        assert_eq!(c.steps(), &[ChainStep::for_prefix(2)]);
        assert_eq!(c.steps()[0].kind, StepKind::HalfIntegerStep);
        assert_eq!(c.steps()[0].coefficient, HalfIntegerValue::from_twice(1));
    }

    #[test]
    fn chain_for_spin_five_halves() {
        let c = build_chain(spin(5));
        assert_eq!(c.binary_string(), "110");
        let s = c.steps();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].prefix_dim, s[0].kind), (3, StepKind::IntegerStep));
        assert_eq!(s[0].coefficient, HalfIntegerValue::from_integer(1));
        assert_eq!(s[0].f_bias, Some(Rational64::new(1, 3)));
        assert_eq!((s[1].prefix_dim, s[1].kind), (6, StepKind::HalfIntegerStep));
        assert_eq!(s[1].coefficient, HalfIntegerValue::from_twice(3));
    }

    #[test]
    fn chain_for_spin_three() {
        let c = build_chain(spin(6));
        let s = c.steps();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].prefix_dim, 3);
        assert_eq!(s[0].f_bias, Some(Rational64::new(1, 3)));
        assert_eq!(s[1].prefix_dim, 7);
        assert_eq!(s[1].coefficient, HalfIntegerValue::from_integer(2));
        assert_eq!(s[1].f_bias, Some(Rational64::new(5, 7)));
        assert_eq!(c.integer_step_indices(), &[0, 1]);
    }

    #[test]
    fn spin_zero_has_empty_chain() {
        let c = build_chain(spin(0));
        assert!(c.is_empty());
        assert_eq!(c.bits(), &[1]);
        assert_eq!(comm_cost(spin(0)), 0);
    }

    #[test]
    fn comm_cost_examples() {
        assert_eq!(comm_cost(spin(1)), 1);
        assert_eq!(comm_cost(spin(6)), 2);
        assert_eq!(comm_cost(spin(7)), 3);
    }

    #[test]
    fn randomness_budget_examples() {
        let b = |t| {
            let r = randomness_budget(spin(t));
            (r.n_lambda, r.n_mu, r.n_nu)
        };
        assert_eq!(b(3), (2, 2, 0));
        assert_eq!(b(4), (2, 2, 1));
        assert_eq!(b(6), (2, 2, 2));
    }

    #[test]
    fn chain_invariants_up_to_twenty() {
        for twice in 1..=40u32 {
            let sp = spin(i64::from(twice));
            let c = build_chain(sp);
            let bits = c.bits();
            assert_eq!(bits[0], 1);
            let mut prev = 1u32;
            for (k, step) in c.steps().iter().enumerate() {
                assert_eq!(step.prefix_dim, 2 * prev + u32::from(bits[k + 1]));
                let d = i64::from(step.prefix_dim);
                match step.kind {
                    StepKind::HalfIntegerStep => {
                        assert_eq!(d % 2, 0);
                        // coefficient == d / 4
                        assert_eq!(4 * step.coefficient.twice(), 2 * d);
                        assert!(step.f_bias.is_none());
                    }
                    StepKind::IntegerStep => {
                        assert_eq!(d % 2, 1);
                        assert_eq!(4 * step.coefficient.twice(), 2 * (d + 1));
                        assert_eq!(step.f_bias, Some(Rational64::new(d - 2, d)));
                    }
                }
                prev = step.prefix_dim;
            }
            assert_eq!(prev, sp.dimension());
            let n = c.len() as u32;
            assert!((1u32 << n) - 1 < sp.dimension() && sp.dimension() < (1u32 << (n + 1)));
            assert_eq!(c.len(), ceil_log2_s_plus_1(twice));
            let ones: usize = bits[1..].iter().map(|&b| b as usize).sum();
            assert_eq!(c.integer_step_count(), ones);
        }
    }

    #[test]
    fn comm_cost_is_monotone_and_steps_at_powers_of_two() {
        for twice in 1..200u32 {
            let a = comm_cost(spin(i64::from(twice)));
            let b = comm_cost(spin(i64::from(twice) + 1));
            let d_next = twice + 2;
            if d_next.is_power_of_two() {
                assert_eq!(b, a + 1, "2s = {twice}");
            } else {
                assert_eq!(b, a, "2s = {twice}");
            }
        }
    }

    #[test]
    fn budget_bounds() {
        for twice in 0..=40 {
            let sp = spin(twice);
            let r = randomness_budget(sp);
            assert!(r.n_nu <= r.n_lambda);
            assert_eq!(r.n_lambda, r.n_mu);
            assert_eq!(r.n_lambda, comm_cost(sp));
        }
    }

    #[test]
    fn perturbations() {
        let c = build_chain(spin(6));
        let p = c.with_bias_offset(1, Rational64::new(1, 100)).unwrap();
        assert_eq!(p.steps()[1].f_bias, Some(Rational64::new(5, 7) + Rational64::new(1, 100)));
        assert!(build_chain(spin(3)).with_bias_offset(0, Rational64::new(1, 100)).is_err());
        let q = c.with_coefficient_offset(0, 1).unwrap();
        assert_eq!(q.steps()[0].coefficient, HalfIntegerValue::from_twice(3));
        assert!(c.with_coefficient_offset(5, 1).is_err());
    }
}
