//! One run of the classical simulation protocol.
//!
//! Both parties walk the chain from the most significant prefix. At step `k`
//! Alice uses the sign `Sgn(a.lambda_k)`, Bob uses `Sgn(b.(lambda_k + c_k mu_k))`
//! where `c_k = Sgn(a.lambda_k) Sgn(a.mu_k)` is the cbit Alice sends. On an
//! integer step both read the shared bit `f_k = Sgn(z.nu_k + p_k)` and reset
//! their accumulator to zero when `f_k = -1`. Alice outputs the negated
//! accumulator, Bob the accumulator itself. All cbits are always sent.

use num_rational::Rational64;
use num_traits::ToPrimitive;
use rand::RngCore;
use serde::Serialize;

use crate::chain::{BinaryChain, StepKind};
use crate::direction::{Direction, Rotation};
use crate::error::{Error, Result};
use crate::random::{sample_direction, sign_of, RandomStream};
use crate::scalar::Real;
use crate::spin::HalfIntegerValue;

/// The hidden variables for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedRandomness<T> {
    /// One per chain step.
    pub lambdas: Vec<Direction<T>>,
    /// One per chain step.
    pub mus: Vec<Direction<T>>,
    /// One per integer step, in chain order (see [`BinaryChain::nu_slot`]).
    pub nus: Vec<Direction<T>>,
}

impl<T: Real> SharedRandomness<T> {
    /// Draws `lambda_k, mu_k` and, on integer steps, `nu_k`, step by step.
    pub fn draw<R: RngCore + ?Sized>(chain: &BinaryChain, rng: &mut R) -> Self {
        let n = chain.len();
        let mut out = Self {
            lambdas: Vec::with_capacity(n),
            mus: Vec::with_capacity(n),
            nus: Vec::with_capacity(chain.integer_step_count()),
        };
        for step in chain.steps() {
            out.lambdas.push(sample_direction(rng));
            out.mus.push(sample_direction(rng));
            if step.kind == StepKind::IntegerStep {
                out.nus.push(sample_direction(rng));
            }
        }
        out
    }
}

pub fn draw_shared_randomness<T: Real>(
    chain: &BinaryChain,
    stream: &RandomStream,
) -> SharedRandomness<T> {
    SharedRandomness::draw(chain, &mut stream.generator())
}

/// The correction bit `Sgn(a.lambda) Sgn(a.mu)`.
pub fn c_bit<T: Real>(a: &Direction<T>, lambda: &Direction<T>, mu: &Direction<T>) -> i8 {
    sign_of(a.dot(lambda)) * sign_of(a.dot(mu))
}

/// The biased shared bit `Sgn(z.nu + bias)`.
pub fn f_bit<T: Real>(nu: &Direction<T>, bias: Rational64) -> i8 {
    let p = T::of(bias.to_f64().expect("bias is finite"));
    sign_of(nu.z() + p)
}

/// The f-bits of every integer step, in chain order.
pub fn f_bits<T: Real>(chain: &BinaryChain, rnd: &SharedRandomness<T>) -> Vec<i8> {
    chain
        .integer_step_indices()
        .iter()
        .zip(&rnd.nus)
        .map(|(&k, nu)| f_bit(nu, chain.steps()[k].f_bias.expect("integer step has a bias")))
        .collect()
}

/// Runs the output recursion with per-step signs and per-integer-step f-bits,
/// returning the final accumulator (Bob's output; Alice outputs its negation).
pub fn recursion_value(chain: &BinaryChain, signs: &[i8], f_bits: &[i8]) -> HalfIntegerValue {
    debug_assert_eq!(signs.len(), chain.len());
    debug_assert_eq!(f_bits.len(), chain.integer_step_count());
    let mut acc = HalfIntegerValue::ZERO;
    let mut f = f_bits.iter();
    for (step, &sign) in chain.steps().iter().zip(signs) {
        acc = step.coefficient.signed(sign) + acc;
        if step.kind == StepKind::IntegerStep && *f.next().expect("f-bit per integer step") < 0 {
            acc = HalfIntegerValue::ZERO;
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliceOutput {
    pub alpha: HalfIntegerValue,
    pub cbits: Vec<i8>,
}

pub fn alice_output<T: Real>(
    a: &Direction<T>,
    chain: &BinaryChain,
    rnd: &SharedRandomness<T>,
) -> AliceOutput {
    let signs: Vec<i8> = rnd.lambdas.iter().map(|l| sign_of(a.dot(l))).collect();
    let cbits = rnd
        .lambdas
        .iter()
        .zip(&rnd.mus)
        .map(|(l, m)| c_bit(a, l, m))
        .collect();
    let alpha = -recursion_value(chain, &signs, &f_bits(chain, rnd));
    AliceOutput { alpha, cbits }
}

/// Bob's output. Depends on Alice only through `cbits`.
pub fn bob_output<T: Real>(
    b: &Direction<T>,
    chain: &BinaryChain,
    rnd: &SharedRandomness<T>,
    cbits: &[i8],
) -> Result<HalfIntegerValue> {
    if cbits.len() != chain.len() {
        return Err(Error::TranscriptLength {
            expected: chain.len(),
            got: cbits.len(),
        });
    }
    let signs: Vec<i8> = rnd
        .lambdas
        .iter()
        .zip(&rnd.mus)
        .zip(cbits)
        .map(|((l, m), &c)| sign_of(b.dot_combination(l, c, m)))
        .collect();
    Ok(recursion_value(chain, &signs, &f_bits(chain, rnd)))
}

/// Outputs and transcript of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub alpha: HalfIntegerValue,
    pub beta: HalfIntegerValue,
    pub cbits: Vec<i8>,
    /// Shared, not communicated; kept for diagnostics.
    pub f_bits: Vec<i8>,
}

/// Runs both parties with randomness from `rng`.
pub fn run_trial_with<T: Real, R: RngCore + ?Sized>(
    a: &Direction<T>,
    b: &Direction<T>,
    chain: &BinaryChain,
    rng: &mut R,
) -> TrialOutcome {
    let rnd = SharedRandomness::draw(chain, rng);
    let alice = alice_output(a, chain, &rnd);
    let beta = bob_output(b, chain, &rnd, &alice.cbits).expect("alice sends one cbit per step");
    TrialOutcome {
        alpha: alice.alpha,
        beta,
        cbits: alice.cbits,
        f_bits: f_bits(chain, &rnd),
    }
}

pub fn run_trial<T: Real>(
    a: &Direction<T>,
    b: &Direction<T>,
    chain: &BinaryChain,
    stream: &RandomStream,
) -> TrialOutcome {
    run_trial_with(a, b, chain, &mut stream.generator())
}

/// Protocol for a maximally entangled state `(U x I)|singlet>` whose `U`
/// induces the rotation `rotation`: run the singlet protocol on `rotation * a`.
pub fn run_trial_rotated<T: Real>(
    a: &Direction<T>,
    b: &Direction<T>,
    rotation: &Rotation<T>,
    chain: &BinaryChain,
    stream: &RandomStream,
) -> TrialOutcome {
    run_trial(&rotation.apply(a), b, chain, stream)
}
