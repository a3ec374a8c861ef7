//! Quantum-mechanical reference: spin matrices, the two-particle singlet and
//! its measurement statistics for spin components `a.J` and `b.J` (hbar = 1).
//!
//! Basis vectors are ordered `m = s, s-1, ..., -s`, so index `i` holds
//! `m = s - i`.

mod eigen;
mod matrix;

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use matrix::ComplexMatrix;

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::scalar::{Probability, Real};
use crate::spin::{HalfIntegerValue, SpinValue};
use crate::table::JointDistribution;

/// Tolerance for matching a computed eigenvalue to the exact spectrum.
const EIGEN_MATCH_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SpinOperators<T> {
    pub spin: SpinValue,
    pub jx: ComplexMatrix<T>,
    pub jy: ComplexMatrix<T>,
    pub jz: ComplexMatrix<T>,
}

impl<T: Real> SpinOperators<T> {
    /// Standard angular momentum matrices built from the ladder elements
    /// `<m+1|J+|m> = sqrt(s(s+1) - m(m+1))`.
    pub fn new(spin: SpinValue) -> Self {
        let d = spin.dimension() as usize;
        let s = T::of(spin.as_f64());
        let two = T::of(2.0);
        let mut jz = ComplexMatrix::zeros(d);
        let mut jx = ComplexMatrix::zeros(d);
        let mut jy = ComplexMatrix::zeros(d);
        for i in 0..d {
            let m = s - T::of(i as f64);
            jz[(i, i)] = Complex::new(m, T::zero());
            if i > 0 {
                // J+ maps index i (m) to index i-1 (m+1)
                let up = (s * (s + T::one()) - m * (m + T::one())).max(T::zero()).sqrt();
                jx[(i - 1, i)] = Complex::new(up / two, T::zero());
                jx[(i, i - 1)] = Complex::new(up / two, T::zero());
                // Jy = (J+ - J-)/(2i)
                jy[(i - 1, i)] = Complex::new(T::zero(), -up / two);
                jy[(i, i - 1)] = Complex::new(T::zero(), up / two);
            }
        }
        Self { spin, jx, jy, jz }
    }

    /// The spin component `a.J`.
    pub fn along(&self, a: &Direction<T>) -> ComplexMatrix<T> {
        let re = |x: T| Complex::new(x, T::zero());
        let ax = self.jx.scale(re(a.x()));
        let ay = self.jy.scale(re(a.y()));
        let az = self.jz.scale(re(a.z()));
        &(&ax + &ay) + &az
    }

    /// `Jx^2 + Jy^2 + Jz^2`.
    pub fn casimir(&self) -> ComplexMatrix<T> {
        let xx = &self.jx * &self.jx;
        let yy = &self.jy * &self.jy;
        let zz = &self.jz * &self.jz;
        &(&xx + &yy) + &zz
    }

    /// Largest element error of the three SU(2) commutation relations.
    pub fn commutator_error(&self) -> T {
        let i = Complex::new(T::zero(), T::one());
        let e1 = (&self.jx.commutator(&self.jy) - &self.jz.scale(i)).max_abs();
        let e2 = (&self.jy.commutator(&self.jz) - &self.jx.scale(i)).max_abs();
        let e3 = (&self.jz.commutator(&self.jx) - &self.jy.scale(i)).max_abs();
        e1.max(e2).max(e3)
    }

    /// Largest element error of `J^2 = s(s+1) I`.
    pub fn casimir_error(&self) -> T {
        let s = T::of(self.spin.as_f64());
        let target = ComplexMatrix::identity(self.jx.dim()).scale(Complex::new(s * (s + T::one()), T::zero()));
        (&self.casimir() - &target).max_abs()
    }
}

pub fn build_spin_operators<T: Real>(spin: SpinValue) -> SpinOperators<T> {
    SpinOperators::new(spin)
}

/// The total-spin-zero state of two spin-`s` particles.
#[derive(Debug, Clone)]
pub struct SingletState<T> {
    pub spin: SpinValue,
    /// Amplitude of `|m_A> (x) |m_B>` at `index_A * d + index_B`.
    pub amplitudes: Vec<Complex<T>>,
}

impl<T: Real> SingletState<T> {
    /// `(2s+1)^{-1/2} sum_m (-1)^{s-m} |m>|-m>`. The `m = s` amplitude is
    /// real and positive.
    pub fn new(spin: SpinValue) -> Self {
        let d = spin.dimension() as usize;
        let amp = T::one() / T::of(d as f64).sqrt();
        let mut amplitudes = vec![Complex::zero(); d * d];
        for i in 0..d {
            // s - m = i; partner index of -m is d - 1 - i
            let sign = if i % 2 == 0 { amp } else { -amp };
            amplitudes[i * d + (d - 1 - i)] = Complex::new(sign, T::zero());
        }
        Self { spin, amplitudes }
    }

    pub fn dimension(&self) -> usize {
        self.spin.dimension() as usize
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt()
    }

    /// `(A (x) B)|psi>`.
    pub fn apply_product(&self, a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Vec<Complex<T>> {
        let d = self.dimension();
        // psi as a d x d matrix M; (A (x) B) psi == A M B^T
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.amplitudes[i * d + j];
            }
        }
        let out = &(a * &m) * &b.transpose();
        out.as_slice().to_vec()
    }

    /// Norm of `(J_i (x) I + I (x) J_i)|psi>` maximized over `i = x, y, z`.
    pub fn total_spin_residual(&self, ops: &SpinOperators<T>) -> T {
        let id = ComplexMatrix::identity(self.dimension());
        [&ops.jx, &ops.jy, &ops.jz]
            .into_iter()
            .map(|j| {
                let left = self.apply_product(j, &id);
                let right = self.apply_product(&id, j);
                left.iter()
                    .zip(&right)
                    .fold(T::zero(), |s, (x, y)| s + (x + y).norm_sqr())
                    .sqrt()
            })
            .fold(T::zero(), T::max)
    }
}

pub fn build_singlet<T: Real>(spin: SpinValue) -> SingletState<T> {
    SingletState::new(spin)
}

/// `<psi| a.J (x) b.J |psi>` by direct contraction.
pub fn quantum_correlation<T: Real>(spin: SpinValue, a: &Direction<T>, b: &Direction<T>) -> T {
    let ops = SpinOperators::new(spin);
    let psi = SingletState::new(spin);
    let image = psi.apply_product(&ops.along(a), &ops.along(b));
    psi.amplitudes
        .iter()
        .zip(&image)
        .fold(Complex::zero(), |acc: Complex<T>, (p, q)| acc + p.conj() * q)
        .re
}

/// Eigenvectors of `a.J` keyed by their exact eigenvalue.
pub fn spin_component_eigenbasis<T: Real>(
    ops: &SpinOperators<T>,
    a: &Direction<T>,
) -> Result<Vec<(HalfIntegerValue, Vec<Complex<T>>)>> {
    let eig = hermitian_eigen(&ops.along(a))?;
    let mut out = Vec::with_capacity(eig.values.len());
    for (value, vector) in eig.values.into_iter().zip(eig.vectors) {
        let twice = (value.as_f64() * 2.0).round();
        let error = (value.as_f64() - twice / 2.0).abs();
        let label = HalfIntegerValue::from_twice(twice as i64);
        let in_range = label.twice().abs() <= i64::from(ops.spin.twice())
            && (label.twice() - i64::from(ops.spin.twice())) % 2 == 0;
        if error > EIGEN_MATCH_TOLERANCE || !in_range || out.iter().any(|(l, _)| *l == label) {
            return Err(Error::EigenMismatch {
                value: value.as_f64(),
                error,
            });
        }
        out.push((label, vector));
    }
    Ok(out)
}

/// `P(alpha, beta) = |(<u_alpha| (x) <v_beta|) |psi>|^2` for eigenvectors
/// `u` of `a.J` and `v` of `b.J`.
pub fn quantum_joint<T: Real + Probability>(
    spin: SpinValue,
    a: &Direction<T>,
    b: &Direction<T>,
) -> Result<JointDistribution<T>> {
    let ops = SpinOperators::new(spin);
    let psi = SingletState::new(spin);
    let d = psi.dimension();
    let alice = spin_component_eigenbasis(&ops, a)?;
    let bob = spin_component_eigenbasis(&ops, b)?;
    let mut entries = BTreeMap::new();
    for (alpha, u) in &alice {
        // w_j = sum_i conj(u_i) psi_ij
        let w: Vec<Complex<T>> = (0..d)
            .map(|j| {
                (0..d).fold(Complex::zero(), |acc, i| acc + u[i].conj() * psi.amplitudes[i * d + j])
            })
            .collect();
        for (beta, v) in &bob {
            let amp = w
                .iter()
                .zip(v)
                .fold(Complex::zero(), |acc: Complex<T>, (x, y)| acc + y.conj() * x);
            entries.insert((*alpha, *beta), amp.norm_sqr());
        }
    }
    Ok(JointDistribution {
        entries,
        cos_ab: a.dot(b).as_f64(),
    })
}
