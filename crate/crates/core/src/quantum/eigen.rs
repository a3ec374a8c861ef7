//! Cyclic Jacobi eigensolver for small Hermitian matrices.
//!
//! Each rotation first applies a diagonal phase that makes the pivot element
//! `h_pq` real, then a real Givens rotation in the `(p, q)` plane that zeroes
//! it. Sweeps repeat until the off-diagonal mass is below machine precision
//! relative to the Frobenius norm.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    /// `vectors[k]` belongs to `values[k]`.
    pub vectors: Vec<Vec<Complex<T>>>,
}

fn off_diagonal_norm<T: Real>(h: &ComplexMatrix<T>) -> T {
    let n = h.dim();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + h[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn hermitian_eigen<T: Real>(matrix: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = matrix.dim();
    let mut h = matrix.clone();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = h
        .as_slice()
        .iter()
        .fold(T::zero(), |s, z| s + z.norm_sqr())
        .sqrt();
    let threshold = T::epsilon() * scale.max(T::min_positive_value());

    let mut converged = n <= 1;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&h) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut h, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&h) > threshold {
        return Err(Error::EigenNoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        h[(a, a)]
            .re
            .partial_cmp(&h[(b, b)].re)
            .expect("finite eigenvalues")
    });
    Ok(HermitianEigen {
        values: order.iter().map(|&k| h[(k, k)].re).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
            .collect(),
    })
}

fn rotate<T: Real>(h: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let hpq = h[(p, q)];
    let modulus = hpq.norm();
    if modulus.is_zero() {
        return;
    }
    let n = h.dim();
    // phase e^{-i phi} with h_pq = |h_pq| e^{i phi}
    let phase = hpq.conj() / modulus;
    let app = h[(p, p)].re;
    let aqq = h[(q, q)].re;
    let two = T::one() + T::one();
    let theta = (two * modulus).atan2(aqq - app) / two;
    let (s, c) = theta.sin_cos();
    let c = Complex::new(c, T::zero());
    let s = Complex::new(s, T::zero());

    // Columns: H <- H V with V_pp = c, V_pq = s, V_qp = -s e^{-i phi}, V_qq = c e^{-i phi}.
    for k in 0..n {
        let hp = h[(k, p)];
        let hq = h[(k, q)];
        h[(k, p)] = c * hp - s * phase * hq;
        h[(k, q)] = s * hp + c * phase * hq;
        let vp = v[(k, p)];
        let vq = v[(k, q)];
        v[(k, p)] = c * vp - s * phase * vq;
        v[(k, q)] = s * vp + c * phase * vq;
    }
    // Rows: H <- V^dagger H.
    let phase_c = phase.conj();
    for k in 0..n {
        let hp = h[(p, k)];
        let hq = h[(q, k)];
        h[(p, k)] = c * hp - s * phase_c * hq;
        h[(q, k)] = s * hp + c * phase_c * hq;
    }
    h[(p, q)] = Complex::zero();
    h[(q, p)] = Complex::zero();
    h[(p, p)].im = T::zero();
    h[(q, q)].im = T::zero();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn check_decomposition(m: &ComplexMatrix<f64>, tol: f64) {
        let e = hermitian_eigen(m).unwrap();
        for (val, vec) in e.values.iter().zip(&e.vectors) {
            let mv = m.mul_vec(vec);
            for (a, b) in mv.iter().zip(vec) {
                assert!((a - b * val).norm() < tol, "residual too large");
            }
            let norm: f64 = vec.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < tol);
        }
        for i in 0..e.vectors.len() {
            for j in (i + 1)..e.vectors.len() {
                let ip: Complex<f64> = e.vectors[i]
                    .iter()
                    .zip(&e.vectors[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                assert!(ip.norm() < tol);
            }
        }
    }

    #[test]
    fn pauli_y() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = c(0.0, -1.0);
        m[(1, 0)] = c(0.0, 1.0);
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        check_decomposition(&m, 1e-13);
    }

    #[test]
    fn random_hermitian() {
        // deterministic pseudo-random fill
        let n = 7;
        let mut m = ComplexMatrix::zeros(n);
        let mut x = 0.123f64;
        let mut next = || {
            x = (x * 997.0 + 0.31).fract();
            x - 0.5
        };
        for i in 0..n {
            m[(i, i)] = c(next(), 0.0);
            for j in (i + 1)..n {
                let z = c(next(), next());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        check_decomposition(&m, 1e-12);
        let e = hermitian_eigen(&m).unwrap();
        let trace: f64 = e.values.iter().sum();
        assert!((trace - m.trace().re).abs() < 1e-12);
    }

    #[test]
    fn diagonal_and_trivial() {
        let mut m = ComplexMatrix::zeros(3);
        m[(0, 0)] = c(3.0, 0.0);
        m[(1, 1)] = c(-1.0, 0.0);
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.values, vec![-1.0, 0.0, 3.0]);
        let e = hermitian_eigen(&ComplexMatrix::<f64>::zeros(1)).unwrap();
        assert_eq!(e.values, vec![0.0]);
    }
}
