//! Unit vectors and proper rotations of R^3.

use std::ops::{Mul, Neg};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A unit vector in R^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction<T> {
    x: T,
    y: T,
    z: T,
}

/// Tolerance used when ingesting user supplied directions.
pub const INGEST_TOLERANCE: f64 = 1e-6;

impl<T: Real> Direction<T> {
    /// Builds a direction from components that are already unit length up to
    /// `tolerance`; the result is renormalized.
    pub fn normalized(x: T, y: T, z: T, tolerance: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        let n = norm.as_f64();
        if !n.is_finite() || (n - 1.0).abs() > tolerance {
            return Err(Error::NotUnit { norm: n, tolerance });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Normalizes an arbitrary non-zero vector.
    pub fn from_vector(x: T, y: T, z: T) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        let n = norm.as_f64();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NotUnit { norm: n, tolerance: f64::INFINITY });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Polar angle `theta` from +z and azimuth `phi` from +x.
    pub fn from_spherical(theta: T, phi: T) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub(crate) fn from_components_unchecked(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn x_axis() -> Self {
        Self::from_components_unchecked(T::one(), T::zero(), T::zero())
    }

    pub fn y_axis() -> Self {
        Self::from_components_unchecked(T::zero(), T::one(), T::zero())
    }

    /// The frame axis used by the f-bits.
    pub fn z_axis() -> Self {
        Self::from_components_unchecked(T::zero(), T::zero(), T::one())
    }

    pub fn x(&self) -> T {
        self.x
    }

    pub fn y(&self) -> T {
        self.y
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn components(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    /// Dot product of `self` with `lambda + sign * mu` (not normalized).
    pub fn dot_combination(&self, lambda: &Self, sign: i8, mu: &Self) -> T {
        let m = if sign >= 0 { T::one() } else { -T::one() };
        self.dot(lambda) + m * self.dot(mu)
    }

    pub fn cast<U: Real>(&self) -> Direction<U> {
        Direction {
            x: U::of(self.x.as_f64()),
            y: U::of(self.y.as_f64()),
            z: U::of(self.z.as_f64()),
        }
    }
}

impl<T: Real> Neg for Direction<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_components_unchecked(-self.x, -self.y, -self.z)
    }
}

/// A 3x3 orthogonal matrix with determinant +1, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation<T> {
    m: [[T; 3]; 3],
}

impl<T: Real> Rotation<T> {
    pub const TOLERANCE: f64 = 1e-9;

    pub fn new(m: [[T; 3]; 3]) -> Result<Self> {
        let mut orth = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let dot = m.iter().fold(T::zero(), |acc, row| acc + row[i] * row[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                orth = orth.max((dot.as_f64() - expect).abs());
            }
        }
        let det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            .as_f64();
        if orth > Self::TOLERANCE || (det - 1.0).abs() > Self::TOLERANCE {
            return Err(Error::NotRotation {
                orthogonality: orth,
                determinant: det,
            });
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[o, z, z], [z, o, z], [z, z, o]],
        }
    }

    /// Rotation by `angle` about the z axis.
    pub fn about_z(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (T::one(), T::zero());
        Self {
            m: [[c, -s, z], [s, c, z], [z, z, o]],
        }
    }

    /// Rotation by `angle` about the (normalized) `axis`, via Rodrigues' formula.
    pub fn about_axis(axis: &Direction<T>, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let t = T::one() - c;
        let [x, y, z] = axis.components();
        Self {
            m: [
                [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
                [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
                [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
            ],
        }
    }

    pub fn matrix(&self) -> &[[T; 3]; 3] {
        &self.m
    }

    pub fn apply(&self, v: &Direction<T>) -> Direction<T> {
        let r = |i: usize| self.m[i][0] * v.x + self.m[i][1] * v.y + self.m[i][2] * v.z;
        Direction::from_components_unchecked(r(0), r(1), r(2))
    }
}

impl<T: Real> Mul<&Direction<T>> for &Rotation<T> {
    type Output = Direction<T>;
    fn mul(self, rhs: &Direction<T>) -> Direction<T> {
        self.apply(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn normalizes_within_tolerance() {
        let d = Direction::normalized(0.0, 0.0, 1.0 + 5e-7, INGEST_TOLERANCE).unwrap();
        assert_eq!(d.z(), 1.0);
        assert!(Direction::normalized(0.0, 0.0, 1.1, INGEST_TOLERANCE).is_err());
        assert!(Direction::<f64>::from_vector(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn rotation_checks() {
        assert!(Rotation::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]).is_err());
        assert!(Rotation::new([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        let r = Rotation::about_axis(&Direction::from_vector(1.0, 2.0, 3.0).unwrap(), 0.7);
        assert!(Rotation::new(*r.matrix()).is_ok());
    }

    #[test]
    fn rz_pi_flips_x() {
        let r = Rotation::<f64>::about_z(PI);
        let v = r.apply(&Direction::x_axis());
        assert!((v.x() + 1.0).abs() < 1e-15 && v.y().abs() < 1e-15);
    }

    #[test]
    fn f32_directions_work() {
        let d = Direction::<f32>::from_spherical(1.0, 2.0);
        assert!((d.norm() - 1.0).abs() < 1e-6);
        let e: Direction<f64> = d.cast();
        assert!((e.norm() - 1.0).abs() < 1e-6);
    }
}
