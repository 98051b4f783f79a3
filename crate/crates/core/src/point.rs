//! Points of the underlying spaces and of parameter spaces.
//!
//! A single enum covers every point kind the library ships: lattice points,
//! real vectors (also used for angle coordinates of parameter tori), complex
//! vectors (torus, disc and half-plane points), square matrices and
//! permutations.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type RealVec = SmallVec<[f64; 3]>;
pub type ComplexVec = SmallVec<[Complex64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Int(i64),
    Real(RealVec),
    Complex(ComplexVec),
    /// Row-major square matrix.
    Matrix { n: usize, data: Vec<f64> },
    /// Images of `0..n` under a permutation.
    Perm(Vec<usize>),
}

impl Point {
    pub fn real(x: f64) -> Self {
        Point::Real(smallvec::smallvec![x])
    }

    pub fn real_vec(xs: &[f64]) -> Self {
        Point::Real(xs.iter().copied().collect())
    }

    pub fn complex(z: Complex64) -> Self {
        Point::Complex(smallvec::smallvec![z])
    }

    pub fn complex_vec(zs: &[Complex64]) -> Self {
        Point::Complex(zs.iter().copied().collect())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Point::Int(_) => "int",
            Point::Real(_) => "real",
            Point::Complex(_) => "complex",
            Point::Matrix { .. } => "matrix",
            Point::Perm(_) => "perm",
        }
    }

    pub fn as_int(&self) -> Result<i64> {
        match self {
            Point::Int(k) => Ok(*k),
            other => Err(mismatch("int", other)),
        }
    }

    pub fn as_real(&self) -> Result<&[f64]> {
        match self {
            Point::Real(v) => Ok(v),
            other => Err(mismatch("real", other)),
        }
    }

    /// First real coordinate.
    pub fn x(&self) -> Result<f64> {
        self.as_real()?
            .first()
            .copied()
            .ok_or_else(|| Error::InvalidParameter("empty real point".into()))
    }

    pub fn as_complex(&self) -> Result<&[Complex64]> {
        match self {
            Point::Complex(v) => Ok(v),
            other => Err(mismatch("complex", other)),
        }
    }

    pub fn z(&self) -> Result<Complex64> {
        self.as_complex()?
            .first()
            .copied()
            .ok_or_else(|| Error::InvalidParameter("empty complex point".into()))
    }

    pub fn as_matrix(&self) -> Result<(usize, &[f64])> {
        match self {
            Point::Matrix { n, data } => Ok((*n, data)),
            other => Err(mismatch("matrix", other)),
        }
    }

    pub fn as_perm(&self) -> Result<&[usize]> {
        match self {
            Point::Perm(p) => Ok(p),
            other => Err(mismatch("perm", other)),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Point::Int(_) | Point::Perm(_) => true,
            Point::Real(v) => v.iter().all(|x| x.is_finite()),
            Point::Complex(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            Point::Matrix { data, .. } => data.iter().all(|x| x.is_finite()),
        }
    }
}

fn mismatch(expected: &'static str, got: &Point) -> Error {
    Error::PointKind {
        expected,
        got: got.kind_name().to_string(),
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Int(k) => write!(f, "{k}"),
            Point::Real(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Point::Real(v) => write!(f, "{:?}", v.as_slice()),
            Point::Complex(v) => {
                let parts: Vec<String> = v.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
                write!(f, "({})", parts.join(", "))
            }
            Point::Matrix { n, data } => write!(f, "Mat{n}{data:?}"),
            Point::Perm(p) => write!(f, "σ{p:?}"),
        }
    }
}

/// Reduces an angle to `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
        assert!((wrap_angle(2.0 * PI + 0.25) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn accessors_reject_wrong_kind() {
        let p = Point::Int(3);
        assert!(p.as_real().is_err());
        assert_eq!(p.as_int().unwrap(), 3);
        assert_eq!(Point::real(2.5).x().unwrap(), 2.5);
    }
}
