//! Families `u ↦ A(u)` of automorphisms of the underlying space, with their
//! declared measure modulus `m(A(u))` and metric factor `k(u)`, and the
//! empirical checkers for both agreement notions.
//!
//! The declared quantities are analytic facts of each family. The checkers
//! recompute them by node enumeration on a domain window:
//!
//! * measure agreement: `nu(A(u)^-1 E) = m(A(u))^-1 nu(E)`,
//! * metric agreement: `A(u)^-1 B(x, r) ⊆ B(x', k(u) r)` for some `x'`,
//! * the change-of-variables identity
//!   `∫ |f(A(u)x)|^p dnu(x) = m(A(u))^-1 ∫ |f|^p dnu`.
//!
//! Every shipped family is a closed-form continuous expression in `(u, x)`,
//! which is what makes `u ↦ A(u)(x)` measurable; nothing is checked at run
//! time for that.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Ball, Domain, SpaceFunction};
use crate::error::{Error, Result};
use crate::point::{wrap_angle, Point};

pub type PointMap = Arc<dyn Fn(&Point, &Point) -> Point + Send + Sync>;
pub type ParamScalar = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct AutomorphismFamily {
    name: String,
    apply: PointMap,
    apply_inverse: PointMap,
    modulus: Option<ParamScalar>,
    metric_factor: Option<ParamScalar>,
}

impl fmt::Debug for AutomorphismFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AutomorphismFamily")
            .field("name", &self.name)
            .field("modulus", &self.modulus.is_some())
            .field("metric_factor", &self.metric_factor.is_some())
            .finish()
    }
}

impl AutomorphismFamily {
    pub fn new(
        name: impl Into<String>,
        apply: impl Fn(&Point, &Point) -> Point + Send + Sync + 'static,
        apply_inverse: impl Fn(&Point, &Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        AutomorphismFamily {
            name: name.into(),
            apply: Arc::new(apply),
            apply_inverse: Arc::new(apply_inverse),
            modulus: None,
            metric_factor: None,
        }
    }

    pub fn with_modulus(mut self, m: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.modulus = Some(Arc::new(m));
        self
    }

    pub fn with_metric_factor(mut self, k: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.metric_factor = Some(Arc::new(k));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, u: &Point, x: &Point) -> Point {
        (self.apply)(u, x)
    }

    pub fn apply_inverse(&self, u: &Point, x: &Point) -> Point {
        (self.apply_inverse)(u, x)
    }

    pub fn has_modulus(&self) -> bool {
        self.modulus.is_some()
    }

    pub fn has_metric_factor(&self) -> bool {
        self.metric_factor.is_some()
    }

    /// Declared `m(A(u))`.
    pub fn modulus(&self, u: &Point) -> Result<f64> {
        let m = self.modulus.as_ref().ok_or(Error::MissingModulus)?(u);
        positive(m, "modulus")
    }

    /// Declared `k(u)`.
    pub fn metric_factor(&self, u: &Point) -> Result<f64> {
        let k = self.metric_factor.as_ref().ok_or(Error::MissingMetricFactor)?(u);
        positive(k, "metric factor")
    }

    /// `x ↦ x - u` on `R^d`.
    pub fn translation_real() -> Self {
        Self::new(
            "translation",
            |u, x| sub_real(x, u),
            |u, x| add_real(x, u),
        )
        .with_modulus(|_| 1.0)
        .with_metric_factor(|_| 1.0)
    }

    /// `k ↦ k - u` on the integers.
    pub fn translation_integer() -> Self {
        Self::new(
            "integer translation",
            |u, x| Point::Int(x.as_int().unwrap_or(0) - u.as_int().unwrap_or(0)),
            |u, x| Point::Int(x.as_int().unwrap_or(0) + u.as_int().unwrap_or(0)),
        )
        .with_modulus(|_| 1.0)
        .with_metric_factor(|_| 1.0)
    }

    /// `x ↦ x / u` on `R^d` for scalar `u > 0`: `m = u^-d`, `k = u`.
    pub fn dilation_real(d: usize) -> Self {
        let d = d as i32;
        Self::new(
            "dilation",
            |u, x| scale_real(x, 1.0 / u.x().unwrap_or(f64::NAN)),
            |u, x| scale_real(x, u.x().unwrap_or(f64::NAN)),
        )
        .with_modulus(move |u| u.x().unwrap_or(f64::NAN).powi(-d))
        .with_metric_factor(|u| u.x().unwrap_or(f64::NAN))
    }

    /// Coordinate dilations `x_j ↦ x_j / u_j` on `R^n`: `m = Π u_j^-1`, `k = max u_j`.
    pub fn coordinate_dilation_real() -> Self {
        Self::new(
            "coordinate dilation",
            |u, x| zip_real(x, u, |a, b| a / b),
            |u, x| zip_real(x, u, |a, b| a * b),
        )
        .with_modulus(|u| u.as_real().map(|v| v.iter().map(|x| 1.0 / x).product()).unwrap_or(f64::NAN))
        .with_metric_factor(|u| u.as_real().map(|v| v.iter().copied().fold(0.0, f64::max)).unwrap_or(f64::NAN))
    }

    /// Coordinate dilations of `(C^+)^n`, `z_j ↦ z_j / u_j`. The modulus and
    /// metric factor are those of the boundary action on `R^n`.
    pub fn coordinate_dilation_complex() -> Self {
        Self::new(
            "half-plane dilation",
            |u, z| zip_complex_real(z, u, |a, b| a / b),
            |u, z| zip_complex_real(z, u, |a, b| a * b),
        )
        .with_modulus(|u| u.as_real().map(|v| v.iter().map(|x| 1.0 / x).product()).unwrap_or(f64::NAN))
        .with_metric_factor(|u| u.as_real().map(|v| v.iter().copied().fold(0.0, f64::max)).unwrap_or(f64::NAN))
    }

    /// Rotations `z_j ↦ e^{i θ_j} z_j` of `T^n`; the parameter is the angle vector.
    pub fn torus_rotation() -> Self {
        Self::new(
            "torus rotation",
            |u, z| rotate(z, u, 1.0),
            |u, z| rotate(z, u, -1.0),
        )
        .with_modulus(|_| 1.0)
        .with_metric_factor(|_| 1.0)
    }

    /// `x ↦ A_k x` on `R^d` for an indexed list of invertible matrices.
    /// `m(A_k) = |det A_k|`, `k(k) = ||A_k^-1||_2`.
    pub fn linear(matrices: &[Vec<Vec<f64>>]) -> Result<Self> {
        let mut fwd = Vec::with_capacity(matrices.len());
        let mut inv = Vec::with_capacity(matrices.len());
        let mut moduli = Vec::with_capacity(matrices.len());
        let mut factors = Vec::with_capacity(matrices.len());
        for (index, rows) in matrices.iter().enumerate() {
            let info = LinearMap::new(rows).map_err(|e| match e {
                Error::SingularMatrix { .. } => Error::SingularMatrix { index },
                other => other,
            })?;
            moduli.push(info.det.abs());
            factors.push(info.inverse_norm);
            fwd.push(info.forward);
            inv.push(info.inverse);
        }
        let fwd = Arc::new(fwd);
        let inv = Arc::new(inv);
        let lookup = |u: &Point| u.as_int().ok().map(|k| k as usize);
        Ok(Self::new(
            "linear",
            move |u, x| lookup(u).and_then(|k| fwd.get(k)).map_or(nan_like(x), |a| mat_vec(a, x)),
            move |u, x| lookup(u).and_then(|k| inv.get(k)).map_or(nan_like(x), |a| mat_vec(a, x)),
        )
        .with_modulus(move |u| lookup(u).and_then(|k| moduli.get(k).copied()).unwrap_or(f64::NAN))
        .with_metric_factor(move |u| lookup(u).and_then(|k| factors.get(k).copied()).unwrap_or(f64::NAN)))
    }

    /// Column permutation `M = (m_1..m_n) ↦ (m_σ(1)..m_σ(n))` of square matrices.
    pub fn column_permutation() -> Self {
        Self::new(
            "column permutation",
            |s, m| permute_columns(m, s, false),
            |s, m| permute_columns(m, s, true),
        )
    }

    /// Involutive Möbius maps `z ↦ (u - z) / (1 - conj(u) z)` of the unit disc.
    pub fn mobius_involution() -> Self {
        let f = |u: &Point, z: &Point| match (u.z(), z.z()) {
            (Ok(u), Ok(z)) => Point::complex((u - z) / (1.0 - u.conj() * z)),
            _ => nan_like(z),
        };
        Self::new("Möbius involution", f, f)
    }
}

fn positive(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive and finite, got {v}")))
    }
}

fn nan_like(x: &Point) -> Point {
    match x {
        Point::Real(v) => Point::Real(v.iter().map(|_| f64::NAN).collect()),
        Point::Complex(v) => Point::Complex(v.iter().map(|_| Complex64::new(f64::NAN, f64::NAN)).collect()),
        other => other.clone(),
    }
}

fn zip_real(x: &Point, u: &Point, op: impl Fn(f64, f64) -> f64) -> Point {
    match (x.as_real(), u.as_real()) {
        (Ok(a), Ok(b)) if b.len() == a.len() => Point::Real(a.iter().zip(b).map(|(p, q)| op(*p, *q)).collect()),
        // scalar parameter broadcast over all coordinates
        (Ok(a), Ok(b)) if b.len() == 1 => Point::Real(a.iter().map(|p| op(*p, b[0])).collect()),
        _ => nan_like(x),
    }
}

fn sub_real(x: &Point, u: &Point) -> Point {
    zip_real(x, u, |a, b| a - b)
}

fn add_real(x: &Point, u: &Point) -> Point {
    zip_real(x, u, |a, b| a + b)
}

fn scale_real(x: &Point, c: f64) -> Point {
    match x.as_real() {
        Ok(a) => Point::Real(a.iter().map(|p| p * c).collect()),
        Err(_) => nan_like(x),
    }
}

fn zip_complex_real(z: &Point, u: &Point, op: impl Fn(Complex64, f64) -> Complex64) -> Point {
    match (z.as_complex(), u.as_real()) {
        (Ok(a), Ok(b)) if b.len() == a.len() => Point::Complex(a.iter().zip(b).map(|(p, q)| op(*p, *q)).collect()),
        (Ok(a), Ok(b)) if b.len() == 1 => Point::Complex(a.iter().map(|p| op(*p, b[0])).collect()),
        _ => nan_like(z),
    }
}

fn rotate(z: &Point, theta: &Point, sign: f64) -> Point {
    zip_complex_real(z, theta, |a, t| a * Complex64::from_polar(1.0, sign * t))
}

fn permute_columns(m: &Point, sigma: &Point, inverse: bool) -> Point {
    let (Ok((n, data)), Ok(s)) = (m.as_matrix(), sigma.as_perm()) else {
        return m.clone();
    };
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            if inverse {
                out[i * n + s[j]] = data[i * n + j];
            } else {
                out[i * n + j] = data[i * n + s[j]];
            }
        }
    }
    Point::Matrix { n, data: out }
}

/// An invertible linear map of `R^d` with its determinant and inverse norm.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub forward: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub det: f64,
    /// Spectral norm of the inverse.
    pub inverse_norm: f64,
    /// 2-norm condition number.
    pub condition: f64,
}

impl LinearMap {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidParameter("matrix must be square and non-empty".into()));
        }
        let forward = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        let det = forward.determinant();
        let inverse = forward
            .clone()
            .try_inverse()
            .filter(|_| det.abs() > 1e-14 * forward.norm().powi(d as i32))
            .ok_or(Error::SingularMatrix { index: 0 })?;
        let sv = forward.singular_values();
        let smax = sv.max();
        let smin = sv.min();
        Ok(LinearMap { forward, inverse, det, inverse_norm: 1.0 / smin, condition: smax / smin })
    }
}

fn mat_vec(a: &DMatrix<f64>, x: &Point) -> Point {
    match x.as_real() {
        Ok(v) if v.len() == a.ncols() => {
            Point::Real((0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect())
        }
        _ => nan_like(x),
    }
}

/// Gap between two points of the same kind (Euclidean for vectors, max
/// modulus for complex vectors, entrywise max for matrices).
pub fn point_gap(a: &Point, b: &Point) -> f64 {
    match (a, b) {
        (Point::Int(x), Point::Int(y)) => (x - y).unsigned_abs() as f64,
        (Point::Real(x), Point::Real(y)) if x.len() == y.len() => {
            x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt()
        }
        (Point::Complex(x), Point::Complex(y)) if x.len() == y.len() => {
            x.iter().zip(y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
        }
        (Point::Matrix { data: x, .. }, Point::Matrix { data: y, .. }) if x.len() == y.len() => {
            x.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
        }
        (Point::Perm(x), Point::Perm(y)) => f64::from(u8::from(x != y)),
        _ => f64::INFINITY,
    }
}

/// Largest `gap(A(u)^-1 A(u) x, x)` over the domain nodes (bijectivity surrogate).
pub fn roundtrip_error(fam: &AutomorphismFamily, dom: &Domain, u: &Point) -> Result<f64> {
    Ok(dom
        .nodes()?
        .par_iter()
        .map(|x| point_gap(&fam.apply_inverse(u, &fam.apply(u, x)), x))
        .reduce(|| 0.0, f64::max))
}

/// Worst relative discrepancy between `nu(A(u)^-1 E)`, computed by membership
/// counting, and the declared `m(A(u))^-1 nu(E)`, over the test balls.
pub fn check_measure_agreement(
    fam: &AutomorphismFamily,
    dom: &Domain,
    u: &Point,
    test_sets: &[Ball],
) -> Result<f64> {
    let m = fam.modulus(u)?;
    let rho = dom.rho()?;
    let nu = dom.nu()?;
    let nodes = nu.nodes();
    let weights = nu.weights();
    let mut worst: f64 = 0.0;
    for e in test_sets {
        if !dom.contains_ball(e) {
            return Err(Error::WindowEscape(format!("test set B({}, {}) leaves the window", e.center, e.radius)));
        }
        let (pre, escaped) = (0..nodes.len())
            .into_par_iter()
            .with_min_len(2048)
            .map(|i| {
                if rho.distance(&e.center, &fam.apply(u, &nodes[i])) < e.radius {
                    (weights[i], dom.is_boundary_node(i))
                } else {
                    (0.0, false)
                }
            })
            .reduce(|| (0.0, false), |a, b| (a.0 + b.0, a.1 || b.1));
        if escaped {
            return Err(Error::WindowEscape(format!(
                "preimage of B({}, {}) under A({u}) reaches the window edge",
                e.center, e.radius
            )));
        }
        let expected = dom.ball_measure(e)? / m;
        if expected <= 0.0 {
            return Err(Error::EmptyBall { center: e.center.to_string(), radius: e.radius });
        }
        worst = worst.max((pre - expected).abs() / expected);
    }
    Ok(worst)
}

/// Constructive witness for the metric agreement of one ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageCover {
    /// Approximate Chebyshev center `x'` of the sampled preimage.
    pub center: Point,
    /// `max_{p in P} rho(x', p) / r`.
    pub required_k: f64,
    pub preimage_nodes: usize,
}

/// Covers the sampled preimage `P = {node : A(u)(node) ∈ B(x, r)}` by a ball
/// about an approximate Chebyshev center. Candidates are `A(u)^-1(x)`, the
/// mean of `P` where that makes sense, and a strided subsample of `P`.
pub fn preimage_cover(fam: &AutomorphismFamily, dom: &Domain, u: &Point, ball: &Ball) -> Result<PreimageCover> {
    let rho = dom.rho()?;
    let nodes = dom.nodes()?;
    let preimage: Vec<&Point> = nodes
        .par_iter()
        .with_min_len(2048)
        .filter(|x| rho.distance(&ball.center, &fam.apply(u, x)) < ball.radius)
        .collect();
    if preimage.is_empty() {
        return Err(Error::EmptyPreimage { center: ball.center.to_string(), radius: ball.radius });
    }
    let mut candidates = vec![fam.apply_inverse(u, &ball.center)];
    if let Some(c) = mean_point(&preimage) {
        candidates.push(c);
    }
    let stride = (preimage.len() / 48).max(1);
    candidates.extend(preimage.iter().step_by(stride).map(|p| (*p).clone()));
    let radius_of = |c: &Point| {
        preimage
            .par_iter()
            .with_min_len(1024)
            .map(|p| rho.distance(c, p))
            .reduce(|| 0.0, f64::max)
    };
    let (center, reach) = candidates
        .into_iter()
        .filter(|c| c.is_finite())
        .map(|c| {
            let r = radius_of(&c);
            (c, r)
        })
        .filter(|(_, r)| r.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::InvalidParameter("no finite center candidate".into()))?;
    Ok(PreimageCover { center, required_k: reach / ball.radius, preimage_nodes: preimage.len() })
}

fn mean_point(pts: &[&Point]) -> Option<Point> {
    match pts.first()? {
        Point::Real(first) => {
            let mut acc = vec![0.0; first.len()];
            for p in pts {
                for (a, v) in acc.iter_mut().zip(p.as_real().ok()?) {
                    *a += v;
                }
            }
            Some(Point::real_vec(&acc.iter().map(|a| a / pts.len() as f64).collect::<Vec<_>>()))
        }
        Point::Complex(first) => {
            let mut acc = vec![Complex64::new(0.0, 0.0); first.len()];
            for p in pts {
                for (a, v) in acc.iter_mut().zip(p.as_complex().ok()?) {
                    *a += v;
                }
            }
            // projected back to the unit circle on each coordinate
            let coords: Vec<Complex64> = acc
                .iter()
                .map(|a| if a.norm() > 0.0 { a / a.norm() } else { Complex64::new(1.0, 0.0) })
                .collect();
            Some(Point::complex_vec(&coords))
        }
        _ => None,
    }
}

/// Worst required radius factor over the test balls. The family agrees with
/// the quasi-metric on these balls when this does not exceed the declared `k(u)`.
pub fn check_metric_agreement(fam: &AutomorphismFamily, dom: &Domain, u: &Point, test_balls: &[Ball]) -> Result<f64> {
    dom.rho()?;
    let mut worst: f64 = 0.0;
    for b in test_balls {
        worst = worst.max(preimage_cover(fam, dom, u, b)?.required_k);
    }
    Ok(worst)
}

/// Both sides of `∫ |f(A(u)x)|^p dnu(x) = m(A(u))^-1 ∫ |f|^p dnu`.
pub fn pushforward_norm_identity(
    fam: &AutomorphismFamily,
    dom: &Domain,
    u: &Point,
    f: &dyn SpaceFunction,
    p: f64,
) -> Result<(f64, f64)> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must lie in [1, inf), got {p}")));
    }
    let m = fam.modulus(u)?;
    let nu = dom.nu()?;
    let nodes = nu.nodes();
    let weights = nu.weights();
    let pairs = (0..nodes.len())
        .into_par_iter()
        .with_min_len(1024)
        .map(|i| {
            let direct = f.eval(&nodes[i])?.norm().powf(p);
            let pulled = f.eval(&fam.apply(u, &nodes[i]))?.norm().powf(p);
            Ok((direct, pulled))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let peak = pairs.iter().map(|(a, b)| a.max(*b)).fold(0.0, f64::max);
    let leak = (0..nodes.len())
        .filter(|&i| dom.is_boundary_node(i))
        .map(|i| pairs[i].0.max(pairs[i].1))
        .fold(0.0, f64::max);
    if leak > 1e-12 * peak {
        return Err(Error::WindowEscape(format!(
            "f or f∘A({u}) does not vanish on the window edge (relative size {:e})",
            leak / peak
        )));
    }
    let lhs: f64 = pairs.iter().zip(weights).map(|((_, b), w)| b * w).sum();
    let direct: f64 = pairs.iter().zip(weights).map(|((a, _), w)| a * w).sum();
    Ok((lhs, direct / m))
}

/// Wrapped angle difference, exposed for torus families.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(x: f64, r: f64) -> Ball {
        Ball::new(Point::real(x), r).unwrap()
    }

    #[test]
    fn translation_preserves_measure() {
        let dom = Domain::real_line(10.0, 200.0).unwrap();
        let fam = AutomorphismFamily::translation_real();
        let err = check_measure_agreement(&fam, &dom, &Point::real(1.25), &[ball(0.0, 1.0), ball(2.0, 0.5)]).unwrap();
        assert!(err <= 2.0 * dom.resolution() / 1.0, "{err}");
    }

    #[test]
    fn dilation_measure_agreement() {
        let dom = Domain::real_line(10.0, 200.0).unwrap();
        let fam = AutomorphismFamily::dilation_real(1);
        assert_eq!(fam.modulus(&Point::real(2.0)).unwrap(), 0.5);
        let err = check_measure_agreement(&fam, &dom, &Point::real(2.0), &[ball(1.0, 1.0)]).unwrap();
        assert!(err <= 2.0 * dom.resolution() / 2.0, "{err}");
    }

    #[test]
    fn integer_translation_is_exact() {
        let dom = Domain::integers(-50, 50).unwrap();
        let fam = AutomorphismFamily::translation_integer();
        let b = Ball::new(Point::Int(3), 4.5).unwrap();
        assert_eq!(check_measure_agreement(&fam, &dom, &Point::Int(7), &[b]).unwrap(), 0.0);
    }

    #[test]
    fn escaping_preimage_is_reported() {
        let dom = Domain::real_line(2.0, 50.0).unwrap();
        let fam = AutomorphismFamily::dilation_real(1);
        let e = check_measure_agreement(&fam, &dom, &Point::real(4.0), &[ball(0.0, 1.0)]);
        assert!(matches!(e, Err(Error::WindowEscape(_))));
    }

    #[test]
    fn metric_factor_of_translation_and_dilation() {
        let dom = Domain::real_line(10.0, 200.0).unwrap();
        let t = check_metric_agreement(&AutomorphismFamily::translation_real(), &dom, &Point::real(0.3), &[ball(0.5, 1.0)]).unwrap();
        assert!(t <= 1.0 && t > 0.99, "{t}");
        let d = check_metric_agreement(&AutomorphismFamily::dilation_real(1), &dom, &Point::real(2.0), &[ball(0.5, 1.0)]).unwrap();
        assert!((d - 2.0).abs() < 0.01, "{d}");
    }

    #[test]
    fn empty_preimage() {
        let dom = Domain::integers(-5, 5).unwrap();
        let fam = AutomorphismFamily::translation_integer();
        let b = Ball::new(Point::Int(100), 1.0).unwrap();
        assert!(matches!(check_metric_agreement(&fam, &dom, &Point::Int(0), &[b]), Err(Error::EmptyPreimage { .. })));
    }

    #[test]
    fn indicator_pushforward() {
        let dom = Domain::real_line(5.0, 1000.0).unwrap();
        let ind = |p: &Point| {
            let x = p.x().unwrap();
            Complex64::new(if (0.0..=1.0).contains(&x) { 1.0 } else { 0.0 }, 0.0)
        };
        let (l, r) = pushforward_norm_identity(&AutomorphismFamily::translation_real(), &dom, &Point::real(1.0), &ind, 1.0).unwrap();
        assert!((l - 1.0).abs() < 2e-3 && (r - 1.0).abs() < 2e-3, "{l} {r}");
        let (l, r) = pushforward_norm_identity(&AutomorphismFamily::dilation_real(1), &dom, &Point::real(2.0), &ind, 1.0).unwrap();
        assert!((l - 2.0).abs() < 3e-3 && (r - 2.0).abs() < 3e-3, "{l} {r}");
    }

    #[test]
    fn linear_map_constants() {
        let fam = AutomorphismFamily::linear(&[vec![vec![2.0, 0.0], vec![0.0, 2.0]]]).unwrap();
        let u = Point::Int(0);
        assert!((fam.modulus(&u).unwrap() - 4.0).abs() < 1e-12);
        assert!((fam.metric_factor(&u).unwrap() - 0.5).abs() < 1e-12);
        let e = AutomorphismFamily::linear(&[vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![vec![1.0, 2.0], vec![2.0, 4.0]]]);
        assert_eq!(e.unwrap_err(), Error::SingularMatrix { index: 1 });
    }

    #[test]
    fn column_permutation_roundtrip() {
        let fam = AutomorphismFamily::column_permutation();
        let m = Point::Matrix { n: 3, data: (0..9).map(f64::from).collect() };
        let s = Point::Perm(vec![2, 0, 1]);
        let pm = fam.apply(&s, &m);
        assert_eq!(pm.as_matrix().unwrap().1[..3], [2.0, 0.0, 1.0]);
        assert_eq!(fam.apply_inverse(&s, &pm), m);
    }

    #[test]
    fn missing_declarations() {
        let fam = AutomorphismFamily::mobius_involution();
        let u = Point::complex(Complex64::new(0.1, 0.2));
        assert_eq!(fam.modulus(&u).unwrap_err(), Error::MissingModulus);
        assert_eq!(fam.metric_factor(&u).unwrap_err(), Error::MissingMetricFactor);
    }
}
