use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::automorphism::AutomorphismFamily;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::measure::MeasureSpace;
use crate::operator::HausdorffOperator;
use crate::point::Point;

/// `Φ(u) = 2/(πu)` on odd `u`, zero on even `u`.
pub fn discrete_hilbert_symbol(u: &Point) -> Complex64 {
    match u.as_int() {
        Ok(k) if k % 2 != 0 => Complex64::new(2.0 / (PI * k as f64), 0.0),
        Ok(_) => Complex64::new(0.0, 0.0),
        Err(_) => Complex64::new(f64::NAN, 0.0),
    }
}

/// `(H f)(k) = Σ_{|u| <= K} Φ(u) f(k - u) p_u` on the integers, acting on the
/// window `[-window, window]`.
pub fn discrete_hilbert(p: impl Fn(i64) -> f64, budget: i64, window: i64) -> Result<HausdorffOperator> {
    if budget < 1 {
        return Err(Error::InvalidParameter(format!("budget K must be at least 1, got {budget}")));
    }
    HausdorffOperator::new(
        format!("discrete Hilbert (K = {budget})"),
        MeasureSpace::lattice(budget, p)?,
        discrete_hilbert_symbol,
        AutomorphismFamily::translation_integer(),
        Arc::new(Domain::integers(-window, window)?),
    )
}

fn hilbert_omega(r: f64, n: usize) -> Result<MeasureSpace> {
    if n < 2 || n % 2 != 0 || !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("need R > 0 and an even node count, got R = {r}, N = {n}")));
    }
    MeasureSpace::principal_value(0.0, r, n / 2, 2.0 * r / n as f64, true)
}

pub fn cauchy_kernel(u: &Point) -> Complex64 {
    Complex64::new(u.x().map_or(f64::NAN, |t| 1.0 / (PI * t)), 0.0)
}

/// `(H f)(x) = (1/π) p.v. ∫_{-R}^{R} f(x - u) / u du` with `N` nodes, the
/// singular window `2R/N` and one Richardson step.
pub fn hilbert_transform(r: f64, n: usize, domain: Arc<Domain>) -> Result<HausdorffOperator> {
    HausdorffOperator::new(
        format!("Hilbert (R = {r}, N = {n})"),
        hilbert_omega(r, n)?,
        cauchy_kernel,
        AutomorphismFamily::translation_real(),
        domain,
    )
}

/// `γ(u) = (c_1 u^{p_1}, ..., c_d u^{p_d})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialCurve {
    pub powers: Vec<i32>,
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
}

impl MonomialCurve {
    pub fn new(powers: Vec<i32>) -> Self {
        MonomialCurve { powers, coefficients: None }
    }

    pub fn dim(&self) -> usize {
        self.powers.len()
    }

    fn coefficient(&self, j: usize) -> f64 {
        self.coefficients.as_ref().map_or(1.0, |c| c[j])
    }

    pub fn eval(&self, u: f64) -> Vec<f64> {
        self.powers.iter().enumerate().map(|(j, &p)| self.coefficient(j) * u.powi(p)).collect()
    }

    /// `γ(0) = 0` needs every term with a nonzero coefficient to have a positive power.
    pub fn validate(&self) -> Result<()> {
        if self.powers.is_empty() {
            return Err(Error::InvalidParameter("curve needs at least one coordinate".into()));
        }
        if let Some(c) = &self.coefficients {
            if c.len() != self.powers.len() {
                return Err(Error::InvalidParameter("one coefficient per power".into()));
            }
        }
        if self.powers.iter().enumerate().any(|(j, &p)| p <= 0 && self.coefficient(j) != 0.0) {
            return Err(Error::CurveOriginViolation);
        }
        Ok(())
    }
}

/// Translations `x ↦ x - γ(u)` of `R^d`.
pub fn curve_translation(curve: MonomialCurve) -> Result<AutomorphismFamily> {
    curve.validate()?;
    let fwd = curve.clone();
    let back = curve;
    let shift = move |c: &MonomialCurve, u: &Point, x: &Point, sign: f64| -> Point {
        match (u.x(), x.as_real()) {
            (Ok(t), Ok(v)) if v.len() == c.dim() => {
                Point::Real(v.iter().zip(c.eval(t)).map(|(a, g)| a + sign * g).collect())
            }
            _ => Point::Real(std::iter::repeat(f64::NAN).take(c.dim()).collect()),
        }
    };
    Ok(AutomorphismFamily::new(
        "curve translation",
        move |u, x| shift(&fwd, u, x, -1.0),
        move |u, x| shift(&back, u, x, 1.0),
    )
    .with_modulus(|_| 1.0)
    .with_metric_factor(|_| 1.0))
}

/// `(H f)(x) = p.v. ∫ Φ(u) f(x - γ(u)) du` over `[-R, R]`, with the same
/// parameter layout as [`hilbert_transform`].
pub fn hilbert_along_curve(
    curve: MonomialCurve,
    phi: impl Fn(&Point) -> Complex64 + Send + Sync + 'static,
    r: f64,
    n: usize,
    domain: Arc<Domain>,
) -> Result<HausdorffOperator> {
    let name = format!("Hilbert along u^{:?}", curve.powers);
    let family = curve_translation(curve)?;
    HausdorffOperator::new(name, hilbert_omega(r, n)?, phi, family, domain)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn delta0(p: &Point) -> Complex64 {
        c(if p.as_int().unwrap() == 0 { 1.0 } else { 0.0 })
    }

    #[test]
    fn discrete_hilbert_of_delta() {
        let op = discrete_hilbert(|_| 1.0, 20, 40).unwrap();
        for k in -9..=9i64 {
            let v = op.apply(&delta0, &Point::Int(k)).unwrap();
            let expect = if k % 2 != 0 { 2.0 / (PI * k as f64) } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-15, "{k}");
        }
        assert!((op.apply(&delta0, &Point::Int(3)).unwrap().re - 0.2122).abs() < 1e-4);
    }

    #[test]
    fn even_outputs_read_odd_inputs() {
        let op = discrete_hilbert(|_| 1.0, 20, 40).unwrap();
        // f supported on even integers only
        let f = |p: &Point| c(if p.as_int().unwrap() % 2 == 0 { 1.0 } else { 0.0 });
        for k in [-4i64, 0, 2, 6] {
            assert_eq!(op.apply(&f, &Point::Int(k)).unwrap(), c(0.0));
        }
    }

    #[test]
    fn zero_input() {
        let op = hilbert_transform(10.0, 1000, Arc::new(Domain::real_line(2.0, 10.0).unwrap())).unwrap();
        assert_eq!(op.apply(&|_: &Point| c(0.0), &Point::real(0.3)).unwrap(), c(0.0));
    }

    #[test]
    fn curve_origin() {
        assert_eq!(curve_translation(MonomialCurve::new(vec![1, 0])).unwrap_err(), Error::CurveOriginViolation);
        let ok = MonomialCurve { powers: vec![1, 0], coefficients: Some(vec![1.0, 0.0]) };
        assert!(curve_translation(ok).is_ok());
    }

    #[test]
    fn odd_symbol_kills_constants() {
        let dom = Arc::new(Domain::real_box(2, 2.0, 5.0).unwrap());
        let op = hilbert_along_curve(MonomialCurve::new(vec![1, 2]), cauchy_kernel, 20.0, 400, dom).unwrap();
        let v = op.apply(&|_: &Point| c(2.5), &Point::real_vec(&[0.1, 0.2])).unwrap();
        assert!(v.norm() < 1e-14, "{v}");
    }
}
