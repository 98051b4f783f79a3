use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::automorphism::AutomorphismFamily;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::measure::MeasureSpace;
use crate::operator::HausdorffOperator;
use crate::point::Point;

/// Symbol of the Cauchy transform on `T^n` against angle measure:
/// `(2πi)^-n Π (u_j - 1)^-1` times the line-element factor `Π i u_j`,
/// i.e. `(2π)^-n Π u_j / (u_j - 1)` with `u_j = e^{iθ_j}`.
pub fn cauchy_symbol(theta: &Point) -> Complex64 {
    match theta.as_real() {
        Ok(th) => th
            .iter()
            .map(|&t| {
                let u = Complex64::from_polar(1.0, t);
                u / ((u - 1.0) * TAU)
            })
            .product(),
        Err(_) => Complex64::new(f64::NAN, 0.0),
    }
}

/// `(C f)(z) = (2πi)^-n p.v. ∫_{T^n} f(u_1 z_1, ..., u_n z_n) / Π(u_j - 1) du`,
/// with `nodes` (even) angles per circle placed symmetrically about the pole
/// and summed in mirror pairs.
pub fn cauchy_torus(n: usize, nodes: usize, domain: Arc<Domain>) -> Result<HausdorffOperator> {
    if n == 0 {
        return Err(Error::InvalidParameter("torus dimension must be at least 1".into()));
    }
    let circle = MeasureSpace::principal_value_circle(nodes)?;
    let omega = MeasureSpace::product(&vec![circle; n])?;
    HausdorffOperator::new(
        format!("Cauchy on T^{n} (N = {nodes})"),
        omega,
        cauchy_symbol,
        AutomorphismFamily::torus_rotation(),
        domain,
    )
}

/// `ζ ↦ Π ζ_j^{m_j}`.
pub fn monomial(exponents: Vec<i32>) -> impl Fn(&Point) -> Complex64 + Send + Sync + Clone {
    move |p: &Point| match p.as_complex() {
        Ok(z) => z.iter().zip(&exponents).map(|(zj, &m)| zj.powi(m)).product(),
        Err(_) => Complex64::new(f64::NAN, 0.0),
    }
}
