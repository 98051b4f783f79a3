//! Operators on the unit disc and on products of upper half-planes. Neither
//! declares a modulus or metric factor in general, so only evaluation is
//! supported unless a caller attaches them.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::automorphism::AutomorphismFamily;
use crate::domain::{Domain, PointKind};
use crate::error::{Error, Result};
use crate::measure::{DecayHypothesis, MeasureSpace, Truncation};
use crate::operator::HausdorffOperator;
use crate::point::Point;

/// Polar midpoint rule for area measure on `{|u| < radius}`.
pub fn disc_quadrature(radial: usize, angular: usize, radius: f64) -> Result<MeasureSpace> {
    if radial == 0 || angular == 0 || !(radius > 0.0 && radius <= 1.0) {
        return Err(Error::InvalidParameter("disc quadrature needs positive counts and 0 < radius <= 1".into()));
    }
    let dr = radius / radial as f64;
    let dt = TAU / angular as f64;
    let mut nodes = Vec::with_capacity(radial * angular);
    let mut weights = Vec::with_capacity(radial * angular);
    for i in 0..radial {
        let r = (i as f64 + 0.5) * dr;
        for j in 0..angular {
            nodes.push(Point::complex(Complex64::from_polar(r, -PI + (j as f64 + 0.5) * dt)));
            weights.push(r * dr * dt);
        }
    }
    MeasureSpace::discrete(nodes, weights)
}

/// `(H f)(z) = ∫_D Φ(u) f((u - z)/(1 - conj(u) z)) dA(u)`. Nodes closer than
/// `margin` to the unit circle are rejected.
pub fn hausdorff_zhu(
    phi: impl Fn(&Point) -> Complex64 + Send + Sync + 'static,
    omega: MeasureSpace,
    margin: f64,
) -> Result<HausdorffOperator> {
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::InvalidParameter(format!("margin must lie in [0, 1), got {margin}")));
    }
    for u in omega.all_nodes() {
        if !u.z().is_ok_and(|z| z.norm() < 1.0 - margin) {
            return Err(Error::BoundaryNode(u.to_string()));
        }
    }
    HausdorffOperator::new(
        "Hausdorff-Zhu",
        omega,
        phi,
        AutomorphismFamily::mobius_involution(),
        Arc::new(Domain::bare(PointKind::UnitDisc)),
    )
}

/// Midpoint rule on `(0, r_max]^n` with a decay hypothesis on the symbol.
pub fn halfplane_omega(n: usize, r_max: f64, nodes_per_axis: usize, decay: DecayHypothesis) -> Result<MeasureSpace> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let axis = MeasureSpace::midpoint(0.0, r_max, nodes_per_axis)?;
    Ok(MeasureSpace::product(&vec![axis; n])?.with_truncation(Truncation {
        radius: Some(r_max),
        tails: n as u32,
        exclusion: None,
        decay: Some(decay),
    }))
}

/// `(H f)(z) = ∫_{(0,∞)^n} Φ(u) f(z_1/u_1, ..., z_n/u_n) du` on `(C^+)^n`.
/// The family carries the modulus `Π u_j^-1` and factor `max u_j` of the
/// boundary action on `R^n`.
pub fn halfplane_hausdorff(
    phi: impl Fn(&Point) -> Complex64 + Send + Sync + 'static,
    omega: MeasureSpace,
) -> Result<HausdorffOperator> {
    let n = match omega.nodes().first().map(|u| u.as_real().map(|v| v.len())) {
        Some(Ok(n)) => n,
        _ => return Err(Error::InvalidParameter("parameter nodes must be real vectors".into())),
    };
    for u in omega.all_nodes() {
        if !u.as_real().is_ok_and(|v| v.iter().all(|&t| t > 0.0)) {
            return Err(Error::InvalidParameter(format!("parameter {u} is not in (0, inf)^{n}")));
        }
    }
    HausdorffOperator::new(
        format!("half-plane Hausdorff (n = {n})"),
        omega,
        phi,
        AutomorphismFamily::coordinate_dilation_complex(),
        Arc::new(Domain::bare(PointKind::HalfPlanePower(n))),
    )
}

/// `Φ(u) = Π u_j e^{-u_j}`: `∫ Φ = 1` and `∫ Φ(u)/u du = 1` per coordinate.
pub fn gamma_symbol(u: &Point) -> Complex64 {
    Complex64::new(u.as_real().map_or(f64::NAN, |v| v.iter().map(|t| t * (-t).exp()).product()), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn involution_anchors() {
        let fam = AutomorphismFamily::mobius_involution();
        let u = Point::complex(Complex64::new(0.3, -0.4));
        assert!((fam.apply(&u, &Point::complex(c(0.0))).z().unwrap() - u.z().unwrap()).norm() < 1e-15);
        assert!(fam.apply(&u, &u).z().unwrap().norm() < 1e-15);
    }

    #[test]
    fn boundary_nodes_are_rejected() {
        let omega = disc_quadrature(10, 16, 1.0).unwrap();
        assert!(matches!(hausdorff_zhu(|_| c(1.0), omega, 0.1), Err(Error::BoundaryNode(_))));
        let inner = disc_quadrature(10, 16, 0.9).unwrap();
        let op = hausdorff_zhu(|_| c(0.0), inner, 0.05).unwrap();
        assert_eq!(op.apply(&|_: &Point| c(7.0), &Point::complex(c(0.2))).unwrap(), c(0.0));
    }

    #[test]
    fn identity_at_unit_dilation() {
        let omega = MeasureSpace::discrete(vec![Point::real(1.0)], vec![1.0]).unwrap();
        let op = halfplane_hausdorff(|_| c(1.0), omega).unwrap();
        let z = Point::complex(Complex64::new(0.4, 1.2));
        let f = |p: &Point| p.z().unwrap().powi(2);
        assert_eq!(op.apply(&f, &z).unwrap(), f(&z));
    }

    #[test]
    fn linear_input_scales_by_inverse_moment() {
        let omega = halfplane_omega(1, 60.0, 6000, DecayHypothesis { constant: 5.0, exponent: 3.0 }).unwrap();
        let op = halfplane_hausdorff(gamma_symbol, omega).unwrap();
        let z = Complex64::new(-0.5, 2.0);
        let v = op.apply(&|p: &Point| p.z().unwrap(), &Point::complex(z)).unwrap();
        assert!((v - z).norm() < 1e-4, "{v}");
        assert_eq!(op.family().modulus(&Point::real(2.0)).unwrap(), 0.5);
    }
}
