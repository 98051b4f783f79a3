use std::sync::Arc;

use num_complex::Complex64;

use crate::automorphism::{AutomorphismFamily, LinearMap};
use crate::domain::{Domain, PointKind};
use crate::error::{Error, Result};
use crate::measure::MeasureSpace;
use crate::operator::HausdorffOperator;
use crate::point::Point;

/// `f ↦ f * μ`: `Φ ≡ 1` and `A(u)(x) = x - u` on `R^d` or `Z`.
pub fn convolution_operator(mu: MeasureSpace, domain: Arc<Domain>) -> Result<HausdorffOperator> {
    let family = match domain.point_kind() {
        PointKind::Integer => AutomorphismFamily::translation_integer(),
        PointKind::RealVector(_) => AutomorphismFamily::translation_real(),
        other => return Err(Error::InvalidParameter(format!("no additive group structure on {other:?}"))),
    };
    HausdorffOperator::new("convolution", mu, |_| Complex64::new(1.0, 0.0), family, domain)
}

/// Centered Gaussian probability measure on `R`, trapezoid rule on
/// `[-8σ, 8σ]` with `nodes` nodes.
pub fn gaussian_measure(sigma: f64, nodes: usize) -> Result<MeasureSpace> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let norm = 1.0 / (sigma * std::f64::consts::TAU.sqrt());
    MeasureSpace::trapezoid(-8.0 * sigma, 8.0 * sigma, nodes)?
        .with_density(move |u: &Point| norm * (-0.5 * (u.x().unwrap_or(f64::NAN) / sigma).powi(2)).exp())
}

/// `Σ_k Φ(k) f(A_k x)` on `R^d` for invertible `A_k`, with
/// `m(A_k) = |det A_k|` and `k(k) = ||A_k^-1||_2`.
pub fn discrete_hausdorff_rd(
    matrices: &[Vec<Vec<f64>>],
    weights: &[Complex64],
    domain: Arc<Domain>,
) -> Result<HausdorffOperator> {
    if matrices.is_empty() || matrices.len() != weights.len() {
        return Err(Error::InvalidParameter("need one weight per matrix and at least one matrix".into()));
    }
    if let PointKind::RealVector(d) = domain.point_kind() {
        if matrices.iter().any(|m| m.len() != d) {
            return Err(Error::InvalidParameter(format!("matrices must be {d} x {d}")));
        }
    }
    let family = AutomorphismFamily::linear(matrices)?;
    let omega = MeasureSpace::counting((0..matrices.len() as i64).map(Point::Int).collect())?;
    let w = weights.to_vec();
    HausdorffOperator::new(
        format!("discrete Hausdorff ({} maps)", matrices.len()),
        omega,
        move |u| {
            u.as_int()
                .ok()
                .and_then(|k| w.get(k as usize).copied())
                .unwrap_or(Complex64::new(f64::NAN, 0.0))
        },
        family,
        domain,
    )
}

/// 2-norm condition numbers of the matrices.
pub fn condition_numbers(matrices: &[Vec<Vec<f64>>]) -> Result<Vec<f64>> {
    matrices
        .iter()
        .enumerate()
        .map(|(index, m)| {
            LinearMap::new(m).map(|l| l.condition).map_err(|e| match e {
                Error::SingularMatrix { .. } => Error::SingularMatrix { index },
                other => other,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn dirac_convolution_is_identity() {
        let dom = Arc::new(Domain::real_line(3.0, 10.0).unwrap());
        let mu = MeasureSpace::discrete(vec![Point::real(0.0)], vec![1.0]).unwrap();
        let op = convolution_operator(mu, dom).unwrap();
        let f = |p: &Point| c(p.x().unwrap().cos());
        assert_eq!(op.apply(&f, &Point::real(0.7)).unwrap(), c(0.7f64.cos()));
    }

    #[test]
    fn two_point_average_on_integers() {
        let dom = Arc::new(Domain::integers(-5, 5).unwrap());
        let mu = MeasureSpace::discrete(vec![Point::Int(-1), Point::Int(1)], vec![0.5, 0.5]).unwrap();
        let op = convolution_operator(mu, dom).unwrap();
        let delta = |p: &Point| c(if p.as_int().unwrap() == 0 { 1.0 } else { 0.0 });
        let out: Vec<f64> = (-2..=2).map(|k| op.apply(&delta, &Point::Int(k)).unwrap().re).collect();
        assert_eq!(out, vec![0.0, 0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn gaussian_is_a_probability() {
        let g = gaussian_measure(0.5, 801).unwrap();
        assert!((g.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaled_identity_constants() {
        let dom = Arc::new(Domain::real_box(2, 2.0, 5.0).unwrap());
        let op = discrete_hausdorff_rd(&[vec![vec![2.0, 0.0], vec![0.0, 2.0]]], &[c(1.0)], dom).unwrap();
        let u = Point::Int(0);
        assert!((op.family().modulus(&u).unwrap() - 4.0).abs() < 1e-12);
        assert!((op.family().metric_factor(&u).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rotations_have_unit_constants() {
        let dom = Arc::new(Domain::real_box(2, 2.0, 5.0).unwrap());
        let rot = |t: f64| vec![vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]];
        let op = discrete_hausdorff_rd(&[rot(0.3), rot(2.0)], &[c(0.25), c(-0.5)], dom).unwrap();
        for p in [1.0, 2.0, 4.0, f64::INFINITY] {
            assert!((op.phi_norm_ap(p).unwrap() - 0.75).abs() < 1e-12);
        }
        let cond = condition_numbers(&[rot(0.3)]).unwrap();
        assert!((cond[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_matrix_is_identity_operator() {
        let dom = Arc::new(Domain::real_line(2.0, 10.0).unwrap());
        let op = discrete_hausdorff_rd(&[vec![vec![1.0]]], &[c(1.0)], dom).unwrap();
        let f = |p: &Point| c(p.x().unwrap().powi(3));
        assert!((op.apply(&f, &Point::real(1.3)).unwrap() - c(1.3f64.powi(3))).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let dom = Arc::new(Domain::real_line(2.0, 10.0).unwrap());
        let e = discrete_hausdorff_rd(&[vec![vec![1.0]], vec![vec![0.0]]], &[c(1.0), c(1.0)], dom).unwrap_err();
        assert_eq!(e, Error::SingularMatrix { index: 1 });
    }
}
