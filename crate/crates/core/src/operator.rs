//! `(H f)(x) = ∫_Ω Φ(u) f(A(u)(x)) dμ(u)`: evaluation, the `L^p` bound
//! `||Φ||_{A,p}`, randomized contraction checks and regularity.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphism::AutomorphismFamily;
use crate::domain::{spread_about, Domain, FilterBase, GridFunction, PointKind, SpaceFunction};
use crate::error::{Error, Result};
use crate::measure::{IntegrationReport, MeasureKind, MeasureSpace};
use crate::point::Point;

pub type Symbol = Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>;

/// Relative slack of contraction checks on continuum domains.
pub const CONTINUUM_SLACK: f64 = 0.01;
/// Relative slack of contraction checks on purely discrete domains.
pub const DISCRETE_SLACK: f64 = 1e-12;

#[derive(Clone)]
pub struct HausdorffOperator {
    name: String,
    omega: MeasureSpace,
    phi: Symbol,
    family: AutomorphismFamily,
    domain: Arc<Domain>,
}

impl fmt::Debug for HausdorffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HausdorffOperator")
            .field("name", &self.name)
            .field("omega_nodes", &self.omega.node_count())
            .field("family", &self.family.name())
            .field("domain", &self.domain.point_kind())
            .finish()
    }
}

impl HausdorffOperator {
    /// Rejects parameter nodes where the declared modulus or metric factor is
    /// not a positive number, and symbols that are not finite on the nodes.
    pub fn new(
        name: impl Into<String>,
        omega: MeasureSpace,
        phi: impl Fn(&Point) -> Complex64 + Send + Sync + 'static,
        family: AutomorphismFamily,
        domain: Arc<Domain>,
    ) -> Result<Self> {
        let op = HausdorffOperator { name: name.into(), omega, phi: Arc::new(phi), family, domain };
        for (index, u) in op.omega.all_nodes().enumerate() {
            if op.family.has_modulus() {
                op.family.modulus(u)?;
            }
            if op.family.has_metric_factor() {
                op.family.metric_factor(u)?;
            }
            let v = (op.phi)(u);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteSample { index });
            }
        }
        Ok(op)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn omega(&self) -> &MeasureSpace {
        &self.omega
    }

    pub fn family(&self) -> &AutomorphismFamily {
        &self.family
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn phi(&self, u: &Point) -> Complex64 {
        (self.phi)(u)
    }

    /// Whether the parameter integral is a principal value.
    pub fn is_principal_value(&self) -> bool {
        self.omega.kind() == MeasureKind::PrincipalValueContinuum
    }

    /// Same operator with symbol `c Φ`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let phi = self.phi.clone();
        HausdorffOperator { phi: Arc::new(move |u| c * phi(u)), name: format!("{} x {c}", self.name), ..self.clone() }
    }

    /// Same operator acting on another realization of the underlying space.
    pub fn on_domain(&self, domain: Arc<Domain>) -> Self {
        HausdorffOperator { domain, ..self.clone() }
    }

    pub fn apply_report(&self, f: &dyn SpaceFunction, x: &Point) -> Result<IntegrationReport> {
        self.omega.try_integrate(|u| {
            let w = (self.phi)(u);
            // nodes with Φ(u) = 0 never probe f
            if w == Complex64::new(0.0, 0.0) {
                return Ok(w);
            }
            Ok(w * f.eval(&self.family.apply(u, x))?)
        })
    }

    pub fn apply(&self, f: &dyn SpaceFunction, x: &Point) -> Result<Complex64> {
        Ok(self.apply_report(f, x)?.value)
    }

    /// `apply` on the primary parameter layout only, skipping any Richardson
    /// extrapolation.
    pub fn apply_single_layout(&self, f: &dyn SpaceFunction, x: &Point) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (index, (u, w)) in self.omega.nodes().iter().zip(self.omega.weights()).enumerate() {
            let phi = (self.phi)(u);
            if phi == Complex64::new(0.0, 0.0) {
                continue;
            }
            let v = phi * f.eval(&self.family.apply(u, x))?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteSample { index });
            }
            acc += v * w;
        }
        Ok(acc)
    }

    /// `apply` at each point, in order.
    pub fn apply_grid(&self, f: &dyn SpaceFunction, points: &[Point]) -> Result<Vec<Complex64>> {
        points.par_iter().map(|x| self.apply(f, x)).collect()
    }

    /// `H f` sampled at the nodes of the operator's domain.
    pub fn apply_on_domain(&self, f: &dyn SpaceFunction) -> Result<GridFunction> {
        let values = self.apply_grid(f, self.domain.nodes()?)?;
        GridFunction::from_values(self.domain.clone(), values)
    }

    /// `∫_Ω Φ dμ`.
    pub fn symbol_integral(&self) -> Result<Complex64> {
        Ok(self.omega.integrate(|u| (self.phi)(u))?.value)
    }

    /// `∫_Ω g(u) |Φ(u)| dμ(u)`. Absolute integrands do not cancel, so
    /// principal-value layouts are summed without extrapolation; the result is
    /// then the truncated value and grows as the layout is refined.
    pub(crate) fn abs_weighted(&self, g: impl Fn(&Point) -> Result<f64>) -> Result<f64> {
        let integrand = |u: &Point| -> Result<Complex64> {
            let a = (self.phi)(u).norm();
            if a == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(Complex64::new(a * g(u)?, 0.0))
        };
        if self.is_principal_value() {
            let mut total = 0.0;
            for (u, w) in self.omega.nodes().iter().zip(self.omega.weights()) {
                total += integrand(u)?.re * w;
            }
            Ok(total)
        } else {
            Ok(self.omega.try_integrate(integrand)?.value.re)
        }
    }

    /// `∫_Ω |Φ(u)| m(A(u))^{-1/p} dμ(u)`, and `∫ |Φ| dμ` for `p = ∞`.
    pub fn phi_norm_ap(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
        }
        if p.is_infinite() {
            return self.abs_weighted(|_| Ok(1.0));
        }
        self.abs_weighted(|u| Ok(self.family.modulus(u)?.powf(-1.0 / p)))
    }

    pub fn phi_l1(&self) -> Result<f64> {
        self.abs_weighted(|_| Ok(1.0))
    }

    /// `|∫_Ω Φ dμ - 1|`.
    pub fn regularity_defect(&self) -> Result<f64> {
        Ok((self.symbol_integral()? - 1.0).norm())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub operator: String,
    pub p: f64,
    #[serde(rename = "bound")]
    pub bound_value: f64,
    #[serde(rename = "empirical")]
    pub empirical_lower: f64,
    pub trials: usize,
    pub seed: u64,
    /// Trials with a nonzero test function.
    pub witnesses: usize,
    pub slack: f64,
    /// Descriptor of the test function attaining the empirical maximum.
    pub worst: String,
}

/// Slack used for bound checks on this domain.
pub fn default_slack(dom: &Domain) -> f64 {
    if dom.point_kind() == PointKind::Integer {
        DISCRETE_SLACK
    } else {
        CONTINUUM_SLACK
    }
}

/// Random compactly supported test function inside the inner half of the
/// window: random node values on `Z`, smooth random trigonometric polynomials
/// times a bump on `R^d`, and random trigonometric polynomials on `T^n`.
pub fn random_test_function(dom: &Arc<Domain>, rng: &mut impl Rng) -> Result<(GridFunction, String)> {
    let nodes = dom.nodes()?;
    match dom.point_kind() {
        PointKind::Integer => {
            let lo = nodes.first().and_then(|p| p.as_int().ok()).unwrap_or(0);
            let hi = nodes.last().and_then(|p| p.as_int().ok()).unwrap_or(0);
            let quarter = ((hi - lo) / 4).max(0);
            let mid = (lo + hi) / 2;
            let c = rng.gen_range(mid - quarter / 2..=mid + quarter / 2);
            let s = rng.gen_range(0..=(quarter / 2).max(0));
            let vals: Vec<Complex64> =
                (0..=2 * s).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let desc = format!("random values on [{}, {}]", c - s, c + s);
            let start = c - s;
            let f = move |p: &Point| {
                p.as_int()
                    .ok()
                    .and_then(|k| usize::try_from(k - start).ok())
                    .and_then(|i| vals.get(i).copied())
                    .unwrap_or(Complex64::new(0.0, 0.0))
            };
            Ok((GridFunction::from_closed_form(dom.clone(), Arc::new(f))?.zero_extended(), desc))
        }
        PointKind::RealVector(d) => {
            let half = nodes
                .last()
                .and_then(|p| p.as_real().ok().map(|v| v[0]))
                .ok_or_else(|| Error::InvalidParameter("empty window".into()))?;
            let center: Vec<f64> = (0..d).map(|_| rng.gen_range(-half / 4.0..half / 4.0)).collect();
            let radius = rng.gen_range(half / 8.0..half / 4.0);
            let terms = random_terms(rng, d, 4, 2.0 / radius);
            let desc = format!("trig x bump, center {center:?}, radius {radius:.4}, {} terms", terms.len());
            let f = move |p: &Point| {
                let Ok(x) = p.as_real() else { return Complex64::new(f64::NAN, 0.0) };
                let y: Vec<f64> = x.iter().zip(&center).map(|(a, b)| a - b).collect();
                let t2 = y.iter().map(|v| v * v).sum::<f64>() / (radius * radius);
                if t2 >= 1.0 {
                    return Complex64::new(0.0, 0.0);
                }
                bump(t2) * trig_sum(&terms, &y)
            };
            Ok((GridFunction::from_closed_form(dom.clone(), Arc::new(f))?, desc))
        }
        PointKind::TorusAngles(n) => {
            let terms: Vec<(Complex64, Vec<i32>)> = (0..5)
                .map(|_| {
                    let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    (c, (0..n).map(|_| rng.gen_range(-4..=4)).collect())
                })
                .collect();
            let desc = format!("trig polynomial with exponents {:?}", terms.iter().map(|t| &t.1).collect::<Vec<_>>());
            let f = move |p: &Point| {
                let Ok(z) = p.as_complex() else { return Complex64::new(f64::NAN, 0.0) };
                terms
                    .iter()
                    .map(|(c, e)| c * z.iter().zip(e).map(|(zj, &k)| zj.powi(k)).product::<Complex64>())
                    .sum()
            };
            Ok((GridFunction::from_closed_form(dom.clone(), Arc::new(f))?, desc))
        }
        other => Err(Error::InvalidParameter(format!("no random test functions on {other:?}"))),
    }
}

type TrigTerm = (Complex64, Vec<f64>, f64);

fn random_terms(rng: &mut impl Rng, d: usize, count: usize, max_freq: f64) -> Vec<TrigTerm> {
    (0..count)
        .map(|_| {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let w = (0..d).map(|_| rng.gen_range(-max_freq..max_freq)).collect();
            (c, w, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

fn trig_sum(terms: &[TrigTerm], y: &[f64]) -> Complex64 {
    terms
        .iter()
        .map(|(c, w, ph)| c * (w.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() + ph).cos())
        .sum()
}

/// `exp(1 - 1/(1 - t²))` as a function of `t²`.
pub(crate) fn bump(t2: f64) -> f64 {
    if t2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t2)).exp()
    }
}

/// Deterministic per-trial generator: stream `trial` of the seeded ChaCha8.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Largest `||H f||_p / ||f||_p` over `trials` random test functions, against
/// `||Φ||_{A,p}`. A ratio beyond the slack is a [`Error::ViolatedBound`].
pub fn check_lp_contraction(op: &HausdorffOperator, p: f64, trials: usize, seed: u64) -> Result<BoundReport> {
    let dom = op.domain();
    dom.nu()?;
    let bound = op.phi_norm_ap(p)?;
    let slack = default_slack(dom);
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let (f, desc) = random_test_function(dom, &mut rng)?;
            let norm_f = f.lp_norm(p)?;
            if norm_f == 0.0 {
                return Ok(None);
            }
            let hf = dom
                .nodes()?
                .iter()
                .map(|x| op.apply(&f, x))
                .collect::<Result<Vec<_>>>()?;
            let ratio = dom.lp_norm(&hf, p)? / norm_f;
            Ok(Some((ratio, format!("seed {seed} trial {trial}: {desc}"))))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut witnesses = 0;
    let mut worst = (0.0, String::new());
    for (ratio, desc) in outcomes.into_iter().flatten() {
        witnesses += 1;
        if ratio > worst.0 {
            worst = (ratio, desc);
        }
    }
    if worst.0 > bound * (1.0 + slack) {
        return Err(Error::ViolatedBound { ratio: worst.0, bound, descriptor: worst.1 });
    }
    Ok(BoundReport {
        operator: op.name().to_string(),
        p,
        bound_value: bound,
        empirical_lower: worst.0,
        trials,
        seed,
        witnesses,
        slack,
        worst: worst.1,
    })
}

/// Regularity defect of the operator and the spread of `H f` about `l` at
/// level `depth` of the filter base. The symbol must be absolutely integrable.
pub fn check_regularity(
    op: &HausdorffOperator,
    base: &FilterBase,
    f: &dyn SpaceFunction,
    l: Complex64,
    depth: usize,
) -> Result<(f64, f64)> {
    let l1 = op.phi_l1()?;
    if !l1.is_finite() {
        return Err(Error::InvalidParameter("symbol is not absolutely integrable".into()));
    }
    let defect = op.regularity_defect()?;
    let hf = ApplyAt { op, f };
    Ok((defect, spread_about(&hf, base, depth, l)?))
}

/// `H f` as a function of the point.
pub struct ApplyAt<'a> {
    pub op: &'a HausdorffOperator,
    pub f: &'a dyn SpaceFunction,
}

impl SpaceFunction for ApplyAt<'_> {
    fn eval(&self, x: &Point) -> Result<Complex64> {
        self.op.apply(self.f, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::limit_along_filter;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn line() -> Arc<Domain> {
        Arc::new(Domain::real_line(8.0, 20.0).unwrap())
    }

    fn single_translation(shift: f64) -> HausdorffOperator {
        let omega = MeasureSpace::discrete(vec![Point::real(shift)], vec![1.0]).unwrap();
        HausdorffOperator::new("shift", omega, |_| c(1.0), AutomorphismFamily::translation_real(), line()).unwrap()
    }

    fn normalized_translation(total: f64) -> HausdorffOperator {
        let omega = MeasureSpace::trapezoid(-1.0, 1.0, 41).unwrap();
        let raw = |u: &Point| (-u.x().unwrap().powi(2)).exp();
        let mass: f64 = omega.nodes().iter().zip(omega.weights()).map(|(u, w)| raw(u) * w).sum();
        HausdorffOperator::new(
            "translation average",
            omega,
            move |u| c(total * raw(u) / mass),
            AutomorphismFamily::translation_real(),
            line(),
        )
        .unwrap()
    }

    #[test]
    fn constant_is_reproduced_by_normalized_symbol() {
        let op = normalized_translation(1.0);
        let v = op.apply(&|_: &Point| c(3.5), &Point::real(0.7)).unwrap();
        assert!((v - c(3.5)).norm() < 1e-12);
    }

    #[test]
    fn apply_grid_edge_cases() {
        let op = normalized_translation(1.0);
        let f = |p: &Point| c(p.x().unwrap().sin());
        assert!(op.apply_grid(&f, &[]).unwrap().is_empty());
        let x = Point::real(0.3);
        assert_eq!(op.apply_grid(&f, std::slice::from_ref(&x)).unwrap(), vec![op.apply(&f, &x).unwrap()]);
    }

    #[test]
    fn dilation_bound_single_node() {
        let omega = MeasureSpace::discrete(vec![Point::real(2.0)], vec![1.0]).unwrap();
        let op = HausdorffOperator::new("dilation", omega, |_| c(1.0), AutomorphismFamily::dilation_real(1), line()).unwrap();
        assert!((op.phi_norm_ap(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(op.phi_norm_ap(f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn lorentzian_symbol_l1() {
        let omega = MeasureSpace::trapezoid(-2000.0, 2000.0, 400_001).unwrap();
        let op = HausdorffOperator::new(
            "lorentz",
            omega,
            |u| c(1.0 / (1.0 + u.x().unwrap().powi(2))),
            AutomorphismFamily::translation_real(),
            line(),
        )
        .unwrap();
        // tails beyond 2000 contribute 2/2000
        let v = op.phi_norm_ap(f64::INFINITY).unwrap() + 2.0 / 2000.0;
        assert!((v - std::f64::consts::PI).abs() < 1e-4, "{v}");
        let p2 = op.phi_norm_ap(2.0).unwrap() + 2.0 / 2000.0;
        assert!((p2 - std::f64::consts::PI).abs() < 1e-4);
    }

    #[test]
    fn isometry_ratios_are_one() {
        let op = single_translation(0.5);
        let r = check_lp_contraction(&op, 2.0, 12, 7).unwrap();
        assert_eq!(r.bound_value, 1.0);
        assert!((r.empirical_lower - 1.0).abs() < 1e-3, "{}", r.empirical_lower);
    }

    #[test]
    fn contraction_is_homogeneous_in_the_symbol() {
        let op = normalized_translation(1.0);
        let a = check_lp_contraction(&op, 2.0, 8, 3).unwrap();
        let b = check_lp_contraction(&op.scaled(c(3.0)), 2.0, 8, 3).unwrap();
        assert!((b.bound_value - 3.0 * a.bound_value).abs() < 1e-12);
        assert!((b.empirical_lower - 3.0 * a.empirical_lower).abs() < 1e-12);
    }

    #[test]
    fn contraction_is_reproducible() {
        let op = normalized_translation(1.0);
        let a = check_lp_contraction(&op, 4.0, 10, 99).unwrap();
        let b = check_lp_contraction(&op, 4.0, 10, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn violated_bound_is_reported() {
        let op = single_translation(0.0);
        // an understated symbol norm: claim the identity has norm 1/2
        let omega = MeasureSpace::discrete(vec![Point::real(0.0)], vec![1.0]).unwrap();
        let family = AutomorphismFamily::translation_real().with_modulus(|_| 16.0);
        let liar = HausdorffOperator::new("liar", omega, |_| c(1.0), family, op.domain().clone()).unwrap();
        let e = check_lp_contraction(&liar, 4.0, 4, 1).unwrap_err();
        assert!(matches!(e, Error::ViolatedBound { .. }));
    }

    #[test]
    fn defect_values() {
        assert!(normalized_translation(1.0).regularity_defect().unwrap() < 1e-14);
        let zero = normalized_translation(0.0);
        assert_eq!(zero.regularity_defect().unwrap(), 1.0);
        assert!((normalized_translation(2.0).regularity_defect().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn regularity_along_complements() {
        let l = c(0.75);
        let f = move |p: &Point| l + (-p.x().unwrap().powi(2)).exp();
        let base = FilterBase::beyond_radius_real();
        let (defect, spread) = check_regularity(&normalized_translation(1.0), &base, &f, l, 8).unwrap();
        assert!(defect < 1e-14 && spread < 1e-6, "{defect} {spread}");
        let (defect, spread) = check_regularity(&normalized_translation(2.0), &base, &f, l, 8).unwrap();
        assert!((defect - 1.0).abs() < 1e-14 && (spread - 0.75).abs() < 1e-6, "{spread}");
    }

    #[test]
    fn necessity_witness() {
        let op = normalized_translation(2.0);
        let base = FilterBase::beyond_radius_real();
        let one = |_: &Point| c(1.0);
        let est = limit_along_filter(&ApplyAt { op: &op, f: &one }, &base, 3).unwrap();
        assert!((est.estimate - c(2.0)).norm() < 1e-12 && est.spread < 1e-12);
    }

    #[test]
    fn grid_function_outside_window() {
        let op = single_translation(20.0);
        let f = GridFunction::sample(op.domain().clone(), &|_: &Point| c(1.0)).unwrap();
        assert!(matches!(op.apply(&f, &Point::real(0.0)), Err(Error::InterpolationOutOfRange(_))));
    }
}
