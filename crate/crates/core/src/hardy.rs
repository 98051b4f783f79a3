//! `(1, q)`-atoms on spaces of homogeneous type, finite atomic decompositions,
//! the constant `N(Φ, A, q)` and the transformation
//! `a' = C^{1/q-1} k(u)^{s(1/q-1)} m(A(u))^{1/q} a∘A(u)` that carries atoms
//! to atoms.
//!
//! Decompositions are finite. A truncated series records the `l^1` mass of
//! the dropped coefficients in `discarded_tail`. Norms are upper bounds
//! `Σ |α_j|`; the infimum over all decompositions is never computed.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::automorphism::{preimage_cover, AutomorphismFamily};
use crate::domain::{Ball, Domain, DoublingProfile, GridFunction, PointKind, SpaceFunction};
use crate::error::{Error, Result};
use crate::operator::HausdorffOperator;
use crate::point::{wrap_angle, Point};

/// Relative slack on the size condition (ii).
pub const SIZE_SLACK: f64 = 0.01;
/// Cancellation tolerance (iii), relative to `||a||_1`.
pub const CANCELLATION_TOL: f64 = 1e-8;
/// Relative slack of the `H^{1,q}` coefficient bound.
pub const H1_SLACK: f64 = 1e-12;

fn inv(q: f64) -> f64 {
    if q.is_infinite() {
        0.0
    } else {
        1.0 / q
    }
}

#[derive(Debug, Clone)]
pub struct Atom {
    values: GridFunction,
    support_ball: Ball,
    q: f64,
    tag: Option<String>,
}

impl Atom {
    pub fn new(values: GridFunction, support_ball: Ball, q: f64) -> Result<Self> {
        if !(q > 1.0) {
            return Err(Error::InvalidParameter(format!("atom exponent q must exceed 1, got {q}")));
        }
        Ok(Atom { values, support_ball, q, tag: None })
    }

    /// Short description of a closed form, kept in serialized output.
    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    /// The constant function 1 on a probability space. The window is
    /// rescaled to mass one first, so the returned atom lives on a new domain.
    pub fn constant(dom: &Domain, q: f64) -> Result<Self> {
        let dom = Arc::new(dom.clone().normalized()?);
        let center = dom.nodes()?.first().cloned().ok_or(Error::NoMeasure)?;
        let values = GridFunction::from_closed_form(dom, Arc::new(|_: &Point| Complex64::new(1.0, 0.0)))?;
        Ok(Atom::new(values, Ball::new(center, f64::MAX)?, q)?.with_tag("constant 1"))
    }

    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn support_ball(&self) -> &Ball {
        &self.support_ball
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn domain(&self) -> &Arc<Domain> {
        self.values.domain()
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }
}

impl SpaceFunction for Atom {
    fn eval(&self, x: &Point) -> Result<Complex64> {
        self.values.eval(x)
    }
}

/// Outcome of the three atom conditions, with the quantities they compare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomCheck {
    pub inside_window: bool,
    /// Largest `|a|` at nodes outside the support ball; (i) needs zero.
    pub support_leak: f64,
    pub norm: f64,
    /// `nu(B)^{1/q-1}`.
    pub norm_limit: f64,
    /// `|∫ a dnu|`.
    pub mean: f64,
    pub mean_tolerance: f64,
    pub constant_rule: bool,
}

impl AtomCheck {
    pub fn support_ok(&self) -> bool {
        self.constant_rule || (self.inside_window && self.support_leak == 0.0)
    }

    pub fn size_ok(&self) -> bool {
        self.constant_rule || self.norm <= self.norm_limit * (1.0 + SIZE_SLACK)
    }

    pub fn cancellation_ok(&self) -> bool {
        self.constant_rule || self.mean <= self.mean_tolerance
    }

    pub fn passed(&self) -> bool {
        self.support_ok() && self.size_ok() && self.cancellation_ok()
    }

    pub fn failure(&self) -> Option<String> {
        if !self.support_ok() {
            Some(if self.inside_window {
                format!("(i) value {:e} outside the support ball", self.support_leak)
            } else {
                "(i) support ball leaves the window".to_string()
            })
        } else if !self.size_ok() {
            Some(format!("(ii) norm {:e} exceeds {:e}", self.norm, self.norm_limit))
        } else if !self.cancellation_ok() {
            Some(format!("(iii) mean {:e} exceeds {:e}", self.mean, self.mean_tolerance))
        } else {
            None
        }
    }
}

/// Checks (i) support on the nodes, (ii) the size bound with 1% slack and
/// (iii) cancellation to `1e-8 ||a||_1`. On a domain of mass one the
/// constant function 1 passes regardless.
pub fn verify_atom(a: &Atom) -> Result<AtomCheck> {
    let dom = a.domain();
    let values = a.values.values();
    let mass = dom.total_mass()?;
    let norm = a.values.lp_norm(a.q)?;
    if (mass - 1.0).abs() <= 1e-12 && values.iter().all(|v| *v == Complex64::new(1.0, 0.0)) {
        return Ok(AtomCheck {
            inside_window: true,
            support_leak: 0.0,
            norm,
            norm_limit: 1.0,
            mean: 1.0,
            mean_tolerance: 0.0,
            constant_rule: true,
        });
    }
    let rho = dom.rho()?;
    let ball = &a.support_ball;
    let support_leak = dom
        .nodes()?
        .iter()
        .zip(values)
        .filter(|(x, _)| rho.distance(&ball.center, x) >= ball.radius)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let nu_b = dom.ball_measure(ball)?;
    let l1 = a.values.lp_norm(1.0)?;
    Ok(AtomCheck {
        inside_window: dom.contains_ball(ball),
        support_leak,
        norm,
        norm_limit: nu_b.powf(inv(a.q) - 1.0),
        mean: a.values.integral()?.norm(),
        mean_tolerance: CANCELLATION_TOL * l1,
        constant_rule: false,
    })
}

#[derive(Debug, Clone)]
pub struct AtomicDecomposition {
    terms: Vec<(Complex64, Atom)>,
    discarded_tail: f64,
}

impl AtomicDecomposition {
    /// All atoms must share `q` and the domain.
    pub fn new(terms: Vec<(Complex64, Atom)>, discarded_tail: f64) -> Result<Self> {
        if let Some((_, first)) = terms.first() {
            for (_, a) in &terms {
                if a.q != first.q {
                    return Err(Error::InvalidParameter("atoms of a decomposition must share q".into()));
                }
                if !Arc::ptr_eq(a.domain(), first.domain()) {
                    return Err(Error::InvalidParameter("atoms of a decomposition must share the domain".into()));
                }
            }
        }
        if !(discarded_tail >= 0.0) {
            return Err(Error::InvalidParameter("discarded tail mass must be non-negative".into()));
        }
        Ok(AtomicDecomposition { terms, discarded_tail })
    }

    pub fn empty() -> Self {
        AtomicDecomposition { terms: Vec::new(), discarded_tail: 0.0 }
    }

    pub fn terms(&self) -> &[(Complex64, Atom)] {
        &self.terms
    }

    pub fn discarded_tail(&self) -> f64 {
        self.discarded_tail
    }

    pub fn q(&self) -> Option<f64> {
        self.terms.first().map(|(_, a)| a.q)
    }

    /// `Σ α_j a_j` on the nodes.
    pub fn sum(&self) -> Result<Option<GridFunction>> {
        let Some((_, first)) = self.terms.first() else { return Ok(None) };
        let mut acc = vec![Complex64::new(0.0, 0.0); first.domain().node_count()];
        for (alpha, a) in &self.terms {
            for (s, v) in acc.iter_mut().zip(a.values.values()) {
                *s += alpha * v;
            }
        }
        Ok(Some(GridFunction::from_values(first.domain().clone(), acc)?))
    }
}

impl SpaceFunction for AtomicDecomposition {
    fn eval(&self, x: &Point) -> Result<Complex64> {
        self.terms.iter().map(|(alpha, a)| Ok(alpha * a.eval(x)?)).sum()
    }
}

/// `Σ |α_j|`, an upper bound for the `H^{1,q}` norm of the represented sum.
pub fn h1q_norm_upper(dec: &AtomicDecomposition) -> f64 {
    dec.terms.iter().map(|(alpha, _)| alpha.norm()).sum()
}

/// `C^{1/q-1} k(u)^{s(1/q-1)} m(A(u))^{1/q}`.
pub fn transform_factor(fam: &AutomorphismFamily, u: &Point, q: f64, profile: &DoublingProfile) -> Result<f64> {
    let k = fam.metric_factor(u)?;
    let m = fam.modulus(u)?;
    let e = inv(q) - 1.0;
    Ok(profile.c_nu.powf(e) * k.powf(profile.s * e) * m.powf(inv(q)))
}

/// `a'(x) = C^{1/q-1} k(u)^{s(1/q-1)} m(A(u))^{1/q} a(A(u)x)`, supported in
/// `B(x', k(u) r)` with `x'` the constructive center of the sampled preimage.
pub fn transform_atom(a: &Atom, u: &Point, fam: &AutomorphismFamily, profile: &DoublingProfile) -> Result<Atom> {
    let k = fam.metric_factor(u)?;
    let factor = transform_factor(fam, u, a.q, profile)?;
    let dom = a.domain().clone();
    let ball = &a.support_ball;
    let analytic = Ball::new(fam.apply_inverse(u, &ball.center), k * ball.radius)?;
    if !dom.contains_ball(&analytic) {
        return Err(Error::WindowEscape(format!(
            "preimage of B({}, {}) under A({u}) leaves the window",
            ball.center, ball.radius
        )));
    }
    let cover = preimage_cover(fam, &dom, u, ball)?;
    let support = Ball::new(cover.center, k * ball.radius)?;
    if !dom.contains_ball(&support) {
        return Err(Error::WindowEscape(format!("transformed support B({}, {}) leaves the window", support.center, support.radius)));
    }
    let source = a.values.clone();
    let fam = fam.clone();
    let u = u.clone();
    let composed = move |x: &Point| match source.eval(&fam.apply(&u, x)) {
        Ok(v) => factor * v,
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    };
    let values = GridFunction::from_closed_form(dom, Arc::new(composed))?.zero_extended();
    let out = Atom::new(values, support, a.q)?;
    let out = match &a.tag {
        Some(t) => out.with_tag(format!("transformed {t}")),
        None => out,
    };
    let check = verify_atom(&out)?;
    match check.failure() {
        None => Ok(out),
        Some(reason) => Err(Error::NotAnAtom(reason)),
    }
}

/// `N(Φ, A, q) = C^{1-1/q} ∫ |Φ(u)| k(u)^{s(1-1/q)} m(A(u))^{-1/q} dμ(u)`.
pub fn n_bound(op: &HausdorffOperator, q: f64, profile: &DoublingProfile) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::InvalidParameter(format!("q must exceed 1, got {q}")));
    }
    let fam = op.family();
    if !fam.has_metric_factor() {
        return Err(Error::MissingMetricFactor);
    }
    if !fam.has_modulus() {
        return Err(Error::MissingModulus);
    }
    let e = 1.0 - inv(q);
    let integral =
        op.abs_weighted(|u| Ok(fam.metric_factor(u)?.powf(profile.s * e) * fam.modulus(u)?.powf(-inv(q))))?;
    Ok(profile.c_nu.powf(e) * integral)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1Report {
    /// `Σ_{j,u} |α_j Φ(u) w(u) C^{1-1/q} k(u)^{s(1-1/q)} m(A(u))^{-1/q}|`.
    pub lhs_upper: f64,
    /// `N(Φ, A, q) Σ |α_j|`.
    pub rhs: f64,
    /// Largest nodal gap between `H f` and the re-assembled decomposition.
    pub reconstruction_error: f64,
    /// Number of transformed atoms.
    pub atoms: usize,
}

/// Builds the decomposition of `H f` from the transformed atoms `a'_{j,u}`
/// over the parameter nodes and compares its coefficient sum with
/// `N(Φ, A, q) Σ |α_j|`.
pub fn check_h1_bound(op: &HausdorffOperator, dec: &AtomicDecomposition, profile: &DoublingProfile) -> Result<H1Report> {
    let Some(q) = dec.q() else {
        return Ok(H1Report { lhs_upper: 0.0, rhs: 0.0, reconstruction_error: 0.0, atoms: 0 });
    };
    let rhs = n_bound(op, q, profile)? * h1q_norm_upper(dec);
    let fam = op.family();
    let omega = op.omega();
    let e = 1.0 - inv(q);
    let pairs: Vec<(usize, usize)> = (0..dec.terms.len())
        .flat_map(|j| (0..omega.len()).map(move |i| (j, i)))
        .filter(|&(_, i)| op.phi(&omega.nodes()[i]) != Complex64::new(0.0, 0.0))
        .collect();
    let pieces = pairs
        .par_iter()
        .map(|&(j, i)| {
            let u = &omega.nodes()[i];
            let (alpha, a) = &dec.terms[j];
            let coef = alpha
                * op.phi(u)
                * omega.weights()[i]
                * profile.c_nu.powf(e)
                * fam.metric_factor(u)?.powf(profile.s * e)
                * fam.modulus(u)?.powf(-inv(q));
            Ok((coef, transform_atom(a, u, fam, profile)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let lhs_upper: f64 = pieces.iter().map(|(c, _)| c.norm()).sum();

    let dom = dec.terms[0].1.domain();
    let nodes = dom.nodes()?;
    let mut rebuilt = vec![Complex64::new(0.0, 0.0); nodes.len()];
    for (coef, a) in &pieces {
        for (r, v) in rebuilt.iter_mut().zip(a.values.values()) {
            *r += coef * v;
        }
    }
    let direct = nodes
        .par_iter()
        .map(|x| {
            let mut s = Complex64::new(0.0, 0.0);
            for (u, w) in omega.nodes().iter().zip(omega.weights()) {
                let phi = op.phi(u);
                if phi != Complex64::new(0.0, 0.0) {
                    s += phi * w * dec.eval(&fam.apply(u, x))?;
                }
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let reconstruction_error = rebuilt.iter().zip(&direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    if lhs_upper > rhs * (1.0 + H1_SLACK) {
        return Err(Error::ViolatedBound {
            ratio: lhs_upper / h1q_norm_upper(dec),
            bound: rhs / h1q_norm_upper(dec),
            descriptor: format!("decomposition with {} atoms", dec.terms.len()),
        });
    }
    Ok(H1Report { lhs_upper, rhs, reconstruction_error, atoms: pieces.len() })
}

/// Ranges for [`random_atom`]: centers within `center_spread` of the origin
/// (per coordinate or angle), radii in `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSampler {
    pub center_spread: f64,
    pub radius: (f64, f64),
}

/// Random atom with exact or spectrally accurate cancellation. On `R^d` and
/// `T^n` the shape is `(t + i(t²-σ²)/2σ) exp(-|y|²/2σ²)` with `t = v·y` for
/// the offset `y` from the center and a random unit `v`, cut off at the
/// support radius with `σ = r/8`. Both parts integrate to zero against the
/// gaussian. The modulus is `(σ² + t²)/2σ` times the gaussian, so `|a|^q` is
/// analytic within `σ` of the real axis for every `q` and the trapezoid rule
/// stays spectrally accurate. On `Z` it is an antisymmetric list of random
/// values. The size is a random fraction in
/// `[0.5, 0.95]` of the admissible `nu(B)^{1/q-1}`.
pub fn random_atom(dom: &Arc<Domain>, q: f64, sampler: &AtomSampler, rng: &mut impl Rng) -> Result<Atom> {
    let (r_lo, r_hi) = sampler.radius;
    let spread = sampler.center_spread;
    let (shape, ball, tag): (Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>, Ball, String) = match dom.point_kind() {
        PointKind::Integer => {
            let c = rng.gen_range(-spread.floor() as i64..=spread.floor() as i64);
            let n = rng.gen_range(r_lo.max(1.0).floor() as usize..=r_hi.max(1.0).floor() as usize);
            let vals: Vec<Complex64> =
                (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let f = move |p: &Point| {
                let Ok(k) = p.as_int() else { return Complex64::new(f64::NAN, 0.0) };
                let j = k - c;
                match j.unsigned_abs() as usize {
                    0 => Complex64::new(0.0, 0.0),
                    i if i <= vals.len() => vals[i - 1] * j.signum() as f64,
                    _ => Complex64::new(0.0, 0.0),
                }
            };
            (Arc::new(f), Ball::new(Point::Int(c), n as f64 + 0.5)?, format!("antisymmetric values about {c}, half-length {n}"))
        }
        PointKind::RealVector(d) => {
            let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-spread..=spread)).collect();
            let r = rng.gen_range(r_lo..=r_hi);
            let v = unit_vector(d, rng);
            let sigma = r / 8.0;
            if sigma < 2.0 * dom.resolution() {
                return Err(Error::InvalidParameter(format!("atom radius {r} is too small for the grid")));
            }
            let tag = format!("gaussian atom at {c:?}, radius {r:.4}");
            let center = c.clone();
            let f = move |p: &Point| {
                let Ok(x) = p.as_real() else { return Complex64::new(f64::NAN, 0.0) };
                let y: Vec<f64> = x.iter().zip(&center).map(|(a, b)| a - b).collect();
                cancelling_gaussian(&y, &v, r, sigma)
            };
            (Arc::new(f), Ball::new(Point::real_vec(&c), r)?, tag)
        }
        PointKind::TorusAngles(n) => {
            let th: Vec<f64> = (0..n).map(|_| rng.gen_range(-spread..=spread)).collect();
            let r = rng.gen_range(r_lo..=r_hi);
            let v = unit_vector(n, rng);
            let sigma = r / 8.0;
            let tag = format!("gaussian atom at angles {th:?}, radius {r:.4}");
            let center = th.clone();
            let f = move |p: &Point| {
                let Ok(z) = p.as_complex() else { return Complex64::new(f64::NAN, 0.0) };
                let y: Vec<f64> = z.iter().zip(&center).map(|(zj, t)| wrap_angle(zj.arg() - t)).collect();
                cancelling_gaussian(&y, &v, r, sigma)
            };
            let c: Vec<Complex64> = th.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            (Arc::new(f), Ball::new(Point::complex_vec(&c), r)?, tag)
        }
        other => return Err(Error::InvalidParameter(format!("no atoms on {other:?}"))),
    };
    let raw = GridFunction::from_closed_form(dom.clone(), shape.clone())?;
    let norm = raw.lp_norm(q)?;
    let limit = dom.ball_measure(&ball)?.powf(inv(q) - 1.0);
    let scale = rng.gen_range(0.5..0.95) * limit / norm;
    let scaled: Arc<dyn Fn(&Point) -> Complex64 + Send + Sync> = Arc::new(move |x: &Point| scale * shape(x));
    let values = GridFunction::from_closed_form(dom.clone(), scaled)?.zero_extended();
    Ok(Atom::new(values, ball, q)?.with_tag(tag))
}

fn unit_vector(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

fn cancelling_gaussian(y: &[f64], v: &[f64], r: f64, sigma: f64) -> Complex64 {
    let r2 = y.iter().map(|t| t * t).sum::<f64>();
    if r2 >= r * r {
        return Complex64::new(0.0, 0.0);
    }
    let t: f64 = y.iter().zip(v).map(|(a, b)| a * b).sum();
    Complex64::new(t, (t * t - sigma * sigma) / (2.0 * sigma)) * (-r2 / (2.0 * sigma * sigma)).exp()
}

/// `q` as a JSON number, or the string `"inf"`.
pub mod q_serde {
    use super::*;

    pub fn serialize<S: Serializer>(q: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if q.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*q)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Q {
            Num(f64),
            Text(String),
        }
        match Q::deserialize(d)? {
            Q::Num(q) => Ok(q),
            Q::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Q::Text(t) => Err(serde::de::Error::custom(format!("bad exponent {t:?}"))),
        }
    }
}

/// Serialized atom: support ball, exponent, node values and the closed-form tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub support_ball: Ball,
    #[serde(with = "q_serde")]
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<String>,
    /// `[re, im]` per domain node.
    pub values: Vec<[f64; 2]>,
}

impl AtomRecord {
    pub fn from_atom(a: &Atom) -> Self {
        AtomRecord {
            support_ball: a.support_ball.clone(),
            q: a.q,
            closed_form: a.tag.clone(),
            values: a.values.values().iter().map(|v| [v.re, v.im]).collect(),
        }
    }

    /// Rebuilds a node-valued atom, vanishing outside the window.
    pub fn into_atom(self, dom: Arc<Domain>) -> Result<Atom> {
        let vals = self.values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        let values = GridFunction::from_values(dom, vals)?.zero_extended();
        let a = Atom::new(values, self.support_ball, self.q)?;
        Ok(match self.closed_form {
            Some(t) => a.with_tag(t),
            None => a,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub coefficients: Vec<[f64; 2]>,
    pub atoms: Vec<AtomRecord>,
    pub discarded_tail: f64,
}

impl DecompositionRecord {
    pub fn from_decomposition(dec: &AtomicDecomposition) -> Self {
        DecompositionRecord {
            coefficients: dec.terms.iter().map(|(c, _)| [c.re, c.im]).collect(),
            atoms: dec.terms.iter().map(|(_, a)| AtomRecord::from_atom(a)).collect(),
            discarded_tail: dec.discarded_tail,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureSpace;
    use crate::operator::trial_rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn line() -> Arc<Domain> {
        Arc::new(Domain::real_line(10.0, 200.0).unwrap())
    }

    fn sign_atom(dom: &Arc<Domain>, x0: f64, r: f64) -> Atom {
        let f = move |p: &Point| {
            let t = p.x().unwrap() - x0;
            if t.abs() >= r || t == 0.0 {
                c(0.0)
            } else {
                c(t.signum() / (2.0 * r))
            }
        };
        let g = GridFunction::from_closed_form(dom.clone(), Arc::new(f)).unwrap().zero_extended();
        Atom::new(g, Ball::new(Point::real(x0), r).unwrap(), f64::INFINITY).unwrap()
    }

    #[test]
    fn step_atom_passes() {
        let a = sign_atom(&line(), 0.0, 1.0);
        let chk = verify_atom(&a).unwrap();
        assert!(chk.passed(), "{chk:?}");
        assert_eq!(chk.norm, 0.5);
        assert!(chk.mean < 1e-15);
    }

    #[test]
    fn constant_atom_rule() {
        let dom = Domain::torus(1, 256).unwrap();
        let a = Atom::constant(&dom, 2.0).unwrap();
        let chk = verify_atom(&a).unwrap();
        assert!(chk.constant_rule && chk.passed());
    }

    #[test]
    fn nonzero_mean_fails_cancellation() {
        let dom = line();
        let a = sign_atom(&dom, 0.0, 1.0);
        let shifted = a.values.values().iter().zip(dom.nodes().unwrap()).map(|(v, x)| {
            if x.x().unwrap().abs() < 1.0 { v + 0.05 } else { *v }
        });
        let g = GridFunction::from_values(dom.clone(), shifted.collect()).unwrap();
        let b = Atom::new(g, a.support_ball.clone(), f64::INFINITY).unwrap();
        let chk = verify_atom(&b).unwrap();
        assert!(chk.support_ok() && !chk.cancellation_ok());
        assert!((chk.mean - 0.1).abs() < 1e-3, "{}", chk.mean);
    }

    #[test]
    fn norm_upper_sums() {
        let dom = line();
        let a = sign_atom(&dom, 0.0, 1.0);
        assert_eq!(h1q_norm_upper(&AtomicDecomposition::empty()), 0.0);
        let one = AtomicDecomposition::new(vec![(c(1.0), a.clone())], 0.0).unwrap();
        assert_eq!(h1q_norm_upper(&one), 1.0);
        let two = AtomicDecomposition::new(vec![(c(0.5), a.clone()), (c(-0.5), sign_atom(&dom, 2.0, 0.5))], 0.0).unwrap();
        assert_eq!(h1q_norm_upper(&two), 1.0);
    }

    #[test]
    fn identity_transform_shrinks_by_constant() {
        let dom = line();
        let fam = AutomorphismFamily::translation_real();
        let mut rng = trial_rng(5, 0);
        let sampler = AtomSampler { center_spread: 2.0, radius: (0.5, 1.5) };
        for q in [2.0, 4.0, f64::INFINITY] {
            let a = random_atom(&dom, q, &sampler, &mut rng).unwrap();
            let b = transform_atom(&a, &Point::real(0.0), &fam, &DoublingProfile::euclidean(1)).unwrap();
            let expect = 2f64.powf(inv(q) - 1.0);
            let got = b.values.lp_norm(q).unwrap() / a.values.lp_norm(q).unwrap();
            assert!((got - expect).abs() < 1e-12, "{got} {expect}");
            assert!((b.support_ball.radius - a.support_ball.radius).abs() < 1e-15);
        }
    }

    #[test]
    fn translated_atom_margins_match() {
        let dom = line();
        let fam = AutomorphismFamily::translation_real();
        let a = sign_atom(&dom, 0.0, 1.0);
        let b = transform_atom(&a, &Point::real(1.5), &fam, &DoublingProfile::euclidean(1)).unwrap();
        assert!((b.support_ball.center.x().unwrap() - 1.5).abs() < 1e-12);
        let (ca, cb) = (verify_atom(&a).unwrap(), verify_atom(&b).unwrap());
        assert!((cb.norm - 0.5 * ca.norm).abs() < 1e-12);
        // the centers agree up to rounding, so the discrete ball masses agree up to one node
        assert!((cb.norm_limit / ca.norm_limit - 1.0).abs() < 0.01);
        assert!(cb.mean < 1e-12);
    }

    #[test]
    fn dilated_atom_norm_chain() {
        let dom = line();
        let fam = AutomorphismFamily::dilation_real(1);
        let mut rng = trial_rng(11, 0);
        let a = random_atom(&dom, 2.0, &AtomSampler { center_spread: 1.0, radius: (0.5, 1.0) }, &mut rng).unwrap();
        let b = transform_atom(&a, &Point::real(2.0), &fam, &DoublingProfile::euclidean(1)).unwrap();
        let ratio = b.values.lp_norm(2.0).unwrap() / a.values.lp_norm(2.0).unwrap();
        // C^{-1/2} k^{-1/2}
        assert!((ratio - 0.5).abs() < 1e-9, "{ratio}");
        assert!((b.support_ball.radius - 2.0 * a.support_ball.radius).abs() < 1e-12);
    }

    #[test]
    fn escaping_transform() {
        let dom = line();
        let a = sign_atom(&dom, 8.0, 1.0);
        let e = transform_atom(&a, &Point::real(1.5), &AutomorphismFamily::translation_real(), &DoublingProfile::euclidean(1));
        assert!(matches!(e, Err(Error::WindowEscape(_))));
    }

    fn dilation_op(weights: &[f64], scales: &[f64], dom: Arc<Domain>) -> HausdorffOperator {
        let mats: Vec<Vec<Vec<f64>>> = scales.iter().map(|s| vec![vec![*s]]).collect();
        let fam = AutomorphismFamily::linear(&mats).unwrap();
        let omega = MeasureSpace::counting((0..scales.len() as i64).map(Point::Int).collect()).unwrap();
        let w = weights.to_vec();
        HausdorffOperator::new("dilations", omega, move |u| c(w[u.as_int().unwrap() as usize]), fam, dom).unwrap()
    }

    #[test]
    fn n_bound_values() {
        let dom = line();
        let prof = DoublingProfile::euclidean(1);
        // A(u)x = x/2: m = 1/2, k = 2
        let op = dilation_op(&[1.0], &[0.5], dom.clone());
        assert!((n_bound(&op, 2.0, &prof).unwrap() - 2f64.powf(1.5)).abs() < 1e-12);
        let shift = dilation_op(&[0.3, -0.2], &[1.0, 1.0], dom.clone());
        let q = 3.0;
        assert!((n_bound(&shift, q, &prof).unwrap() - 2f64.powf(1.0 - 1.0 / q) * 0.5).abs() < 1e-12);
        assert_eq!(n_bound(&dilation_op(&[0.0], &[2.0], dom), 2.0, &prof).unwrap(), 0.0);
    }

    #[test]
    fn n_bound_needs_metric_factor() {
        let omega = MeasureSpace::discrete(vec![Point::complex(c(0.1))], vec![1.0]).unwrap();
        let op = HausdorffOperator::new(
            "zhu",
            omega,
            |_| c(1.0),
            AutomorphismFamily::mobius_involution(),
            Arc::new(Domain::bare(PointKind::UnitDisc)),
        )
        .unwrap();
        assert_eq!(n_bound(&op, 2.0, &DoublingProfile::euclidean(2)).unwrap_err(), Error::MissingMetricFactor);
    }

    #[test]
    fn single_translation_bound_is_tight() {
        let dom = line();
        let op = dilation_op(&[1.0], &[1.0], dom.clone());
        let a = sign_atom(&dom, 0.0, 1.0);
        let alpha = c(-0.7);
        let dec = AtomicDecomposition::new(vec![(alpha, a)], 0.0).unwrap();
        let rep = check_h1_bound(&op, &dec, &DoublingProfile::euclidean(1)).unwrap();
        // q = inf: 2^{1-1/q} = 2
        assert!((rep.lhs_upper - 1.4).abs() < 1e-15 && (rep.rhs - 1.4).abs() < 1e-15, "{rep:?}");
        assert!(rep.reconstruction_error < 1e-14);
    }

    #[test]
    fn zero_symbol_bound() {
        let dom = line();
        let op = dilation_op(&[0.0, 0.0], &[2.0, 0.5], dom.clone());
        let dec = AtomicDecomposition::new(vec![(c(1.0), sign_atom(&dom, 0.0, 1.0))], 0.0).unwrap();
        let rep = check_h1_bound(&op, &dec, &DoublingProfile::euclidean(1)).unwrap();
        assert_eq!((rep.lhs_upper, rep.rhs), (0.0, 0.0));
    }

    #[test]
    fn record_roundtrip() {
        let dom = line();
        let a = sign_atom(&dom, 0.0, 1.0);
        let json = serde_json::to_string(&AtomRecord::from_atom(&a)).unwrap();
        assert!(json.contains("\"q\":\"inf\""));
        let back: AtomRecord = serde_json::from_str(&json).unwrap();
        let b = back.into_atom(dom).unwrap();
        assert_eq!(b.values.values(), a.values.values());
        assert!(verify_atom(&b).unwrap().passed());
    }
}
