//! Concrete operators, each with a parameter schema, embedded reference facts
//! and the setup used to check its automorphism family against the measure
//! and the metric.

mod analytic;
mod determinant;
mod groups;
mod hilbert;
pub mod oracle;
mod torus;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use analytic::{disc_quadrature, gamma_symbol, halfplane_hausdorff, halfplane_omega, hausdorff_zhu};
pub use determinant::{
    determinant_exact, determinant_operator, diagonal_product, matrix_point, permutations, sign, NODE_BUDGET,
};
pub use groups::{condition_numbers, convolution_operator, discrete_hausdorff_rd, gaussian_measure};
pub use hilbert::{
    cauchy_kernel, curve_translation, discrete_hilbert, discrete_hilbert_symbol, hilbert_along_curve,
    hilbert_transform, MonomialCurve,
};
pub use torus::{cauchy_symbol, cauchy_torus, monomial};

use crate::automorphism::{check_measure_agreement, check_metric_agreement, AutomorphismFamily};
use crate::domain::{Ball, Domain, SpaceFunction};
use crate::error::{Error, Result};
use crate::measure::{DecayHypothesis, MeasureSpace};
use crate::operator::{trial_rng, HausdorffOperator};
use crate::point::Point;

type FactEval = Arc<dyn Fn(&HausdorffOperator) -> Result<Complex64> + Send + Sync>;

/// An input with its expected output and where the expectation comes from.
#[derive(Clone)]
pub struct ReferenceFact {
    pub input: String,
    pub expected: Complex64,
    pub tolerance: f64,
    pub provenance: &'static str,
    eval: FactEval,
}

impl std::fmt::Debug for ReferenceFact {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReferenceFact")
            .field("input", &self.input)
            .field("expected", &self.expected)
            .field("tolerance", &self.tolerance)
            .finish()
    }
}

impl ReferenceFact {
    fn new(
        input: impl Into<String>,
        expected: Complex64,
        tolerance: f64,
        provenance: &'static str,
        eval: impl Fn(&HausdorffOperator) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        ReferenceFact { input: input.into(), expected, tolerance, provenance, eval: Arc::new(eval) }
    }

    fn at(
        input: impl Into<String>,
        expected: Complex64,
        tolerance: f64,
        provenance: &'static str,
        f: impl SpaceFunction + 'static,
        x: Point,
    ) -> Self {
        Self::new(input, expected, tolerance, provenance, move |op| op.apply(&f, &x))
    }

    pub fn evaluate(&self, op: &HausdorffOperator) -> Result<Complex64> {
        (self.eval)(op)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactOutcome {
    pub input: String,
    pub provenance: String,
    pub expected: [f64; 2],
    pub got: [f64; 2],
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Family, window, parameters and test balls for the agreement checks.
#[derive(Debug, Clone)]
pub struct AgreementSetup {
    pub family: AutomorphismFamily,
    pub domain: Arc<Domain>,
    pub params: Vec<Point>,
    pub balls: Vec<Ball>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub samples: usize,
    /// Worst relative error of `nu(A(u)^-1 E) = m^-1 nu(E)`.
    pub measure_error: f64,
    /// Worst ratio of that error to `2 h / nu(E)` (one grid cell per end).
    pub measure_ratio: f64,
    /// Worst `required k / declared k(u)`, when a metric factor is declared.
    pub metric_ratio: Option<f64>,
    pub passed: bool,
}

/// Slack on the declared metric factor.
pub const METRIC_SLACK: f64 = 0.02;

pub fn run_agreement(setup: &AgreementSetup) -> Result<AgreementReport> {
    let dom = &setup.domain;
    let h = dom.resolution();
    let mut measure_error: f64 = 0.0;
    let mut measure_ratio: f64 = 0.0;
    let mut metric_ratio: Option<f64> = None;
    for u in &setup.params {
        let m = setup.family.modulus(u)?;
        let err = check_measure_agreement(&setup.family, dom, u, &setup.balls)?;
        let smallest = setup
            .balls
            .iter()
            .map(|b| dom.ball_measure(b).map(|v| v.min(v / m)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        measure_error = measure_error.max(err);
        measure_ratio = measure_ratio.max(err / (2.0 * h / smallest));
        if setup.family.has_metric_factor() {
            let k = setup.family.metric_factor(u)?;
            let need = check_metric_agreement(&setup.family, dom, u, &setup.balls)?;
            metric_ratio = Some(metric_ratio.unwrap_or(0.0).max(need / k));
        }
    }
    let passed = !setup.params.is_empty()
        && measure_ratio <= 1.0
        && metric_ratio.is_none_or(|r| r <= 1.0 + METRIC_SLACK);
    Ok(AgreementReport { samples: setup.params.len(), measure_error, measure_ratio, metric_ratio, passed })
}

/// Up to `count` evenly spread candidates whose analytic preimage balls stay
/// inside the window.
fn admissible(candidates: &[Point], family: &AutomorphismFamily, dom: &Domain, balls: &[Ball], count: usize) -> Vec<Point> {
    let fits: Vec<&Point> = candidates
        .iter()
        .filter(|u| {
            let k = family.metric_factor(u).unwrap_or(1.0);
            balls.iter().all(|b| {
                Ball::new(family.apply_inverse(u, &b.center), k * b.radius).is_ok_and(|pre| dom.contains_ball(&pre))
            })
        })
        .collect();
    if fits.len() <= count {
        return fits.into_iter().cloned().collect();
    }
    (0..count).map(|i| fits[i * (fits.len() - 1) / (count - 1).max(1)].clone()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub entry: String,
    pub params: Value,
    pub facts: Vec<FactOutcome>,
    pub matches: usize,
    pub total: usize,
    pub agreement: Option<AgreementReport>,
    pub passed: bool,
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    defaults: fn() -> Value,
    build: fn(&Value) -> Result<HausdorffOperator>,
    facts: fn(&Value) -> Result<Vec<ReferenceFact>>,
    agreement: fn(&Value) -> Result<Option<AgreementSetup>>,
}

impl CatalogEntry {
    pub fn default_params(&self) -> Value {
        (self.defaults)()
    }

    /// `params` may be `null` or a partial object; missing fields take defaults.
    pub fn build(&self, params: &Value) -> Result<HausdorffOperator> {
        (self.build)(params)
    }

    pub fn reference_facts(&self, params: &Value) -> Result<Vec<ReferenceFact>> {
        (self.facts)(params)
    }

    pub fn agreement_setup(&self, params: &Value) -> Result<Option<AgreementSetup>> {
        (self.agreement)(params)
    }

    pub fn selftest(&self, params: &Value) -> Result<SelftestReport> {
        let op = self.build(params)?;
        let facts = self.reference_facts(params)?;
        let mut outcomes = Vec::with_capacity(facts.len());
        for fact in &facts {
            let got = fact.evaluate(&op)?;
            let error = (got - fact.expected).norm();
            outcomes.push(FactOutcome {
                input: fact.input.clone(),
                provenance: fact.provenance.to_string(),
                expected: [fact.expected.re, fact.expected.im],
                got: [got.re, got.im],
                error,
                tolerance: fact.tolerance,
                passed: error <= fact.tolerance,
            });
        }
        let agreement = match self.agreement_setup(params)? {
            Some(setup) => Some(run_agreement(&setup)?),
            None => None,
        };
        let matches = outcomes.iter().filter(|o| o.passed).count();
        let total = outcomes.len();
        Ok(SelftestReport {
            entry: self.name.to_string(),
            params: params.clone(),
            facts: outcomes,
            matches,
            total,
            passed: matches == total && agreement.as_ref().is_none_or(|a| a.passed),
            agreement,
        })
    }
}

fn parse<T: DeserializeOwned + Default>(v: &Value) -> Result<T> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| Error::Descriptor(e.to_string()))
}

fn to_value<T: Serialize>(t: T) -> Value {
    serde_json::to_value(t).expect("parameter structs serialize")
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn real_balls() -> Vec<Ball> {
    vec![Ball { center: Point::real(0.0), radius: 1.0 }, Ball { center: Point::real(0.7), radius: 0.5 }]
}

fn box_balls(d: usize) -> Vec<Ball> {
    let shifted: Vec<f64> = (0..d).map(|j| if j % 2 == 0 { 0.3 } else { -0.2 }).collect();
    vec![
        Ball { center: Point::real_vec(&vec![0.0; d]), radius: 0.6 },
        Ball { center: Point::real_vec(&shifted), radius: 0.4 },
    ]
}

// ---------------------------------------------------------------- determinant

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeterminantParams {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub max_entry: i64,
}

impl Default for DeterminantParams {
    fn default() -> Self {
        DeterminantParams { n: 3, samples: 20, seed: 0, max_entry: 9 }
    }
}

/// Random integer matrix with entries in `[-max_entry, max_entry]`.
pub fn random_integer_matrix(n: usize, max_entry: i64, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    (0..n).map(|_| (0..n).map(|_| rng.gen_range(-max_entry..=max_entry)).collect()).collect()
}

fn determinant_facts(v: &Value) -> Result<Vec<ReferenceFact>> {
    let p: DeterminantParams = parse(v)?;
    let mut rng = trial_rng(p.seed, 0);
    Ok((0..p.samples)
        .map(|_| {
            let m = random_integer_matrix(p.n, p.max_entry, &mut rng);
            let expected = oracle::bareiss_determinant(&m) as f64;
            ReferenceFact::new(format!("det {m:?}"), c(expected), 0.0, "fraction-free elimination", move |op| {
                Ok(c(determinant_exact(op, &m)? as f64))
            })
        })
        .collect())
}

// ----------------------------------------------------------- discrete Hilbert

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscreteHilbertParams {
    pub budget: i64,
    pub window: i64,
}

impl Default for DiscreteHilbertParams {
    fn default() -> Self {
        DiscreteHilbertParams { budget: 200, window: 400 }
    }
}

fn delta0(p: &Point) -> Complex64 {
    c(if p.as_int() == Ok(0) { 1.0 } else { 0.0 })
}

fn discrete_hilbert_facts(_: &Value) -> Result<Vec<ReferenceFact>> {
    Ok([1i64, 2, 3, -1, -5, 6]
        .into_iter()
        .map(|k| {
            let expected = if k % 2 != 0 { 2.0 / (PI * k as f64) } else { 0.0 };
            ReferenceFact::at(format!("delta_0 at {k}"), c(expected), 1e-15, "single surviving term", delta0, Point::Int(k))
        })
        .collect())
}

fn discrete_hilbert_agreement(v: &Value) -> Result<Option<AgreementSetup>> {
    let p: DiscreteHilbertParams = parse(v)?;
    let domain = Arc::new(Domain::integers(-p.window, p.window)?);
    let family = AutomorphismFamily::translation_integer();
    let balls = vec![Ball { center: Point::Int(0), radius: 2.5 }, Ball { center: Point::Int(3), radius: 5.5 }];
    let candidates: Vec<Point> = (-p.budget..=p.budget).map(Point::Int).collect();
    let params = admissible(&candidates, &family, &domain, &balls, 10);
    Ok(Some(AgreementSetup { family, domain, params, balls }))
}

// -------------------------------------------------------------------- Hilbert

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HilbertParams {
    pub r: f64,
    pub nodes: usize,
    pub window: f64,
    pub nodes_per_unit: f64,
}

impl Default for HilbertParams {
    fn default() -> Self {
        HilbertParams { r: 200.0, nodes: 16384, window: 4.0, nodes_per_unit: 50.0 }
    }
}

fn lorentzian(p: &Point) -> Complex64 {
    c(1.0 / (1.0 + p.x().map_or(f64::NAN, |x| x * x)))
}

fn hilbert_facts(_: &Value) -> Result<Vec<ReferenceFact>> {
    let mut out: Vec<ReferenceFact> = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]
        .into_iter()
        .map(|x: f64| {
            ReferenceFact::at(
                format!("1/(1+t^2) at {x}"),
                c(x / (1.0 + x * x)),
                1e-3,
                "closed form, spectral multiplier -i sign",
                lorentzian,
                Point::real(x),
            )
        })
        .collect();
    // t on [x-1, x+1]: (1/π) p.v. ∫_{-1}^{1} (x - u)/u du = -2/π; the jumps
    // at the ends limit the rule to first order in the node spacing
    let x = 0.5;
    let window = move |p: &Point| {
        let t = p.x().unwrap_or(f64::NAN);
        c(if (t - x).abs() <= 1.0 { t } else { 0.0 })
    };
    out.push(ReferenceFact::at("t 1[x-1, x+1](t) at 0.5", c(-2.0 / PI), 2e-2, "antiderivative", window, Point::real(x)));
    out.push(ReferenceFact::at("zero", c(0.0), 0.0, "linearity", |_: &Point| c(0.0), Point::real(0.3)));
    Ok(out)
}

fn hilbert_agreement(_: &Value) -> Result<Option<AgreementSetup>> {
    let domain = Arc::new(Domain::real_line(6.0, 200.0)?);
    let family = AutomorphismFamily::translation_real();
    let balls = real_balls();
    let candidates: Vec<Point> = (-40..=40).map(|k| Point::real(0.11 * k as f64)).collect();
    let params = admissible(&candidates, &family, &domain, &balls, 10);
    Ok(Some(AgreementSetup { family, domain, params, balls }))
}

// -------------------------------------------------------------- curve Hilbert

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveParams {
    pub powers: Vec<i32>,
    pub coefficients: Option<Vec<f64>>,
    pub r: f64,
    pub nodes: usize,
    pub window: f64,
    pub nodes_per_unit: f64,
}

impl Default for CurveParams {
    fn default() -> Self {
        CurveParams { powers: vec![1, 2], coefficients: None, r: 200.0, nodes: 16384, window: 3.0, nodes_per_unit: 10.0 }
    }
}

impl CurveParams {
    fn curve(&self) -> MonomialCurve {
        MonomialCurve { powers: self.powers.clone(), coefficients: self.coefficients.clone() }
    }
}

fn curve_facts(v: &Value) -> Result<Vec<ReferenceFact>> {
    let p: CurveParams = parse(v)?;
    let d = p.powers.len();
    let mut out = vec![ReferenceFact::at(
        "constant 2.5",
        c(0.0),
        1e-12,
        "odd symbol",
        |_: &Point| c(2.5),
        Point::real_vec(&vec![0.2; d]),
    )];
    if p.powers.first() == Some(&1) && p.coefficients.as_ref().is_none_or(|c| c[0] == 1.0) {
        for x1 in [-1.0, 0.0, 0.5, 2.0] {
            let mut x = vec![0.3; d];
            x[0] = x1;
            let f = |q: &Point| c(1.0 / (1.0 + q.as_real().map_or(f64::NAN, |v| v[0] * v[0])));
            out.push(ReferenceFact::at(
                format!("1/(1+x_1^2) at {x:?}"),
                c(x1 / (1.0 + x1 * x1)),
                1e-3,
                "separation of variables",
                f,
                Point::real_vec(&x),
            ));
        }
    }
    Ok(out)
}

fn curve_agreement(v: &Value) -> Result<Option<AgreementSetup>> {
    let p: CurveParams = parse(v)?;
    let d = p.powers.len();
    let (w, npu) = if d == 1 { (6.0, 200.0) } else { (3.0, 40.0) };
    let domain = Arc::new(Domain::real_box(d, w, npu)?);
    let family = curve_translation(p.curve())?;
    let balls = if d == 1 { real_balls() } else { box_balls(d) };
    let candidates: Vec<Point> = (-40..=40).map(|k| Point::real(0.05 * k as f64)).collect();
    let params = admissible(&candidates, &family, &domain, &balls, 10);
    Ok(Some(AgreementSetup { family, domain, params, balls }))
}

// --------------------------------------------------------------------- Cauchy

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CauchyParams {
    pub n: usize,
    pub nodes: usize,
    pub domain_nodes: usize,
}

impl Default for CauchyParams {
    fn default() -> Self {
        CauchyParams { n: 1, nodes: 4096, domain_nodes: 256 }
    }
}

/// `(1/2) z^m` for `m >= 0` and `-(1/2) z^m` for `m < 0`, per coordinate.
fn half_residue(m: i32) -> f64 {
    if m >= 0 {
        0.5
    } else {
        -0.5
    }
}

fn cauchy_facts(v: &Value) -> Result<Vec<ReferenceFact>> {
    let p: CauchyParams = parse(v)?;
    let zs: Vec<Vec<Complex64>> =
        [0.3, 1.9, -2.4].iter().map(|&t| (0..p.n).map(|j| Complex64::from_polar(1.0, t + 0.7 * j as f64)).collect()).collect();
    let mut exps: Vec<Vec<i32>> = (-3..=3).map(|m| vec![m; p.n]).collect();
    if p.n > 1 {
        exps.push((0..p.n).map(|j| if j == 0 { -1 } else { 1 }).collect());
    }
    let mut out = Vec::new();
    for e in exps {
        for z in &zs {
            let expected: Complex64 = z.iter().zip(&e).map(|(zj, &m)| zj.powi(m) * half_residue(m)).product();
            out.push(ReferenceFact::at(
                format!("zeta^{e:?} at {z:?}"),
                expected,
                1e-6,
                "partial fractions, half residue",
                monomial(e.clone()),
                Point::complex_vec(z),
            ));
        }
    }
    Ok(out)
}

fn cauchy_agreement(v: &Value) -> Result<Option<AgreementSetup>> {
    let p: CauchyParams = parse(v)?;
    let domain = Arc::new(Domain::torus(p.n, if p.n == 1 { 720 } else { 120 })?);
    let balls = vec![
        Ball { center: Point::complex_vec(&vec![Complex64::new(1.0, 0.0); p.n]), radius: 0.5 },
        Ball { center: Point::complex_vec(&vec![Complex64::from_polar(1.0, 1.0); p.n]), radius: 0.8 },
    ];
    let params = (0..10)
        .map(|i| Point::real_vec(&(0..p.n).map(|j| -3.0 + 0.61 * i as f64 + 0.37 * j as f64).collect::<Vec<_>>()))
        .collect();
    Ok(Some(AgreementSetup { family: AutomorphismFamily::torus_rotation(), domain, params, balls }))
}

// ---------------------------------------------------------------- convolution

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Real,
    Integer,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvolutionParams {
    pub group: Group,
    /// Standard deviation of the Gaussian on `R`.
    pub sigma: f64,
    pub nodes: usize,
    pub window: f64,
    pub nodes_per_unit: f64,
    /// `(point, mass)` pairs on `Z`.
    pub atoms: Vec<(i64, f64)>,
    pub integer_window: i64,
}

impl Default for ConvolutionParams {
    fn default() -> Self {
        ConvolutionParams {
            group: Group::Real,
            sigma: 0.5,
            nodes: 161,
            window: 8.0,
            nodes_per_unit: 20.0,
            atoms: vec![(-1, 0.5), (1, 0.5)],
            integer_window: 50,
        }
    }
}

fn convolution_facts(v: &Value) -> Result<Vec<ReferenceFact>> {
    let p: ConvolutionParams = parse(v)?;
    Ok(match p.group {
        Group::Real => {
            let sf = 0.7;
            let s2 = sf * sf + p.sigma * p.sigma;
            [0.0, 0.5, 1.5, -2.0]
                .into_iter()
                .map(|x: f64| {
                    let expected = sf / s2.sqrt() * (-x * x / (2.0 * s2)).exp();
                    let f = move |q: &Point| c((-q.x().map_or(f64::NAN, |t| t * t) / (2.0 * sf * sf)).exp());
                    ReferenceFact::at(format!("gaussian(0.7) at {x}"), c(expected), 1e-4, "variances add", f, Point::real(x))
                })
                .collect()
        }
        Group::Integer => (-3..=3)
            .map(|k| {
                let expected: f64 = p.atoms.iter().filter(|(u, _)| *u == k).map(|(_, w)| w).sum();
                ReferenceFact::at(format!("delta_0 at {k}"), c(expected), 1e-15, "f * mu (k) = mu({k})", delta0, Point::Int(k))
            })
            .collect(),
    })
}

fn convolution_measure(p: &ConvolutionParams) -> Result<MeasureSpace> {
    match p.group {
        Group::Real => gaussian_measure(p.sigma, p.nodes),
        Group::Integer => {
            let (nodes, weights) = p.atoms.iter().map(|&(u, w)| (Point::Int(u), w)).unzip();
            MeasureSpace::discrete(nodes, weights)
        }
    }
}

fn convolution_agreement(v: &Value) -> Result<Option<AgreementSetup>> {
    let p: ConvolutionParams = parse(v)?;
    let mu = convolution_measure(&p)?;
    let (family, domain, balls) = match p.group {
        Group::Real => (AutomorphismFamily::translation_real(), Domain::real_line(6.0, 200.0)?, real_balls()),
        Group::Integer => (
            AutomorphismFamily::translation_integer(),
            Domain::integers(-p.integer_window, p.integer_window)?,
            vec![Ball { center: Point::Int(0), radius: 2.5 }],
        ),
    };
    let domain = Arc::new(domain);
    let params = admissible(mu.nodes(), &family, &domain, &balls, 10);
    Ok(Some(AgreementSetup { family, domain, params, balls }))
}

// --------------------------------------------------------- discrete Hausdorff

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscreteHausdorffParams {
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub weights: Vec<f64>,
    pub window: f64,
    pub nodes_per_unit: f64,
}

impl Default for DiscreteHausdorffParams {
    fn default() -> Self {
        DiscreteHausdorffParams {
            matrices: vec![vec![vec![2.0]], vec![vec![0.5]], vec![vec![-1.5]]],
            weights: vec![0.5, 0.3, -0.2],
            window: 10.0,
            nodes_per_unit: 40.0,
        }
    }
}

impl DiscreteHausdorffParams {
    fn dim(&self) -> usize {
        self.matrices.first().map_or(1, |m| m.len())
    }
}

fn discrete_hausdorff_facts(v: &Value) -> Result<Vec<ReferenceFact>> {
    let p: DiscreteHausdorffParams = parse(v)?;
    let d = p.dim();
    let gauss = |q: &Point| c((-q.as_real().map_or(f64::NAN, |v| v.iter().map(|t| t * t).sum::<f64>())).exp());
    Ok([0.4, -1.1]
        .into_iter()
        .map(|s: f64| {
            let x: Vec<f64> = (0..d).map(|j| s + 0.2 * j as f64).collect();
            let expected: f64 = p
                .matrices
                .iter()
                .zip(&p.weights)
                .map(|(a, w)| {
                    let ax2: f64 = a.iter().map(|row| row.iter().zip(&x).map(|(r, t)| r * t).sum::<f64>().powi(2)).sum();
                    w * (-ax2).exp()
                })
                .sum();
            ReferenceFact::at(format!("exp(-|x|^2) at {x:?}"), c(expected), 1e-12, "direct sum", gauss, Point::real_vec(&x))
        })
        .collect())
}

fn discrete_hausdorff_agreement(v: &Value) -> Result<Option<AgreementSetup>> {
    let p: DiscreteHausdorffParams = parse(v)?;
    let d = p.dim();
    let domain = Arc::new(if d == 1 { Domain::real_line(p.window, 200.0)? } else { Domain::real_box(d, 4.0, 60.0)? });
    let family = AutomorphismFamily::linear(&p.matrices)?;
    let balls = if d == 1 { real_balls() } else { box_balls(d) };
    let candidates: Vec<Point> = (0..p.matrices.len() as i64).map(Point::Int).collect();
    let params = admissible(&candidates, &family, &domain, &balls, 10);
    Ok(Some(AgreementSetup { family, domain, params, balls }))
}

// ---------------------------------------------------------------------- disc

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZhuParams {
    pub radial: usize,
    pub angular: usize,
    pub radius: f64,
    pub margin: f64,
    /// `Φ(u) ∝ (1 - |u|²)^alpha`, normalized on the nodes.
    pub alpha: f64,
}

impl Default for ZhuParams {
    fn default() -> Self {
        ZhuParams { radial: 40, angular: 64, radius: 0.9, margin: 0.05, alpha: 1.0 }
    }
}

fn zhu_facts(_: &Value) -> Result<Vec<ReferenceFact>> {
    let u = Complex64::new(0.3, -0.4);
    Ok(vec![
        ReferenceFact::at("constant 1", c(1.0), 1e-12, "normalized symbol", |_: &Point| c(1.0), Point::complex(c(0.2))),
        ReferenceFact::at("z at 0", c(0.0), 1e-12, "radial symbol", |q: &Point| q.z().unwrap_or(c(f64::NAN)), Point::complex(c(0.0))),
        ReferenceFact::new("A(u)(0) = u", u, 1e-15, "formula", move |op| op.family().apply(&Point::complex(u), &Point::complex(c(0.0))).z()),
        ReferenceFact::new("A(u)(u) = 0", c(0.0), 1e-15, "formula", move |op| op.family().apply(&Point::complex(u), &Point::complex(u)).z()),
    ])
}

// ---------------------------------------------------------------- half-plane

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HalfPlaneParams {
    pub n: usize,
    pub r_max: f64,
    pub nodes_per_axis: usize,
}

impl Default for HalfPlaneParams {
    fn default() -> Self {
        HalfPlaneParams { n: 1, r_max: 60.0, nodes_per_axis: 6000 }
    }
}

fn halfplane_facts(v: &Value) -> Result<Vec<ReferenceFact>> {
    let p: HalfPlaneParams = parse(v)?;
    Ok([Complex64::new(-0.5, 2.0), Complex64::new(1.5, 0.25)]
        .into_iter()
        .map(|z1| {
            let z: Vec<Complex64> = (0..p.n).map(|j| z1 + Complex64::new(0.1 * j as f64, 0.0)).collect();
            ReferenceFact::at(
                format!("z_1 at {z:?}"),
                z1,
                1e-4,
                "inverse moment of u e^-u is 1",
                |q: &Point| q.z().unwrap_or(c(f64::NAN)),
                Point::complex_vec(&z),
            )
        })
        .collect())
}

fn halfplane_agreement(v: &Value) -> Result<Option<AgreementSetup>> {
    let p: HalfPlaneParams = parse(v)?;
    let domain = Arc::new(if p.n == 1 { Domain::real_line(6.0, 200.0)? } else { Domain::real_box(p.n, 4.0, 40.0)? });
    let family = AutomorphismFamily::coordinate_dilation_real();
    let balls = if p.n == 1 { real_balls() } else { box_balls(p.n) };
    let candidates: Vec<Point> = (1..=40).map(|k| Point::real_vec(&vec![0.1 * k as f64; p.n])).collect();
    let params = admissible(&candidates, &family, &domain, &balls, 10);
    Ok(Some(AgreementSetup { family, domain, params, balls }))
}

fn none(_: &Value) -> Result<Option<AgreementSetup>> {
    Ok(None)
}

static ENTRIES: [CatalogEntry; 9] = [
    CatalogEntry {
        name: "determinant",
        summary: "S_n, sgn, column permutations: det on n x n matrices",
        defaults: || to_value(DeterminantParams::default()),
        build: |v| determinant_operator(parse::<DeterminantParams>(v)?.n),
        facts: determinant_facts,
        agreement: none,
    },
    CatalogEntry {
        name: "discrete_hilbert",
        summary: "2/(pi u) on odd u, translations of Z",
        defaults: || to_value(DiscreteHilbertParams::default()),
        build: |v| {
            let p: DiscreteHilbertParams = parse(v)?;
            discrete_hilbert(|_| 1.0, p.budget, p.window)
        },
        facts: discrete_hilbert_facts,
        agreement: discrete_hilbert_agreement,
    },
    CatalogEntry {
        name: "hilbert",
        summary: "1/(pi u) principal value on [-R, R], translations of R",
        defaults: || to_value(HilbertParams::default()),
        build: |v| {
            let p: HilbertParams = parse(v)?;
            hilbert_transform(p.r, p.nodes, Arc::new(Domain::real_line(p.window, p.nodes_per_unit)?))
        },
        facts: hilbert_facts,
        agreement: hilbert_agreement,
    },
    CatalogEntry {
        name: "hilbert_curve",
        summary: "1/(pi u) principal value, translations along a monomial curve in R^d",
        defaults: || to_value(CurveParams::default()),
        build: |v| {
            let p: CurveParams = parse(v)?;
            let dom = Domain::real_box(p.powers.len().max(1), p.window, p.nodes_per_unit)?;
            hilbert_along_curve(p.curve(), cauchy_kernel, p.r, p.nodes, Arc::new(dom))
        },
        facts: curve_facts,
        agreement: curve_agreement,
    },
    CatalogEntry {
        name: "cauchy_torus",
        summary: "Cauchy kernel on T^n, rotations",
        defaults: || to_value(CauchyParams::default()),
        build: |v| {
            let p: CauchyParams = parse(v)?;
            cauchy_torus(p.n, p.nodes, Arc::new(Domain::torus(p.n, p.domain_nodes)?))
        },
        facts: cauchy_facts,
        agreement: cauchy_agreement,
    },
    CatalogEntry {
        name: "convolution",
        summary: "phi = 1, translations: f * mu on R (Gaussian) or Z (point masses)",
        defaults: || to_value(ConvolutionParams::default()),
        build: |v| {
            let p: ConvolutionParams = parse(v)?;
            let dom = match p.group {
                Group::Real => Domain::real_line(p.window, p.nodes_per_unit)?,
                Group::Integer => Domain::integers(-p.integer_window, p.integer_window)?,
            };
            convolution_operator(convolution_measure(&p)?, Arc::new(dom))
        },
        facts: convolution_facts,
        agreement: convolution_agreement,
    },
    CatalogEntry {
        name: "discrete_hausdorff",
        summary: "sum_k phi(k) f(A_k x) for invertible matrices on R^d",
        defaults: || to_value(DiscreteHausdorffParams::default()),
        build: |v| {
            let p: DiscreteHausdorffParams = parse(v)?;
            let w: Vec<Complex64> = p.weights.iter().map(|&x| c(x)).collect();
            let dom = Domain::real_box(p.dim(), p.window, p.nodes_per_unit)?;
            discrete_hausdorff_rd(&p.matrices, &w, Arc::new(dom))
        },
        facts: discrete_hausdorff_facts,
        agreement: discrete_hausdorff_agreement,
    },
    CatalogEntry {
        name: "hausdorff_zhu",
        summary: "involutive Moebius maps of the unit disc, area measure",
        defaults: || to_value(ZhuParams::default()),
        build: |v| {
            let p: ZhuParams = parse(v)?;
            let omega = disc_quadrature(p.radial, p.angular, p.radius)?;
            let alpha = p.alpha;
            let raw = move |u: &Point| (1.0 - u.z().map_or(f64::NAN, |z| z.norm_sqr())).powf(alpha);
            let mass: f64 = omega.nodes().iter().zip(omega.weights()).map(|(u, w)| raw(u) * w).sum();
            hausdorff_zhu(move |u| c(raw(u) / mass), omega, p.margin)
        },
        facts: zhu_facts,
        agreement: none,
    },
    CatalogEntry {
        name: "halfplane",
        summary: "coordinate dilations of the upper half-plane power, phi = prod u e^-u",
        defaults: || to_value(HalfPlaneParams::default()),
        build: |v| {
            let p: HalfPlaneParams = parse(v)?;
            // u^4 e^-u <= 256 e^-4 bounds u e^-u by 4.7 u^-3
            let decay = DecayHypothesis { constant: 4.7, exponent: 3.0 };
            halfplane_hausdorff(gamma_symbol, halfplane_omega(p.n, p.r_max, p.nodes_per_axis, decay)?)
        },
        facts: halfplane_facts,
        agreement: halfplane_agreement,
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn find(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Descriptor(format!("unknown catalog entry {name:?}")))
}
