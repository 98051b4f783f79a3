//! Underlying spaces: points, a reference measure restricted to a finite
//! computational window, and an optional quasi-metric with its balls.

mod filter;
mod grid;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MeasureSpace;
use crate::point::Point;

pub use filter::{limit_along_filter, spread_about, FilterBase, LimitEstimate};
pub use grid::{ClosedForm, GridFunction, SpaceFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Integer,
    RealVector(usize),
    TorusAngles(usize),
    SquareMatrix(usize),
    UnitDisc,
    HalfPlanePower(usize),
}

pub type MetricFn = Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Metric {
    /// Euclidean distance on real vectors.
    Euclidean,
    /// `|j - k|` on the integers.
    Counting,
    /// Flat-torus distance from wrapped angle differences of unit complex points.
    Arc,
    Custom(MetricFn),
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Euclidean => write!(f, "Euclidean"),
            Metric::Counting => write!(f, "Counting"),
            Metric::Arc => write!(f, "Arc"),
            Metric::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuasiMetric {
    pub metric: Metric,
    /// Quasi-triangle constant: `rho(x, z) <= kappa (rho(x, y) + rho(y, z))`.
    pub kappa: f64,
}

impl QuasiMetric {
    pub fn euclidean() -> Self {
        QuasiMetric { metric: Metric::Euclidean, kappa: 1.0 }
    }

    pub fn counting() -> Self {
        QuasiMetric { metric: Metric::Counting, kappa: 1.0 }
    }

    pub fn arc() -> Self {
        QuasiMetric { metric: Metric::Arc, kappa: 1.0 }
    }

    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        match (&self.metric, a, b) {
            (Metric::Euclidean, Point::Real(x), Point::Real(y)) => {
                x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
            }
            (Metric::Counting, Point::Int(j), Point::Int(k)) => (j - k).unsigned_abs() as f64,
            (Metric::Arc, Point::Complex(x), Point::Complex(y)) => x
                .iter()
                .zip(y)
                .map(|(p, q)| {
                    // through |a - b| so that the distance is exactly symmetric
                    let d = (p.arg() - q.arg()).abs() % TAU;
                    let d = d.min(TAU - d);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            (Metric::Custom(f), a, b) => f(a, b),
            _ => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn scaled(&self, k: f64) -> Ball {
        Ball { center: self.center.clone(), radius: self.radius * k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingProfile {
    pub c_nu: f64,
    pub s: f64,
}

impl DoublingProfile {
    pub fn new(c_nu: f64) -> Result<Self> {
        if !(c_nu >= 1.0 && c_nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("doubling constant must be >= 1, got {c_nu}")));
        }
        Ok(DoublingProfile { c_nu, s: c_nu.log2() })
    }

    /// Lebesgue measure on `R^d`: `C = 2^d`, `s = d`.
    pub fn euclidean(d: usize) -> Self {
        DoublingProfile { c_nu: 2f64.powi(d as i32), s: d as f64 }
    }

    /// The extended doubling bound `C k^s` for a ball inflated by `k >= 1`.
    pub fn growth(&self, k: f64) -> f64 {
        self.c_nu * k.powf(self.s)
    }
}

/// Uniform structure of the node set, used for interpolation and window tests.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Layout {
    /// Tensor grid, row-major with the last axis fastest.
    Uniform { lo: Vec<f64>, step: Vec<f64>, counts: Vec<usize> },
    Lattice { lo: i64, hi: i64 },
    /// Angles `-π + 2πk/N` on each circle factor.
    Periodic { counts: Vec<usize> },
    None,
}

#[derive(Debug, Clone)]
pub struct Domain {
    point_kind: PointKind,
    nu: Option<MeasureSpace>,
    rho: Option<QuasiMetric>,
    layout: Layout,
    analytic_doubling: Option<f64>,
}

impl Domain {
    /// `[-half_width, half_width]` with trapezoid weights, `nodes_per_unit`
    /// nodes per unit length.
    pub fn real_line(half_width: f64, nodes_per_unit: f64) -> Result<Self> {
        Self::real_box(1, half_width, nodes_per_unit)
    }

    /// `[-half_width, half_width]^d` with tensor trapezoid weights.
    pub fn real_box(d: usize, half_width: f64, nodes_per_unit: f64) -> Result<Self> {
        if d == 0 || !(half_width > 0.0) || !(nodes_per_unit > 0.0) {
            return Err(Error::InvalidParameter("real box needs d >= 1 and positive sizes".into()));
        }
        let n = (2.0 * half_width * nodes_per_unit).round() as usize + 1;
        let axis = MeasureSpace::trapezoid(-half_width, half_width, n)?;
        let nu = MeasureSpace::product(&vec![axis; d])?;
        let step = 2.0 * half_width / (n - 1) as f64;
        Ok(Domain {
            point_kind: PointKind::RealVector(d),
            nu: Some(nu),
            rho: Some(QuasiMetric::euclidean()),
            layout: Layout::Uniform { lo: vec![-half_width; d], step: vec![step; d], counts: vec![n; d] },
            analytic_doubling: Some(2f64.powi(d as i32)),
        })
    }

    /// Integers `lo..=hi` with counting measure and metric `|j - k|`.
    pub fn integers(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidParameter(format!("empty integer window [{lo}, {hi}]")));
        }
        let nu = MeasureSpace::counting((lo..=hi).map(Point::Int).collect())?;
        Ok(Domain {
            point_kind: PointKind::Integer,
            nu: Some(nu),
            rho: Some(QuasiMetric::counting()),
            layout: Layout::Lattice { lo, hi },
            analytic_doubling: None,
        })
    }

    /// `T^n` as unit complex vectors, with angle (Lebesgue) measure and the
    /// flat-torus arc metric. `nodes_per_circle` equispaced angles per factor.
    pub fn torus(n: usize, nodes_per_circle: usize) -> Result<Self> {
        if n == 0 || nodes_per_circle < 2 {
            return Err(Error::InvalidParameter("torus needs n >= 1 and >= 2 nodes per circle".into()));
        }
        let angles = MeasureSpace::product(&vec![MeasureSpace::circle(nodes_per_circle)?; n])?;
        let nodes = angles
            .nodes()
            .iter()
            .map(|p| {
                let th = p.as_real().expect("angles are real");
                Point::complex_vec(&th.iter().map(|&t| Complex64::from_polar(1.0, t)).collect::<Vec<_>>())
            })
            .collect();
        let nu = MeasureSpace::discrete(nodes, angles.weights().to_vec())?;
        Ok(Domain {
            point_kind: PointKind::TorusAngles(n),
            nu: Some(nu),
            rho: Some(QuasiMetric::arc()),
            layout: Layout::Periodic { counts: vec![nodes_per_circle; n] },
            analytic_doubling: Some(2f64.powi(n as i32)),
        })
    }

    /// Bare point kind with no measure and no metric (matrices, disc, half-plane).
    pub fn bare(point_kind: PointKind) -> Self {
        Domain { point_kind, nu: None, rho: None, layout: Layout::None, analytic_doubling: None }
    }

    pub fn with_metric(mut self, rho: QuasiMetric) -> Self {
        self.rho = Some(rho);
        self
    }

    /// Rescales the reference measure to total mass one.
    pub fn normalized(mut self) -> Result<Self> {
        let nu = self.nu.take().ok_or(Error::NoMeasure)?;
        let mass = nu.total_mass();
        self.nu = Some(nu.scaled(1.0 / mass)?);
        Ok(self)
    }

    pub fn point_kind(&self) -> PointKind {
        self.point_kind
    }

    pub fn nu(&self) -> Result<&MeasureSpace> {
        self.nu.as_ref().ok_or(Error::NoMeasure)
    }

    pub fn rho(&self) -> Result<&QuasiMetric> {
        self.rho.as_ref().ok_or(Error::NoMetric)
    }

    pub fn has_measure(&self) -> bool {
        self.nu.is_some()
    }

    pub fn analytic_doubling(&self) -> Option<f64> {
        self.analytic_doubling
    }

    pub fn nodes(&self) -> Result<&[Point]> {
        Ok(self.nu()?.nodes())
    }

    pub fn weights(&self) -> Result<&[f64]> {
        Ok(self.nu()?.weights())
    }

    pub fn node_count(&self) -> usize {
        self.nu.as_ref().map_or(0, |n| n.len())
    }

    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.nu()?.total_mass())
    }

    /// Smallest node spacing, the resolution of ball and interpolation tests.
    pub fn resolution(&self) -> f64 {
        match &self.layout {
            Layout::Uniform { step, .. } => step.iter().copied().fold(f64::INFINITY, f64::min),
            Layout::Lattice { .. } => 1.0,
            Layout::Periodic { counts } => TAU / counts.iter().copied().max().unwrap_or(1) as f64,
            Layout::None => f64::NAN,
        }
    }

    pub(crate) fn layout(&self) -> &Layout {
        &self.layout
    }

    /// `nu`-mass of the nodes strictly inside the ball.
    pub fn ball_measure(&self, b: &Ball) -> Result<f64> {
        let rho = self.rho()?;
        let nu = self.nu()?;
        let nodes = nu.nodes();
        let weights = nu.weights();
        // fixed chunks summed in order keep the result independent of the thread count
        let partial: Vec<f64> = nodes
            .par_chunks(4096)
            .zip(weights.par_chunks(4096))
            .map(|(ns, ws)| ns.iter().zip(ws).filter(|(x, _)| rho.distance(&b.center, x) < b.radius).map(|(_, w)| w).sum())
            .collect();
        Ok(partial.iter().sum())
    }

    /// Indices of the nodes strictly inside the ball.
    pub fn ball_nodes(&self, b: &Ball) -> Result<Vec<usize>> {
        let rho = self.rho()?;
        let nodes = self.nodes()?;
        Ok((0..nodes.len())
            .filter(|&i| rho.distance(&b.center, &nodes[i]) < b.radius)
            .collect())
    }

    /// Whether a ball lies inside the computational window.
    pub fn contains_ball(&self, b: &Ball) -> bool {
        match (&self.layout, &b.center) {
            (Layout::Uniform { lo, step, counts }, Point::Real(c)) => {
                c.len() == lo.len()
                    && c.iter().zip(lo.iter().zip(step.iter().zip(counts))).all(|(&x, (&l, (&h, &n)))| {
                        let hi = l + h * (n - 1) as f64;
                        x - b.radius >= l - 1e-12 && x + b.radius <= hi + 1e-12
                    })
            }
            (Layout::Lattice { lo, hi }, Point::Int(k)) => {
                (*k as f64) - b.radius >= *lo as f64 - 1.0 && (*k as f64) + b.radius <= *hi as f64 + 1.0
            }
            (Layout::Periodic { .. }, Point::Complex(_)) => true,
            _ => false,
        }
    }

    /// Whether node `i` sits on the outer layer of a bounded window.
    pub fn is_boundary_node(&self, i: usize) -> bool {
        match &self.layout {
            Layout::Uniform { counts, .. } => {
                let mut rest = i;
                for &n in counts.iter().rev() {
                    let j = rest % n;
                    if j == 0 || j == n - 1 {
                        return true;
                    }
                    rest /= n;
                }
                false
            }
            Layout::Lattice { lo, hi } => i == 0 || i as i64 == hi - lo,
            Layout::Periodic { .. } | Layout::None => false,
        }
    }

    /// Empirical doubling constant: the largest `nu(B(x, 2r)) / nu(B(x, r))`
    /// over the sample balls.
    pub fn estimate_doubling(&self, sample_balls: &[Ball]) -> Result<DoublingProfile> {
        self.rho()?;
        self.nu()?;
        if sample_balls.is_empty() {
            return Err(Error::InvalidParameter("no sample balls".into()));
        }
        let mut c: f64 = 1.0;
        for b in sample_balls {
            let double = b.scaled(2.0);
            if !self.contains_ball(&double) {
                return Err(Error::WindowEscape(format!(
                    "doubled ball B({}, {}) leaves the window",
                    b.center, double.radius
                )));
            }
            let small = self.ball_measure(b)?;
            if small <= 0.0 {
                return Err(Error::EmptyBall { center: b.center.to_string(), radius: b.radius });
            }
            c = c.max(self.ball_measure(&double)? / small);
        }
        DoublingProfile::new(c)
    }

    /// Largest `nu(B(x, k r)) / (C k^s nu(B(x, r)))` over the sample balls and
    /// inflation factors. At most 1 when the extended doubling bound holds.
    pub fn extended_doubling_ratio(&self, profile: &DoublingProfile, sample_balls: &[Ball], ks: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for b in sample_balls {
            let small = self.ball_measure(b)?;
            if small <= 0.0 {
                return Err(Error::EmptyBall { center: b.center.to_string(), radius: b.radius });
            }
            for &k in ks {
                let big = b.scaled(k);
                if !self.contains_ball(&big) {
                    return Err(Error::WindowEscape(format!("B({}, {}) leaves the window", b.center, big.radius)));
                }
                worst = worst.max(self.ball_measure(&big)? / (profile.growth(k) * small));
            }
        }
        Ok(worst)
    }

    /// `(sum_x w(x) |v(x)|^p)^(1/p)` over the nodes; `p = inf` gives the max.
    pub fn lp_norm(&self, values: &[Complex64], p: f64) -> Result<f64> {
        let w = self.weights()?;
        if values.len() != w.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for {} nodes",
                values.len(),
                w.len()
            )));
        }
        Ok(lp_norm_weighted(values, w, p))
    }

    /// `sum_x w(x) v(x)`.
    pub fn integral(&self, values: &[Complex64]) -> Result<Complex64> {
        let w = self.weights()?;
        if values.len() != w.len() {
            return Err(Error::InvalidParameter("value/node count mismatch".into()));
        }
        Ok(values.iter().zip(w).map(|(v, &wi)| v * wi).sum())
    }

    pub fn from_descriptor(desc: &DomainDescriptor) -> Result<Self> {
        let dom = match desc.point_kind {
            PointKind::Integer => {
                let k = desc.window.round() as i64;
                Domain::integers(-k, k)?
            }
            PointKind::RealVector(d) => Domain::real_box(d, desc.window, desc.nodes_per_unit)?,
            PointKind::TorusAngles(n) => Domain::torus(n, desc.nodes_per_unit.round() as usize)?,
            other => Domain::bare(other),
        };
        match desc.metric.as_deref() {
            None => Ok(dom),
            Some("euclidean") if matches!(dom.point_kind, PointKind::RealVector(_)) => Ok(dom),
            Some("counting") if dom.point_kind == PointKind::Integer => Ok(dom),
            Some("arc") if matches!(dom.point_kind, PointKind::TorusAngles(_)) => Ok(dom),
            Some(m) => Err(Error::Descriptor(format!(
                "metric {m:?} is not available on {:?}",
                desc.point_kind
            ))),
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let desc: DomainDescriptor = serde_json::from_str(json)?;
        Self::from_descriptor(&desc)
    }
}

pub(crate) fn lp_norm_weighted(values: &[Complex64], weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else if p == 1.0 {
        values.iter().zip(weights).map(|(v, w)| v.norm() * w).sum()
    } else {
        values
            .iter()
            .zip(weights)
            .map(|(v, w)| v.norm().powf(p) * w)
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// JSON form: `{"point_kind": ..., "window": W, "nodes_per_unit": n, "metric": "euclidean"}`.
///
/// `window` is the half-width of the real box or the integer window `[-W, W]`;
/// for tori `nodes_per_unit` is the node count per circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainDescriptor {
    pub point_kind: PointKind,
    #[serde(default)]
    pub window: f64,
    #[serde(default)]
    pub nodes_per_unit: f64,
    #[serde(default)]
    pub metric: Option<String>,
}

/// Evenly spread sample balls of one radius, with centers on a small grid
/// around the origin; used by the doubling estimator.
pub fn sample_balls(dom: &Domain, radii: &[f64], centers_per_axis: usize) -> Vec<Ball> {
    let mut out = Vec::new();
    let offsets: Vec<f64> = (0..centers_per_axis)
        .map(|i| if centers_per_axis == 1 { 0.0 } else { -0.5 + i as f64 / (centers_per_axis - 1) as f64 })
        .collect();
    for &r in radii {
        match dom.point_kind {
            PointKind::RealVector(d) => {
                let total = centers_per_axis.pow(d as u32);
                for idx in 0..total {
                    let mut c = Vec::with_capacity(d);
                    let mut rest = idx;
                    for _ in 0..d {
                        c.push(offsets[rest % centers_per_axis] * r);
                        rest /= centers_per_axis;
                    }
                    out.push(Ball { center: Point::real_vec(&c), radius: r });
                }
            }
            PointKind::Integer => {
                for (i, _) in offsets.iter().enumerate() {
                    out.push(Ball { center: Point::Int(i as i64 - (centers_per_axis / 2) as i64), radius: r });
                }
            }
            PointKind::TorusAngles(n) => {
                for &o in &offsets {
                    let z = Complex64::from_polar(1.0, o * PI);
                    out.push(Ball { center: Point::complex_vec(&vec![z; n]), radius: r });
                }
            }
            _ => {}
        }
    }
    out
}
