//! Parameter measure spaces and the integration engine.
//!
//! Every measure is carried by an ordered node list with strictly positive
//! weights. Principal-value spaces additionally group their nodes into
//! mirror-symmetric blocks around a declared singularity; each block is
//! summed jointly before it enters the accumulator, so odd integrands cancel
//! exactly. A principal-value space may carry a refined layout with half the
//! exclusion width, in which case the result is Richardson-extrapolated to a
//! vanishing exclusion window.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    DiscreteWeighted,
    QuadratureContinuum,
    PrincipalValueContinuum,
}

/// `|g(u)| <= constant * |u|^(-exponent)` beyond the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayHypothesis {
    pub constant: f64,
    pub exponent: f64,
}

/// What was cut away to make the node set finite.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// `|u| <= radius` for unbounded continua, `|u| <= K` for infinite sums.
    pub radius: Option<f64>,
    /// Number of discarded tails (2 for the whole line, 1 for a half-line).
    pub tails: u32,
    /// Half-width of the window excluded around each singularity.
    pub exclusion: Option<f64>,
    pub decay: Option<DecayHypothesis>,
}

impl Truncation {
    /// Bound on the discarded tails under the decay hypothesis.
    ///
    /// The same expression covers continua and lattice sums, since
    /// `sum_{u > K} u^-b <= int_K^inf t^-b dt`.
    pub fn tail_estimate(&self) -> f64 {
        match (self.radius, self.decay) {
            (Some(r), Some(d)) if d.exponent > 1.0 && r > 0.0 => {
                f64::from(self.tails) * d.constant.abs() * r.powf(1.0 - d.exponent)
                    / (d.exponent - 1.0)
            }
            (Some(_), Some(_)) => f64::INFINITY,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationReport {
    pub value: Complex64,
    pub tail_estimate: f64,
    pub nodes_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    kind: MeasureKind,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    /// Sizes of consecutive node blocks summed jointly. Empty means singletons.
    groups: Vec<usize>,
    singularities: Vec<Point>,
    truncation: Truncation,
    /// Same space with half the exclusion width (principal-value only).
    refined: Option<Box<MeasureSpace>>,
}

impl MeasureSpace {
    /// Weighted discrete measure `sum_u w(u) delta_u`.
    pub fn discrete(nodes: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        let space = MeasureSpace {
            kind: MeasureKind::DiscreteWeighted,
            nodes,
            weights,
            groups: Vec::new(),
            singularities: Vec::new(),
            truncation: Truncation::default(),
            refined: None,
        };
        space.validate()?;
        Ok(space)
    }

    pub fn counting(nodes: Vec<Point>) -> Result<Self> {
        let weights = vec![1.0; nodes.len()];
        Self::discrete(nodes, weights)
    }

    /// Integers `-k..=k` with weights `p(u)`; records the term budget.
    pub fn lattice(k: i64, weight: impl Fn(i64) -> f64) -> Result<Self> {
        let nodes: Vec<Point> = (-k..=k).map(Point::Int).collect();
        let weights = (-k..=k).map(weight).collect();
        let mut space = Self::discrete(nodes, weights)?;
        space.truncation.radius = Some(k as f64);
        space.truncation.tails = 2;
        Ok(space)
    }

    /// Composite trapezoid rule on `[a, b]` with `n >= 2` nodes.
    pub fn trapezoid(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(Error::InvalidParameter(format!(
                "trapezoid needs n >= 2 and a < b (got n={n}, [{a}, {b}])"
            )));
        }
        let h = (b - a) / (n - 1) as f64;
        let nodes = (0..n).map(|i| Point::real(a + h * i as f64)).collect();
        let weights = (0..n)
            .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect();
        Self::continuum(nodes, weights)
    }

    /// Midpoint rule on `[a, b]`; never places a node on an endpoint.
    pub fn midpoint(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 || !(b > a) {
            return Err(Error::InvalidParameter(format!(
                "midpoint needs n >= 1 and a < b (got n={n}, [{a}, {b}])"
            )));
        }
        let h = (b - a) / n as f64;
        let nodes = (0..n).map(|i| Point::real(a + h * (i as f64 + 0.5))).collect();
        Self::continuum(nodes, vec![h; n])
    }

    /// Periodic trapezoid rule for `d theta` on the circle, angles in `[-π, π)`.
    pub fn circle(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("circle needs n >= 1".into()));
        }
        let h = TAU / n as f64;
        let nodes = (0..n).map(|i| Point::real(-PI + h * i as f64)).collect();
        Self::continuum(nodes, vec![h; n])
    }

    fn continuum(nodes: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        let mut s = Self::discrete(nodes, weights)?;
        s.kind = MeasureKind::QuadratureContinuum;
        Ok(s)
    }

    /// Principal-value layout on `[s - half_width, s + half_width]` around the
    /// singularity `s`, excluding `(s - eps, s + eps)`.
    ///
    /// `pairs` mirror pairs `s ± t_k` sit at the midpoints of a uniform grid on
    /// `[eps, half_width]`. With `richardson` set, a refined layout at `eps / 2`
    /// is attached and `integrate` returns `2 I(eps/2) - I(eps)`.
    pub fn principal_value(
        singularity: f64,
        half_width: f64,
        pairs: usize,
        eps: f64,
        richardson: bool,
    ) -> Result<Self> {
        let primary = Self::pv_layout(singularity, half_width, pairs, eps)?;
        if richardson {
            if !(eps > 0.0) {
                return Err(Error::InvalidParameter(
                    "Richardson extrapolation needs a positive exclusion width".into(),
                ));
            }
            let refined = Self::pv_layout(singularity, half_width, pairs, 0.5 * eps)?;
            Ok(primary.with_refined(refined))
        } else {
            Ok(primary)
        }
    }

    fn pv_layout(s: f64, half_width: f64, pairs: usize, eps: f64) -> Result<Self> {
        if pairs == 0 || !(half_width > eps) || eps < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "principal value needs pairs >= 1 and 0 <= eps < half_width (got {pairs}, {eps}, {half_width})"
            )));
        }
        let h = (half_width - eps) / pairs as f64;
        let mut nodes = Vec::with_capacity(2 * pairs);
        for k in 0..pairs {
            let t = eps + h * (k as f64 + 0.5);
            nodes.push(Point::real(s + t));
            nodes.push(Point::real(s - t));
        }
        let mut space = Self::discrete(nodes, vec![h; 2 * pairs])?;
        space.kind = MeasureKind::PrincipalValueContinuum;
        space.groups = vec![2; pairs];
        space.singularities = vec![Point::real(s)];
        space.truncation = Truncation {
            radius: Some(half_width),
            tails: 2,
            exclusion: Some(eps),
            decay: None,
        };
        Ok(space)
    }

    /// Periodic principal-value layout on the circle with the pole at angle 0.
    ///
    /// `n` (even) equispaced angles `±(k + 1/2) 2π/n`; the node at angle 0 is
    /// excluded and each mirror pair is summed jointly. On periodic integrands
    /// this is the shifted periodic trapezoid rule.
    pub fn principal_value_circle(n: usize) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "circle principal value needs an even node count, got {n}"
            )));
        }
        let h = TAU / n as f64;
        let mut space = Self::pv_layout(0.0, PI, n / 2, 0.0)?;
        debug_assert!((space.weights[0] - h).abs() < 1e-15);
        space.truncation = Truncation {
            exclusion: Some(0.5 * h),
            ..Truncation::default()
        };
        Ok(space)
    }

    /// Principal-value layout on `[a, b]` with any number of singularities.
    ///
    /// The interval is split halfway between neighbouring singularities; each
    /// piece gets a symmetric window around its singularity plus a midpoint
    /// rule on the asymmetric remainder. About `nodes` nodes overall.
    pub fn principal_value_interval(
        a: f64,
        b: f64,
        nodes: usize,
        singularities: &[f64],
        eps: f64,
        richardson: bool,
    ) -> Result<Self> {
        let primary = Self::pv_interval_layout(a, b, nodes, singularities, eps)?;
        if richardson {
            let refined = Self::pv_interval_layout(a, b, nodes, singularities, 0.5 * eps)?;
            Ok(primary.with_refined(refined))
        } else {
            Ok(primary)
        }
    }

    fn pv_interval_layout(
        a: f64,
        b: f64,
        total: usize,
        singularities: &[f64],
        eps: f64,
    ) -> Result<Self> {
        if !(b > a) || total < 2 {
            return Err(Error::InvalidParameter(format!("bad interval [{a}, {b}]")));
        }
        let mut sing: Vec<f64> = singularities.to_vec();
        sing.sort_by(f64::total_cmp);
        if sing.is_empty() {
            let mut s = Self::midpoint(a, b, total)?;
            s.kind = MeasureKind::PrincipalValueContinuum;
            return Ok(s);
        }
        if sing.iter().any(|&s| !(s > a && s < b)) {
            return Err(Error::InvalidParameter(
                "singularities must lie strictly inside the interval".into(),
            ));
        }
        let h = (b - a) / total as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut groups = Vec::new();
        let push_singles = |lo: f64, hi: f64, nodes: &mut Vec<Point>, weights: &mut Vec<f64>, groups: &mut Vec<usize>| {
            if hi - lo <= 0.0 {
                return;
            }
            let n = ((hi - lo) / h).round().max(1.0) as usize;
            let hh = (hi - lo) / n as f64;
            for i in 0..n {
                nodes.push(Point::real(lo + hh * (i as f64 + 0.5)));
                weights.push(hh);
                groups.push(1);
            }
        };
        for (i, &s) in sing.iter().enumerate() {
            let lo = if i == 0 { a } else { 0.5 * (sing[i - 1] + s) };
            let hi = if i + 1 == sing.len() { b } else { 0.5 * (s + sing[i + 1]) };
            let half = (s - lo).min(hi - s);
            if !(half > eps) {
                return Err(Error::InvalidParameter(format!(
                    "exclusion width {eps} exceeds the symmetric window around {s}"
                )));
            }
            push_singles(lo, s - half, &mut nodes, &mut weights, &mut groups);
            let pairs = ((half - eps) / h).round().max(1.0) as usize;
            let hp = (half - eps) / pairs as f64;
            for k in 0..pairs {
                let t = eps + hp * (k as f64 + 0.5);
                nodes.push(Point::real(s + t));
                nodes.push(Point::real(s - t));
                weights.extend([hp, hp]);
                groups.push(2);
            }
            push_singles(s + half, hi, &mut nodes, &mut weights, &mut groups);
        }
        let space = MeasureSpace {
            kind: MeasureKind::PrincipalValueContinuum,
            nodes,
            weights,
            groups,
            singularities: sing.into_iter().map(Point::real).collect(),
            truncation: Truncation {
                exclusion: Some(eps),
                ..Truncation::default()
            },
            refined: None,
        };
        space.validate()?;
        Ok(space)
    }

    /// Tensor product of one-dimensional real spaces; node coordinates are
    /// concatenated and joint-summation blocks multiply out.
    pub fn product(factors: &[MeasureSpace]) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Err(Error::InvalidParameter("empty product".into()));
        };
        let mut acc = first.clone();
        for f in &factors[1..] {
            acc = acc.times(f)?;
        }
        Ok(acc)
    }

    fn times(&self, other: &MeasureSpace) -> Result<Self> {
        let lg = self.group_sizes();
        let rg = other.group_sizes();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut groups = Vec::new();
        let mut li = 0;
        for &ls in &lg {
            let mut ri = 0;
            for &rs in &rg {
                for a in li..li + ls {
                    for b in ri..ri + rs {
                        let mut coords: Vec<f64> = self.nodes[a].as_real()?.to_vec();
                        coords.extend_from_slice(other.nodes[b].as_real()?);
                        nodes.push(Point::real_vec(&coords));
                        weights.push(self.weights[a] * other.weights[b]);
                    }
                }
                groups.push(ls * rs);
                ri += rs;
            }
            li += ls;
        }
        let pv = self.kind == MeasureKind::PrincipalValueContinuum
            || other.kind == MeasureKind::PrincipalValueContinuum;
        let kind = if pv {
            MeasureKind::PrincipalValueContinuum
        } else if self.kind == MeasureKind::DiscreteWeighted && other.kind == MeasureKind::DiscreteWeighted {
            MeasureKind::DiscreteWeighted
        } else {
            MeasureKind::QuadratureContinuum
        };
        let singularities = product_singularities(self, other)?;
        let refined = match (&self.refined, &other.refined) {
            (None, None) => None,
            (l, r) => {
                let l = l.as_deref().unwrap_or(self);
                let r = r.as_deref().unwrap_or(other);
                Some(Box::new(l.times(r)?))
            }
        };
        let space = MeasureSpace {
            kind,
            nodes,
            weights,
            groups: if groups.iter().all(|&g| g == 1) { Vec::new() } else { groups },
            singularities,
            truncation: Truncation {
                exclusion: self.truncation.exclusion.or(other.truncation.exclusion),
                ..Truncation::default()
            },
            refined,
        };
        space.validate()?;
        Ok(space)
    }

    fn with_refined(mut self, refined: MeasureSpace) -> Self {
        self.refined = Some(Box::new(refined));
        self
    }

    /// Multiplies every weight by a strictly positive density.
    pub fn with_density(mut self, density: impl Fn(&Point) -> f64 + Copy) -> Result<Self> {
        for (w, u) in self.weights.iter_mut().zip(&self.nodes) {
            *w *= density(u);
        }
        if let Some(r) = self.refined.take() {
            self.refined = Some(Box::new(r.with_density(density)?));
        }
        self.validate()?;
        Ok(self)
    }

    /// Scales all weights by `c > 0`.
    pub fn scaled(self, c: f64) -> Result<Self> {
        self.with_density(move |_| c)
    }

    pub fn with_decay(mut self, decay: DecayHypothesis) -> Self {
        self.truncation.decay = Some(decay);
        if let Some(r) = self.refined.as_deref_mut() {
            r.truncation.decay = Some(decay);
        }
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    /// Declares singularities for an explicitly built layout; checked by `validate`.
    pub fn with_singularities(mut self, groups: Vec<usize>, singularities: Vec<Point>) -> Result<Self> {
        self.kind = MeasureKind::PrincipalValueContinuum;
        self.groups = groups;
        self.singularities = singularities;
        self.validate()?;
        Ok(self)
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn truncation(&self) -> &Truncation {
        &self.truncation
    }

    pub fn singularities(&self) -> &[Point] {
        &self.singularities
    }

    pub fn refined(&self) -> Option<&MeasureSpace> {
        self.refined.as_deref()
    }

    /// Nodes available across the primary and refined layouts.
    pub fn node_count(&self) -> usize {
        self.nodes.len() + self.refined.as_ref().map_or(0, |r| r.len())
    }

    /// Every node of every layout, primary first.
    pub fn all_nodes(&self) -> impl Iterator<Item = &Point> {
        self.nodes
            .iter()
            .chain(self.refined.iter().flat_map(|r| r.nodes.iter()))
    }

    fn group_sizes(&self) -> Vec<usize> {
        if self.groups.is_empty() {
            vec![1; self.nodes.len()]
        } else {
            self.groups.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.len() != self.weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} nodes but {} weights",
                self.nodes.len(),
                self.weights.len()
            )));
        }
        if let Some(i) = self.weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight {i} is not strictly positive and finite"
            )));
        }
        if !self.groups.is_empty() && self.groups.iter().sum::<usize>() != self.nodes.len() {
            return Err(Error::InvalidParameter("group sizes do not cover the node list".into()));
        }
        if self.kind == MeasureKind::PrincipalValueContinuum {
            self.check_symmetry()?;
        }
        Ok(())
    }

    /// Every multi-node block must have equal weights and be centered on a
    /// declared singularity.
    fn check_symmetry(&self) -> Result<()> {
        let mut start = 0;
        for (g, &size) in self.groups.iter().enumerate() {
            if size > 1 {
                let block = &self.nodes[start..start + size];
                let w = &self.weights[start..start + size];
                let w0 = w[0];
                if w.iter().any(|&x| (x - w0).abs() > 1e-12 * w0) {
                    return Err(Error::SingularityMismatch { group: g });
                }
                let center = block_center(block).ok_or(Error::SingularityMismatch { group: g })?;
                let scale = block_scale(block, &center).max(1.0);
                let hit = self
                    .singularities
                    .iter()
                    .any(|s| point_distance(s, &center).is_some_and(|d| d <= 1e-9 * scale));
                if !hit {
                    return Err(Error::SingularityMismatch { group: g });
                }
            }
            start += size;
        }
        Ok(())
    }

    /// `sum_u g(u) w(u)`, with joint summation of principal-value blocks and
    /// Richardson extrapolation when a refined layout is attached.
    pub fn integrate(&self, g: impl Fn(&Point) -> Complex64) -> Result<IntegrationReport> {
        self.try_integrate(|u| Ok(g(u)))
    }

    pub fn try_integrate(&self, g: impl Fn(&Point) -> Result<Complex64>) -> Result<IntegrationReport> {
        let coarse = self.sum_layout(&g)?;
        let tail_estimate = self.truncation.tail_estimate();
        match &self.refined {
            None => Ok(IntegrationReport {
                value: coarse,
                tail_estimate,
                nodes_used: self.nodes.len(),
            }),
            Some(fine) => {
                let finer = fine.sum_layout(&g)?;
                Ok(IntegrationReport {
                    value: 2.0 * finer - coarse,
                    tail_estimate,
                    nodes_used: self.node_count(),
                })
            }
        }
    }

    /// Plain single-layout sum, ignoring any refined layout.
    pub fn integrate_unextrapolated(&self, g: impl Fn(&Point) -> Complex64) -> Result<Complex64> {
        self.sum_layout(&|u: &Point| Ok(g(u)))
    }

    fn sum_layout(&self, g: &dyn Fn(&Point) -> Result<Complex64>) -> Result<Complex64> {
        let mut acc = CascadeSum::default();
        let eval = |i: usize| -> Result<Complex64> {
            let v = g(&self.nodes[i])?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteSample { index: i });
            }
            Ok(v * self.weights[i])
        };
        if self.groups.is_empty() {
            for i in 0..self.nodes.len() {
                acc.push(eval(i)?);
            }
        } else {
            let mut start = 0;
            for &size in &self.groups {
                let mut block = Complex64::new(0.0, 0.0);
                for i in start..start + size {
                    block += eval(i)?;
                }
                acc.push(block);
                start += size;
            }
        }
        Ok(acc.total())
    }

    /// `integrate(1)`: the mass of the represented region.
    pub fn total_mass(&self) -> f64 {
        self.integrate(|_| Complex64::new(1.0, 0.0))
            .map(|r| r.value.re)
            .unwrap_or(f64::NAN)
    }

    pub fn from_descriptor(desc: &MeasureDescriptor) -> Result<Self> {
        let [a, b] = desc.interval;
        let base = match desc.kind {
            MeasureKind::DiscreteWeighted => {
                let (lo, hi) = (a.round() as i64, b.round() as i64);
                let nodes: Vec<Point> = (lo..=hi).map(Point::Int).collect();
                let n = nodes.len();
                Self::discrete(nodes, vec![1.0; n])?
            }
            MeasureKind::QuadratureContinuum => Self::trapezoid(a, b, desc.nodes)?,
            MeasureKind::PrincipalValueContinuum => Self::principal_value_interval(
                a,
                b,
                desc.nodes,
                &desc.singularities,
                desc.exclusion.unwrap_or(0.0),
                desc.richardson && desc.exclusion.is_some_and(|e| e > 0.0),
            )?,
        };
        match &desc.weights {
            WeightSpec::Uniform(_) => Ok(base),
            WeightSpec::Explicit(w) => {
                if w.len() != base.len() || base.refined.is_some() {
                    return Err(Error::Descriptor(format!(
                        "explicit weights need exactly {} entries and no refined layout",
                        base.len()
                    )));
                }
                let mut s = base;
                s.weights = w.clone();
                s.validate()?;
                Ok(s)
            }
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let desc: MeasureDescriptor = serde_json::from_str(json)?;
        Self::from_descriptor(&desc)
    }
}

fn product_singularities(l: &MeasureSpace, r: &MeasureSpace) -> Result<Vec<Point>> {
    let ls = if l.singularities.is_empty() { None } else { Some(&l.singularities) };
    let rs = if r.singularities.is_empty() { None } else { Some(&r.singularities) };
    let mut out = Vec::new();
    match (ls, rs) {
        (None, None) => {}
        (Some(ls), Some(rs)) => {
            for a in ls {
                for b in rs {
                    let mut c = a.as_real()?.to_vec();
                    c.extend_from_slice(b.as_real()?);
                    out.push(Point::real_vec(&c));
                }
            }
        }
        // A one-sided singular factor is singular along a hyperplane; its
        // mirror blocks are centered on whatever coordinate the regular
        // factor contributes, so the center check is done per block instead.
        _ => {
            return Err(Error::InvalidParameter(
                "products require either no factor or every factor to be singular".into(),
            ))
        }
    }
    Ok(out)
}

fn block_center(block: &[Point]) -> Option<Point> {
    match &block[0] {
        Point::Real(first) => {
            let mut c = vec![0.0; first.len()];
            for p in block {
                let v = p.as_real().ok()?;
                for (ci, vi) in c.iter_mut().zip(v) {
                    *ci += vi;
                }
            }
            let n = block.len() as f64;
            Some(Point::real_vec(&c.iter().map(|x| x / n).collect::<Vec<_>>()))
        }
        Point::Int(_) => {
            let sum: i64 = block.iter().map(|p| p.as_int().unwrap_or(0)).sum();
            Some(Point::real(sum as f64 / block.len() as f64))
        }
        _ => None,
    }
}

fn block_scale(block: &[Point], center: &Point) -> f64 {
    block
        .iter()
        .filter_map(|p| point_distance(p, center))
        .fold(0.0, f64::max)
}

fn point_distance(a: &Point, b: &Point) -> Option<f64> {
    let coords = |p: &Point| -> Option<Vec<f64>> {
        match p {
            Point::Real(v) => Some(v.to_vec()),
            Point::Int(k) => Some(vec![*k as f64]),
            _ => None,
        }
    };
    let (x, y) = (coords(a)?, coords(b)?);
    if x.len() != y.len() {
        return None;
    }
    Some(x.iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt())
}

/// Blocked pairwise summation with a fixed reduction tree: blocks of 64
/// values are summed left to right, then combined as a binary counter.
#[derive(Default)]
struct CascadeSum {
    block: Complex64,
    in_block: usize,
    /// `levels[k]` holds a partial sum of `2^k` blocks, if occupied.
    levels: Vec<Option<Complex64>>,
}

impl CascadeSum {
    const BLOCK: usize = 64;

    fn push(&mut self, v: Complex64) {
        self.block += v;
        self.in_block += 1;
        if self.in_block == Self::BLOCK {
            let b = std::mem::take(&mut self.block);
            self.in_block = 0;
            self.carry(b);
        }
    }

    fn carry(&mut self, mut v: Complex64) {
        for slot in self.levels.iter_mut() {
            match slot.take() {
                Some(prev) => v += prev,
                None => {
                    *slot = Some(v);
                    return;
                }
            }
        }
        self.levels.push(Some(v));
    }

    fn total(self) -> Complex64 {
        let mut t = self.block;
        for v in self.levels.into_iter().flatten() {
            t += v;
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Uniform(UniformTag),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformTag {
    Uniform,
}

/// JSON form: `{"kind": "...", "interval": [a, b], "nodes": N,
/// "singularities": [...], "weights": "uniform" | [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDescriptor {
    pub kind: MeasureKind,
    pub interval: [f64; 2],
    #[serde(default)]
    pub nodes: usize,
    #[serde(default)]
    pub singularities: Vec<f64>,
    #[serde(default = "default_weights")]
    pub weights: WeightSpec,
    #[serde(default)]
    pub exclusion: Option<f64>,
    #[serde(default)]
    pub richardson: bool,
}

fn default_weights() -> WeightSpec {
    WeightSpec::Uniform(UniformTag::Uniform)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn discrete_sum_of_identity() {
        let s = MeasureSpace::counting((1..=3).map(Point::Int).collect()).unwrap();
        let r = s.integrate(|u| c(u.as_int().unwrap() as f64)).unwrap();
        assert_eq!(r.value, c(6.0));
        assert_eq!(r.nodes_used, 3);
        assert_eq!(r.tail_estimate, 0.0);
    }

    #[test]
    fn odd_integrand_cancels_exactly() {
        let s = MeasureSpace::principal_value(0.0, 1.0, 500, 1e-3, false).unwrap();
        let r = s.integrate(|u| c(1.0 / u.x().unwrap())).unwrap();
        assert_eq!(r.value, c(0.0));
    }

    #[test]
    fn total_masses() {
        let abc = MeasureSpace::counting(vec![Point::Int(0), Point::Int(1), Point::Int(2)]).unwrap();
        assert_eq!(abc.total_mass(), 3.0);
        let unit = MeasureSpace::trapezoid(0.0, 1.0, 100).unwrap();
        assert!((unit.total_mass() - 1.0).abs() < 1e-12);
        let circle = MeasureSpace::circle(1000).unwrap();
        assert!((circle.total_mass() - TAU).abs() < 1e-10);
        let pv = MeasureSpace::principal_value(0.0, 3.0, 100, 0.2, true).unwrap();
        assert!((pv.total_mass() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_weights() {
        let e = MeasureSpace::discrete(vec![Point::Int(0)], vec![0.0]);
        assert!(matches!(e, Err(Error::InvalidParameter(_))));
        let e = MeasureSpace::discrete(vec![Point::Int(0)], vec![1.0, 2.0]);
        assert!(e.is_err());
    }

    #[test]
    fn asymmetric_layout_is_rejected() {
        let s = MeasureSpace::discrete(vec![Point::real(0.1), Point::real(-0.2)], vec![1.0, 1.0]).unwrap();
        let e = s.with_singularities(vec![2], vec![Point::real(0.0)]);
        assert_eq!(e.unwrap_err(), Error::SingularityMismatch { group: 0 });
    }

    #[test]
    fn non_finite_sample_reports_index() {
        let s = MeasureSpace::counting((0..4).map(Point::Int).collect()).unwrap();
        let e = s.integrate(|u| if u.as_int().unwrap() == 2 { c(f64::NAN) } else { c(1.0) });
        assert_eq!(e.unwrap_err(), Error::NonFiniteSample { index: 2 });
    }

    #[test]
    fn tail_estimate_follows_decay_hypothesis() {
        let s = MeasureSpace::principal_value(0.0, 100.0, 10, 0.1, false)
            .unwrap()
            .with_decay(DecayHypothesis { constant: 2.0, exponent: 3.0 });
        let r = s.integrate(|_| c(0.0)).unwrap();
        // two tails of 2 * 100^-2 / 2
        assert!((r.tail_estimate - 2.0 * 2.0 * 1e-4 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn descriptor_with_two_singularities() {
        let json = r#"{"kind": "principal_value_continuum", "interval": [-2, 3], "nodes": 1000,
                       "singularities": [0.0, 1.5], "exclusion": 0.01, "richardson": true}"#;
        let s = MeasureSpace::from_json(json).unwrap();
        assert!((s.total_mass() - 5.0).abs() < 1e-9);
        assert_eq!(s.singularities().len(), 2);
        // 1/u + 1/(u - 1.5) is odd about each singularity inside its window
        let r = s
            .integrate(|u| {
                let x = u.x().unwrap();
                c(1.0 / x + 1.0 / (x - 1.5))
            })
            .unwrap();
        let exact = (3.0f64 / 2.0).ln() + (1.5f64 / 3.5).ln();
        assert!((r.value.re - exact).abs() < 1e-4, "{} vs {exact}", r.value.re);
    }

    #[test]
    fn explicit_weights_descriptor() {
        let json = r#"{"kind": "discrete_weighted", "interval": [1, 3], "weights": [0.5, 1.0, 2.0]}"#;
        let s = MeasureSpace::from_json(json).unwrap();
        let r = s.integrate(|u| c(u.as_int().unwrap() as f64)).unwrap();
        assert_eq!(r.value, c(0.5 + 2.0 + 6.0));
    }

    #[test]
    fn torus_product_blocks() {
        let t = MeasureSpace::principal_value_circle(8).unwrap();
        let t2 = MeasureSpace::product(&[t.clone(), t]).unwrap();
        assert_eq!(t2.len(), 64);
        assert!((t2.total_mass() - TAU * TAU).abs() < 1e-10);
        let r = t2
            .integrate(|u| {
                let v = u.as_real().unwrap();
                c(v[0] * v[1] * v[1])
            })
            .unwrap();
        assert_eq!(r.value, c(0.0));
    }

    #[test]
    fn cascade_sum_matches_naive_on_integers() {
        let mut acc = CascadeSum::default();
        for i in 0..10_000 {
            acc.push(c(i as f64));
        }
        assert_eq!(acc.total(), c(49_995_000.0));
    }
}
