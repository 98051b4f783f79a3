use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::SpaceFunction;
use crate::error::{Error, Result};
use crate::point::Point;

type LevelPredicate = Arc<dyn Fn(usize, &Point) -> bool + Send + Sync>;
type LevelSampler = Arc<dyn Fn(usize) -> Vec<Point> + Send + Sync>;

/// A countable descending sequence `B_1 ⊇ B_2 ⊇ ...` given by membership
/// predicates, with a sampler producing points of each level. Levels start
/// at 1.
#[derive(Clone)]
pub struct FilterBase {
    label: String,
    contains: LevelPredicate,
    sample: LevelSampler,
}

impl fmt::Debug for FilterBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FilterBase").field("label", &self.label).finish()
    }
}

impl FilterBase {
    pub fn new(
        label: impl Into<String>,
        contains: impl Fn(usize, &Point) -> bool + Send + Sync + 'static,
        sample: impl Fn(usize) -> Vec<Point> + Send + Sync + 'static,
    ) -> Self {
        FilterBase { label: label.into(), contains: Arc::new(contains), sample: Arc::new(sample) }
    }

    /// `B_k = {x in R : |x| > k}`, the complements of compacts on the line.
    pub fn beyond_radius_real() -> Self {
        Self::new(
            "|x| > k",
            |k, x| x.x().is_ok_and(|v| v.abs() > k as f64),
            |k| {
                (0..32)
                    .flat_map(|j| {
                        let j = j as f64;
                        let r = k as f64 + 0.1 + 0.7 * j + 0.05 * j * j;
                        [Point::real(r), Point::real(-r)]
                    })
                    .collect()
            },
        )
    }

    /// `B_k = {n in Z : |n| > k}`.
    pub fn beyond_radius_integer() -> Self {
        Self::new(
            "|n| > k",
            |k, x| x.as_int().is_ok_and(|v| v.unsigned_abs() > k as u64),
            |k| {
                (1..=32i64)
                    .flat_map(|j| {
                        let r = k as i64 + j * j;
                        [Point::Int(r), Point::Int(-r)]
                    })
                    .collect()
            },
        )
    }

    /// `B_k = {z in C^n : 0 < |z| < 1/k}`, punctured shrinking balls.
    pub fn shrinking_balls(n: usize) -> Self {
        Self::new(
            "0 < |z| < 1/k",
            |k, x| {
                x.as_complex().is_ok_and(|z| {
                    let r = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                    r < 1.0 / k as f64
                })
            },
            move |k| {
                let mut pts = Vec::new();
                for i in 0..8 {
                    for j in 0..6 {
                        let rho = (0.15 + 0.8 * i as f64 / 8.0) / k as f64;
                        let phi = 0.3 + j as f64 * std::f64::consts::TAU / 6.0;
                        let z = Complex64::from_polar(rho / (n as f64).sqrt(), phi);
                        let coords: Vec<Complex64> = (0..n).map(|m| z * Complex64::from_polar(1.0, 0.7 * m as f64)).collect();
                        pts.push(Point::complex_vec(&coords));
                    }
                }
                pts
            },
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, level: usize, x: &Point) -> bool {
        (self.contains)(level, x)
    }

    pub fn sample(&self, level: usize) -> Vec<Point> {
        (self.sample)(level)
    }

    /// Every sampled point of level `k + 1` passes the level-`k` predicate,
    /// and every sampled point passes its own level, for `k < depth`.
    pub fn is_nested(&self, depth: usize) -> bool {
        (1..=depth).all(|k| {
            let pts = self.sample(k);
            pts.iter().all(|x| self.contains(k, x))
                && (k == 1 || pts.iter().all(|x| self.contains(k - 1, x)))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub estimate: Complex64,
    pub spread: f64,
}

fn deepest_samples(base: &FilterBase, depth: usize) -> Result<Vec<Point>> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let mut last = Vec::new();
    for level in 1..=depth {
        last = base.sample(level);
        if last.is_empty() {
            return Err(Error::EmptyLevel { level });
        }
    }
    Ok(last)
}

/// Mean of `f` over the sampled points of `B_depth`, and the largest deviation
/// from that mean. A spread shrinking with depth indicates the limit exists.
pub fn limit_along_filter(f: &dyn SpaceFunction, base: &FilterBase, depth: usize) -> Result<LimitEstimate> {
    let pts = deepest_samples(base, depth)?;
    let vals = pts.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    let estimate = vals.iter().sum::<Complex64>() / vals.len() as f64;
    let spread = vals.iter().map(|v| (v - estimate).norm()).fold(0.0, f64::max);
    Ok(LimitEstimate { estimate, spread })
}

/// Largest `|f(x) - l|` over the sampled points of `B_depth`.
pub fn spread_about(f: &dyn SpaceFunction, base: &FilterBase, depth: usize, l: Complex64) -> Result<f64> {
    let pts = deepest_samples(base, depth)?;
    pts.iter()
        .map(|x| f.eval(x).map(|v| (v - l).norm()))
        .try_fold(0.0, |m, d| d.map(|d| f64::max(m, d)))
}
