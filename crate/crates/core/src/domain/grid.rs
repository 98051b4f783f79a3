use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::{Domain, Layout};
use crate::error::{Error, Result};
use crate::point::Point;

/// Anything that can be evaluated at a point of the underlying space.
pub trait SpaceFunction: Send + Sync {
    fn eval(&self, x: &Point) -> Result<Complex64>;
}

impl<F> SpaceFunction for F
where
    F: Fn(&Point) -> Complex64 + Send + Sync,
{
    fn eval(&self, x: &Point) -> Result<Complex64> {
        Ok(self(x))
    }
}

pub type ClosedForm = Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>;

/// Values of a function at the reference-measure nodes of a domain.
///
/// Off-node evaluation uses the closed form when one is attached, otherwise
/// (multi)linear interpolation inside the window. Outside the window the
/// function is either an error or, for compactly supported functions built
/// with [`GridFunction::zero_extended`], zero.
#[derive(Clone)]
pub struct GridFunction {
    domain: Arc<Domain>,
    values: Vec<Complex64>,
    closed_form: Option<ClosedForm>,
    zero_outside: bool,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("nodes", &self.values.len())
            .field("closed_form", &self.closed_form.is_some())
            .field("zero_outside", &self.zero_outside)
            .finish()
    }
}

impl GridFunction {
    pub fn from_values(domain: Arc<Domain>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != domain.node_count() {
            return Err(Error::InvalidParameter(format!(
                "{} values for {} nodes",
                values.len(),
                domain.node_count()
            )));
        }
        Ok(GridFunction { domain, values, closed_form: None, zero_outside: false })
    }

    /// Samples `f` at the nodes; the result interpolates off-node.
    pub fn sample(domain: Arc<Domain>, f: &dyn SpaceFunction) -> Result<Self> {
        let values = domain
            .nodes()?
            .iter()
            .map(|x| f.eval(x))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(domain, values)
    }

    /// Samples a closed form and keeps it for exact off-node evaluation.
    pub fn from_closed_form(domain: Arc<Domain>, f: ClosedForm) -> Result<Self> {
        let values = domain.nodes()?.iter().map(|x| f(x)).collect();
        let mut g = Self::from_values(domain, values)?;
        g.closed_form = Some(f);
        Ok(g)
    }

    /// Declares the function to vanish outside the window.
    pub fn zero_extended(mut self) -> Self {
        self.zero_outside = true;
        self
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.domain.lp_norm(&self.values, p)
    }

    pub fn integral(&self) -> Result<Complex64> {
        self.domain.integral(&self.values)
    }

    /// Pointwise `c * self`, dropping any closed form in favour of a scaled one.
    pub fn scaled(&self, c: Complex64) -> GridFunction {
        GridFunction {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            closed_form: self.closed_form.clone().map(|f| -> ClosedForm { Arc::new(move |x| c * f(x)) }),
            zero_outside: self.zero_outside,
        }
    }

    fn interpolate(&self, x: &Point) -> Result<Complex64> {
        match interpolate(self.domain.layout(), &self.values, x) {
            Some(v) => Ok(v),
            None if self.zero_outside && x.is_finite() => Ok(Complex64::new(0.0, 0.0)),
            None => Err(Error::InterpolationOutOfRange(x.to_string())),
        }
    }
}

impl SpaceFunction for GridFunction {
    fn eval(&self, x: &Point) -> Result<Complex64> {
        match &self.closed_form {
            Some(f) => Ok(f(x)),
            None => self.interpolate(x),
        }
    }
}

const EDGE_TOL: f64 = 1e-9;

pub(crate) fn interpolate(layout: &Layout, values: &[Complex64], x: &Point) -> Option<Complex64> {
    match (layout, x) {
        (Layout::Lattice { lo, hi }, Point::Int(k)) => {
            (lo..=hi).contains(&k).then(|| values[(k - lo) as usize])
        }
        (Layout::Uniform { lo, step, counts }, Point::Real(c)) if c.len() == lo.len() => {
            let d = c.len();
            let mut base = [0usize; 3];
            let mut frac = [0.0f64; 3];
            if d > 3 {
                return None;
            }
            for a in 0..d {
                let t = (c[a] - lo[a]) / step[a];
                let last = (counts[a] - 1) as f64;
                if !(t >= -EDGE_TOL && t <= last + EDGE_TOL) {
                    return None;
                }
                let t = t.clamp(0.0, last);
                let i = (t.floor() as usize).min(counts[a].saturating_sub(2));
                base[a] = i;
                frac[a] = t - i as f64;
            }
            Some(multilinear(values, counts, &base[..d], &frac[..d]))
        }
        (Layout::Periodic { counts }, Point::Complex(z)) if z.len() == counts.len() => {
            let d = z.len();
            if d > 3 {
                return None;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            let mut base = [0usize; 3];
            let mut frac = [0.0f64; 3];
            for a in 0..d {
                let n = counts[a];
                let t = ((z[a].arg() + PI) / (TAU / n as f64)).rem_euclid(n as f64);
                let i = (t.floor() as usize).min(n - 1);
                base[a] = i;
                frac[a] = t - i as f64;
            }
            for corner in 0..(1usize << d) {
                let mut idx = 0;
                let mut w = 1.0;
                for a in 0..d {
                    let up = corner >> a & 1 == 1;
                    let i = if up { (base[a] + 1) % counts[a] } else { base[a] };
                    idx = idx * counts[a] + i;
                    w *= if up { frac[a] } else { 1.0 - frac[a] };
                }
                if w != 0.0 {
                    acc += values[idx] * w;
                }
            }
            Some(acc)
        }
        _ => None,
    }
}

fn multilinear(values: &[Complex64], counts: &[usize], base: &[usize], frac: &[f64]) -> Complex64 {
    let d = base.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..(1usize << d) {
        let mut idx = 0;
        let mut w = 1.0;
        for a in 0..d {
            let up = corner >> a & 1 == 1;
            let i = base[a] + usize::from(up && counts[a] > 1);
            idx = idx * counts[a] + i;
            w *= if up { frac[a] } else { 1.0 - frac[a] };
        }
        if w != 0.0 {
            acc += values[idx] * w;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn linear_functions_interpolate_exactly() {
        let dom = Arc::new(Domain::real_box(2, 1.0, 10.0).unwrap());
        let g = GridFunction::sample(dom, &|p: &Point| {
            let v = p.as_real().unwrap();
            c(2.0 * v[0] - 3.0 * v[1] + 0.5)
        })
        .unwrap();
        let x = Point::real_vec(&[0.123, -0.777]);
        let got = g.eval(&x).unwrap();
        assert!((got.re - (2.0 * 0.123 + 3.0 * 0.777 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn outside_window_errors_unless_zero_extended() {
        let dom = Arc::new(Domain::real_line(1.0, 10.0).unwrap());
        let g = GridFunction::sample(dom, &|_: &Point| c(1.0)).unwrap();
        assert!(matches!(g.eval(&Point::real(1.5)), Err(Error::InterpolationOutOfRange(_))));
        let g = g.zero_extended();
        assert_eq!(g.eval(&Point::real(1.5)).unwrap(), c(0.0));
        assert_eq!(g.eval(&Point::real(1.0)).unwrap(), c(1.0));
    }

    #[test]
    fn lattice_lookup() {
        let dom = Arc::new(Domain::integers(-2, 2).unwrap());
        let g = GridFunction::sample(dom, &|p: &Point| c(p.as_int().unwrap() as f64)).unwrap();
        assert_eq!(g.eval(&Point::Int(-2)).unwrap(), c(-2.0));
        assert!(g.eval(&Point::Int(3)).is_err());
    }

    #[test]
    fn torus_interpolation_wraps() {
        let dom = Arc::new(Domain::torus(1, 64).unwrap());
        let g = GridFunction::sample(dom, &|p: &Point| c(p.z().unwrap().re)).unwrap();
        let z = Point::complex(Complex64::from_polar(1.0, 3.1));
        assert!((g.eval(&z).unwrap().re - 3.1f64.cos()).abs() < 2e-3);
    }

    #[test]
    fn closed_form_takes_precedence() {
        let dom = Arc::new(Domain::real_line(1.0, 4.0).unwrap());
        let g = GridFunction::from_closed_form(dom, Arc::new(|p: &Point| c(p.x().unwrap().powi(2)))).unwrap();
        assert_eq!(g.eval(&Point::real(3.0)).unwrap(), c(9.0));
    }
}
