use std::sync::Arc;

use hausdorff::automorphism::AutomorphismFamily;
use hausdorff::catalog;
use hausdorff::domain::{sample_balls, Ball, Domain, DoublingProfile, FilterBase, SpaceFunction};
use hausdorff::hardy::{h1q_norm_upper, n_bound, random_atom, AtomSampler, AtomicDecomposition};
use hausdorff::measure::MeasureSpace;
use hausdorff::operator::{trial_rng, HausdorffOperator};
use hausdorff::point::Point;
use hausdorff::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn line() -> Arc<Domain> {
    Arc::new(Domain::real_line(10.0, 40.0).unwrap())
}

fn two_dilations(domain: Arc<Domain>) -> HausdorffOperator {
    catalog::discrete_hausdorff_rd(&[vec![vec![2.0]], vec![vec![0.5]]], &[c(0.6), c(-0.3)], domain).unwrap()
}

fn wave(a: f64, b: f64) -> impl Fn(&Point) -> Complex64 + Clone {
    move |p: &Point| {
        let x = p.x().unwrap();
        Complex64::new((a * x).sin(), (b * x).cos()) * (-x * x).exp()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integration_is_linear(
        weights in prop::collection::vec(0.0f64..3.0, 1..40),
        alpha in -5.0f64..5.0,
        beta in -5.0f64..5.0,
    ) {
        let n = weights.len();
        let nodes: Vec<Point> = (0..n).map(|i| Point::real(i as f64 * 0.37 - 2.0)).collect();
        let mu = MeasureSpace::discrete(nodes, weights).unwrap();
        let g = |p: &Point| c(p.x().unwrap().sin());
        let h = |p: &Point| Complex64::new(p.x().unwrap().powi(2), 1.0);
        let combo = mu.integrate(|p| alpha * g(p) + beta * h(p)).unwrap().value;
        let split = alpha * mu.integrate(g).unwrap().value + beta * mu.integrate(h).unwrap().value;
        let scale = 1.0 + combo.norm() + split.norm();
        prop_assert!((combo - split).norm() <= 1e-13 * scale * n as f64);
    }

    #[test]
    fn odd_integrands_vanish_exactly_under_principal_value(
        s in -3.0f64..3.0,
        half_width in 1.0f64..20.0,
        pairs in 1usize..400,
        a in 0.1f64..4.0,
        richardson in any::<bool>(),
    ) {
        let eps = half_width / (4.0 * pairs as f64);
        // odd about the singularity, including the pole itself
        let odd = move |t: f64| (a * t).sin() * (1.0 + t * t) + 1.0 / t;
        let at_zero = MeasureSpace::principal_value(0.0, half_width, pairs, eps, richardson).unwrap();
        prop_assert_eq!(at_zero.integrate(|p: &Point| c(odd(p.x().unwrap()))).unwrap().value, c(0.0));
        // off the origin the mirror nodes s ± t are rounded, so cancellation
        // holds to the size of that rounding
        let shifted = MeasureSpace::principal_value(s, half_width, pairs, eps, richardson).unwrap();
        let v = shifted.integrate(|p: &Point| c(odd(p.x().unwrap() - s))).unwrap().value;
        let scale: f64 = shifted.nodes().iter().zip(shifted.weights()).map(|(p, w)| (odd(p.x().unwrap() - s) * w).abs()).sum();
        prop_assert!(v.norm() <= 1e-12 * scale.max(1.0), "{v} vs {scale}");
    }

    #[test]
    fn ball_measure_is_monotone(x in -3.0f64..3.0, r1 in 0.01f64..3.0, dr in 0.0f64..3.0) {
        let dom = line();
        let small = dom.ball_measure(&Ball::new(Point::real(x), r1).unwrap()).unwrap();
        let big = dom.ball_measure(&Ball::new(Point::real(x), r1 + dr).unwrap()).unwrap();
        prop_assert!(small <= big);
    }

    #[test]
    fn apply_is_linear(
        x in -3.0f64..3.0,
        a in (-2.0f64..2.0, -2.0f64..2.0),
        b in (-2.0f64..2.0, -2.0f64..2.0),
        freq in (0.1f64..3.0, 0.1f64..3.0),
    ) {
        let op = two_dilations(line());
        let (alpha, beta) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let f = wave(freq.0, freq.1);
        let g = wave(freq.1, freq.0);
        let (f2, g2) = (f.clone(), g.clone());
        let combo = move |p: &Point| alpha * f2(p) + beta * g2(p);
        let x = Point::real(x);
        let lhs = op.apply(&combo, &x).unwrap();
        let rhs = alpha * op.apply(&f, &x).unwrap() + beta * op.apply(&g, &x).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-14 * (1.0 + lhs.norm()));
    }

    #[test]
    fn symbol_scaling(re in -3.0f64..3.0, im in -3.0f64..3.0, x in -2.0f64..2.0, p in prop::sample::select(vec![1.0, 2.0, 4.0, f64::INFINITY])) {
        let k = Complex64::new(re, im);
        let op = two_dilations(line());
        let scaled = op.scaled(k);
        let f = wave(1.3, 0.4);
        let x = Point::real(x);
        let v = op.apply(&f, &x).unwrap();
        prop_assert!((scaled.apply(&f, &x).unwrap() - k * v).norm() <= 1e-14 * (1.0 + v.norm() * k.norm()));
        let norm = op.phi_norm_ap(p).unwrap();
        prop_assert!((scaled.phi_norm_ap(p).unwrap() - k.norm() * norm).abs() <= 1e-14 * (1.0 + norm * k.norm()));
        let integral = op.symbol_integral().unwrap();
        prop_assert!((scaled.symbol_integral().unwrap() - k * integral).norm() <= 1e-14 * (1.0 + k.norm()));
        prop_assert!((scaled.regularity_defect().unwrap() - (k * integral - 1.0).norm()).abs() <= 1e-14 * (1.0 + k.norm()));
    }

    #[test]
    fn n_bound_is_monotone(
        c_nu in 1.0f64..8.0,
        bump_c in 0.0f64..4.0,
        inflate in 1.0f64..3.0,
        grow in 1.0f64..3.0,
        q in prop::sample::select(vec![1.5, 2.0, 4.0, f64::INFINITY]),
    ) {
        let dom = line();
        let base = two_dilations(dom.clone());
        let profile = DoublingProfile::new(c_nu).unwrap();
        let bigger_c = DoublingProfile::new(c_nu + bump_c).unwrap();
        let n0 = n_bound(&base, q, &profile).unwrap();
        prop_assert!(n0 <= n_bound(&base, q, &bigger_c).unwrap() * (1.0 + 1e-12));
        // |Φ| grown pointwise
        prop_assert!(n0 <= n_bound(&base.scaled(c(grow)), q, &profile).unwrap() * (1.0 + 1e-12));
        // k(u) inflated, same maps and modulus
        let fam = base.family().clone();
        let (f1, f2, f3, f4) = (fam.clone(), fam.clone(), fam.clone(), fam.clone());
        let inflated = AutomorphismFamily::new(
            "inflated",
            move |u, x| f1.apply(u, x),
            move |u, x| f2.apply_inverse(u, x),
        )
        .with_modulus(move |u| f3.modulus(u).unwrap())
        .with_metric_factor(move |u| inflate * f4.metric_factor(u).unwrap());
        let ops = HausdorffOperator::new("inflated", base.omega().clone(), {
            let b = base.clone();
            move |u: &Point| b.phi(u)
        }, inflated, dom).unwrap();
        prop_assert!(n0 <= n_bound(&ops, q, &profile).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn l1_norm_is_dominated_by_coefficients(seed in any::<u64>(), terms in 1usize..6, q in prop::sample::select(vec![1.5, 2.0, 3.0, f64::INFINITY])) {
        let dom = line();
        let sampler = AtomSampler { center_spread: 3.0, radius: (0.6, 1.5) };
        let mut rng = trial_rng(seed, 0);
        let parts: Vec<_> = (0..terms)
            .map(|_| {
                let alpha = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                (alpha, random_atom(&dom, q, &sampler, &mut rng).unwrap())
            })
            .collect();
        let dec = AtomicDecomposition::new(parts, 0.0).unwrap();
        let f = dec.sum().unwrap().unwrap();
        prop_assert!(f.lp_norm(1.0).unwrap() <= h1q_norm_upper(&dec) * (1.0 + 1e-12));
    }

    #[test]
    fn translations_are_injective_on_nodes(u in -2.0f64..2.0) {
        let dom = Domain::real_line(3.0, 20.0).unwrap();
        let fam = AutomorphismFamily::translation_real();
        let mut images: Vec<f64> = dom.nodes().unwrap().iter().map(|x| fam.apply(&Point::real(u), x).x().unwrap()).collect();
        images.sort_by(f64::total_cmp);
        prop_assert!(images.windows(2).all(|w| w[1] - w[0] > 0.5 * dom.resolution()));
    }
}

/// 10^4 random triples per shipped metric domain against `kappa = 1`.
#[test]
fn quasi_triangle_inequality() {
    let mut rng = trial_rng(42, 0);
    let domains = [
        Domain::real_line(5.0, 10.0).unwrap(),
        Domain::real_box(2, 3.0, 5.0).unwrap(),
        Domain::integers(-50, 50).unwrap(),
        Domain::torus(1, 64).unwrap(),
        Domain::torus(2, 16).unwrap(),
    ];
    for dom in &domains {
        let rho = dom.rho().unwrap();
        let nodes = dom.nodes().unwrap();
        for _ in 0..10_000 {
            let mut pick = || &nodes[rng.gen_range(0..nodes.len())];
            let (x, y, z) = (pick(), pick(), pick());
            let direct = rho.distance(x, z);
            assert!(direct <= rho.distance(x, y) + rho.distance(y, z) + 1e-12, "{x} {y} {z}");
            assert_eq!(rho.distance(x, y), rho.distance(y, x));
        }
    }
}

#[test]
fn filter_bases_are_nested() {
    for base in [FilterBase::beyond_radius_real(), FilterBase::beyond_radius_integer(), FilterBase::shrinking_balls(2)] {
        assert!(base.is_nested(12), "{}", base.label());
    }
}

#[test]
fn trapezoid_refinement_is_second_order() {
    let g = |p: &Point| c((-p.x().unwrap().powi(2)).exp());
    // [0, 1] keeps the endpoint error visible
    let exact = 0.746_824_132_812_427_f64;
    let err = |n: usize| (MeasureSpace::trapezoid(0.0, 1.0, n).unwrap().integrate(g).unwrap().value.re - exact).abs();
    let (e1, e2) = (err(41), err(81));
    assert!((e1 / e2 - 4.0).abs() < 0.05, "{e1} {e2}");
}

#[test]
fn estimated_doubling_near_analytic() {
    for (dom, d) in [(Domain::real_line(10.0, 200.0).unwrap(), 1), (Domain::real_box(2, 4.0, 40.0).unwrap(), 2)] {
        let balls = sample_balls(&dom, &[0.5, 1.0], 3);
        let est = dom.estimate_doubling(&balls).unwrap();
        let analytic = 2f64.powi(d);
        assert!((est.c_nu - analytic).abs() <= 0.05 * analytic, "{d}: {}", est.c_nu);
    }
}

#[test]
fn space_function_trait_objects() {
    let f: Box<dyn SpaceFunction> = Box::new(|p: &Point| c(p.x().unwrap()));
    assert_eq!(f.eval(&Point::real(2.0)).unwrap(), c(2.0));
}
