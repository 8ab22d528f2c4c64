mod common;

use common::{integrate, l2, oracle_residual, random_constrained};
use num_complex::Complex64;
use ostrovsky_core::halfline::*;
use ostrovsky_core::{Error, Power};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn spectral_parameter_scaling() {
    assert!((mu_from_lambda(c(PI / 6.0, 0.0), Power::Quadratic) - c(1.0, 0.0)).norm() < 1e-15);
    assert!((mu_from_lambda(c(PI / 4.0, 0.0), Power::Cubic) - c(1.0, 0.0)).norm() < 1e-15);
    assert_eq!(mu_from_lambda(c(0.0, 0.0), Power::Quadratic), c(0.0, 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let l = c(rng.gen_range(-2.0..2.0), rng.gen_range(-5.0..5.0));
        for power in [Power::Quadratic, Power::Cubic] {
            let mu = mu_from_lambda(l, power);
            assert!((mu.re.abs() - 1.0).signum() == (l.re.abs() - power.strip_half_width()).signum());
            assert!((lambda_from_mu(mu, power) - l).norm() < 1e-14);
        }
    }
}

#[test]
fn classification_examples() {
    assert_eq!(classify_mu(c(0.5, 0.0)).region, SpectralRegion::Residual);
    assert_eq!(classify_mu(c(1.0, 5.0)).region, SpectralRegion::Continuous);
    assert_eq!(classify_mu(c(-1.0, -2.0)).region, SpectralRegion::Continuous);
    assert_eq!(classify_mu(c(2.0, 0.0)).region, SpectralRegion::Resolvent);
    assert_eq!(classify_mu(c(-2.0, 7.0)).region, SpectralRegion::Resolvent);
    for im in [-3.0, 0.0, 11.0] {
        assert_eq!(classify_mu(c(0.3, im)).region, SpectralRegion::Residual);
    }
}

fn mu_grid() -> Vec<Complex64> {
    (0..100).map(|k| c(-3.0 + 6.0 * k as f64 / 99.0, if k % 2 == 0 { 0.0 } else { 0.7 })).collect()
}

#[test]
fn kernel_never_decays() {
    for mu in mu_grid() {
        assert!(!kernel_solution(mu, &HalflineGrid::for_mu(mu)).decay_flag, "mu = {mu}");
    }
}

#[test]
fn adjoint_kernel_decays_exactly_inside() {
    for mu in mu_grid() {
        let flag = adjoint_kernel(mu, &HalflineGrid::for_mu(mu)).decay_flag;
        assert_eq!(flag, mu.re.abs() < 1.0, "mu = {mu}");
    }
}

#[test]
fn kernel_samples() {
    let g = HalflineGrid::standard();
    let k = kernel_solution(c(0.5, 0.2), &g);
    let a = adjoint_kernel(c(0.5, 0.2), &g);
    for (i, &y) in g.points().iter().enumerate().step_by(977) {
        if y.abs() < 10.0 {
            let want = y.cosh() * (c(0.5, 0.2) * y).exp();
            assert!((k.values[i] / k.values[g.len() / 2] - want).norm() < 1e-10 * want.norm().max(1.0));
            let want = (-c(0.5, 0.2) * y).exp() / y.cosh();
            assert!((a.values[i] / a.values[g.len() / 2] - want).norm() < 1e-12);
        }
    }
}

#[test]
fn resolvent_example_mu2() {
    let g = HalflineGrid::for_mu(c(2.0, 0.0));
    let f = HalflineFunction::from_real_fn(&g, |y| sech(y) * y.tanh());
    let w = resolvent_solve(c(2.0, 0.0), &f).unwrap();
    assert!(w.decay_flag);
    assert!(oracle_residual(c(2.0, 0.0), &w, &f) <= 1e-8);
    assert!(ode_residual(c(2.0, 0.0), &w, &f) <= 1e-8);
    assert!(l2(&w) <= resolvent_bound(c(2.0, 0.0)) * l2(&f));
    assert!((resolvent_bound(c(2.0, 0.0)) - (0.5 + 2.0 / 3.0 + 2.0)).abs() < 1e-15);
}

#[test]
fn resolvent_mirror_is_a_reflection() {
    let g = HalflineGrid::for_mu(c(2.0, 0.0));
    let f = HalflineFunction::from_real_fn(&g, |y| sech(y) * y.tanh() * (1.0 + 0.3 * y));
    let f = {
        let k = f.sech_moment() / HalflineFunction::from_real_fn(&g, sech).sech_moment();
        HalflineFunction::from_fn(&g, |y| sech(y) * y.tanh() * (1.0 + 0.3 * y) - k * sech(y))
    };
    let wm = resolvent_solve(c(-2.0, 0.5), &f).unwrap();
    let wp = resolvent_solve(c(2.0, -0.5), &f.reflected()).unwrap();
    assert!(oracle_residual(c(-2.0, 0.5), &wm, &f) <= 1e-8);
    assert!((l2(&wm) - l2(&wp)).abs() <= 1e-10 * l2(&wp));
}

#[test]
fn resolvent_bound_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for mu in [1.5, 2.0, 3.0, -1.5, -2.0] {
        let mu = c(mu, 0.0);
        let g = HalflineGrid::for_mu(mu);
        for _ in 0..20 {
            let f = random_constrained(&mut rng, &g);
            let w = resolvent_solve(mu, &f).unwrap();
            assert!(oracle_residual(mu, &w, &f) <= 1e-8);
            assert!(l2(&w) <= resolvent_bound(mu) * l2(&f), "mu = {mu}");
        }
    }
}

#[test]
fn resolvent_rejections() {
    let g = HalflineGrid::standard();
    let f = HalflineFunction::from_real_fn(&g, sech);
    assert!(matches!(resolvent_solve(c(2.0, 0.0), &f), Err(Error::InvalidInput(_))));
    let odd = HalflineFunction::from_real_fn(&g, |y| sech(y) * y.tanh());
    assert!(matches!(resolvent_solve(c(1.0, 0.0), &odd), Err(Error::OutOfRegion { .. })));
    assert!(matches!(resolvent_solve(c(-0.2, 3.0), &odd), Err(Error::OutOfRegion { .. })));
}

#[test]
fn constraint_values() {
    let g = HalflineGrid::standard();
    let f = HalflineFunction::from_real_fn(&g, |y| sech(y) * y.tanh());
    let at0 = residual_constraints(c(0.0, 0.0), &f).unwrap();
    assert!(at0.primary.norm() < 1e-14);
    // ∫∫_{∞}^{y} sech·f = −∫ y sech² tanh = −1
    assert!((at0.secondary.unwrap() - c(-1.0, 0.0)).norm() < 1e-8);
    // ∫ e^{−ay} sech² tanh dy = −πa²/(2 sin(πa/2)), frozen at a = 1/2
    let half = residual_constraints(c(0.5, 0.0), &f).unwrap();
    assert!(half.secondary.is_none());
    assert!((half.primary - c(-0.555_360_367_269_795_8, 0.0)).norm() < 1e-10, "{}", half.primary);
    let a = 0.5;
    assert!((-PI * a * a / (2.0 * (PI * a / 2.0).sin()) + 0.555_360_367_269_795_8).abs() < 1e-15);
}

#[test]
fn constraints_diverge_on_the_continuous_lines() {
    let f = |y: f64| 1.0 / (1.0 + y * y).sqrt();
    for mu in [1.0, -1.0] {
        let p = constraint_partial_integrals(c(mu, 0.0), f, &[10.0, 100.0, 1000.0]);
        assert!(p[1].norm() > p[0].norm() + 1.0 && p[2].norm() > p[1].norm() + 1.0, "{p:?}");
    }
    let inside = constraint_partial_integrals(c(0.5, 0.0), f, &[80.0, 160.0]);
    assert!((inside[1] - inside[0]).norm() < 1e-12);
}

#[test]
fn b0_preserves_the_constraint() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let (s, r) = (rng.gen_range(-3.0..3.0), rng.gen_range(0.5..3.0));
        let bump = |y: f64| {
            let t = (y - s) / r;
            if t.abs() < 1.0 { (-1.0 / (1.0 - t * t)).exp() } else { 0.0 }
        };
        let dbump = |y: f64| {
            let t = (y - s) / r;
            if t.abs() < 1.0 { bump(y) * (-2.0 * t / (1.0 - t * t).powi(2)) / r } else { 0.0 }
        };
        let b0w = |y: f64| Complex64::new((dbump(y) - y.tanh() * bump(y)) * sech(y), 0.0);
        let v = integrate(b0w, s - r, s + r, 400);
        assert!(v.norm() <= 1e-10, "{v}");
    }
}

#[test]
fn coordinate_map_examples_and_round_trip() {
    let f = coordinate_map(MapDirection::Forward, Power::Quadratic, &[0.0]).unwrap();
    assert_eq!(f[0].value, 0.0);
    let g = coordinate_map(MapDirection::Forward, Power::Cubic, &[0.0]).unwrap();
    assert_eq!((g[0].chart, g[1].chart), (Chart::Upper, Chart::Lower));
    assert!((g[0].value - PI / 2.0).abs() < 1e-15 && (g[1].value + PI / 2.0).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let xi = rng.gen_range(-4.0..4.0);
        for power in [Power::Quadratic, Power::Cubic] {
            for m in coordinate_map(MapDirection::Forward, power, &[xi]).unwrap() {
                let back = coordinate_map(MapDirection::Inverse, power, &[m.value]).unwrap();
                assert_eq!(back[0].chart, m.chart);
                assert!((back[0].value - xi).abs() <= 1e-12 * xi.abs().max(1.0), "{power:?} {xi}");
                // Jacobian is c* − U*^p at z
                let z = m.value;
                let want = match power {
                    Power::Quadratic => (PI * PI - z * z) / 6.0,
                    Power::Cubic => 0.5 * z.abs() * (PI - z.abs()),
                };
                assert!((m.jacobian - want).abs() < 1e-12);
            }
        }
    }
    assert!(coordinate_map(MapDirection::Inverse, Power::Quadratic, &[-PI]).is_err());
    assert!(coordinate_map(MapDirection::Inverse, Power::Cubic, &[PI]).is_err());
}

fn random_field(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> f64 {
    let a: Vec<(f64, f64)> = (1..=5).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    move |z: f64| a.iter().enumerate().map(|(k, (x, y))| x * ((k + 1) as f64 * z).cos() + y * ((k + 1) as f64 * z).sin()).sum()
}

#[test]
fn transform_norm_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = HalflineGrid::standard();
    for _ in 0..10 {
        let v = random_field(&mut rng);
        let vsq = |z: f64| Complex64::new(v(z).powi(2), 0.0);
        match transform_field(&v, Power::Quadratic, &grid) {
            TransformedField::Single(w) => {
                let lhs = integrate(vsq, -PI, PI, 64).re;
                assert!((lhs - PI * l2(&w).powi(2)).abs() <= 1e-8 * lhs.max(1.0));
                // zero-mean v gives ⟨w, sech⟩ = 0
                assert!(w.sech_moment().norm() <= 1e-10);
            }
            _ => panic!("p = 1 gives one function"),
        }
        match transform_field(&v, Power::Cubic, &grid) {
            TransformedField::Pair { upper, lower } => {
                let up = integrate(vsq, 0.0, PI, 64).re;
                let lo = integrate(vsq, -PI, 0.0, 64).re;
                assert!((up - 0.5 * PI * l2(&upper).powi(2)).abs() <= 1e-8 * up.max(1.0));
                assert!((lo - 0.5 * PI * l2(&lower).powi(2)).abs() <= 1e-8 * lo.max(1.0));
                assert!((upper.sech_moment() + lower.sech_moment()).norm() <= 1e-10);
            }
            _ => panic!("p = 2 gives a pair"),
        }
    }
}

#[test]
fn transform_examples() {
    let grid = HalflineGrid::standard();
    let TransformedField::Single(w) = transform_field(|z| z / 3.0, Power::Quadratic, &grid) else { panic!() };
    assert!((l2(&w).powi(2) - 2.0 * PI * PI / 27.0).abs() < 1e-8);
    // symmetric about π/2 on (0, π) gives w₊ even in y
    let TransformedField::Pair { upper, .. } = transform_field(|z| (2.0 * z).cos() + z * (PI - z), Power::Cubic, &grid) else { panic!() };
    let n = upper.values.len();
    for k in 0..n {
        assert!((upper.values[k] - upper.values[n - 1 - k]).norm() < 1e-12);
    }
    // sampled input through trigonometric interpolation
    let z = ostrovsky_core::fourier::periodic_grid(64);
    let samples: Vec<f64> = z.iter().map(|&x| (2.0 * x).sin() + 0.5 * (3.0 * x).cos()).collect();
    let TransformedField::Single(ws) = transform_samples(&samples, Power::Quadratic, &grid) else { panic!() };
    let TransformedField::Single(wf) = transform_field(|x| (2.0 * x).sin() + 0.5 * (3.0 * x).cos(), Power::Quadratic, &grid) else { panic!() };
    assert!(ws.values.iter().zip(&wf.values).all(|(a, b)| (a - b).norm() < 1e-12));
}
