mod common;

use common::{char_poly_roots, correlation, set_distance, u_star_prime};
use num_complex::Complex64;
use ostrovsky_core::spectra::*;
use ostrovsky_core::spectral_ops::*;
use ostrovsky_core::waves::{peaked_fourier, smooth_wave_solve_with};
use ostrovsky_core::{Error, Power};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn peaked_a(power: Power, cutoff: usize, include_k: bool) -> OperatorMatrix {
    let d = peaked_fourier(power, 2 * cutoff).unwrap();
    assemble_operator_from_coefficients(&d, cutoff, 0.0, include_k).unwrap()
}

#[test]
fn tiny_operator_matches_characteristic_polynomial() {
    for power in [Power::Quadratic, Power::Cubic] {
        let a = peaked_a(power, 4, true);
        let rows: Vec<Vec<Complex64>> = (0..a.dim()).map(|i| (0..a.dim()).map(|j| a.entries()[(i, j)]).collect()).collect();
        let oracle = char_poly_roots(&rows);
        let got = eigenvalues(&a).unwrap();
        assert!(set_distance(&got.eigenvalues, &oracle) < 1e-8);
        assert!(set_distance(&oracle, &got.eigenvalues) < 1e-8);
    }
}

#[test]
fn residuals_and_symmetry() {
    for power in [Power::Quadratic, Power::Cubic] {
        let s = eigenvalues(&peaked_a(power, 48, true)).unwrap();
        assert_eq!(s.eigenvalues.len(), 96);
        assert!(s.residuals.iter().all(|&r| r <= RESIDUAL_TOL));
        assert!(s.symmetry_defect(|l| l.conj()) < 1e-8);
        assert!(s.symmetry_defect(|l| -l) < 1e-8);
    }
}

#[test]
fn zero_eigenvalue_at_n64() {
    // expected: an eigenvalue within 1e−6 of 0 whose eigenvector tracks U*′
    for power in [Power::Quadratic, Power::Cubic] {
        let pairs = eigen_decomposition(&peaked_a(power, 64, true)).unwrap();
        let (k, l) = pairs.spectrum.nearest_to(c(0.0, 0.0)).unwrap();
        let corr = correlation(pairs.vectors[k].coeffs(), u_star_prime(power, 64).coeffs());
        assert!(l.norm() <= 1e-6 && corr >= 0.99, "{power:?}: |λ| = {:.3e}, correlation {corr:.4}", l.norm());
    }
}

#[test]
fn smallest_singular_of_k() {
    let k = assemble_k(2, 0.0).unwrap();
    assert!(smallest_singular(&k, c(0.0, 1.0)).unwrap() < 1e-15);
    for n in [1usize, 3, 17] {
        let sv = assemble_k(n, 0.0).unwrap().shifted(c(0.0, 0.0)).singular_values().unwrap();
        assert!((sv[0] - 1.0).abs() < 1e-15);
    }
    assert!(smallest_singular(&k, c(f64::NAN, 0.0)).is_err());
}

#[test]
fn sigma_min_outside_strip_regression() {
    // pinned from the first validated run
    let s = smallest_singular(&peaked_a(Power::Quadratic, 128, true), c(0.7, 0.0)).unwrap();
    assert!(s >= 0.05);
    assert!((s - 0.404_8).abs() < 5e-4, "{s}");
}

#[test]
fn sigma_min_inside_strip_decreases() {
    let s64 = smallest_singular(&peaked_a(Power::Quadratic, 64, true), c(0.4, 0.0)).unwrap();
    let s256 = smallest_singular(&peaked_a(Power::Quadratic, 256, true), c(0.4, 0.0)).unwrap();
    assert!(s256 < s64);
}

#[test]
fn sigma_min_trend_at_03() {
    // expected: non-increasing in N with σ(256) ≤ σ(64)/2
    let s: Vec<f64> = [64usize, 128, 256]
        .iter()
        .map(|&n| smallest_singular(&peaked_a(Power::Quadratic, n, true), c(0.3, 0.0)).unwrap())
        .collect();
    assert!(s[1] <= s[0] && s[2] <= s[1]);
    assert!(s[2] <= 0.5 * s[0], "σ_min = {s:?}");
}

#[test]
fn sigma_min_stable_at_07() {
    let s: Vec<f64> = [64usize, 128, 256]
        .iter()
        .map(|&n| smallest_singular(&peaked_a(Power::Quadratic, n, true), c(0.7, 0.0)).unwrap())
        .collect();
    let hi = s.iter().copied().fold(0.0, f64::max);
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    assert!((hi - lo) / hi < 0.2, "{s:?}");
}

#[test]
fn smooth_waves_are_spectrally_stable() {
    for speed in [1.02, 1.05, 1.08] {
        let w = smooth_wave_solve_with(speed, Power::Quadratic, 1e-8, 1024).unwrap();
        let a = assemble_operator(&w.profile, 128, 0.0, true).unwrap();
        let s = eigenvalues(&a).unwrap();
        let worst = s.eigenvalues.iter().map(|l| l.re.abs()).fold(0.0, f64::max);
        assert!(worst < 1e-6, "c = {speed}: max |Re λ| = {worst:.3e}");
    }
}

#[test]
fn field_is_canonical_and_lipschitz() {
    let a = peaked_a(Power::Quadratic, 16, true);
    let grid = LambdaGrid::new((-0.8, 0.8), (-2.0, 2.0), 9, 8).unwrap();
    let f = pseudospectrum_field(&a, &grid).unwrap();
    for (k, l) in grid.points().iter().enumerate() {
        assert_eq!(f.sigma_min[k], smallest_singular(&a, *l).unwrap());
        assert_eq!(f.lambda(k), *l);
    }
    assert!(f.sigma_min.iter().all(|&s| s >= 0.0));
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            let d = (f.lambda(i) - f.lambda(j)).norm();
            assert!((f.sigma_min[i] - f.sigma_min[j]).abs() <= d + 1e-12);
        }
    }
    assert!(LambdaGrid::new((0.0, 1.0), (0.0, 1.0), 7, 8).is_err());
}

#[test]
fn strip_estimate_limits() {
    let a = peaked_a(Power::Quadratic, 16, true);
    let grid = LambdaGrid::new((-0.8, 0.8), (-2.0, 2.0), 9, 9).unwrap();
    let f = pseudospectrum_field(&a, &grid).unwrap();
    assert_eq!(strip_estimate(&f, 10.0), Some((-0.8, 0.8)));
    assert_eq!(strip_estimate(&f, 0.0), None);
    let wide = strip_estimate(&f, 0.3).unwrap();
    let narrow = strip_estimate(&f, 0.05).unwrap_or((0.0, 0.0));
    assert!(narrow.0 >= wide.0 && narrow.1 <= wide.1);
}

#[test]
fn compact_perturbation_bounds() {
    let a = peaked_a(Power::Quadratic, 48, true);
    let a0 = peaked_a(Power::Quadratic, 48, false);
    let grid = LambdaGrid::new((-0.8, 0.8), (-2.0, 2.0), 8, 8).unwrap();
    let cmp = compare_pseudospectra(&a, &a0, &grid).unwrap();
    assert!(cmp.max_difference <= 1.0);
    let tail = |m: &OperatorMatrix| m.compress(|n| n.abs() > 32);
    let cmp = compare_pseudospectra(&tail(&a), &tail(&a0), &grid).unwrap();
    assert!(cmp.max_difference <= 1.0 / 33.0 + 1e-12, "{}", cmp.max_difference);
    let small = peaked_a(Power::Quadratic, 8, false);
    assert!(matches!(compare_pseudospectra(&a, &small, &grid), Err(Error::DimensionMismatch { .. })));
}
