mod common;

use common::u_star_prime;
use num_complex::Complex64;
use ostrovsky_core::spectra::eigenvalues;
use ostrovsky_core::spectral_ops::*;
use ostrovsky_core::waves::{peaked_fourier, peaked_profile};
use ostrovsky_core::{ModeSet, Power};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn peaked_a(power: Power, cutoff: usize, include_k: bool) -> OperatorMatrix {
    let d = peaked_fourier(power, 2 * cutoff).unwrap();
    assemble_operator_from_coefficients(&d, cutoff, 0.0, include_k).unwrap()
}

#[test]
fn k_entries_by_mode() {
    let k = assemble_k(2, 0.0).unwrap();
    assert_eq!(k.labels(), &[-2, -1, 1, 2]);
    let want = [c(0.0, 0.5), c(0.0, 1.0), c(0.0, -1.0), c(0.0, -0.5)];
    for (i, &n) in k.labels().iter().enumerate() {
        assert_eq!(k.entry(n, n).unwrap(), want[i]);
    }
    let k4 = assemble_k(4, 0.0).unwrap();
    let spec = eigenvalues(&k4).unwrap();
    for n in [-4i64, -3, -2, -1, 1, 2, 3, 4] {
        let l = c(0.0, n as f64).inv();
        assert!(spec.eigenvalues.iter().any(|e| (e - l).norm() == 0.0), "missing 1/(i{n})");
    }
    assert_eq!(assemble_k(3, 0.25).unwrap().entry(0, 0).unwrap(), c(0.0, -4.0));
    assert!(assemble_k_on(ModeSet::full(2, 0.0).unwrap()).is_err());
    assert!(assemble_k(0, 0.0).is_err());
    assert!(assemble_k(2, 0.7).is_err());
}

#[test]
fn multiplier_examples() {
    let modes = ModeSet::full(8, 0.0).unwrap();
    let d = ostrovsky_core::FourierVector::from_fn(modes, |n| if n == 0 { c(0.7, 0.0) } else { c(0.0, 0.0) });
    let m = assemble_multiplier(&d, ModeSet::new(4, 0.0).unwrap()).unwrap();
    assert_eq!(m.tag(), OperatorTag::Multiplier);
    for &i in m.labels() {
        for &j in m.labels() {
            assert_eq!(m.entry(i, j).unwrap(), if i == j { c(0.7, 0.0) } else { c(0.0, 0.0) });
        }
    }
    let d = peaked_fourier(Power::Quadratic, 32).unwrap();
    let m = assemble_multiplier(&d, ModeSet::new(16, 0.0).unwrap()).unwrap();
    assert_eq!(m.entry(2, 1).unwrap(), c(1.0 / 3.0, 0.0));
    for &i in m.labels() {
        for &j in m.labels() {
            assert_eq!(m.entry(i, j).unwrap(), m.entry(j, i).unwrap().conj());
        }
    }
    assert!(assemble_multiplier(&d, ModeSet::new(17, 0.0).unwrap()).is_err());
}

#[test]
fn operator_is_d_times_multiplier_plus_k() {
    let cutoff = 10;
    let d = peaked_fourier(Power::Quadratic, 2 * cutoff).unwrap();
    let a = assemble_operator_from_coefficients(&d, cutoff, 0.0, true).unwrap();
    let a0 = assemble_operator_from_coefficients(&d, cutoff, 0.0, false).unwrap();
    assert_eq!(a.tag(), OperatorTag::A);
    assert_eq!(a0.tag(), OperatorTag::A0);
    for &m in a.labels() {
        for &n in a.labels() {
            let mut want = c(0.0, m as f64) * d.coeff(m - n);
            assert!((a0.entry(m, n).unwrap() - want).norm() < 1e-15);
            if m == n {
                want += c(0.0, n as f64).inv();
            }
            assert!((a.entry(m, n).unwrap() - want).norm() < 1e-15);
        }
    }
}

#[test]
fn parity_and_reality_at_kappa_zero() {
    for power in [Power::Quadratic, Power::Cubic] {
        for include_k in [false, true] {
            let a = peaked_a(power, 16, include_k);
            let pap = a.parity_conjugate();
            assert_eq!(a.max_abs_diff(&faer::Mat::from_fn(a.dim(), a.dim(), |i, j| -pap[(i, j)])), 0.0);
            for &m in a.labels() {
                for &n in a.labels() {
                    assert_eq!(a.entry(-m, -n).unwrap(), a.entry(m, n).unwrap().conj());
                }
            }
        }
    }
}

#[test]
fn zero_profile_gives_zero_a0() {
    let p = ostrovsky_core::WaveProfile::from_samples(Power::Cubic, 0.0, vec![0.0; 128], ostrovsky_core::WaveKind::Smooth).unwrap();
    let a0 = assemble_operator(&p, 12, 0.0, false).unwrap();
    assert_eq!(a0.max_abs_diff(&faer::Mat::zeros(24, 24)), 0.0);
}

#[test]
fn sampled_and_analytic_peaked_assembly_agree() {
    let prof = peaked_profile(Power::Quadratic, 512).unwrap();
    let a = assemble_operator(&prof, 16, 0.0, true).unwrap();
    let b = peaked_a(Power::Quadratic, 16, true);
    assert!(a.max_abs_diff(b.entries()) < 1e-14);
}

#[test]
fn floquet_variant_keeps_mode_zero() {
    let d = peaked_fourier(Power::Quadratic, 16).unwrap();
    let a = assemble_operator_from_coefficients(&d, 8, 0.25, true).unwrap();
    assert_eq!(a.dim(), 17);
    let want = c(0.0, 0.25) * d.coeff(0) + c(0.0, 0.25).inv();
    assert!((a.entry(0, 0).unwrap() - want).norm() < 1e-15);
}

/// ‖A·P_N U*′‖ in coefficient ℓ².
fn u_star_residual(power: Power, cutoff: usize) -> f64 {
    let a = peaked_a(power, cutoff, true);
    a.apply(&u_star_prime(power, cutoff)).unwrap().norm()
}

#[test]
fn a_annihilates_u_star_prime_in_the_limit() {
    // expected: residual at N = 512 at most a quarter of its N = 64 value
    for power in [Power::Quadratic, Power::Cubic] {
        let r64 = u_star_residual(power, 64);
        let r512 = u_star_residual(power, 512);
        assert!(r512 <= 0.25 * r64, "{power:?}: residual {r64:.4} at N=64, {r512:.4} at N=512");
    }
}

#[test]
fn continuum_a_annihilates_u_star_prime() {
    // the untruncated product: all input modes, output compared on |m| ≤ 24
    let d = peaked_fourier(Power::Quadratic, 40_000).unwrap();
    let v = u_star_prime(Power::Quadratic, 20_000);
    let mut worst = 0.0f64;
    for m in (-24i64..=24).filter(|&m| m != 0) {
        let mut s = c(0.0, 0.0);
        for n in (-20_000i64..=20_000).filter(|&n| n != 0) {
            s += d.coeff(m - n) * v.coeff(n);
        }
        let out = c(0.0, m as f64) * s + v.coeff(m) / c(0.0, m as f64);
        worst = worst.max(out.norm());
    }
    assert!(worst < 1e-3, "{worst}");
}
