#![allow(dead_code)]

use num_complex::Complex64;
use ostrovsky_core::halfline::{sech, HalflineFunction, HalflineGrid};
use ostrovsky_core::{FourierVector, ModeSet, Power};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// ∫_a^b f with `panels` equal panels of a 20-point rule.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::default();
    for k in 0..panels {
        let lo = a + h * k as f64;
        for &(x, w) in &rule {
            acc += f(lo + 0.5 * h * (x + 1.0)) * (0.5 * h * w);
        }
    }
    acc
}

/// (1/2π)∫_{−π}^{π} f(z)e^{−inz}dz, split at `breaks` so each piece is smooth.
pub fn fourier_oracle<F: Fn(f64) -> f64>(f: F, n: i64, breaks: &[f64]) -> Complex64 {
    let mut pts = vec![-PI];
    pts.extend(breaks.iter().copied().filter(|b| b.abs() < PI));
    pts.push(PI);
    let panels = 8 + 2 * n.unsigned_abs() as usize;
    pts.windows(2)
        .map(|w| integrate(|z| Complex64::from_polar(f(z), -(n as f64) * z), w[0], w[1], panels))
        .sum::<Complex64>()
        / (2.0 * PI)
}

pub fn peaked_u(power: Power, z: f64) -> f64 {
    match power {
        Power::Quadratic => (3.0 * z * z - PI * PI) / 18.0,
        Power::Cubic => (z.abs() - PI / 2.0) / 2f64.sqrt(),
    }
}

pub fn peaked_c(power: Power) -> f64 {
    match power {
        Power::Quadratic => PI * PI / 9.0,
        Power::Cubic => PI * PI / 8.0,
    }
}

/// Fourier coefficients of U*′ worked out by hand: z/3 for p = 1 and sign(z)/√2 for p = 2.
pub fn u_star_prime(power: Power, cutoff: usize) -> FourierVector {
    let modes = ModeSet::new(cutoff, 0.0).unwrap();
    FourierVector::from_fn(modes, |n| {
        let s = if n % 2 == 0 { 1.0 } else { -1.0 };
        match power {
            Power::Quadratic => Complex64::new(0.0, s / (3.0 * n as f64)),
            Power::Cubic => Complex64::new(0.0, -(1.0 - s) / (PI * n as f64) / 2f64.sqrt()),
        }
    })
}

/// |⟨a, b⟩| / (‖a‖‖b‖)
pub fn correlation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    dot.norm() / (na * nb)
}

/// Roots of det(M − λI) through Faddeev–LeVerrier and Durand–Kerner.
pub fn char_poly_roots(m: &[Vec<Complex64>]) -> Vec<Complex64> {
    let n = m.len();
    let mul = |a: &Vec<Vec<Complex64>>, b: &Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    };
    // c[k] is the coefficient of λ^{n−k}
    let mut c = vec![Complex64::new(1.0, 0.0)];
    let mut mk: Vec<Vec<Complex64>> = vec![vec![Complex64::default(); n]; n];
    let mm = m.to_vec();
    for k in 1..=n {
        let mut prod = mul(&mm, &mk);
        for i in 0..n {
            prod[i][i] += c[k - 1];
        }
        mk = prod;
        let amk = mul(&mm, &mk);
        let tr: Complex64 = (0..n).map(|i| amk[i][i]).sum();
        c.push(-tr / k as f64);
    }
    let eval = |z: Complex64| c.iter().fold(Complex64::default(), |acc, &ck| acc * z + ck);
    let seed = Complex64::new(0.4, 0.9);
    let scale = 1.0 + (1..=n).map(|k| c[k].norm().powf(1.0 / k as f64)).fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * scale).collect();
    for _ in 0..5000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// Largest distance from each member of `a` to its nearest member of `b`.
pub fn set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn trapz(h: f64, v: &[f64]) -> f64 {
    h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
}

pub fn l2(f: &HalflineFunction) -> f64 {
    let sq: Vec<f64> = f.values.iter().map(|v| v.norm_sqr()).collect();
    trapz(f.step(), &sq).sqrt()
}

/// Random smooth decaying f with ⟨f, sech⟩ removed.
pub fn random_constrained(rng: &mut ChaCha8Rng, grid: &HalflineGrid) -> HalflineFunction {
    let terms: Vec<(f64, f64, f64)> = (0..4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.5..2.0))).collect();
    let raw = |y: f64| terms.iter().map(|&(a, s, w)| a * (-(y - s) * (y - s) / w).exp()).sum::<f64>();
    let f = HalflineFunction::from_real_fn(grid, raw);
    // ⟨sech, sech⟩ on the same rule
    let ss = HalflineFunction::from_real_fn(grid, sech).sech_moment();
    let k = f.sech_moment() / ss;
    HalflineFunction::from_fn(grid, |y| raw(y) - k * sech(y))
}

/// max |w′ − tanh·w − μw − f| with a sixth-order difference, away from the ends.
pub fn oracle_residual(mu: Complex64, w: &HalflineFunction, f: &HalflineFunction) -> f64 {
    let h = w.step();
    let v = &w.values;
    let mut worst = 0.0f64;
    for k in 3..v.len() - 3 {
        let d = (-v[k - 3] + 9.0 * v[k - 2] - 45.0 * v[k - 1] + 45.0 * v[k + 1] - 9.0 * v[k + 2] + v[k + 3]) / (60.0 * h);
        worst = worst.max((d - w.grid[k].tanh() * v[k] - mu * v[k] - f.values[k]).norm());
    }
    worst
}
