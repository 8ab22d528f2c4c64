//! Closed-form solutions of the differentiated eigenvalue problem Af = λf and
//! a sampled test of which of them lie in the operator domain.

use crate::error::Result;
use crate::quadrature::{adaptive_complex, GaussLegendre};
use crate::waves::{peaked_coefficient, Power};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Ratio of successive refinement norms above which the derivative norm is
/// considered divergent.
pub const STABILITY_RATIO: f64 = 1.1;
/// Largest |mean| accepted for a member.
pub const MEAN_TOL: f64 = 1e-10;
/// Largest relative ‖Af − λf‖/‖f‖ for an admissible eigenfunction.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-2;
/// Grids 64·2^k, k = 0..4.
pub const REFINEMENTS: [usize; 5] = [64, 128, 256, 512, 1024];

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// f₁ = 2z + 3λ (p = 1) or sign(z) (p = 2).
pub fn first_solution(lambda: Complex64, power: Power, z: f64) -> Complex64 {
    match power {
        Power::Quadratic => 2.0 * z + 3.0 * lambda,
        Power::Cubic => cx(z.signum()),
    }
}

/// g′ with g₀ = 1 (p = 1), or f′ on the non-constant branch with g± = 1 (p = 2).
/// `None` at the singular points of the formula.
pub fn second_derivative_factor(lambda: Complex64, power: Power, z: Complex64) -> Option<Complex64> {
    match power {
        Power::Quadratic => {
            let f1 = 2.0 * z + 3.0 * lambda;
            let w = PI * PI - z * z;
            if f1.norm() < 1e-12 || w.norm() < 1e-12 {
                return None;
            }
            let ratio = (PI + z) / (PI - z);
            Some(ratio.powc(3.0 * lambda / PI) / (w * w * f1 * f1))
        }
        Power::Cubic => {
            // real z only; the sign picks the branch
            let x = z.re;
            let a = x.abs();
            if a == 0.0 || a >= PI {
                return None;
            }
            let s = if x > 0.0 { 1.0 } else { -1.0 };
            let base = cx(a / (PI - a));
            Some(base.powc(s * 2.0 * lambda / PI) / (x * x * (PI - a) * (PI - a)))
        }
    }
}

/// Second solution f₂ = f₁·g (p = 1) with g integrated along a segment from
/// ±i that avoids the pole of g′ at z = −3λ/2; for p = 2 the branch
/// primitive F± = ∫_{±π/2}^{z} f′, zero on the other half.
pub fn second_solution(lambda: Complex64, power: Power, z: f64) -> Complex64 {
    match power {
        Power::Quadratic => {
            let pole = -1.5 * lambda;
            let start = if pole.im > 0.0 { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) };
            let end = cx(z);
            let d = end - start;
            let g = adaptive_complex(
                |t| second_derivative_factor(lambda, power, start + d * t).unwrap_or_default() * d,
                0.0,
                1.0,
                1e-13,
                1e-12,
            );
            first_solution(lambda, power, z) * g.value
        }
        Power::Cubic => {
            if z == 0.0 {
                return Complex64::default();
            }
            let base = 0.5 * PI * z.signum();
            adaptive_complex(|s| second_derivative_factor(lambda, power, cx(s)).unwrap_or_default(), base, z, 1e-13, 1e-12)
                .value
        }
    }
}

/// Endpoint exponents of g′: fitted and predicted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointExponents {
    pub fitted_plus: f64,
    pub fitted_minus: f64,
    pub predicted_plus: f64,
    pub predicted_minus: f64,
}

/// −3λ/π − 2 at +π and 3λ/π − 2 at −π (p = 1); ∓2λ/π − 2 for p = 2.
pub fn predicted_exponents(lambda: Complex64, power: Power) -> (f64, f64) {
    let k = match power {
        Power::Quadratic => 3.0 / PI,
        Power::Cubic => 2.0 / PI,
    };
    (-k * lambda.re - 2.0, k * lambda.re - 2.0)
}

/// Least-squares slope of log|g′| against log(distance to the endpoint) over
/// distances in [0.01, 0.5], with a linear-in-distance term absorbing the
/// first correction to the power law.
fn fit_exponent<F: Fn(f64) -> Option<Complex64>>(gp: F) -> f64 {
    let m = 200;
    let mut rows = Vec::with_capacity(m);
    for k in 0..m {
        let d = 0.01 * (50f64).powf(k as f64 / (m - 1) as f64);
        if let Some(v) = gp(d) {
            if v.norm() > 0.0 {
                rows.push((d.ln(), d, v.norm().ln()));
            }
        }
    }
    // normal equations for [1, ln d, d]
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for &(l, d, y) in &rows {
        let r = [1.0, l, d];
        for i in 0..3 {
            atb[i] += r[i] * y;
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    solve3(ata, atb)[1]
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for c in 0..3 {
        let p = (c..3).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap_or(c);
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    x
}

pub fn endpoint_exponents(lambda: Complex64, power: Power) -> EndpointExponents {
    let (predicted_plus, predicted_minus) = predicted_exponents(lambda, power);
    EndpointExponents {
        fitted_plus: fit_exponent(|d| second_derivative_factor(lambda, power, cx(PI - d))),
        fitted_minus: fit_exponent(|d| second_derivative_factor(lambda, power, cx(-PI + d))),
        predicted_plus,
        predicted_minus,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenOdeSolution {
    pub lambda: Complex64,
    pub power: Power,
    /// Nodes actually evaluated.
    pub grid: Vec<f64>,
    pub f1_samples: Vec<Complex64>,
    pub g_prime_samples: Vec<Complex64>,
    /// Indices of input nodes dropped because the formulas are singular there.
    pub skipped: Vec<usize>,
    pub exponents: EndpointExponents,
}

pub fn eigen_ode_solutions(lambda: Complex64, power: Power, grid: &[f64]) -> EigenOdeSolution {
    let mut kept = Vec::with_capacity(grid.len());
    let mut f1 = Vec::with_capacity(grid.len());
    let mut gp = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    for (i, &z) in grid.iter().enumerate() {
        match second_derivative_factor(lambda, power, cx(z)) {
            Some(g) if g.is_finite() && z.abs() < PI => {
                kept.push(z);
                f1.push(first_solution(lambda, power, z));
                gp.push(g);
            }
            _ => skipped.push(i),
        }
    }
    EigenOdeSolution {
        lambda,
        power,
        grid: kept,
        f1_samples: f1,
        g_prime_samples: gp,
        skipped,
        exponents: endpoint_exponents(lambda, power),
    }
}

/// (π² − z²)f″ − 4zf′ + 4f − 6λf′ for p = 1, or
/// |z|(π − |z|)f″ + 2 sign(z)(π − 2|z|)f′ − 2λf′ for p = 2.
pub fn spectral_ode_residual(lambda: Complex64, power: Power, z: f64, f: Complex64, df: Complex64, d2f: Complex64) -> Complex64 {
    match power {
        Power::Quadratic => (PI * PI - z * z) * d2f - 4.0 * z * df + 4.0 * f - 6.0 * lambda * df,
        Power::Cubic => {
            let a = z.abs();
            a * (PI - a) * d2f + 2.0 * z.signum() * (PI - 2.0 * a) * df - 2.0 * lambda * df
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub member: bool,
    /// |mean| on the finest grid.
    pub mean: f64,
    /// ‖∂_z[(c − U^p)f]‖ on each refinement.
    pub norms: Vec<f64>,
    pub ratios: Vec<f64>,
    pub mean_ok: bool,
    pub stable: bool,
}

fn midpoint_grid(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| -PI + h * (j as f64 + 0.5)).collect()
}

/// Membership in dom(A): zero mean and a derivative norm of (c − U^p)f that
/// stays put under dyadic refinement. Samples are taken at cell midpoints,
/// so the peaks are never evaluated.
pub fn domain_membership<F: Fn(f64) -> Complex64>(f: F, power: Power) -> MembershipReport {
    let mut norms = Vec::with_capacity(REFINEMENTS.len());
    let mut mean = 0.0;
    for &n in &REFINEMENTS {
        let h = 2.0 * PI / n as f64;
        let z = midpoint_grid(n);
        let vals: Vec<Complex64> = z.iter().map(|&x| f(x)).collect();
        let q: Vec<Complex64> = z.iter().zip(&vals).map(|(&x, v)| peaked_coefficient(power, x) * v).collect();
        // differences across each cell face, the face at ±π wrapping around
        let sq: f64 = (0..n).map(|j| ((q[(j + 1) % n] - q[j]) / h).norm_sqr()).sum();
        norms.push((sq * h).sqrt());
        mean = (vals.iter().sum::<Complex64>() / n as f64).norm();
    }
    let ratios: Vec<f64> = norms.windows(2).map(|w| w[1] / w[0]).collect();
    let stable = norms.iter().all(|v| v.is_finite()) && ratios.iter().all(|&r| r <= STABILITY_RATIO);
    let mean_ok = mean <= MEAN_TOL;
    MembershipReport { member: stable && mean_ok, mean, norms, ratios, mean_ok, stable }
}

/// ‖Af − λf‖/‖f‖ on the finest midpoint grid, with ∂^{-1} the zero-mean primitive.
pub fn eigen_residual<F: Fn(f64) -> Complex64>(f: F, lambda: Complex64, power: Power) -> f64 {
    let n = *REFINEMENTS.last().unwrap_or(&1024);
    let h = 2.0 * PI / n as f64;
    let z = midpoint_grid(n);
    let v: Vec<Complex64> = z.iter().map(|&x| f(x)).collect();
    let q: Vec<Complex64> = z.iter().zip(&v).map(|(&x, f)| peaked_coefficient(power, x) * f).collect();
    let mut prim = Vec::with_capacity(n);
    let mut acc = Complex64::default();
    for j in 0..n {
        prim.push(acc + 0.5 * h * v[j]);
        acc += h * v[j];
    }
    let pm = prim.iter().sum::<Complex64>() / n as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..n {
        let dq = (q[(j + 1) % n] - q[(j + n - 1) % n]) / (2.0 * h);
        num += (dq + prim[j] - pm - lambda * v[j]).norm_sqr();
        den += v[j].norm_sqr();
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub label: String,
    pub membership: MembershipReport,
    pub eigen_residual: f64,
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub lambda: Complex64,
    pub candidates: Vec<CandidateReport>,
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub power: Power,
    pub entries: Vec<ScanEntry>,
    pub admissible: Vec<Complex64>,
}

type Basis = Vec<(String, Box<dyn Fn(f64) -> Complex64 + Sync>)>;

fn basis(lambda: Complex64, power: Power) -> Basis {
    match power {
        Power::Quadratic => vec![
            ("f1".into(), Box::new(move |z| first_solution(lambda, power, z))),
            ("f2".into(), Box::new(move |z| second_solution(lambda, power, z))),
        ],
        Power::Cubic => vec![
            ("chi+".into(), Box::new(|z: f64| cx(if z > 0.0 { 1.0 } else { 0.0 }))),
            ("chi-".into(), Box::new(|z: f64| cx(if z < 0.0 { 1.0 } else { 0.0 }))),
            ("F+".into(), Box::new(move |z: f64| if z > 0.0 { second_solution(lambda, power, z) } else { Complex64::default() })),
            ("F-".into(), Box::new(move |z: f64| if z < 0.0 { second_solution(lambda, power, z) } else { Complex64::default() })),
        ],
    }
}

fn mean_of<F: Fn(f64) -> Complex64 + ?Sized>(f: &F) -> Complex64 {
    let gl = GaussLegendre::new(16);
    let panels = 64;
    let h = PI / panels as f64;
    (0..2 * panels).map(|k| {
        let a = -PI + h * k as f64;
        gl.integrate_complex(a, a + h, f)
    })
    .sum::<Complex64>()
        / (2.0 * PI)
}

fn judge<F: Fn(f64) -> Complex64>(label: String, f: F, lambda: Complex64, power: Power) -> CandidateReport {
    let membership = domain_membership(&f, power);
    let eigen_residual = if membership.member { eigen_residual(&f, lambda, power) } else { f64::NAN };
    let admissible = membership.member && eigen_residual <= EIGEN_RESIDUAL_TOL;
    CandidateReport { label, membership, eigen_residual, admissible }
}

/// Test every basis function and every zero-mean pair combination.
pub fn scan_lambda(lambda: Complex64, power: Power) -> ScanEntry {
    let basis = basis(lambda, power);
    let means: Vec<Complex64> = basis.iter().map(|(_, f)| mean_of(f.as_ref())).collect();
    let mut candidates = Vec::new();
    for (label, f) in &basis {
        candidates.push(judge(label.clone(), f, lambda, power));
    }
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if i == j || means[j].norm() < 1e-300 || !means[j].is_finite() {
                continue;
            }
            let a = means[i] / means[j];
            if !a.is_finite() || a.norm() == 0.0 {
                continue;
            }
            let (fi, fj) = (&basis[i].1, &basis[j].1);
            let label = format!("{} - ({:.4}) {}", basis[i].0, a, basis[j].0);
            candidates.push(judge(label, |z| fi(z) - a * fj(z), lambda, power));
        }
    }
    let admissible = candidates.iter().any(|c| c.admissible);
    ScanEntry { lambda, candidates, admissible }
}

/// λ values whose solution space contains a nonzero member of dom(A) solving Af = λf.
pub fn point_spectrum_scan(lambdas: &[Complex64], power: Power) -> Result<ScanReport> {
    use rayon::prelude::*;
    let entries: Vec<ScanEntry> = lambdas.par_iter().map(|&l| scan_lambda(l, power)).collect();
    let admissible = entries.iter().filter(|e| e.admissible).map(|e| e.lambda).collect();
    Ok(ScanReport { power, entries, admissible })
}
