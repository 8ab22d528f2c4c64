//! The truncated operator after the hyperbolic-tangent change of variables:
//! B₀ = ∂_y − tanh(y) acting on functions orthogonal to sech on the line.

use crate::error::{invalid, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::waves::Power;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest truncation radius; sech(33) < 1e−14.
pub const MIN_RADIUS: f64 = 35.0;
/// Default grid step.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Relative size at ±Y below which a sampled function counts as decaying.
pub const DECAY_TOL: f64 = 1e-10;

/// Uniform grid y_k = −Y + k·h on [−Y, Y].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalflineGrid {
    pub y_max: f64,
    pub intervals: usize,
}

impl HalflineGrid {
    pub fn new(y_max: f64, step: f64) -> Result<Self> {
        if !(y_max >= MIN_RADIUS) || !(step > 0.0) {
            return Err(invalid(format!("half-line grid needs Y >= {MIN_RADIUS} and a positive step")));
        }
        let intervals = ((2.0 * y_max / step).round() as usize).max(2);
        let intervals = intervals + intervals % 2;
        Ok(Self { y_max, intervals })
    }

    pub fn standard() -> Self {
        Self::new(MIN_RADIUS, DEFAULT_STEP).expect("standard grid is valid")
    }

    /// Radius at which exponential tails with rate ||Re μ| − 1| fall well below
    /// [`DECAY_TOL`], capped at 600.
    pub fn for_mu(mu: Complex64) -> Self {
        let gap = (mu.re.abs() - 1.0).abs();
        let y_max = if gap > 0.0 { (32.0 / gap).clamp(MIN_RADIUS, 600.0) } else { 600.0 };
        Self::new(y_max, DEFAULT_STEP).expect("radius within range")
    }

    pub fn step(&self) -> f64 {
        2.0 * self.y_max / self.intervals as f64
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.intervals).map(|k| -self.y_max + h * k as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalflineFunction {
    pub y_max: f64,
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub decay_flag: bool,
}

impl HalflineFunction {
    /// Samples of `f` with the decay flag computed from the samples.
    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: &HalflineGrid, f: F) -> Self {
        let pts = grid.points();
        let values: Vec<Complex64> = pts.iter().map(|&y| f(y)).collect();
        Self::from_samples(grid.y_max, pts, values)
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: &HalflineGrid, f: F) -> Self {
        Self::from_fn(grid, |y| Complex64::new(f(y), 0.0))
    }

    fn from_samples(y_max: f64, grid: Vec<f64>, values: Vec<Complex64>) -> Self {
        let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let ends = values.first().map_or(0.0, |v| v.norm()).max(values.last().map_or(0.0, |v| v.norm()));
        let decay_flag = ends <= DECAY_TOL * peak;
        Self { y_max, grid, values, decay_flag }
    }

    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    /// ∫ a(y)·conj-free b(y) dy by the trapezoid rule (the bilinear pairing).
    pub fn pair_with<F: Fn(f64) -> f64>(&self, weight: F) -> Complex64 {
        trapezoid(self.step(), self.grid.iter().zip(&self.values).map(|(&y, v)| v * weight(y)))
    }

    /// ⟨f, sech⟩
    pub fn sech_moment(&self) -> Complex64 {
        self.pair_with(sech)
    }

    pub fn l2_norm(&self) -> f64 {
        trapezoid(self.step(), self.values.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0))).re.sqrt()
    }

    /// The function y ↦ f(−y) on the same (symmetric) grid.
    pub fn reflected(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self::from_samples(self.y_max, self.grid.clone(), values)
    }

    fn scaled(&self, s: f64) -> Self {
        Self::from_samples(self.y_max, self.grid.clone(), self.values.iter().map(|v| v * s).collect())
    }
}

fn trapezoid<I: Iterator<Item = Complex64>>(h: f64, values: I) -> Complex64 {
    let v: Vec<Complex64> = values.collect();
    if v.len() < 2 {
        return Complex64::default();
    }
    let inner: Complex64 = v[1..v.len() - 1].iter().sum();
    (inner + 0.5 * (v[0] + v[v.len() - 1])) * h
}

pub fn sech(y: f64) -> f64 {
    let e = (-y.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// ln cosh(y) without overflow.
fn ln_cosh(y: f64) -> f64 {
    let a = y.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralRegion {
    Resolvent,
    Residual,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuClassification {
    pub mu: Complex64,
    pub region: SpectralRegion,
}

/// μ = 6λ/π (p = 1) or 4λ/π (p = 2).
pub fn mu_from_lambda(lambda: Complex64, power: Power) -> Complex64 {
    lambda / power.strip_half_width()
}

pub fn lambda_from_mu(mu: Complex64, power: Power) -> Complex64 {
    mu * power.strip_half_width()
}

/// Region by Re μ alone; Im μ never matters.
pub fn classify_mu(mu: Complex64) -> MuClassification {
    let m = mu.re.abs();
    let region = if m > 1.0 {
        SpectralRegion::Resolvent
    } else if m < 1.0 {
        SpectralRegion::Residual
    } else {
        SpectralRegion::Continuous
    };
    MuClassification { mu, region }
}

/// Samples of a function given by its logarithm; rescaled to max modulus 1
/// only when the raw values would overflow.
fn from_log<F: Fn(f64) -> (f64, f64)>(grid: &HalflineGrid, log_mod_phase: F) -> HalflineFunction {
    let pts = grid.points();
    let logs: Vec<(f64, f64)> = pts.iter().map(|&y| log_mod_phase(y)).collect();
    let top = logs.iter().map(|l| l.0).fold(f64::NEG_INFINITY, f64::max);
    let shift = if top > 600.0 { top } else { 0.0 };
    let values = logs.iter().map(|&(l, ph)| Complex64::from_polar((l - shift).exp(), ph)).collect();
    let end = logs[0].0.max(logs[logs.len() - 1].0);
    HalflineFunction { y_max: grid.y_max, grid: pts, values, decay_flag: end - top <= DECAY_TOL.ln() }
}

/// w = cosh(y)e^{μy}, the only solution of B₀w = μw.
pub fn kernel_solution(mu: Complex64, grid: &HalflineGrid) -> HalflineFunction {
    from_log(grid, |y| (ln_cosh(y) + mu.re * y, mu.im * y))
}

/// w = e^{−μy}sech(y), the kernel of the adjoint.
pub fn adjoint_kernel(mu: Complex64, grid: &HalflineGrid) -> HalflineFunction {
    from_log(grid, |y| (-ln_cosh(y) - mu.re * y, -mu.im * y))
}

/// C_μ = 1/(2(m−1)) + 2/(m+1) + 2/(m−1), m = |Re μ|.
pub fn resolvent_bound(mu: Complex64) -> f64 {
    let m = mu.re.abs();
    1.0 / (2.0 * (m - 1.0)) + 2.0 / (m + 1.0) + 2.0 / (m - 1.0)
}

/// Solve w′ − tanh(y)w − μw = f for |Re μ| > 1 with f ⟂ sech.
///
/// Re μ > 1 uses w(y) = −cosh(y)∫_y^∞ e^{μ(y−y′)} sech(y′) f(y′) dy′,
/// evaluated by a backward recursion over cells (stable since
/// |e^{−μh}| < 1) with cubic interpolation of f and Gauss–Legendre per cell.
/// Re μ < −1 reflects: w(y) = W(−y) with W solving the problem for −μ and
/// right-hand side −f(−y).
pub fn resolvent_solve(mu: Complex64, f: &HalflineFunction) -> Result<HalflineFunction> {
    if mu.re.abs() <= 1.0 {
        return Err(Error::OutOfRegion { mu, what: "resolvent_solve (needs |Re mu| > 1)".into() });
    }
    if f.values.len() < 8 {
        return Err(invalid("right-hand side needs at least 8 samples"));
    }
    let moment = f.sech_moment().norm();
    if moment > 1e-10 {
        return Err(invalid(format!("right-hand side violates <f, sech> = 0 (|<f, sech>| = {moment:.3e})")));
    }
    let w = if mu.re > 1.0 {
        solve_right(mu, f)
    } else {
        solve_right(-mu, &f.reflected().scaled(-1.0)).reflected()
    };
    if !w.decay_flag {
        return Err(Error::Quadrature(format!("solution does not decay on [-{0}, {0}]", f.y_max)));
    }
    Ok(w)
}

fn solve_right(mu: Complex64, f: &HalflineFunction) -> HalflineFunction {
    let y = &f.grid;
    let n = y.len();
    let h = f.step();
    let gl = GaussLegendre::new(6);
    let decay = (-mu * h).exp();
    let mut acc = Complex64::default();
    let mut values = vec![Complex64::default(); n];
    for j in (0..n - 1).rev() {
        // cubic through four neighbouring samples, shifted at the ends
        let s = j.saturating_sub(1).min(n - 4);
        let nodes = [y[s], y[s + 1], y[s + 2], y[s + 3]];
        let vals = [f.values[s], f.values[s + 1], f.values[s + 2], f.values[s + 3]];
        let cell = gl.integrate_complex(y[j], y[j + 1], |t| {
            (-mu * (t - y[j])).exp() * sech(t) * lagrange4(&nodes, &vals, t)
        });
        acc = decay * acc + cell;
        values[j] = -Complex64::new(y[j].cosh(), 0.0) * acc;
    }
    HalflineFunction::from_samples(f.y_max, y.clone(), values)
}

fn lagrange4(x: &[f64; 4], v: &[Complex64; 4], t: f64) -> Complex64 {
    let mut out = Complex64::default();
    for i in 0..4 {
        let mut l = 1.0;
        for k in 0..4 {
            if k != i {
                l *= (t - x[k]) / (x[i] - x[k]);
            }
        }
        out += v[i] * l;
    }
    out
}

/// Max over interior nodes of |w′ − tanh(y)w − μw − f|, with w′ from
/// fourth-order central differences.
pub fn ode_residual(mu: Complex64, w: &HalflineFunction, f: &HalflineFunction) -> f64 {
    let h = w.step();
    let v = &w.values;
    (2..v.len().saturating_sub(2))
        .map(|k| {
            let dw = (v[k - 2] - 8.0 * v[k - 1] + 8.0 * v[k + 1] - v[k + 2]) / (12.0 * h);
            (dw - w.grid[k].tanh() * v[k] - mu * v[k] - f.values[k]).norm()
        })
        .fold(0.0, f64::max)
}

/// Solvability functionals for |Re μ| < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    /// ∫ e^{−μy} sech(y) f(y) dy
    pub primary: Complex64,
    /// ∫_ℝ ∫_{∞}^{y} sech(y′) f(y′) dy′ dy, only at μ = 0.
    pub secondary: Option<Complex64>,
}

pub fn residual_constraints(mu: Complex64, f: &HalflineFunction) -> Result<Constraints> {
    if mu.re.abs() >= 1.0 {
        return Err(Error::OutOfRegion { mu, what: "residual_constraints (needs |Re mu| < 1)".into() });
    }
    let h = f.step();
    let primary = trapezoid(h, f.grid.iter().zip(&f.values).map(|(&y, v)| (-mu * y).exp() * sech(y) * v));
    let secondary = (mu == Complex64::default()).then(|| {
        // G(y) = −∫_y^Y sech f, accumulated backwards, then integrated over y
        let n = f.grid.len();
        let g: Vec<Complex64> = f.grid.iter().zip(&f.values).map(|(&y, v)| sech(y) * v).collect();
        let mut inner = vec![Complex64::default(); n];
        for k in (0..n - 1).rev() {
            inner[k] = inner[k + 1] - 0.5 * h * (g[k] + g[k + 1]);
        }
        trapezoid(h, inner.into_iter())
    });
    Ok(Constraints { primary, secondary })
}

/// Partial integrals ∫_{−R}^{R} e^{−μy} sech(y) f(y) dy for growing R; at
/// Re μ = ±1 and f ∈ L² \ L¹ these do not settle.
pub fn constraint_partial_integrals<F: Fn(f64) -> f64>(mu: Complex64, f: F, radii: &[f64]) -> Vec<Complex64> {
    let gl = GaussLegendre::new(16);
    radii
        .iter()
        .map(|&r| {
            let panels = (r.ceil() as usize).max(1) * 4;
            gl.composite_complex(-r, r, 2 * panels, |y| {
                // e^{−μy}sech(y) written to avoid overflow of e^{−μy}
                let lg = -mu.re * y - ln_cosh(y);
                Complex64::from_polar(lg.exp(), -mu.im * y) * f(y)
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapDirection {
    Forward,
    Inverse,
}

/// Which bijection a mapped point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// z = π tanh(πξ/6) onto (−π, π)
    Full,
    /// z₊ onto (0, π)
    Upper,
    /// z₋ onto (−π, 0)
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappedPoint {
    pub chart: Chart,
    /// z for forward maps, ξ for inverse maps.
    pub value: f64,
    /// dz/dξ = (c* − U*^p)(z) at the point.
    pub jacobian: f64,
}

/// y = πξ/6 (p = 1) or πξ/4 (p = 2).
pub fn y_from_xi(power: Power, xi: f64) -> f64 {
    xi * power.strip_half_width()
}

/// ξ ↔ z. Forward maps each ξ to one point (p = 1) or to the pair z₊, z₋
/// (p = 2). Inverse picks the chart from the sign of z.
pub fn coordinate_map(direction: MapDirection, power: Power, points: &[f64]) -> Result<Vec<MappedPoint>> {
    let mut out = Vec::with_capacity(points.len() * 2);
    for &p in points {
        if !p.is_finite() {
            return Err(invalid("coordinate map needs finite points"));
        }
        match (direction, power) {
            (MapDirection::Forward, Power::Quadratic) => {
                let t = y_from_xi(power, p).tanh();
                let z = PI * t;
                out.push(MappedPoint { chart: Chart::Full, value: z, jacobian: PI * PI / 6.0 * (1.0 - t * t) });
            }
            (MapDirection::Forward, Power::Cubic) => {
                let t = y_from_xi(power, p).tanh();
                let jac = PI * PI / 8.0 * (1.0 - t * t);
                out.push(MappedPoint { chart: Chart::Upper, value: 0.5 * PI * (1.0 + t), jacobian: jac });
                out.push(MappedPoint { chart: Chart::Lower, value: -0.5 * PI * (1.0 - t), jacobian: jac });
            }
            (MapDirection::Inverse, Power::Quadratic) => {
                if p.abs() >= PI {
                    return Err(invalid(format!("z = {p} is not in the open interval (-pi, pi)")));
                }
                let y = (p / PI).atanh();
                let jac = (PI * PI - p * p) / 6.0;
                out.push(MappedPoint { chart: Chart::Full, value: y / power.strip_half_width(), jacobian: jac });
            }
            (MapDirection::Inverse, Power::Cubic) => {
                if p == 0.0 || p.abs() >= PI {
                    return Err(invalid(format!("z = {p} is not in (-pi, 0) or (0, pi)")));
                }
                let (chart, t) = if p > 0.0 { (Chart::Upper, 2.0 * p / PI - 1.0) } else { (Chart::Lower, 2.0 * p / PI + 1.0) };
                let y = t.atanh();
                let jac = 0.5 * p.abs() * (PI - p.abs());
                out.push(MappedPoint { chart, value: y / power.strip_half_width(), jacobian: jac });
            }
        }
    }
    Ok(out)
}

/// Image of a periodic field under v(z) = cosh(y)w(y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TransformedField {
    Single(HalflineFunction),
    Pair { upper: HalflineFunction, lower: HalflineFunction },
}

/// w(y) = v(z(y))·sech(y) on `grid`; two pieces for p = 2.
pub fn transform_field<F: Fn(f64) -> f64>(v: F, power: Power, grid: &HalflineGrid) -> TransformedField {
    match power {
        Power::Quadratic => TransformedField::Single(HalflineFunction::from_real_fn(grid, |y| v(PI * y.tanh()) * sech(y))),
        Power::Cubic => TransformedField::Pair {
            upper: HalflineFunction::from_real_fn(grid, |y| v(0.5 * PI * (1.0 + y.tanh())) * sech(y)),
            lower: HalflineFunction::from_real_fn(grid, |y| v(-0.5 * PI * (1.0 - y.tanh())) * sech(y)),
        },
    }
}

/// Sampled version of [`transform_field`]; `values` live on the periodic
/// grid z_j = −π + 2πj/n and are trigonometrically interpolated.
pub fn transform_samples(values: &[f64], power: Power, grid: &HalflineGrid) -> TransformedField {
    let spec = crate::fourier::grid_coefficients(values);
    transform_field(|z| crate::fourier::trig_interpolate(&spec, z), power, grid)
}
