//! Time integration of v_t = Av in coefficient space and of the nonlinear
//! equation u_t + u^p u_x = ∂_x^{-1}u on a periodic grid.

use crate::error::{invalid, Error, Result};
use crate::fourier::{periodic_grid, FourierVector, ModeSet};
use crate::spectral_ops::OperatorMatrix;
use crate::waves::{peaked_profile, smooth_wave_solve_with, Power};
use faer::Mat;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Slope factor that flags wave breaking.
pub const BREAKING_FACTOR: f64 = 50.0;
/// Courant limit max|u|^p · n · dt.
pub const CFL_LIMIT: f64 = 0.5;
/// Largest |hλ| on the imaginary axis inside the RK4 stability region, rounded down.
pub const RK4_IMAG_LIMIT: f64 = 2.8;
/// Norms above this stop a linear run.
pub const OVERFLOW_NORM: f64 = 1e200;
/// R² below which a growth fit is reported as poor.
pub const FIT_R2_WARN: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// max |∫u dz| over the run (nonlinear).
    pub mass_drift: f64,
    /// max relative change of ∫u² dz (nonlinear).
    pub l2_drift: f64,
    pub overflow: bool,
    pub breaking_time: Option<f64>,
    pub steps: usize,
    /// Mean of the input removed before a nonlinear run.
    pub removed_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub fitted_rate: Option<f64>,
    pub diagnostics: Diagnostics,
    /// Coefficients at the last recorded time (linear runs).
    pub final_state: Option<FourierVector>,
}

impl EvolutionTrace {
    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }
}

/// ‖M‖_∞, an upper bound for the spectral radius.
pub fn row_sum_norm(m: &OperatorMatrix) -> f64 {
    let a = m.entries();
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Default linear step 0.5/N.
pub fn default_linear_step(cutoff: usize) -> f64 {
    0.5 / cutoff.max(1) as f64
}

fn identity(n: usize) -> Mat<Complex64> {
    Mat::from_fn(n, n, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::default() })
}

/// One RK4 step of v_t = Mv as the matrix Σ_{k≤4} (hM)^k / k!.
pub fn rk4_propagator(m: &Mat<Complex64>, h: f64) -> Mat<Complex64> {
    let n = m.nrows();
    let hm = Mat::from_fn(n, n, |i, j| m[(i, j)] * h);
    let eye = identity(n);
    let mut s = eye.clone();
    for k in [4.0, 3.0, 2.0, 1.0] {
        let scaled = Mat::from_fn(n, n, |i, j| hm[(i, j)] / k);
        s = &eye + &scaled * &s;
    }
    s
}

fn matrix_power(m: &Mat<Complex64>, mut e: usize) -> Mat<Complex64> {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

fn matvec(m: &Mat<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Integrate v_t = Mv with classical RK4, recording about `samples` norms.
///
/// The per-step polynomial is formed once and raised to the sampling stride
/// by squaring, which is the same scheme as stepping but costs one product per sample.
pub fn evolve_linear_sampled(m: &OperatorMatrix, v0: &FourierVector, dt: f64, horizon: f64, samples: usize) -> Result<EvolutionTrace> {
    if !(horizon > 0.0) || !(dt > 0.0) {
        return Err(invalid("step and horizon must be positive"));
    }
    if v0.coeffs().len() != m.dim() || v0.kappa() != m.kappa() {
        return Err(Error::DimensionMismatch { left: v0.coeffs().len(), right: m.dim() });
    }
    let bound = dt * row_sum_norm(m);
    if bound > RK4_IMAG_LIMIT {
        return Err(Error::Cfl { courant: bound, limit: RK4_IMAG_LIMIT });
    }
    let total = (horizon / dt).round().max(1.0) as usize;
    let stride = (total / samples.max(1)).max(1);
    let step = rk4_propagator(m.entries(), dt);
    let jump = matrix_power(&step, stride);
    let mut v = v0.coeffs().to_vec();
    let mut times = vec![0.0];
    let mut norms = vec![l2(&v)];
    let mut done = 0;
    let mut diagnostics = Diagnostics::default();
    while done < total {
        let k = stride.min(total - done);
        v = if k == stride { matvec(&jump, &v) } else { matvec(&matrix_power(&step, k), &v) };
        done += k;
        let nv = l2(&v);
        if !nv.is_finite() || nv > OVERFLOW_NORM {
            diagnostics.overflow = true;
            break;
        }
        times.push(done as f64 * dt);
        norms.push(nv);
    }
    diagnostics.steps = done;
    let final_state = FourierVector::new(*v0.modes(), v).ok().filter(|_| !diagnostics.overflow);
    let mut trace = EvolutionTrace { times, norms, snapshots: Vec::new(), fitted_rate: None, diagnostics, final_state };
    trace.fitted_rate = growth_rate_fit(&trace, 0.5).ok().map(|f| f.rate);
    Ok(trace)
}

pub fn evolve_linear(m: &OperatorMatrix, v0: &FourierVector, dt: f64, horizon: f64) -> Result<EvolutionTrace> {
    evolve_linear_sampled(m, v0, dt, horizon, 400)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub rate: f64,
    pub r_squared: f64,
    /// R² fell below [`FIT_R2_WARN`].
    pub poor_fit: bool,
    pub samples: usize,
}

/// Least-squares slope of log‖v‖ against t over the trailing `window` fraction of the run.
pub fn growth_rate_fit(trace: &EvolutionTrace, window: f64) -> Result<GrowthFit> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(invalid("fit window must lie in (0, 1]"));
    }
    let t_end = trace.final_time();
    let t0 = trace.times.first().copied().unwrap_or(0.0);
    let start = t_end - window * (t_end - t0);
    let pts: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.norms)
        .filter(|(&t, &n)| t >= start - 1e-12 && n > 0.0)
        .map(|(&t, &n)| (t, n.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(invalid(format!("growth fit needs at least 10 samples in the window, got {}", pts.len())));
    }
    let k = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let rate = sty / stt;
    let r_squared = if syy <= 1e-24 { 1.0 } else { (sty * sty / (stt * syy)).min(1.0) };
    Ok(GrowthFit { rate, r_squared, poor_fit: r_squared < FIT_R2_WARN, samples: pts.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearOptions {
    /// Spacing of recorded snapshots.
    pub sample_every: f64,
    pub breaking_factor: f64,
    pub keep_snapshots: bool,
}

impl Default for NonlinearOptions {
    fn default() -> Self {
        Self { sample_every: 0.05, breaking_factor: BREAKING_FACTOR, keep_snapshots: true }
    }
}

struct Pseudospectral {
    n: usize,
    power: Power,
    k: Vec<f64>,
    keep: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Pseudospectral {
    fn new(n: usize, power: Power) -> Self {
        let mut planner = FftPlanner::new();
        // 2/3 rule for the quadratic flux, 1/2 rule for the cubic one
        let kmax = match power {
            Power::Quadratic => (n - 1) / 3,
            Power::Cubic => (n - 1) / 4,
        } as f64;
        let k: Vec<f64> = (0..n).map(|j| crate::fourier::bin_wavenumber(j, n)).collect();
        let keep = (0..n)
            .map(|j| {
                let w = crate::fourier::bin_wavenumber(j, n);
                j != 0 && w != 0.0 && w.abs() <= kmax
            })
            .collect();
        Self { n, power, k, keep, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    fn to_spec(&self, u: &[f64]) -> Vec<Complex64> {
        let mut b: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fwd.process(&mut b);
        let s = 1.0 / self.n as f64;
        b.iter_mut().zip(&self.keep).for_each(|(c, &k)| *c = if k { *c * s } else { Complex64::default() });
        b
    }

    fn to_grid(&self, s: &[Complex64]) -> Vec<f64> {
        let mut b = s.to_vec();
        self.inv.process(&mut b);
        b.into_iter().map(|c| c.re).collect()
    }

    /// −∂(u^{p+1})/(p+1) + ∂^{-1}u
    fn rhs(&self, s: &[Complex64]) -> Vec<Complex64> {
        let u = self.to_grid(s);
        let q = self.power.exponent() as f64 + 1.0;
        let flux: Vec<f64> = u.iter().map(|&x| x.powi(q as i32) / q).collect();
        let f = self.to_spec(&flux);
        (0..self.n)
            .map(|j| {
                if !self.keep[j] {
                    return Complex64::default();
                }
                let ik = Complex64::new(0.0, self.k[j]);
                -ik * f[j] + s[j] / ik
            })
            .collect()
    }

    fn rk4(&self, s: &[Complex64], h: f64) -> Vec<Complex64> {
        let axpy = |a: &[Complex64], b: &[Complex64], c: f64| -> Vec<Complex64> { a.iter().zip(b).map(|(x, y)| x + y * c).collect() };
        let k1 = self.rhs(s);
        let k2 = self.rhs(&axpy(s, &k1, 0.5 * h));
        let k3 = self.rhs(&axpy(s, &k2, 0.5 * h));
        let k4 = self.rhs(&axpy(s, &k3, h));
        (0..self.n).map(|j| s[j] + (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (h / 6.0)).collect()
    }

    fn max_slope(&self, s: &[Complex64]) -> f64 {
        let d: Vec<Complex64> = (0..self.n).map(|j| Complex64::new(0.0, self.k[j]) * s[j]).collect();
        self.to_grid(&d).iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn l2_sq(&self, s: &[Complex64]) -> f64 {
        2.0 * PI * s.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

fn courant(u_max: f64, power: Power, n: usize, dt: f64) -> f64 {
    power.pow(u_max.abs()).abs() * n as f64 * dt
}

pub fn evolve_nonlinear(u0: &[f64], power: Power, dt: f64, horizon: f64) -> Result<EvolutionTrace> {
    evolve_nonlinear_with(u0, power, dt, horizon, &NonlinearOptions::default())
}

/// Pseudospectral RK4 for u_t + u^p u_x = ∂_x^{-1}u on the grid of [`periodic_grid`].
///
/// The step is `dt` unless the Courant number would exceed [`CFL_LIMIT`], in
/// which case it is shortened; a `dt` that is already too large at t = 0 is
/// rejected. The run stops at `horizon` or when max|u_x| passes the breaking
/// factor times its initial value.
pub fn evolve_nonlinear_with(u0: &[f64], power: Power, dt: f64, horizon: f64, opts: &NonlinearOptions) -> Result<EvolutionTrace> {
    let n = u0.len();
    if n < 256 || !n.is_power_of_two() {
        return Err(invalid(format!("resolution must be a power of two >= 256, got {n}")));
    }
    if !(dt > 0.0) || !(horizon > 0.0) || !(opts.sample_every > 0.0) {
        return Err(invalid("step, horizon and sampling interval must be positive"));
    }
    if u0.iter().any(|x| !x.is_finite()) {
        return Err(invalid("initial data must be finite"));
    }
    let mean = u0.iter().sum::<f64>() / n as f64;
    let scale = u0.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if mean.abs() > 1e-2 * scale.max(1e-300) {
        return Err(invalid(format!("initial data must have zero mean, got {mean:.3e}")));
    }
    let c0 = courant(scale, power, n, dt);
    if c0 > CFL_LIMIT {
        return Err(Error::Cfl { courant: c0, limit: CFL_LIMIT });
    }
    let ps = Pseudospectral::new(n, power);
    let mut s = ps.to_spec(u0);
    let e0 = ps.l2_sq(&s);
    let slope0 = ps.max_slope(&s);
    let mut diagnostics = Diagnostics { removed_mean: mean, ..Diagnostics::default() };
    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut norms = vec![e0.sqrt()];
    let mut snapshots = Vec::new();
    if opts.keep_snapshots {
        snapshots.push(Snapshot { time: 0.0, values: ps.to_grid(&s) });
    }
    let mut next_sample = opts.sample_every;
    while t < horizon - 1e-12 {
        let u = ps.to_grid(&s);
        let umax = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut h = dt.min(horizon - t).min(next_sample - t);
        let cn = courant(umax, power, n, h);
        if cn > CFL_LIMIT {
            h *= CFL_LIMIT / cn;
        }
        s = ps.rk4(&s, h);
        t += h;
        diagnostics.steps += 1;
        let e = ps.l2_sq(&s);
        if !e.is_finite() {
            diagnostics.overflow = true;
            diagnostics.breaking_time = Some(t);
            break;
        }
        // mode 0 is never evolved, so the mass is the discrete mean times 2π
        diagnostics.mass_drift = diagnostics.mass_drift.max((2.0 * PI * s[0]).norm());
        let slope = ps.max_slope(&s);
        let broke = slope > opts.breaking_factor * slope0;
        if !broke {
            diagnostics.l2_drift = diagnostics.l2_drift.max(((e - e0) / e0).abs());
        }
        if t >= next_sample - 1e-12 || broke || t >= horizon - 1e-12 {
            times.push(t);
            norms.push(e.sqrt());
            if opts.keep_snapshots {
                snapshots.push(Snapshot { time: t, values: ps.to_grid(&s) });
            }
            while next_sample <= t + 1e-12 {
                next_sample += opts.sample_every;
            }
        }
        if broke {
            diagnostics.breaking_time = Some(t);
            break;
        }
    }
    Ok(EvolutionTrace { times, norms, snapshots, fitted_rate: None, diagnostics, final_state: None })
}

/// Earliest snapshot time at which max|u_x| exceeds `threshold` times its initial value.
pub fn breaking_detect(trace: &EvolutionTrace, threshold: f64) -> Option<f64> {
    let first = trace.snapshots.first()?;
    let slope = |v: &[f64]| crate::fourier::spectral_derivative(v, 1).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let s0 = slope(&first.values);
    trace.snapshots.iter().skip(1).find(|s| slope(&s.values) > threshold * s0).map(|s| s.time)
}

/// ‖u − U(· − shift)‖/‖U‖ with the shift applied spectrally.
pub fn translation_error(u: &[f64], profile: &[f64], shift: f64) -> Result<f64> {
    if u.len() != profile.len() || u.len() % 2 != 0 {
        return Err(Error::DimensionMismatch { left: u.len(), right: profile.len() });
    }
    let n = u.len();
    let mut spec = crate::fourier::grid_coefficients(profile);
    for (j, c) in spec.iter_mut().enumerate() {
        let k = crate::fourier::bin_wavenumber(j, n);
        *c *= Complex64::from_polar(1.0, -k * shift);
    }
    let shifted = crate::fourier::grid_synthesis(&spec);
    let num: f64 = u.iter().zip(&shifted).map(|(a, b)| (a - b.re).powi(2)).sum();
    let den: f64 = profile.iter().map(|a| a * a).sum();
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    PeakedPerturbed,
    SmoothWave,
    RandomZeroMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialParams {
    pub power: Power,
    pub n_samples: usize,
    /// Coefficient of sin z added to U* (peaked_perturbed).
    pub amplitude: f64,
    /// Wave speed (smooth_wave).
    pub speed: f64,
    /// Mode cutoff and Floquet exponent (random_zero_mean).
    pub cutoff: usize,
    pub kappa: f64,
}

impl Default for InitialParams {
    fn default() -> Self {
        Self { power: Power::Quadratic, n_samples: 512, amplitude: 0.01, speed: 1.05, cutoff: 64, kappa: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialData {
    Samples(Vec<f64>),
    Coefficients(FourierVector),
}

/// Seeded initial data. Random coefficients are complex Gaussian, real-field
/// symmetric at κ = 0, and normalised to unit ℓ² norm.
pub fn make_initial_data(kind: InitialKind, params: &InitialParams, seed: u64) -> Result<InitialData> {
    match kind {
        InitialKind::PeakedPerturbed => {
            let base = peaked_profile(params.power, params.n_samples)?;
            let z = periodic_grid(params.n_samples);
            let a = params.amplitude;
            Ok(InitialData::Samples(
                base.values.iter().zip(&z).map(|(u, &x)| if a == 0.0 { *u } else { u + a * x.sin() }).collect(),
            ))
        }
        InitialKind::SmoothWave => {
            let w = smooth_wave_solve_with(params.speed, params.power, 1e-10, params.n_samples)?;
            Ok(InitialData::Samples(w.profile.values))
        }
        InitialKind::RandomZeroMean => {
            let modes = ModeSet::new(params.cutoff, params.kappa)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut draw = || Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
            let labels = modes.modes();
            let mut coeffs = vec![Complex64::default(); labels.len()];
            for (i, &m) in labels.iter().enumerate() {
                if modes.kappa() == 0.0 {
                    if m > 0 {
                        let c = draw();
                        coeffs[i] = c;
                        if let Some(j) = modes.index_of(-m) {
                            coeffs[j] = c.conj();
                        }
                    }
                } else if m != 0 || modes.includes_zero() {
                    coeffs[i] = draw();
                }
            }
            let mut v = FourierVector::new(modes, coeffs)?;
            let nv = v.norm();
            v.scale(1.0 / nv);
            Ok(InitialData::Coefficients(v))
        }
    }
}
