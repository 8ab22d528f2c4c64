//! Peaked and smooth 2π-periodic traveling waves and their diagnostics.

use crate::error::{invalid, Error, Result};
use crate::fourier::{self, FourierVector, ModeSet};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Nonlinearity power p in u_t + u^p u_x = ∂_x^{-1} u.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub enum Power {
    /// p = 1
    Quadratic,
    /// p = 2
    Cubic,
}

impl Power {
    pub fn exponent(self) -> u32 {
        match self {
            Power::Quadratic => 1,
            Power::Cubic => 2,
        }
    }

    /// Speed c* of the peaked wave.
    pub fn critical_speed(self) -> f64 {
        match self {
            Power::Quadratic => PI * PI / 9.0,
            Power::Cubic => PI * PI / 8.0,
        }
    }

    /// Half-width of the spectral strip |Re λ| ≤ π/6 or π/4.
    pub fn strip_half_width(self) -> f64 {
        match self {
            Power::Quadratic => PI / 6.0,
            Power::Cubic => PI / 4.0,
        }
    }

    /// u^p
    pub fn pow(self, u: f64) -> f64 {
        match self {
            Power::Quadratic => u,
            Power::Cubic => u * u,
        }
    }
}

impl TryFrom<u32> for Power {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        match p {
            1 => Ok(Power::Quadratic),
            2 => Ok(Power::Cubic),
            _ => Err(invalid(format!("nonlinearity power must be 1 or 2, got {p}"))),
        }
    }
}

impl From<Power> for u32 {
    fn from(p: Power) -> u32 {
        p.exponent()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Smooth,
    Peaked,
}

/// Samples of a 2π-periodic profile on z_j = −π + 2πj/n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub power: Power,
    pub speed: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: WaveKind,
}

impl WaveProfile {
    /// Wrap externally produced samples; the grid is the standard periodic one.
    pub fn from_samples(power: Power, speed: f64, values: Vec<f64>, kind: WaveKind) -> Result<Self> {
        if values.len() < 8 || values.len() % 2 != 0 {
            return Err(invalid("profiles need an even number (>= 8) of samples"));
        }
        if values.iter().any(|v| !v.is_finite()) || !speed.is_finite() {
            return Err(invalid("profile samples and speed must be finite"));
        }
        Ok(Self { power, speed, grid: fourier::periodic_grid(values.len()), values, kind })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Period average. Composite Simpson for the p = 1 peaked wave (exact on
    /// its parabolic pieces), periodic trapezoid otherwise (exact for the
    /// piecewise-linear p = 2 wave, spectrally accurate for smooth ones).
    pub fn mean(&self) -> f64 {
        match (self.kind, self.power) {
            (WaveKind::Peaked, Power::Quadratic) => periodic_simpson_mean(&self.values),
            _ => self.values.iter().sum::<f64>() / self.len() as f64,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest |U(z_j) − U(−z_j)| over the grid.
    pub fn evenness_defect(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|j| (self.values[j] - self.values[(n - j) % n]).abs())
            .fold(0.0, f64::max)
    }

    /// Samples of c − U^p.
    pub fn coefficient_samples(&self) -> Vec<f64> {
        self.values.iter().map(|&u| self.speed - self.power.pow(u)).collect()
    }
}

fn periodic_simpson_mean(values: &[f64]) -> f64 {
    // node 0 is z = −π and node n would be z = π
    let n = values.len();
    let mut acc = 0.0;
    for (j, v) in values.iter().enumerate() {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * v;
    }
    acc / (3.0 * n as f64)
}

/// Values on a grid together with their abscissae.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledField {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Breaking indicator m₀ on the sample grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakingField {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub sign_definite: bool,
}

fn wrap(z: f64) -> f64 {
    z - 2.0 * PI * (z / (2.0 * PI)).round()
}

/// U*(z), extended periodically.
pub fn peaked_value(power: Power, z: f64) -> f64 {
    let z = wrap(z);
    match power {
        Power::Quadratic => (3.0 * z * z - PI * PI) / 18.0,
        Power::Cubic => (z.abs() - 0.5 * PI) / SQRT_2,
    }
}

/// U*′(z) away from the peaks; the one-sided average at a peak.
pub fn peaked_slope(power: Power, z: f64) -> f64 {
    let z = wrap(z);
    match power {
        Power::Quadratic if z.abs() == PI => 0.0,
        Power::Quadratic => z / 3.0,
        Power::Cubic if z == 0.0 || z.abs() == PI => 0.0,
        Power::Cubic => z.signum() / SQRT_2,
    }
}

/// c* − U*(z)^p, the coefficient of the transport part of the linearization.
pub fn peaked_coefficient(power: Power, z: f64) -> f64 {
    let z = wrap(z);
    match power {
        Power::Quadratic => (PI * PI - z * z) / 6.0,
        Power::Cubic => 0.5 * z.abs() * (PI - z.abs()),
    }
}

pub fn peaked_profile(power: Power, n_samples: usize) -> Result<WaveProfile> {
    if n_samples < 8 || n_samples % 2 != 0 {
        return Err(invalid(format!("peaked profile needs an even n_samples >= 8, got {n_samples}")));
    }
    let grid = fourier::periodic_grid(n_samples);
    let values = grid.iter().map(|&z| peaked_value(power, z)).collect();
    Ok(WaveProfile { power, speed: power.critical_speed(), grid, values, kind: WaveKind::Peaked })
}

/// U*′ on the half-cell offset grid, which never hits a peak.
pub fn peaked_derivative(power: Power, n_samples: usize) -> Result<SampledField> {
    if n_samples < 2 || n_samples % 2 != 0 {
        return Err(invalid("derivative grid needs an even number of samples"));
    }
    let grid = fourier::offset_grid(n_samples);
    let values = grid.iter().map(|&z| peaked_slope(power, z)).collect();
    Ok(SampledField { grid, values })
}

/// Analytic Fourier coefficient of c* − U*^p.
pub fn peaked_coefficient_mode(power: Power, n: i64) -> f64 {
    let nf = n as f64;
    match power {
        Power::Quadratic if n == 0 => PI * PI / 9.0,
        Power::Quadratic => {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            -sign / (3.0 * nf * nf)
        }
        Power::Cubic if n == 0 => PI * PI / 12.0,
        Power::Cubic if n % 2 != 0 => 0.0,
        Power::Cubic => -1.0 / (nf * nf),
    }
}

/// Coefficients d_n, |n| ≤ cutoff, of the peaked c* − U*^p.
pub fn peaked_fourier(power: Power, cutoff: usize) -> Result<FourierVector> {
    if cutoff < 2 {
        return Err(invalid("profile transform needs cutoff >= 2"));
    }
    let modes = ModeSet::full(cutoff, 0.0)?;
    Ok(FourierVector::from_fn(modes, |n| Complex64::new(peaked_coefficient_mode(power, n), 0.0)))
}

/// Fourier coefficients of c − U^p for |n| ≤ cutoff, mode 0 included.
/// Peaked profiles use the closed-form series; sampled profiles are transformed.
pub fn profile_fourier(profile: &WaveProfile, cutoff: usize) -> Result<FourierVector> {
    match profile.kind {
        WaveKind::Peaked => peaked_fourier(profile.power, cutoff),
        WaveKind::Smooth => {
            if cutoff < 2 {
                return Err(invalid("profile transform needs cutoff >= 2"));
            }
            let modes = ModeSet::full(cutoff, 0.0)?;
            FourierVector::from_real_samples(&profile.coefficient_samples(), modes)
        }
    }
}

/// m₀ = 1 − 3u″ (p = 1) or 1 − √2|u′| (p = 2).
///
/// Derivatives are spectral but Jackson-damped: the kernel is positive, so a
/// kink in u shows up as a one-signed bump instead of Gibbs ringing that would
/// fake a sign change.
pub fn breaking_indicator(u: &[f64], power: Power) -> Result<BreakingField> {
    let n = u.len();
    if n < 16 || n % 2 != 0 {
        return Err(invalid("breaking indicator needs an even number (>= 16) of samples"));
    }
    let g = fourier::jackson_factors(n / 2 - 1);
    let sigma = |k: usize| g.get(k).copied().unwrap_or(0.0);
    let values: Vec<f64> = match power {
        Power::Quadratic => fourier::filtered_derivative(u, 2, sigma)
            .into_iter()
            .map(|d2| 1.0 - 3.0 * d2)
            .collect(),
        Power::Cubic => fourier::filtered_derivative(u, 1, sigma)
            .into_iter()
            .map(|d1| 1.0 - SQRT_2 * d1.abs())
            .collect(),
    };
    let sign_definite = values.iter().all(|&m| m > 0.0);
    Ok(BreakingField { grid: fourier::periodic_grid(n), values, sign_definite })
}

/// Smooth wave with the shooting diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothWave {
    pub profile: WaveProfile,
    /// Shooting parameter u(0) = min U.
    pub u_min: f64,
    /// ξ-period of the solution of u″ + (c − u^p)u = 0.
    pub xi_period: f64,
    /// dZ/du_min at the solution; large values signal poor conditioning.
    pub period_slope: f64,
    /// Max residual of d/dz[(c − U^p)U′] + U on the returned samples.
    pub residual: f64,
}

const SHOOT_STEP: f64 = 2.5e-4;
const PERIOD_TOL: f64 = 1e-10;

#[derive(Clone, Copy)]
struct State {
    u: f64,
    du: f64,
    z: f64,
}

fn rhs(s: State, c: f64, power: Power) -> State {
    let a = c - power.pow(s.u);
    State { u: s.du, du: -a * s.u, z: a }
}

fn rk4(s: State, h: f64, c: f64, power: Power) -> State {
    let add = |s: State, k: State, f: f64| State { u: s.u + f * k.u, du: s.du + f * k.du, z: s.z + f * k.z };
    let k1 = rhs(s, c, power);
    let k2 = rhs(add(s, k1, 0.5 * h), c, power);
    let k3 = rhs(add(s, k2, 0.5 * h), c, power);
    let k4 = rhs(add(s, k3, h), c, power);
    State {
        u: s.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
        du: s.du + h / 6.0 * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du),
        z: s.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
    }
}

/// Step length in (0, h] at which `g(rk4(s, step))` vanishes, by secant
/// iteration on the single-step map.
fn locate<G: Fn(State) -> f64>(s: State, h: f64, c: f64, power: Power, g: G) -> (f64, State) {
    let (mut a, mut ga) = (0.0, g(s));
    let (mut b, mut gb) = (h, g(rk4(s, h, c, power)));
    for _ in 0..60 {
        if gb == ga {
            break;
        }
        let m = (b - gb * (b - a) / (gb - ga)).clamp(0.0, h);
        let gm = g(rk4(s, m, c, power));
        a = b;
        ga = gb;
        b = m;
        gb = gm;
        if gm.abs() < 1e-15 || (b - a).abs() < 1e-16 {
            break;
        }
    }
    (b, rk4(s, b, c, power))
}

/// Half-orbit from the minimum to the next turning point; returns
/// (half ξ-period, half z-period, u_max).
fn half_orbit(u_min: f64, c: f64, power: Power) -> Result<(f64, f64, f64)> {
    let mut s = State { u: u_min, du: 0.0, z: 0.0 };
    let mut xi = 0.0;
    let max_steps = (1e3 / SHOOT_STEP) as usize;
    for _ in 0..max_steps {
        let next = rk4(s, SHOOT_STEP, c, power);
        if next.du <= 0.0 && xi > 0.0 {
            let (dh, end) = locate(s, SHOOT_STEP, c, power, |t| t.du);
            return Ok((xi + dh, end.z, end.u));
        }
        if c - power.pow(next.u) <= 0.0 {
            return Err(Error::NoSolution(format!("orbit from u_min = {u_min} leaves the region u^p < c")));
        }
        s = next;
        xi += SHOOT_STEP;
    }
    Err(Error::Convergence { what: "half-orbit integration".into(), residual: f64::NAN })
}

fn z_period(u_min: f64, c: f64, power: Power) -> Result<f64> {
    half_orbit(u_min, c, power).map(|(_, z, _)| 2.0 * z)
}

/// Smooth wave with default 512 samples, doubled until the residual meets `tol`.
pub fn smooth_wave_solve(c: f64, power: Power, tol: f64) -> Result<SmoothWave> {
    let mut n = 512;
    loop {
        match smooth_wave_solve_with(c, power, tol, n) {
            Err(Error::Convergence { what, .. }) if what == "profile residual" && n < 8192 => n *= 2,
            other => return other,
        }
    }
}

/// Shooting on u_min with a fixed number of output samples.
pub fn smooth_wave_solve_with(c: f64, power: Power, tol: f64, n_samples: usize) -> Result<SmoothWave> {
    let cstar = power.critical_speed();
    if !(c > 1.0 && c < cstar) {
        return Err(Error::NoSolution(format!("speed {c} outside (1, {cstar:.6})")));
    }
    if !(tol > 0.0) {
        return Err(invalid("residual tolerance must be positive"));
    }
    if n_samples < 16 || n_samples % 2 != 0 {
        return Err(invalid("smooth profiles need an even number (>= 16) of samples"));
    }
    // u_min ranges from 0 (linear limit, Z = 2π√c > 2π) to the separatrix
    // turning point (Z → 2π√(c/c*) < 2π)
    let separatrix = match power {
        Power::Quadratic => -0.5 * c,
        Power::Cubic => -c.sqrt(),
    };
    let target = 2.0 * PI;
    let mut lo = separatrix * (1.0 - 1e-12); // Z < 2π
    let mut hi = separatrix * 1e-6; // Z > 2π
    let z_lo = z_period(lo, c, power)?;
    let z_hi = z_period(hi, c, power)?;
    if !(z_lo < target && z_hi > target) {
        return Err(Error::Convergence {
            what: "period bracketing".into(),
            residual: (z_lo - target).abs().min((z_hi - target).abs()),
        });
    }
    let mut mid = 0.5 * (lo + hi);
    let mut z_mid = f64::NAN;
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        z_mid = z_period(mid, c, power)?;
        if (z_mid - target).abs() <= PERIOD_TOL || hi - lo < 1e-15 {
            break;
        }
        if z_mid < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (z_mid - target).abs() > PERIOD_TOL {
        return Err(Error::Convergence { what: "period matching".into(), residual: (z_mid - target).abs() });
    }
    let u_min = mid;
    let du = 1e-6 * u_min.abs();
    let period_slope = (z_period(u_min + du, c, power)? - z_period(u_min - du, c, power)?) / (2.0 * du);

    let (values, half_xi) = sample_profile(u_min, c, power, n_samples)?;
    let profile = WaveProfile {
        power,
        speed: c,
        grid: fourier::periodic_grid(n_samples),
        values,
        kind: WaveKind::Smooth,
    };
    let residual = profile_residual(&profile);
    let wave = SmoothWave { profile, u_min, xi_period: 2.0 * half_xi, period_slope, residual };
    if residual > tol {
        return Err(Error::Convergence { what: "profile residual".into(), residual });
    }
    if wave.profile.mean().abs() > 1e-12 {
        return Err(Error::Convergence { what: "zero-mean check".into(), residual: wave.profile.mean().abs() });
    }
    Ok(wave)
}

/// Integrate the half orbit once more, recording u where z crosses the grid.
fn sample_profile(u_min: f64, c: f64, power: Power, n: usize) -> Result<(Vec<f64>, f64)> {
    let (half_xi, half_z, u_max) = half_orbit(u_min, c, power)?;
    let h = 2.0 * PI / n as f64;
    // targets z = 0, h, …, π mapped onto the rescaled half period
    let scale = half_z / PI;
    let count = n / 2 + 1;
    let mut half = vec![0.0; count];
    half[0] = u_min;
    half[count - 1] = u_max;
    let mut s = State { u: u_min, du: 0.0, z: 0.0 };
    let mut k = 1;
    while k < count - 1 {
        let next = rk4(s, SHOOT_STEP, c, power);
        while k < count - 1 && next.z >= h * k as f64 * scale {
            let tz = h * k as f64 * scale;
            let (_, at) = locate(s, SHOOT_STEP, c, power, |t| t.z - tz);
            half[k] = at.u;
            k += 1;
        }
        s = next;
    }
    // grid index n/2 is z = 0; index 0 is z = −π
    let mut values = vec![0.0; n];
    for (j, v) in values.iter_mut().enumerate() {
        let offset = (j as i64 - (n / 2) as i64).unsigned_abs() as usize;
        *v = half[offset];
    }
    Ok((values, half_xi))
}

/// Max |d/dz[(c − U^p)U′] + U| by spectral differentiation.
pub fn profile_residual(profile: &WaveProfile) -> f64 {
    let du = fourier::spectral_derivative(&profile.values, 1);
    let flux: Vec<f64> = profile
        .values
        .iter()
        .zip(&du)
        .map(|(&u, &d)| (profile.speed - profile.power.pow(u)) * d)
        .collect();
    let dflux = fourier::spectral_derivative(&flux, 1);
    dflux.iter().zip(&profile.values).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peaked_closed_forms() {
        let prof = peaked_profile(Power::Quadratic, 64).unwrap();
        assert_eq!(prof.values[0], PI * PI / 9.0);
        assert!((peaked_value(Power::Quadratic, 0.0) + PI * PI / 18.0).abs() < 1e-15);
        assert!((peaked_value(Power::Cubic, 0.0) + PI / (2.0 * SQRT_2)).abs() < 1e-15);
        assert!((peaked_slope(Power::Quadratic, 3.0) - 1.0).abs() < 1e-15);
        assert!((peaked_slope(Power::Cubic, -1.0) + 1.0 / SQRT_2).abs() < 1e-15);
        assert!(prof.mean().abs() < 1e-15);
        let cubic = peaked_profile(Power::Cubic, 64).unwrap();
        assert!(cubic.mean().abs() < 1e-15);
        assert!((cubic.max().powi(2) - Power::Cubic.critical_speed()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_power() {
        assert!(Power::try_from(3).is_err());
        assert!(peaked_profile(Power::Quadratic, 7).is_err());
    }

    #[test]
    fn smooth_wave_out_of_range() {
        assert!(matches!(smooth_wave_solve(1.5, Power::Quadratic, 1e-8), Err(Error::NoSolution(_))));
        assert!(matches!(smooth_wave_solve(0.9, Power::Cubic, 1e-8), Err(Error::NoSolution(_))));
    }

    #[test]
    fn breaking_indicator_of_zero_and_half_wave() {
        let m = breaking_indicator(&vec![0.0; 64], Power::Quadratic).unwrap();
        assert!(m.sign_definite && m.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
        let half: Vec<f64> = peaked_profile(Power::Quadratic, 256).unwrap().values.iter().map(|v| 0.5 * v).collect();
        let m = breaking_indicator(&half, Power::Quadratic).unwrap();
        assert!(m.sign_definite);
        for (z, v) in m.grid.iter().zip(&m.values) {
            if z.abs() < PI - 0.5 {
                assert!((v - 0.5).abs() < 1e-3, "m0({z}) = {v}");
            }
        }
    }
}
