//! Truncated Fourier bases and FFT plumbing on the 2π-periodic grid.

use crate::error::{invalid, Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Index set {−N, …, N} with the zero mode optionally removed, shifted by a
/// Floquet exponent κ so that mode n carries the wavenumber n + κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    cutoff: usize,
    kappa: f64,
    with_zero: bool,
}

impl ModeSet {
    /// The natural set for cutoff `N` and exponent κ: zero-mean at κ = 0,
    /// full otherwise.
    pub fn new(cutoff: usize, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        if cutoff == 0 {
            return Err(invalid("mode cutoff must be at least 1"));
        }
        Ok(Self { cutoff, kappa, with_zero: kappa != 0.0 })
    }

    /// All modes −N..N including 0, regardless of κ.
    pub fn full(cutoff: usize, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self { cutoff, kappa, with_zero: true })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn includes_zero(&self) -> bool {
        self.with_zero
    }

    pub fn len(&self) -> usize {
        2 * self.cutoff + usize::from(self.with_zero)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Modes in ascending order; this is the row/column order of every
    /// operator matrix built on the set.
    pub fn modes(&self) -> Vec<i64> {
        let n = self.cutoff as i64;
        (-n..=n).filter(|&m| m != 0 || self.with_zero).collect()
    }

    pub fn index_of(&self, n: i64) -> Option<usize> {
        let c = self.cutoff as i64;
        if n.abs() > c || (n == 0 && !self.with_zero) {
            return None;
        }
        let shifted = (n + c) as usize;
        Some(if !self.with_zero && n > 0 { shifted - 1 } else { shifted })
    }

    pub fn wavenumber(&self, n: i64) -> f64 {
        n as f64 + self.kappa
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !kappa.is_finite() || kappa.abs() > 0.5 {
        return Err(invalid(format!("Floquet exponent {kappa} outside [-1/2, 1/2]")));
    }
    Ok(())
}

/// Complex coefficients v(z) = Σ c_n e^{i(n+κ)z} on a [`ModeSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierVector {
    modes: ModeSet,
    coeffs: Vec<Complex64>,
}

impl FourierVector {
    pub fn new(modes: ModeSet, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != modes.len() {
            return Err(Error::DimensionMismatch { left: coeffs.len(), right: modes.len() });
        }
        Ok(Self { modes, coeffs })
    }

    pub fn zeros(modes: ModeSet) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); modes.len()], modes }
    }

    pub fn from_fn<F: FnMut(i64) -> Complex64>(modes: ModeSet, f: F) -> Self {
        Self { coeffs: modes.modes().into_iter().map(f).collect(), modes }
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.modes.cutoff
    }

    pub fn kappa(&self) -> f64 {
        self.modes.kappa
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        self.modes.index_of(n).map(|i| self.coeffs[i])
    }

    /// Coefficient of mode `n`, zero when the mode is not represented.
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.get(n).unwrap_or_default()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// L² norm over one period, √(2π)·‖c‖.
    pub fn l2_norm(&self) -> f64 {
        (2.0 * PI).sqrt() * self.norm()
    }

    /// Largest violation of c_{−n} = conj(c_n).
    pub fn reality_defect(&self) -> f64 {
        self.modes
            .modes()
            .into_iter()
            .map(|n| (self.coeff(-n) - self.coeff(n).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn evaluate(&self, z: f64) -> Complex64 {
        self.modes
            .modes()
            .into_iter()
            .zip(&self.coeffs)
            .map(|(n, c)| c * Complex64::from_polar(1.0, self.modes.wavenumber(n) * z))
            .sum()
    }

    /// Coefficients of a real field sampled at z_j = −π + 2πj/n, truncated to `modes`.
    pub fn from_real_samples(values: &[f64], modes: ModeSet) -> Result<Self> {
        if modes.kappa != 0.0 {
            return Err(invalid("sampled fields are co-periodic; kappa must be 0"));
        }
        if values.len() <= 2 * modes.cutoff {
            return Err(invalid(format!(
                "{} samples cannot resolve cutoff {}",
                values.len(),
                modes.cutoff
            )));
        }
        let spec = grid_coefficients(values);
        let n = values.len() as i64;
        Ok(Self::from_fn(modes, |m| spec[m.rem_euclid(n) as usize]))
    }

    /// Real samples at z_j = −π + 2πj/n (imaginary parts discarded).
    pub fn to_real_samples(&self, n: usize) -> Result<Vec<f64>> {
        if self.modes.kappa != 0.0 {
            return Err(invalid("only co-periodic vectors can be sampled on the periodic grid"));
        }
        if n <= 2 * self.modes.cutoff {
            return Err(invalid(format!("{n} samples cannot hold cutoff {}", self.modes.cutoff)));
        }
        let mut spec = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in self.modes.modes().into_iter().zip(&self.coeffs) {
            spec[m.rem_euclid(n as i64) as usize] = *c;
        }
        Ok(grid_synthesis(&spec).into_iter().map(|c| c.re).collect())
    }

    /// Copy onto another mode set with the same κ; missing modes become zero.
    pub fn restrict(&self, modes: ModeSet) -> Result<Self> {
        if modes.kappa != self.modes.kappa {
            return Err(invalid("cannot move a vector between Floquet exponents"));
        }
        Ok(Self::from_fn(modes, |n| self.coeff(n)))
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }
}

/// Uniform periodic grid z_j = −π + 2πj/n.
pub fn periodic_grid(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| -PI + h * j as f64).collect()
}

/// Half-cell offset grid z_j = −π + (j + 1/2)·2π/n, avoiding z = ±π and, for even n, z = 0.
pub fn offset_grid(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| -PI + h * (j as f64 + 0.5)).collect()
}

/// Discrete coefficients ĉ_k, k = 0..n−1 (wrapped), of samples on [`periodic_grid`].
/// The grid starts at −π, so each coefficient carries the phase (−1)^k; this
/// is only consistent for even `n`.
pub fn grid_coefficients(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    assert!(n % 2 == 0, "periodic grids must have an even number of points");
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().enumerate().for_each(|(k, c)| {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *c *= scale * sign;
    });
    buf
}

/// Inverse of [`grid_coefficients`].
pub fn grid_synthesis(spec: &[Complex64]) -> Vec<Complex64> {
    let n = spec.len();
    assert!(n % 2 == 0, "periodic grids must have an even number of points");
    let mut buf: Vec<Complex64> = spec
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { *c } else { -*c })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Signed wavenumber of FFT bin `k` for length `n`; the Nyquist bin maps to 0
/// so that odd derivatives of real data stay real.
pub fn bin_wavenumber(k: usize, n: usize) -> f64 {
    if 2 * k < n {
        k as f64
    } else if 2 * k == n {
        0.0
    } else {
        k as f64 - n as f64
    }
}

/// `order`-th spectral derivative of real periodic samples.
pub fn spectral_derivative(values: &[f64], order: u32) -> Vec<f64> {
    filtered_derivative(values, order, |_| 1.0)
}

/// Spectral derivative with per-mode damping factors `sigma(|k|)`.
pub fn filtered_derivative<F: Fn(usize) -> f64>(values: &[f64], order: u32, sigma: F) -> Vec<f64> {
    let n = values.len();
    let mut spec = grid_coefficients(values);
    for (k, c) in spec.iter_mut().enumerate() {
        let w = bin_wavenumber(k, n);
        let factor = Complex64::new(0.0, w).powu(order);
        *c *= factor * sigma(w.abs() as usize);
    }
    grid_synthesis(&spec).into_iter().map(|c| c.re).collect()
}

/// Jackson damping factors g_k for a kernel of degree `m`; the resulting
/// trigonometric kernel is non-negative.
pub fn jackson_factors(m: usize) -> Vec<f64> {
    let q = (m + 1) as f64;
    let a = PI / q;
    (0..=m)
        .map(|k| {
            let k = k as f64;
            ((q - k) * (a * k).cos() + (a * k).sin() / a.tan()) / q
        })
        .collect()
}

/// Evaluate the trigonometric interpolant of real samples on [`periodic_grid`] at `z`.
pub fn trig_interpolate(spec: &[Complex64], z: f64) -> f64 {
    let n = spec.len();
    let mut acc = 0.0;
    for (k, c) in spec.iter().enumerate() {
        acc += if 2 * k == n {
            // Nyquist term split symmetrically between ±n/2
            c.re * (0.5 * n as f64 * z).cos()
        } else {
            (c * Complex64::from_polar(1.0, bin_wavenumber(k, n) * z)).re
        };
    }
    acc
}
