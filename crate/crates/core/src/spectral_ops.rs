//! Galerkin matrices of K = ∂^{-1}, A₀ = ∂[(c − U^p)·] and A = A₀ + K on a
//! truncated (Floquet-shifted) Fourier basis.

use crate::error::{invalid, Error, Result};
use crate::fourier::{FourierVector, ModeSet};
use crate::waves::{self, WaveProfile};
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorTag {
    K,
    A0,
    A,
    Multiplier,
}

/// Dense matrix over an ascending list of Fourier modes.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    modes: ModeSet,
    labels: Vec<i64>,
    tag: OperatorTag,
    entries: Mat<Complex64>,
}

impl OperatorMatrix {
    pub fn from_entries(modes: ModeSet, tag: OperatorTag, entries: Mat<Complex64>) -> Result<Self> {
        let n = modes.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch { left: entries.nrows(), right: n });
        }
        Ok(Self { labels: modes.modes(), modes, tag, entries })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    /// Mode carried by each row/column.
    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn cutoff(&self) -> usize {
        self.modes.cutoff()
    }

    pub fn kappa(&self) -> f64 {
        self.modes.kappa()
    }

    pub fn tag(&self) -> OperatorTag {
        self.tag
    }

    pub fn entries(&self) -> &Mat<Complex64> {
        &self.entries
    }

    /// Entry between output mode `m` and input mode `n`.
    pub fn entry(&self, m: i64, n: i64) -> Option<Complex64> {
        let i = self.labels.iter().position(|&l| l == m)?;
        let j = self.labels.iter().position(|&l| l == n)?;
        Some(self.entries[(i, j)])
    }

    pub fn apply(&self, v: &FourierVector) -> Result<FourierVector> {
        if v.coeffs().len() != self.dim() || v.kappa() != self.kappa() {
            return Err(Error::DimensionMismatch { left: v.coeffs().len(), right: self.dim() });
        }
        let x = v.coeffs();
        let out = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.entries[(i, j)] * x[j]).sum())
            .collect();
        FourierVector::new(*v.modes(), out)
    }

    /// M − λI as a fresh matrix.
    pub fn shifted(&self, lambda: Complex64) -> Mat<Complex64> {
        let mut m = self.entries.clone();
        for i in 0..self.dim() {
            m[(i, i)] -= lambda;
        }
        m
    }

    /// P·M·P with (Pv)_n = v_{−n}; only meaningful on a symmetric label set.
    pub fn parity_conjugate(&self) -> Mat<Complex64> {
        let d = self.dim();
        Mat::from_fn(d, d, |i, j| self.entries[(d - 1 - i, d - 1 - j)])
    }

    /// Compression onto the modes selected by `keep`.
    pub fn compress<F: Fn(i64) -> bool>(&self, keep: F) -> Self {
        let idx: Vec<usize> = (0..self.dim()).filter(|&i| keep(self.labels[i])).collect();
        let entries = Mat::from_fn(idx.len(), idx.len(), |i, j| self.entries[(idx[i], idx[j])]);
        Self {
            modes: self.modes,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            tag: self.tag,
            entries,
        }
    }

    /// Largest entrywise difference from another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Mat<Complex64>) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                worst = worst.max((self.entries[(i, j)] - other[(i, j)]).norm());
            }
        }
        worst
    }
}

fn k_symbol(modes: &ModeSet, n: i64) -> Complex64 {
    Complex64::new(0.0, modes.wavenumber(n)).inv()
}

/// K on the natural mode set for (N, κ).
pub fn assemble_k(cutoff: usize, kappa: f64) -> Result<OperatorMatrix> {
    assemble_k_on(ModeSet::new(cutoff, kappa)?)
}

/// K on an explicit mode set; a zero mode at κ = 0 has no anti-derivative.
pub fn assemble_k_on(modes: ModeSet) -> Result<OperatorMatrix> {
    if modes.kappa() == 0.0 && modes.includes_zero() {
        return Err(invalid("the anti-derivative is undefined on mode 0 at kappa = 0"));
    }
    let labels = modes.modes();
    let d = labels.len();
    let entries = Mat::from_fn(d, d, |i, j| if i == j { k_symbol(&modes, labels[i]) } else { Complex64::default() });
    OperatorMatrix::from_entries(modes, OperatorTag::K, entries)
}

/// Toeplitz block entry(m, n) = d_{m−n} on `modes`; `d` must reach |k| ≤ 2N.
pub fn assemble_multiplier(d: &FourierVector, modes: ModeSet) -> Result<OperatorMatrix> {
    if d.kappa() != 0.0 || !d.modes().includes_zero() {
        return Err(invalid("multiplier coefficients must be co-periodic and include mode 0"));
    }
    if d.cutoff() < 2 * modes.cutoff() {
        return Err(invalid(format!(
            "multiplier needs coefficients up to |n| = {}, got {}",
            2 * modes.cutoff(),
            d.cutoff()
        )));
    }
    let labels = modes.modes();
    let n = labels.len();
    let entries = Mat::from_fn(n, n, |i, j| d.coeff(labels[i] - labels[j]));
    OperatorMatrix::from_entries(modes, OperatorTag::Multiplier, entries)
}

/// A₀ = D·M (and A = A₀ + K when `include_k`) from the coefficients of c − U^p.
///
/// At κ = 0 the mode-0 row of the convolution is annihilated by D, so the
/// retained block is exactly the compression to the zero-mean subspace.
pub fn assemble_operator_from_coefficients(
    d: &FourierVector,
    cutoff: usize,
    kappa: f64,
    include_k: bool,
) -> Result<OperatorMatrix> {
    let modes = ModeSet::new(cutoff, kappa)?;
    let m = assemble_multiplier(d, modes)?;
    let labels = modes.modes();
    let dim = labels.len();
    let entries = Mat::from_fn(dim, dim, |i, j| {
        let mut e = Complex64::new(0.0, modes.wavenumber(labels[i])) * m.entries[(i, j)];
        if include_k && i == j {
            e += k_symbol(&modes, labels[i]);
        }
        e
    });
    let tag = if include_k { OperatorTag::A } else { OperatorTag::A0 };
    OperatorMatrix::from_entries(modes, tag, entries)
}

pub fn assemble_operator(profile: &WaveProfile, cutoff: usize, kappa: f64, include_k: bool) -> Result<OperatorMatrix> {
    if cutoff == 0 {
        return Err(invalid("mode cutoff must be at least 1"));
    }
    let d = waves::profile_fourier(profile, (2 * cutoff).max(2))?;
    assemble_operator_from_coefficients(&d, cutoff, kappa, include_k)
}
