//! Dense eigenvalues, σ_min portraits and strip extraction.

use crate::error::{invalid, Error, Result};
use crate::fourier::FourierVector;
use crate::spectral_ops::OperatorMatrix;
use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Once;

/// Largest accepted eigen-residual ‖Mv − λv‖/‖v‖.
pub const RESIDUAL_TOL: f64 = 1e-8;

static SEQUENTIAL_LINALG: Once = Once::new();

/// faer parallelises internally by default; we parallelise over grid points
/// instead, and keep each factorisation single-threaded so results do not
/// depend on the thread count.
fn sequential_linalg() {
    SEQUENTIAL_LINALG.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Worker count: `OSTROVSKY_THREADS` if set to a positive integer, else rayon's default.
pub fn thread_cap() -> usize {
    std::env::var("OSTROVSKY_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

fn with_pool<T: Send, F: FnOnce() -> T + Send>(f: F) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(thread_cap()).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub cutoff: usize,
    pub kappa: f64,
}

impl SpectrumResult {
    /// max Re λ
    pub fn abscissa(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Eigenvalue of smallest modulus and its index.
    pub fn nearest_to(&self, target: Complex64) -> Option<(usize, Complex64)> {
        self.eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
    }

    /// Worst distance from each eigenvalue to the nearest member of the mapped set.
    pub fn symmetry_defect<F: Fn(Complex64) -> Complex64>(&self, map: F) -> f64 {
        let scale = self.eigenvalues.iter().map(|l| l.norm()).fold(1.0, f64::max);
        self.eigenvalues
            .iter()
            .map(|&l| {
                let t = map(l);
                self.eigenvalues.iter().map(|&m| (m - t).norm()).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
            / scale
    }
}

/// Eigenvalues with their (unit-norm) eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub spectrum: SpectrumResult,
    pub vectors: Vec<FourierVector>,
}

fn residual(m: &Mat<Complex64>, v: &[Complex64], lambda: Complex64) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut s = -lambda * v[i];
        for (j, vj) in v.iter().enumerate() {
            s += m[(i, j)] * vj;
        }
        acc += s.norm_sqr();
    }
    let vn: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    acc.sqrt() / vn
}

/// Full eigendecomposition, ordered by (Re λ, Im λ), residuals validated.
pub fn eigen_decomposition(m: &OperatorMatrix) -> Result<EigenPairs> {
    sequential_linalg();
    let a = m.entries();
    if (0..m.dim()).any(|j| (0..m.dim()).any(|i| !a[(i, j)].is_finite())) {
        return Err(invalid("operator has non-finite entries"));
    }
    let evd = a.eigen().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re).then(s[i].im.total_cmp(&s[j].im)));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &k in &order {
        let mut v: Vec<Complex64> = (0..n).map(|i| u[(i, k)]).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|c| *c /= norm);
        let r = residual(a, &v, s[k]);
        if !(r <= RESIDUAL_TOL) {
            return Err(Error::Eigensolver(format!("residual {r:.3e} at eigenvalue {} exceeds {RESIDUAL_TOL:e}", s[k])));
        }
        eigenvalues.push(s[k]);
        residuals.push(r);
        vectors.push(FourierVector::new(*m.modes(), v)?);
    }
    Ok(EigenPairs {
        spectrum: SpectrumResult { eigenvalues, residuals, cutoff: m.cutoff(), kappa: m.kappa() },
        vectors,
    })
}

pub fn eigenvalues(m: &OperatorMatrix) -> Result<SpectrumResult> {
    eigen_decomposition(m).map(|e| e.spectrum)
}

/// σ_min(M − λI) from a full singular value decomposition.
pub fn smallest_singular(m: &OperatorMatrix, lambda: Complex64) -> Result<f64> {
    sequential_linalg();
    if !lambda.is_finite() {
        return Err(invalid("spectral parameter must be finite"));
    }
    let sv = m.shifted(lambda).singular_values().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    Ok(sv.last().copied().unwrap_or(0.0).max(0.0))
}

/// Rectangular λ-window sampled uniformly, endpoints included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl LambdaGrid {
    pub fn new(re_range: (f64, f64), im_range: (f64, f64), re_points: usize, im_points: usize) -> Result<Self> {
        if re_points < 8 || im_points < 8 {
            return Err(invalid("pseudospectrum grids need at least 8 points per axis"));
        }
        let axis = |(a, b): (f64, f64), n: usize| -> Result<Vec<f64>> {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(invalid(format!("degenerate window [{a}, {b}]")));
            }
            Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
        };
        Ok(Self { re: axis(re_range, re_points)?, im: axis(im_range, im_points)? })
    }

    /// Points in canonical row-major order (rows follow `im`).
    pub fn points(&self) -> Vec<Complex64> {
        self.im.iter().flat_map(|&y| self.re.iter().map(move |&x| Complex64::new(x, y))).collect()
    }

    pub fn len(&self) -> usize {
        self.re.len() * self.im.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudospectrumField {
    pub re_grid: Vec<f64>,
    pub im_grid: Vec<f64>,
    /// Row-major, one row per `im_grid` entry.
    pub sigma_min: Vec<f64>,
    pub cutoff: usize,
    pub kappa: f64,
}

impl PseudospectrumField {
    pub fn at(&self, im_index: usize, re_index: usize) -> f64 {
        self.sigma_min[im_index * self.re_grid.len() + re_index]
    }

    pub fn lambda(&self, flat: usize) -> Complex64 {
        let w = self.re_grid.len();
        Complex64::new(self.re_grid[flat % w], self.im_grid[flat / w])
    }

    pub fn grid(&self) -> LambdaGrid {
        LambdaGrid { re: self.re_grid.clone(), im: self.im_grid.clone() }
    }
}

/// σ_min(M − λI) over the grid; points are evaluated in parallel but the
/// output is in canonical order and independent of scheduling.
pub fn pseudospectrum_field(m: &OperatorMatrix, grid: &LambdaGrid) -> Result<PseudospectrumField> {
    sequential_linalg();
    let points = grid.points();
    let sigma_min = with_pool(|| points.par_iter().map(|&l| smallest_singular(m, l)).collect::<Result<Vec<_>>>())?;
    Ok(PseudospectrumField {
        re_grid: grid.re.clone(),
        im_grid: grid.im.clone(),
        sigma_min,
        cutoff: m.cutoff(),
        kappa: m.kappa(),
    })
}

/// [min, max] of Re λ over grid points with σ_min < ε, or `None` if there are none.
pub fn strip_estimate(field: &PseudospectrumField, eps: f64) -> Option<(f64, f64)> {
    field
        .sigma_min
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < eps)
        .map(|(k, _)| field.lambda(k).re)
        .fold(None, |acc, x| match acc {
            None => Some((x, x)),
            Some((lo, hi)) => Some((f64::min(lo, x), f64::max(hi, x))),
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudospectraComparison {
    pub max_difference: f64,
    pub field_a: PseudospectrumField,
    pub field_a0: PseudospectrumField,
}

/// max over the grid of |σ_min(A − λ) − σ_min(A₀ − λ)|, with both fields.
pub fn compare_pseudospectra(a: &OperatorMatrix, a0: &OperatorMatrix, grid: &LambdaGrid) -> Result<PseudospectraComparison> {
    if a.dim() != a0.dim() || a.labels() != a0.labels() || a.kappa() != a0.kappa() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: a0.dim() });
    }
    let field_a = pseudospectrum_field(a, grid)?;
    let field_a0 = pseudospectrum_field(a0, grid)?;
    let max_difference = field_difference(&field_a, &field_a0)?;
    Ok(PseudospectraComparison { max_difference, field_a, field_a0 })
}

/// Max pointwise |difference| of two fields on the same grid.
pub fn field_difference(f: &PseudospectrumField, g: &PseudospectrumField) -> Result<f64> {
    if f.sigma_min.len() != g.sigma_min.len() {
        return Err(Error::DimensionMismatch { left: f.sigma_min.len(), right: g.sigma_min.len() });
    }
    Ok(f.sigma_min.iter().zip(&g.sigma_min).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// Max pointwise relative difference |f − g| / max(f, g).
pub fn field_relative_difference(f: &PseudospectrumField, g: &PseudospectrumField) -> Result<f64> {
    if f.sigma_min.len() != g.sigma_min.len() {
        return Err(Error::DimensionMismatch { left: f.sigma_min.len(), right: g.sigma_min.len() });
    }
    Ok(f.sigma_min
        .iter()
        .zip(&g.sigma_min)
        .map(|(a, b)| (a - b).abs() / a.max(*b).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max))
}
