//! Spectral-stability toolkit for peaked periodic waves of the reduced
//! Ostrovsky equations u_t + u^p u_x = ∂_x^{-1} u, p ∈ {1, 2}.
// NaN guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod fourier;
pub mod quadrature;
pub mod waves;

pub mod evolution;
pub mod halfline;
pub mod pointspec;
pub mod spectra;
pub mod spectral_ops;

pub use error::{Error, Result};
pub use fourier::{FourierVector, ModeSet};
pub use waves::{BreakingField, Power, SampledField, SmoothWave, WaveKind, WaveProfile};

pub use evolution::{EvolutionTrace, InitialData, InitialKind, InitialParams};
pub use halfline::{HalflineFunction, HalflineGrid, MuClassification, SpectralRegion};
pub use pointspec::{EigenOdeSolution, MembershipReport, ScanReport};
pub use spectra::{LambdaGrid, PseudospectrumField, SpectrumResult};
pub use spectral_ops::{OperatorMatrix, OperatorTag};
