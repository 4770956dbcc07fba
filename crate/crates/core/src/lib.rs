//! Detection of abrupt phase transitions in multi-agent collective behavior.
//!
//! The central idea: frames of a motion sequence are points on a manifold,
//! and an abrupt behavioral change shows up as high local curvature. The
//! ratio of the smallest to the largest singular value of a small
//! neighborhood of frames acts as a curvature proxy, so a spike in the
//! smoothed frame-to-frame change of that ratio marks a transition.
//!
//! The crate is organized around that pipeline plus the machinery used to
//! validate it:
//!
//! - [`geometry`] — arc-covariance closed forms relating curvature to
//!   singular-value ratios, the shape operator on parametric surfaces, and
//!   synthetic manifold generators (sombrero hat, saddle).
//! - [`neighbors`] — exact k-nearest-neighbor search over frame rows via a
//!   vantage-point tree.
//! - [`spectra`] — neighborhood singular values and the per-frame ratio
//!   series.
//! - [`detector`] — moving differences, windowed sums, and ranked
//!   transition reports.
//! - [`vicsek`] — a seeded swarm simulator with a piecewise noise schedule,
//!   providing ground-truth transitions.
//! - [`raster`] — particle positions to filtered grayscale frames and the
//!   stacked frame matrix.
//! - [`dimest`] — geodesic distances and residual-variance dimensionality
//!   estimates for detected sub-manifolds.
//!
//! Everything here is pure computation over owned buffers; file formats and
//! the command-line front end live in the companion `ptd-cli` crate. The
//! crate is `no_std` (with `alloc`) and all floating-point transcendentals
//! go through `libm`, so results are reproducible across platforms.
//!
//! Frame numbers, particle indices, and simulation steps are 1-based in
//! every public structure and serialized artifact; only private storage is
//! 0-based.

#![no_std]

extern crate alloc;

use alloc::string::String;
use thiserror::Error;

pub(crate) mod linalg;
pub(crate) mod math;
pub mod rng;

pub mod detector;
pub mod dimest;
pub mod geometry;
pub mod neighbors;
pub mod raster;
pub mod spectra;
pub mod vicsek;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A 1-based frame or row index fell outside the matrix.
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    /// The neighbor count alpha must satisfy 2 <= alpha <= N.
    #[error("alpha {alpha} out of range 2..={max}")]
    AlphaOutOfRange { alpha: usize, max: usize },
    /// Too few frames for the requested moving-sum window.
    #[error("series of {len} differences too short for window half-width {window}")]
    SeriesTooShort { len: usize, window: usize },
    /// Surface tangents were linearly dependent at the probed point.
    #[error("degenerate surface: tangent cross product norm {norm:e} at (u, v) = ({u}, {v})")]
    SingularSurface { u: f64, v: f64, norm: f64 },
    /// The numerical shape operator had complex eigenvalues beyond tolerance,
    /// signalling an inconsistent parametrization.
    #[error("shape operator eigenvalues complex: imaginary part {imag:e} exceeds tolerance")]
    ComplexCurvatures { imag: f64 },
    /// Frames of differing dimensions cannot be stacked.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// A frame range was too small for the requested neighborhood graph.
    #[error("range of {len} frames too small for alpha {alpha} (need at least alpha + 1)")]
    RangeTooSmall { len: usize, alpha: usize },
    /// An eigenvalue computation produced non-finite values.
    #[error("non-finite eigenvalue encountered")]
    NonFiniteEigenvalue,
}

pub type Result<T> = core::result::Result<T, Error>;
