//! Sampling of random quantum algorithms and their interference statistics.
//!
//! Four ensembles are supported: the circular unitary ensemble (CUE), the Haar
//! orthogonal ensemble (HOE), and two random-circuit ensembles built from
//! universal gate sets, UCE ({random U(2), CNOT}) and OCE ({Hadamard, Toffoli}).
//!
//! * [`haar`] draws Haar-distributed unitary and orthogonal matrices.
//! * [`circuit`] draws random gate sequences and multiplies them out.
//! * [`interference`] evaluates `I(U) = N - Σ|U_ik|^4` and its exact moments.
//! * [`spectral`] extracts eigenphases, nearest-neighbour spacings and histograms.
//! * [`convergence`] measures Hellinger-type distances and fits decay rates.
//!
//! All randomness flows through [`RandomStream`], keyed by `(seed, stream_id)`.

pub mod circuit;
pub mod convergence;
mod eigen;
mod error;
pub mod haar;
pub mod interference;
mod matrix;
pub mod provenance;
mod rng;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{ComplexSquareMatrix, OrthogonalOperator, UnitaryOperator, UNITARITY_TOLERANCE};
pub use rng::{RandomStream, StreamTag};

pub use num_complex::Complex64;
