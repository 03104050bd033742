//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across the protocol layers.
///
/// Variants are grouped by how callers are expected to react: `Domain`,
/// `EmptySequence`, `IndexRange`, and `DegenerateProbe` are input-validation
/// failures; `TangentPole` signals that a closed form is unusable and a caller
/// should fall back to the general sum; `Convergence` and `Leakage` are
/// numerical failures of the oracle; `Coverage` and `GridMismatch` come from
/// the reconstruction layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar input violated its precondition.
    #[error("invalid {name} = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A pulse sequence must contain at least one free-evolution window.
    #[error("pulse sequence has no segments")]
    EmptySequence,

    /// A 1-based segment index fell outside the sequence.
    #[error("segment index {index} out of range for a sequence of {len} segments")]
    IndexRange { index: usize, len: usize },

    /// The equidistant closed form was evaluated too close to a tangent pole.
    #[error("tangent pole: |cos| = {cos_magnitude:.3e} at the half-angle, closed form unusable")]
    TangentPole { cos_magnitude: f64 },

    /// The probe carries no off-diagonal coherence, so there is nothing to read out.
    #[error("degenerate probe: psi_+ psi_-^* vanishes, no interference signal")]
    DegenerateProbe,

    /// Population reached the top of the truncated Fock space.
    #[error("truncation leakage {leakage:.3e} exceeds {limit:.3e} at dimension {dim}")]
    Leakage {
        leakage: f64,
        limit: f64,
        dim: usize,
    },

    /// An iterative routine did not reach its tolerance.
    #[error("{what} failed to converge")]
    Convergence { what: &'static str },

    /// The sample cloud cannot support an interpolation or inversion.
    #[error("insufficient sample coverage: {detail}")]
    Coverage { detail: String },

    /// Two grids that must be identical are not.
    #[error("grid mismatch: {detail}")]
    GridMismatch { detail: String },

    /// Filesystem failure while writing or reading artifacts.
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}
