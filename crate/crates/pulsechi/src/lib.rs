//! Simulation and inversion toolkit for a pulsed interferometric measurement of a
//! damped harmonic oscillator's Wigner characteristic function.
//!
//! A probe qubit is coupled to an oscillator that thermalizes at rate `gamma`
//! toward occupation `nbar`. A train of instantaneous probe flips interleaved
//! with free-evolution windows turns the off-diagonal probe coherence into a
//! direct readout of the oscillator's characteristic function `chi` at a
//! sequence-dependent point `zeta` of reciprocal phase space.
//!
//! The crate is organized in layers:
//!
//! * [`model`] holds the physical parameters, probe amplitudes, and pulse
//!   sequences (equidistant, random, triangular-ramp families).
//! * [`analytic`] evaluates every closed-form quantity of the protocol:
//!   accessible points, per-segment exponents, scaling factors, and the
//!   measurement inversion itself.
//! * [`oracle`] is the brute-force ground truth: a truncated Fock-space
//!   simulation of the joint qubit–oscillator master equation, used to verify
//!   each superoperator identity the closed forms rely on.
//! * [`reconstruct`] interpolates sampled characteristic-function values and
//!   inverts them into a density matrix with fidelity diagnostics.
//! * [`states`] provides reference states (Fock superposition, coherent, cat)
//!   with exact characteristic functions.
//!
//! Batch helpers in [`par`] run sweeps in parallel through `rayon` when the
//! default `parallel` feature is enabled; a sequential fallback with the same
//! interface is always compiled.

pub mod analytic;
pub mod error;
pub mod linalg;
pub mod model;
pub mod npy;
pub mod oracle;
pub mod par;
pub mod reconstruct;
pub mod special;
pub mod states;

pub use error::Error;
pub use model::{OscillatorParams, ProbeAmplitudes, PulseSequence, SequenceFamily, Sign};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
