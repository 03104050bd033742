//! Brute-force Fock-basis reference implementation.
//!
//! Everything here works on the truncated number basis with matrix-free
//! stencils, so the cost of a propagator application is O(d^2) per Taylor
//! term and no d^2 x d^2 matrix is ever formed. The module exists to pin
//! down the analytic layer: every closed form has a named residual check,
//! and the protocol runtime simulates the joint system pulse by pulse.

pub mod checks;
mod evolve;
mod generator;
mod sequence;
mod space;
mod superdisp;

pub use checks::{identity_suite, readout_round_trip, CheckReport};
pub use evolve::expm_apply;
pub use generator::{generator_a, generator_c, liouvillian, Coupling, Generator};
pub use sequence::{
    fock_trace_chi, pauli_expectations, reference_density, run_sequence, JointState,
    PauliExpectations, StateDiagnostics, TracedChi, LEAKAGE_LIMIT,
};
pub use space::{FockSpace, OscillatorOperator};
pub use superdisp::{superdisplacement_skew, superdisplacement_sym, SandwichOperator};
