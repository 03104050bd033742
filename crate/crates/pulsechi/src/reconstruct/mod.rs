//! State reconstruction from sampled characteristic-function values.
//!
//! The pipeline has three stages. A [`SamplingPlan`] lists the pulse
//! sequences to run; [`collect_samples`] turns each one into a conjugate
//! pair of characteristic-function samples, either from the analytic
//! readout model or from a density-matrix oracle run. [`interpolate_chi`]
//! fills a square grid from the scattered samples. [`reconstruct_rho`]
//! integrates the grid into a density matrix, and the `fidelity` family
//! scores the result against a reference.

mod density;
mod interp;
mod plan;

pub use density::{
    fidelity, fidelity_vs, pure_state_fidelity, reconstruct_rho, ReconstructionDiagnostics,
    ReconstructionResult, TAIL_LIMIT, TAIL_WARN,
};
pub use interp::{interpolate_chi, ChiGrid, GridSpec, Interpolant};
pub use plan::{
    collect_samples, CharacteristicSample, SampleFlags, SampleMode, SampleSource, SamplingPlan,
};
