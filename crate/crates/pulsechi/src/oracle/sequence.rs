//! Brute-force simulation of the pulsed protocol on the joint system.
//!
//! The joint density matrix is kept as four d x d probe blocks. Each window
//! generator is attached to a block position: the diagonal blocks evolve
//! under the commutator coupling of their sign, the off-diagonal blocks
//! under the anticommutator coupling, and a pi pulse swaps block contents
//! across the anti-diagonal. One segment is evolve, pulse, evolve, pulse.

use crate::analytic::PauliXY;
use crate::model::{OscillatorParams, ProbeAmplitudes, PulseSequence, Sign};
use crate::oracle::evolve::expm_apply;
use crate::oracle::generator::{generator_a, generator_c, Generator};
use crate::oracle::space::FockSpace;
use crate::states::ReferenceState;
use crate::{C64, Error, Result};
use ndarray::{s, Array2};

/// Population above which the top two Fock levels count as truncation loss.
pub const LEAKAGE_LIMIT: f64 = 1e-8;

/// Joint probe-oscillator state after a run.
#[derive(Clone, Debug)]
pub struct JointState {
    /// (2d) x (2d) density matrix, probe index outermost, `+` block first.
    pub rho: Array2<C64>,
    /// Total evolved time, twice the sum of the half-segment durations.
    pub time: f64,
    /// Population of the top two Fock levels of the reduced oscillator state.
    pub leakage: f64,
    /// Set when `leakage` exceeds [`LEAKAGE_LIMIT`].
    pub leakage_flag: bool,
}

/// Probe readout averages extracted from a joint state.
#[derive(Clone, Copy, Debug)]
pub struct PauliExpectations {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Transverse combinations `<sigma_x -+ i sigma_y>`.
    pub xy: PauliXY,
}

/// Characteristic-function sample taken by tracing against a displacement.
#[derive(Clone, Copy, Debug)]
pub struct TracedChi {
    pub value: C64,
    pub truncation_warning: bool,
}

/// Hermiticity, trace, and positivity defects of a joint state.
#[derive(Clone, Copy, Debug)]
pub struct StateDiagnostics {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl JointState {
    pub fn dim(&self) -> usize {
        self.rho.nrows() / 2
    }

    /// One probe block, probe indices 0 = plus and 1 = minus.
    pub fn block(&self, i: usize, j: usize) -> Array2<C64> {
        let d = self.dim();
        self.rho.slice(s![i * d..(i + 1) * d, j * d..(j + 1) * d]).to_owned()
    }

    pub fn block_trace(&self, i: usize, j: usize) -> C64 {
        let d = self.dim();
        (0..d).map(|n| self.rho[[i * d + n, j * d + n]]).sum()
    }

    /// Oscillator state with the probe traced out.
    pub fn reduced(&self) -> Array2<C64> {
        &self.block(0, 0) + &self.block(1, 1)
    }

    pub fn diagnostics(&self) -> Result<StateDiagnostics> {
        let n = self.rho.nrows();
        let mut herm = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                herm = herm.max((self.rho[[i, j]] - self.rho[[j, i]].conj()).norm());
            }
        }
        let tr: C64 = (0..n).map(|i| self.rho[[i, i]]).sum();
        let (vals, _) = crate::linalg::eigh(&self.rho)?;
        Ok(StateDiagnostics {
            hermiticity_defect: herm,
            trace_defect: (tr - 1.0).norm(),
            min_eigenvalue: vals[0],
        })
    }
}

/// Runs the full pulse protocol from the product of the probe superposition
/// and `rho0`. A nonzero `dephasing` rate damps the off-diagonal blocks.
pub fn run_sequence(
    space: FockSpace,
    p: &OscillatorParams,
    probe: &ProbeAmplitudes,
    seq: &PulseSequence,
    rho0: &Array2<C64>,
    dephasing: Option<f64>,
) -> Result<JointState> {
    let d = space.dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::GridMismatch {
            detail: format!("initial state is {}x{}, expected {d}x{d}", rho0.nrows(), rho0.ncols()),
        });
    }
    let gamma_d = dephasing.unwrap_or(0.0);
    if !(gamma_d.is_finite() && gamma_d >= 0.0) {
        return Err(Error::Domain {
            name: "dephasing",
            value: gamma_d,
            reason: "dephasing rate must be finite and nonnegative",
        });
    }

    // generators keyed by block position; contents move across them
    let gens: [Generator; 4] = [
        generator_c(space, p, Sign::Plus),
        generator_a(space, p, Sign::Plus).with_shift(-gamma_d),
        generator_a(space, p, Sign::Minus).with_shift(-gamma_d),
        generator_c(space, p, Sign::Minus),
    ];
    let weights = [
        C64::new(probe.psi_plus().norm_sqr(), 0.0),
        probe.off_diagonal(),
        probe.off_diagonal().conj(),
        C64::new(probe.psi_minus().norm_sqr(), 0.0),
    ];
    let mut blocks: Vec<Array2<C64>> = weights.iter().map(|w| rho0.mapv(|v| v * w)).collect();

    for &tau in seq.taus() {
        for _ in 0..2 {
            for (block, gen) in blocks.iter_mut().zip(&gens) {
                *block = expm_apply(gen, tau, block)?;
            }
            // pi pulse: sigma_x swaps block contents across the anti-diagonal
            blocks.swap(0, 3);
            blocks.swap(1, 2);
        }
    }

    let mut rho = Array2::<C64>::zeros((2 * d, 2 * d));
    for (idx, block) in blocks.iter().enumerate() {
        let (i, j) = (idx / 2, idx % 2);
        rho.slice_mut(s![i * d..(i + 1) * d, j * d..(j + 1) * d]).assign(block);
    }
    let mut leakage = 0.0;
    for n in d.saturating_sub(2)..d {
        leakage += (blocks[0][[n, n]] + blocks[3][[n, n]]).re;
    }
    Ok(JointState {
        rho,
        time: seq.total_time(),
        leakage,
        leakage_flag: leakage > LEAKAGE_LIMIT,
    })
}

/// Probe readout averages of a joint state.
pub fn pauli_expectations(state: &JointState) -> PauliExpectations {
    let pm = state.block_trace(0, 1);
    let mp = state.block_trace(1, 0);
    let zz = state.block_trace(0, 0) - state.block_trace(1, 1);
    PauliExpectations {
        x: (pm + mp).re,
        y: (C64::new(0.0, 1.0) * (pm - mp)).re,
        z: zz.re,
        xy: PauliXY { minus: 2.0 * pm, plus: 2.0 * mp },
    }
}

/// Characteristic-function value `tr(D(beta) rho)` of an oscillator state.
pub fn fock_trace_chi(space: FockSpace, rho: &Array2<C64>, beta: C64) -> Result<TracedChi> {
    let d = space.dim();
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::GridMismatch {
            detail: format!("state is {}x{}, expected {d}x{d}", rho.nrows(), rho.ncols()),
        });
    }
    let disp = space.displacement(beta);
    let mut value = C64::new(0.0, 0.0);
    for n in 0..d {
        for m in 0..d {
            value += disp.matrix[[n, m]] * rho[[m, n]];
        }
    }
    Ok(TracedChi { value, truncation_warning: disp.truncation_warning })
}

/// Density matrix of a reference state in the truncated basis.
pub fn reference_density(space: FockSpace, state: &ReferenceState) -> Result<Array2<C64>> {
    let d = space.dim();
    let v = state.state_vector(d)?;
    let mut rho = Array2::<C64>::zeros((d, d));
    for n in 0..d {
        for m in 0..d {
            rho[[n, m]] = v[n] * v[m].conj();
        }
    }
    Ok(rho)
}
