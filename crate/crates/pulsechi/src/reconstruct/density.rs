//! Density-matrix recovery from a gridded characteristic function and the
//! overlap-based fidelity measures.

use ndarray::Array2;

use crate::linalg::{eigh, frobenius, hermitize, trace};
use crate::oracle::FockSpace;
use crate::par::map_batch;
use crate::reconstruct::interp::{ChiGrid, GridSpec};
use crate::special::displacement_element;
use crate::{C64, Error, Result};

/// Boundary-to-peak ratio above which reconstruction refuses to run.
pub const TAIL_LIMIT: f64 = 1e-2;
/// Ratio above which the result only carries a warning.
pub const TAIL_WARN: f64 = 1e-3;

/// Numerical health report for one reconstruction.
#[derive(Clone, Copy, Debug)]
pub struct ReconstructionDiagnostics {
    /// Worst element asymmetry before the Hermitian projection.
    pub hermiticity_defect: f64,
    /// Distance of the reconstructed trace from one.
    pub trace_defect: f64,
    /// Smallest eigenvalue; quadrature noise makes it slightly negative and
    /// it is reported rather than projected away.
    pub min_eigenvalue: f64,
    /// Frobenius distance between the operator-sum and per-element routes.
    pub route_disagreement: f64,
    /// Grid boundary magnitude over peak magnitude.
    pub boundary_ratio: f64,
    pub tail_warning: bool,
    pub nonphysical: bool,
}

/// Reconstructed state plus the grid it came from.
#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub rho_tilde: Array2<C64>,
    /// Self-overlap of the gridded characteristic function, a purity
    /// estimate that reaches one when the grid captures a pure state.
    pub fidelity: f64,
    pub grid_spec: GridSpec,
    pub residuals: ReconstructionDiagnostics,
}

/// Inverts the grid to a `dim`-level density matrix.
///
/// Two independent quadratures are run, an operator sum over displacement
/// matrices and a per-element sum over displacement matrix elements; their
/// disagreement is reported. The first route, Hermitized, is the result.
pub fn reconstruct_rho(grid: &ChiGrid, dim: usize) -> Result<ReconstructionResult> {
    let space = FockSpace::new(dim)?;
    let spec = grid.spec();
    let peak = grid.peak();
    if peak == 0.0 {
        return Ok(ReconstructionResult {
            rho_tilde: Array2::zeros((dim, dim)),
            fidelity: 0.0,
            grid_spec: spec,
            residuals: ReconstructionDiagnostics {
                hermiticity_defect: 0.0,
                trace_defect: 1.0,
                min_eigenvalue: 0.0,
                route_disagreement: 0.0,
                boundary_ratio: 0.0,
                tail_warning: false,
                nonphysical: true,
            },
        });
    }
    let boundary_ratio = grid.boundary_max() / peak;
    if boundary_ratio > TAIL_LIMIT {
        return Err(Error::Coverage {
            detail: format!(
                "characteristic function at the grid boundary is {boundary_ratio:.2e} \
                 of its peak; enlarge the grid extent"
            ),
        });
    }
    let nodes = nonzero_nodes(grid);
    let weight = spec.spacing * spec.spacing / std::f64::consts::PI;

    let by_operator = sum_displacement_operators(space, &nodes, weight);
    let by_element = sum_displacement_elements(dim, &nodes, weight);
    let route_disagreement = frobenius(&(&by_operator - &by_element));

    let mut hermiticity_defect = 0.0f64;
    for n in 0..dim {
        for m in n..dim {
            let defect = (by_operator[[n, m]] - by_operator[[m, n]].conj()).norm();
            hermiticity_defect = hermiticity_defect.max(defect);
        }
    }
    let rho_tilde = hermitize(&by_operator);
    let trace_defect = (trace(&rho_tilde) - 1.0).norm();
    let (eigenvalues, _) = eigh(&rho_tilde)?;
    let min_eigenvalue = eigenvalues.iter().fold(f64::MAX, |m, &v| m.min(v));

    let self_overlap: f64 = weight * nodes.iter().map(|&(_, v)| v.norm_sqr()).sum::<f64>();
    Ok(ReconstructionResult {
        rho_tilde,
        fidelity: self_overlap.clamp(0.0, 1.0),
        grid_spec: spec,
        residuals: ReconstructionDiagnostics {
            hermiticity_defect,
            trace_defect,
            min_eigenvalue,
            route_disagreement,
            boundary_ratio,
            tail_warning: boundary_ratio > TAIL_WARN,
            nonphysical: trace_defect > 1e-2 || min_eigenvalue < -0.1,
        },
    })
}

fn nonzero_nodes(grid: &ChiGrid) -> Vec<(C64, C64)> {
    let spec = grid.spec();
    let n = spec.nodes_per_side;
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            let v = grid.values()[[iy, ix]];
            if v != C64::new(0.0, 0.0) {
                out.push((spec.beta_at(ix, iy), v));
            }
        }
    }
    out
}

// rho = w * sum_j chi_j D(-beta_j), accumulated in node chunks
fn sum_displacement_operators(space: FockSpace, nodes: &[(C64, C64)], weight: f64) -> Array2<C64> {
    let d = space.dim();
    let chunks: Vec<Vec<(C64, C64)>> = nodes.chunks(512).map(|c| c.to_vec()).collect();
    let partials = map_batch(chunks, move |chunk| {
        let mut acc = Array2::<C64>::zeros((d, d));
        for (beta, value) in chunk {
            let disp = space.displacement(-beta);
            acc.scaled_add(value, &disp.matrix);
        }
        acc
    });
    let mut total = Array2::<C64>::zeros((d, d));
    for p in partials {
        total += &p;
    }
    total.mapv_into(|v| v * weight)
}

// rho[n, m] = w * sum_j chi_j <n|D(-beta_j)|m>, row-parallel
fn sum_displacement_elements(dim: usize, nodes: &[(C64, C64)], weight: f64) -> Array2<C64> {
    let nodes = nodes.to_vec();
    let rows = map_batch((0..dim).collect(), move |n| {
        let mut row = vec![C64::new(0.0, 0.0); dim];
        for (m, slot) in row.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &(beta, value) in &nodes {
                acc += value * displacement_element(n, m, -beta);
            }
            *slot = acc * weight;
        }
        row
    });
    let mut out = Array2::<C64>::zeros((dim, dim));
    for (n, row) in rows.into_iter().enumerate() {
        for (m, v) in row.into_iter().enumerate() {
            out[[n, m]] = v;
        }
    }
    out
}

/// Overlap fidelity of two characteristic-function grids on the same layout.
pub fn fidelity(a: &ChiGrid, b: &ChiGrid) -> Result<f64> {
    if !a.matches(b) {
        return Err(Error::GridMismatch {
            detail: format!("grid layouts differ: {:?} vs {:?}", a.spec(), b.spec()),
        });
    }
    let w = a.spec().spacing * a.spec().spacing / std::f64::consts::PI;
    let s: f64 = a
        .values()
        .iter()
        .zip(b.values().iter())
        .map(|(&va, &vb)| (va * vb.conj()).re)
        .sum();
    Ok(w * s)
}

/// Overlap fidelity of a grid against a closed-form characteristic function.
pub fn fidelity_vs(a: &ChiGrid, chi: impl Fn(C64) -> C64) -> f64 {
    let spec = a.spec();
    let w = spec.spacing * spec.spacing / std::f64::consts::PI;
    let mut s = 0.0;
    for iy in 0..spec.nodes_per_side {
        for ix in 0..spec.nodes_per_side {
            s += (a.values()[[iy, ix]] * chi(spec.beta_at(ix, iy)).conj()).re;
        }
    }
    w * s
}

/// `<phi| rho |phi>` for a unit Fock-basis vector `phi`.
pub fn pure_state_fidelity(rho: &Array2<C64>, phi: &[C64]) -> Result<f64> {
    let d = rho.nrows();
    if rho.ncols() != d || phi.len() != d {
        return Err(Error::GridMismatch {
            detail: format!(
                "state vector of length {} does not match a {}x{} matrix",
                phi.len(),
                d,
                rho.ncols()
            ),
        });
    }
    let mut s = C64::new(0.0, 0.0);
    for n in 0..d {
        for m in 0..d {
            s += phi[n].conj() * rho[[n, m]] * phi[m];
        }
    }
    Ok(s.re)
}
