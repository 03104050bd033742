//! `reconstruct`: fidelity scan over damping and a density-matrix dump.
//!
//! Families are grouped by kind, capped at each configured sequence length,
//! and re-evaluated on a log-spaced damping grid. Every (gamma, kind, cap)
//! cell interpolates its own sample cloud and scores it against the reference
//! characteristic function. The density matrix is reconstructed once per kind
//! at the smallest damping with the largest cap.

use crate::config::Validated;
use crate::output::{fmt_f, Emitter};
use crate::CliError;
use pulsechi::par::map_batch;
use pulsechi::reconstruct::{
    collect_samples, fidelity_vs, interpolate_chi, reconstruct_rho, SamplingPlan,
};
use pulsechi::{npy, OscillatorParams, SequenceFamily};

const COLUMNS: [&str; 4] = ["gamma", "family", "cap", "fidelity"];

fn family_len(f: &SequenceFamily) -> usize {
    match *f {
        SequenceFamily::Equidistant { n, .. }
        | SequenceFamily::Random { n, .. }
        | SequenceFamily::Linear { n, .. } => n,
    }
}

fn kind_name(f: &SequenceFamily) -> &'static str {
    match f {
        SequenceFamily::Equidistant { .. } => "equidistant",
        SequenceFamily::Random { .. } => "random",
        SequenceFamily::Linear { .. } => "linear",
    }
}

pub fn run(v: &Validated, emit_plot: bool) -> Result<(), CliError> {
    let o = &v.config.oscillator;
    let probe = v.probe;
    let mode = v.config.mode.sample_mode();
    let state = &v.config.state;
    let grid_cfg = &v.config.grid;
    let rc = &v.config.reconstruct;
    let gammas = rc.gamma_grid()?;

    let mut groups: Vec<(&'static str, Vec<SequenceFamily>)> = Vec::new();
    for f in &v.families {
        let name = kind_name(f);
        match groups.iter_mut().find(|(n, _)| *n == name) {
            Some((_, list)) => list.push(f.clone()),
            None => groups.push((name, vec![f.clone()])),
        }
    }

    // Work items in deterministic order: damping outer, then kind, then cap.
    struct Cell {
        gamma: f64,
        kind: &'static str,
        cap: usize,
        families: Vec<SequenceFamily>,
    }
    let mut cells = Vec::new();
    for &gamma in &gammas {
        for (kind, list) in &groups {
            for &cap in &rc.n_caps {
                let families: Vec<SequenceFamily> = list
                    .iter()
                    .filter(|f| family_len(f) <= cap)
                    .cloned()
                    .collect();
                if families.is_empty() {
                    return Err(CliError::Coverage(format!(
                        "no {kind} sequences of length at most {cap} in the sweep"
                    )));
                }
                cells.push(Cell { gamma, kind, cap, families });
            }
        }
    }

    let extent = grid_cfg.extent;
    let spacing = grid_cfg.spacing;
    let results: Vec<Result<Vec<String>, pulsechi::Error>> =
        map_batch(cells, move |cell| {
            let p = OscillatorParams::new(o.nu, cell.gamma, o.nbar, o.g)?;
            let plan = SamplingPlan::new(cell.families)?;
            let samples = collect_samples(&p, &probe, &plan, state, mode)?;
            let chi = interpolate_chi(&samples, extent, spacing)?;
            let f = fidelity_vs(&chi, |beta| state.chi(beta));
            Ok(vec![
                fmt_f(cell.gamma),
                cell.kind.to_string(),
                cell.cap.to_string(),
                fmt_f(f),
            ])
        });
    let rows: Vec<Vec<String>> = results.into_iter().collect::<Result<_, _>>()?;

    let mut em = Emitter::new(&v.config, "reconstruct")?;
    let path = em.write_csv("fidelity", &COLUMNS, &rows)?;

    // Density-matrix dump at the friendliest corner of the scan.
    let gamma0 = gammas[0];
    let cap_max = rc.n_caps.iter().copied().max().expect("n_caps nonempty");
    let p0 = OscillatorParams::new(o.nu, gamma0, o.nbar, o.g)?;
    for (kind, list) in &groups {
        let families: Vec<SequenceFamily> = list
            .iter()
            .filter(|f| family_len(f) <= cap_max)
            .cloned()
            .collect();
        let plan = SamplingPlan::new(families)?;
        let samples = collect_samples(&p0, &probe, &plan, state, mode)?;
        let chi = interpolate_chi(&samples, extent, spacing)?;
        let result = reconstruct_rho(&chi, rc.dim)?;
        let data: Vec<_> = result.rho_tilde.iter().copied().collect();
        let rho_path = em.path(&format!("rho_{kind}"), "npy");
        npy::write_complex(&rho_path, &[rc.dim, rc.dim], &data)?;
        em.note_written(rho_path);
    }

    if emit_plot {
        em.write_plotscript("reconstruct")?;
    }
    em.write_manifest(&v.config, "reconstruct")?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}
