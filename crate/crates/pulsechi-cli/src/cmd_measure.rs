//! `measure`: characteristic-function samples over the configured sweep.

use crate::config::Validated;
use crate::output::{fmt_f, Emitter};
use crate::CliError;
use pulsechi::par::map_batch;
use pulsechi::reconstruct::{
    collect_samples, CharacteristicSample, SampleFlags, SampleSource, SamplingPlan,
};
use pulsechi::SequenceFamily;

const COLUMNS: [&str; 7] = [
    "beta_re", "beta_im", "chi_re", "chi_im", "source", "sequence", "flags",
];

pub fn source_name(s: SampleSource) -> &'static str {
    match s {
        SampleSource::Analytic => "analytic",
        SampleSource::Oracle => "oracle",
        SampleSource::External => "external",
    }
}

pub fn flag_string(f: SampleFlags) -> String {
    match (f.truncation, f.pole) {
        (false, false) => "-".to_string(),
        (true, false) => "truncation".to_string(),
        (false, true) => "pole".to_string(),
        (true, true) => "truncation;pole".to_string(),
    }
}

pub fn run(v: &Validated, emit_plot: bool) -> Result<(), CliError> {
    let p = v.params;
    let probe = v.probe;
    let mode = v.config.mode.sample_mode();
    let state = &v.config.state;

    // One plan per family keeps the sample-to-sequence association; batches
    // preserve input order so the CSV is stable under any thread count.
    let indexed: Vec<(usize, SequenceFamily)> =
        v.families.iter().cloned().enumerate().collect();
    let per_family: Vec<Result<Vec<CharacteristicSample>, pulsechi::Error>> =
        map_batch(indexed, |(_, family)| {
            let plan = SamplingPlan::new(vec![family])?;
            collect_samples(&p, &probe, &plan, state, mode)
        });

    let mut rows = Vec::new();
    for (idx, r) in per_family.into_iter().enumerate() {
        for s in r? {
            rows.push(vec![
                fmt_f(s.beta.re),
                fmt_f(s.beta.im),
                fmt_f(s.value.re),
                fmt_f(s.value.im),
                source_name(s.source).to_string(),
                idx.to_string(),
                flag_string(s.flags),
            ]);
        }
    }

    let mut em = Emitter::new(&v.config, "measure")?;
    let path = em.write_csv("samples", &COLUMNS, &rows)?;
    if emit_plot {
        em.write_plotscript("measure")?;
    }
    em.write_manifest(&v.config, "measure")?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}
