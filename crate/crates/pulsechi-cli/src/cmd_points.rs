//! `points`: the displacement each configured sequence reaches.

use crate::config::Validated;
use crate::output::{fmt_f, Emitter};
use crate::CliError;
use pulsechi::analytic::{zeta, zeta_equidistant_closed};
use pulsechi::par::map_batch;
use pulsechi::{Error, SequenceFamily};

const COLUMNS: [&str; 6] = ["family", "n", "tau0_or_seed", "re_zeta", "im_zeta", "flags"];

pub fn run(v: &Validated, emit_plot: bool) -> Result<(), CliError> {
    let p = v.params;
    let rows: Vec<Result<Vec<String>, CliError>> =
        map_batch(v.families.clone(), move |family| {
            let seq = family.expand()?;
            let z = zeta(&p, &seq);
            let (name, n, knob) = match family {
                SequenceFamily::Equidistant { tau0, n } => ("equidistant", n, fmt_f(tau0)),
                SequenceFamily::Linear { tau0, n } => ("linear", n, fmt_f(tau0)),
                SequenceFamily::Random { n, seed, .. } => ("random", n, seed.to_string()),
            };
            let pole = matches!(
                family,
                SequenceFamily::Equidistant { tau0, n }
                    if matches!(zeta_equidistant_closed(&p, tau0, n), Err(Error::TangentPole { .. }))
            );
            Ok(vec![
                name.to_string(),
                n.to_string(),
                knob,
                fmt_f(z.re),
                fmt_f(z.im),
                if pole { "pole".to_string() } else { "-".to_string() },
            ])
        });
    let rows: Vec<Vec<String>> = rows.into_iter().collect::<Result<_, _>>()?;

    let mut em = Emitter::new(&v.config, "points")?;
    let path = em.write_csv("points", &COLUMNS, &rows)?;
    if emit_plot {
        em.write_plotscript("points")?;
    }
    em.write_manifest(&v.config, "points")?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}
