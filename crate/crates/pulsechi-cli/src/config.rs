//! Run configuration: a TOML file with struct-per-section layout, flag
//! overrides applied on top, and full validation before any computation.

use num_complex::Complex64 as C64;
use pulsechi::model::{OscillatorParams, ProbeAmplitudes, SequenceFamily};
use pulsechi::reconstruct::{SampleMode, SamplingPlan};
use pulsechi::states::ReferenceState;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::CliError;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub oscillator: Oscillator,
    pub probe: Probe,
    pub sweep: Sweep,
    pub state: ReferenceState,
    pub mode: Mode,
    pub grid: Grid,
    pub reconstruct: Reconstruct,
    pub verify: Verify,
    pub output: Output,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            oscillator: Oscillator::default(),
            probe: Probe::default(),
            sweep: Sweep::default(),
            state: ReferenceState::coherent(C64::new(1.5, 0.0)),
            mode: Mode::default(),
            grid: Grid::default(),
            reconstruct: Reconstruct::default(),
            verify: Verify::default(),
            output: Output::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Oscillator {
    pub nu: f64,
    pub gamma: f64,
    pub nbar: f64,
    pub g: f64,
}

impl Default for Oscillator {
    fn default() -> Self {
        Self { nu: 1.0, gamma: 1e-4, nbar: 0.3, g: 0.075 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Probe {
    pub amp_plus: C64,
    pub amp_minus: C64,
}

impl Default for Probe {
    fn default() -> Self {
        Self {
            amp_plus: C64::new(FRAC_1_SQRT_2, 0.0),
            amp_minus: C64::new(FRAC_1_SQRT_2, 0.0),
        }
    }
}

/// Which pulse sequences a run sweeps over.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sweep {
    /// Families listed one by one.
    Explicit { families: Vec<SequenceFamily> },
    /// Evenly spaced base durations in `(0, tau0_max]` for each listed `n`.
    EquidistantGrid {
        n_values: Vec<usize>,
        tau0_count: usize,
        tau0_max: Option<f64>,
    },
    /// Same duration grid applied to the triangular-ramp family.
    LinearGrid {
        n_values: Vec<usize>,
        tau0_count: usize,
        tau0_max: Option<f64>,
    },
    /// `per_n` independently seeded random families for each listed `n`.
    RandomDraws {
        n_values: Vec<usize>,
        per_n: usize,
        seed: u64,
    },
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep::EquidistantGrid {
            n_values: (1..=20).collect(),
            tau0_count: 200,
            tau0_max: None,
        }
    }
}

impl Sweep {
    /// Materializes the sweep; duration grids place `tau0_count` points at
    /// `j * tau0_max / tau0_count`, ending exactly on `tau0_max`.
    pub fn expand(&self, nu: f64) -> Result<Vec<SequenceFamily>, CliError> {
        let default_max = 2.0 * PI / nu;
        let grid = |n_values: &[usize], count: usize, max: Option<f64>, linear: bool| {
            let max = max.unwrap_or(default_max);
            if count == 0 || n_values.is_empty() || !(max.is_finite() && max > 0.0) {
                return Err(CliError::config(
                    "sweep duration grid needs nonempty n_values, tau0_count > 0, tau0_max > 0",
                ));
            }
            let step = max / count as f64;
            let mut out = Vec::with_capacity(n_values.len() * count);
            for &n in n_values {
                for j in 1..=count {
                    let tau0 = j as f64 * step;
                    out.push(if linear {
                        SequenceFamily::Linear { tau0, n }
                    } else {
                        SequenceFamily::Equidistant { tau0, n }
                    });
                }
            }
            Ok(out)
        };
        let families = match self {
            Sweep::Explicit { families } => families.clone(),
            Sweep::EquidistantGrid { n_values, tau0_count, tau0_max } => {
                grid(n_values, *tau0_count, *tau0_max, false)?
            }
            Sweep::LinearGrid { n_values, tau0_count, tau0_max } => {
                grid(n_values, *tau0_count, *tau0_max, true)?
            }
            Sweep::RandomDraws { n_values, per_n, seed } => {
                if *per_n == 0 || n_values.is_empty() {
                    return Err(CliError::config(
                        "sweep.random_draws needs nonempty n_values and per_n > 0",
                    ));
                }
                let mut out = Vec::with_capacity(n_values.len() * per_n);
                for &n in n_values {
                    for i in 0..*per_n {
                        out.push(SequenceFamily::Random {
                            n,
                            seed: seed ^ ((n as u64) << 40) ^ i as u64,
                            range: (0.0, default_max),
                        });
                    }
                }
                out
            }
        };
        if families.is_empty() {
            return Err(CliError::config("sweep expands to no sequences"));
        }
        Ok(families)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Mode {
    pub kind: ModeKind,
    pub oracle_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Analytic,
    Oracle,
}

impl Default for Mode {
    fn default() -> Self {
        Self { kind: ModeKind::Analytic, oracle_dim: 40 }
    }
}

impl Mode {
    pub fn sample_mode(&self) -> SampleMode {
        match self.kind {
            ModeKind::Analytic => SampleMode::Analytic,
            ModeKind::Oracle => SampleMode::Oracle { dim: self.oracle_dim },
        }
    }
}

/// Reconstruction grid, a square of half-width `extent` at pitch `spacing`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub extent: f64,
    pub spacing: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Self { extent: 4.0, spacing: 0.08 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Reconstruct {
    /// Basis size of the reconstructed density matrix.
    pub dim: usize,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_count: usize,
    /// Each cap keeps only sweep families with `n <= cap`.
    pub n_caps: Vec<usize>,
}

impl Default for Reconstruct {
    fn default() -> Self {
        Self { dim: 30, gamma_min: 1e-4, gamma_max: 1.0, gamma_count: 12, n_caps: vec![10, 20] }
    }
}

impl Reconstruct {
    pub fn gamma_grid(&self) -> Result<Vec<f64>, CliError> {
        if self.gamma_count == 0 {
            return Err(CliError::config("reconstruct.gamma_count must be positive"));
        }
        if !(self.gamma_min > 0.0 && self.gamma_max >= self.gamma_min) {
            return Err(CliError::config(
                "reconstruct gamma range needs 0 < gamma_min <= gamma_max",
            ));
        }
        if self.gamma_count == 1 {
            return Ok(vec![self.gamma_min]);
        }
        let lo = self.gamma_min.ln();
        let hi = self.gamma_max.ln();
        Ok((0..self.gamma_count)
            .map(|k| (lo + (hi - lo) * k as f64 / (self.gamma_count - 1) as f64).exp())
            .collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Verify {
    pub dim: usize,
}

impl Default for Verify {
    fn default() -> Self {
        Self { dim: 60 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
    pub prefix: String,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), prefix: String::from("run") }
    }
}

/// Everything validated and materialized, ready for a command to run on.
pub struct Validated {
    pub config: RunConfig,
    pub params: OscillatorParams,
    pub probe: ProbeAmplitudes,
    pub families: Vec<SequenceFamily>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::config(format!("config {}: {e}", path.display())))
    }

    /// Validates every section and expands the sweep.
    pub fn validate(&self) -> Result<Validated, CliError> {
        let o = &self.oscillator;
        let params = OscillatorParams::new(o.nu, o.gamma, o.nbar, o.g)
            .map_err(|e| CliError::config(format!("oscillator: {e}")))?;
        let probe = ProbeAmplitudes::new(self.probe.amp_plus, self.probe.amp_minus)
            .map_err(|e| CliError::config(format!("probe: {e}")))?;
        self.state
            .validate()
            .map_err(|e| CliError::config(format!("state: {e}")))?;
        if self.mode.kind == ModeKind::Oracle && self.mode.oracle_dim < 2 {
            return Err(CliError::config("mode.oracle_dim must be at least 2"));
        }
        if !(self.grid.extent > 0.0 && self.grid.spacing > 0.0) {
            return Err(CliError::config("grid extent and spacing must be positive"));
        }
        if self.reconstruct.dim < 2 {
            return Err(CliError::config("reconstruct.dim must be at least 2"));
        }
        if self.reconstruct.n_caps.is_empty() {
            return Err(CliError::config("reconstruct.n_caps must be nonempty"));
        }
        self.reconstruct.gamma_grid()?;
        if self.verify.dim < 2 {
            return Err(CliError::config("verify.dim must be at least 2"));
        }
        let families = self.sweep.expand(o.nu)?;
        SamplingPlan::new(families.clone())
            .map_err(|e| CliError::config(format!("sweep: {e}")))?;
        Ok(Validated { config: self.clone(), params, probe, families })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates_and_expands_the_default_sweep() {
        let v = RunConfig::default().validate().unwrap();
        assert_eq!(v.families.len(), 20 * 200);
        assert!(matches!(v.families[0], SequenceFamily::Equidistant { n: 1, .. }));
    }

    #[test]
    fn gamma_grid_is_log_spaced_with_exact_endpoints() {
        let rc = Reconstruct {
            gamma_min: 1e-4,
            gamma_max: 1.0,
            gamma_count: 12,
            ..Reconstruct::default()
        };
        let grid = rc.gamma_grid().unwrap();
        assert_eq!(grid.len(), 12);
        assert!((grid[0] / 1e-4 - 1.0).abs() < 1e-12);
        assert!((grid[11] - 1.0).abs() < 1e-12);
        let ratio = grid[1] / grid[0];
        for w in grid.windows(2) {
            assert!((w[1] / w[0] / ratio - 1.0).abs() < 1e-9);
        }
        let single = Reconstruct { gamma_count: 1, ..Reconstruct::default() };
        assert_eq!(single.gamma_grid().unwrap(), vec![single.gamma_min]);
    }

    #[test]
    fn empty_explicit_sweep_is_rejected() {
        let mut c = RunConfig::default();
        c.sweep = Sweep::Explicit { families: Vec::new() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn random_draw_sweeps_get_distinct_reproducible_seeds() {
        let text = r#"
[sweep]
kind = "random_draws"
n_values = [2, 3]
per_n = 4
seed = 99
"#;
        let c: RunConfig = toml::from_str(text).unwrap();
        let fams = c.sweep.expand(1.0).unwrap();
        assert_eq!(fams.len(), 8);
        let mut seeds: Vec<u64> = fams
            .iter()
            .map(|f| match f {
                SequenceFamily::Random { seed, .. } => *seed,
                _ => panic!("expected random families"),
            })
            .collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 8);
        assert_eq!(c.sweep.expand(1.0).unwrap(), fams);
    }

    #[test]
    fn unknown_keys_fail_parsing_in_every_section() {
        for text in [
            "[grid]\nextent = 3.0\nslack = 1.0\n",
            "[reconstruct]\nbins = 5\n",
            "[verify]\nmode = \"fast\"\n",
        ] {
            assert!(toml::from_str::<RunConfig>(text).is_err(), "accepted: {text}");
        }
    }
}
