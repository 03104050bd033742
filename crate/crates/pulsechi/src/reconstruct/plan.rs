//! Sampling plans and characteristic-function sample collection.

use crate::analytic::{predict_readout, zeta_equidistant_closed};
use crate::model::{OscillatorParams, ProbeAmplitudes, SequenceFamily};
use crate::oracle::{pauli_expectations, reference_density, run_sequence, FockSpace};
use crate::par::map_batch;
use crate::states::ReferenceState;
use crate::{C64, Error, Result};

/// A list of sequence families to sample, one accessible point per family.
#[derive(Clone, Debug)]
pub struct SamplingPlan {
    families: Vec<SequenceFamily>,
}

impl SamplingPlan {
    /// Validates that every family expands to a usable sequence.
    pub fn new(families: Vec<SequenceFamily>) -> Result<Self> {
        if families.is_empty() {
            return Err(Error::EmptySequence);
        }
        for family in &families {
            family.expand()?;
        }
        Ok(Self { families })
    }

    /// Cross product of segment counts and base durations.
    pub fn equidistant_sweep(n_values: &[usize], tau0_grid: &[f64]) -> Result<Self> {
        let mut families = Vec::with_capacity(n_values.len() * tau0_grid.len());
        for &n in n_values {
            for &tau0 in tau0_grid {
                families.push(SequenceFamily::Equidistant { tau0, n });
            }
        }
        Self::new(families)
    }

    /// Cross product of peak segment counts and base durations for the
    /// ramp-up/ramp-down spacing.
    pub fn linear_sweep(n_values: &[usize], tau0_grid: &[f64]) -> Result<Self> {
        let mut families = Vec::with_capacity(n_values.len() * tau0_grid.len());
        for &n in n_values {
            for &tau0 in tau0_grid {
                families.push(SequenceFamily::Linear { tau0, n });
            }
        }
        Self::new(families)
    }

    /// `count` independent random families; each row gets its own
    /// deterministic seed derived from the master seed.
    pub fn random_draws(count: usize, n: usize, seed: u64, range: (f64, f64)) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptySequence);
        }
        let families = (0..count)
            .map(|i| SequenceFamily::Random {
                n,
                seed: splitmix64(seed.wrapping_add(i as u64)),
                range,
            })
            .collect();
        Self::new(families)
    }

    pub fn families(&self) -> &[SequenceFamily] {
        &self.families
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Where a sample's value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleSource {
    Analytic,
    Oracle,
    External,
}

/// Warnings attached to a sample.
#[derive(Clone, Copy, Debug, Default)]
pub struct SampleFlags {
    pub truncation: bool,
    pub pole: bool,
}

/// One characteristic-function sample at an accessible point.
#[derive(Clone, Copy, Debug)]
pub struct CharacteristicSample {
    pub beta: C64,
    pub value: C64,
    pub source: SampleSource,
    pub flags: SampleFlags,
}

/// How to evaluate the readout for each sequence.
#[derive(Clone, Copy, Debug)]
pub enum SampleMode {
    /// Closed-form forward model and inversion.
    Analytic,
    /// Full joint-system simulation at the given basis size.
    Oracle { dim: usize },
}

/// Accessible points closer to the origin than this collapse to one sample.
const ZERO_POINT: f64 = 1e-14;

/// Collects conjugate-completed samples for every family in the plan.
///
/// Each family contributes its accessible point `+zeta` with the recovered
/// characteristic-function value and the mirrored point `-zeta` with the
/// conjugate value. A decoupled family reaches only the origin and emits the
/// single sample there.
pub fn collect_samples(
    p: &OscillatorParams,
    probe: &ProbeAmplitudes,
    plan: &SamplingPlan,
    state: &ReferenceState,
    mode: SampleMode,
) -> Result<Vec<CharacteristicSample>> {
    state.validate()?;
    let results = map_batch(plan.families().to_vec(), |family| {
        collect_one(p, probe, &family, state, mode)
    });
    let mut samples = Vec::with_capacity(2 * plan.len());
    for r in results {
        samples.extend(r?);
    }
    Ok(samples)
}

fn collect_one(
    p: &OscillatorParams,
    probe: &ProbeAmplitudes,
    family: &SequenceFamily,
    state: &ReferenceState,
    mode: SampleMode,
) -> Result<Vec<CharacteristicSample>> {
    let seq = family.expand()?;
    let pole = match family {
        SequenceFamily::Equidistant { tau0, n } => {
            matches!(zeta_equidistant_closed(p, *tau0, *n), Err(Error::TangentPole { .. }))
        }
        _ => false,
    };
    let (beta, value, source, truncation) = match mode {
        SampleMode::Analytic => {
            let m = predict_readout(p, probe, &seq, |b| state.chi(b))?;
            (m.zeta, m.chi_plus, SampleSource::Analytic, false)
        }
        SampleMode::Oracle { dim } => {
            let space = FockSpace::new(dim)?;
            let rho0 = reference_density(space, state)?;
            let joint = run_sequence(space, p, probe, &seq, &rho0, None)?;
            let pauli = pauli_expectations(&joint);
            let m = crate::analytic::invert_measurement(p, probe, &seq, pauli.xy)?;
            (m.zeta, m.chi_plus, SampleSource::Oracle, joint.leakage_flag)
        }
    };
    let flags = SampleFlags { truncation, pole };
    if beta.norm() < ZERO_POINT {
        return Ok(vec![CharacteristicSample { beta: C64::new(0.0, 0.0), value, source, flags }]);
    }
    Ok(vec![
        CharacteristicSample { beta, value, source, flags },
        CharacteristicSample { beta: -beta, value: value.conj(), source, flags },
    ])
}
