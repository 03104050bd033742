//! Physical parameters, probe amplitudes, and pulse-sequence families.

use crate::{C64, Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Branch selector for the paired generators and propagators of the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `+1.0` or `-1.0`.
    pub fn signum(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Oscillator and coupling parameters.
///
/// `nu` is the oscillator frequency, `gamma` the thermalization rate, `nbar`
/// the bath occupation, and `g` the probe-oscillator coupling strength. All
/// rates share the units of `nu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub nu: f64,
    pub gamma: f64,
    pub nbar: f64,
    pub g: f64,
}

fn require(ok: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain { name, value, reason })
    }
}

impl OscillatorParams {
    /// Validates `nu > 0`, `gamma >= 0`, `nbar >= 0`, `g >= 0`, all finite.
    pub fn new(nu: f64, gamma: f64, nbar: f64, g: f64) -> Result<Self> {
        require(nu.is_finite() && nu > 0.0, "nu", nu, "must be finite and positive")?;
        require(gamma.is_finite() && gamma >= 0.0, "gamma", gamma, "must be finite and nonnegative")?;
        require(nbar.is_finite() && nbar >= 0.0, "nbar", nbar, "must be finite and nonnegative")?;
        require(g.is_finite() && g >= 0.0, "g", g, "must be finite and nonnegative")?;
        Ok(Self { nu, gamma, nbar, g })
    }
}

/// Thermal occupation from the frequency-to-temperature ratio `x = h nu / kB T`:
/// `1 / (e^x - 1)`.
pub fn nbar_from_ratio(x: f64) -> Result<f64> {
    require(x.is_finite() && x > 0.0, "frequency-temperature ratio", x, "must be finite and positive")?;
    // expm1 keeps the high-temperature (small x) limit accurate
    Ok(1.0 / x.exp_m1())
}

/// Normalized probe superposition amplitudes `(psi_+, psi_-)`.
///
/// Any constructor output satisfies `|psi_+|^2 + |psi_-|^2 = 1` to 1e-12; the
/// off-diagonal product `psi_+ conj(psi_-)` is what the readout divides by.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbeAmplitudes {
    psi_plus: C64,
    psi_minus: C64,
}

impl ProbeAmplitudes {
    /// Normalizes the pair; rejects a vector with (near-)zero norm.
    pub fn new(psi_plus: C64, psi_minus: C64) -> Result<Self> {
        let norm2 = psi_plus.norm_sqr() + psi_minus.norm_sqr();
        require(
            norm2.is_finite() && norm2 > 1e-24,
            "probe norm",
            norm2,
            "amplitudes must have nonzero finite norm",
        )?;
        let scale = norm2.sqrt().recip();
        Ok(Self {
            psi_plus: psi_plus * scale,
            psi_minus: psi_minus * scale,
        })
    }

    /// The balanced superposition `(1, 1)/sqrt(2)` used throughout the protocol.
    pub fn balanced() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { psi_plus: h, psi_minus: h }
    }

    pub fn psi_plus(&self) -> C64 {
        self.psi_plus
    }

    pub fn psi_minus(&self) -> C64 {
        self.psi_minus
    }

    /// `psi_+ conj(psi_-)`, the coherence the pulsed readout rides on.
    pub fn off_diagonal(&self) -> C64 {
        self.psi_plus * self.psi_minus.conj()
    }
}

impl Default for ProbeAmplitudes {
    fn default() -> Self {
        Self::balanced()
    }
}

/// A validated train of free-evolution windows `tau_1 .. tau_N`.
///
/// Each window is traversed twice (once on each side of a probe flip), so the
/// total protocol duration is `T = 2 sum tau_n`. `tau_1` is first in time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    taus: Vec<f64>,
}

impl PulseSequence {
    /// Requires a nonempty list of finite, strictly positive durations.
    pub fn new(taus: Vec<f64>) -> Result<Self> {
        if taus.is_empty() {
            return Err(Error::EmptySequence);
        }
        for &t in &taus {
            require(t.is_finite() && t > 0.0, "tau", t, "segment durations must be finite and positive")?;
        }
        Ok(Self { taus })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    /// Number of free-evolution windows (segments).
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total protocol duration `T = 2 sum tau_n`.
    pub fn total_time(&self) -> f64 {
        2.0 * self.taus.iter().sum::<f64>()
    }
}

/// The three sequence families the sweeps are built from.
///
/// `Linear` expands to the triangular ramp
/// `(tau0, 2 tau0, .., N tau0, .., 2 tau0, tau0)` with `2N - 1` segments; all
/// derived per-segment quantities automatically run over the expanded length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SequenceFamily {
    Equidistant { tau0: f64, n: usize },
    Random { n: usize, seed: u64, range: (f64, f64) },
    Linear { tau0: f64, n: usize },
}

impl SequenceFamily {
    /// A random family drawing `n` durations uniformly from `(0, 2 pi / nu]`,
    /// the default sweep window of one free-evolution period.
    pub fn random_default_range(n: usize, seed: u64, nu: f64) -> Self {
        SequenceFamily::Random {
            n,
            seed,
            range: (0.0, 2.0 * std::f64::consts::PI / nu),
        }
    }

    /// Materializes the family into a concrete sequence.
    ///
    /// `Random` draws are reproducible: the same `(n, seed, range)` always
    /// yields the same sequence, independent of threading or call order. Zero
    /// draws are rejected by redrawing so every duration is strictly positive.
    pub fn expand(&self) -> Result<PulseSequence> {
        match *self {
            SequenceFamily::Equidistant { tau0, n } => {
                if n == 0 {
                    return Err(Error::EmptySequence);
                }
                PulseSequence::new(vec![tau0; n])
            }
            SequenceFamily::Random { n, seed, range } => {
                if n == 0 {
                    return Err(Error::EmptySequence);
                }
                let (lo, hi) = range;
                require(
                    lo.is_finite() && hi.is_finite() && hi > lo && lo >= 0.0,
                    "random range",
                    hi - lo,
                    "range must be finite, nonnegative, and nonempty",
                )?;
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let mut taus = Vec::with_capacity(n);
                while taus.len() < n {
                    let t: f64 = rng.gen_range(lo..hi);
                    if t > 0.0 {
                        taus.push(t);
                    }
                }
                PulseSequence::new(taus)
            }
            SequenceFamily::Linear { tau0, n } => {
                if n == 0 {
                    return Err(Error::EmptySequence);
                }
                let mut taus = Vec::with_capacity(2 * n - 1);
                for k in 1..=n {
                    taus.push(k as f64 * tau0);
                }
                for k in (1..n).rev() {
                    taus.push(k as f64 * tau0);
                }
                PulseSequence::new(taus)
            }
        }
    }

    /// Nominal pulse count `N` of the family (before `Linear` expansion).
    pub fn n(&self) -> usize {
        match *self {
            SequenceFamily::Equidistant { n, .. }
            | SequenceFamily::Random { n, .. }
            | SequenceFamily::Linear { n, .. } => n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn params_validation() {
        assert!(OscillatorParams::new(1.0, 0.0, 0.0, 0.0).is_ok());
        assert!(OscillatorParams::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(OscillatorParams::new(1.0, -0.1, 0.0, 0.0).is_err());
        assert!(OscillatorParams::new(1.0, 0.0, -1.0, 0.0).is_err());
        assert!(OscillatorParams::new(1.0, 0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn nbar_from_ratio_reference_points() {
        assert_relative_eq!(nbar_from_ratio(1.0).unwrap(), 0.5819767068693265, max_relative = 1e-14);
        assert_relative_eq!(nbar_from_ratio(2.0f64.ln()).unwrap(), 1.0, max_relative = 1e-14);
        assert!(nbar_from_ratio(0.0).is_err());
        assert!(nbar_from_ratio(-1.0).is_err());
        // high-temperature limit ~ 1/x
        assert_relative_eq!(nbar_from_ratio(1e-8).unwrap(), 1e8, max_relative = 1e-6);
    }

    #[test]
    fn probe_normalization() {
        let p = ProbeAmplitudes::new(C64::new(3.0, 0.0), C64::new(0.0, 4.0)).unwrap();
        let norm2 = p.psi_plus().norm_sqr() + p.psi_minus().norm_sqr();
        assert_relative_eq!(norm2, 1.0, epsilon = 1e-12);
        assert!(ProbeAmplitudes::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).is_err());
        let b = ProbeAmplitudes::balanced();
        assert_relative_eq!(b.off_diagonal().re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(b.off_diagonal().im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sequence_validation_and_total_time() {
        assert!(matches!(PulseSequence::new(vec![]), Err(Error::EmptySequence)));
        assert!(PulseSequence::new(vec![1.0, 0.0]).is_err());
        assert!(PulseSequence::new(vec![1.0, -2.0]).is_err());
        let s = PulseSequence::new(vec![0.5, 1.5, 2.0]).unwrap();
        assert_relative_eq!(s.total_time(), 8.0);
    }

    #[test]
    fn linear_family_triangular_expansion() {
        let seq = SequenceFamily::Linear { tau0: 0.3, n: 3 }.expand().unwrap();
        let want = [0.3, 0.6, 0.9, 0.6, 0.3];
        assert_eq!(seq.len(), 5);
        for (a, b) in seq.taus().iter().zip(want.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-15);
        }
        // T = 2 N^2 tau0
        assert_relative_eq!(seq.total_time(), 2.0 * 9.0 * 0.3, epsilon = 1e-12);
    }

    #[test]
    fn zero_count_families_are_rejected() {
        for fam in [
            SequenceFamily::Equidistant { tau0: 1.0, n: 0 },
            SequenceFamily::Linear { tau0: 1.0, n: 0 },
            SequenceFamily::Random { n: 0, seed: 1, range: (0.0, 1.0) },
        ] {
            assert!(matches!(fam.expand(), Err(Error::EmptySequence)));
        }
    }

    #[test]
    fn random_family_is_reproducible_and_in_range() {
        let fam = SequenceFamily::random_default_range(64, 12345, 1.0);
        let a = fam.expand().unwrap();
        let b = fam.expand().unwrap();
        assert_eq!(a, b);
        let hi = 2.0 * std::f64::consts::PI;
        assert!(a.taus().iter().all(|&t| t > 0.0 && t <= hi));
        let other = SequenceFamily::random_default_range(64, 12346, 1.0).expand().unwrap();
        assert_ne!(a, other);
    }
}
