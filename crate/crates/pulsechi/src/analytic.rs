//! Closed-form evaluation of every scalar quantity in the pulsed readout
//! protocol, and the inversion that turns probe readouts into values of the
//! oscillator's characteristic function.
//!
//! Conventions: the complex frequency is `nu - i gamma/2`; segment `n` covers
//! the window `tau_n` twice (once on each side of the mid-segment probe
//! flip); empty products are 1 and empty sums 0, and a summation range that
//! runs backwards contributes its factors reciprocally. The last convention
//! is not cosmetic: it is pinned by the brute-force propagator checks.

use crate::model::{OscillatorParams, ProbeAmplitudes, PulseSequence, SequenceFamily, Sign};
use crate::special::{KahanC64, KahanF64};
use crate::{C64, Error, Result};

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Damped oscillation frequency `nu - i gamma/2`.
pub fn complex_frequency(p: &OscillatorParams) -> C64 {
    C64::new(p.nu, -0.5 * p.gamma)
}

/// Relative coupling strength `g / (2 (nu - i gamma/2))`.
pub fn epsilon(p: &OscillatorParams) -> C64 {
    C64::new(p.g, 0.0) / (2.0 * complex_frequency(p))
}

/// Interference decay rate `g^2 (2 nbar + 1) gamma / (2 |nu - i gamma/2|^2)`.
///
/// Nonnegative; zero exactly when `gamma` or `g` vanishes. Finite even at
/// `nbar = 0`: the vacuum still decoheres the probe through the damped
/// oscillator.
pub fn gamma_interference(p: &OscillatorParams) -> f64 {
    let m2 = complex_frequency(p).norm_sqr();
    p.g * p.g * (2.0 * p.nbar + 1.0) * p.gamma / (2.0 * m2)
}

/// Displacement parameters of the anticommutator-branch factorization.
///
/// They satisfy `xi2 - xi3 = 2 conj(epsilon)` and
/// `gamma_interference = i g xi1 / 2` (real and nonnegative).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewParams {
    pub xi1: C64,
    pub xi2: C64,
    pub xi3: C64,
}

pub fn skew_params(p: &OscillatorParams) -> SkewParams {
    let m2 = complex_frequency(p).norm_sqr();
    let g = p.g;
    SkewParams {
        xi1: C64::new(0.0, -g * (2.0 * p.nbar + 1.0) * p.gamma / m2),
        xi2: C64::new(2.0 * p.nu, (4.0 * p.nbar + 1.0) * p.gamma) * (g / (4.0 * m2)),
        xi3: C64::new(2.0 * p.nu, -(4.0 * p.nbar + 3.0) * p.gamma) * (-g / (4.0 * m2)),
    }
}

/// Transient thermal occupation `(nbar + 1/2)(1 - e^{-gamma t})`.
pub fn nbar_t(p: &OscillatorParams, t: f64) -> Result<f64> {
    check_duration(t)?;
    Ok(nbar_t_raw(p, t))
}

// expm1 keeps small gamma*t accurate
fn nbar_t_raw(p: &OscillatorParams, t: f64) -> f64 {
    -(p.nbar + 0.5) * (-p.gamma * t).exp_m1()
}

fn check_duration(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain { name: "t", value: t, reason: "duration must be nonnegative" })
    }
}

/// Shared summation kernel
/// `sum_n (1 - e^{-i w tau_n})^2 prod_{k<=n} e^{2 i w tau_k}`.
///
/// `upsilon` evaluates it at the complex frequency, `zeta` at its conjugate;
/// the sum is Kahan-compensated against the mild cancellation in the squared
/// differences.
pub fn sequence_kernel(w: C64, taus: &[f64]) -> C64 {
    let mut acc = KahanC64::default();
    let mut prod = ONE;
    for &tau in taus {
        let q = (-I * w * tau).exp();
        prod *= (I * w * (2.0 * tau)).exp();
        let d = ONE - q;
        acc.add(d * d * prod);
    }
    acc.value()
}

/// Net displacement the diagonal probe branches imprint over a full sequence.
pub fn upsilon(p: &OscillatorParams, seq: &PulseSequence) -> C64 {
    let w = complex_frequency(p);
    epsilon(p) * (-I * w * seq.total_time()).exp() * sequence_kernel(w, seq.taus())
}

/// The phase-space point the sequence makes accessible to the readout.
pub fn zeta(p: &OscillatorParams, seq: &PulseSequence) -> C64 {
    let w = complex_frequency(p).conj();
    2.0 * epsilon(p).conj() * sequence_kernel(w, seq.taus())
}

/// Closed form of `zeta` for an equidistant sequence of `n` windows `tau0`.
///
/// Fails within 1e-6 of the tangent pole at `cos(w tau0 / 2) = 0`, where the
/// general sum stays finite; `zeta_equidistant` adds that fallback. The
/// overall sign is pinned by agreement with the general sum.
pub fn zeta_equidistant_closed(p: &OscillatorParams, tau0: f64, n: usize) -> Result<C64> {
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    if !(tau0.is_finite() && tau0 > 0.0) {
        return Err(Error::Domain { name: "tau0", value: tau0, reason: "must be finite and positive" });
    }
    let w = complex_frequency(p).conj();
    let half = 0.5 * w * tau0;
    let cos_magnitude = half.cos().norm();
    if cos_magnitude < 1e-6 {
        return Err(Error::TangentPole { cos_magnitude });
    }
    let nwt = w * (n as f64 * tau0);
    Ok(-4.0 * epsilon(p).conj() * nwt.sin() * half.tan() * (I * nwt).exp())
}

/// `zeta` on an equidistant sequence: the closed form away from the tangent
/// pole, the general sum within 1e-6 of it.
pub fn zeta_equidistant(p: &OscillatorParams, tau0: f64, n: usize) -> Result<C64> {
    match zeta_equidistant_closed(p, tau0, n) {
        Err(Error::TangentPole { .. }) => {
            let seq = SequenceFamily::Equidistant { tau0, n }.expand()?;
            Ok(zeta(p, &seq))
        }
        other => other,
    }
}

/// Displacement parameters of a sign branch, segment by segment: entry `n-1`
/// holds the value for the `n`-th window. Forward recursion from
/// `-signum * beta` with per-window update
/// `b -> b e^{-2 i conj(w) tau} + 2 conj(epsilon) (1 - e^{-i conj(w) tau})^2`.
pub fn beta_sequence(p: &OscillatorParams, seq: &PulseSequence, beta: C64, sign: Sign) -> Vec<C64> {
    let w = complex_frequency(p).conj();
    let te = 2.0 * epsilon(p).conj();
    let mut out = Vec::with_capacity(seq.len());
    let mut cur = -sign.signum() * beta;
    for &tau in seq.taus() {
        out.push(cur);
        let q = (-I * w * tau).exp();
        let d = ONE - q;
        cur = cur * q * q + te * d * d;
    }
    out
}

/// One-based accessor for `beta_sequence`.
pub fn beta_n(
    p: &OscillatorParams,
    seq: &PulseSequence,
    beta: C64,
    n: usize,
    sign: Sign,
) -> Result<C64> {
    check_index(n, seq.len())?;
    Ok(beta_sequence(p, seq, beta, sign)[n - 1])
}

fn check_index(n: usize, len: usize) -> Result<()> {
    if (1..=len).contains(&n) {
        Ok(())
    } else {
        Err(Error::IndexRange { index: n, len })
    }
}

/// Readout-branch displacement parameters: `beta_sequence` evaluated at the
/// accessible point, `phi_n = beta_n` at `beta = zeta` (either sign branch,
/// both give the same values). Computed by the backward recursion
/// `phi_n = e^{2 i conj(w) tau_n} (phi_{n+1} - 2 conj(epsilon) (1 - e^{-i conj(w) tau_n})^2)`
/// so no accessible-point evaluation is needed; `phi_1 = -zeta` follows.
pub fn phi_sequence(p: &OscillatorParams, seq: &PulseSequence) -> Vec<C64> {
    let w = complex_frequency(p).conj();
    let te = 2.0 * epsilon(p).conj();
    let mut out = vec![C64::new(0.0, 0.0); seq.len()];
    let mut next = C64::new(0.0, 0.0);
    for (i, &tau) in seq.taus().iter().enumerate().rev() {
        let q = (-I * w * tau).exp();
        let d = ONE - q;
        next = (I * w * (2.0 * tau)).exp() * (next - te * d * d);
        out[i] = next;
    }
    out
}

/// One-based accessor for `phi_sequence`.
pub fn phi_n(p: &OscillatorParams, seq: &PulseSequence, n: usize) -> Result<C64> {
    check_index(n, seq.len())?;
    Ok(phi_sequence(p, seq)[n - 1])
}

/// Real per-segment exponent `f(t, sigma)` entering the readout
/// normalization.
///
/// The raw expression contains a `sigma/g` term multiplied by the
/// interference rate; the quotient is folded into its prefactor
/// (`2 gamma_interference / g = g (2 nbar + 1) gamma / |w|^2`) so the
/// decoupled point `g = 0` evaluates exactly instead of as 0/0.
pub fn f_exponent(p: &OscillatorParams, t: f64, sigma: C64) -> Result<f64> {
    check_duration(t)?;
    let w = complex_frequency(p).conj();
    let gam = gamma_interference(p);
    let lin = p.g * (2.0 * p.nbar + 1.0) * p.gamma / w.norm_sqr();
    let e1 = (-I * w * t).exp();
    let two_me = C64::new(2.0, 0.0) - e1;
    let d = ONE - e1;
    let te = 2.0 * epsilon(p).conj();
    let b = te + sigma;
    let thermal = nbar_t_raw(p, t)
        * (p.gamma * t).exp()
        * (b.norm_sqr() + (b * e1 - 2.0 * te).norm_sqr());
    Ok(2.0 * gam * (two_me * two_me / w).im + lin * (sigma * d * d).im - thermal)
}

/// Log attenuation of the whole sequence: the scaling factors are
/// `C_pm = e^{-protocol_exponent} / (2 psi_pm conj(psi_mp))`. The segment
/// count enters as the expanded length, so triangular-ramp sequences
/// automatically use their doubled count.
pub fn protocol_exponent(p: &OscillatorParams, seq: &PulseSequence) -> f64 {
    let gam = gamma_interference(p);
    let m2 = complex_frequency(p).norm_sqr();
    let mut s = KahanF64::default();
    for (&tau, phi) in seq.taus().iter().zip(phi_sequence(p, seq)) {
        let f = f_exponent(p, tau, phi).expect("segment durations are positive");
        s.add(f);
    }
    -gam * seq.total_time() + seq.len() as f64 * gam * p.gamma / m2 + s.value()
}

/// Readout scaling factors `(C_+, C_-)`.
pub fn scaling_factor(
    p: &OscillatorParams,
    probe: &ProbeAmplitudes,
    seq: &PulseSequence,
) -> Result<(C64, C64)> {
    let off = probe.off_diagonal();
    if off.norm_sqr() < 1e-24 {
        return Err(Error::DegenerateProbe);
    }
    let scale = (-protocol_exponent(p, seq)).exp();
    Ok((scale / (2.0 * off), scale / (2.0 * off.conj())))
}

/// Multiplier `e^{gamma_d T}` that undoes pure probe dephasing when it is
/// folded into the scaling factors.
pub fn dephasing_compensation(gamma_d: f64, t_total: f64) -> Result<f64> {
    if !(gamma_d.is_finite() && gamma_d >= 0.0) {
        return Err(Error::Domain {
            name: "gamma_d",
            value: gamma_d,
            reason: "dephasing rate must be finite and nonnegative",
        });
    }
    check_duration(t_total)?;
    Ok((gamma_d * t_total).exp())
}

/// Transverse probe readouts: `minus` holds `<sigma_x - i sigma_y>`, `plus`
/// holds `<sigma_x + i sigma_y>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliXY {
    pub minus: C64,
    pub plus: C64,
}

/// Outcome of the measurement inversion for one sequence.
#[derive(Clone, Copy, Debug)]
pub struct MeasurementPrediction {
    pub zeta: C64,
    pub c_plus: C64,
    pub c_minus: C64,
    pub pauli_xy: PauliXY,
    /// Recovered `chi(+zeta) = c_plus * pauli_xy.minus`.
    pub chi_plus: C64,
    /// Recovered `chi(-zeta) = c_minus * pauli_xy.plus`.
    pub chi_minus: C64,
    /// `|chi_minus - conj(chi_plus)|`; stays small for readouts of a
    /// Hermitian oscillator state.
    pub hermiticity_residual: f64,
}

/// Recovers `chi(+zeta)` and `chi(-zeta)` from the transverse readouts.
pub fn invert_measurement(
    p: &OscillatorParams,
    probe: &ProbeAmplitudes,
    seq: &PulseSequence,
    pauli_xy: PauliXY,
) -> Result<MeasurementPrediction> {
    for (v, name) in [(pauli_xy.minus, "pauli_xy.minus"), (pauli_xy.plus, "pauli_xy.plus")] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Domain { name, value: v.norm(), reason: "readout must be finite" });
        }
    }
    let (c_plus, c_minus) = scaling_factor(p, probe, seq)?;
    let chi_plus = c_plus * pauli_xy.minus;
    let chi_minus = c_minus * pauli_xy.plus;
    Ok(MeasurementPrediction {
        zeta: zeta(p, seq),
        c_plus,
        c_minus,
        pauli_xy,
        chi_plus,
        chi_minus,
        hermiticity_residual: (chi_minus - chi_plus.conj()).norm(),
    })
}

/// Forward model: the transverse readouts a state with characteristic
/// function `chi` produces under the sequence, pushed back through
/// `invert_measurement` so the result doubles as a round-trip check.
pub fn predict_readout(
    p: &OscillatorParams,
    probe: &ProbeAmplitudes,
    seq: &PulseSequence,
    chi: impl Fn(C64) -> C64,
) -> Result<MeasurementPrediction> {
    let off = probe.off_diagonal();
    if off.norm_sqr() < 1e-24 {
        return Err(Error::DegenerateProbe);
    }
    let z = zeta(p, seq);
    let gain = protocol_exponent(p, seq).exp();
    let pauli_xy = PauliXY {
        minus: 2.0 * off * gain * chi(z),
        plus: 2.0 * off.conj() * gain * chi(-z),
    };
    invert_measurement(p, probe, seq, pauli_xy)
}
