//! Named residual checks for the closed forms the fast path relies on.
//!
//! Every check evaluates one operator identity two ways on the truncated
//! basis and reports a relative Frobenius residual. Identities probed on
//! localized test states use a ten-level edge margin. Identities whose
//! operand is a raw displacement matrix need a twenty-level margin instead:
//! the missing band above the truncation edge feeds back into lower levels
//! under thermal contact, with an amplitude that grows with the basis size,
//! so a fixed ten-level margin would make their residuals grow with d.

use crate::analytic::{
    complex_frequency, epsilon, f_exponent, gamma_interference, skew_params, zeta,
    beta_sequence, invert_measurement, SkewParams,
};
use crate::model::{OscillatorParams, ProbeAmplitudes, PulseSequence, Sign};
use crate::oracle::evolve::expm_apply;
use crate::oracle::generator::{generator_a, generator_c, liouvillian};
use crate::oracle::sequence::{pauli_expectations, reference_density, run_sequence};
use crate::oracle::space::FockSpace;
use crate::oracle::superdisp::{superdisplacement_skew, superdisplacement_sym};
use crate::states::ReferenceState;
use crate::{C64, Result};
use ndarray::Array2;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Edge margin for checks probed on localized test states.
const STATE_MARGIN: usize = 10;
/// Edge margin for checks acting on raw displacement operands.
const DISPLACEMENT_MARGIN: usize = 20;

/// Outcome of one identity check.
#[derive(Clone, Copy, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual < self.tolerance
    }
}

fn keep_levels(dim: usize, margin: usize) -> usize {
    dim.saturating_sub(margin).max(8.min(dim))
}

fn submatrix_rel(keep: usize, lhs: &Array2<C64>, rhs: &Array2<C64>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for n in 0..keep {
        for m in 0..keep {
            num += (lhs[[n, m]] - rhs[[n, m]]).norm_sqr();
            den += rhs[[n, m]].norm_sqr();
        }
    }
    (num / den.max(1e-300)).sqrt()
}

/// Two coherent dyads, localized around nine quanta, used as test states.
fn test_dyads(space: FockSpace) -> Vec<Array2<C64>> {
    let pairs = [
        (C64::from_polar(3.0, 0.4), C64::from_polar(2.6, -1.9)),
        (C64::from_polar(2.8, 2.3), C64::from_polar(3.1, 1.0)),
    ];
    let d = space.dim();
    pairs
        .iter()
        .map(|&(a1, a2)| {
            let u = ReferenceState::coherent(a1).state_vector(d).expect("dim checked");
            let v = ReferenceState::coherent(a2).state_vector(d).expect("dim checked");
            Array2::from_shape_fn((d, d), |(n, m)| u[n] * v[m].conj())
        })
        .collect()
}

fn max_over_dyads(
    space: FockSpace,
    margin: usize,
    mut pair: impl FnMut(&Array2<C64>) -> Result<(Array2<C64>, Array2<C64>)>,
) -> Result<f64> {
    let keep = keep_levels(space.dim(), margin);
    let mut worst = 0.0f64;
    for dyad in test_dyads(space) {
        let (lhs, rhs) = pair(&dyad)?;
        worst = worst.max(submatrix_rel(keep, &lhs, &rhs));
    }
    Ok(worst)
}

/// Free thermalization maps a displacement to a rescaled displacement.
pub fn thermal_displacement_motion(
    space: FockSpace,
    p: &OscillatorParams,
    sigma: C64,
    t: f64,
) -> Result<f64> {
    let lhs = expm_apply(&liouvillian(space, p), t, &space.displacement(sigma).matrix)?;
    let moved = sigma * (-I * complex_frequency(p).conj() * t).exp();
    let weight = (p.gamma * t).exp() * (-crate::analytic::nbar_t(p, t)? * moved.norm_sqr()).exp();
    let rhs = space.displacement(moved).matrix.mapv(|v| v * weight);
    Ok(submatrix_rel(keep_levels(space.dim(), DISPLACEMENT_MARGIN), &lhs, &rhs))
}

/// Thermalization commutes with a superdisplacement whose parameter follows
/// the damped rotation.
pub fn switch_identity_residual(
    space: FockSpace,
    p: &OscillatorParams,
    eps: C64,
    t: f64,
) -> Result<f64> {
    let free = liouvillian(space, p);
    let before = superdisplacement_sym(space, eps);
    let after = superdisplacement_sym(space, eps * (-I * complex_frequency(p) * t).exp());
    max_over_dyads(space, STATE_MARGIN, |x| {
        let lhs = expm_apply(&free, t, &before.apply(x))?;
        let rhs = after.apply(&expm_apply(&free, t, x)?);
        Ok((lhs, rhs))
    })
}

/// The commutator-coupled window is thermalization conjugated by the
/// stationary superdisplacement.
pub fn commutator_window_factorization(
    space: FockSpace,
    p: &OscillatorParams,
    sign: Sign,
    t: f64,
) -> Result<f64> {
    let e = epsilon(p);
    let s = sign.signum();
    let coupled = generator_c(space, p, sign);
    let free = liouvillian(space, p);
    let outer = superdisplacement_sym(space, -s * e);
    let inner = superdisplacement_sym(space, s * e);
    max_over_dyads(space, STATE_MARGIN, |x| {
        let lhs = expm_apply(&coupled, t, x)?;
        let rhs = outer.apply(&expm_apply(&free, t, &inner.apply(x))?);
        Ok((lhs, rhs))
    })
}

/// Same window written with a single time-dependent superdisplacement.
pub fn commutator_window_one_sided(
    space: FockSpace,
    p: &OscillatorParams,
    sign: Sign,
    t: f64,
) -> Result<f64> {
    let e = epsilon(p);
    let s = sign.signum();
    let coupled = generator_c(space, p, sign);
    let free = liouvillian(space, p);
    let shift = superdisplacement_sym(
        space,
        -s * e * (ONE - (-I * complex_frequency(p) * t).exp()),
    );
    max_over_dyads(space, STATE_MARGIN, |x| {
        let lhs = expm_apply(&coupled, t, x)?;
        let rhs = shift.apply(&expm_apply(&free, t, x)?);
        Ok((lhs, rhs))
    })
}

/// The anticommutator-coupled window factors through skewed
/// superdisplacements with an overall attenuation.
pub fn anticommutator_window_factorization(
    space: FockSpace,
    p: &OscillatorParams,
    sign: Sign,
    t: f64,
) -> Result<f64> {
    let xi = skew_params(p);
    let coupled = generator_a(space, p, sign);
    let free = liouvillian(space, p);
    let outer = superdisplacement_skew(space, &xi, sign.flip());
    let inner = superdisplacement_skew(space, &xi, sign);
    let weight =
        (xi.xi1 * (xi.xi3 - xi.xi2) - C64::new(gamma_interference(p) * t, 0.0)).exp();
    max_over_dyads(space, STATE_MARGIN, |x| {
        let lhs = expm_apply(&coupled, t, x)?;
        let rhs = outer.apply(&expm_apply(&free, t, &inner.apply(x))?).mapv(|v| v * weight);
        Ok((lhs, rhs))
    })
}

/// Product law for skewed superdisplacements.
pub fn skew_product_rule(space: FockSpace, a: &SkewParams, b: &SkewParams) -> Result<f64> {
    let left = superdisplacement_skew(space, a, Sign::Plus);
    let right = superdisplacement_skew(space, b, Sign::Plus);
    let sum = SkewParams { xi1: a.xi1 + b.xi1, xi2: a.xi2 + b.xi2, xi3: a.xi3 + b.xi3 };
    let combined = superdisplacement_skew(space, &sum, Sign::Plus);
    let weight = ((a.xi3 - a.xi2) * b.xi1
        + 0.5 * (a.xi2 * b.xi2.conj() - a.xi2.conj() * b.xi2 - a.xi3 * b.xi3.conj()
            + a.xi3.conj() * b.xi3))
        .exp();
    max_over_dyads(space, STATE_MARGIN, |x| {
        let lhs = left.apply(&right.apply(x));
        let rhs = combined.apply(x).mapv(|v| v * weight);
        Ok((lhs, rhs))
    })
}

/// A skewed superdisplacement against its negation is a scalar.
pub fn skew_inverse_pairing(space: FockSpace, xi: &SkewParams) -> Result<f64> {
    let forward = superdisplacement_skew(space, xi, Sign::Plus);
    let backward = superdisplacement_skew(space, xi, Sign::Minus);
    let weight = (xi.xi1 * (xi.xi2 - xi.xi3)).exp();
    max_over_dyads(space, STATE_MARGIN, |x| {
        let lhs = forward.apply(&backward.apply(x));
        Ok((lhs, x.mapv(|v| v * weight)))
    })
}

/// A skewed superdisplacement maps a displacement to a displacement shifted
/// by the asymmetry of its two-sided parameters.
pub fn skew_on_displacement(space: FockSpace, e: &SkewParams, sigma: C64) -> Result<f64> {
    let op = superdisplacement_skew(space, e, Sign::Plus);
    let lhs = op.apply(&space.displacement(sigma).matrix);
    let weight = (e.xi1 * (e.xi2 - e.xi3)
        + 0.5 * (e.xi2.conj() * e.xi3 - e.xi2 * e.xi3.conj())
        + 0.5 * ((e.xi2 + e.xi3) * sigma.conj() - (e.xi2.conj() + e.xi3.conj()) * sigma)
        + e.xi1 * sigma)
        .exp();
    let rhs = space.displacement(sigma + e.xi2 - e.xi3).matrix.mapv(|v| v * weight);
    Ok(submatrix_rel(keep_levels(space.dim(), DISPLACEMENT_MARGIN), &lhs, &rhs))
}

/// One full segment, both window signs back to back, moves a displacement
/// along the accessible-point recursion.
pub fn segment_on_displacement(
    space: FockSpace,
    p: &OscillatorParams,
    sign: Sign,
    t: f64,
    sigma: C64,
) -> Result<f64> {
    let s = sign.signum();
    let first = generator_a(space, p, sign);
    let second = generator_a(space, p, sign.flip());
    let lhs = expm_apply(&second, t, &expm_apply(&first, t, &space.displacement(sigma).matrix)?)?;
    let w = complex_frequency(p).conj();
    let q = (-I * w * t).exp();
    let moved = sigma * q * q + s * 2.0 * epsilon(p).conj() * (ONE - q) * (ONE - q);
    let gam = gamma_interference(p);
    let exponent = 2.0 * (p.gamma - gam) * t
        + gam * p.gamma / w.norm_sqr()
        + f_exponent(p, t, s * sigma)?;
    let rhs = space.displacement(moved).matrix.mapv(|v| v * exponent.exp());
    Ok(submatrix_rel(keep_levels(space.dim(), DISPLACEMENT_MARGIN), &lhs, &rhs))
}

/// A whole pulse sequence acting on an adjoint displacement reduces to one
/// attenuated adjoint displacement of the recursed argument.
pub fn sequence_on_adjoint_displacement(
    space: FockSpace,
    p: &OscillatorParams,
    seq: &PulseSequence,
    sign: Sign,
    beta: C64,
) -> Result<f64> {
    let s = sign.signum();
    let inner = generator_a(space, p, sign);
    let outer = generator_a(space, p, sign.flip());
    let mut lhs = space.displacement(-beta).matrix;
    for &tau in seq.taus() {
        lhs = expm_apply(&outer, tau, &expm_apply(&inner, tau, &lhs)?)?;
    }
    let gam = gamma_interference(p);
    let w = complex_frequency(p).conj();
    let mut exponent = (p.gamma - gam) * seq.total_time()
        + seq.len() as f64 * gam * p.gamma / w.norm_sqr();
    for (&tau, b) in seq.taus().iter().zip(beta_sequence(p, seq, beta, sign)) {
        exponent += f_exponent(p, tau, b)?;
    }
    let arg = (-I * w * seq.total_time()).exp() * (beta - s * zeta(p, seq));
    let rhs = space.displacement(-arg).matrix.mapv(|v| v * exponent.exp());
    Ok(submatrix_rel(keep_levels(space.dim(), DISPLACEMENT_MARGIN), &lhs, &rhs))
}

/// End to end: simulate the protocol, invert the probe readout, and compare
/// against the reference characteristic function at the accessible points.
pub fn readout_round_trip(
    space: FockSpace,
    p: &OscillatorParams,
    probe: &ProbeAmplitudes,
    seq: &PulseSequence,
    state: &ReferenceState,
) -> Result<f64> {
    let rho0 = reference_density(space, state)?;
    let joint = run_sequence(space, p, probe, seq, &rho0, None)?;
    let pauli = pauli_expectations(&joint);
    let m = invert_measurement(p, probe, seq, pauli.xy)?;
    let z = zeta(p, seq);
    let err_plus = (m.chi_plus - state.chi(z)).norm();
    let err_minus = (m.chi_minus - state.chi(-z)).norm();
    Ok(err_plus.max(err_minus))
}

/// Deterministic identity suite at one basis size.
pub fn identity_suite(space: FockSpace, p: &OscillatorParams) -> Result<Vec<CheckReport>> {
    let t = 1.5;
    let sigma = C64::new(0.35, 0.2);
    let big_sigma = C64::new(0.8, 0.6);
    let generic_a = SkewParams {
        xi1: C64::new(0.04, -0.02),
        xi2: C64::new(0.21, 0.08),
        xi3: C64::new(-0.11, 0.14),
    };
    let generic_b = SkewParams {
        xi1: C64::new(-0.03, 0.05),
        xi2: C64::new(0.09, -0.17),
        xi3: C64::new(0.16, 0.06),
    };
    let seq = PulseSequence::new(vec![0.5, 0.8, 0.65])?;
    Ok(vec![
        CheckReport {
            name: "commutator window factorization",
            residual: commutator_window_factorization(space, p, Sign::Plus, t)?,
            tolerance: 1e-6,
        },
        CheckReport {
            name: "propagator-displacement switch",
            residual: switch_identity_residual(space, p, C64::new(0.3, -0.1), t)?,
            tolerance: 1e-6,
        },
        CheckReport {
            name: "one-sided commutator window",
            residual: commutator_window_one_sided(space, p, Sign::Minus, t)?,
            tolerance: 1e-6,
        },
        CheckReport {
            name: "skewed product rule",
            residual: skew_product_rule(space, &generic_a, &generic_b)?,
            tolerance: 1e-6,
        },
        CheckReport {
            name: "anticommutator window factorization",
            residual: anticommutator_window_factorization(space, p, Sign::Plus, t)?,
            tolerance: 1e-6,
        },
        CheckReport {
            name: "skewed action on displacements",
            residual: skew_on_displacement(space, &generic_a, sigma)?,
            tolerance: 1e-6,
        },
        CheckReport {
            name: "thermalization moves displacements",
            residual: thermal_displacement_motion(space, p, big_sigma, 2.0)?,
            tolerance: 1e-6,
        },
        CheckReport {
            name: "segment action on displacements",
            residual: segment_on_displacement(space, p, Sign::Plus, 0.9, sigma)?,
            tolerance: 1e-6,
        },
        CheckReport {
            name: "sequence action on adjoint displacements",
            residual: sequence_on_adjoint_displacement(
                space,
                p,
                &seq,
                Sign::Plus,
                C64::new(0.4, -0.3),
            )?,
            tolerance: 1e-5,
        },
        CheckReport {
            name: "skewed inverse pairing",
            residual: skew_inverse_pairing(space, &skew_params(p))?,
            tolerance: 1e-6,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SequenceFamily;

    fn standard() -> OscillatorParams {
        OscillatorParams::new(1.0, 0.01, 0.3, 0.075).unwrap()
    }

    #[test]
    fn commutator_window_factorizes_at_full_size() {
        let sp = FockSpace::new(60).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let r = commutator_window_factorization(sp, &standard(), sign, 1.5).unwrap();
            assert!(r < 1e-8, "residual {r} for {sign:?}");
        }
    }

    #[test]
    fn one_sided_commutator_window_matches() {
        let sp = FockSpace::new(60).unwrap();
        let r = commutator_window_one_sided(sp, &standard(), Sign::Plus, 1.5).unwrap();
        assert!(r < 1e-8, "residual {r}");
    }

    #[test]
    fn switch_relation_is_exact_at_zero_time_and_tight_elsewhere() {
        let sp = FockSpace::new(60).unwrap();
        let p = standard();
        assert_eq!(switch_identity_residual(sp, &p, C64::new(0.3, 0.0), 0.0).unwrap(), 0.0);
        let undamped = OscillatorParams::new(1.0, 0.0, 0.3, 0.075).unwrap();
        let r0 = switch_identity_residual(sp, &undamped, C64::new(0.3, 0.0), 1.5).unwrap();
        assert!(r0 < 1e-9, "undamped residual {r0}");
        let damped = OscillatorParams::new(1.0, 0.05, 0.3, 0.075).unwrap();
        let r = switch_identity_residual(sp, &damped, C64::new(0.3, 0.0), 1.5).unwrap();
        assert!(r < 1e-6, "damped residual {r}");
    }

    #[test]
    fn anticommutator_window_factorizes_both_signs() {
        let sp = FockSpace::new(60).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let r = anticommutator_window_factorization(sp, &standard(), sign, 1.5).unwrap();
            assert!(r < 1e-8, "residual {r} for {sign:?}");
        }
    }

    #[test]
    fn skew_product_rule_holds_for_generic_parameters() {
        let sp = FockSpace::new(60).unwrap();
        let a = SkewParams {
            xi1: C64::new(0.07, 0.03),
            xi2: C64::new(-0.18, 0.12),
            xi3: C64::new(0.22, -0.05),
        };
        let b = SkewParams {
            xi1: C64::new(-0.02, -0.06),
            xi2: C64::new(0.14, 0.21),
            xi3: C64::new(-0.09, -0.13),
        };
        let r = skew_product_rule(sp, &a, &b).unwrap();
        assert!(r < 1e-8, "residual {r}");
    }

    #[test]
    fn skew_inverse_pairing_collapses_to_a_scalar() {
        let sp = FockSpace::new(60).unwrap();
        let r = skew_inverse_pairing(sp, &skew_params(&standard())).unwrap();
        assert!(r < 1e-9, "residual {r}");
        let generic = SkewParams {
            xi1: C64::new(0.06, -0.04),
            xi2: C64::new(0.19, 0.11),
            xi3: C64::new(-0.08, 0.15),
        };
        let r = skew_inverse_pairing(sp, &generic).unwrap();
        assert!(r < 1e-8, "generic residual {r}");
    }

    #[test]
    fn skew_action_shifts_displacements() {
        let sp = FockSpace::new(60).unwrap();
        let e = SkewParams {
            xi1: C64::new(0.04, -0.02),
            xi2: C64::new(0.21, 0.08),
            xi3: C64::new(-0.11, 0.14),
        };
        let r = skew_on_displacement(sp, &e, C64::new(0.35, 0.2)).unwrap();
        assert!(r < 1e-8, "residual {r}");
    }

    #[test]
    fn thermal_motion_of_displacements_is_tight_up_to_unit_arguments() {
        let sp = FockSpace::new(60).unwrap();
        let r = thermal_displacement_motion(sp, &standard(), C64::new(0.8, 0.6), 2.0).unwrap();
        assert!(r < 1e-6, "residual {r}");
    }

    #[test]
    fn segment_action_moves_displacements_along_the_recursion() {
        let sp = FockSpace::new(60).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let r =
                segment_on_displacement(sp, &standard(), sign, 0.9, C64::new(0.35, 0.2)).unwrap();
            assert!(r < 1e-6, "residual {r} for {sign:?}");
        }
    }

    #[test]
    fn sequence_action_matches_the_recursed_adjoint_displacement() {
        let sp = FockSpace::new(50).unwrap();
        let seq = PulseSequence::new(vec![0.5, 0.8, 0.65]).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let r = sequence_on_adjoint_displacement(
                sp,
                &standard(),
                &seq,
                sign,
                C64::new(0.4, -0.3),
            )
            .unwrap();
            assert!(r < 1e-5, "residual {r} for {sign:?}");
        }
    }

    #[test]
    fn decoupled_undamped_checks_sit_at_the_rounding_floor() {
        let sp = FockSpace::new(60).unwrap();
        let p = OscillatorParams::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let r = commutator_window_factorization(sp, &p, Sign::Plus, 1.5).unwrap();
        assert!(r < 1e-12, "commutator residual {r}");
        let r = thermal_displacement_motion(sp, &p, C64::new(0.5, -0.2), 2.0).unwrap();
        assert!(r < 1e-12, "rotation residual {r}");
        let r = segment_on_displacement(sp, &p, Sign::Plus, 0.9, C64::new(0.3, 0.1)).unwrap();
        assert!(r < 1e-12, "segment residual {r}");
    }

    #[test]
    fn round_trip_recovers_reference_characteristic_functions() {
        let sp = FockSpace::new(40).unwrap();
        let p = standard();
        let probe = ProbeAmplitudes::balanced();
        let tau0 = 0.8 * std::f64::consts::PI;
        let seq = SequenceFamily::Equidistant { tau0, n: 2 }.expand().unwrap();
        for state in [
            ReferenceState::coherent(C64::new(1.5, 0.0)),
            ReferenceState::standard_fock_pair(),
        ] {
            let r = readout_round_trip(sp, &p, &probe, &seq, &state).unwrap();
            assert!(r < 1e-4, "round trip error {r} for {state:?}");
        }
    }

    #[test]
    fn tiny_bases_fail_the_suite() {
        let sp = FockSpace::new(12).unwrap();
        let reports = identity_suite(sp, &standard()).unwrap();
        assert!(reports.iter().any(|r| !r.passed()));
    }

    #[test]
    fn full_suite_passes_at_the_default_size() {
        let sp = FockSpace::new(60).unwrap();
        let reports = identity_suite(sp, &standard()).unwrap();
        for r in &reports {
            assert!(r.passed(), "{} residual {} over {}", r.name, r.residual, r.tolerance);
        }
    }
}
