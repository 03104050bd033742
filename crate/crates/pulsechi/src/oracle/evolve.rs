//! Propagator action `exp(G t) x` by scaled Taylor summation.
//!
//! The window generators are applied as stencils, so the propagator never
//! materializes a d^2 x d^2 matrix. The step is scaled so each substep has
//! `|G| t / s <= theta`; a small theta keeps the partial sums free of the
//! cancellation that a large single step would accumulate.

use crate::oracle::generator::Generator;
use crate::{C64, Error, Result};
use ndarray::Array2;

/// Largest substep in units of the generator norm.
const THETA: f64 = 4.0;
/// Taylor order cap per substep; far above the ~20 terms theta = 4 needs.
const KMAX: usize = 60;
/// Two consecutive terms below this relative size end the sum.
const TERM_FLOOR: f64 = 1e-17;

/// Applies `exp(G t)` to an operator.
pub fn expm_apply(gen: &Generator, t: f64, x: &Array2<C64>) -> Result<Array2<C64>> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain {
            name: "t",
            value: t,
            reason: "evolution time must be finite and nonnegative",
        });
    }
    if t == 0.0 {
        return Ok(x.clone());
    }
    let steps = ((gen.norm_bound() * t / THETA).ceil() as usize).max(1);
    let h = t / steps as f64;
    let mut y = x.clone();
    for _ in 0..steps {
        y = substep(gen, h, &y)?;
    }
    Ok(y)
}

fn substep(gen: &Generator, h: f64, x: &Array2<C64>) -> Result<Array2<C64>> {
    let mut y = x.clone();
    let mut term = x.clone();
    let mut small_streak = 0;
    for k in 1..=KMAX {
        term = gen.apply(&term);
        term.mapv_inplace(|v| v * (h / k as f64));
        y += &term;
        let tn = norm(&term);
        if tn <= TERM_FLOOR * norm(&y) {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(y);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::Convergence { what: "propagator Taylor sum" })
}

fn norm(x: &Array2<C64>) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{complex_frequency, nbar_t};
    use crate::model::OscillatorParams;
    use crate::oracle::generator::liouvillian;
    use crate::oracle::space::FockSpace;

    #[test]
    fn zero_time_is_the_identity() {
        let sp = FockSpace::new(12).unwrap();
        let p = OscillatorParams::new(1.0, 0.05, 0.3, 0.0).unwrap();
        let x = sp.displacement(C64::new(0.4, 0.1)).matrix;
        let y = expm_apply(&liouvillian(sp, &p), 0.0, &x).unwrap();
        assert_eq!(norm(&(&y - &x)), 0.0);
    }

    #[test]
    fn negative_time_is_rejected() {
        let sp = FockSpace::new(8).unwrap();
        let p = OscillatorParams::new(1.0, 0.05, 0.3, 0.0).unwrap();
        let x = sp.identity();
        assert!(matches!(
            expm_apply(&liouvillian(sp, &p), -0.1, &x),
            Err(Error::Domain { name: "t", .. })
        ));
    }

    #[test]
    fn thermalization_moves_displacements_as_the_closed_form_says() {
        // exp(L t) D(s) = exp(gamma t) exp(-nbar(t) |s(t)|^2) D(s(t)) with the
        // rotated, damping-amplified argument s(t) = s exp(-i conj(nutilde) t);
        // checked on the bulk block far from the truncation edge.
        let sp = FockSpace::new(50).unwrap();
        let p = OscillatorParams::new(1.0, 0.01, 0.3, 0.0).unwrap();
        let t = 1.3;
        let s = C64::new(0.5, -0.2);
        let lhs = expm_apply(&liouvillian(sp, &p), t, &sp.displacement(s).matrix).unwrap();
        let nt = complex_frequency(&p);
        let moved = s * (C64::new(0.0, -1.0) * nt.conj() * t).exp();
        let weight = (p.gamma * t).exp() * (-nbar_t(&p, t).unwrap() * moved.norm_sqr()).exp();
        let rhs_matrix = sp.displacement(moved).matrix;
        let keep = sp.dim() - 20;
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for n in 0..keep {
            for m in 0..keep {
                num += (lhs[[n, m]] - weight * rhs_matrix[[n, m]]).norm_sqr();
                den += lhs[[n, m]].norm_sqr();
            }
        }
        let residual = (num / den).sqrt();
        assert!(residual < 1e-10, "residual {residual}");
    }

    #[test]
    fn propagation_is_multiplicative_in_time() {
        let sp = FockSpace::new(30).unwrap();
        let p = OscillatorParams::new(1.0, 0.06, 0.5, 0.0).unwrap();
        let gen = liouvillian(sp, &p);
        let x = sp.displacement(C64::new(0.3, 0.4)).matrix;
        let whole = expm_apply(&gen, 1.4, &x).unwrap();
        let split = expm_apply(&gen, 0.9, &expm_apply(&gen, 0.5, &x).unwrap()).unwrap();
        let rel = norm(&(&whole - &split)) / norm(&whole);
        assert!(rel < 1e-12, "split mismatch {rel}");
    }
}
