//! Truncated Fock space and the oscillator operators built on it.

use crate::special::ln_factorial;
use crate::{C64, Error, Result};
use ndarray::Array2;

/// Truncated oscillator Hilbert space with `dim` Fock levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpace {
    dim: usize,
}

/// A dense operator on the truncated space, with a flag set when the
/// requested construction strains the truncation.
#[derive(Clone, Debug)]
pub struct OscillatorOperator {
    pub matrix: Array2<C64>,
    pub truncation_warning: bool,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain {
                name: "dim",
                value: dim as f64,
                reason: "needs at least two Fock levels",
            });
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> Array2<C64> {
        Array2::eye(self.dim)
    }

    /// Lowering operator `a`.
    pub fn annihilation(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.dim, self.dim));
        for n in 0..self.dim - 1 {
            m[[n, n + 1]] = C64::new(((n + 1) as f64).sqrt(), 0.0);
        }
        m
    }

    /// Raising operator `a^dagger`.
    pub fn creation(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.dim, self.dim));
        for n in 0..self.dim - 1 {
            m[[n + 1, n]] = C64::new(((n + 1) as f64).sqrt(), 0.0);
        }
        m
    }

    /// `e^{c a}`, upper triangular with `<n|e^{ca}|m> = c^{m-n} sqrt(m!/n!) / (m-n)!`.
    pub fn exp_annihilation(&self, c: C64) -> Array2<C64> {
        let d = self.dim;
        let mut m = Array2::zeros((d, d));
        for n in 0..d {
            let mut val = C64::new(1.0, 0.0);
            for k in 0..d - n {
                m[[n, n + k]] = val;
                // next offset: multiply by c sqrt(m+1) / (k+1) with m = n + k
                val *= c * ((n + k + 1) as f64).sqrt() / (k + 1) as f64;
            }
        }
        m
    }

    /// Displacement operator `D(beta)` assembled diagonal by diagonal with a
    /// running Laguerre recurrence, `O(dim^2)` total.
    ///
    /// The warning flag trips when `|beta|^2` exceeds a quarter of the basis,
    /// past which the outer matrix corner no longer represents the infinite
    /// operator faithfully.
    pub fn displacement(&self, beta: C64) -> OscillatorOperator {
        let d = self.dim;
        let r = beta.norm();
        if r == 0.0 {
            return OscillatorOperator { matrix: self.identity(), truncation_warning: false };
        }
        let x = r * r;
        let truncation_warning = x > d as f64 / 4.0;
        let mut m = Array2::zeros((d, d));
        let up_arg = (-beta.conj()).arg();
        let dn_arg = beta.arg();
        for k in 0..d {
            let up = C64::from_polar(1.0, k as f64 * up_arg);
            let dn = C64::from_polar(1.0, k as f64 * dn_arg);
            let mut mag = (-0.5 * x + k as f64 * r.ln() - 0.5 * ln_factorial(k)).exp();
            let mut l_prev = 0.0f64;
            let mut l = 1.0f64;
            for lo in 0..d - k {
                m[[lo, lo + k]] = l * mag * up;
                m[[lo + k, lo]] = l * mag * dn;
                let j = lo as f64;
                let kf = k as f64;
                let l_next = ((2.0 * j + kf + 1.0 - x) * l - (j + kf) * l_prev) / (j + 1.0);
                l_prev = l;
                l = l_next;
                mag *= ((lo + 1) as f64 / (lo + 1 + k) as f64).sqrt();
            }
        }
        OscillatorOperator { matrix: m, truncation_warning }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::displacement_element;

    #[test]
    fn space_requires_two_levels() {
        assert!(FockSpace::new(1).is_err());
        assert!(FockSpace::new(2).is_ok());
    }

    #[test]
    fn ladder_commutator_is_identity_below_the_edge() {
        let sp = FockSpace::new(24).unwrap();
        let a = sp.annihilation();
        let adag = sp.creation();
        let comm = a.dot(&adag) - adag.dot(&a);
        for n in 0..sp.dim() - 1 {
            for m in 0..sp.dim() - 1 {
                let want = if n == m { 1.0 } else { 0.0 };
                let diff = (comm[[n, m]] - C64::new(want, 0.0)).norm();
                assert!(diff < 1e-12, "at ({n},{m}): {}", comm[[n, m]]);
            }
        }
        // the truncation dumps the commutator defect into the corner
        assert!((comm[[23, 23]] - C64::new(-23.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn displacement_at_zero_is_identity() {
        let sp = FockSpace::new(12).unwrap();
        let op = sp.displacement(C64::new(0.0, 0.0));
        assert!(!op.truncation_warning);
        assert_eq!(op.matrix, sp.identity());
    }

    #[test]
    fn displacement_matches_elementwise_construction() {
        let sp = FockSpace::new(25).unwrap();
        for beta in [C64::new(0.6, -0.2), C64::new(-1.3, 0.4), C64::new(0.0, 2.2)] {
            let m = sp.displacement(beta).matrix;
            for n in 0..25 {
                for mm in 0..25 {
                    let want = displacement_element(n, mm, beta);
                    assert!(
                        (m[[n, mm]] - want).norm() < 1e-13,
                        "({n},{mm}) at beta {beta}: {} vs {want}",
                        m[[n, mm]]
                    );
                }
            }
        }
    }

    #[test]
    fn displacement_inverse_property_in_the_bulk() {
        let sp = FockSpace::new(40).unwrap();
        let beta = C64::new(1.0, 0.0);
        let fwd = sp.displacement(beta).matrix;
        let bwd = sp.displacement(-beta).matrix;
        let prod = fwd.dot(&bwd);
        // truncated unitaries compose faithfully only well inside the basis
        for n in 0..16 {
            for m in 0..16 {
                let want = if n == m { 1.0 } else { 0.0 };
                assert!(
                    (prod[[n, m]] - C64::new(want, 0.0)).norm() < 1e-10,
                    "({n},{m}): {}",
                    prod[[n, m]]
                );
            }
        }
    }

    #[test]
    fn displacement_trace_concentrates_at_the_origin() {
        // the infinite-dimensional trace of D(beta) is a delta spike at
        // beta = 0; truncated, the off-origin trace is a bounded oscillation
        // (a divergent-series partial sum, it never decays to zero) while the
        // origin trace grows linearly with the basis
        let beta = C64::new(0.9, 0.3);
        for d in [10usize, 20, 40, 60] {
            let sp = FockSpace::new(d).unwrap();
            let m = sp.displacement(beta).matrix;
            let off: f64 = (0..d).map(|i| m[[i, i]]).sum::<C64>().norm();
            assert!(off < 3.0, "off-origin trace {off} at dim {d}");
            let at0 = sp.displacement(C64::new(0.0, 0.0)).matrix;
            let peak: C64 = (0..d).map(|i| at0[[i, i]]).sum();
            assert_eq!(peak, C64::new(d as f64, 0.0));
        }
    }

    #[test]
    fn truncation_warning_trips_on_large_displacement() {
        let sp = FockSpace::new(30).unwrap();
        assert!(!sp.displacement(C64::new(2.0, 0.0)).truncation_warning);
        assert!(sp.displacement(C64::new(3.0, 0.0)).truncation_warning);
    }

    #[test]
    fn exp_annihilation_acts_on_coherent_tails() {
        let sp = FockSpace::new(30).unwrap();
        let c = C64::new(0.2, -0.1);
        let m = sp.exp_annihilation(c);
        // lower triangle empty, unit diagonal
        for n in 0..30 {
            assert_eq!(m[[n, n]], C64::new(1.0, 0.0));
            for k in 0..n {
                assert_eq!(m[[n, k]], C64::new(0.0, 0.0));
            }
        }
        // <0|e^{ca}|3> = c^3 sqrt(3!)/3!
        let want = c * c * c * 6.0f64.sqrt() / 6.0;
        assert!((m[[0, 3]] - want).norm() < 1e-15);
    }
}
