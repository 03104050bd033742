//! Superdisplacements in factored sandwich form.
//!
//! Both the symmetric superdisplacement and its skewed generalization act as
//! `rho -> L rho R` for fixed d x d factors, so they compose and apply by
//! plain matrix products and never need a d^2 x d^2 representation.

use crate::analytic::SkewParams;
use crate::model::Sign;
use crate::oracle::space::FockSpace;
use crate::{C64, Error, Result};
use ndarray::Array2;

/// A superoperator of the form `rho -> left rho right`.
#[derive(Clone, Debug)]
pub struct SandwichOperator {
    pub left: Array2<C64>,
    pub right: Array2<C64>,
    /// Set when a displacement factor strains the truncation.
    pub truncation_warning: bool,
}

/// Symmetric superdisplacement: `rho -> D(eps) rho D(eps)^dagger`.
pub fn superdisplacement_sym(space: FockSpace, eps: C64) -> SandwichOperator {
    let left = space.displacement(eps);
    let right = space.displacement(-eps);
    SandwichOperator {
        truncation_warning: left.truncation_warning || right.truncation_warning,
        left: left.matrix,
        right: right.matrix,
    }
}

/// Skewed superdisplacement with all three parameters taken at `sign`:
/// `rho -> e^{s xi1 a} D(s xi2) rho D(s xi3)^dagger e^{-s xi1 a}`.
pub fn superdisplacement_skew(space: FockSpace, xi: &SkewParams, sign: Sign) -> SandwichOperator {
    let s = C64::new(sign.signum(), 0.0);
    let d2 = space.displacement(s * xi.xi2);
    let d3 = space.displacement(-s * xi.xi3);
    let left = space.exp_annihilation(s * xi.xi1).dot(&d2.matrix);
    let right = d3.matrix.dot(&space.exp_annihilation(-s * xi.xi1));
    SandwichOperator {
        left,
        right,
        truncation_warning: d2.truncation_warning || d3.truncation_warning,
    }
}

impl SandwichOperator {
    pub fn apply(&self, x: &Array2<C64>) -> Array2<C64> {
        self.left.dot(x).dot(&self.right)
    }

    /// Composition `self . inner`, acting with `inner` first.
    pub fn compose(&self, inner: &Self) -> Self {
        SandwichOperator {
            left: self.left.dot(&inner.left),
            right: inner.right.dot(&self.right),
            truncation_warning: self.truncation_warning || inner.truncation_warning,
        }
    }

    /// Dense (d^2 x d^2) matrix in row-major vectorization, for offline
    /// dumps and small-basis inspection only.
    pub fn dense(&self) -> Result<Array2<C64>> {
        let d = self.left.nrows();
        if d > 24 {
            return Err(Error::Domain {
                name: "dim",
                value: d as f64,
                reason: "dense superoperator assembly is limited to small bases",
            });
        }
        let n2 = d * d;
        let mut out = Array2::<C64>::zeros((n2, n2));
        for i in 0..d {
            for j in 0..d {
                for n in 0..d {
                    for m in 0..d {
                        out[[i * d + j, n * d + m]] = self.left[[i, n]] * self.right[[m, j]];
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;
    use crate::states::ReferenceState;

    fn dyad(space: FockSpace, a1: C64, a2: C64) -> Array2<C64> {
        let d = space.dim();
        let u = ReferenceState::coherent(a1).state_vector(d).unwrap();
        let v = ReferenceState::coherent(a2).state_vector(d).unwrap();
        let mut out = Array2::<C64>::zeros((d, d));
        for n in 0..d {
            for m in 0..d {
                out[[n, m]] = u[n] * v[m].conj();
            }
        }
        out
    }

    fn bulk_rel_margin(
        space: FockSpace,
        lhs: &Array2<C64>,
        rhs: &Array2<C64>,
        margin: usize,
    ) -> f64 {
        let keep = space.dim().saturating_sub(margin);
        let mut num = 0.0;
        let mut den = 0.0;
        for n in 0..keep {
            for m in 0..keep {
                num += (lhs[[n, m]] - rhs[[n, m]]).norm_sqr();
                den += lhs[[n, m]].norm_sqr();
            }
        }
        (num / den.max(1e-300)).sqrt()
    }

    fn bulk_rel(space: FockSpace, lhs: &Array2<C64>, rhs: &Array2<C64>) -> f64 {
        bulk_rel_margin(space, lhs, rhs, 10)
    }

    #[test]
    fn zero_skew_component_reduces_to_the_symmetric_form() {
        let sp = FockSpace::new(24).unwrap();
        let eps = C64::new(0.21, -0.13);
        let xi = SkewParams { xi1: C64::new(0.0, 0.0), xi2: eps, xi3: eps };
        let skew = superdisplacement_skew(sp, &xi, Sign::Plus);
        let sym = superdisplacement_sym(sp, eps);
        assert!(frobenius(&(&skew.left - &sym.left)) < 1e-14);
        assert!(frobenius(&(&skew.right - &sym.right)) < 1e-14);
    }

    #[test]
    fn sign_flips_all_three_parameters() {
        let sp = FockSpace::new(16).unwrap();
        let xi = SkewParams {
            xi1: C64::new(0.02, -0.05),
            xi2: C64::new(0.11, 0.04),
            xi3: C64::new(-0.07, 0.09),
        };
        let minus = superdisplacement_skew(sp, &xi, Sign::Minus);
        let negated = SkewParams { xi1: -xi.xi1, xi2: -xi.xi2, xi3: -xi.xi3 };
        let explicit = superdisplacement_skew(sp, &negated, Sign::Plus);
        assert!(frobenius(&(&minus.left - &explicit.left)) < 1e-14);
        assert!(frobenius(&(&minus.right - &explicit.right)) < 1e-14);
    }

    #[test]
    fn symmetric_superdisplacements_form_a_group() {
        // the sandwich factors pick up opposite Weyl phases, so the group law
        // holds for the superoperator action though not factor by factor
        let sp = FockSpace::new(40).unwrap();
        let e1 = C64::new(0.3, -0.1);
        let e2 = C64::new(-0.15, 0.22);
        let composed = superdisplacement_sym(sp, e1).compose(&superdisplacement_sym(sp, e2));
        let direct = superdisplacement_sym(sp, e1 + e2);
        let x = dyad(sp, C64::new(1.1, 0.4), C64::new(0.8, -0.7));
        let r = bulk_rel(sp, &composed.apply(&x), &direct.apply(&x));
        assert!(r < 1e-10, "group law residual {r}");
    }

    #[test]
    fn symmetric_action_on_adjoint_displacements_is_a_phase() {
        // D(eps) D(s)^dagger D(eps)^dagger = exp(conj(eps) s - eps conj(s)) D(s)^dagger
        let sp = FockSpace::new(40).unwrap();
        let eps = C64::new(0.4, 0.15);
        let s = C64::new(-0.3, 0.5);
        let target = sp.displacement(-s).matrix;
        let lhs = superdisplacement_sym(sp, eps).apply(&target);
        let phase = (eps.conj() * s - eps * s.conj()).exp();
        let rhs = target.mapv(|v| v * phase);
        // the operand is a raw displacement, so its edge band feeds defects
        // deeper into the bulk than a localized dyad would
        let r = bulk_rel_margin(sp, &lhs, &rhs, 20);
        assert!(r < 1e-10, "phase action residual {r}");
    }

    #[test]
    fn dense_form_matches_the_sandwich_action() {
        let sp = FockSpace::new(6).unwrap();
        let xi = SkewParams {
            xi1: C64::new(0.03, 0.01),
            xi2: C64::new(0.2, -0.1),
            xi3: C64::new(-0.05, 0.12),
        };
        let op = superdisplacement_skew(sp, &xi, Sign::Minus);
        let dense = op.dense().unwrap();
        let x = dyad(sp, C64::new(0.5, 0.2), C64::new(-0.3, 0.1));
        let image = op.apply(&x);
        let d = sp.dim();
        for i in 0..d {
            for j in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for n in 0..d {
                    for m in 0..d {
                        acc += dense[[i * d + j, n * d + m]] * x[[n, m]];
                    }
                }
                assert!((acc - image[[i, j]]).norm() < 1e-13);
            }
        }
        let big = superdisplacement_sym(FockSpace::new(30).unwrap(), C64::new(0.1, 0.0));
        assert!(big.dense().is_err());
    }

    #[test]
    fn truncation_warning_propagates_from_the_displacement_factors() {
        let sp = FockSpace::new(16).unwrap();
        assert!(!superdisplacement_sym(sp, C64::new(0.5, 0.0)).truncation_warning);
        assert!(superdisplacement_sym(sp, C64::new(2.5, 0.0)).truncation_warning);
    }
}
