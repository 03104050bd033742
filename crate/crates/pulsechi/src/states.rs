//! Reference oscillator states and their characteristic functions.
//!
//! Three families cover the test surface: a two-level Fock superposition, a
//! coherent state, and an even cat state. Each provides `chi` in closed form
//! and a Fock-basis amplitude vector for brute-force cross-checks.

use crate::special::displacement_element;
use crate::{C64, Error, Result};
use serde::{Deserialize, Serialize};

pub use crate::special::laguerre;

/// A reference state the protocol is exercised against.
///
/// `FockPair` amplitudes may be stored unnormalized; every consumer
/// normalizes on use and `validate` rejects degenerate configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceState {
    FockPair { n1: usize, n2: usize, amplitudes: (C64, C64) },
    Coherent { alpha: C64 },
    Cat { alpha: C64 },
}

impl ReferenceState {
    /// Normalized superposition `c1 |n1> + c2 |n2>`, `n1 != n2`.
    pub fn fock_pair(n1: usize, n2: usize, c1: C64, c2: C64) -> Result<Self> {
        let s = Self::FockPair { n1, n2, amplitudes: (c1, c2) };
        s.validate()?;
        Ok(s)
    }

    /// The equal-weight pair `(|1> + |3>)/sqrt(2)` whose closed form is
    /// `chi_fock_pair`.
    pub fn standard_fock_pair() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::FockPair { n1: 1, n2: 3, amplitudes: (h, h) }
    }

    pub fn coherent(alpha: C64) -> Self {
        Self::Coherent { alpha }
    }

    pub fn cat(alpha: C64) -> Self {
        Self::Cat { alpha }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::FockPair { n1, n2, amplitudes: (c1, c2) } => {
                if n1 == n2 {
                    return Err(Error::Domain {
                        name: "fock_pair",
                        value: n1 as f64,
                        reason: "the two Fock labels must differ",
                    });
                }
                let norm2 = c1.norm_sqr() + c2.norm_sqr();
                if !(norm2.is_finite() && norm2 > 1e-24) {
                    return Err(Error::Domain {
                        name: "fock_pair amplitudes",
                        value: norm2,
                        reason: "must have nonzero finite norm",
                    });
                }
                Ok(())
            }
            Self::Coherent { alpha } | Self::Cat { alpha } => {
                if alpha.re.is_finite() && alpha.im.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain {
                        name: "alpha",
                        value: alpha.norm(),
                        reason: "must be finite",
                    })
                }
            }
        }
    }

    /// Characteristic function `chi(beta) = Tr{D(beta) rho}`.
    pub fn chi(&self, beta: C64) -> C64 {
        match *self {
            Self::FockPair { n1, n2, amplitudes } => {
                let (c1, c2) = normalized_pair(amplitudes);
                c1.conj() * c1 * displacement_element(n1, n1, beta)
                    + c1.conj() * c2 * displacement_element(n1, n2, beta)
                    + c2.conj() * c1 * displacement_element(n2, n1, beta)
                    + c2.conj() * c2 * displacement_element(n2, n2, beta)
            }
            Self::Coherent { alpha } => chi_coherent(alpha, beta),
            Self::Cat { alpha } => chi_cat(alpha, beta),
        }
    }

    /// Fock-basis amplitudes on the first `dim` levels.
    ///
    /// Coherent and cat vectors are truncated, not renormalized; the dropped
    /// tail is exponentially small once `dim` exceeds a few `|alpha|^2`.
    pub fn state_vector(&self, dim: usize) -> Result<Vec<C64>> {
        self.validate()?;
        let zero = C64::new(0.0, 0.0);
        match *self {
            Self::FockPair { n1, n2, amplitudes } => {
                let top = n1.max(n2);
                if top >= dim {
                    return Err(Error::IndexRange { index: top, len: dim });
                }
                let (c1, c2) = normalized_pair(amplitudes);
                let mut v = vec![zero; dim];
                v[n1] = c1;
                v[n2] = c2;
                Ok(v)
            }
            Self::Coherent { alpha } => Ok(coherent_vector(alpha, dim)),
            Self::Cat { alpha } => {
                let c = (2.0 * (1.0 + (-2.0 * alpha.norm_sqr()).exp())).sqrt();
                let mut v = coherent_vector(alpha, dim);
                for (n, a) in v.iter_mut().enumerate() {
                    *a = if n % 2 == 0 { *a * 2.0 / c } else { zero };
                }
                Ok(v)
            }
        }
    }
}

fn normalized_pair((c1, c2): (C64, C64)) -> (C64, C64) {
    let scale = (c1.norm_sqr() + c2.norm_sqr()).sqrt().recip();
    (c1 * scale, c2 * scale)
}

// c_n = e^{-|a|^2/2} a^n / sqrt(n!) by the stable forward recurrence
fn coherent_vector(alpha: C64, dim: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(dim);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        v.push(c);
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    v
}

/// Closed-form `chi` of `(|1> + |3>)/sqrt(2)`; real for every `beta`.
pub fn chi_fock_pair(beta: C64) -> C64 {
    let x = beta.norm_sqr();
    let cross = beta * beta + beta.conj() * beta.conj();
    let val = 0.5
        * (-0.5 * x).exp()
        * (laguerre(1, 0, x) + laguerre(3, 0, x) + cross.re * laguerre(1, 2, x) / 6.0f64.sqrt());
    C64::new(val, 0.0)
}

/// `chi` of the coherent state `|alpha>`:
/// `e^{-|beta|^2/2} e^{conj(alpha) beta - alpha conj(beta)}`.
pub fn chi_coherent(alpha: C64, beta: C64) -> C64 {
    (-0.5 * beta.norm_sqr() + alpha.conj() * beta - alpha * beta.conj()).exp()
}

/// `chi` of the even cat state `(|alpha> + |-alpha>)/c`,
/// `c^2 = 2 (1 + e^{-2|alpha|^2})`.
pub fn chi_cat(alpha: C64, beta: C64) -> C64 {
    let c2 = 2.0 * (1.0 + (-2.0 * alpha.norm_sqr()).exp());
    let odd = alpha * beta.conj() - alpha.conj() * beta;
    let even = alpha * beta.conj() + alpha.conj() * beta;
    2.0 * (-0.5 * beta.norm_sqr()).exp() / c2
        * (odd.cosh() + (-2.0 * alpha.norm_sqr()).exp() * even.cosh())
}
