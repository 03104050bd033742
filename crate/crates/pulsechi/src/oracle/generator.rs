//! Evolution generators as matrix-free stencils on d x d operators.
//!
//! Each free-evolution window has a constant generator: thermalization alone,
//! or thermalization plus a position coupling that is a commutator on the
//! diagonal probe blocks and an anticommutator on the off-diagonal ones. The
//! stencil form applies one in O(d^2), and the exact supremum row sum feeds
//! the propagator's scaling choice.

use crate::model::{OscillatorParams, Sign};
use crate::oracle::space::FockSpace;
use crate::{C64, Error, Result};
use ndarray::Array2;

/// How the probe enters the window generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coupling {
    /// Thermalization only.
    Free,
    /// `-+ (i g / 2) [a + a^dagger, .]`, the diagonal-block coupling.
    Commutator(Sign),
    /// `-+ (i g / 2) {a + a^dagger, .}`, the off-diagonal-block coupling.
    Anticommutator(Sign),
}

/// Generator of one evolution window.
#[derive(Clone, Debug)]
pub struct Generator {
    space: FockSpace,
    params: OscillatorParams,
    coupling: Coupling,
    shift: f64,
    sqrt: Vec<f64>,
}

/// Thermalizing Liouvillian alone.
pub fn liouvillian(space: FockSpace, params: &OscillatorParams) -> Generator {
    Generator::new(space, params, Coupling::Free)
}

/// Diagonal-block generator: Liouvillian with a commutator coupling.
pub fn generator_c(space: FockSpace, params: &OscillatorParams, sign: Sign) -> Generator {
    Generator::new(space, params, Coupling::Commutator(sign))
}

/// Off-diagonal-block generator: Liouvillian with an anticommutator coupling.
pub fn generator_a(space: FockSpace, params: &OscillatorParams, sign: Sign) -> Generator {
    Generator::new(space, params, Coupling::Anticommutator(sign))
}

impl Generator {
    pub fn new(space: FockSpace, params: &OscillatorParams, coupling: Coupling) -> Self {
        let sqrt = (0..=space.dim()).map(|n| (n as f64).sqrt()).collect();
        Self { space, params: *params, coupling, shift: 0.0, sqrt }
    }

    /// Adds a real scalar to the generator (pure probe dephasing contributes
    /// `-gamma_d` on the off-diagonal blocks).
    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    /// Applies the generator to an operator, `O(d^2)`.
    pub fn apply(&self, x: &Array2<C64>) -> Array2<C64> {
        let d = self.space.dim();
        let p = &self.params;
        let down = (p.nbar + 1.0) * p.gamma;
        let up = p.nbar * p.gamma;
        let mut out = Array2::<C64>::zeros((d, d));
        for n in 0..d {
            for m in 0..d {
                let mut acc = x[[n, m]]
                    * C64::new(
                        -0.5 * down * (n + m) as f64 - 0.5 * up * (n + m + 2) as f64 + self.shift,
                        -p.nu * (n as f64 - m as f64),
                    );
                if n + 1 < d && m + 1 < d {
                    acc += down * self.sqrt[n + 1] * self.sqrt[m + 1] * x[[n + 1, m + 1]];
                }
                if n > 0 && m > 0 {
                    acc += up * self.sqrt[n] * self.sqrt[m] * x[[n - 1, m - 1]];
                }
                out[[n, m]] = acc;
            }
        }
        match self.coupling {
            Coupling::Free => {}
            Coupling::Commutator(sign) | Coupling::Anticommutator(sign) => {
                // position action: (X x)[n][m] = sqrt(n) x[n-1][m] + sqrt(n+1) x[n+1][m]
                //                  (x X)[n][m] = sqrt(m) x[n][m-1] + sqrt(m+1) x[n][m+1]
                let anti = matches!(self.coupling, Coupling::Anticommutator(_));
                let right_sense = if anti { 1.0 } else { -1.0 };
                let c = C64::new(0.0, -sign.signum() * 0.5 * p.g);
                for n in 0..d {
                    for m in 0..d {
                        let mut lhs = C64::new(0.0, 0.0);
                        if n > 0 {
                            lhs += self.sqrt[n] * x[[n - 1, m]];
                        }
                        if n + 1 < d {
                            lhs += self.sqrt[n + 1] * x[[n + 1, m]];
                        }
                        let mut rhs = C64::new(0.0, 0.0);
                        if m > 0 {
                            rhs += self.sqrt[m] * x[[n, m - 1]];
                        }
                        if m + 1 < d {
                            rhs += self.sqrt[m + 1] * x[[n, m + 1]];
                        }
                        out[[n, m]] += c * (lhs + right_sense * rhs);
                    }
                }
            }
        }
        out
    }

    /// Exact supremum absolute row sum of the vectorized generator, the
    /// infinity norm used for propagator scaling. Every stencil source is
    /// distinct, so the sum of coefficient magnitudes per target is exact.
    pub fn norm_bound(&self) -> f64 {
        let d = self.space.dim();
        let p = &self.params;
        let down = (p.nbar + 1.0) * p.gamma;
        let up = p.nbar * p.gamma;
        let coupled = !matches!(self.coupling, Coupling::Free);
        let mut worst = 0.0f64;
        for n in 0..d {
            for m in 0..d {
                let diag = C64::new(
                    -0.5 * down * (n + m) as f64 - 0.5 * up * (n + m + 2) as f64 + self.shift,
                    -p.nu * (n as f64 - m as f64),
                );
                let mut row = diag.norm();
                if n + 1 < d && m + 1 < d {
                    row += down * self.sqrt[n + 1] * self.sqrt[m + 1];
                }
                if n > 0 && m > 0 {
                    row += up * self.sqrt[n] * self.sqrt[m];
                }
                if coupled {
                    let mut reach = 0.0;
                    if n > 0 {
                        reach += self.sqrt[n];
                    }
                    if n + 1 < d {
                        reach += self.sqrt[n + 1];
                    }
                    if m > 0 {
                        reach += self.sqrt[m];
                    }
                    if m + 1 < d {
                        reach += self.sqrt[m + 1];
                    }
                    row += 0.5 * p.g * reach;
                }
                worst = worst.max(row);
            }
        }
        worst
    }

    /// Dense (d^2 x d^2) matrix of the generator in row-major vectorization,
    /// for offline dumps and small-basis inspection only.
    pub fn dense(&self) -> Result<Array2<C64>> {
        let d = self.space.dim();
        if d > 24 {
            return Err(Error::Domain {
                name: "dim",
                value: d as f64,
                reason: "dense superoperator assembly is limited to small bases",
            });
        }
        let n2 = d * d;
        let mut out = Array2::<C64>::zeros((n2, n2));
        let mut basis = Array2::<C64>::zeros((d, d));
        for col in 0..n2 {
            basis[[col / d, col % d]] = C64::new(1.0, 0.0);
            let image = self.apply(&basis);
            basis[[col / d, col % d]] = C64::new(0.0, 0.0);
            for row in 0..n2 {
                out[[row, col]] = image[[row / d, row % d]];
            }
        }
        Ok(out)
    }
}
