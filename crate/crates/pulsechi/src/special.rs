//! Scalar special functions shared by the closed forms and the oracle.

use crate::C64;
use std::sync::OnceLock;

/// Largest factorial argument the cached table covers; Fock dimensions are
/// validated well below this.
pub const MAX_FACTORIAL: usize = 1024;

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_FACTORIAL + 1);
        t.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..=MAX_FACTORIAL {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)` from a lazily built table.
///
/// Panics if `n` exceeds [`MAX_FACTORIAL`]; all Fock-space entry points validate
/// their dimensions far below that bound.
pub fn ln_factorial(n: usize) -> f64 {
    ln_factorial_table()[n]
}

/// Associated Laguerre polynomial `L_n^(k)(x)` by the three-term recurrence
///
/// `(m+1) L_{m+1}^(k) = (2m+k+1-x) L_m^(k) - (m+k) L_{m-1}^(k)`,
///
/// which stays stable for the degrees used here, unlike the alternating
/// closed-form expansion.
pub fn laguerre(n: usize, k: usize, x: f64) -> f64 {
    let kf = k as f64;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + kf - x;
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + kf + 1.0 - x) * cur - (mf + kf) * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Matrix element `<n|D(beta)|m>` of the displacement operator.
///
/// For `n >= m` this is `sqrt(m!/n!) beta^(n-m) e^{-|beta|^2/2} L_m^(n-m)(|beta|^2)`;
/// the opposite triangle follows from the adjoint relation and carries
/// `(-conj(beta))^(m-n)`. The magnitude is assembled in log space so large
/// index offsets neither overflow nor lose the sign carried by the Laguerre
/// factor.
pub fn displacement_element(n: usize, m: usize, beta: C64) -> C64 {
    let r = beta.norm();
    if r == 0.0 {
        return if n == m { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    }
    let x = r * r;
    let (lo, hi, phase_base) = if n >= m { (m, n, beta) } else { (n, m, -beta.conj()) };
    let k = hi - lo;
    let lag = laguerre(lo, k, x);
    let ln_mag = 0.5 * (ln_factorial(lo) - ln_factorial(hi)) + k as f64 * r.ln() - 0.5 * x;
    let phase = C64::from_polar(1.0, k as f64 * phase_base.arg());
    lag * ln_mag.exp() * phase
}

/// Compensated (Kahan) accumulator for complex sums with mild cancellation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanC64 {
    sum: C64,
    carry: C64,
}

impl KahanC64 {
    pub fn add(&mut self, value: C64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> C64 {
        self.sum
    }
}

/// Real-valued Kahan accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanF64 {
    sum: f64,
    carry: f64,
}

impl KahanF64 {
    pub fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laguerre_low_orders() {
        // L_1^(0)(x) = 1 - x
        assert_relative_eq!(laguerre(1, 0, 1.0), 0.0);
        // L_3^(0)(1) = 1 - 3 + 3/2 - 1/6 = -2/3
        assert_relative_eq!(laguerre(3, 0, 1.0), -2.0 / 3.0, max_relative = 1e-14);
        // L_1^(2)(x) = 3 - x
        for x in [0.0, 0.7, 2.5, 9.0] {
            assert_relative_eq!(laguerre(1, 2, x), 3.0 - x, max_relative = 1e-14);
        }
        assert_relative_eq!(laguerre(3, 1, 0.5), 1.4791666666666667, max_relative = 1e-14);
    }

    #[test]
    fn laguerre_matches_series_expansion() {
        // sum_i (-1)^i C(n+k, n-i) x^i / i!
        fn explicit(n: usize, k: usize, x: f64) -> f64 {
            let mut acc = 0.0;
            for i in 0..=n {
                let ln_binom = ln_factorial(n + k) - ln_factorial(n - i) - ln_factorial(k + i);
                let term = (ln_binom - ln_factorial(i)).exp() * x.powi(i as i32);
                acc += if i % 2 == 0 { term } else { -term };
            }
            acc
        }
        for (n, k, x) in [(5, 3, 2.3), (4, 0, 0.9), (6, 2, 4.1), (2, 5, 1.3)] {
            assert_relative_eq!(laguerre(n, k, x), explicit(n, k, x), max_relative = 1e-10);
        }
    }

    #[test]
    fn displacement_element_basics() {
        let b = C64::new(0.6, -0.2);
        // frozen against an independent matrix-exponential evaluation
        let e35 = displacement_element(3, 5, b);
        assert_relative_eq!(e35.re, 0.37431017262831784, max_relative = 1e-12);
        assert_relative_eq!(e35.im, 0.2807326294712384, max_relative = 1e-12);
        let e53 = displacement_element(5, 3, b);
        assert_relative_eq!(e53.re, 0.37431017262831784, max_relative = 1e-12);
        assert_relative_eq!(e53.im, -0.2807326294712384, max_relative = 1e-12);
    }

    #[test]
    fn displacement_element_zero_argument_is_identity() {
        for n in 0..6 {
            for m in 0..6 {
                let e = displacement_element(n, m, C64::new(0.0, 0.0));
                let want = if n == m { 1.0 } else { 0.0 };
                assert_eq!(e, C64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn displacement_element_adjoint_symmetry() {
        // <n|D(b)|m> = conj(<m|D(-b)|n>)
        let b = C64::new(-0.4, 0.9);
        for n in 0..8 {
            for m in 0..8 {
                let lhs = displacement_element(n, m, b);
                let rhs = displacement_element(m, n, -b).conj();
                assert_relative_eq!(lhs.re, rhs.re, epsilon = 1e-14, max_relative = 1e-12);
                assert_relative_eq!(lhs.im, rhs.im, epsilon = 1e-14, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn kahan_recovers_cancelled_tail() {
        let mut k = KahanF64::default();
        k.add(1.0);
        for _ in 0..10 {
            k.add(1e-17);
        }
        k.add(-1.0);
        assert_relative_eq!(k.value(), 1e-16, max_relative = 1e-3);
    }
}
