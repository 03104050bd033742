//! Small dense Hermitian linear algebra: a complex Jacobi eigensolver, the
//! Frobenius-nearest density matrix, and a real Cholesky solver.
//!
//! Matrix sizes here top out around a hundred rows, so cyclic Jacobi with its
//! excellent accuracy on Hermitian input beats anything fancier.

use crate::{C64, Error, Result};
use ndarray::Array2;

/// `(a + a^dagger) / 2`.
pub fn hermitize(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let mut out = a.clone();
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = 0.5 * (a[[i, j]] + a[[j, i]].conj());
        }
    }
    out
}

pub fn trace(a: &Array2<C64>) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[[i, i]]).sum()
}

pub fn frobenius(a: &Array2<C64>) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            s += 2.0 * a[[p, q]].norm_sqr();
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns eigenvalues in ascending order with matching eigenvector columns.
/// The input is hermitized first, so tiny asymmetries from accumulated
/// arithmetic do not poison the rotation angles.
pub fn eigh(a: &Array2<C64>) -> Result<(Vec<f64>, Array2<C64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::GridMismatch {
            detail: format!("eigensolver needs a square matrix, got {}x{}", n, a.ncols()),
        });
    }
    let mut m = hermitize(a);
    let mut v = Array2::<C64>::eye(n);
    if n <= 1 {
        return Ok((m.iter().map(|c| c.re).collect(), v));
    }

    let scale = frobenius(&m).max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;
    let mut converged = false;
    for _ in 0..60 {
        if off_diagonal_norm(&m) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let w = apq / r;
                let mut theta = 0.5 * (2.0 * r).atan2(m[[p, p]].re - m[[q, q]].re);
                // inner rotation keeps |theta| <= pi/4 and the sweep quadratic
                if theta > std::f64::consts::FRAC_PI_4 {
                    theta -= std::f64::consts::FRAC_PI_2;
                }
                let (s, c) = theta.sin_cos();
                let sw = s * w;
                // columns: (A U) with U = [[c, -s w], [s conj(w), c]] in (p, q)
                for k in 0..n {
                    let akp = m[[k, p]];
                    let akq = m[[k, q]];
                    m[[k, p]] = akp * c + akq * sw.conj();
                    m[[k, q]] = akq * c - akp * sw;
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * c + vkq * sw.conj();
                    v[[k, q]] = vkq * c - vkp * sw;
                }
                // rows: (U^dagger A)
                for k in 0..n {
                    let apk = m[[p, k]];
                    let aqk = m[[q, k]];
                    m[[p, k]] = apk * c + aqk * sw;
                    m[[q, k]] = aqk * c - apk * sw.conj();
                }
                m[[p, q]] = C64::new(0.0, 0.0);
                m[[q, p]] = C64::new(0.0, 0.0);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > tol * 100.0 {
        return Err(Error::Convergence { what: "jacobi eigensolver" });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|i| m[[i, i]].re).collect();
    order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_vecs = Array2::<C64>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            sorted_vecs[[k, dst]] = v[[k, src]];
        }
    }
    Ok((sorted_vals, sorted_vecs))
}

/// Projection of a real vector onto the probability simplex
/// (`p_i >= 0`, `sum p_i = 1`), the Euclidean-nearest point.
pub fn project_simplex(vals: &[f64]) -> Vec<f64> {
    let mut sorted = vals.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut mu = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            mu = candidate;
        } else {
            break;
        }
    }
    vals.iter().map(|&x| (x - mu).max(0.0)).collect()
}

/// Frobenius-nearest unit-trace positive semidefinite matrix.
///
/// Eigenvectors are kept; eigenvalues are projected onto the probability
/// simplex, which is the exact minimizer among Hermitian candidates.
pub fn nearest_density_matrix(a: &Array2<C64>) -> Result<Array2<C64>> {
    let (vals, vecs) = eigh(a)?;
    let probs = project_simplex(&vals);
    let n = vals.len();
    let mut out = Array2::<C64>::zeros((n, n));
    for (idx, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = vecs[[i, idx]];
            for j in 0..n {
                out[[i, j]] += p * vi * vecs[[j, idx]].conj();
            }
        }
    }
    Ok(out)
}

/// Cholesky solve `a x = rhs` for real symmetric positive definite `a` and a
/// complex right-hand side.
pub fn solve_spd(a: &Array2<f64>, rhs: &[C64]) -> Result<Vec<C64>> {
    let n = a.nrows();
    if a.ncols() != n || rhs.len() != n {
        return Err(Error::GridMismatch {
            detail: format!(
                "solver needs square system matching the right-hand side, got {}x{} vs {}",
                n,
                a.ncols(),
                rhs.len()
            ),
        });
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::Convergence { what: "positive-definite factorization" });
                }
                l[[i, i]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    let mut y = rhs.to_vec();
    for i in 0..n {
        for k in 0..i {
            let lik = l[[i, k]];
            let yk = y[k];
            y[i] -= lik * yk;
        }
        y[i] /= l[[i, i]];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let lki = l[[k, i]];
            let yk = y[k];
            y[i] -= lki * yk;
        }
        y[i] /= l[[i, i]];
    }
    Ok(y)
}
