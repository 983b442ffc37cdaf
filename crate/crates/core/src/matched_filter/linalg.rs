//! Dense Cholesky factorization on row-major `n x n` matrices.

use crate::scalar::Scalar;

/// Lower-triangular factor `L` with `A = L L^T`, or `None` when `A` is not
/// numerically positive definite.
pub fn cholesky<T: Scalar>(a: &[T], n: usize) -> Option<Vec<T>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > T::zero()) || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Square-root factor of a positive semi-definite matrix: like
/// [`cholesky`], but pivots within `tol * max_diag` of zero give a zero
/// column instead of failing. `None` if a pivot is clearly negative.
pub fn psd_factor(a: &[f64], n: usize, tol: f64) -> Option<Vec<f64>> {
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s < -tol * scale {
                    return None;
                }
                l[i * n + i] = if s > tol * scale { s.sqrt() } else { 0.0 };
            } else if l[j * n + j] > 0.0 {
                l[i * n + j] = s / l[j * n + j];
            } else if s.abs() > tol.sqrt() * scale {
                return None;
            }
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` by forward and back substitution.
pub fn cholesky_solve<T: Scalar>(l: &[T], n: usize, b: &[T]) -> Vec<T> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s = s - l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s = s - l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn random_spd(rng: &mut SeededRng, n: usize) -> Vec<f64> {
        let b: Vec<f64> = (0..n * n).map(|_| rng.normal()).collect();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| b[i * n + k] * b[j * n + k]).sum::<f64>();
            }
            a[i * n + i] += 0.5;
        }
        a
    }

    /// Gauss-Jordan inverse with partial pivoting.
    fn explicit_inverse(a: &[f64], n: usize) -> Vec<f64> {
        let mut m = a.to_vec();
        let mut inv = vec![0.0; n * n];
        for i in 0..n {
            inv[i * n + i] = 1.0;
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| m[x * n + col].abs().total_cmp(&m[y * n + col].abs())).unwrap();
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
                inv.swap(col * n + k, piv * n + k);
            }
            let d = m[col * n + col];
            for k in 0..n {
                m[col * n + k] /= d;
                inv[col * n + k] /= d;
            }
            for r in 0..n {
                if r != col {
                    let f = m[r * n + col];
                    for k in 0..n {
                        m[r * n + k] -= f * m[col * n + k];
                        inv[r * n + k] -= f * inv[col * n + k];
                    }
                }
            }
        }
        inv
    }

    #[test]
    fn solve_matches_explicit_inverse() {
        let mut rng = SeededRng::new(1);
        let n = 16;
        for _ in 0..25 {
            let a = random_spd(&mut rng, n);
            let b: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
            let l = cholesky(&a, n).unwrap();
            let x = cholesky_solve(&l, n, &b);
            let inv = explicit_inverse(&a, n);
            for i in 0..n {
                let want: f64 = (0..n).map(|k| inv[i * n + k] * b[k]).sum();
                assert!((x[i] - want).abs() <= 1e-8 * want.abs().max(1e-3), "{} vs {}", x[i], want);
            }
        }
    }

    #[test]
    fn singular_fails() {
        assert!(cholesky(&[1.0f64, 1.0, 1.0, 1.0], 2).is_none());
        assert!(cholesky(&[0.0f32], 1).is_none());
    }

    #[test]
    fn psd_factor_handles_rank_deficiency() {
        let a = [1.0, 1.0, 1.0, 1.0];
        let l = psd_factor(&a, 2, 1e-12).unwrap();
        // L L^T reproduces A
        for i in 0..2 {
            for j in 0..2 {
                let v: f64 = (0..2).map(|k| l[i * 2 + k] * l[j * 2 + k]).sum();
                assert!((v - a[i * 2 + j]).abs() < 1e-12);
            }
        }
        assert!(psd_factor(&[-1.0], 1, 1e-12).is_none());
    }
}
