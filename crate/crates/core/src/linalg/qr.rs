use super::matrix::Matrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::tolerance;

/// Householder QR with the diagonal of `r` made real and positive.
///
/// The normalization makes the factorization unique for nonsingular input,
/// which is what makes `q` Haar-distributed when `a` has i.i.d. Gaussian
/// entries. Works for noncommutative scalars: reflectors are applied from the
/// left to `r`, phases are removed by left-multiplying rows of `r` by
/// `conj(d)` and right-multiplying columns of `q` by `d`.
pub fn qr_positive<S: Scalar>(a: &Matrix<S>) -> Result<(Matrix<S>, Matrix<S>)> {
    let n = a.dim();
    let mut r = a.clone();
    let mut q = Matrix::<S>::identity(n);
    let mut v = vec![S::zero(); n];

    for k in 0..n {
        let col_norm = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if col_norm < tolerance::QR_PIVOT {
            return Err(Error::Singular {
                column: k,
                pivot: col_norm,
            });
        }
        let sigma = r[(k, k)].phase().scale(col_norm);
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] += sigma;
        let v_norm2: f64 = (k..n).map(|i| v[i].norm_sqr()).sum();
        if v_norm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / v_norm2;

        // r <- (I - beta v v*) r on rows/cols k..n
        for j in k..n {
            let mut w = S::zero();
            for i in k..n {
                w += v[i].conj() * r[(i, j)];
            }
            let w = w.scale(beta);
            for i in k..n {
                let upd = v[i] * w;
                r[(i, j)] -= upd;
            }
        }
        // q <- q (I - beta v v*)
        for row in 0..n {
            let mut s = S::zero();
            for i in k..n {
                s += q[(row, i)] * v[i];
            }
            let s = s.scale(beta);
            for i in k..n {
                let upd = s * v[i].conj();
                q[(row, i)] -= upd;
            }
        }
    }

    for k in 0..n {
        for i in k + 1..n {
            r[(i, k)] = S::zero();
        }
        let d = r[(k, k)].phase();
        let dc = d.conj();
        for j in k..n {
            let v = r[(k, j)];
            r[(k, j)] = dc * v;
        }
        // diagonal is |r_kk| up to rounding in the imaginary parts
        r[(k, k)] = S::from_real(r[(k, k)].norm());
        q.scale_column_right(k, d);
    }
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::approx_eq;
    use crate::linalg::scalar::Quaternion;
    use num_complex::Complex64;

    fn assert_upper_positive<S: Scalar>(r: &Matrix<S>) {
        for i in 0..r.dim() {
            assert!(r[(i, i)].re() > 0.0);
            assert!((r[(i, i)].norm() - r[(i, i)].re()).abs() < 1e-14);
            for j in 0..i {
                assert_eq!(r[(i, j)], S::zero());
            }
        }
    }

    #[test]
    fn identity_factors_trivially() {
        let (q, r) = qr_positive(&Matrix::<f64>::identity(4)).unwrap();
        assert!(approx_eq(&q, &Matrix::identity(4), 1e-15));
        assert!(approx_eq(&r, &Matrix::identity(4), 1e-15));
    }

    #[test]
    fn negative_diagonal_moves_sign_into_q() {
        let a = Matrix::from_rows(vec![-2.0, 0.0, 0.0, 3.0]).unwrap();
        let (q, r) = qr_positive(&a).unwrap();
        let q_expected = Matrix::from_rows(vec![-1.0, 0.0, 0.0, 1.0]).unwrap();
        let r_expected = Matrix::from_rows(vec![2.0, 0.0, 0.0, 3.0]).unwrap();
        assert!(approx_eq(&q, &q_expected, 1e-15));
        assert!(approx_eq(&r, &r_expected, 1e-15));
    }

    #[test]
    fn complex_reconstruction() {
        let a = Matrix::from_fn(5, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64).sin())
        });
        let (q, r) = qr_positive(&a).unwrap();
        assert!(q.unitarity_defect() < 1e-12);
        assert!(approx_eq(&q.mul(&r), &a, 1e-10));
        assert_upper_positive(&r);
    }

    #[test]
    fn quaternion_reconstruction() {
        let a = Matrix::from_fn(3, |i, j| {
            Quaternion::new(
                (i + 2 * j) as f64 - 1.5,
                (i as f64 * 0.7).cos(),
                j as f64 - 0.3,
                ((i * j) as f64).sin(),
            )
        });
        let (q, r) = qr_positive(&a).unwrap();
        assert!(q.unitarity_defect() < 1e-12);
        assert!(approx_eq(&q.mul(&r), &a, 1e-10));
        assert_upper_positive(&r);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let a = Matrix::from_rows(vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(qr_positive(&a), Err(Error::Singular { column: 1, .. })));
    }

    #[test]
    fn repeated_runs_are_bitwise_equal() {
        let a = Matrix::from_fn(4, |i, j| {
            Complex64::new(((i * 5 + j * 3) % 7) as f64 - 3.0, (i as f64 * 1.3 + j as f64).cos())
        });
        let (q1, _) = qr_positive(&a).unwrap();
        let (q2, _) = qr_positive(&a).unwrap();
        assert_eq!(q1, q2);
    }
}
