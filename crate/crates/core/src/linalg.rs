use crate::scalar::Scalar;

/// `ln det A` for a symmetric positive semi-definite row-major `d x d` matrix,
/// or `None` when a Cholesky pivot falls below `16 d eps max_diag`.
pub(crate) fn cholesky_log_det<T: Scalar>(a: &[T], d: usize) -> Option<T> {
    debug_assert_eq!(a.len(), d * d);
    let max_diag = (0..d).fold(T::zero(), |m, i| m.max(a[i * d + i]));
    if !(max_diag > T::zero()) {
        return None;
    }
    let tol = T::lit(16.0) * T::from_count(d) * T::epsilon() * max_diag;
    let mut l = vec![T::zero(); d * d];
    let mut log_det = T::zero();
    for j in 0..d {
        let mut s = a[j * d + j];
        for k in 0..j {
            s -= l[j * d + k] * l[j * d + k];
        }
        if !(s > tol) {
            return None;
        }
        let ljj = s.sqrt();
        l[j * d + j] = ljj;
        log_det += s.ln();
        for i in j + 1..d {
            let mut t = a[i * d + j];
            for k in 0..j {
                t -= l[i * d + k] * l[j * d + k];
            }
            l[i * d + j] = t / ljj;
        }
    }
    Some(log_det)
}

/// Determinant of a small dense matrix by Gaussian elimination with partial
/// pivoting.
#[cfg(test)]
pub(crate) fn det<T: Scalar>(a: &[T], d: usize) -> T {
    let mut m = a.to_vec();
    let mut det = T::one();
    for c in 0..d {
        let p = (c..d)
            .max_by(|&i, &j| m[i * d + c].abs().partial_cmp(&m[j * d + c].abs()).unwrap())
            .unwrap();
        if m[p * d + c] == T::zero() {
            return T::zero();
        }
        if p != c {
            for k in 0..d {
                m.swap(p * d + k, c * d + k);
            }
            det = -det;
        }
        let piv = m[c * d + c];
        det *= piv;
        for r in c + 1..d {
            let f = m[r * d + c] / piv;
            for k in c..d {
                let v = m[c * d + k];
                m[r * d + k] -= f * v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_det_matches_elimination() {
        let a: [f64; 9] = [4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let ld = cholesky_log_det(&a, 3).unwrap();
        assert!((ld.exp() - det(&a, 3)).abs() < 1e-12);
    }

    #[test]
    fn singular_is_detected() {
        assert!(cholesky_log_det(&[1.0, 1.0, 1.0, 1.0], 2).is_none());
        assert!(cholesky_log_det(&[0.0f64], 1).is_none());
        assert_eq!(det(&[1.0, 2.0, 2.0, 4.0], 2), 0.0);
    }
}
