//! Cyclic Jacobi eigenvalue solver, generic over the float type.

use super::dd::AccurateDiv;

/// Eigenvalues (ascending) of a real symmetric row-major `n x n` matrix.
///
/// Sweeps until the off-diagonal Frobenius mass falls below `tol` times the
/// full Frobenius norm, or `max_sweeps` is reached.
pub fn jacobi_eigenvalues<T: AccurateDiv>(mut a: Vec<T>, n: usize, tol: T, max_sweeps: usize) -> Vec<T> {
    assert_eq!(a.len(), n * n, "matrix size mismatch");
    let two = T::one() + T::one();
    let negligible = T::from(1e-70).expect("representable");
    let huge = T::from(1e60).expect("representable");
    let frob = a.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    if frob == T::zero() {
        return vec![T::zero(); n];
    }
    for _ in 0..max_sweeps {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= tol * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= negligible * frob {
                    a[p * n + q] = T::zero();
                    a[q * n + p] = T::zero();
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app).adiv(two * apq);
                let t = {
                    let mag = if theta.abs() > huge {
                        T::one().adiv(two * theta.abs())
                    } else {
                        T::one().adiv(theta.abs() + (theta * theta + T::one()).sqrt())
                    };
                    if theta < T::zero() {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = T::one().adiv((t * t + T::one()).sqrt());
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
            }
        }
    }
    let mut vals: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    vals
}
