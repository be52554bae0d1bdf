//! Dense spectral routines: symmetric and Hermitian eigensolvers, PSD verdicts
//! with an extended-precision retry, Perron-Frobenius data for nonnegative
//! matrices, tensor and Hadamard powers.

mod dd;
mod jacobi;
mod perron;
mod psd;

pub use dd::{c64_to_dd, cdiv, cunscale, dd_solve, gram_schmidt_dd, AccurateDiv, ComplexDd, Dd};
pub use jacobi::jacobi_eigenvalues;
pub use perron::{is_irreducible, pf_eigen, strongly_connected_classes, PfResult};
pub use psd::{
    classify_margin, classify_margin_extended, psd_verdict, psd_verdict_hermitian, psd_verdict_sparse, CriterionVerdict, ExtendedComplex,
    ExtendedReal, Precision, PsdPolicy, SparseSymmetric, VerdictStatus, Witness,
};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the spectral routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric/Hermitian (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix has a negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("empty matrix")]
    Empty,
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

/// Eigen-decomposition of a complex Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

pub(crate) fn check_square(rows: usize, cols: usize) -> Result<(), LinalgError> {
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Err(LinalgError::Empty);
    }
    Ok(())
}

fn check_finite_real(a: &DMatrix<f64>) -> Result<(), LinalgError> {
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            if !a[(r, c)].is_finite() {
                return Err(LinalgError::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Largest `|a_jk - conj(a_kj)|` relative to `max(1, max |a_jk|)`.
pub fn hermitian_defect(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut scale = 1.0f64;
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            scale = scale.max(a[(j, k)].norm());
            worst = worst.max((a[(j, k)] - a[(k, j)].conj()).norm());
        }
    }
    worst / scale
}

/// Largest `|a_jk - a_kj|` relative to `max(1, max |a_jk|)`.
pub fn symmetric_defect(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut scale = 1.0f64;
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            scale = scale.max(a[(j, k)].abs());
            worst = worst.max((a[(j, k)] - a[(k, j)]).abs());
        }
    }
    worst / scale
}

/// Symmetric eigen-decomposition. Rejects matrices whose relative asymmetry exceeds `1e-12`.
pub fn sym_eig(a: &DMatrix<f64>) -> Result<SymEig, LinalgError> {
    check_square(a.nrows(), a.ncols())?;
    check_finite_real(a)?;
    let asym = symmetric_defect(a);
    if asym > 1e-12 {
        return Err(LinalgError::NotSymmetric { asymmetry: asym });
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), a.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SymEig { values, vectors })
}

/// Hermitian eigen-decomposition. Rejects matrices whose relative defect exceeds `1e-12`.
pub fn herm_eig(a: &DMatrix<Complex64>) -> Result<HermEig, LinalgError> {
    check_square(a.nrows(), a.ncols())?;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            if !(a[(r, c)].re.is_finite() && a[(r, c)].im.is_finite()) {
                return Err(LinalgError::NonFinite { row: r, col: c });
            }
        }
    }
    let defect = hermitian_defect(a);
    if defect > 1e-12 {
        return Err(LinalgError::NotSymmetric { asymmetry: defect });
    }
    let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermEig { values, vectors })
}

/// `A^{⊗n}` with row-major multi-index ordering; `n = 0` gives the 1x1 identity.
pub fn kron_power<T>(a: &DMatrix<T>, n: usize) -> DMatrix<T>
where
    T: nalgebra::Scalar + num_traits::One + num_traits::Zero + nalgebra::ClosedAddAssign + nalgebra::ClosedMulAssign + Copy,
{
    let mut out = DMatrix::<T>::from_element(1, 1, T::one());
    for _ in 0..n {
        out = out.kronecker(a);
    }
    out
}

/// Entrywise power `A^{∘n}`.
pub fn hadamard_power<T>(a: &DMatrix<T>, n: usize) -> DMatrix<T>
where
    T: nalgebra::Scalar + num_traits::One + Copy + std::ops::Mul<Output = T>,
{
    a.map(|x| {
        let mut acc = T::one();
        for _ in 0..n {
            acc = acc * x;
        }
        acc
    })
}

/// Operator 2-norm of a real matrix, `sqrt(λ_max(AᵀA))`.
pub fn operator_norm(a: &DMatrix<f64>) -> f64 {
    let ata = a.transpose() * a;
    let eig = SymmetricEigen::new((&ata + ata.transpose()) * 0.5);
    eig.eigenvalues.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_eig_two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = sym_eig(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let v = e.vectors.column(1);
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((v[0] - v[1]).abs() < 1e-12);
    }

    #[test]
    fn sym_eig_rejects_asymmetric() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_eig(&a), Err(LinalgError::NotSymmetric { .. })));
    }

    #[test]
    fn sym_eig_rejects_rectangular() {
        let a = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(sym_eig(&a), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn herm_eig_pauli_y() {
        let i = Complex64::i();
        let z = Complex64::new(0.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[z, -i, i, z]);
        let e = herm_eig(&a).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kron_and_hadamard_shapes() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 3.0]);
        let k = kron_power(&a, 3);
        assert_eq!(k.shape(), (8, 8));
        // entry ((1,1,0),(0,1,1)) = a10 * a11 * a01
        let row = 0b110;
        let col = 0b011;
        assert_eq!(k[(row, col)], 2.0 * 3.0 * 1.0);
        let h = hadamard_power(&a, 3);
        assert_eq!(h[(1, 1)], 27.0);
        assert_eq!(kron_power(&a, 0)[(0, 0)], 1.0);
    }
}
