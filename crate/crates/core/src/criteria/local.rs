//! Tensor-power matrices `Σ_i d_i^{2-n} (M_i^S)^{⊗n}` assembled sparsely.

use super::CriteriaError;
use crate::linalg::{psd_verdict_sparse, AccurateDiv, CriterionVerdict, Dd, PsdPolicy, SparseSymmetric};
use nalgebra::DMatrix;
use twofloat::TwoFloat;

/// Weighted local fusion matrices: `mats[i] = M_i^S`, `dims[i] = d_i`.
#[derive(Debug, Clone)]
pub struct LocalTerms {
    pub dims: Vec<f64>,
    /// Optional double-double refinement of `dims`.
    pub dims_dd: Option<Vec<Dd>>,
    pub mats: Vec<DMatrix<f64>>,
}

impl LocalTerms {
    pub fn size(&self) -> usize {
        self.mats.first().map_or(0, |m| m.nrows())
    }

    /// `d_i^{2-n}` in double precision.
    pub fn weights(&self, n: usize) -> Vec<f64> {
        self.dims.iter().map(|&d| d.powi(2 - n as i32)).collect()
    }

    /// `d_i^{2-n}` in double-double.
    pub fn weights_dd(&self, n: usize) -> Vec<Dd> {
        let dims: Vec<Dd> = match &self.dims_dd {
            Some(v) => v.clone(),
            None => self.dims.iter().map(|&d| TwoFloat::from(d)).collect(),
        };
        dims.iter()
            .map(|&d| {
                let e = 2 - n as i32;
                let base = if e < 0 { TwoFloat::from(1.0).adiv(d) } else { d };
                let mut acc = TwoFloat::from(1.0);
                for _ in 0..e.unsigned_abs() {
                    acc *= base;
                }
                acc
            })
            .collect()
    }

    fn nonzeros(&self) -> Vec<Vec<(usize, usize, f64)>> {
        self.mats
            .iter()
            .map(|m| {
                let mut nz = Vec::new();
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        if m[(r, c)] != 0.0 {
                            nz.push((r, c, m[(r, c)]));
                        }
                    }
                }
                nz
            })
            .collect()
    }
}

/// `m^n`, or `None` on overflow or above `cap`.
pub(crate) fn tensor_dim(m: usize, n: usize, cap: usize) -> Option<usize> {
    let mut d = 1usize;
    for _ in 0..n {
        d = d.checked_mul(m)?;
        if d > cap {
            return None;
        }
    }
    Some(d)
}

/// Assembles `Σ_i d_i^{2-n} (M_i^S)^{⊗n}` (row-major multi-indices).
pub fn tensor_matrix(terms: &LocalTerms, n: usize, cap: usize) -> Result<SparseSymmetric, CriteriaError> {
    if n == 0 {
        return Err(CriteriaError::InvalidArgument("n must be at least 1".into()));
    }
    let m = terms.size();
    if m == 0 {
        return Err(CriteriaError::EmptyLocalSet);
    }
    let dim = tensor_dim(m, n, cap).ok_or(CriteriaError::Capacity { rows: (m as f64).powi(n as i32), cap })?;
    let weights = terms.weights(n);
    let mut triplets = Vec::new();
    for (nz, &w) in terms.nonzeros().iter().zip(&weights) {
        if nz.is_empty() {
            continue;
        }
        let mut digits = vec![0usize; n];
        'tuples: loop {
            let mut row = 0usize;
            let mut col = 0usize;
            let mut val = w;
            for &d in &digits {
                let (r, c, v) = nz[d];
                row = row * m + r;
                col = col * m + c;
                val *= v;
            }
            triplets.push((row, col, val));
            let mut pos = n;
            loop {
                if pos == 0 {
                    break 'tuples;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < nz.len() {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }
    Ok(SparseSymmetric::from_triplets(dim, triplets))
}

/// Entry of the tensor matrix in double-double.
pub(crate) fn tensor_entry_dd(terms: &LocalTerms, weights: &[Dd], n: usize, row: usize, col: usize) -> Dd {
    let m = terms.size();
    let mut rs = vec![0usize; n];
    let mut cs = vec![0usize; n];
    let (mut r, mut c) = (row, col);
    for t in (0..n).rev() {
        rs[t] = r % m;
        cs[t] = c % m;
        r /= m;
        c /= m;
    }
    let mut acc = TwoFloat::from(0.0);
    for (mat, &w) in terms.mats.iter().zip(weights) {
        let mut prod = w;
        for t in 0..n {
            let v = mat[(rs[t], cs[t])];
            if v == 0.0 {
                prod = TwoFloat::from(0.0);
                break;
            }
            prod *= TwoFloat::from(v);
        }
        acc += prod;
    }
    acc
}

/// PSD verdict of the tensor matrix, symmetrizing with a note if needed.
pub fn tensor_verdict(
    terms: &LocalTerms,
    n: usize,
    policy: &PsdPolicy,
    cap: usize,
) -> Result<CriterionVerdict, CriteriaError> {
    let mut t = tensor_matrix(terms, n, cap)?;
    let defect = t.symmetric_defect();
    let mut note = None;
    if defect > 1e-12 {
        t = t.symmetrized();
        note = Some(format!("matrix was not symmetric (defect {defect:.3e}); symmetrized"));
    }
    let weights = terms.weights_dd(n);
    let oracle = |r: usize, c: usize| tensor_entry_dd(terms, &weights, n, r, c);
    let mut v = psd_verdict_sparse(&t, policy, Some(&oracle))?;
    if let Some(extra) = note {
        v.note = Some(match v.note {
            Some(existing) => format!("{extra}; {existing}"),
            None => extra,
        });
    }
    Ok(v)
}
