//! Positive-semidefiniteness verdicts with block decomposition and an
//! extended-precision retry inside the inconclusive band.

use super::dd::{ComplexDd, Dd};
use super::jacobi::jacobi_eigenvalues;
use super::{check_square, hermitian_defect, symmetric_defect, LinalgError};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

/// Extended margins at or above this count as certified nonnegative.
const EXTENDED_ZERO: f64 = 1e-20;

/// Tolerances for classifying a minimum eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdPolicy {
    pub rel_tol: f64,
    pub inconclusive_band: f64,
    /// Largest block re-solved in double-double.
    pub extended_cap: usize,
}

impl Default for PsdPolicy {
    fn default() -> Self {
        PsdPolicy { rel_tol: 1e-8, inconclusive_band: 1e-7, extended_cap: 256 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    Passes,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Double,
    Extended,
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    None,
    Eigenvector { value: f64, vector: Vec<f64> },
    ComplexEigenvector { value: f64, vector: Vec<[f64; 2]> },
    Triple { indices: [usize; 3], value: f64 },
}

/// Outcome of a positivity test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub status: VerdictStatus,
    pub lambda_min: f64,
    /// `lambda_min / (1 + spectral_norm)`.
    pub margin: f64,
    pub spectral_norm: f64,
    pub dim: usize,
    pub precision: Precision,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CriterionVerdict {
    pub fn passes(&self) -> bool {
        self.status == VerdictStatus::Passes
    }
    pub fn fails(&self) -> bool {
        self.status == VerdictStatus::Fails
    }
}

/// Double-precision classification.
pub fn classify_margin(margin: f64, policy: &PsdPolicy) -> VerdictStatus {
    if margin < -policy.rel_tol {
        VerdictStatus::Fails
    } else if margin.abs() <= policy.rel_tol {
        VerdictStatus::Inconclusive
    } else {
        VerdictStatus::Passes
    }
}

/// Classification of a margin computed in double-double.
pub fn classify_margin_extended(margin: f64, policy: &PsdPolicy) -> VerdictStatus {
    if margin >= -EXTENDED_ZERO {
        VerdictStatus::Passes
    } else if margin < -policy.rel_tol {
        VerdictStatus::Fails
    } else {
        VerdictStatus::Inconclusive
    }
}

/// Entry oracle in double-double for a real symmetric matrix (global indices).
pub type ExtendedReal<'a> = &'a (dyn Fn(usize, usize) -> Dd + Sync);
/// Entry oracle in double-double for a Hermitian matrix (global indices).
pub type ExtendedComplex<'a> = &'a (dyn Fn(usize, usize) -> ComplexDd + Sync);

/// Real symmetric matrix in coordinate form with merged, sorted entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSymmetric {
    /// Sorts and sums duplicate coordinates; exact zeros are dropped.
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        SparseSymmetric { dim, entries: merged }
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let mut e = Vec::new();
        for r in 0..a.nrows() {
            for c in 0..a.ncols() {
                if a[(r, c)] != 0.0 {
                    e.push((r, c, a[(r, c)]));
                }
            }
        }
        SparseSymmetric { dim: a.nrows(), entries: e }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match self.entries.binary_search_by_key(&(r, c), |&(a, b, _)| (a, b)) {
            Ok(i) => self.entries[i].2,
            Err(_) => 0.0,
        }
    }

    /// Relative asymmetry `max |a_jk - a_kj| / max(1, max |a|)`.
    pub fn symmetric_defect(&self) -> f64 {
        let scale = self.entries.iter().fold(1.0f64, |s, e| s.max(e.2.abs()));
        let worst = self
            .entries
            .iter()
            .fold(0.0f64, |w, &(r, c, v)| w.max((v - self.get(c, r)).abs()));
        worst / scale
    }

    /// `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        let mut e = Vec::with_capacity(self.entries.len() * 2);
        for &(r, c, v) in &self.entries {
            e.push((r, c, 0.5 * v));
            e.push((c, r, 0.5 * v));
        }
        Self::from_triplets(self.dim, e)
    }

    /// `A x` for a dense vector.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }
}

fn components(dim: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::<usize>::new(dim);
    for (r, c) in edges {
        if r != c {
            uf.union(r, c);
        }
    }
    let labels = uf.into_labeling();
    let mut first = vec![usize::MAX; dim];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        if first[l] == usize::MAX {
            first[l] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[first[l]].push(i);
    }
    blocks
}

struct BlockEig<V> {
    min: f64,
    max_abs: f64,
    min_vec: Vec<V>,
}

/// Shared band logic once every block has a double-precision spectrum.
fn assemble<V: Copy + Default>(
    dim: usize,
    blocks: &[Vec<usize>],
    eigs: &[BlockEig<V>],
    policy: &PsdPolicy,
    extended: impl Fn(&[usize]) -> f64,
    witness: impl Fn(f64, Vec<V>) -> Witness,
) -> CriterionVerdict {
    let norm = eigs.iter().map(|e| e.max_abs).fold(0.0, f64::max);
    let (argmin, lambda_min) = eigs
        .iter()
        .enumerate()
        .map(|(i, e)| (i, e.min))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let scale = 1.0 + norm;
    let margin = lambda_min / scale;
    let mut verdict = CriterionVerdict {
        status: classify_margin(margin, policy),
        lambda_min,
        margin,
        spectral_norm: norm,
        dim,
        precision: Precision::Double,
        witness: Witness::None,
        note: None,
    };
    if margin.abs() <= policy.inconclusive_band {
        let suspects: Vec<usize> =
            (0..blocks.len()).filter(|&b| eigs[b].min / scale <= policy.inconclusive_band).collect();
        let largest = suspects.iter().map(|&b| blocks[b].len()).max().unwrap_or(0);
        if largest > policy.extended_cap {
            verdict.note = Some(format!(
                "extended retry skipped: block of size {largest} exceeds cap {}",
                policy.extended_cap
            ));
        } else {
            let mut ext_min = f64::INFINITY;
            for b in 0..blocks.len() {
                let v = if suspects.contains(&b) { extended(&blocks[b]) } else { eigs[b].min };
                ext_min = if v.is_nan() { f64::NAN } else { ext_min.min(v) };
            }
            if ext_min.is_finite() {
                verdict.lambda_min = ext_min;
                verdict.margin = ext_min / scale;
                verdict.status = classify_margin_extended(verdict.margin, policy);
                verdict.precision = Precision::Extended;
            } else {
                verdict.note = Some("extended retry did not produce a finite eigenvalue".into());
            }
        }
    }
    if verdict.status == VerdictStatus::Fails {
        let block = &blocks[argmin];
        let mut full = vec![V::default(); dim];
        for (local, &g) in block.iter().enumerate() {
            full[g] = eigs[argmin].min_vec[local];
        }
        verdict.witness = witness(lambda_min, full);
    }
    verdict
}

fn dd_block_min(m: usize, entries: Vec<Dd>) -> f64 {
    let vals = jacobi_eigenvalues(entries, m, TwoFloat::from(1e-31), 80);
    vals[0].hi() + vals[0].lo()
}

/// PSD verdict for a dense real symmetric matrix. The extended route reads
/// the given entries as exact.
pub fn psd_verdict(a: &DMatrix<f64>, policy: &PsdPolicy) -> Result<CriterionVerdict, LinalgError> {
    check_square(a.nrows(), a.ncols())?;
    let defect = symmetric_defect(a);
    if defect > 1e-12 {
        return Err(LinalgError::NotSymmetric { asymmetry: defect });
    }
    psd_verdict_sparse(&SparseSymmetric::from_dense(a), policy, None)
}

/// PSD verdict for a sparse real symmetric matrix with an optional
/// double-double entry oracle.
pub fn psd_verdict_sparse(
    a: &SparseSymmetric,
    policy: &PsdPolicy,
    ext: Option<ExtendedReal<'_>>,
) -> Result<CriterionVerdict, LinalgError> {
    if a.dim == 0 {
        return Err(LinalgError::Empty);
    }
    for &(r, c, v) in &a.entries {
        if !v.is_finite() {
            return Err(LinalgError::NonFinite { row: r, col: c });
        }
    }
    let blocks = components(a.dim, a.entries.iter().map(|&(r, c, _)| (r, c)));
    let mut local = vec![0usize; a.dim];
    let mut owner = vec![0usize; a.dim];
    for (b, blk) in blocks.iter().enumerate() {
        for (i, &g) in blk.iter().enumerate() {
            local[g] = i;
            owner[g] = b;
        }
    }
    let mut dense: Vec<DMatrix<f64>> = blocks.iter().map(|b| DMatrix::zeros(b.len(), b.len())).collect();
    for &(r, c, v) in &a.entries {
        dense[owner[r]][(local[r], local[c])] = v;
    }
    let eigs: Vec<BlockEig<f64>> = dense
        .iter()
        .map(|m| {
            let sym = (m + m.transpose()) * 0.5;
            let e = SymmetricEigen::new(sym);
            let (i, min) = e
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
            let max_abs = e.eigenvalues.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            BlockEig { min, max_abs, min_vec: e.eigenvectors.column(i).iter().cloned().collect() }
        })
        .collect();
    let extended = |blk: &[usize]| {
        let m = blk.len();
        let mut entries = vec![Dd::zero(); m * m];
        for (i, &gi) in blk.iter().enumerate() {
            for (j, &gj) in blk.iter().enumerate() {
                entries[i * m + j] = match ext {
                    Some(f) => f(gi, gj),
                    None => TwoFloat::from(dense[owner[gi]][(i, j)]),
                };
            }
        }
        // Symmetrize exactly.
        for i in 0..m {
            for j in i + 1..m {
                let s = (entries[i * m + j] + entries[j * m + i]) / TwoFloat::from(2.0);
                entries[i * m + j] = s;
                entries[j * m + i] = s;
            }
        }
        dd_block_min(m, entries)
    };
    Ok(assemble(a.dim, &blocks, &eigs, policy, extended, |value, vector| Witness::Eigenvector {
        value,
        vector,
    }))
}

/// PSD verdict for a dense Hermitian matrix with an optional double-double
/// entry oracle. The extended route embeds `A + iB` as `[[A, -B], [B, A]]`.
pub fn psd_verdict_hermitian(
    a: &DMatrix<Complex64>,
    policy: &PsdPolicy,
    ext: Option<ExtendedComplex<'_>>,
) -> Result<CriterionVerdict, LinalgError> {
    check_square(a.nrows(), a.ncols())?;
    let defect = hermitian_defect(a);
    if defect > 1e-12 {
        return Err(LinalgError::NotSymmetric { asymmetry: defect });
    }
    let n = a.nrows();
    let mut edges = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if a[(r, c)] != Complex64::new(0.0, 0.0) {
                edges.push((r, c));
            }
        }
    }
    let blocks = components(n, edges.into_iter());
    let eigs: Vec<BlockEig<Complex64>> = blocks
        .iter()
        .map(|blk| {
            let m = DMatrix::from_fn(blk.len(), blk.len(), |i, j| a[(blk[i], blk[j])]);
            let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
            let e = SymmetricEigen::new(herm);
            let (i, min) = e
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
            let max_abs = e.eigenvalues.iter().fold(0.0f64, |s, v| s.max(v.abs()));
            BlockEig { min, max_abs, min_vec: e.eigenvectors.column(i).iter().cloned().collect() }
        })
        .collect();
    let extended = |blk: &[usize]| {
        let m = blk.len();
        let w = 2 * m;
        let mut entries = vec![Dd::zero(); w * w];
        let half = TwoFloat::from(0.5);
        for (i, &gi) in blk.iter().enumerate() {
            for (j, &gj) in blk.iter().enumerate() {
                let (z, zt) = match ext {
                    Some(f) => (f(gi, gj), f(gj, gi)),
                    None => (
                        super::dd::c64_to_dd(a[(gi, gj)]),
                        super::dd::c64_to_dd(a[(gj, gi)]),
                    ),
                };
                // Hermitian part of the entry.
                let re = (z.re + zt.re) * half;
                let im = (z.im - zt.im) * half;
                entries[i * w + j] = re;
                entries[(i + m) * w + (j + m)] = re;
                entries[i * w + (j + m)] = -im;
                entries[(i + m) * w + j] = im;
            }
        }
        dd_block_min(w, entries)
    };
    Ok(assemble(n, &blocks, &eigs, policy, extended, |value, vector| Witness::ComplexEigenvector {
        value,
        vector: vector.iter().map(|z| [z.re, z.im]).collect(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> PsdPolicy {
        PsdPolicy::default()
    }

    #[test]
    fn identity_passes() {
        let v = psd_verdict(&DMatrix::identity(3, 3), &policy()).unwrap();
        assert_eq!(v.status, VerdictStatus::Passes);
        assert!((v.lambda_min - 1.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_fails_with_witness() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let v = psd_verdict(&a, &policy()).unwrap();
        assert_eq!(v.status, VerdictStatus::Fails);
        assert!((v.lambda_min + 1.0).abs() < 1e-12);
        let Witness::Eigenvector { value, vector } = &v.witness else { panic!("no witness") };
        let av = a * nalgebra::DVector::from_column_slice(vector);
        for i in 0..2 {
            assert!((av[i] - value * vector[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_zero_resolved_in_extended_precision() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let v = psd_verdict(&a, &policy()).unwrap();
        assert_eq!(v.status, VerdictStatus::Passes);
        assert_eq!(v.precision, Precision::Extended);
    }

    #[test]
    fn tiny_negative_is_inconclusive() {
        let a = DMatrix::from_row_slice(2, 2, &[-1e-9, 0.0, 0.0, 1.0]);
        let v = psd_verdict(&a, &policy()).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
    }

    #[test]
    fn tiny_negative_without_retry_is_inconclusive() {
        let a = DMatrix::from_row_slice(2, 2, &[-1e-9, 0.0, 0.0, 1.0]);
        let p = PsdPolicy { extended_cap: 0, ..policy() };
        let v = psd_verdict(&a, &p).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
        assert_eq!(v.precision, Precision::Double);
        assert!(v.note.is_some());
    }

    #[test]
    fn block_structure_is_respected() {
        let mut a = DMatrix::<f64>::zeros(4, 4);
        a[(0, 0)] = 2.0;
        a[(1, 1)] = 1.0;
        a[(1, 2)] = 3.0;
        a[(2, 1)] = 3.0;
        a[(2, 2)] = 1.0;
        a[(3, 3)] = 5.0;
        let v = psd_verdict(&a, &policy()).unwrap();
        assert!((v.lambda_min + 2.0).abs() < 1e-12);
        assert!((v.spectral_norm - 5.0).abs() < 1e-12);
        let Witness::Eigenvector { vector, .. } = &v.witness else { panic!() };
        assert_eq!(vector[0], 0.0);
        assert_eq!(vector[3], 0.0);
    }

    #[test]
    fn hermitian_rank_one_passes() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let a = DMatrix::from_row_slice(2, 2, &[one, i, -i, one]);
        let v = psd_verdict_hermitian(&a, &policy(), None).unwrap();
        assert_eq!(v.status, VerdictStatus::Passes);
        assert_eq!(v.precision, Precision::Extended);
    }

    #[test]
    fn sparse_merges_duplicates() {
        let s = SparseSymmetric::from_triplets(2, vec![(0, 1, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 0.0)]);
        assert_eq!(s.entries, vec![(0, 1, 3.0), (1, 0, 3.0)]);
        assert_eq!(s.symmetric_defect(), 0.0);
    }
}
