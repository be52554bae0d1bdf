//! Fusion rings: structure constants, axioms, Frobenius-Perron profile and
//! character tables.

mod builtin;

pub use builtin::{cyclic, fibonacci, product, r4k, r6, trivial};

use crate::linalg::{self, c64_to_dd, cunscale, dd_solve, operator_norm, ComplexDd, Dd, LinalgError};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use twofloat::TwoFloat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("MALFORMED_SHAPE: {0}")]
    MalformedShape(String),
    #[error("NEGATIVE_COEFFICIENT: N[{i}][{j}][{k}] = {value}")]
    NegativeCoefficient { i: usize, j: usize, k: usize, value: i64 },
    #[error("DUAL_NOT_INVOLUTION: dual({index}) = {image} is not an involution")]
    DualNotInvolution { index: usize, image: usize },
    #[error("operator norm {norm} of M_{index} differs from its Perron-Frobenius radius {radius}")]
    NormMismatch { index: usize, radius: f64, norm: f64 },
    #[error("ring is not commutative (N[{i}][{j}][*] != N[{j}][{i}][*])")]
    NonCommutative { i: usize, j: usize },
    #[error("simultaneous diagonalization failed (residual {residual:e})")]
    Diagonalization { residual: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Based ring with basis `x_0 = 1, x_1, ..., x_{r-1}` and
/// `x_i x_j = Σ_k N[i][j][k] x_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionRing {
    name: String,
    dual: Vec<usize>,
    coeffs: Vec<u32>,
}

impl FusionRing {
    /// Builds a ring after shape, sign and involution checks. Fusion axioms
    /// are checked separately by [`FusionRing::validate`].
    pub fn new(name: impl Into<String>, dual: Vec<usize>, n: &[Vec<Vec<i64>>]) -> Result<Self, FusionError> {
        let r = dual.len();
        if r == 0 {
            return Err(FusionError::MalformedShape("rank must be at least 1".into()));
        }
        if n.len() != r {
            return Err(FusionError::MalformedShape(format!("N has {} slices, rank is {r}", n.len())));
        }
        for (i, slice) in n.iter().enumerate() {
            if slice.len() != r || slice.iter().any(|row| row.len() != r) {
                return Err(FusionError::MalformedShape(format!("N[{i}] is not {r}x{r}")));
            }
        }
        for (i, &d) in dual.iter().enumerate() {
            if d >= r {
                return Err(FusionError::MalformedShape(format!("dual({i}) = {d} out of range")));
            }
            if dual[d] != i {
                return Err(FusionError::DualNotInvolution { index: i, image: d });
            }
        }
        let mut coeffs = Vec::with_capacity(r * r * r);
        for (i, slice) in n.iter().enumerate() {
            for (j, row) in slice.iter().enumerate() {
                for (k, &v) in row.iter().enumerate() {
                    if v < 0 {
                        return Err(FusionError::NegativeCoefficient { i, j, k, value: v });
                    }
                    let v = u32::try_from(v)
                        .map_err(|_| FusionError::MalformedShape(format!("N[{i}][{j}][{k}] too large")))?;
                    coeffs.push(v);
                }
            }
        }
        Ok(FusionRing { name: name.into(), dual, coeffs })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.dual.len()
    }

    pub fn dual(&self) -> &[usize] {
        &self.dual
    }

    /// `N_{ij}^k`.
    #[inline]
    pub fn n(&self, i: usize, j: usize, k: usize) -> u32 {
        let r = self.rank();
        self.coeffs[(i * r + j) * r + k]
    }

    /// Nested `N[i][j][k]` view.
    pub fn coefficients(&self) -> Vec<Vec<Vec<i64>>> {
        let r = self.rank();
        (0..r)
            .map(|i| (0..r).map(|j| (0..r).map(|k| self.n(i, j, k) as i64).collect()).collect())
            .collect()
    }

    /// Fusion matrix `(M_i)_{jk} = N_{ij}^k`.
    pub fn fusion_matrix(&self, i: usize) -> DMatrix<f64> {
        let r = self.rank();
        DMatrix::from_fn(r, r, |j, k| self.n(i, j, k) as f64)
    }

    pub fn is_commutative(&self) -> bool {
        self.first_noncommuting().is_none()
    }

    fn first_noncommuting(&self) -> Option<(usize, usize)> {
        let r = self.rank();
        for i in 0..r {
            for j in i + 1..r {
                if (0..r).any(|k| self.n(i, j, k) != self.n(j, i, k)) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Checks the unit, duality and associativity axioms.
    pub fn validate(&self) -> ValidationReport {
        let r = self.rank();
        let mut violations = Vec::new();
        let mut warnings = Vec::new();
        'unit: for j in 0..r {
            for k in 0..r {
                let want = u32::from(j == k);
                if self.n(0, j, k) != want || self.n(j, 0, k) != want {
                    violations.push(Violation { axiom: Axiom::Unit, indices: vec![0, j, k] });
                    break 'unit;
                }
            }
        }
        'dual: for i in 0..r {
            for j in 0..r {
                let want = u32::from(self.dual[i] == j);
                if self.n(i, j, 0) != want || self.n(j, i, 0) != want {
                    violations.push(Violation { axiom: Axiom::Duality, indices: vec![i, j, 0] });
                    break 'dual;
                }
            }
        }
        if let Some(t) = self.first_associativity_failure() {
            violations.push(Violation { axiom: Axiom::Associativity, indices: t.to_vec() });
        }
        'transpose: for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    if self.n(self.dual[i], j, k) != self.n(i, k, j) {
                        warnings.push(format!(
                            "M_dual({i}) is not the transpose of M_{i} (first difference at ({j}, {k}))"
                        ));
                        break 'transpose;
                    }
                }
            }
        }
        ValidationReport { violations, warnings }
    }

    /// First `(i, j, l, t)` with `((x_i x_j) x_l)_t != (x_i (x_j x_l))_t`.
    fn first_associativity_failure(&self) -> Option<[usize; 4]> {
        let r = self.rank();
        for i in 0..r {
            for j in 0..r {
                for l in 0..r {
                    for t in 0..r {
                        let mut lhs = 0u64;
                        let mut rhs = 0u64;
                        for m in 0..r {
                            lhs += self.n(i, j, m) as u64 * self.n(m, l, t) as u64;
                            rhs += self.n(j, l, m) as u64 * self.n(i, m, t) as u64;
                        }
                        if lhs != rhs {
                            return Some([i, j, l, t]);
                        }
                    }
                }
            }
        }
        None
    }

    /// Relabels the basis by `perm` (new index `p` holds old `perm[p]`); `perm[0]` must be 0.
    pub fn permuted(&self, perm: &[usize]) -> Result<FusionRing, FusionError> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if perm.len() != r || perm[0] != 0 || perm.iter().any(|&p| p >= r || std::mem::replace(&mut seen[p], true)) {
            return Err(FusionError::MalformedShape("permutation must fix 0 and be bijective".into()));
        }
        let mut inv = vec![0; r];
        for (p, &o) in perm.iter().enumerate() {
            inv[o] = p;
        }
        let dual = (0..r).map(|p| inv[self.dual[perm[p]]]).collect();
        let n: Vec<Vec<Vec<i64>>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| (0..r).map(|k| self.n(perm[i], perm[j], perm[k]) as i64).collect())
                    .collect()
            })
            .collect();
        FusionRing::new(self.name.clone(), dual, &n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    Unit,
    Duality,
    Associativity,
}

/// A violated axiom with its first offending index tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Frobenius-Perron data of a ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingProfile {
    pub rank: usize,
    /// `d_i = FPdim(x_i)`.
    pub dims: Vec<f64>,
    /// `Σ d_i²`.
    pub fpdim: f64,
    pub commutative: bool,
    /// Sorted `(d_i, multiplicity)` pairs.
    pub type_vector: Vec<(f64, usize)>,
    /// `max_i ‖M_i d - d_i d‖∞`.
    pub dim_residual: f64,
}

/// Computes `d_i` as the Perron-Frobenius radius of `M_i`, asserting it equals `‖M_i‖₂`.
pub fn profile(ring: &FusionRing) -> Result<RingProfile, FusionError> {
    let r = ring.rank();
    let mut dims = Vec::with_capacity(r);
    for i in 0..r {
        let m = ring.fusion_matrix(i);
        let pf = linalg::pf_eigen(&m)?;
        let norm = operator_norm(&m);
        if (norm - pf.radius).abs() > 1e-8 * pf.radius.max(1.0) {
            return Err(FusionError::NormMismatch { index: i, radius: pf.radius, norm });
        }
        dims.push(pf.radius);
    }
    let d = DVector::from_column_slice(&dims);
    let mut dim_residual = 0.0f64;
    for i in 0..r {
        let res = ring.fusion_matrix(i) * &d - &d * dims[i];
        dim_residual = dim_residual.max(res.amax());
    }
    let fpdim = dims.iter().map(|x| x * x).sum();
    let mut sorted = dims.clone();
    sorted.sort_by(f64::total_cmp);
    let mut type_vector: Vec<(f64, usize)> = Vec::new();
    for x in sorted {
        match type_vector.last_mut() {
            Some(last) if (last.0 - x).abs() <= 1e-9 * x.max(1.0) => last.1 += 1,
            _ => type_vector.push((x, 1)),
        }
    }
    Ok(RingProfile { rank: r, dims, fpdim, commutative: ring.is_commutative(), type_vector, dim_residual })
}

/// `d_i` refined to double-double by inverse iteration on `Σ_i M_i`, whose
/// Perron eigenvalue is `Σ_i d_i` with eigenvector `d`.
pub fn dims_extended(ring: &FusionRing, dims: &[f64]) -> Option<Vec<Dd>> {
    let r = ring.rank();
    let total: f64 = dims.iter().sum();
    let mu = TwoFloat::from(total) * TwoFloat::from(1.0 + 1e-13);
    let mut a = vec![ComplexDd::zero(); r * r];
    for j in 0..r {
        for k in 0..r {
            let s: u32 = (0..r).map(|i| ring.n(i, j, k)).sum();
            let diag = if j == k { mu } else { TwoFloat::from(0.0) };
            a[j * r + k] = ComplexDd::new(diag - TwoFloat::from(s as f64), TwoFloat::from(0.0));
        }
    }
    let mut v: Vec<ComplexDd> = dims.iter().map(|&x| c64_to_dd(Complex64::new(x, 0.0))).collect();
    for _ in 0..3 {
        v = dd_solve(a.clone(), v)?;
        let scale = v[0].re;
        v = v.into_iter().map(|z| cunscale(z, scale)).collect();
    }
    let out: Vec<Dd> = v.iter().map(|z| z.re).collect();
    let consistent = out
        .iter()
        .zip(dims)
        .all(|(e, &d)| ((e.hi() + e.lo()) - d).abs() <= 1e-9 * d.max(1.0));
    consistent.then_some(out)
}

/// Characters of a commutative ring: `values[i][j] = λ_{i,j}`, column 0 the
/// Frobenius-Perron character, remaining columns by descending `Re λ_{1,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTable {
    pub values: Vec<Vec<Complex64>>,
    /// Common unitary eigenbasis as columns.
    pub basis: DMatrix<Complex64>,
    /// `max_i max |U* M_i U - diag|`.
    pub residual: f64,
}

fn hermitian_parts(ring: &FusionRing, coeffs: &[(f64, f64)]) -> DMatrix<Complex64> {
    let r = ring.rank();
    let mut h = DMatrix::<Complex64>::zeros(r, r);
    for (i, &(a, b)) in coeffs.iter().enumerate() {
        let m = ring.fusion_matrix(i);
        for j in 0..r {
            for k in 0..r {
                let sym = 0.5 * (m[(j, k)] + m[(k, j)]);
                let anti = 0.5 * (m[(j, k)] - m[(k, j)]);
                // (M - Mᵀ)/(2i) = -i (M - Mᵀ)/2
                h[(j, k)] += Complex64::new(a * sym, -b * anti);
            }
        }
    }
    h
}

/// Simultaneous diagonalization through a random real combination of the
/// Hermitian parts of the `M_i`.
pub fn character_table(ring: &FusionRing) -> Result<CharacterTable, FusionError> {
    if let Some((i, j)) = ring.first_noncommuting() {
        return Err(FusionError::NonCommutative { i, j });
    }
    let r = ring.rank();
    let mats: Vec<DMatrix<Complex64>> =
        (0..r).map(|i| ring.fusion_matrix(i).map(|x| Complex64::new(x, 0.0))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c4a7);
    let mut best = f64::INFINITY;
    for _attempt in 0..8 {
        let coeffs: Vec<(f64, f64)> = (0..r).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let h = hermitian_parts(ring, &coeffs);
        let eig = linalg::herm_eig(&h)?;
        let u = eig.vectors;
        let mut residual = 0.0f64;
        let mut values = vec![vec![Complex64::new(0.0, 0.0); r]; r];
        for (i, m) in mats.iter().enumerate() {
            let d = u.adjoint() * m * &u;
            for a in 0..r {
                for b in 0..r {
                    if a == b {
                        values[i][a] = d[(a, a)];
                    } else {
                        residual = residual.max(d[(a, b)].norm());
                    }
                }
            }
        }
        best = best.min(residual);
        if residual > 1e-8 {
            continue;
        }
        let pf_col = (0..r)
            .max_by(|&a, &b| {
                let sa: f64 = (0..r).map(|i| values[i][a].re).sum();
                let sb: f64 = (0..r).map(|i| values[i][b].re).sum();
                sa.total_cmp(&sb)
            })
            .unwrap_or(0);
        let mut order: Vec<usize> = (0..r).filter(|&c| c != pf_col).collect();
        let key_row = if r > 1 { 1 } else { 0 };
        order.sort_by(|&a, &b| {
            let (x, y) = (values[key_row][a], values[key_row][b]);
            y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)).then_with(|| {
                (0..r)
                    .map(|i| values[i][b].re.total_cmp(&values[i][a].re))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        order.insert(0, pf_col);
        let table: Vec<Vec<Complex64>> = (0..r).map(|i| order.iter().map(|&c| values[i][c]).collect()).collect();
        let basis = DMatrix::from_fn(r, r, |row, c| u[(row, order[c])]);
        return Ok(CharacterTable { values: table, basis, residual });
    }
    Err(FusionError::Diagonalization { residual: best })
}

/// Characters refined to double-double: each common eigenvector is polished by
/// inverse iteration on a generic Hermitian combination, then
/// `λ_{i,j} = u_j* M_i u_j`.
pub fn character_table_extended(ring: &FusionRing, table: &CharacterTable) -> Option<Vec<Vec<ComplexDd>>> {
    let r = ring.rank();
    let coeffs: Vec<(f64, f64)> = (0..r).map(|i| (1.0 / (i as f64 + 1.7), 1.0 / (i as f64 + 2.3))).collect();
    let h = hermitian_parts(ring, &coeffs);
    let hd: Vec<ComplexDd> = (0..r * r).map(|x| c64_to_dd(h[(x / r, x % r)])).collect();
    let mut out = vec![vec![ComplexDd::zero(); r]; r];
    for c in 0..r {
        let mut u: Vec<ComplexDd> = (0..r).map(|row| c64_to_dd(table.basis[(row, c)])).collect();
        let uc: Vec<Complex64> = (0..r).map(|row| table.basis[(row, c)]).collect();
        let hu: Vec<Complex64> = (0..r).map(|row| (0..r).map(|k| h[(row, k)] * uc[k]).sum()).collect();
        let mu: f64 = (0..r).map(|row| (uc[row].conj() * hu[row]).re).sum();
        let mut spread = f64::INFINITY;
        for c2 in 0..r {
            if c2 == c {
                continue;
            }
            let v: Vec<Complex64> = (0..r).map(|row| table.basis[(row, c2)]).collect();
            let hv: Vec<Complex64> = (0..r).map(|row| (0..r).map(|k| h[(row, k)] * v[k]).sum()).collect();
            let mu2: f64 = (0..r).map(|row| (v[row].conj() * hv[row]).re).sum();
            spread = spread.min((mu2 - mu).abs());
        }
        if spread < 1e-6 {
            return None;
        }
        let shift = TwoFloat::from(mu) + TwoFloat::from(spread * 1e-9);
        let mut a = hd.clone();
        for d in 0..r {
            a[d * r + d] -= ComplexDd::new(shift, TwoFloat::from(0.0));
        }
        for _ in 0..3 {
            u = dd_solve(a.clone(), u)?;
            let norm = u.iter().fold(TwoFloat::from(0.0), |s, z| s + z.re * z.re + z.im * z.im).sqrt();
            u = u.into_iter().map(|z| cunscale(z, norm)).collect();
        }
        for i in 0..r {
            let mut acc = ComplexDd::zero();
            for j in 0..r {
                for k in 0..r {
                    let v = ring.n(i, j, k);
                    if v != 0 {
                        acc += u[j].conj() * u[k].scale(TwoFloat::from(v as f64));
                    }
                }
            }
            out[i][c] = acc;
        }
    }
    let consistent = (0..r).all(|i| {
        (0..r).all(|c| {
            let e = out[i][c];
            let f = table.values[i][c];
            let dre = (e.re.hi() + e.re.lo()) - f.re;
            let dim = (e.im.hi() + e.im.lo()) - f.im;
            dre.hypot(dim) <= 1e-7
        })
    });
    consistent.then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_profile() {
        let p = profile(&cyclic(2)).unwrap();
        assert_eq!(p.dims.len(), 2);
        assert!((p.dims[1] - 1.0).abs() < 1e-12);
        assert!((p.fpdim - 2.0).abs() < 1e-12);
        assert!(p.commutative);
    }

    #[test]
    fn fibonacci_profile() {
        let p = profile(&fibonacci()).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((p.dims[1] - phi).abs() < 1e-12);
        assert!((p.fpdim - (1.0 + phi * phi)).abs() < 1e-12);
        assert!(p.dim_residual < 1e-12);
    }

    #[test]
    fn rejects_bad_shape_and_signs() {
        let bad = vec![vec![vec![1, 0]], vec![vec![0, 1], vec![1, 0]]];
        assert!(matches!(FusionRing::new("x", vec![0, 1], &bad), Err(FusionError::MalformedShape(_))));
        let neg = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, -1]]];
        assert!(matches!(
            FusionRing::new("x", vec![0, 1], &neg),
            Err(FusionError::NegativeCoefficient { i: 1, j: 1, k: 1, value: -1 })
        ));
        let ok = cyclic(3).coefficients();
        assert!(matches!(
            FusionRing::new("x", vec![0, 2, 0], &ok),
            Err(FusionError::DualNotInvolution { .. })
        ));
    }

    #[test]
    fn validate_flags_each_axiom() {
        // a² = 1, b² = 1, ab = ba = b: (ab)b = 1 but a(bb) = a.
        let n = vec![
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]],
            vec![vec![0, 0, 1], vec![0, 0, 1], vec![1, 0, 0]],
        ];
        let ring = FusionRing::new("broken", vec![0, 1, 2], &n).unwrap();
        let rep = ring.validate();
        assert!(rep.violations.iter().any(|v| v.axiom == Axiom::Associativity));
        let mut n = cyclic(2).coefficients();
        n[0][1][0] = 1;
        let rep = FusionRing::new("x", vec![0, 1], &n).unwrap().validate();
        assert_eq!(rep.violations[0].axiom, Axiom::Unit);
        assert_eq!(rep.violations[0].indices, vec![0, 1, 0]);
    }

    #[test]
    fn builtins_are_valid() {
        for ring in [trivial(), cyclic(2), cyclic(5), product(&cyclic(2), &cyclic(2)), fibonacci(), r4k(3), r6()] {
            let rep = ring.validate();
            assert!(rep.is_valid(), "{} {:?}", ring.name(), rep);
            assert!(rep.warnings.is_empty(), "{} {:?}", ring.name(), rep);
        }
    }

    #[test]
    fn r6_type() {
        let p = profile(&r6()).unwrap();
        let s = 13f64.sqrt();
        let (a, b) = (7.0 + 2.0 * s, 11.0 + 3.0 * s);
        assert_eq!(p.type_vector.len(), 3);
        assert!((p.type_vector[0].0 - 1.0).abs() < 1e-9 && p.type_vector[0].1 == 1);
        assert!((p.type_vector[1].0 - a).abs() < 1e-9 && p.type_vector[1].1 == 3);
        assert!((p.type_vector[2].0 - b).abs() < 1e-9 && p.type_vector[2].1 == 2);
        assert!(!p.commutative);
    }

    #[test]
    fn character_table_z3() {
        let t = character_table(&cyclic(3)).unwrap();
        assert!(t.residual < 1e-10);
        for i in 0..3 {
            assert!((t.values[i][0] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let col1 = t.values[1][1];
        assert!((col1 - w).norm() < 1e-10 || (col1 - w.conj()).norm() < 1e-10);
    }

    #[test]
    fn character_table_rejects_noncommutative() {
        assert!(matches!(character_table(&r6()), Err(FusionError::NonCommutative { .. })));
    }

    #[test]
    fn extended_dims_fibonacci() {
        let ring = fibonacci();
        let p = profile(&ring).unwrap();
        let d = dims_extended(&ring, &p.dims).unwrap();
        let phi = (TwoFloat::from(1.0) + TwoFloat::from(5.0).sqrt()) / TwoFloat::from(2.0);
        assert!((d[1] - phi).abs() < TwoFloat::from(1e-30));
    }
}
