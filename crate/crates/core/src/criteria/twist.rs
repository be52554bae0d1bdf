//! Reduced (Hadamard power), twisted (unitary conjugation) and reduced-twisted criteria.

use super::local::{tensor_dim, tensor_entry_dd, tensor_matrix};
use super::{CriteriaError, RingContext};
use crate::fusion::FusionRing;
use crate::linalg::{
    c64_to_dd, gram_schmidt_dd, hermitian_defect, kron_power, psd_verdict_hermitian, psd_verdict_sparse, ComplexDd,
    CriterionVerdict, PsdPolicy, SparseSymmetric, VerdictStatus,
};
use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;
use twofloat::TwoFloat;

/// Largest twisted matrix handled (rows).
const TWISTED_ROW_CAP: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwistMode {
    Reduced,
    Twisted,
    ReducedTwisted,
}

/// Built-in unitary generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitaryKind {
    Identity,
    Dft,
    Haar { seed: u64 },
}

impl UnitaryKind {
    pub fn matrix(&self, m: usize) -> DMatrix<Complex64> {
        match *self {
            UnitaryKind::Identity => DMatrix::identity(m, m),
            UnitaryKind::Dft => dft_unitary(m),
            UnitaryKind::Haar { seed } => haar_unitary(m, seed),
        }
    }
}

/// `F_{jk} = e^{2πijk/m} / √m`.
pub fn dft_unitary(m: usize) -> DMatrix<Complex64> {
    let s = 1.0 / (m as f64).sqrt();
    DMatrix::from_fn(m, m, |j, k| {
        let theta = 2.0 * std::f64::consts::PI * ((j * k) % m) as f64 / m as f64;
        Complex64::from_polar(s, theta)
    })
}

/// Unitary from QR of a complex Gaussian matrix with phase-fixed `R` diagonal.
pub fn haar_unitary(m: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(m, m, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    DMatrix::from_fn(m, m, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

/// Per-task seed derived from a global seed and a task index (splitmix64 mixing).
pub fn task_seed(global: u64, task: u64) -> u64 {
    let mut z = global ^ task.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_unitary(u: &DMatrix<Complex64>, m: usize) -> Result<(), CriteriaError> {
    if u.nrows() != m || u.ncols() != m {
        return Err(CriteriaError::InvalidArgument(format!(
            "unitary is {}x{}, local set has size {m}",
            u.nrows(),
            u.ncols()
        )));
    }
    let defect = (u.adjoint() * u - DMatrix::<Complex64>::identity(m, m)).iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if defect > 1e-10 {
        return Err(CriteriaError::NotUnitary { defect });
    }
    Ok(())
}

fn dd_matmul(a: &[ComplexDd], b: &[ComplexDd], n: usize) -> Vec<ComplexDd> {
    let mut out = vec![ComplexDd::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn dd_adjoint(a: &[ComplexDd], n: usize) -> Vec<ComplexDd> {
    let mut out = vec![ComplexDd::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j].conj();
        }
    }
    out
}

fn dd_kron_power(u: &[ComplexDd], m: usize, n: usize) -> Vec<ComplexDd> {
    let mut out = vec![Complex::new(TwoFloat::from(1.0), TwoFloat::from(0.0))];
    let mut size = 1;
    for _ in 0..n {
        let next_size = size * m;
        let mut next = vec![ComplexDd::zero(); next_size * next_size];
        for a in 0..size {
            for b in 0..size {
                let x = out[a * size + b];
                if x.is_zero() {
                    continue;
                }
                for c in 0..m {
                    for d in 0..m {
                        next[(a * m + c) * next_size + (b * m + d)] = x * u[c * m + d];
                    }
                }
            }
        }
        out = next;
        size = next_size;
    }
    out
}

fn unitary_dd(u: &DMatrix<Complex64>) -> Result<Vec<ComplexDd>, CriteriaError> {
    let m = u.nrows();
    let flat: Vec<ComplexDd> = (0..m * m).map(|x| c64_to_dd(u[(x / m, x % m)])).collect();
    gram_schmidt_dd(&flat, m).ok_or(CriteriaError::NotUnitary { defect: f64::NAN })
}

fn note_symmetrized(v: &mut CriterionVerdict, defect: f64) {
    if defect > 1e-12 {
        let extra = format!("matrix was not Hermitian (defect {defect:.3e}); symmetrized");
        v.note = Some(match v.note.take() {
            Some(existing) => format!("{extra}; {existing}"),
            None => extra,
        });
    }
}

/// One evaluation of the reduced, twisted or reduced-twisted matrix with unitary `u`.
pub fn twisted_with(
    ctx: &RingContext,
    s: &[usize],
    n: usize,
    u: &DMatrix<Complex64>,
    mode: TwistMode,
    policy: &PsdPolicy,
) -> Result<CriterionVerdict, CriteriaError> {
    if n == 0 {
        return Err(CriteriaError::InvalidArgument("n must be at least 1".into()));
    }
    let terms = ctx.local_terms(s)?;
    let m = s.len();
    let weights = terms.weights(n);
    let weights_dd = terms.weights_dd(n);
    match mode {
        TwistMode::Reduced => {
            let mut triplets = Vec::new();
            for (mat, &w) in terms.mats.iter().zip(&weights) {
                for a in 0..m {
                    for b in 0..m {
                        let v = mat[(a, b)];
                        if v != 0.0 {
                            triplets.push((a, b, w * v.powi(n as i32)));
                        }
                    }
                }
            }
            let mut t = SparseSymmetric::from_triplets(m, triplets);
            let defect = t.symmetric_defect();
            if defect > 1e-12 {
                t = t.symmetrized();
            }
            let oracle = |a: usize, b: usize| {
                let mut acc = TwoFloat::from(0.0);
                for (mat, &w) in terms.mats.iter().zip(&weights_dd) {
                    let v = TwoFloat::from(mat[(a, b)]);
                    let mut p = w;
                    for _ in 0..n {
                        p *= v;
                    }
                    acc += p;
                }
                acc
            };
            let mut v = psd_verdict_sparse(&t, policy, Some(&oracle))?;
            note_symmetrized(&mut v, defect);
            Ok(v)
        }
        TwistMode::Twisted => {
            check_unitary(u, m)?;
            let dim = tensor_dim(m, n, TWISTED_ROW_CAP)
                .ok_or(CriteriaError::Capacity { rows: (m as f64).powi(n as i32), cap: TWISTED_ROW_CAP })?;
            let t = tensor_matrix(&terms, n, TWISTED_ROW_CAP)?.to_dense().map(|x| Complex64::new(x, 0.0));
            let w = kron_power(u, n);
            let h = &w * t * w.adjoint();
            let defect = hermitian_defect(&h);
            let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
            let cache: OnceLock<Option<Vec<ComplexDd>>> = OnceLock::new();
            let oracle = |a: usize, b: usize| {
                let full = cache.get_or_init(|| {
                    let ud = unitary_dd(u).ok()?;
                    let wd = dd_kron_power(&ud, m, n);
                    let td: Vec<ComplexDd> = (0..dim * dim)
                        .map(|x| {
                            Complex::new(tensor_entry_dd(&terms, &weights_dd, n, x / dim, x % dim), TwoFloat::from(0.0))
                        })
                        .collect();
                    let wt = dd_matmul(&wd, &td, dim);
                    Some(dd_matmul(&wt, &dd_adjoint(&wd, dim), dim))
                });
                match full {
                    Some(f) => f[a * dim + b],
                    None => c64_to_dd(h[(a, b)]),
                }
            };
            let mut v = psd_verdict_hermitian(&h, policy, Some(&oracle))?;
            note_symmetrized(&mut v, defect);
            Ok(v)
        }
        TwistMode::ReducedTwisted => {
            check_unitary(u, m)?;
            let mut h = DMatrix::<Complex64>::zeros(m, m);
            for (mat, &w) in terms.mats.iter().zip(&weights) {
                if mat.iter().all(|&x| x == 0.0) {
                    continue;
                }
                let c = u * mat.map(|x| Complex64::new(x, 0.0)) * u.adjoint();
                h += c.map(|z| z.powu(n as u32) * w);
            }
            let defect = hermitian_defect(&h);
            let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
            let cache: OnceLock<Option<Vec<ComplexDd>>> = OnceLock::new();
            let oracle = |a: usize, b: usize| {
                let full = cache.get_or_init(|| {
                    let ud = unitary_dd(u).ok()?;
                    let uadj = dd_adjoint(&ud, m);
                    let mut acc = vec![ComplexDd::zero(); m * m];
                    for (mat, &w) in terms.mats.iter().zip(&weights_dd) {
                        if mat.iter().all(|&x| x == 0.0) {
                            continue;
                        }
                        let md: Vec<ComplexDd> = (0..m * m)
                            .map(|x| Complex::new(TwoFloat::from(mat[(x / m, x % m)]), TwoFloat::from(0.0)))
                            .collect();
                        let c = dd_matmul(&dd_matmul(&ud, &md, m), &uadj, m);
                        for (slot, z) in acc.iter_mut().zip(c) {
                            let mut p = Complex::new(w, TwoFloat::from(0.0));
                            for _ in 0..n {
                                p *= z;
                            }
                            *slot += p;
                        }
                    }
                    Some(acc)
                });
                match full {
                    Some(f) => f[a * m + b],
                    None => c64_to_dd(h[(a, b)]),
                }
            };
            let mut v = psd_verdict_hermitian(&h, policy, Some(&oracle))?;
            note_symmetrized(&mut v, defect);
            Ok(v)
        }
    }
}

/// Evaluates the chosen mode for every unitary and returns the verdict with the
/// smallest margin (any Fails dominates). Reduced mode ignores the unitaries.
pub fn reduced_twisted_criterion(
    ring: &FusionRing,
    s: &[usize],
    n: usize,
    unitaries: &[DMatrix<Complex64>],
    mode: TwistMode,
    policy: &PsdPolicy,
) -> Result<CriterionVerdict, CriteriaError> {
    reduced_twisted_with(&RingContext::new(ring)?, s, n, unitaries, mode, policy)
}

pub fn reduced_twisted_with(
    ctx: &RingContext,
    s: &[usize],
    n: usize,
    unitaries: &[DMatrix<Complex64>],
    mode: TwistMode,
    policy: &PsdPolicy,
) -> Result<CriterionVerdict, CriteriaError> {
    if mode == TwistMode::Reduced || unitaries.is_empty() {
        let identity = DMatrix::<Complex64>::identity(s.len(), s.len());
        return twisted_with(ctx, s, n, &identity, mode, policy);
    }
    Ok(worst_twist(ctx, s, n, unitaries, mode, policy)?.1)
}

/// Index of the worst unitary and its verdict.
pub fn worst_twist(
    ctx: &RingContext,
    s: &[usize],
    n: usize,
    unitaries: &[DMatrix<Complex64>],
    mode: TwistMode,
    policy: &PsdPolicy,
) -> Result<(usize, CriterionVerdict), CriteriaError> {
    let rank = |x: &CriterionVerdict| match x.status {
        VerdictStatus::Fails => 0,
        VerdictStatus::Inconclusive => 1,
        VerdictStatus::Passes => 2,
    };
    let mut worst: Option<(usize, CriterionVerdict)> = None;
    for (k, u) in unitaries.iter().enumerate() {
        let v = twisted_with(ctx, s, n, u, mode, policy)?;
        if worst.as_ref().is_none_or(|(_, w)| (rank(&v), v.margin) < (rank(w), w.margin)) {
            worst = Some((k, v));
        }
    }
    worst.ok_or_else(|| CriteriaError::InvalidArgument("no unitaries given".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::localized_criterion;
    use crate::fusion::{cyclic, fibonacci, r4k};

    #[test]
    fn haar_is_unitary_and_seeded() {
        let u = haar_unitary(3, 7);
        assert!(check_unitary(&u, 3).is_ok());
        assert_eq!(u, haar_unitary(3, 7));
        assert_ne!(u, haar_unitary(3, 8));
        assert!(check_unitary(&dft_unitary(5), 5).is_ok());
    }

    #[test]
    fn non_unitary_rejected() {
        let u = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        let err = reduced_twisted_criterion(&cyclic(2), &[0, 1], 3, &[u], TwistMode::Twisted, &PsdPolicy::default());
        assert!(matches!(err, Err(CriteriaError::NotUnitary { .. })));
    }

    #[test]
    fn identity_twist_matches_localized() {
        let p = PsdPolicy::default();
        let ring = r4k(5);
        let l = localized_criterion(&ring, &[1, 2], 3, &p).unwrap();
        let t =
            reduced_twisted_criterion(&ring, &[1, 2], 3, &[DMatrix::identity(2, 2)], TwistMode::Twisted, &p).unwrap();
        assert_eq!(l.status, t.status);
        assert!((l.lambda_min - t.lambda_min).abs() < 1e-10);
    }

    #[test]
    fn z2_reduced_is_i_plus_g() {
        let v = reduced_twisted_criterion(&cyclic(2), &[0, 1], 3, &[], TwistMode::Reduced, &PsdPolicy::default())
            .unwrap();
        assert_eq!(v.status, VerdictStatus::Passes);
        assert!(v.lambda_min.abs() < 1e-12);
        assert!((v.spectral_norm - 2.0).abs() < 1e-12);
    }

    #[test]
    fn categorifiable_rings_pass_random_twists() {
        let p = PsdPolicy::default();
        for ring in [cyclic(3), fibonacci()] {
            let full: Vec<usize> = (0..ring.rank()).collect();
            let us: Vec<_> = (0..10).map(|t| haar_unitary(full.len(), task_seed(1, t))).collect();
            for mode in [TwistMode::Twisted, TwistMode::ReducedTwisted] {
                let v = reduced_twisted_criterion(&ring, &full, 3, &us, mode, &p).unwrap();
                assert_eq!(v.status, VerdictStatus::Passes, "{} {:?} {:?}", ring.name(), mode, v);
            }
        }
    }
}
