//! Completely positive maps in Kraus form: Choi positivity, Perron–Frobenius
//! eigenpairs, irreducibility, commutants and fixed-point structure.

use crate::linalg::{herm_eig, psd_verdict_hermitian, CriterionVerdict, LinalgError, PsdPolicy, VerdictStatus};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use thiserror::Error;

type CMat = DMatrix<Complex64>;

const FLAG_TOL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 100_000;
const INCREMENT_TOL: f64 = 1e-10;
const SCHUR_ITERATIONS: usize = 10_000;
const NULL_TOL: f64 = 1e-11;
const STRUCTURE_TOL: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("EMPTY_KRAUS: at least one Kraus operator is required")]
    Empty,
    #[error("DIMENSION_MISMATCH: expected {expected}x{expected}, found {rows}x{cols}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },
    #[error("NON_FINITE: Kraus operator {index} has a non-finite entry")]
    NonFinite { index: usize },
    #[error("NOT_TRACE_PRESERVING: sum of F*F deviates from I by {defect:.3e}")]
    NotTracePreserving { defect: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `Φ(X) = Σ_j F_j X F_j*`.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<CMat>,
    trace_preserving: bool,
    unital: bool,
}

fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn trace(a: &CMat) -> Complex64 {
    (0..a.nrows()).map(|i| a[(i, i)]).sum()
}

/// Row-major vectorization.
fn vec_of(a: &CMat) -> Vec<Complex64> {
    let n = a.nrows();
    (0..n * n).map(|x| a[(x / n, x % n)]).collect()
}

fn mat_of(v: &[Complex64], n: usize) -> CMat {
    DMatrix::from_fn(n, n, |r, c| v[r * n + c])
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Positive part of a Hermitian matrix.
fn positive_part(h: &CMat) -> Result<CMat, LinalgError> {
    let e = herm_eig(&hermitize(h))?;
    let n = h.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &lam) in e.values.iter().enumerate() {
        if lam > 0.0 {
            let v = e.vectors.column(k);
            out += v * v.adjoint() * real(lam);
        }
    }
    Ok(out)
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMat>) -> Result<Self, ChannelError> {
        let first = kraus.first().ok_or(ChannelError::Empty)?;
        let dim = first.nrows();
        if dim == 0 {
            return Err(ChannelError::DimensionMismatch { expected: 1, rows: 0, cols: first.ncols() });
        }
        for (index, f) in kraus.iter().enumerate() {
            if f.nrows() != dim || f.ncols() != dim {
                return Err(ChannelError::DimensionMismatch { expected: dim, rows: f.nrows(), cols: f.ncols() });
            }
            if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(ChannelError::NonFinite { index });
            }
        }
        let id = CMat::identity(dim, dim);
        let tp: CMat = kraus.iter().map(|f| f.adjoint() * f).fold(CMat::zeros(dim, dim), |a, b| a + b);
        let un: CMat = kraus.iter().map(|f| f * f.adjoint()).fold(CMat::zeros(dim, dim), |a, b| a + b);
        Ok(QuantumChannel {
            dim,
            trace_preserving: max_abs(&(tp - &id)) <= FLAG_TOL,
            unital: max_abs(&(un - id)) <= FLAG_TOL,
            kraus,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        self.kraus.iter().fold(CMat::zeros(self.dim, self.dim), |acc, f| acc + f * x * f.adjoint())
    }

    /// `Φ*(X) = Σ_j F_j* X F_j`.
    pub fn apply_dual(&self, x: &CMat) -> CMat {
        self.kraus.iter().fold(CMat::zeros(self.dim, self.dim), |acc, f| acc + f.adjoint() * x * f)
    }

    /// Matrix of `Φ` on row-major vectorizations: `Σ_j F_j ⊗ conj(F_j)`.
    pub fn superoperator(&self) -> CMat {
        let n2 = self.dim * self.dim;
        self.kraus.iter().fold(CMat::zeros(n2, n2), |acc, f| acc + kron(f, &f.conjugate()))
    }
}

/// `Σ_{jk} E_jk ⊗ Φ(E_jk)`.
pub fn choi_matrix(phi: &QuantumChannel) -> CMat {
    choi_from_superoperator(&phi.superoperator(), phi.dim).expect("consistent dimensions")
}

/// Choi matrix of a map given by its `n² × n²` row-major superoperator.
pub fn choi_from_superoperator(l: &CMat, n: usize) -> Result<CMat, ChannelError> {
    let n2 = n * n;
    if l.nrows() != n2 || l.ncols() != n2 {
        return Err(ChannelError::DimensionMismatch { expected: n2, rows: l.nrows(), cols: l.ncols() });
    }
    // Φ(E_jk)_{ab} = L[(a,b),(j,k)] placed at row (j,a), column (k,b).
    Ok(DMatrix::from_fn(n2, n2, |row, col| {
        let (j, a) = (row / n, row % n);
        let (k, b) = (col / n, col % n);
        l[(a * n + b, j * n + k)]
    }))
}

/// PSD verdict of the Choi matrix; a non-Hermitian Choi matrix is reported as failing.
pub fn cp_verdict(l: &CMat, n: usize, policy: &PsdPolicy) -> Result<CriterionVerdict, ChannelError> {
    let choi = choi_from_superoperator(l, n)?;
    let defect = crate::linalg::hermitian_defect(&choi);
    let mut v = psd_verdict_hermitian(&hermitize(&choi), policy, None)?;
    if defect > 1e-12 {
        v.status = VerdictStatus::Fails;
        v.note = Some(format!("Choi matrix is not Hermitian (defect {defect:.3e}); map is not Hermiticity-preserving"));
    }
    Ok(v)
}

/// Complete positivity via Choi positivity; rank-deficient Choi matrices sit at
/// margin zero, so only a failing verdict counts against it.
pub fn cp_check(l: &CMat, n: usize) -> Result<bool, ChannelError> {
    Ok(!cp_verdict(l, n, &PsdPolicy::default())?.fails())
}

/// Spectral radius of a complex matrix through its real embedding.
fn spectral_radius(l: &CMat) -> f64 {
    let m = l.nrows();
    let emb = DMatrix::from_fn(2 * m, 2 * m, |r, c| {
        let z = l[(r % m, c % m)];
        match (r < m, c < m) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    match emb.clone().try_schur(f64::EPSILON, SCHUR_ITERATIONS) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max),
        None => gelfand_radius(emb),
    }
}

/// `‖A^(2^k)‖^(2^-k)` by repeated normalized squaring.
fn gelfand_radius(mut a: DMatrix<f64>) -> f64 {
    let mut log_scale = 0.0;
    let mut power = 1.0;
    for _ in 0..40 {
        let norm = a.norm();
        if norm == 0.0 {
            return 0.0;
        }
        a /= norm;
        log_scale += norm.ln() / power;
        a = &a * &a;
        power *= 2.0;
    }
    (log_scale + a.norm().ln() / power).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct PfChannelResult {
    pub radius: f64,
    /// Unit-trace positive-semidefinite eigenmatrix.
    #[serde(serialize_with = "ser_cmat")]
    pub fixed_point: CMat,
    pub residual: f64,
    pub iterations: usize,
    pub irreducible: bool,
}

pub(crate) fn ser_cmat<S: serde::Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in 0..m.nrows() {
        let row: Vec<[f64; 2]> = (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// Projects onto the PSD cone (clipping eigenvalues below `1e-12 · trace`) and normalizes the trace.
fn psd_normalize(x: &CMat) -> Result<CMat, LinalgError> {
    let h = hermitize(x);
    let tr = trace(&h).re;
    let e = herm_eig(&h)?;
    let floor = 1e-12 * tr.abs().max(f64::MIN_POSITIVE);
    let n = x.nrows();
    let mut out = CMat::zeros(n, n);
    for (k, &lam) in e.values.iter().enumerate() {
        if lam > -floor {
            let v = e.vectors.column(k);
            out += v * v.adjoint() * real(lam.max(0.0));
        }
    }
    let t = trace(&out).re;
    Ok(if t > 0.0 { out * real(1.0 / t) } else { out })
}

/// Lazy power iteration `D ← (Φ(D)/r + D)/2` from `I/n` with PSD projection.
fn lazy_iterate(phi: &QuantumChannel, r: f64) -> Result<(CMat, usize), LinalgError> {
    let n = phi.dim;
    let mut d = CMat::identity(n, n) * real(1.0 / n as f64);
    for it in 1..=MAX_ITERATIONS {
        let next = psd_normalize(&((phi.apply(&d) * real(1.0 / r) + &d) * real(0.5)))?;
        let inc = (&next - &d).norm();
        d = next;
        if inc <= INCREMENT_TOL {
            return Ok((d, it));
        }
    }
    Ok((d, MAX_ITERATIONS))
}

/// Perron–Frobenius eigenpair of `Φ`: radius and a unit-trace PSD eigenmatrix.
pub fn channel_pf(phi: &QuantumChannel) -> Result<PfChannelResult, ChannelError> {
    let n = phi.dim;
    let r_eig = spectral_radius(&phi.superoperator());
    let irreducible = channel_irreducible(phi);
    if r_eig <= 1e-14 {
        // Nilpotent map: the last nonzero iterate of I is annihilated.
        let mut d = CMat::identity(n, n);
        let mut iterations = 0;
        loop {
            let next = phi.apply(&d);
            iterations += 1;
            if next.norm() <= 1e-14 * d.norm() || iterations > n * n {
                break;
            }
            d = next;
        }
        let d = psd_normalize(&d)?;
        let residual = phi.apply(&d).norm();
        return Ok(PfChannelResult { radius: 0.0, fixed_point: d, residual, iterations, irreducible });
    }
    let (d, iterations) = lazy_iterate(phi, r_eig)?;
    let image = phi.apply(&d);
    let r_trace = trace(&image).re;
    let res_eig = (&image - &d * real(r_eig)).norm();
    let res_trace = (&image - &d * real(r_trace)).norm();
    let (radius, residual) = if res_trace < res_eig { (r_trace, res_trace) } else { (r_eig, res_eig) };
    Ok(PfChannelResult { radius, fixed_point: d, residual, iterations, irreducible })
}

/// Orthonormal (Hilbert–Schmidt) basis builder.
struct Span {
    basis: Vec<Vec<Complex64>>,
}

impl Span {
    fn new() -> Self {
        Span { basis: Vec::new() }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Residual of `v` after projection onto the span.
    fn reduce(&self, v: &mut [Complex64]) {
        for _ in 0..2 {
            for b in &self.basis {
                let c: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
                for (y, x) in v.iter_mut().zip(b) {
                    *y -= c * x;
                }
            }
        }
    }

    fn insert(&mut self, m: &CMat, rel_tol: f64) -> bool {
        let mut v = vec_of(m);
        let norm0 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            return false;
        }
        self.reduce(&mut v);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= rel_tol * norm0 {
            return false;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        self.basis.push(v);
        true
    }

    fn residual(&self, m: &CMat) -> f64 {
        let mut v = vec_of(m);
        self.reduce(&mut v);
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// No common nontrivial invariant subspace of the Kraus operators. Decided by
/// Burnside's theorem: the unital algebra they generate must be all of `M_n`.
pub fn channel_irreducible(phi: &QuantumChannel) -> bool {
    let n = phi.dim;
    let gens: Vec<CMat> = phi
        .kraus
        .iter()
        .filter_map(|f| {
            let s = f.norm();
            (s > 0.0).then(|| f * real(1.0 / s))
        })
        .collect();
    let mut span = Span::new();
    span.insert(&CMat::identity(n, n), 1e-9);
    let mut frontier = vec![CMat::identity(n, n) * real(1.0 / (n as f64).sqrt())];
    while let Some(x) = frontier.pop() {
        if span.dim() == n * n {
            break;
        }
        for g in &gens {
            let y = g * &x;
            if span.insert(&y, 1e-9) {
                frontier.push(mat_of(span.basis.last().expect("just inserted"), n));
            }
        }
    }
    span.dim() == n * n
}

/// Orthonormal basis of `{Y : [Y, A] = [Y, A*] = 0 for every A in ops}` with a closure check.
#[derive(Debug, Clone, Serialize)]
pub struct Commutant {
    #[serde(skip)]
    pub basis: Vec<CMat>,
    pub dim: usize,
    /// Largest distance of a checked product or adjoint from the span.
    pub closure_residual: f64,
    pub pairs_checked: usize,
    pub closed: bool,
}

/// Null space of a Hermitian PSD Gram matrix.
fn null_space(gram: &CMat) -> Result<Vec<Vec<Complex64>>, LinalgError> {
    let e = herm_eig(&hermitize(gram))?;
    let top = e.values.last().copied().unwrap_or(0.0).max(1.0);
    Ok(e
        .values
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam <= NULL_TOL * top)
        .map(|(k, _)| e.vectors.column(k).iter().copied().collect())
        .collect())
}

pub fn commutant_of(ops: &[CMat], n: usize) -> Result<Commutant, LinalgError> {
    let n2 = n * n;
    let id = CMat::identity(n, n);
    let mut gram = CMat::zeros(n2, n2);
    for f in ops {
        for g in [f.clone(), f.adjoint()] {
            // vec(YG − GY) = (I ⊗ Gᵀ − G ⊗ I) vec(Y)
            let a = kron(&id, &g.transpose()) - kron(&g, &id);
            gram += a.adjoint() * a;
        }
    }
    let basis: Vec<CMat> = null_space(&gram)?.iter().map(|v| mat_of(v, n)).collect();
    let mut span = Span::new();
    for b in &basis {
        span.insert(b, 1e-9);
    }
    let dim = basis.len();
    let mut worst = 0.0f64;
    for b in &basis {
        worst = worst.max(span.residual(&b.adjoint()));
    }
    let mut pairs = Vec::new();
    if dim * dim <= 1024 {
        for a in 0..dim {
            for b in 0..dim {
                pairs.push((a, b));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0_77a7);
        for _ in 0..1024 {
            let a = rand::Rng::random_range(&mut rng, 0..dim);
            let b = rand::Rng::random_range(&mut rng, 0..dim);
            pairs.push((a, b));
        }
    }
    for &(a, b) in &pairs {
        worst = worst.max(span.residual(&(&basis[a] * &basis[b])));
    }
    Ok(Commutant { basis, dim, closure_residual: worst, pairs_checked: pairs.len(), closed: worst <= 1e-8 })
}

/// Commutant of the Kraus operators and their adjoints.
pub fn commutant_basis(phi: &QuantumChannel) -> Result<Commutant, ChannelError> {
    Ok(commutant_of(&phi.kraus, phi.dim)?)
}

/// Basis of `{X : Φ(X) = X}`.
pub fn fixed_space(phi: &QuantumChannel) -> Result<Vec<CMat>, ChannelError> {
    let n = phi.dim;
    let a = phi.superoperator() - CMat::identity(n * n, n * n);
    let gram = a.adjoint() * a;
    Ok(null_space(&gram)?.iter().map(|v| mat_of(v, n)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub dim: usize,
    /// Rank of the maximal-support fixed state ζ.
    pub zeta_rank: usize,
    pub zeta_residual: f64,
    pub iterations: usize,
    pub hypothesis_met: bool,
    pub fixed_space_dim: usize,
    pub commutant_dim: usize,
    pub commutant_closed: bool,
    pub samples: usize,
    /// Part (a): sampled positive commutant elements are fixed after conjugation by ζ^{1/2}.
    pub part_a_residual: f64,
    pub part_a: bool,
    /// Part (b): positive parts of fixed points lie in ζ^{1/2} C ζ^{1/2}.
    pub part_b_residual: f64,
    pub part_b: bool,
    pub dims_agree: bool,
    /// `None` when the hypothesis is unmet.
    pub passes: Option<bool>,
    pub note: Option<String>,
}

/// Compares the positive fixed points of a trace-preserving `Φ` with
/// `ζ^{1/2} C(Φ_ζ)^+ ζ^{1/2}`, where `ζ` is the maximal-support fixed state and
/// `Φ_ζ(y) = ζ^{-1/2} Φ(ζ^{1/2} y ζ^{1/2}) ζ^{-1/2}` on the support of `ζ`.
pub fn pf_space_structure_check(
    phi: &QuantumChannel,
    samples: usize,
    seed: u64,
) -> Result<StructureReport, ChannelError> {
    let n = phi.dim;
    if !phi.trace_preserving {
        let tp: CMat = phi.kraus.iter().map(|f| f.adjoint() * f).fold(CMat::zeros(n, n), |a, b| a + b);
        return Err(ChannelError::NotTracePreserving { defect: max_abs(&(tp - CMat::identity(n, n))) });
    }
    let (zeta, iterations) = lazy_iterate(phi, 1.0)?;
    let zeta_residual = (phi.apply(&zeta) - &zeta).norm();

    let e = herm_eig(&hermitize(&zeta))?;
    let top = e.values.last().copied().unwrap_or(0.0);
    let support: Vec<usize> = (0..n).filter(|&k| e.values[k] > 1e-9 * top).collect();
    let s = support.len();
    let v = DMatrix::from_fn(n, s, |r, c| e.vectors[(r, support[c])]);
    let sqrt_z = DMatrix::from_fn(s, s, |r, c| if r == c { real(e.values[support[r]].sqrt()) } else { real(0.0) });
    let inv_sqrt_z =
        DMatrix::from_fn(s, s, |r, c| if r == c { real(1.0 / e.values[support[r]].sqrt()) } else { real(0.0) });
    let proj_out = CMat::identity(n, n) - &v * v.adjoint();
    let leak = phi.kraus.iter().map(|f| (&proj_out * f * &v).norm()).fold(0.0, f64::max);
    let hypothesis_met = s > 0 && zeta_residual <= 1e-9 && leak <= 1e-8;

    let fixed = fixed_space(phi)?;
    let mut report = StructureReport {
        dim: n,
        zeta_rank: s,
        zeta_residual,
        iterations,
        hypothesis_met,
        fixed_space_dim: fixed.len(),
        commutant_dim: 0,
        commutant_closed: false,
        samples,
        part_a_residual: f64::NAN,
        part_a: false,
        part_b_residual: f64::NAN,
        part_b: false,
        dims_agree: false,
        passes: None,
        note: None,
    };
    if !hypothesis_met {
        report.note = Some(format!(
            "hypothesis unmet: fixed-state residual {zeta_residual:.3e}, support leakage {leak:.3e}"
        ));
        return Ok(report);
    }

    let g: Vec<CMat> = phi.kraus.iter().map(|f| &inv_sqrt_z * v.adjoint() * f * &v * &sqrt_z).collect();
    let comm = commutant_of(&g, s)?;
    report.commutant_dim = comm.dim;
    report.commutant_closed = comm.closed;
    let embed = |c: &CMat| &v * &sqrt_z * c * &sqrt_z * v.adjoint();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_a = 0.0f64;
    for _ in 0..samples {
        let mut h = CMat::zeros(s, s);
        for b in &comm.basis {
            let w: f64 = StandardNormal.sample(&mut rng);
            h += hermitize(b) * real(w);
        }
        let c = &h * &h;
        let norm = c.norm();
        if norm == 0.0 {
            continue;
        }
        let y = embed(&(c * real(1.0 / norm)));
        worst_a = worst_a.max((phi.apply(&y) - &y).norm() / y.norm().max(1.0));
    }
    report.part_a_residual = worst_a;
    report.part_a = worst_a <= STRUCTURE_TOL;

    let mut span = Span::new();
    for b in &comm.basis {
        span.insert(b, 1e-9);
    }
    let mut worst_b = 0.0f64;
    for x in &fixed {
        let parts = [hermitize(x), (x - x.adjoint()) * Complex64::new(0.0, -0.5)];
        for h in parts {
            if h.norm() <= 1e-9 {
                continue;
            }
            let p = positive_part(&h)?;
            let pn = p.norm();
            if pn <= 1e-9 {
                continue;
            }
            let p = p * real(1.0 / pn);
            let outside = (&p - &v * v.adjoint() * &p * &v * v.adjoint()).norm();
            let c = &inv_sqrt_z * v.adjoint() * &p * &v * &inv_sqrt_z;
            let cn = c.norm().max(1.0);
            worst_b = worst_b.max(outside).max(span.residual(&c) / cn);
        }
    }
    report.part_b_residual = worst_b;
    report.part_b = worst_b <= STRUCTURE_TOL;
    report.dims_agree = report.fixed_space_dim == report.commutant_dim;
    report.passes = Some(report.part_a && report.part_b && report.dims_agree);
    Ok(report)
}

/// Examples used in tests, docs and the CLI.
pub mod examples {
    use super::*;

    fn c(re: f64) -> Complex64 {
        real(re)
    }

    pub fn unit(n: usize, j: usize, k: usize) -> CMat {
        let mut m = CMat::zeros(n, n);
        m[(j, k)] = c(1.0);
        m
    }

    /// `Φ(D) = tr(D) I / n`.
    pub fn depolarizing(n: usize) -> QuantumChannel {
        let s = 1.0 / (n as f64).sqrt();
        let kraus = (0..n).flat_map(|j| (0..n).map(move |k| unit(n, j, k) * c(s))).collect();
        QuantumChannel::new(kraus).expect("well formed")
    }

    /// Conditional expectation onto diagonal matrices.
    pub fn pinching(n: usize) -> QuantumChannel {
        QuantumChannel::new((0..n).map(|j| unit(n, j, j)).collect()).expect("well formed")
    }

    pub fn unitary(u: CMat) -> QuantumChannel {
        QuantumChannel::new(vec![u]).expect("well formed")
    }

    /// Kraus `{|0⟩⟨0|, |0⟩⟨1|}`.
    pub fn reset() -> QuantumChannel {
        QuantumChannel::new(vec![unit(2, 0, 0), unit(2, 0, 1)]).expect("well formed")
    }

    /// Kraus `{X/√2, H/√2}`.
    pub fn flip_hadamard() -> QuantumChannel {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = CMat::from_row_slice(2, 2, &[c(0.0), c(s), c(s), c(0.0)]);
        let h = CMat::from_row_slice(2, 2, &[c(0.5), c(0.5), c(0.5), c(-0.5)]);
        QuantumChannel::new(vec![x, h]).expect("well formed")
    }

    /// Mixture of diagonal phase unitaries with weights `p`.
    pub fn commuting_unitaries(phases: &[Vec<f64>], p: &[f64]) -> QuantumChannel {
        let kraus = phases
            .iter()
            .zip(p)
            .map(|(ph, &w)| {
                let n = ph.len();
                DMatrix::from_fn(n, n, |r, col| {
                    if r == col {
                        Complex64::from_polar(w.sqrt(), ph[r])
                    } else {
                        c(0.0)
                    }
                })
            })
            .collect();
        QuantumChannel::new(kraus).expect("well formed")
    }
}
