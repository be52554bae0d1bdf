//! Unitary categorification obstructions: primary, localized, reduced and
//! twisted tensor-power criteria, the Schur product criterion, the rank-4
//! family with its testing function, and the partial-data inequality.

mod family;
mod local;
mod twist;

pub use family::{partial_data_criterion, r4k_family, testing_function_check, PartialData};
pub use local::{tensor_matrix, tensor_verdict, LocalTerms};
pub use twist::{
    dft_unitary, haar_unitary, reduced_twisted_criterion, reduced_twisted_with, task_seed, twisted_with, worst_twist, TwistMode,
    UnitaryKind,
};

use crate::fusion::{self, FusionError, FusionRing, RingProfile};
use crate::linalg::{
    AccurateDiv, CriterionVerdict, LinalgError, Precision, PsdPolicy, SparseSymmetric, VerdictStatus, Witness,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;
use twofloat::TwoFloat;

/// Default row cap for tensor-power matrices.
pub const DEFAULT_ROW_CAP: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriteriaError {
    #[error("matrix would have {rows} rows, above the cap of {cap}; try the localized criterion")]
    Capacity { rows: f64, cap: usize },
    #[error("local set is empty")]
    EmptyLocalSet,
    #[error("local set index {index} out of range or repeated")]
    BadLocalSet { index: usize },
    #[error("matrix is not unitary (‖U*U - I‖ = {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Dimension data reused across criteria for one ring.
#[derive(Debug, Clone)]
pub struct RingContext {
    pub ring: FusionRing,
    pub profile: RingProfile,
    pub dims_dd: Option<Vec<crate::linalg::Dd>>,
}

impl RingContext {
    /// Validates the ring and computes its dimensions.
    pub fn new(ring: &FusionRing) -> Result<Self, CriteriaError> {
        let report = ring.validate();
        if let Some(v) = report.violations.first() {
            return Err(CriteriaError::InvalidRing(format!("{:?} axiom fails at {:?}", v.axiom, v.indices)));
        }
        let profile = fusion::profile(ring)?;
        let dims_dd = fusion::dims_extended(ring, &profile.dims);
        Ok(RingContext { ring: ring.clone(), profile, dims_dd })
    }

    /// `M_i^S` for every `i`.
    pub fn local_terms(&self, s: &[usize]) -> Result<LocalTerms, CriteriaError> {
        check_local_set(s, self.ring.rank())?;
        let mats = (0..self.ring.rank())
            .map(|i| DMatrix::from_fn(s.len(), s.len(), |a, b| self.ring.n(i, s[a], s[b]) as f64))
            .collect();
        Ok(LocalTerms { dims: self.profile.dims.clone(), dims_dd: self.dims_dd.clone(), mats })
    }

    pub fn full_set(&self) -> Vec<usize> {
        (0..self.ring.rank()).collect()
    }
}

pub(crate) fn check_local_set(s: &[usize], rank: usize) -> Result<(), CriteriaError> {
    if s.is_empty() {
        return Err(CriteriaError::EmptyLocalSet);
    }
    let mut seen = vec![false; rank];
    for &i in s {
        if i >= rank || seen[i] {
            return Err(CriteriaError::BadLocalSet { index: i });
        }
        seen[i] = true;
    }
    Ok(())
}

/// `T_n = Σ_i d_i² (M_i/d_i)^{⊗n}`.
pub fn primary_matrix(ring: &FusionRing, n: usize) -> Result<SparseSymmetric, CriteriaError> {
    let ctx = RingContext::new(ring)?;
    tensor_matrix(&ctx.local_terms(&ctx.full_set())?, n, DEFAULT_ROW_CAP)
}

/// PSD verdict of `T_n`. A Fails verdict means the ring admits no unitary categorification.
pub fn primary_criterion(ring: &FusionRing, n: usize, policy: &PsdPolicy) -> Result<CriterionVerdict, CriteriaError> {
    let ctx = RingContext::new(ring)?;
    primary_with(&ctx, n, policy)
}

pub fn primary_with(ctx: &RingContext, n: usize, policy: &PsdPolicy) -> Result<CriterionVerdict, CriteriaError> {
    localized_with(ctx, &ctx.full_set(), n, policy)
}

/// PSD verdict of `T_n^S = Σ_i d_i² (M_i^S/d_i)^{⊗n}`; `s` holds 0-based indices.
pub fn localized_criterion(
    ring: &FusionRing,
    s: &[usize],
    n: usize,
    policy: &PsdPolicy,
) -> Result<CriterionVerdict, CriteriaError> {
    let ctx = RingContext::new(ring)?;
    localized_with(&ctx, s, n, policy)
}

pub fn localized_with(
    ctx: &RingContext,
    s: &[usize],
    n: usize,
    policy: &PsdPolicy,
) -> Result<CriterionVerdict, CriteriaError> {
    tensor_verdict(&ctx.local_terms(s)?, n, policy, DEFAULT_ROW_CAP)
}

/// All triple sums `Σ_i λ_{i,j1} λ_{i,j2} λ_{i,j3} / d_i`, indexed `[j1][j2][j3]`.
pub fn schur_sums(ring: &FusionRing) -> Result<Vec<f64>, CriteriaError> {
    let table = fusion::character_table(ring)?;
    Ok(triple_sums(&table.values).0)
}

fn triple_sums(values: &[Vec<Complex64>]) -> (Vec<f64>, f64) {
    let r = values.len();
    let mut sums = Vec::with_capacity(r * r * r);
    let mut max_im = 0.0f64;
    for j1 in 0..r {
        for j2 in 0..r {
            for j3 in 0..r {
                let s: Complex64 =
                    (0..r).map(|i| values[i][j1] * values[i][j2] * values[i][j3] / values[i][0]).sum();
                max_im = max_im.max(s.im.abs());
                sums.push(s.re);
            }
        }
    }
    (sums, max_im)
}

/// Schur product criterion over the character table; the witness is the minimizing index triple.
pub fn schur_criterion(ring: &FusionRing, policy: &PsdPolicy) -> Result<CriterionVerdict, CriteriaError> {
    let table = fusion::character_table(ring)?;
    let r = ring.rank();
    let (sums, max_im) = triple_sums(&table.values);
    let (argmin, min) = sums
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let max_abs = sums.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = 1.0 + max_abs;
    let mut margin = min / scale;
    let mut lambda_min = min;
    let mut status = crate::linalg::classify_margin(margin, policy);
    let mut precision = Precision::Double;
    let mut note = (max_im > 1e-9 * scale).then(|| format!("triple sums have imaginary parts up to {max_im:.3e}"));
    if margin.abs() <= policy.inconclusive_band {
        match fusion::character_table_extended(ring, &table) {
            Some(ext) => {
                let mut best = f64::INFINITY;
                for j1 in 0..r {
                    for j2 in 0..r {
                        for j3 in 0..r {
                            let mut acc = TwoFloat::from(0.0);
                            for i in 0..r {
                                let p = ext[i][j1] * ext[i][j2] * ext[i][j3];
                                let d = ext[i][0].re;
                                acc += p.re.adiv(d);
                            }
                            best = best.min(acc.hi() + acc.lo());
                        }
                    }
                }
                lambda_min = best;
                margin = best / scale;
                status = crate::linalg::classify_margin_extended(margin, policy);
                precision = Precision::Extended;
            }
            None => {
                note = Some("extended character table unavailable; double-precision verdict".into());
            }
        }
    }
    let witness = if status == VerdictStatus::Fails {
        Witness::Triple { indices: [argmin / (r * r), (argmin / r) % r, argmin % r], value: min }
    } else {
        Witness::None
    };
    Ok(CriterionVerdict {
        status,
        lambda_min,
        margin,
        spectral_norm: max_abs,
        dim: r * r * r,
        precision,
        witness,
        note,
    })
}
