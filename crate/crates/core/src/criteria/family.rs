//! The rank-4 family `R_{4,k}`, its testing function, and the partial-data inequality.

use super::CriteriaError;
use crate::fusion::{r4k, FusionRing};
use serde::{Deserialize, Serialize};

/// `R_{4,k}` for `k >= 3`.
pub fn r4k_family(k: i64) -> Result<FusionRing, CriteriaError> {
    if k < 3 {
        return Err(CriteriaError::InvalidArgument(format!("R_{{4,k}} requires k >= 3, got {k}")));
    }
    if k > 1 << 20 {
        return Err(CriteriaError::InvalidArgument(format!("k = {k} is too large")));
    }
    Ok(r4k(k))
}

/// Checks `f(x) = x³ − k³x² + (k⁴ − 1)x + k³` is negative on `[√(k²+k+1), k+1]`
/// via `f(√(k²+k+1)) < 0` and `f' < 0` at both endpoints (`f'` is convex).
/// Exact integer arithmetic; returns `false` when it cannot certify.
pub fn testing_function_check(k: i64) -> bool {
    if !(3..=1 << 12).contains(&k) {
        return false;
    }
    let k = i128::from(k);
    let q = k * k + k + 1;
    let k3 = k * k * k;
    let k4 = k3 * k;
    // f(√q) = √q (q + k⁴ − 1) − k³ (q − 1)
    let a = q + k4 - 1;
    let b = k3 * (q - 1);
    let f_neg = a > 0 && b > 0 && lt_sqrt_scaled(q, a, b);
    // f'(√q) = 3q + k⁴ − 1 − 2k³√q
    let c = 3 * q + k4 - 1;
    let fp_left = c < 0 || lt_scaled_sqrt(c, 2 * k3, q);
    // f'(k+1)
    let x = k + 1;
    let fp_right = 3 * x * x - 2 * k3 * x + k4 - 1 < 0;
    f_neg && fp_left && fp_right
}

/// `a < b · √q` for `a, b > 0`, decided by squaring.
fn lt_scaled_sqrt(a: i128, b: i128, q: i128) -> bool {
    match (a.checked_mul(a), b.checked_mul(b).and_then(|bb| bb.checked_mul(q))) {
        (Some(lhs), Some(rhs)) => lhs < rhs,
        _ => false,
    }
}

/// `√q · a < b` for `a, b > 0`, decided by squaring.
fn lt_sqrt_scaled(q: i128, a: i128, b: i128) -> bool {
    match (a.checked_mul(a).and_then(|aa| aa.checked_mul(q)), b.checked_mul(b)) {
        (Some(lhs), Some(rhs)) => lhs < rhs,
        _ => false,
    }
}

/// Partial fusion data `x₂x₂ = 1 + s x₂ + ℓ x₃`, `x₂x₃ = t x₂ + k x₃` (plus
/// dimensions), searched up to `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialData {
    pub s: f64,
    pub l: f64,
    pub t: f64,
    pub k: f64,
    pub d2: f64,
    pub d3: f64,
    pub n_max: u32,
}

impl PartialData {
    pub fn validate(&self) -> Result<(), CriteriaError> {
        for (name, v) in [("s", self.s), ("l", self.l), ("t", self.t), ("k", self.k)] {
            if !v.is_finite() || v < 0.0 {
                return Err(CriteriaError::InvalidArgument(format!("{name} must be a nonnegative real, got {v}")));
            }
        }
        for (name, v) in [("d2", self.d2), ("d3", self.d3)] {
            if !v.is_finite() || v < 1.0 {
                return Err(CriteriaError::InvalidArgument(format!("{name} must be at least 1, got {v}")));
            }
        }
        if self.n_max < 2 {
            return Err(CriteriaError::InvalidArgument("n_max must be at least 2".into()));
        }
        Ok(())
    }
}

/// First `(n, a, b)` in lexicographic order with `a + b = n`, `a, b >= 1` where
/// `(sᵃtᵇ/d₂ⁿ⁻² + ℓᵃkᵇ/d₃ⁿ⁻² + 1)(sᵇtᵃ/d₂ⁿ⁻² + ℓᵇkᵃ/d₃ⁿ⁻² + 1) < (ℓⁿ/d₂ⁿ⁻² + tⁿ/d₃ⁿ⁻²)²`.
pub fn partial_data_criterion(pd: &PartialData) -> Option<(u32, u32, u32)> {
    let p = |x: f64, e: u32| x.powi(e as i32);
    for n in 2..=pd.n_max {
        let e2 = p(pd.d2, n - 2);
        let e3 = p(pd.d3, n - 2);
        let rhs = p(pd.l, n) / e2 + p(pd.t, n) / e3;
        let rhs = rhs * rhs;
        for a in 1..n {
            let b = n - a;
            let left = p(pd.s, a) * p(pd.t, b) / e2 + p(pd.l, a) * p(pd.k, b) / e3 + 1.0;
            let right = p(pd.s, b) * p(pd.t, a) / e2 + p(pd.l, b) * p(pd.k, a) / e3 + 1.0;
            if left * right < rhs {
                return Some((n, a, b));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(k: f64, x: f64) -> f64 {
        x.powi(3) - k.powi(3) * x * x + (k.powi(4) - 1.0) * x + k.powi(3)
    }

    #[test]
    fn family_bounds() {
        assert!(r4k_family(2).is_err());
        let r = r4k_family(3).unwrap();
        assert_eq!(
            r.fusion_matrix(3),
            nalgebra::DMatrix::from_row_slice(4, 4, &[0., 0., 0., 1., 0., 1., 1., 3., 0., 1., 0., 3., 1., 3., 3., 1.])
        );
        assert!(r4k_family(5).unwrap().validate().violations.is_empty());
    }

    #[test]
    fn testing_function_matches_sampling() {
        assert!(!testing_function_check(3));
        for k in 5..=40 {
            assert!(testing_function_check(k), "k = {k}");
            let kf = k as f64;
            let lo = (kf * kf + kf + 1.0).sqrt();
            let hi = kf + 1.0;
            for step in 0..=200 {
                let x = lo + (hi - lo) * step as f64 / 200.0;
                assert!(f(kf, x) < 0.0, "k = {k}, x = {x}");
            }
        }
    }

    #[test]
    fn partial_data_examples() {
        let base = PartialData { s: 1.0, l: 0.0, t: 0.0, k: 1.0, d2: 2.0, d3: 2.0, n_max: 8 };
        assert_eq!(partial_data_criterion(&base), None);
        let pd = PartialData { s: 0.0, l: 3.0, t: 3.0, k: 0.0, d2: 3.0, d3: 3.0, n_max: 2 };
        assert_eq!(partial_data_criterion(&pd), Some((2, 1, 1)));
        let ones = PartialData { s: 1.0, l: 1.0, t: 1.0, k: 1.0, d2: 2.0, d3: 2.0, n_max: 8 };
        assert_eq!(partial_data_criterion(&ones), None);
        assert!(PartialData { d2: 0.5, ..ones }.validate().is_err());
        assert!(ones.validate().is_ok());
    }
}
