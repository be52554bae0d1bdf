//! Functions on the cyclic group `Z_n` with the counting trace and `δ = √n`:
//! Fourier transform, convolution, norms, supports, entropies.

mod smooth;
mod suite;

pub use smooth::{smooth_entropy, smooth_support, SmoothEntropy};
pub use suite::{inequality_suite, EntryKind, InequalityEntry, InequalityReport, SuiteConfig};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Threshold below which a value counts as zero for supports.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GroupError {
    #[error("ORDER_MISMATCH: orders {0} and {1} differ")]
    OrderMismatch(usize, usize),
    #[error("DOMAIN: {0}")]
    Domain(String),
    #[error("INVALID_GRID: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFunction {
    pub values: Vec<Complex64>,
}

impl GroupFunction {
    pub fn new(values: Vec<Complex64>) -> Self {
        assert!(!values.is_empty(), "order must be positive");
        GroupFunction { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Point mass at `a`.
    pub fn delta(n: usize, a: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[a % n] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    /// Indicator of the subgroup of order `d` (multiples of `n / d`).
    pub fn subgroup_indicator(n: usize, d: usize) -> Self {
        assert!(d > 0 && n.is_multiple_of(d), "subgroup order must divide n");
        let step = n / d;
        Self::from_real(&(0..n).map(|g| f64::from(u8::from(g % step == 0))).collect::<Vec<_>>())
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::from_real(&vec![c; n])
    }

    /// `e^{iπ j² / n}`.
    pub fn chirp(n: usize) -> Self {
        Self::new(
            (0..n)
                .map(|j| {
                    let t = ((j * j) % (2 * n)) as f64;
                    Complex64::from_polar(1.0, std::f64::consts::PI * t / n as f64)
                })
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn delta_index(&self) -> f64 {
        (self.order() as f64).sqrt()
    }

    /// `(Σ |f|^p)^{1/p}` for `p > 0`, `max |f|` for `p = ∞`.
    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        self.values.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }

    pub fn trace(&self) -> Complex64 {
        self.values.iter().sum()
    }

    /// `#{g : |f(g)| > 1e-12}`.
    pub fn support(&self) -> usize {
        self.values.iter().filter(|z| z.norm() > SUPPORT_TOL).count()
    }

    pub fn abs(&self) -> Self {
        Self::from_real(&self.values.iter().map(|z| z.norm()).collect::<Vec<_>>())
    }

    /// `|f|²` as a real function.
    pub fn abs_sq(&self) -> Self {
        Self::from_real(&self.values.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.values.iter().map(|z| z * s).collect())
    }

    /// Rescaled so that `‖f‖_p = target`.
    pub fn normalized(&self, p: f64, target: f64) -> Self {
        let nrm = self.norm(p);
        if nrm == 0.0 {
            self.clone()
        } else {
            self.scaled(target / nrm)
        }
    }

    fn real_nonnegative(&self) -> Result<Vec<f64>, GroupError> {
        self.values
            .iter()
            .enumerate()
            .map(|(g, z)| {
                if z.im.abs() > SUPPORT_TOL || z.re < -SUPPORT_TOL {
                    Err(GroupError::Domain(format!("value at {g} is not nonnegative: {z}")))
                } else {
                    Ok(z.re.max(0.0))
                }
            })
            .collect()
    }

    /// `tr(f^p)` for a nonnegative function, over its support.
    pub fn trace_power(&self, p: f64) -> Result<f64, GroupError> {
        Ok(self.real_nonnegative()?.iter().filter(|&&v| v > 0.0).map(|v| v.powf(p)).sum())
    }
}

fn twiddles(n: usize, sign: f64) -> Vec<Complex64> {
    (0..n).map(|m| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * m as f64 / n as f64)).collect()
}

fn transform(f: &GroupFunction, sign: f64) -> GroupFunction {
    let n = f.order();
    let w = twiddles(n, sign);
    let s = 1.0 / (n as f64).sqrt();
    GroupFunction::new(
        (0..n)
            .map(|k| f.values.iter().enumerate().map(|(j, v)| v * w[(j * k) % n]).sum::<Complex64>() * s)
            .collect(),
    )
}

/// `f̂(k) = n^{-1/2} Σ_j f(j) e^{2πijk/n}`.
pub fn qft(f: &GroupFunction) -> GroupFunction {
    transform(f, 1.0)
}

/// Inverse transform (conjugate kernel).
pub fn iqft(f: &GroupFunction) -> GroupFunction {
    transform(f, -1.0)
}

/// `x ∗ y = F⁻¹(F(y) F(x)) = n^{-1/2} Σ_h x(h) y(g − h)`.
pub fn convolve(x: &GroupFunction, y: &GroupFunction) -> Result<GroupFunction, GroupError> {
    let n = x.order();
    if y.order() != n {
        return Err(GroupError::OrderMismatch(n, y.order()));
    }
    let s = 1.0 / (n as f64).sqrt();
    Ok(GroupFunction::new(
        (0..n).map(|g| (0..n).map(|h| x.values[h] * y.values[(g + n - h) % n]).sum::<Complex64>() * s).collect(),
    ))
}

/// `H(f) = −Σ f log f` over the support of a nonnegative `f`.
pub fn entropy(f: &GroupFunction) -> Result<f64, GroupError> {
    Ok(f.real_nonnegative()?.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum())
}

/// `−d/dp tr(f^p)` at `p = 1` by a centered difference with step `1e-5`.
pub fn entropy_finite_difference(f: &GroupFunction) -> Result<f64, GroupError> {
    let h = 1e-5;
    Ok(-(f.trace_power(1.0 + h)? - f.trace_power(1.0 - h)?) / (2.0 * h))
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &GroupFunction, b: &GroupFunction, tol: f64) -> bool {
        a.values.iter().zip(&b.values).all(|(x, y)| (x - y).norm() <= tol)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transform_examples() {
        let d = qft(&GroupFunction::delta(4, 0));
        assert!(close(&d, &GroupFunction::constant(4, 0.5), 1e-15));
        for n in [3, 7, 12] {
            let one = qft(&GroupFunction::constant(n, 1.0));
            assert!(close(&one, &GroupFunction::delta(n, 0).scaled((n as f64).sqrt()), 1e-12));
        }
        // sign convention: δ₁ ↦ e^{+2πik/n}/√n
        let e = qft(&GroupFunction::delta(4, 1));
        assert!((e.values[1] - c(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn subgroup_indicator_transform() {
        let f = GroupFunction::subgroup_indicator(6, 3);
        assert_eq!(f.support(), 3);
        assert_eq!(qft(&f).support(), 2);
    }

    #[test]
    fn convolution_examples() {
        let n = 5;
        let conv = convolve(&GroupFunction::delta(n, 2), &GroupFunction::delta(n, 4)).unwrap();
        assert!(close(&conv, &GroupFunction::delta(n, 1).scaled(1.0 / (n as f64).sqrt()), 1e-15));
        assert!(convolve(&GroupFunction::delta(3, 0), &GroupFunction::delta(4, 0)).is_err());
    }

    #[test]
    fn entropy_examples() {
        for n in [2usize, 5, 9] {
            let delta = (n as f64).sqrt();
            let f = GroupFunction::delta(n, 0).scaled(delta);
            assert!((entropy(&f).unwrap() + delta * delta.ln()).abs() < 1e-12);
            let u = GroupFunction::constant(n, 1.0 / delta);
            assert!((entropy(&u).unwrap() - delta / 2.0 * (n as f64).ln()).abs() < 1e-12);
        }
        assert_eq!(entropy(&GroupFunction::delta(3, 0).abs_sq()).unwrap(), 0.0);
        assert!(entropy(&GroupFunction::from_real(&[1.0, -0.5])).is_err());
    }

    #[test]
    fn norms_and_primes() {
        let f = GroupFunction::from_real(&[3.0, -4.0]);
        assert_eq!(f.norm(2.0), 5.0);
        assert_eq!(f.norm(f64::INFINITY), 4.0);
        assert_eq!(f.norm(1.0), 7.0);
        assert!((f.norm(0.5) - (3f64.sqrt() + 2.0).powi(2)).abs() < 1e-12);
        let primes: Vec<usize> = (0..20).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn sumset_exhaustive_small_orders() {
        for n in 1..=8usize {
            for a in 1u32..(1 << n) {
                for b in 1u32..(1 << n) {
                    let x = GroupFunction::from_real(&(0..n).map(|g| f64::from((a >> g) & 1)).collect::<Vec<_>>());
                    let y = GroupFunction::from_real(&(0..n).map(|g| f64::from((b >> g) & 1)).collect::<Vec<_>>());
                    let s = convolve(&x, &y).unwrap().support();
                    assert!(s >= x.support().max(y.support()), "n={n} a={a:b} b={b:b}");
                }
            }
        }
    }

    fn complex_vec(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b)), n)
    }

    fn sized() -> impl Strategy<Value = (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> {
        (1usize..=64).prop_flat_map(|n| (complex_vec(n), complex_vec(n), complex_vec(n)))
    }

    proptest! {
        #[test]
        fn qft_is_isometric_with_period_four((x, _, _) in sized()) {
            let f = GroupFunction::new(x);
            let h = qft(&f);
            prop_assert!((h.norm(2.0) - f.norm(2.0)).abs() <= 1e-10);
            let f4 = qft(&qft(&qft(&h)));
            prop_assert!(close(&f4, &f, 1e-10));
            prop_assert!(close(&iqft(&h), &f, 1e-10));
        }

        #[test]
        fn convolution_laws((x, y, z) in sized()) {
            let (x, y, z) = (GroupFunction::new(x), GroupFunction::new(y), GroupFunction::new(z));
            let xy = convolve(&x, &y).unwrap();
            prop_assert!(close(&xy, &convolve(&y, &x).unwrap(), 1e-10));
            let left = convolve(&xy, &z).unwrap();
            let right = convolve(&x, &convolve(&y, &z).unwrap()).unwrap();
            prop_assert!(close(&left, &right, 1e-10));
            let dual = qft(&xy);
            let (fx, fy) = (qft(&x), qft(&y));
            let prod = GroupFunction::new(fx.values.iter().zip(&fy.values).map(|(a, b)| a * b).collect());
            prop_assert!(close(&dual, &prod, 1e-10));
        }

        #[test]
        fn positive_convolution((x, y, _) in sized()) {
            let (x, y) = (GroupFunction::new(x).abs(), GroupFunction::new(y).abs());
            let xy = convolve(&x, &y).unwrap();
            prop_assert!(xy.values.iter().all(|v| v.re >= 0.0 && v.im.abs() < 1e-15));
            let delta = x.delta_index();
            prop_assert!((xy.norm(1.0) - x.norm(1.0) * y.norm(1.0) / delta).abs() <= 1e-10 * (1.0 + xy.norm(1.0)));
        }

        #[test]
        fn entropy_matches_derivative((x, _, _) in sized()) {
            let f = GroupFunction::new(x).abs_sq();
            let h = entropy(&f).unwrap();
            let fd = entropy_finite_difference(&f).unwrap();
            prop_assert!((h - fd).abs() <= 1e-6 * h.abs().max(1.0));
        }
    }
}
