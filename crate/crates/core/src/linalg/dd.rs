//! Double-double helpers for the extended-precision route.

use num_complex::{Complex, Complex64};
use num_traits::{Float, Zero};
use twofloat::TwoFloat;

/// Double-double real scalar.
pub type Dd = TwoFloat;
/// Double-double complex scalar.
pub type ComplexDd = Complex<TwoFloat>;

pub fn c64_to_dd(z: Complex64) -> ComplexDd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

/// Division accurate to the working precision. `TwoFloat`'s own quotient is
/// only double-accurate, so one Newton correction is applied.
pub trait AccurateDiv: Float {
    fn adiv(self, rhs: Self) -> Self;
}

impl AccurateDiv for f64 {
    #[inline]
    fn adiv(self, rhs: Self) -> Self {
        self / rhs
    }
}

impl AccurateDiv for TwoFloat {
    #[inline]
    fn adiv(self, rhs: Self) -> Self {
        let q = self / rhs;
        let rem = self - q * rhs;
        q + rem / rhs
    }
}

/// Complex double-double quotient.
pub fn cdiv(a: ComplexDd, b: ComplexDd) -> ComplexDd {
    let den = b.re * b.re + b.im * b.im;
    let num = a * b.conj();
    Complex::new(num.re.adiv(den), num.im.adiv(den))
}

/// Scales a complex double-double by `1 / s`.
pub fn cunscale(a: ComplexDd, s: Dd) -> ComplexDd {
    Complex::new(a.re.adiv(s), a.im.adiv(s))
}

fn cabs(z: &ComplexDd) -> Dd {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Solves `A x = b` for a dense complex double-double system by Gaussian
/// elimination with partial pivoting. `a` is row-major `n x n`.
pub fn dd_solve(mut a: Vec<ComplexDd>, mut b: Vec<ComplexDd>) -> Option<Vec<ComplexDd>> {
    let n = b.len();
    if a.len() != n * n {
        return None;
    }
    for col in 0..n {
        let mut piv = col;
        let mut best = cabs(&a[col * n + col]);
        for r in col + 1..n {
            let v = cabs(&a[r * n + col]);
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == Dd::zero() {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = cdiv(a[r * n + col], p);
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = a[col * n + c];
                a[r * n + c] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = vec![ComplexDd::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s -= a[r * n + c] * x[c];
        }
        x[r] = cdiv(s, a[r * n + r]);
    }
    Some(x)
}

/// Modified Gram-Schmidt (two passes) on the columns of a row-major `n x n`
/// complex matrix. Returns `None` when the columns are numerically dependent.
pub fn gram_schmidt_dd(u: &[ComplexDd], n: usize) -> Option<Vec<ComplexDd>> {
    let mut cols: Vec<Vec<ComplexDd>> = (0..n).map(|c| (0..n).map(|r| u[r * n + c]).collect()).collect();
    for _pass in 0..2 {
        for c in 0..n {
            for prev in 0..c {
                let mut ip = ComplexDd::zero();
                for r in 0..n {
                    ip += cols[prev][r].conj() * cols[c][r];
                }
                for r in 0..n {
                    let t = cols[prev][r] * ip;
                    cols[c][r] -= t;
                }
            }
            let mut norm2 = Dd::zero();
            for r in 0..n {
                norm2 = norm2 + cols[c][r].re * cols[c][r].re + cols[c][r].im * cols[c][r].im;
            }
            if norm2 < TwoFloat::from(1e-20) {
                return None;
            }
            let norm = norm2.sqrt();
            for r in 0..n {
                cols[c][r] = cunscale(cols[c][r], norm);
            }
        }
    }
    let mut out = vec![ComplexDd::zero(); n * n];
    for c in 0..n {
        for r in 0..n {
            out[r * n + c] = cols[c][r];
        }
    }
    Some(out)
}
