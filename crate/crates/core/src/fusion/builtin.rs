//! Built-in rings.

use super::FusionRing;

fn from_matrices(name: &str, dual: Vec<usize>, mats: &[&[&[i64]]]) -> FusionRing {
    let n: Vec<Vec<Vec<i64>>> = mats.iter().map(|m| m.iter().map(|row| row.to_vec()).collect()).collect();
    FusionRing::new(name, dual, &n).expect("built-in ring is well formed")
}

/// Rank-one ring `{1}`.
pub fn trivial() -> FusionRing {
    FusionRing::new("trivial", vec![0], &[vec![vec![1]]]).expect("well formed")
}

/// Group ring of the cyclic group `Z_n`.
pub fn cyclic(n: usize) -> FusionRing {
    assert!(n >= 1, "order must be positive");
    let coeffs: Vec<Vec<Vec<i64>>> = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| i64::from((i + j) % n == k)).collect()).collect())
        .collect();
    let dual = (0..n).map(|i| (n - i) % n).collect();
    FusionRing::new(format!("Z{n}"), dual, &coeffs).expect("well formed")
}

/// Tensor product of two rings; basis `(a, b)` has index `a * rank(b) + b`.
pub fn product(a: &FusionRing, b: &FusionRing) -> FusionRing {
    let (ra, rb) = (a.rank(), b.rank());
    let r = ra * rb;
    let idx = |x: usize, y: usize| x * rb + y;
    let mut n = vec![vec![vec![0i64; r]; r]; r];
    for i1 in 0..ra {
        for i2 in 0..rb {
            for j1 in 0..ra {
                for j2 in 0..rb {
                    for k1 in 0..ra {
                        for k2 in 0..rb {
                            n[idx(i1, i2)][idx(j1, j2)][idx(k1, k2)] =
                                a.n(i1, j1, k1) as i64 * b.n(i2, j2, k2) as i64;
                        }
                    }
                }
            }
        }
    }
    let dual = (0..r).map(|x| idx(a.dual()[x / rb], b.dual()[x % rb])).collect();
    FusionRing::new(format!("{}x{}", a.name(), b.name()), dual, &n).expect("well formed")
}

/// Fibonacci ring: `τ² = 1 + τ`.
pub fn fibonacci() -> FusionRing {
    from_matrices("Fib", vec![0, 1], &[&[&[1, 0], &[0, 1]], &[&[0, 1], &[1, 1]]])
}

/// Rank-4 family `R_{4,k}`, `k >= 3`.
pub fn r4k(k: i64) -> FusionRing {
    let m1: &[&[i64]] = &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]];
    let m2: &[&[i64]] = &[&[0, 1, 0, 0], &[1, k, 0, 1], &[0, 0, k, 1], &[0, 1, 1, k]];
    let m3: &[&[i64]] = &[&[0, 0, 1, 0], &[0, 0, k, 1], &[1, k, 0, 0], &[0, 1, 0, k]];
    let m4: &[&[i64]] = &[&[0, 0, 0, 1], &[0, 1, 1, k], &[0, 1, 0, k], &[1, k, k, 1]];
    from_matrices(&format!("R4_{k}"), vec![0, 1, 2, 3], &[m1, m2, m3, m4])
}

/// Non-commutative rank-6 ring of type `[1, a, a, a, b, b]` with
/// `a = 7 + 2√13`, `b = 11 + 3√13`; `x_2` and `x_3` are dual to each other.
pub fn r6() -> FusionRing {
    let m1: &[&[i64]] = &[
        &[1, 0, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0, 0],
        &[0, 0, 1, 0, 0, 0],
        &[0, 0, 0, 1, 0, 0],
        &[0, 0, 0, 0, 1, 0],
        &[0, 0, 0, 0, 0, 1],
    ];
    let m2: &[&[i64]] = &[
        &[0, 1, 0, 0, 0, 0],
        &[1, 4, 2, 2, 2, 2],
        &[0, 2, 2, 1, 2, 4],
        &[0, 2, 1, 2, 4, 2],
        &[0, 2, 2, 4, 5, 4],
        &[0, 2, 4, 2, 4, 5],
    ];
    let m3: &[&[i64]] = &[
        &[0, 0, 1, 0, 0, 0],
        &[0, 2, 2, 1, 4, 2],
        &[0, 1, 3, 1, 3, 3],
        &[1, 2, 3, 3, 1, 3],
        &[0, 2, 3, 3, 5, 4],
        &[0, 4, 1, 3, 4, 5],
    ];
    let m4: &[&[i64]] = &[
        &[0, 0, 0, 1, 0, 0],
        &[0, 2, 1, 2, 2, 4],
        &[1, 2, 3, 3, 3, 1],
        &[0, 1, 1, 3, 3, 3],
        &[0, 4, 3, 1, 5, 4],
        &[0, 2, 3, 3, 4, 5],
    ];
    let m5: &[&[i64]] = &[
        &[0, 0, 0, 0, 1, 0],
        &[0, 2, 4, 2, 5, 4],
        &[0, 4, 1, 3, 5, 4],
        &[0, 2, 3, 3, 5, 4],
        &[1, 5, 5, 5, 5, 7],
        &[0, 4, 4, 4, 7, 7],
    ];
    let m6: &[&[i64]] = &[
        &[0, 0, 0, 0, 0, 1],
        &[0, 2, 2, 4, 4, 5],
        &[0, 2, 3, 3, 4, 5],
        &[0, 4, 3, 1, 4, 5],
        &[0, 4, 4, 4, 7, 7],
        &[1, 5, 5, 5, 7, 5],
    ];
    from_matrices("R6", vec![0, 1, 3, 2, 4, 5], &[m1, m2, m3, m4, m5, m6])
}
