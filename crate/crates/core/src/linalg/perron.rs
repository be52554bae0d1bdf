//! Perron-Frobenius data of nonnegative matrices through the Frobenius normal form.

use super::{check_square, LinalgError};
use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

/// Perron-Frobenius eigendata of a nonnegative square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PfResult {
    /// Spectral radius `r`.
    pub radius: f64,
    /// Nonnegative right eigenvector, unit 2-norm: `A v = r v`.
    pub right: Vec<f64>,
    /// Nonnegative left eigenvector, unit 2-norm: `wᵀ A = r wᵀ`.
    pub left: Vec<f64>,
    pub irreducible: bool,
    /// `r` is an algebraically simple eigenvalue.
    pub simple: bool,
    /// Collatz-Wielandt bracket `lower <= r <= upper`.
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `max(‖Av - rv‖∞, ‖Aᵀw - rw‖∞)`.
    pub residual: f64,
}

fn check_nonneg(a: &DMatrix<f64>) -> Result<(), LinalgError> {
    check_square(a.nrows(), a.ncols())?;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            let v = a[(r, c)];
            if !v.is_finite() {
                return Err(LinalgError::NonFinite { row: r, col: c });
            }
            if v < 0.0 {
                return Err(LinalgError::NegativeEntry { row: r, col: c, value: v });
            }
        }
    }
    Ok(())
}

/// Strongly connected classes of the digraph `j -> k` iff `a_jk > 0`,
/// sinks first (reverse topological order). Indices inside a class are sorted.
pub fn strongly_connected_classes(a: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * 2);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for j in 0..n {
        for k in 0..n {
            if a[(j, k)] > 0.0 {
                g.add_edge(nodes[j], nodes[k], ());
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

/// `true` iff the digraph of `a` is strongly connected (a 1x1 matrix is irreducible).
pub fn is_irreducible(a: &DMatrix<f64>) -> Result<bool, LinalgError> {
    check_nonneg(a)?;
    Ok(strongly_connected_classes(a).len() == 1)
}

struct ClassPf {
    radius: f64,
    lower: f64,
    upper: f64,
    vector: Vec<f64>,
}

fn cw_bounds(b: &DMatrix<f64>, x: &DVector<f64>) -> (f64, f64) {
    let y = b * x;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..x.len() {
        let q = y[i] / x[i];
        lo = lo.min(q);
        hi = hi.max(q);
    }
    (lo.max(0.0), hi)
}

/// Perron data of an irreducible nonnegative block.
fn irreducible_pf(b: &DMatrix<f64>) -> ClassPf {
    let m = b.nrows();
    if m == 1 {
        let r = b[(0, 0)];
        return ClassPf { radius: r, lower: r, upper: r, vector: vec![1.0] };
    }
    let shifted = b + DMatrix::<f64>::identity(m, m);
    let mut x = DVector::from_element(m, 1.0 / (m as f64).sqrt());
    let (mut lo, mut hi) = cw_bounds(b, &x);
    for _ in 0..20_000 {
        let y = &shifted * &x;
        let norm = y.norm();
        x = y / norm;
        if x.iter().any(|&v| v <= 0.0) {
            continue;
        }
        let (l, h) = cw_bounds(b, &x);
        lo = l;
        hi = h;
        if h - l <= 1e-9 * h.max(1e-300) {
            break;
        }
    }
    // Inverse iteration just above the bracket; (μ - B)^{-1} is entrywise nonnegative there.
    for _ in 0..4 {
        let mu = hi * (1.0 + 1e-11) + 1e-300;
        let mat = DMatrix::<f64>::identity(m, m) * mu - b;
        let Some(y) = mat.lu().solve(&x) else { break };
        if !y.iter().all(|v| v.is_finite() && *v > 0.0) {
            break;
        }
        let cand = &y / y.norm();
        let (l, h) = cw_bounds(b, &cand);
        if h - l <= hi - lo {
            x = cand;
            lo = l;
            hi = h;
        } else {
            break;
        }
    }
    ClassPf { radius: 0.5 * (lo + hi), lower: lo, upper: hi, vector: x.iter().cloned().collect() }
}

struct Oriented {
    radius: f64,
    lower: f64,
    upper: f64,
    vector: Vec<f64>,
    max_classes: usize,
    classes: usize,
}

fn oriented_pf(a: &DMatrix<f64>) -> Oriented {
    let n = a.nrows();
    let classes = strongly_connected_classes(a);
    let nc = classes.len();
    let mut class_of = vec![0usize; n];
    for (ci, c) in classes.iter().enumerate() {
        for &v in c {
            class_of[v] = ci;
        }
    }
    let pfs: Vec<ClassPf> = classes
        .iter()
        .map(|c| irreducible_pf(&a.select_rows(c).select_columns(c)))
        .collect();
    let r = pfs.iter().map(|p| p.radius).fold(0.0, f64::max);
    let lower = pfs.iter().map(|p| p.lower).fold(0.0, f64::max);
    let upper = pfs.iter().map(|p| p.upper).fold(0.0, f64::max);
    let is_max: Vec<bool> = pfs
        .iter()
        .map(|p| if r == 0.0 { p.radius == 0.0 } else { p.radius >= r * (1.0 - 1e-8) })
        .collect();
    let max_classes = is_max.iter().filter(|&&b| b).count();

    // reaches[u][w]: class u has a path to class w.
    let mut succ = vec![Vec::new(); nc];
    for j in 0..n {
        for k in 0..n {
            if a[(j, k)] > 0.0 && class_of[j] != class_of[k] {
                succ[class_of[j]].push(class_of[k]);
            }
        }
    }
    let mut reaches = vec![vec![false; nc]; nc];
    // Tarjan order lists sinks first, so successors are finalized before predecessors.
    for u in 0..nc {
        reaches[u][u] = true;
        let s = succ[u].clone();
        for w in s {
            for t in 0..nc {
                if reaches[w][t] {
                    reaches[u][t] = true;
                }
            }
        }
    }
    let star = (0..nc)
        .find(|&c| is_max[c] && !(0..nc).any(|u| u != c && is_max[u] && reaches[u][c]))
        .expect("a maximal class without maximal ancestors exists");

    let mut v = vec![0.0; n];
    for (idx, &node) in classes[star].iter().enumerate() {
        v[node] = pfs[star].vector[idx];
    }
    for u in 0..nc {
        if u == star || !reaches[u][star] {
            continue;
        }
        let cu = &classes[u];
        let m = cu.len();
        let mut rhs = DVector::zeros(m);
        for (i, &row) in cu.iter().enumerate() {
            let mut s = 0.0;
            for k in 0..n {
                if class_of[k] != u {
                    s += a[(row, k)] * v[k];
                }
            }
            rhs[i] = s;
        }
        let block = a.select_rows(cu).select_columns(cu);
        let mat = DMatrix::<f64>::identity(m, m) * r - block;
        let sol = mat.lu().solve(&rhs).unwrap_or_else(|| DVector::zeros(m));
        for (i, &row) in cu.iter().enumerate() {
            v[row] = sol[i].max(0.0);
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Oriented { radius: r, lower, upper, vector: v, max_classes, classes: nc }
}

fn residual(a: &DMatrix<f64>, r: f64, v: &[f64]) -> f64 {
    let x = DVector::from_column_slice(v);
    let y = a * &x - x * r;
    y.amax()
}

/// Spectral radius, nonnegative left/right eigenvectors, irreducibility and
/// algebraic simplicity of a nonnegative matrix.
pub fn pf_eigen(a: &DMatrix<f64>) -> Result<PfResult, LinalgError> {
    check_nonneg(a)?;
    let right = oriented_pf(a);
    let at = a.transpose();
    let left = oriented_pf(&at);
    let r = right.radius;
    let simple = if r == 0.0 { a.nrows() == 1 } else { right.max_classes == 1 };
    let res = residual(a, r, &right.vector).max(residual(&at, r, &left.vector));
    Ok(PfResult {
        radius: r,
        right: right.vector,
        left: left.vector,
        irreducible: right.classes == 1,
        simple,
        lower_bound: right.lower,
        upper_bound: right.upper,
        residual: res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &DMatrix<f64>, r: f64, irreducible: bool, simple: bool) -> PfResult {
        let p = pf_eigen(a).unwrap();
        assert!((p.radius - r).abs() <= 1e-8 * (1.0 + r), "radius {} vs {}", p.radius, r);
        assert_eq!(p.irreducible, irreducible);
        assert_eq!(p.simple, simple);
        assert!(p.right.iter().all(|&x| x >= 0.0));
        assert!(p.left.iter().all(|&x| x >= 0.0));
        assert!(p.residual <= 1e-8 * (1.0 + r), "residual {}", p.residual);
        assert!(p.lower_bound <= p.radius + 1e-12 && p.radius <= p.upper_bound + 1e-12);
        p
    }

    #[test]
    fn swap_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let p = check(&a, 1.0, true, true);
        let s = 0.5f64.sqrt();
        assert!((p.right[0] - s).abs() < 1e-12 && (p.right[1] - s).abs() < 1e-12);
    }

    #[test]
    fn diagonal_is_reducible() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let p = check(&a, 2.0, false, true);
        assert!((p.right[0] - 1.0).abs() < 1e-12 && p.right[1].abs() < 1e-12);
    }

    #[test]
    fn fibonacci_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 1.0]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        check(&a, phi, true, true);
    }

    #[test]
    fn zero_matrix() {
        let a = DMatrix::<f64>::zeros(3, 3);
        check(&a, 0.0, false, false);
        check(&DMatrix::<f64>::zeros(1, 1), 0.0, true, true);
    }

    #[test]
    fn repeated_radius_not_simple() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.5]);
        let p = check(&a, 1.0, false, false);
        // Jordan block on {0, 1}: right vector e_0, left vector e_1.
        assert!((p.right[0] - 1.0).abs() < 1e-12 && p.right[1].abs() < 1e-12);
        assert!(p.left[0].abs() < 1e-12 && (p.left[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn upstream_component_solved() {
        // 0 -> 1, radius 3 on {1}, 1 on {0}: v = (1/2, 1) normalized.
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 3.0]);
        let p = check(&a, 3.0, false, true);
        assert!((p.right[0] / p.right[1] - 0.5).abs() < 1e-12);
        assert!(p.left[0].abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_entries() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(matches!(pf_eigen(&a), Err(LinalgError::NegativeEntry { .. })));
    }
}
