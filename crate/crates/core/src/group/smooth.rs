//! Smooth supports and smooth entropies.

use super::{GroupError, GroupFunction, SUPPORT_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// `S_ε^p(f) = S(f) − max Σ u_g` subject to `u ∈ [0,1]`, `Σ u_g^p |f_g|^p ≤ ε^p ‖f‖_p^p`
/// (for `p = ∞`: `u_g |f_g| ≤ ε ‖f‖_∞`). On `Z_n` every cutoff `H` is a function, so this is exact.
pub fn smooth_support(f: &GroupFunction, eps: f64, p: f64) -> Result<f64, GroupError> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(GroupError::Domain(format!("ε must lie in [0, 1], got {eps}")));
    }
    if !(p >= 1.0) {
        return Err(GroupError::Domain(format!("p must be at least 1, got {p}")));
    }
    let mags: Vec<f64> = f.values.iter().map(|z| z.norm()).filter(|&m| m > SUPPORT_TOL).collect();
    let s = mags.len() as f64;
    if mags.is_empty() || eps == 0.0 {
        return Ok(s);
    }
    let removed = if p.is_infinite() {
        let cap = eps * mags.iter().copied().fold(0.0, f64::max);
        mags.iter().map(|&m| (cap / m).min(1.0)).sum()
    } else {
        let mut a: Vec<f64> = mags.iter().map(|m| m.powf(p)).collect();
        a.sort_by(f64::total_cmp);
        let budget = eps.powf(p) * a.iter().sum::<f64>();
        if p == 1.0 {
            knapsack(&a, budget)
        } else {
            water_fill(&a, budget, p)
        }
    };
    Ok((s - removed).max(0.0))
}

/// Greedy fractional knapsack over ascending weights.
fn knapsack(a: &[f64], mut budget: f64) -> f64 {
    let mut total = 0.0;
    for &w in a {
        if w <= budget {
            budget -= w;
            total += 1.0;
        } else {
            total += budget / w;
            break;
        }
    }
    total
}

/// Maximizes `Σ u` with `Σ u^p a ≤ B`; optimum is `u_g = min(1, (t / a_g)^{1/(p−1)})`.
/// For `p = 2` the level `t` is solved in closed form per saturation count.
fn water_fill(a: &[f64], budget: f64, p: f64) -> f64 {
    let total: f64 = a.iter().sum();
    if budget >= total {
        return a.len() as f64;
    }
    if p == 2.0 {
        // k smallest saturate: c² = (B − A_k) / Σ_{g ≥ k} 1/a_g with a_{k−1} ≤ c ≤ a_k.
        let mut prefix = 0.0;
        for k in 0..a.len() {
            let inv: f64 = a[k..].iter().map(|w| 1.0 / w).sum();
            let c = ((budget - prefix) / inv).max(0.0).sqrt();
            let lower_ok = k == 0 || a[k - 1] <= c * (1.0 + 1e-12);
            if lower_ok && c <= a[k] {
                return k as f64 + a[k..].iter().map(|w| c / w).sum::<f64>();
            }
            prefix += a[k];
            if prefix > budget {
                break;
            }
        }
    }
    let e = 1.0 / (p - 1.0);
    let used = |t: f64| a.iter().map(|&w| (t / w).powf(e).min(1.0).powf(p) * w).sum::<f64>();
    let (mut lo, mut hi) = (0.0f64, a[a.len() - 1]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if used(mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    a.iter().map(|&w| (lo / w).powf(e).min(1.0)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothEntropy {
    /// Value at a feasible point, so an upper bound on the infimum.
    pub upper: f64,
    /// Certified lower bound from an exhaustive cell grid (orders `n ≤ 3` only).
    pub grid_lower: Option<f64>,
}

const GRID_STEP: f64 = 0.05;

/// `−t log t` applied to `r²`.
fn h_sq(r: f64) -> f64 {
    let t = r * r;
    if t > 0.0 {
        -t * t.ln()
    } else {
        0.0
    }
}

fn p_norm(d: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        d.iter().map(|v| v.abs()).fold(0.0, f64::max)
    } else {
        d.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `H_ε^p(|f|²) = inf { H(|y|²) : ‖f − y‖_p ≤ ε }`. Aligning phases with `f` is optimal,
/// so the search runs over magnitudes `r ≥ 0` with `‖|f| − r‖_p ≤ ε`.
pub fn smooth_entropy(f: &GroupFunction, eps: f64, p: f64) -> Result<SmoothEntropy, GroupError> {
    if !(eps >= 0.0) || !(p >= 1.0) {
        return Err(GroupError::Domain(format!("need ε ≥ 0 and p ≥ 1, got ε = {eps}, p = {p}")));
    }
    let base: Vec<f64> = f.values.iter().map(|z| z.norm()).collect();
    let objective = |r: &[f64]| r.iter().map(|&v| h_sq(v)).sum::<f64>();
    let n = base.len();
    // Pulls `r` back into the ball around `base` and the nonnegative orthant.
    let project = |r: &mut Vec<f64>| {
        let mut d: Vec<f64> = r.iter().zip(&base).map(|(x, b)| x - b).collect();
        let dn = p_norm(&d, p);
        if dn > eps {
            let s = if dn > 0.0 { eps / dn } else { 0.0 };
            d.iter_mut().for_each(|v| *v *= s * (1.0 - 1e-15));
        }
        for (x, (b, dv)) in r.iter_mut().zip(base.iter().zip(&d)) {
            *x = (b + dv).max(0.0);
        }
    };

    let mut candidates: Vec<Vec<f64>> = vec![base.clone()];
    for scale in [-1.0, 1.0] {
        let bn = p_norm(&base, p);
        if bn > 0.0 {
            candidates.push(base.iter().map(|b| (b * (1.0 + scale * eps / bn)).max(0.0)).collect());
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| base[x].total_cmp(&base[y]));
    for k in 1..=n {
        let mut r = base.clone();
        order[..k].iter().for_each(|&g| r[g] = 0.0);
        let d: Vec<f64> = r.iter().zip(&base).map(|(x, b)| x - b).collect();
        if p_norm(&d, p) <= eps {
            candidates.push(r);
        }
    }
    for k in 0..n {
        let mut r = base.clone();
        r[k] += eps;
        candidates.push(r);
    }
    let mut best = base.clone();
    let mut best_val = objective(&best);
    for mut c in candidates {
        project(&mut c);
        let v = objective(&c);
        if v < best_val {
            best_val = v;
            best = c;
        }
    }

    if eps > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0e27);
        let mut step = eps.max(1e-3);
        let mut fails = 0;
        for _ in 0..20_000 {
            let mut trial = best.clone();
            let g = rng.random_range(0..n);
            let h = rng.random_range(0..n);
            let s: f64 = rng.random_range(-1.0..1.0) * step;
            trial[g] += s;
            if h != g && rng.random_bool(0.5) {
                trial[h] -= s;
            }
            project(&mut trial);
            let v = objective(&trial);
            if v < best_val - 1e-15 {
                best_val = v;
                best = trial;
                fails = 0;
            } else {
                fails += 1;
                if fails > 200 {
                    step *= 0.5;
                    fails = 0;
                    if step < 1e-9 {
                        break;
                    }
                }
            }
        }
    }

    let grid_lower = (n <= 3).then(|| grid_lower_bound(&base, eps, p));
    Ok(SmoothEntropy { upper: best_val, grid_lower })
}

/// Minimum over grid cells meeting the feasible set of a cellwise lower bound of
/// the objective. `h(r²)` is concave in `r²`, so its minimum over an interval sits at an endpoint.
fn grid_lower_bound(base: &[f64], eps: f64, p: f64) -> f64 {
    let n = base.len();
    let counts: Vec<usize> = base.iter().map(|b| ((b + eps) / GRID_STEP).floor() as usize + 1).collect();
    let mut idx = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let lo: Vec<f64> = idx.iter().map(|&i| i as f64 * GRID_STEP).collect();
        let nearest: Vec<f64> =
            base.iter().zip(&lo).map(|(b, l)| b - b.clamp(*l, l + GRID_STEP)).collect();
        if p_norm(&nearest, p) <= eps {
            let bound: f64 = lo.iter().map(|&l| h_sq(l).min(h_sq(l + GRID_STEP))).sum();
            best = best.min(bound);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < counts[pos] {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::entropy;
    use super::*;

    fn brute_force(f: &[f64], eps: f64, p: f64) -> f64 {
        // H = diag(h1, h2) on a 2-point group, grid step 1e-3.
        let s = f.iter().filter(|v| v.abs() > 0.0).count() as f64;
        let norm = p_norm(f, p);
        let mut best = f64::INFINITY;
        for i in 0..=1000 {
            for j in 0..=1000 {
                let h = [i as f64 / 1000.0, j as f64 / 1000.0];
                let rest: Vec<f64> = f.iter().zip(&h).map(|(v, hv)| (1.0 - hv) * v).collect();
                if p_norm(&rest, p) <= eps * norm + 1e-12 {
                    let tr: f64 = h.iter().zip(f).filter(|(_, v)| v.abs() > 0.0).map(|(hv, _)| hv).sum();
                    best = best.min(tr);
                }
            }
        }
        assert!(best <= s);
        best
    }

    #[test]
    fn smooth_support_examples() {
        let f = GroupFunction::from_real(&[2.0, 1.0]);
        assert!((smooth_support(&f, 0.5, 2.0).unwrap() - 0.75).abs() < 1e-12);
        assert!((brute_force(&[2.0, 1.0], 0.5, 2.0) - 0.75).abs() < 2e-3);
        for p in [1.0, 2.0, f64::INFINITY] {
            assert_eq!(smooth_support(&f, 0.0, p).unwrap(), 2.0);
            assert!(smooth_support(&f, 1.0, p).unwrap().abs() < 1e-12);
        }
        assert!(smooth_support(&f, 1.5, 2.0).is_err());
    }

    #[test]
    fn smooth_support_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..6 {
            let f = [rng.random_range(0.05..2.0), rng.random_range(0.05..2.0)];
            for p in [1.0, 2.0, 3.0, f64::INFINITY] {
                for eps in [0.1, 0.4, 0.8] {
                    let exact = smooth_support(&GroupFunction::from_real(&f), eps, p).unwrap();
                    let brute = brute_force(&f, eps, p);
                    assert!(exact <= brute + 1e-6, "f={f:?} p={p} eps={eps}: {exact} > {brute}");
                    assert!(brute - exact < 5e-3, "f={f:?} p={p} eps={eps}: {exact} vs {brute}");
                }
            }
        }
    }

    #[test]
    fn smooth_support_monotone() {
        let f = GroupFunction::from_real(&[0.3, 1.0, 2.5, 0.0, 0.7]);
        for p in [1.0, 2.0, 1.5, f64::INFINITY] {
            let mut prev = f64::INFINITY;
            for k in 0..=20 {
                let v = smooth_support(&f, k as f64 / 20.0, p).unwrap();
                assert!(v <= prev + 1e-12);
                prev = v;
            }
            assert_eq!(smooth_support(&f, 0.0, p).unwrap(), 4.0);
        }
    }

    #[test]
    fn smooth_entropy_examples() {
        let f = GroupFunction::from_real(&[0.6, 0.8, 0.0]);
        let exact = entropy(&f.abs_sq()).unwrap();
        let e0 = smooth_entropy(&f, 0.0, 2.0).unwrap();
        assert!((e0.upper - exact).abs() < 1e-14);
        assert!(e0.grid_lower.unwrap() <= e0.upper + 1e-12);

        let point = GroupFunction::from_real(&[1.0, 0.0]);
        let s = smooth_entropy(&point, 0.1, 2.0).unwrap();
        let lower = s.grid_lower.unwrap();
        assert!(lower <= s.upper + 1e-12);
        assert!(s.upper <= 1e-12 && lower <= 1e-12);

        for p in [1.0, 2.0, f64::INFINITY] {
            let mut prev = f64::INFINITY;
            for eps in [0.0, 0.05, 0.1, 0.2, 0.3] {
                let v = smooth_entropy(&f, eps, p).unwrap();
                assert!(v.upper <= prev + 1e-9, "p={p} eps={eps}");
                assert!(v.grid_lower.unwrap() <= v.upper + 1e-12);
                prev = v.upper;
            }
        }
    }
}
