//! Seeded fuzzing of uncertainty and convolution inequalities on `Z_n`.

use super::{
    convolve, entropy, is_prime, qft, smooth_entropy, smooth_support, GroupError, GroupFunction,
};
use crate::criteria::task_seed;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

/// Slack threshold for a pass.
pub const SLACK_TOL: f64 = -1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteConfig {
    /// Dual pairs `(p, q)` with `1/p + 1/q = 1`.
    pub hausdorff_young: Vec<(f64, f64)>,
    /// Triples `(p, q, r)` in `[1, ∞]` with `1 + 1/r = 1/p + 1/q`.
    pub young: Vec<(f64, f64, f64)>,
    /// Triples in `(0, 1]` with `1 + 1/r = 1/p + 1/q`.
    pub reverse_young: Vec<(f64, f64, f64)>,
    /// `ε` and `η` values for smooth supports.
    pub smooth_eps: Vec<f64>,
    /// Exponents with an asserted smooth Donoho–Stark bound.
    pub smooth_p: Vec<f64>,
    /// Exponents whose smooth-support product is only measured.
    pub smooth_measured_p: Vec<f64>,
    /// Trials used for the smooth entropy measurement (orders `n ≤ 3`).
    pub smooth_entropy_trials: usize,
}

fn dual(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn young_r(p: f64, q: f64) -> Option<f64> {
    let s = recip(p) + recip(q) - 1.0;
    if s < -1e-15 {
        None
    } else if s.abs() <= 1e-15 {
        Some(f64::INFINITY)
    } else {
        Some(1.0 / s)
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let inf = f64::INFINITY;
        let ps = [1.0, 4.0 / 3.0, 2.0, 4.0, inf];
        let hausdorff_young = ps.iter().map(|&p| (p, dual(p))).collect();
        let mut young = Vec::new();
        for &p in &ps {
            for &q in &ps {
                if let Some(r) = young_r(p, q) {
                    young.push((p, q, r));
                }
            }
        }
        let small = [0.25, 0.5, 0.75, 1.0];
        let mut reverse_young = Vec::new();
        for &p in &small {
            for &q in &small {
                let s: f64 = 1.0 / p + 1.0 / q - 1.0;
                reverse_young.push((p, q, 1.0 / s));
            }
        }
        SuiteConfig {
            hausdorff_young,
            young,
            reverse_young,
            smooth_eps: vec![0.0, 0.1, 0.3],
            smooth_p: vec![1.0, 2.0],
            smooth_measured_p: vec![inf],
            smooth_entropy_trials: 20,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), GroupError> {
        for &(p, q) in &self.hausdorff_young {
            if !(p >= 1.0 && q >= 1.0) || (recip(p) + recip(q) - 1.0).abs() > 1e-12 {
                return Err(GroupError::InvalidGrid(format!("({p}, {q}) is not a dual pair")));
            }
        }
        for &(p, q, r) in &self.young {
            if !(p >= 1.0 && q >= 1.0 && r >= 1.0) || (1.0 + recip(r) - recip(p) - recip(q)).abs() > 1e-12 {
                return Err(GroupError::InvalidGrid(format!("({p}, {q}, {r}) violates 1 + 1/r = 1/p + 1/q")));
            }
        }
        for &(p, q, r) in &self.reverse_young {
            let inside = |v: f64| v > 0.0 && v <= 1.0;
            if !(inside(p) && inside(q) && inside(r)) || (1.0 + 1.0 / r - 1.0 / p - 1.0 / q).abs() > 1e-12 {
                return Err(GroupError::InvalidGrid(format!("({p}, {q}, {r}) is not a reverse Young triple")));
            }
        }
        for &e in &self.smooth_eps {
            if !(0.0..=1.0).contains(&e) {
                return Err(GroupError::InvalidGrid(format!("ε = {e} outside [0, 1]")));
            }
        }
        for &p in self.smooth_p.iter().chain(&self.smooth_measured_p) {
            if !(p >= 1.0) {
                return Err(GroupError::InvalidGrid(format!("smooth exponent {p} below 1")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    /// Asserted: slack must be ≥ −1e-9.
    Inequality,
    /// Asserted equality: slack is `−|deviation|`.
    Equality,
    /// Reported only.
    Measurement,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityEntry {
    pub name: String,
    pub parameters: String,
    pub kind: EntryKind,
    pub trials: usize,
    pub min_slack: f64,
    pub worst_digest: String,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub order: usize,
    pub trials: usize,
    pub seed: u64,
    pub prime_order: bool,
    pub entries: Vec<InequalityEntry>,
    /// Every asserted entry passes.
    pub passes: bool,
}

impl InequalityReport {
    pub fn failing(&self) -> Vec<&InequalityEntry> {
        self.entries.iter().filter(|e| e.kind != EntryKind::Measurement && !e.pass).collect()
    }

    pub fn entry(&self, name: &str, parameters: &str) -> Option<&InequalityEntry> {
        self.entries.iter().find(|e| e.name == name && e.parameters == parameters)
    }
}

pub(crate) fn exponent_label(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else if (p - p.round()).abs() < 1e-12 {
        format!("{}", p.round() as i64)
    } else {
        let s = format!("{p:.4}");
        s.trim_end_matches('0').to_string()
    }
}

struct Planned {
    name: &'static str,
    parameters: String,
    kind: EntryKind,
}

fn planned(cfg: &SuiteConfig, prime: bool) -> Vec<Planned> {
    let mut out = Vec::new();
    let mut push = |name, parameters: String, kind| out.push(Planned { name, parameters, kind });
    for &(p, q) in &cfg.hausdorff_young {
        push("hausdorff_young", format!("p={},q={}", exponent_label(p), exponent_label(q)), EntryKind::Inequality);
    }
    push("donoho_stark", String::new(), EntryKind::Inequality);
    push("hirschman_beckner", String::new(), EntryKind::Inequality);
    for (&p, kind) in cfg
        .smooth_p
        .iter()
        .map(|p| (p, EntryKind::Inequality))
        .chain(cfg.smooth_measured_p.iter().map(|p| (p, EntryKind::Measurement)))
    {
        for &e in &cfg.smooth_eps {
            for &h in &cfg.smooth_eps {
                if e + h <= 1.0 {
                    push("smooth_donoho_stark", format!("p={},eps={e},eta={h}", exponent_label(p)), kind);
                }
            }
        }
    }
    for &(p, q, r) in &cfg.young {
        push(
            "young",
            format!("p={},q={},r={}", exponent_label(p), exponent_label(q), exponent_label(r)),
            EntryKind::Inequality,
        );
    }
    push("young_one_norm_equality", String::new(), EntryKind::Equality);
    for &(p, q, r) in &cfg.reverse_young {
        push(
            "reverse_young",
            format!("p={},q={},r={}", exponent_label(p), exponent_label(q), exponent_label(r)),
            EntryKind::Inequality,
        );
    }
    push("schur_positivity", String::new(), EntryKind::Inequality);
    push("entropic_convolution", String::new(), EntryKind::Inequality);
    push("sum_set", String::new(), EntryKind::Inequality);
    if prime {
        push("tao", String::new(), EntryKind::Inequality);
    }
    out
}

/// Per-input slacks in the order of `planned`.
fn evaluate(x: &GroupFunction, y: &GroupFunction, cfg: &SuiteConfig, prime: bool) -> Vec<f64> {
    let n = x.order();
    let nf = n as f64;
    let delta = nf.sqrt();
    let mut out = Vec::new();
    let fx = qft(x);

    for &(p, q) in &cfg.hausdorff_young {
        let xn = x.normalized(p, 1.0);
        let bound = delta.powf(-(1.0 - 2.0 * recip(q)));
        out.push(bound - qft(&xn).norm(q));
    }
    out.push((x.support() * fx.support()) as f64 / nf - 1.0);
    let x2 = x.normalized(2.0, 1.0);
    let fx2 = qft(&x2);
    out.push(entropy(&x2.abs_sq()).expect("nonnegative") + entropy(&fx2.abs_sq()).expect("nonnegative") - nf.ln());

    for &p in cfg.smooth_p.iter().chain(&cfg.smooth_measured_p) {
        for &e in &cfg.smooth_eps {
            for &h in &cfg.smooth_eps {
                if e + h <= 1.0 {
                    let prod = smooth_support(x, e, p).expect("valid ε") * smooth_support(&fx, h, p).expect("valid η");
                    let bound = if p == 1.0 { nf * (1.0 - e) * (1.0 - h) } else { nf * (1.0 - e - h).powi(2) };
                    out.push((prod - bound) / nf);
                }
            }
        }
    }

    for &(p, q, r) in &cfg.young {
        let xn = x.normalized(p, 1.0);
        let yn = y.normalized(q, 1.0);
        out.push(1.0 / delta - convolve(&xn, &yn).expect("same order").norm(r));
    }
    let (xp, yp) = (x.abs(), y.abs());
    {
        let xn = xp.normalized(1.0, 1.0);
        let yn = yp.normalized(1.0, 1.0);
        let c = convolve(&xn, &yn).expect("same order");
        out.push(-(c.norm(1.0) - 1.0 / delta).abs());
    }
    for &(p, q, r) in &cfg.reverse_young {
        let xn = xp.normalized(p, 1.0);
        let yn = yp.normalized(q, 1.0);
        out.push(convolve(&xn, &yn).expect("same order").norm(r) - delta.powf(1.0 - 2.0 / r));
    }
    {
        let xn = xp.normalized(f64::INFINITY, 1.0);
        let yn = yp.normalized(f64::INFINITY, 1.0);
        let c = convolve(&xn, &yn).expect("same order");
        out.push(c.values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min));
    }
    {
        let xn = xp.normalized(1.0, delta);
        let yn = yp.normalized(1.0, delta);
        let c = convolve(&xn, &yn).expect("same order");
        let hx = entropy(&xn).expect("nonnegative");
        let hy = entropy(&yn).expect("nonnegative");
        let hc = entropy(&c.abs()).expect("nonnegative");
        out.push(hc - hx.max(hy));
    }
    {
        let c = convolve(&xp, &yp).expect("same order");
        out.push(c.support() as f64 - xp.support().max(yp.support()) as f64);
    }
    if prime {
        let xn = x.normalized(2.0, 1.0);
        out.push((xn.support() + qft(&xn).support()) as f64 - (nf + 1.0));
    }
    out
}

fn digest(x: &GroupFunction, y: &GroupFunction) -> String {
    let mut h = DefaultHasher::new();
    for z in x.values.iter().chain(&y.values) {
        z.re.to_bits().hash(&mut h);
        z.im.to_bits().hash(&mut h);
    }
    format!("{:016x}", h.finish())
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect()
}

/// Random input: full Gaussian, Gaussian on a random subset, or Gaussian on a coset of a subgroup.
fn random_input(rng: &mut ChaCha8Rng, n: usize, style: u64) -> GroupFunction {
    let mut v = gaussian(rng, n);
    match style % 3 {
        0 => {}
        1 => {
            let k = rng.random_range(1..=n);
            let mut idx: Vec<usize> = (0..n).collect();
            for i in 0..n {
                let j = rng.random_range(i..n);
                idx.swap(i, j);
            }
            idx[k..].iter().for_each(|&g| v[g] = Complex64::new(0.0, 0.0));
        }
        _ => {
            let divisors: Vec<usize> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
            let d = divisors[rng.random_range(0..divisors.len())];
            let step = n / d;
            let shift = rng.random_range(0..n);
            for (g, z) in v.iter_mut().enumerate() {
                if !(g + n - shift).is_multiple_of(step) {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
    GroupFunction::new(v)
}

fn structured_inputs(n: usize) -> Vec<GroupFunction> {
    let mut out = vec![GroupFunction::delta(n, 0), GroupFunction::constant(n, 1.0), GroupFunction::chirp(n)];
    if n > 1 {
        out.push(GroupFunction::delta(n, 1));
    }
    for d in (2..n).filter(|d| n.is_multiple_of(*d)) {
        out.push(GroupFunction::subgroup_indicator(n, d));
    }
    out
}

struct Worst {
    slack: f64,
    index: usize,
    digest: String,
}

fn merge(a: Vec<Worst>, b: Vec<Worst>) -> Vec<Worst> {
    a.into_iter().zip(b).map(|(x, y)| if (y.slack, y.index) < (x.slack, x.index) { y } else { x }).collect()
}

/// Runs every configured inequality on `trials` seeded random inputs plus structured
/// extremals (point masses, subgroup indicators, constants, a chirp).
pub fn inequality_suite(
    n: usize,
    trials: usize,
    seed: u64,
    cfg: &SuiteConfig,
) -> Result<InequalityReport, GroupError> {
    if n == 0 {
        return Err(GroupError::Domain("order must be positive".into()));
    }
    if trials == 0 {
        return Err(GroupError::Domain("trials must be at least 1".into()));
    }
    cfg.validate()?;
    let prime = is_prime(n);
    let plan = planned(cfg, prime);
    let structured = structured_inputs(n);
    let ns = structured.len();
    // Structured inputs pair each extremal with itself and with the point mass.
    let total = ns * 2 + trials;
    let worst = (0..total)
        .into_par_iter()
        .map(|i| {
            let (x, y) = if i < 2 * ns {
                let x = structured[i / 2].clone();
                let y = if i % 2 == 0 { x.clone() } else { GroupFunction::delta(n, 0) };
                (x, y)
            } else {
                let t = (i - 2 * ns) as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(task_seed(seed, t));
                let x = random_input(&mut rng, n, t);
                let y = random_input(&mut rng, n, t / 3);
                (x, y)
            };
            let d = digest(&x, &y);
            evaluate(&x, &y, cfg, prime)
                .into_iter()
                .map(|slack| Worst { slack: if slack.is_nan() { f64::NEG_INFINITY } else { slack }, index: i, digest: d.clone() })
                .collect::<Vec<_>>()
        })
        .reduce_with(merge)
        .expect("at least one input");

    let mut entries: Vec<InequalityEntry> = plan
        .into_iter()
        .zip(worst)
        .map(|(s, w)| InequalityEntry {
            name: s.name.to_string(),
            parameters: s.parameters,
            kind: s.kind,
            trials: total,
            min_slack: w.slack,
            worst_digest: if w.index < 2 * ns { format!("structured:{}:{}", w.index, w.digest) } else { w.digest },
            pass: w.slack >= SLACK_TOL,
            note: None,
        })
        .collect();
    for e in entries.iter_mut().filter(|e| e.kind == EntryKind::Measurement) {
        e.note = Some(format!("empirical minimum of normalized slack {:.6e}; no bound asserted", e.min_slack));
    }

    if n <= 3 && cfg.smooth_entropy_trials > 0 {
        entries.extend(smooth_hirschman_beckner(n, seed, cfg.smooth_entropy_trials));
    }

    let passes = entries.iter().all(|e| e.kind == EntryKind::Measurement || e.pass);
    Ok(InequalityReport { order: n, trials, seed, prime_order: prime, entries, passes })
}

/// Smooth Hirschman–Beckner: slack of certified lower bounds against `log n`,
/// reported with the fitted constant `C = max(−slack) / (ε + η)`.
fn smooth_hirschman_beckner(n: usize, seed: u64, trials: usize) -> Vec<InequalityEntry> {
    let mut out = Vec::new();
    for p in [1.0, 2.0, f64::INFINITY] {
        for (e, h) in [(0.1, 0.1), (0.1, 0.3), (0.3, 0.3)] {
            let mut worst = f64::INFINITY;
            let mut worst_digest = String::new();
            let mut fitted: f64 = 0.0;
            for t in 0..trials as u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(task_seed(seed ^ 0x5307_4e27, t));
                let x = GroupFunction::new(gaussian(&mut rng, n)).normalized(2.0, 1.0);
                let fx = qft(&x);
                let lx = smooth_entropy(&x, e, p).expect("valid").grid_lower.expect("small order");
                let lf = smooth_entropy(&fx, h, p).expect("valid").grid_lower.expect("small order");
                let slack = lx + lf - (n as f64).ln();
                fitted = fitted.max((-slack).max(0.0) / (e + h));
                if slack < worst {
                    worst = slack;
                    worst_digest = digest(&x, &fx);
                }
            }
            out.push(InequalityEntry {
                name: "smooth_hirschman_beckner".into(),
                parameters: format!("p={},eps={e},eta={h}", exponent_label(p)),
                kind: EntryKind::Measurement,
                trials,
                min_slack: worst,
                worst_digest,
                pass: true,
                note: Some(format!("fitted C = {fitted:.6}; slack ≥ −C(ε+η) holds with this C")),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_valid() {
        let cfg = SuiteConfig::default();
        cfg.validate().unwrap();
        assert!(cfg.young.contains(&(1.0, 1.0, 1.0)));
        assert!(cfg.young.iter().any(|&(p, q, r)| p == 2.0 && q == 2.0 && r.is_infinite()));
        let bad = SuiteConfig { hausdorff_young: vec![(2.0, 3.0)], ..SuiteConfig::default() };
        assert!(matches!(bad.validate(), Err(GroupError::InvalidGrid(_))));
    }

    #[test]
    fn structured_equalities() {
        for n in [5usize, 6, 8] {
            let d0 = GroupFunction::delta(n, 0);
            let ev = evaluate(&d0, &d0, &SuiteConfig::default(), is_prime(n));
            let plan = planned(&SuiteConfig::default(), is_prime(n));
            let get = |name: &str| ev[plan.iter().position(|s| s.name == name && s.parameters.is_empty()).unwrap()];
            assert_eq!(get("donoho_stark"), 0.0);
            assert!(get("hirschman_beckner").abs() < 1e-12);
            assert!(get("young_one_norm_equality").abs() < 1e-12);
        }
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = SuiteConfig::default();
        let a = serde_json::to_string(&inequality_suite(7, 40, 1, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&inequality_suite(7, 40, 1, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn attainable_entries_pass() {
        let cfg = SuiteConfig::default();
        for n in [4usize, 6, 7, 9] {
            let r = inequality_suite(n, 60, 9, &cfg).unwrap();
            for e in r.failing() {
                assert!(
                    e.name == "hausdorff_young" && (e.parameters.starts_with("p=4") || e.parameters.starts_with("p=inf")),
                    "n={n}: {e:?}"
                );
            }
            assert!(r.entry("tao", "").is_some() == is_prime(n));
        }
    }

    #[test]
    fn smooth_entropy_measurement_small_orders() {
        let r = inequality_suite(2, 5, 3, &SuiteConfig { smooth_entropy_trials: 3, ..SuiteConfig::default() }).unwrap();
        assert!(r.entries.iter().any(|e| e.name == "smooth_hirschman_beckner"));
    }
}
