//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qfourier-core --test acceptance`. The process exits
//! nonzero only when a criterion fails that is not listed in `KNOWN_FAILURES`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use qfourier_core::channel::{channel_irreducible, channel_pf, fixed_space, pf_space_structure_check};
use qfourier_core::criteria::{
    haar_unitary, localized_criterion, primary_criterion, primary_matrix, schur_sums, tensor_matrix,
    testing_function_check, RingContext, DEFAULT_ROW_CAP,
};
use qfourier_core::fusion::{self, r4k, FusionRing};
use qfourier_core::group::{entropy, inequality_suite, qft, GroupFunction, InequalityReport, SuiteConfig};
use qfourier_core::io::{self, corpus, graph_report, parse_graph_str, CriterionKind, RingFile, RunConfig, TaskStatus};
use qfourier_core::linalg::pf_eigen;
use qfourier_core::{CriterionVerdict, PsdPolicy, QuantumChannel, VerdictStatus, Witness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

/// Criteria that cannot hold as stated, with the reason printed next to the FAIL line.
const KNOWN_FAILURES: &[(u8, &str)] = &[(
    6,
    "Hausdorff-Young fails on Z_n for p in {4, inf}: the chirp e^{2 pi i k^2/n} has |f^|=1 everywhere",
)];

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.lines.push(format!("violated: {}", msg.into()));
        }
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.lines.push(msg.into());
    }
}

fn policy() -> PsdPolicy {
    PsdPolicy::default()
}

fn controls() -> Vec<FusionRing> {
    let mut rings: Vec<FusionRing> = (1..=8).map(|n| corpus::ring(&format!("z{n}.ring")).unwrap()).collect();
    rings.push(corpus::ring("fib.ring").unwrap());
    rings.push(corpus::ring("z2xz2.ring").unwrap());
    rings
}

fn r4k_exclusion() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    for k in 5..=12 {
        let v = localized_criterion(&r4k(k), &[1, 2], 3, &policy()).unwrap();
        o.check(v.fails() && v.lambda_min < -1e-6, format!("R4,{k} localized S={{2,3}}: {:?} {}", v.status, v.lambda_min));
        worst = worst.max(v.lambda_min);
        o.check(testing_function_check(k), format!("testing function false for k={k}"));
    }
    let secs = start.elapsed().as_secs_f64();
    o.check(secs < 1.0, format!("runtime {secs:.3}s"));
    o.note(format!("k=5..12 all Fail, largest lambda_min {worst:.4}, {secs:.3}s"));
    o
}

fn d5_obstruction() -> Outcome {
    let mut o = Outcome::new();
    let rep = graph_report(&parse_graph_str(corpus::D5_GRAPH).unwrap(), 1, &policy()).unwrap();
    let c = &rep.local_checks[0].check;
    let det = c.determinant.unwrap();
    o.check((det - (-1.0 - 2f64.sqrt())).abs() < 1e-9, format!("det {det}"));
    o.check(c.verdict.fails(), format!("verdict {:?}", c.verdict.status));
    o.note(format!("det(T_1^S) = {det:.12}, verdict {:?}", c.verdict.status));
    o
}

fn categorifiable_controls() -> Outcome {
    let mut o = Outcome::new();
    let files: Vec<RingFile> = controls().into_iter().map(RingFile::new).collect();
    let cfg = RunConfig {
        n_max: 4,
        criteria: vec![CriterionKind::Primary, CriterionKind::Localized, CriterionKind::Schur, CriterionKind::ReducedTwisted],
        ..RunConfig::default()
    };
    let rep = io::run_rings(&files, &cfg);
    let mut min_margin = f64::INFINITY;
    for r in &rep.records {
        o.check(
            matches!(r.status, TaskStatus::Passes | TaskStatus::Inconclusive),
            format!("{} {:?} {:?}: {:?} {:?}", r.target, r.criterion, r.parameters, r.status, r.error),
        );
        if let Some(m) = r.margin {
            o.check(m >= -1e-8, format!("{} {:?} {:?}: margin {m}", r.target, r.criterion, r.parameters));
            min_margin = min_margin.min(m);
        }
    }
    for f in &files {
        let ring = &f.ring;
        let rt = rep.records_for(ring.name()).filter(|r| r.criterion == CriterionKind::ReducedTwisted).count();
        o.check(rt == 4, format!("{}: {rt} reduced-twisted tasks", ring.name()));
        let schur = rep.records_for(ring.name()).any(|r| r.criterion == CriterionKind::Schur);
        o.check(schur == ring.is_commutative(), format!("{}: schur task presence", ring.name()));
    }
    let inconclusive = rep.totals.inconclusive;
    o.note(format!(
        "{} rings, {} tasks, {} fails, {inconclusive} inconclusive, smallest margin {min_margin:.3e}",
        files.len(),
        rep.totals.tasks,
        rep.totals.fails
    ));
    o
}

fn commutative_spectral_identity() -> Outcome {
    let mut o = Outcome::new();
    let mut count = 0;
    for ring in corpus::rings().into_iter().filter(|r| r.is_commutative() && r.rank() <= 5) {
        let t = primary_matrix(&ring, 3).unwrap().to_dense();
        let mut eig: Vec<f64> = SymmetricEigen::new(t).eigenvalues.iter().copied().collect();
        let mut sums = schur_sums(&ring).unwrap();
        eig.sort_by(f64::total_cmp);
        sums.sort_by(f64::total_cmp);
        let dev = eig.iter().zip(&sums).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        o.check(eig.len() == sums.len() && dev < 1e-6, format!("{}: max deviation {dev:e}", ring.name()));
        count += 1;
    }
    o.note(format!("{count} commutative rings of rank <= 5"));
    o
}

fn low_powers_and_sign_agreement() -> Outcome {
    let mut o = Outcome::new();
    let mut agree = 0;
    for ring in corpus::rings() {
        let ctx = RingContext::new(&ring).unwrap();
        let full = ctx.full_set();
        let v: Vec<CriterionVerdict> = (1..=4)
            .map(|n| qfourier_core::criteria::localized_with(&ctx, &full, n, &policy()).unwrap())
            .collect();
        o.check(v[0].passes() && v[1].passes(), format!("{}: T1 {:?}, T2 {:?}", ring.name(), v[0].status, v[1].status));
        let sign = |x: &CriterionVerdict| x.fails();
        let both_decided = v[2].status != VerdictStatus::Inconclusive && v[3].status != VerdictStatus::Inconclusive;
        o.check(!both_decided || sign(&v[2]) == sign(&v[3]), format!("{}: T3 {:?} vs T4 {:?}", ring.name(), v[2].status, v[3].status));
        agree += 1;
    }
    o.note(format!("{agree} corpus rings: T1, T2 pass; T3 and T4 agree"));
    o
}

fn group_suite() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let orders: Vec<usize> = (4..=16).chain([17, 19]).collect();
    let cfg = SuiteConfig::default();
    let reports: Vec<InequalityReport> = orders.iter().map(|&n| inequality_suite(n, 500, 2024, &cfg).unwrap()).collect();
    let secs = start.elapsed().as_secs_f64();
    let mut failing: std::collections::BTreeMap<String, (f64, Vec<usize>)> = Default::default();
    for rep in &reports {
        let names: Vec<&str> = rep.entries.iter().map(|e| e.name.as_str()).collect();
        for required in ["hausdorff_young", "donoho_stark", "hirschman_beckner", "smooth_donoho_stark", "young", "reverse_young", "schur_positivity", "entropic_convolution", "sum_set"] {
            o.check(names.contains(&required), format!("n={}: no {required} entry", rep.order));
        }
        o.check(names.contains(&"tao") == rep.prime_order, format!("n={}: tao entry presence", rep.order));
        for e in rep.failing() {
            let slot = failing.entry(format!("{} {}", e.name, e.parameters)).or_insert((0.0, Vec::new()));
            slot.0 = slot.0.min(e.min_slack);
            slot.1.push(rep.order);
        }
        let young_eq = rep.entry("young_one_norm_equality", "").map(|e| e.min_slack.abs());
        o.check(young_eq.is_some_and(|s| s < 1e-9), format!("n={}: 1-norm Young equality {young_eq:?}", rep.order));
        let n = rep.order;
        let d = GroupFunction::delta(n, 0);
        let fd = qft(&d);
        let ds = (d.support() * fd.support()) as f64 - n as f64;
        o.check(ds == 0.0, format!("n={n}: delta Donoho-Stark slack {ds}"));
        let hb = entropy(&d.abs_sq()).unwrap() + entropy(&fd.abs_sq()).unwrap() - (n as f64).ln();
        o.check(hb.abs() < 1e-12, format!("n={n}: delta Hirschman-Beckner slack {hb:e}"));
    }
    for (name, (slack, ns)) in &failing {
        o.check(false, format!("{name}: min slack {slack:.3e} on orders {ns:?}"));
    }
    o.check(secs < 60.0, format!("runtime {secs:.1}s"));
    o.note(format!("{} orders x 500 trials in {secs:.1}s; equality cases exact", orders.len()));
    o
}

fn random_nonnegative(rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = rng.random_range(2..=10);
    let density: f64 = rng.random_range(0.15..1.0);
    DMatrix::from_fn(n, n, |_, _| if rng.random::<f64>() < density { rng.random::<f64>() * 5.0 } else { 0.0 })
}

fn random_channel(rng: &mut ChaCha8Rng, n: usize, k: usize) -> QuantumChannel {
    let g = DMatrix::from_fn(n * k, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let q = g.qr().q();
    QuantumChannel::new((0..k).map(|a| q.rows(a * n, n).into_owned()).collect()).unwrap()
}

fn pf_engine_and_channels() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut irreducible, mut worst) = (0, 0.0f64);
    for t in 0..1000 {
        let a = random_nonnegative(&mut rng);
        let pf = pf_eigen(&a).unwrap();
        let v = DVector::from_vec(pf.right.clone());
        let res = (&a * &v - &v * pf.radius).amax() / v.amax().max(f64::MIN_POSITIVE);
        worst = worst.max(res);
        o.check(res <= 1e-8, format!("matrix {t}: residual {res:e}"));
        if pf.irreducible {
            irreducible += 1;
            o.check(pf.simple && pf.right.iter().all(|&x| x > 0.0), format!("matrix {t}: PF vector not positive/simple"));
        }
    }
    o.note(format!("1000 matrices ({irreducible} irreducible), worst residual {worst:.2e}"));
    let mut radius_dev = 0.0f64;
    let mut one_dim = 0;
    for t in 0..40 {
        let n = 2 + t % 4;
        let phi = random_channel(&mut rng, n, 2 + t % 3);
        let pf = channel_pf(&phi).unwrap();
        radius_dev = radius_dev.max((pf.radius - 1.0).abs());
        o.check((pf.radius - 1.0).abs() <= 1e-9, format!("channel {t}: radius {}", pf.radius));
        if channel_irreducible(&phi) {
            let dim = fixed_space(&phi).unwrap().len();
            o.check(dim == 1, format!("irreducible channel {t}: fixed space dim {dim}"));
            one_dim += 1;
        }
    }
    let damp = channel_pf(&corpus::full_damp()).unwrap();
    let mut target = DMatrix::<Complex64>::zeros(2, 2);
    target[(0, 0)] = Complex64::new(1.0, 0.0);
    let dev = (&damp.fixed_point - target).iter().map(|z| z.norm()).fold(0.0, f64::max);
    o.check(dev < 1e-9, format!("full damp fixed point off by {dev:e}"));
    let s = pf_space_structure_check(&corpus::pinching(), 20, 3).unwrap();
    o.check(s.passes == Some(true), format!("pinching structure check {:?}", s.passes));
    o.note(format!(
        "40 random channels: |r-1| <= {radius_dev:.1e}, {one_dim} irreducible with 1-dim fixed space; full damp D=|0><0| ({dev:.1e}); pinching passes"
    ));
    o
}

fn r6_reproduction() -> Outcome {
    let mut o = Outcome::new();
    let v = primary_criterion(&corpus::ring("r6.ring").unwrap(), 3, &policy()).unwrap();
    o.check((v.lambda_min - (-1.176375)).abs() <= 1e-3, format!("lambda_min {}", v.lambda_min));
    o.check(v.fails(), format!("status {:?}", v.status));
    o.note(format!("lambda_min(T_3) = {:.7}", v.lambda_min));
    o
}

fn residual(a: &DMatrix<Complex64>, v: &[Complex64], lambda: f64) -> f64 {
    let x = DVector::from_column_slice(v);
    let r = a * &x - &x * Complex64::new(lambda, 0.0);
    r.norm() / x.norm()
}

fn hadamard_power_matrix(ring: &FusionRing, n: usize, u: Option<&DMatrix<Complex64>>) -> DMatrix<Complex64> {
    let dims = fusion::profile(ring).unwrap().dims;
    let r = ring.rank();
    let mut h = DMatrix::<Complex64>::zeros(r, r);
    for (i, d) in dims.iter().enumerate() {
        let m = ring.fusion_matrix(i).map(|x| Complex64::new(x, 0.0));
        let c = match u {
            Some(u) => u * m * u.adjoint(),
            None => m,
        };
        h += c.map(|z| z.powu(n as u32) * d.powi(2 - n as i32));
    }
    (&h + h.adjoint()) * Complex64::new(0.5, 0.0)
}

fn witness_checkability() -> Outcome {
    let mut o = Outcome::new();
    let files = corpus::ring_files();
    let rep = io::run_rings(&files, &RunConfig::default());
    let mut checked = 0;
    let mut worst = 0.0f64;
    for rec in rep.records.iter().filter(|r| r.status == TaskStatus::Fails) {
        let ring = &files.iter().find(|f| f.ring.name() == rec.target).unwrap().ring;
        let v = rec.verdict.as_ref().unwrap();
        let n = rec.parameters.n.unwrap_or(0);
        let label = format!("{} {:?} {:?}", rec.target, rec.criterion, rec.parameters);
        let (value, res) = match (&v.witness, rec.criterion) {
            (Witness::Triple { indices: [a, b, c], value }, CriterionKind::Schur) => {
                let r = ring.rank();
                let sums = schur_sums(ring).unwrap();
                (*value, (sums[(a * r + b) * r + c] - value).abs())
            }
            (Witness::Eigenvector { value, vector }, CriterionKind::Primary | CriterionKind::Localized) => {
                let ctx = RingContext::new(ring).unwrap();
                let s = rec.parameters.set.clone().unwrap_or_else(|| ctx.full_set());
                let a = tensor_matrix(&ctx.local_terms(&s).unwrap(), n, DEFAULT_ROW_CAP).unwrap().to_dense();
                let vc: Vec<Complex64> = vector.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                (*value, residual(&a.map(|x| Complex64::new(x, 0.0)), &vc, *value))
            }
            (Witness::Eigenvector { value, vector }, CriterionKind::Reduced) => {
                let vc: Vec<Complex64> = vector.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                (*value, residual(&hadamard_power_matrix(ring, n, None), &vc, *value))
            }
            (Witness::ComplexEigenvector { value, vector }, CriterionKind::ReducedTwisted) => {
                let u = haar_unitary(ring.rank(), rec.parameters.unitary_seed.unwrap());
                let vc: Vec<Complex64> = vector.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                (*value, residual(&hadamard_power_matrix(ring, n, Some(&u)), &vc, *value))
            }
            (w, _) => {
                o.check(false, format!("{label}: unexpected witness {w:?}"));
                continue;
            }
        };
        o.check(value < 0.0 && (value - v.lambda_min).abs() <= 1e-9 * (1.0 + v.lambda_min.abs()), format!("{label}: witness value {value}"));
        o.check(res <= 1e-6, format!("{label}: residual {res:e}"));
        worst = worst.max(res);
        checked += 1;
    }
    let d5 = graph_report(&parse_graph_str(corpus::D5_GRAPH).unwrap(), 1, &policy()).unwrap();
    let v = &d5.local_checks[0].check.verdict;
    if let Witness::Eigenvector { value, vector } = &v.witness {
        let c = (2.0 + 2f64.sqrt()).sqrt();
        let a = DMatrix::from_row_slice(2, 2, &[1.0, c, c, 1.0]).map(|x| Complex64::new(x, 0.0));
        let vc: Vec<Complex64> = vector.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let res = residual(&a, &vc, *value);
        o.check(res <= 1e-6, format!("D5 witness residual {res:e}"));
        worst = worst.max(res);
        checked += 1;
    } else {
        o.check(false, "D5 verdict has no eigenvector witness");
    }
    o.note(format!("{checked} Fails witnesses verified, worst residual {worst:.2e}"));
    o
}

fn main() {
    let criteria: [(u8, &str, fn() -> Outcome); 9] = [
        (1, "R_{4,k} exclusion for k = 5..12", r4k_exclusion),
        (2, "D5 principal-graph obstruction", d5_obstruction),
        (3, "categorifiable controls pass", categorifiable_controls),
        (4, "commutative spectral identity", commutative_spectral_identity),
        (5, "T1/T2 pass, T3/T4 agree on corpus", low_powers_and_sign_agreement),
        (6, "group-model inequality suite", group_suite),
        (7, "Perron-Frobenius engine and channels", pf_engine_and_channels),
        (8, "R6 negative eigenvalue", r6_reproduction),
        (9, "Fails witnesses checkable", witness_checkability),
    ];
    let mut unexpected = 0;
    for (id, title, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Outcome { pass: false, lines: vec![format!("panicked: {}", msg.unwrap_or_default())] }
        });
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id).map(|(_, why)| *why);
        let tag = match (outcome.pass, known) {
            (true, _) => "PASS",
            (false, Some(_)) => "FAIL (known)",
            (false, None) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("[{tag}] criterion {id}: {title} ({secs:.2}s)");
        for line in outcome.lines.iter().take(12) {
            println!("        {line}");
        }
        if outcome.lines.len() > 12 {
            println!("        ... {} more", outcome.lines.len() - 12);
        }
        if let (false, Some(why)) = (outcome.pass, known) {
            println!("        reason: {why}");
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
