//! Run configuration, the default criteria pipeline and report emission.

use super::{IoError, RingFile, FORMAT_VERSION};
use crate::criteria::{
    dft_unitary, haar_unitary, localized_with, schur_criterion, task_seed, twisted_with, worst_twist, CriteriaError,
    RingContext, TwistMode,
};
use crate::graph::local_matrix_check;
use crate::linalg::{CriterionVerdict, PsdPolicy, VerdictStatus, Witness};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Primary,
    Localized,
    Schur,
    Reduced,
    Twisted,
    ReducedTwisted,
    LocalData,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 7] = [
        CriterionKind::Primary,
        CriterionKind::Localized,
        CriterionKind::Schur,
        CriterionKind::Reduced,
        CriterionKind::Twisted,
        CriterionKind::ReducedTwisted,
        CriterionKind::LocalData,
    ];

    /// Default pipeline. The twisted criterion is unitarily similar to the primary one
    /// and costly, so it runs only when requested.
    pub const DEFAULT: [CriterionKind; 6] = [
        CriterionKind::Primary,
        CriterionKind::Localized,
        CriterionKind::Schur,
        CriterionKind::Reduced,
        CriterionKind::ReducedTwisted,
        CriterionKind::LocalData,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Primary => "primary",
            CriterionKind::Localized => "localized",
            CriterionKind::Schur => "schur",
            CriterionKind::Reduced => "reduced",
            CriterionKind::Twisted => "twisted",
            CriterionKind::ReducedTwisted => "reduced_twisted",
            CriterionKind::LocalData => "local_data",
        }
    }
}

impl FromStr for CriterionKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        CriterionKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown criterion `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            _ => Err(format!("unknown format `{s}` (expected json or md)")),
        }
    }
}

/// Batch settings; echoed verbatim into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Largest tensor power (default 3).
    pub n_max: usize,
    /// Largest localized subset size (default 3).
    pub subset_cap: usize,
    /// Haar unitaries per reduced-twisted task (default 100).
    pub unitary_samples: usize,
    pub seed: u64,
    pub format: OutputFormat,
    pub policy: PsdPolicy,
    pub criteria: Vec<CriterionKind>,
    /// Twisted tasks run when `rank^n` is at most this (default 512).
    pub twisted_row_limit: usize,
    /// Record wall time per task; reports are then no longer reproducible.
    pub timings: bool,
    /// Worker cap; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_max: 3,
            subset_cap: 3,
            unitary_samples: 100,
            seed: 0,
            format: OutputFormat::Json,
            policy: PsdPolicy::default(),
            criteria: CriterionKind::DEFAULT.to_vec(),
            twisted_row_limit: 512,
            timings: false,
            workers: None,
        }
    }
}

impl RunConfig {
    fn enabled(&self, c: CriterionKind) -> bool {
        self.criteria.contains(&c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Passes,
    Fails,
    Inconclusive,
    /// Capacity limit reached; not an internal error.
    Skipped,
    Error,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    /// 0-based local set.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub set: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unitary: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
    /// Seed of the worst Haar sample: `haar_unitary(rank, seed)` rebuilds it.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unitary_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub block: Option<usize>,
}

impl TaskParams {
    fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(s) = &self.set {
            parts.push(format!("S={s:?}"));
        }
        if let Some(n) = self.n {
            parts.push(format!("n={n}"));
        }
        if let Some(u) = &self.unitary {
            parts.push(format!("U={u}"));
        }
        if let Some(k) = self.samples {
            parts.push(format!("samples={k}"));
        }
        if let Some(b) = self.block {
            parts.push(format!("block={b}"));
        }
        parts.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub target: String,
    pub criterion: CriterionKind,
    pub parameters: TaskParams,
    pub status: TaskStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub margin: Option<f64>,
    /// Full verdict; the eigenvector witness is kept only for non-passing records.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<CriterionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub rings: usize,
    pub tasks: usize,
    pub passes: usize,
    pub fails: usize,
    pub inconclusive: usize,
    pub skipped: usize,
    pub errors: usize,
}

impl Totals {
    fn add(&mut self, s: TaskStatus) {
        self.tasks += 1;
        match s {
            TaskStatus::Passes => self.passes += 1,
            TaskStatus::Fails => self.fails += 1,
            TaskStatus::Inconclusive => self.inconclusive += 1,
            TaskStatus::Skipped => self.skipped += 1,
            TaskStatus::Error => self.errors += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingSummary {
    pub target: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rank: Option<usize>,
    pub counts: Totals,
    /// Short descriptions of failing tasks, in record order.
    pub failing: Vec<String>,
    /// Load or setup error; no tasks ran.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub config: RunConfig,
    pub totals: Totals,
    pub rings: Vec<RingSummary>,
    pub records: Vec<TaskRecord>,
}

impl Report {
    /// Internal errors: unreadable or invalid inputs and failed computations.
    pub fn internal_errors(&self) -> usize {
        self.totals.errors + self.rings.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn records_for<'a>(&'a self, target: &'a str) -> impl Iterator<Item = &'a TaskRecord> + 'a {
        self.records.iter().filter(move |r| r.target == target)
    }

    pub fn ring(&self, target: &str) -> Option<&RingSummary> {
        self.rings.iter().find(|r| r.target == target)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable");
                s.push('\n');
                s
            }
            OutputFormat::Markdown => self.to_markdown(),
        }
    }

    pub fn to_markdown(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = writeln!(out, "# qfourier report\n");
        let _ = writeln!(
            out,
            "tool {} · seed {} · n_max {} · subset cap {} · unitary samples {} · rel_tol {:e} · band {:e}\n",
            self.tool_version, self.seed, c.n_max, c.subset_cap, c.unitary_samples, c.policy.rel_tol, c.policy.inconclusive_band
        );
        out.push_str("| ring | rank | tasks | passes | fails | inconclusive | skipped | errors | first failure |\n");
        out.push_str("|---|---|---|---|---|---|---|---|---|\n");
        for r in &self.rings {
            let k = &r.counts;
            let first = r.error.clone().or_else(|| r.failing.first().cloned()).unwrap_or_else(|| "-".into());
            let rank = r.rank.map_or_else(|| "-".to_string(), |x| x.to_string());
            let _ = writeln!(
                out,
                "| {} | {rank} | {} | {} | {} | {} | {} | {} | {first} |",
                r.target, k.tasks, k.passes, k.fails, k.inconclusive, k.skipped, k.errors
            );
        }
        let fails: Vec<_> = self.records.iter().filter(|r| r.status == TaskStatus::Fails).collect();
        if !fails.is_empty() {
            out.push_str("\n## Failing tasks\n\n| ring | criterion | parameters | λ_min | margin |\n|---|---|---|---|---|\n");
            for r in fails {
                let lambda = r.verdict.as_ref().map_or(f64::NAN, |v| v.lambda_min);
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {lambda:.6e} | {:.3e} |",
                    r.target,
                    r.criterion.name(),
                    r.parameters.describe(),
                    r.margin.unwrap_or(f64::NAN)
                );
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
enum Task {
    Primary(usize),
    Localized(Vec<usize>, usize),
    Schur,
    Reduced(usize),
    Twisted(usize),
    ReducedTwisted(usize),
    LocalData(usize, usize),
}

fn subsets(rank: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=cap.min(rank) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if size < rank {
                out.push(idx.clone());
            }
            let Some(p) = (0..size).rev().find(|&p| idx[p] < rank - size + p) else { break };
            idx[p] += 1;
            for q in p + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

fn plan(file: &RingFile, ctx: &RingContext, cfg: &RunConfig) -> Vec<Task> {
    let r = ctx.ring.rank();
    let mut tasks = Vec::new();
    let ns = 1..=cfg.n_max;
    if cfg.enabled(CriterionKind::Primary) {
        tasks.extend(ns.clone().map(Task::Primary));
    }
    if cfg.enabled(CriterionKind::Localized) {
        for s in subsets(r, cfg.subset_cap) {
            tasks.extend(ns.clone().map(|n| Task::Localized(s.clone(), n)));
        }
    }
    if cfg.enabled(CriterionKind::Schur) && ctx.profile.commutative {
        tasks.push(Task::Schur);
    }
    if cfg.enabled(CriterionKind::Reduced) {
        tasks.extend(ns.clone().map(Task::Reduced));
    }
    if cfg.enabled(CriterionKind::Twisted) {
        tasks.extend(ns.clone().filter(|&n| (r as f64).powi(n as i32) <= cfg.twisted_row_limit as f64).map(Task::Twisted));
    }
    if cfg.enabled(CriterionKind::ReducedTwisted) && cfg.unitary_samples > 0 {
        tasks.extend(ns.clone().map(Task::ReducedTwisted));
    }
    if cfg.enabled(CriterionKind::LocalData) {
        for b in 0..file.local_data.len() {
            tasks.extend(ns.clone().map(|n| Task::LocalData(b, n)));
        }
    }
    tasks
}

/// Seed of a ring's Haar samples; depends on the name only, not on its position in the batch.
fn ring_seed(global: u64, name: &str) -> u64 {
    let h = name.bytes().fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01B3));
    task_seed(global, h)
}

fn run_task(file: &RingFile, ctx: &RingContext, task: &Task, haar: &[(u64, DMatrix<Complex64>)], cfg: &RunConfig) -> TaskRecord {
    let start = cfg.timings.then(Instant::now);
    let full = ctx.full_set();
    let p = &cfg.policy;
    let mut params = TaskParams::default();
    let (criterion, result): (CriterionKind, Result<CriterionVerdict, String>) = match task {
        Task::Primary(n) => {
            params.n = Some(*n);
            (CriterionKind::Primary, localized_with(ctx, &full, *n, p).map_err(err))
        }
        Task::Localized(s, n) => {
            params.n = Some(*n);
            params.set = Some(s.clone());
            (CriterionKind::Localized, localized_with(ctx, s, *n, p).map_err(err))
        }
        Task::Schur => (CriterionKind::Schur, schur_criterion(&ctx.ring, p).map_err(err)),
        Task::Reduced(n) => {
            params.n = Some(*n);
            let id = DMatrix::identity(full.len(), full.len());
            (CriterionKind::Reduced, twisted_with(ctx, &full, *n, &id, TwistMode::Reduced, p).map_err(err))
        }
        Task::Twisted(n) => {
            params.n = Some(*n);
            params.unitary = Some("dft".into());
            let u = dft_unitary(full.len());
            (CriterionKind::Twisted, twisted_with(ctx, &full, *n, &u, TwistMode::Twisted, p).map_err(err))
        }
        Task::ReducedTwisted(n) => {
            params.n = Some(*n);
            params.unitary = Some("haar".into());
            params.samples = Some(haar.len());
            let mats: Vec<DMatrix<Complex64>> = haar.iter().map(|(_, u)| u.clone()).collect();
            let v = worst_twist(ctx, &full, *n, &mats, TwistMode::ReducedTwisted, p).map(|(k, v)| {
                params.unitary_seed = Some(haar[k].0);
                v
            });
            (CriterionKind::ReducedTwisted, v.map_err(err))
        }
        Task::LocalData(b, n) => {
            params.n = Some(*n);
            params.block = Some(*b);
            let v = local_matrix_check(&file.local_data[*b], *n, p).map(|c| c.verdict).map_err(|e| e.to_string());
            (CriterionKind::LocalData, v)
        }
    };
    let wall_ms = start.map(|t| t.elapsed().as_secs_f64() * 1e3);
    let target = ctx.ring.name().to_string();
    match result {
        Ok(mut v) => {
            let status = match v.status {
                VerdictStatus::Passes => TaskStatus::Passes,
                VerdictStatus::Fails => TaskStatus::Fails,
                VerdictStatus::Inconclusive => TaskStatus::Inconclusive,
            };
            if status == TaskStatus::Passes {
                v.witness = Witness::None;
            }
            TaskRecord { target, criterion, parameters: params, status, margin: Some(v.margin), verdict: Some(v), error: None, wall_ms }
        }
        Err(e) => {
            let status = if e.starts_with("CAPACITY") { TaskStatus::Skipped } else { TaskStatus::Error };
            TaskRecord { target, criterion, parameters: params, status, margin: None, verdict: None, error: Some(e), wall_ms }
        }
    }
}

fn err(e: CriteriaError) -> String {
    match e {
        CriteriaError::Capacity { .. } => format!("CAPACITY: {e}"),
        other => other.to_string(),
    }
}

fn run_one(file: &RingFile, source: Option<String>, cfg: &RunConfig) -> (RingSummary, Vec<TaskRecord>) {
    let target = file.ring.name().to_string();
    let ctx = match RingContext::new(&file.ring) {
        Ok(c) => c,
        Err(e) => {
            let summary = RingSummary {
                target,
                source,
                rank: Some(file.ring.rank()),
                counts: Totals::default(),
                failing: Vec::new(),
                error: Some(e.to_string()),
            };
            return (summary, Vec::new());
        }
    };
    let tasks = plan(file, &ctx, cfg);
    let r = ctx.ring.rank();
    let haar: Vec<(u64, DMatrix<Complex64>)> = if tasks.iter().any(|t| matches!(t, Task::ReducedTwisted(_))) {
        let base = ring_seed(cfg.seed, &target);
        (0..cfg.unitary_samples as u64)
            .map(|k| {
                let seed = task_seed(base, k);
                (seed, haar_unitary(r, seed))
            })
            .collect()
    } else {
        Vec::new()
    };
    let records: Vec<TaskRecord> = tasks.par_iter().map(|t| run_task(file, &ctx, t, &haar, cfg)).collect();
    let mut counts = Totals { rings: 1, ..Totals::default() };
    let mut failing = Vec::new();
    for rec in &records {
        counts.add(rec.status);
        if rec.status == TaskStatus::Fails {
            failing.push(format!("{} {}", rec.criterion.name(), rec.parameters.describe()));
        }
    }
    (RingSummary { target, source, rank: Some(r), counts, failing, error: None }, records)
}

fn assemble(results: Vec<(RingSummary, Vec<TaskRecord>)>, cfg: &RunConfig) -> Report {
    let mut totals = Totals::default();
    let mut rings = Vec::new();
    let mut records = Vec::new();
    for (summary, recs) in results {
        totals.rings += 1;
        for r in &recs {
            totals.add(r.status);
        }
        rings.push(summary);
        records.extend(recs);
    }
    Report {
        format_version: FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config: cfg.clone(),
        totals,
        rings,
        records,
    }
}

fn with_pool<T: Send>(cfg: &RunConfig, f: impl FnOnce() -> T + Send) -> T {
    match cfg.workers {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

/// Runs the pipeline on in-memory rings; report order follows the input order.
pub fn run_rings(files: &[RingFile], cfg: &RunConfig) -> Report {
    let results = with_pool(cfg, || files.par_iter().map(|f| run_one(f, None, cfg)).collect());
    assemble(results, cfg)
}

/// Reads each ring file and runs the pipeline. Unreadable or invalid files become
/// ring summaries with an error and no tasks.
pub fn run_batch(paths: &[PathBuf], cfg: &RunConfig) -> Report {
    let results = with_pool(cfg, || {
        paths
            .par_iter()
            .map(|path| {
                let source = Some(path.display().to_string());
                match RingFile::read(path) {
                    Ok(file) => run_one(&file, source, cfg),
                    Err(e) => (load_error(path, &e), Vec::new()),
                }
            })
            .collect()
    });
    assemble(results, cfg)
}

fn load_error(path: &std::path::Path, e: &IoError) -> RingSummary {
    RingSummary {
        target: path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned()),
        source: Some(path.display().to_string()),
        rank: None,
        counts: Totals::default(),
        failing: Vec::new(),
        error: Some(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::{cyclic, fibonacci, r4k};

    #[test]
    fn subset_enumeration() {
        let s = subsets(4, 3);
        assert_eq!(s.len(), 4 + 6 + 4);
        assert!(s.contains(&vec![1, 2]) && s.contains(&vec![0, 2, 3]));
        assert_eq!(subsets(3, 3).len(), 3 + 3);
        assert!(subsets(1, 3).is_empty());
    }

    #[test]
    fn empty_batch() {
        let rep = run_batch(&[], &RunConfig::default());
        assert_eq!(rep.totals, Totals::default());
        assert!(rep.records.is_empty() && rep.internal_errors() == 0);
    }

    #[test]
    fn deterministic_and_ordered() {
        let files: Vec<RingFile> = [fibonacci(), cyclic(3), r4k(5)].into_iter().map(RingFile::new).collect();
        let cfg = RunConfig { unitary_samples: 5, ..RunConfig::default() };
        let a = run_rings(&files, &cfg).render(OutputFormat::Json);
        assert_eq!(a, run_rings(&files, &cfg).render(OutputFormat::Json));
        let serial = run_rings(&files, &RunConfig { workers: Some(1), ..cfg.clone() });
        assert_eq!(serial.records, run_rings(&files, &cfg).records);
        let rep = run_rings(&files, &cfg);
        let order: Vec<_> = rep.rings.iter().map(|r| r.target.as_str()).collect();
        assert_eq!(order, ["Fib", "Z3", "R4_5"]);
        assert_eq!(rep.ring("Fib").unwrap().counts.fails, 0);
        let r45 = rep.ring("R4_5").unwrap();
        assert!(r45.failing.iter().any(|f| f == "localized S=[1, 2] n=3"), "{:?}", r45.failing);
        for rec in rep.records.iter().filter(|r| r.status == TaskStatus::Fails) {
            assert!(!matches!(rec.verdict.as_ref().unwrap().witness, Witness::None));
        }
        assert!(rep.to_markdown().contains("| R4_5 | 4 |"));
    }

    #[test]
    fn criteria_filter_and_unreadable() {
        let cfg = RunConfig { criteria: vec![CriterionKind::Primary], ..RunConfig::default() };
        let rep = run_rings(&[RingFile::new(cyclic(2))], &cfg);
        assert_eq!(rep.totals.tasks, 3);
        assert!(rep.records.iter().all(|r| r.criterion == CriterionKind::Primary));
        let rep = run_batch(&[PathBuf::from("/nonexistent/x.ring")], &cfg);
        assert_eq!(rep.internal_errors(), 1);
        assert!(rep.rings[0].error.as_ref().unwrap().starts_with("UNREADABLE_FILE"));
        let cfg = RunConfig { criteria: vec![CriterionKind::Twisted], twisted_row_limit: 9, ..RunConfig::default() };
        let rep = run_rings(&[RingFile::new(cyclic(3))], &cfg);
        assert_eq!(rep.totals.tasks, 2);
        assert!(rep.records.iter().all(|r| r.status == TaskStatus::Passes));
        assert!("nope".parse::<CriterionKind>().is_err());
        assert_eq!("reduced_twisted".parse::<CriterionKind>(), Ok(CriterionKind::ReducedTwisted));
    }
}
