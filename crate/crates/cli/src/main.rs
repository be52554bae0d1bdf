use clap::{Args, Parser, Subcommand};
use qfourier_core::channel::{channel_pf, pf_space_structure_check};
use qfourier_core::group::{inequality_suite, InequalityReport, SuiteConfig};
use qfourier_core::io::{
    self, graph_report, parse_graph, parse_kraus, run_batch, run_rings, CriterionKind, IoError, OutputFormat, RingFile,
    RunConfig,
};
use qfourier_core::{fusion, PsdPolicy};
use serde_json::json;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qfourier", version, about = "Categorification obstructions, Perron-Frobenius data and Fourier inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fusion ring files.
    #[command(subcommand)]
    Ring(RingCommand),
    /// Principal graph files.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Quantum channels given by Kraus operators.
    #[command(subcommand)]
    Channel(ChannelCommand),
    /// Cyclic group model.
    #[command(subcommand)]
    Group(GroupCommand),
    /// Print the tool version.
    Version,
}

#[derive(Subcommand)]
enum RingCommand {
    /// Parse a ring file and check the fusion axioms.
    Validate { file: PathBuf },
    /// Run the criteria pipeline on one ring file.
    Check {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the pipeline on every `.ring` file in a directory, or on the bundled corpus.
    Batch {
        #[arg(required_unless_present = "bundled")]
        dir: Option<PathBuf>,
        #[arg(long)]
        bundled: bool,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Largest tensor power.
    #[arg(long = "n", default_value_t = 3)]
    n_max: usize,
    /// Largest localized subset size.
    #[arg(long, default_value_t = 3)]
    subsets: usize,
    /// Comma-separated criteria (primary, localized, schur, reduced, twisted, reduced_twisted, local_data).
    #[arg(long, value_delimiter = ',')]
    criteria: Option<Vec<CriterionKind>>,
    #[command(flatten)]
    tol: TolArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Haar unitaries per reduced-twisted task.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
    /// Record wall time per task.
    #[arg(long)]
    timings: bool,
    /// Worker threads.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct TolArgs {
    /// Relative tolerance for negative eigenvalues.
    #[arg(long)]
    tol: Option<f64>,
    /// Width of the inconclusive band.
    #[arg(long)]
    band: Option<f64>,
}

impl TolArgs {
    fn policy(&self) -> PsdPolicy {
        let mut p = PsdPolicy::default();
        if let Some(t) = self.tol {
            p.rel_tol = t;
        }
        if let Some(b) = self.band {
            p.inconclusive_band = b;
        }
        p
    }
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        let mut cfg = RunConfig {
            n_max: self.n_max,
            subset_cap: self.subsets,
            unitary_samples: self.samples,
            seed: self.seed,
            format: self.format,
            policy: self.tol.policy(),
            timings: self.timings,
            workers: self.workers,
            ..RunConfig::default()
        };
        if let Some(c) = &self.criteria {
            cfg.criteria = c.clone();
        }
        cfg
    }
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Perron-Frobenius data and local-matrix checks.
    Check {
        file: PathBuf,
        #[arg(long = "n", default_value_t = 1)]
        n_max: usize,
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Subcommand)]
enum ChannelCommand {
    /// Spectral radius and positive eigenmatrix.
    Pf {
        #[arg(long)]
        kraus: PathBuf,
    },
    /// Compare positive fixed points with the conjugated commutant.
    Structure {
        #[arg(long)]
        kraus: PathBuf,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum GroupCommand {
    /// Randomized inequality suite on Z_n.
    Suite {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "json")]
        format: OutputFormat,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn out(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush());
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(cli: Cli) -> Result<ExitCode, IoError> {
    match cli.command {
        Command::Version => out(&format!("qfourier {}\n", env!("CARGO_PKG_VERSION"))),
        Command::Ring(RingCommand::Validate { file }) => return validate(&file),
        Command::Ring(RingCommand::Check { file, run }) => {
            let cfg = run.config();
            return Ok(emit(run_batch(&[file], &cfg), cfg.format));
        }
        Command::Ring(RingCommand::Batch { dir, bundled, run }) => {
            let cfg = run.config();
            let report = match dir {
                Some(dir) if !bundled => run_batch(&ring_files(&dir)?, &cfg),
                _ => run_rings(&io::corpus::ring_files(), &cfg),
            };
            return Ok(emit(report, cfg.format));
        }
        Command::Graph(GraphCommand::Check { file, n_max, tol }) => {
            let rep = graph_report(&parse_graph(&file)?, n_max, &tol.policy())?;
            out(&(serde_json::to_string_pretty(&rep).expect("serializable") + "\n"));
        }
        Command::Channel(ChannelCommand::Pf { kraus }) => {
            let phi = parse_kraus(&kraus)?;
            let pf = channel_pf(&phi)?;
            let value = json!({
                "format_version": io::FORMAT_VERSION,
                "dim": phi.dim(),
                "kraus_operators": phi.kraus().len(),
                "trace_preserving": phi.is_trace_preserving(),
                "unital": phi.is_unital(),
                "pf": serde_json::to_value(&pf).expect("serializable"),
            });
            out(&(pretty(&value) + "\n"));
        }
        Command::Channel(ChannelCommand::Structure { kraus, samples, seed }) => {
            let rep = pf_space_structure_check(&parse_kraus(&kraus)?, samples, seed)?;
            out(&(serde_json::to_string_pretty(&rep).expect("serializable") + "\n"));
        }
        Command::Group(GroupCommand::Suite { order, trials, seed, format }) => {
            match inequality_suite(order, trials, seed, &SuiteConfig::default()) {
                Ok(rep) => out(&render_suite(&rep, format)),
                Err(e) => {
                    eprintln!("error[GROUP_DOMAIN]: {e}");
                    return Ok(ExitCode::from(1));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn validate(file: &Path) -> Result<ExitCode, IoError> {
    let ring = match RingFile::read(file) {
        Ok(f) => f.ring,
        Err(IoError::Axioms(rep)) => return print_invalid(file, &rep),
        Err(e) => return Err(e),
    };
    let report = ring.validate();
    let profile = fusion::profile(&ring).ok();
    let value = json!({
        "format_version": io::FORMAT_VERSION,
        "name": ring.name(),
        "rank": ring.rank(),
        "valid": true,
        "commutative": ring.is_commutative(),
        "warnings": report.warnings,
        "profile": profile.map(|p| serde_json::to_value(p).expect("serializable")),
    });
    out(&(pretty(&value) + "\n"));
    Ok(ExitCode::SUCCESS)
}

fn print_invalid(file: &Path, rep: &qfourier_core::ValidationReport) -> Result<ExitCode, IoError> {
    let value = json!({
        "format_version": io::FORMAT_VERSION,
        "file": file.display().to_string(),
        "valid": false,
        "violations": serde_json::to_value(&rep.violations).expect("serializable"),
        "warnings": rep.warnings,
    });
    out(&(pretty(&value) + "\n"));
    Ok(ExitCode::from(1))
}

fn ring_files(dir: &Path) -> Result<Vec<PathBuf>, IoError> {
    let unreadable = |source| IoError::Unreadable { path: dir.to_path_buf(), source };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(unreadable)? {
        let path = entry.map_err(unreadable)?.path();
        if path.extension().is_some_and(|e| e == "ring") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn emit(report: qfourier_core::Report, format: OutputFormat) -> ExitCode {
    out(&report.render(format));
    if report.internal_errors() > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn render_suite(rep: &InequalityReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(rep).expect("serializable") + "\n",
        OutputFormat::Markdown => {
            let mut out = format!(
                "# Inequality suite on Z_{}\n\ntrials {} · seed {} · prime order {} · all asserted entries pass: {}\n\n",
                rep.order, rep.trials, rep.seed, rep.prime_order, rep.passes
            );
            out.push_str("| inequality | parameters | kind | min slack | pass |\n|---|---|---|---|---|\n");
            for e in &rep.entries {
                let _ = writeln!(out, "| {} | {} | {:?} | {:.3e} | {} |", e.name, e.parameters, e.kind, e.min_slack, e.pass);
            }
            out
        }
    }
}
