use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use qcorr_core::{real_hilbert_counting, reconstruct, CorrelationVector};
use serde::Serialize;

use crate::checks;
use crate::config::{load_config, resolve, ExperimentConfig, Resolved};
use crate::error::{CliError, CliResult};
use crate::report::{Check, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qcorr", version, about = "Bell-inequality and entanglement checks on small qubit systems")]
pub struct Cli {
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Directory for reports when no output path is given.
    #[arg(long, global = true, env = "QCORR_REPORT_DIR")]
    pub report_dir: Option<PathBuf>,
    /// Do not print the report to stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// CHSH value of the configured state and observables.
    VerifyBell,
    /// Local bound by enumeration plus a separable-state sweep.
    LhvBound {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Bell-operator norm of the configured and of random observables.
    Tsirelson {
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Pauli-correlation round trip, or reconstruction from a CSV file.
    Tomography {
        /// `word,coefficient` CSV; omitted words are zero.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Real-Hilbert-space parameter count for local dimension d.
    Counting {
        #[arg(long)]
        d: u64,
    },
    /// Entanglement demonstrations.
    Demo {
        #[arg(value_enum)]
        which: Demo,
    },
    /// Finite-shot estimate of the CHSH value.
    Sample {
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write per-setting counts as `setting,a,c,count`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Every check.
    VerifyAll {
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Mix,
    Swap,
    Flow,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyBell => "verify-bell",
            Command::LhvBound { .. } => "lhv-bound",
            Command::Tsirelson { .. } => "tsirelson",
            Command::Tomography { .. } => "tomography",
            Command::Counting { .. } => "counting",
            Command::Demo { which: Demo::Mix } => "demo-mix",
            Command::Demo { which: Demo::Swap } => "demo-swap",
            Command::Demo { which: Demo::Flow } => "demo-flow",
            Command::Sample { .. } => "sample",
            Command::VerifyAll { .. } => "verify-all",
        }
    }
}

/// Result of one CLI invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<Report>,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, message: String) -> Self {
        Self {
            code,
            report: None,
            stdout: String::new(),
            stderr: message,
        }
    }
}

pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    report: None,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::error(code, text)
            };
        }
    };
    match execute(&cli) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::error(EXIT_BAD_INPUT, format!("error: {e}\n")),
    }
}

fn execute(cli: &Cli) -> CliResult<Outcome> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    let mut config = config;
    apply_overrides(&cli.command, &mut config);
    let resolved = resolve(&config)?;
    let mut report = Report::new(cli.command.name(), config.clone());
    run(&cli.command, &resolved, &mut report)?;

    let json = report.to_json();
    if let Some(path) = report_path(cli, &config) {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(&path, &json).map_err(|e| CliError::io(&path, e))?;
    }
    let stderr: String = report.checks.iter().map(|c| c.line() + "\n").collect();
    Ok(Outcome {
        code: if report.passed() { EXIT_OK } else { EXIT_FAILED_CHECK },
        stdout: if cli.quiet { String::new() } else { json },
        stderr,
        report: Some(report),
    })
}

fn report_path(cli: &Cli, config: &ExperimentConfig) -> Option<PathBuf> {
    cli.output
        .clone()
        .or_else(|| config.output.clone())
        .or_else(|| {
            cli.report_dir
                .as_ref()
                .map(|d| d.join(format!("{}.json", cli.command.name())))
        })
}

fn apply_overrides(command: &Command, config: &mut ExperimentConfig) {
    let sweeps = &mut config.sweeps;
    match *command {
        Command::LhvBound { samples, seed } => {
            if let Some(n) = samples {
                sweeps.separable_states = n;
            }
            sweeps.seed = seed.unwrap_or(sweeps.seed);
        }
        Command::Tsirelson { samples, seed } => {
            if let Some(n) = samples {
                sweeps.quadruples = n;
            }
            sweeps.seed = seed.unwrap_or(sweeps.seed);
        }
        Command::Tomography { samples, seed, .. } => {
            if let Some(n) = samples {
                sweeps.tomography_states = n;
            }
            sweeps.seed = seed.unwrap_or(sweeps.seed);
        }
        Command::Sample { shots, seed, .. } | Command::VerifyAll { shots, seed } => {
            if let Some(n) = shots {
                config.shots.shots_per_setting = n;
            }
            config.shots.seed = seed.unwrap_or(config.shots.seed);
        }
        _ => {}
    }
}

fn add<T: Serialize>(report: &mut Report, name: &str, (block, check): (T, Check)) {
    report.block(name, &block);
    report.check(check);
}

fn run(command: &Command, r: &Resolved, report: &mut Report) -> CliResult<()> {
    let tol = &r.config.tolerances;
    let sweeps = &r.config.sweeps;
    match command {
        Command::VerifyBell => {
            add(report, "bell", checks::maximal_violation(&r.state, &r.quadruple, tol));
            add(report, "dichotomy", checks::dichotomy(&r.quadruple, tol));
        }
        Command::LhvBound { .. } => add(report, "lhv", checks::classical_bound(&r.quadruple, sweeps, tol)),
        Command::Tsirelson { .. } => add(report, "tsirelson", checks::tsirelson(&r.quadruple, sweeps, tol)),
        Command::Tomography { input: None, .. } => add(report, "tomography", checks::round_trip(sweeps, tol)),
        Command::Tomography { input: Some(path), .. } => tomography_from_csv(path, report)?,
        Command::Counting { d } => {
            let c = real_hilbert_counting(*d).map_err(|e| CliError::validation("--d", e))?;
            let check = Check::new(
                "6",
                "real_counting",
                !c.sufficient,
                format!(
                    "d={}: composite {} vs N² {} (N = {}), sufficient = {}",
                    c.d, c.composite_params, c.subsystem_params_squared, c.subsystem_params, c.sufficient
                ),
            );
            add(report, "counting", (c, check));
        }
        Command::Demo { which: Demo::Mix } => add(report, "mixing", checks::mixing(tol)),
        Command::Demo { which: Demo::Swap } => add(report, "swap", checks::swap(tol)),
        Command::Demo { which: Demo::Flow } => add(report, "flow", checks::flow()),
        Command::Sample { csv, .. } => {
            let (block, check) = checks::statistical(&r.state, &r.quadruple, &r.plan, tol);
            if let (Some(path), Some(est)) = (csv, &block.estimate) {
                std::fs::write(path, est.counts_csv()).map_err(|e| CliError::io(path, e))?;
            }
            add(report, "sampling", (block, check));
        }
        Command::VerifyAll { .. } => verify_all(r, report),
    }
    Ok(())
}

/// Runs the twelve numbered checks.
pub fn verify_all(r: &Resolved, report: &mut Report) {
    let tol = &r.config.tolerances;
    let sweeps = &r.config.sweeps;
    add(report, "bell", checks::maximal_violation(&r.state, &r.quadruple, tol));
    add(report, "lhv", checks::classical_bound(&r.quadruple, sweeps, tol));
    add(report, "tsirelson", checks::tsirelson(&r.quadruple, sweeps, tol));
    add(report, "dichotomy", checks::dichotomy(&r.quadruple, tol));
    add(report, "tomography", checks::round_trip(sweeps, tol));
    add(report, "counting", checks::counting_range());
    add(report, "mixing", checks::mixing(tol));
    add(report, "swap", checks::swap(tol));
    add(report, "flow", checks::flow());
    add(report, "sampling", checks::statistical(&r.state, &r.quadruple, &r.plan, tol));
    add(report, "single_qubit", checks::single_qubit(tol));
    add(report, "mutation", checks::mutation_sensitivity(&r.state, &r.quadruple, tol));
}

#[derive(Debug, Serialize)]
struct ReconstructionBlock {
    input: PathBuf,
    qubits: usize,
    min_eigenvalue: Option<f64>,
    /// Row-major `[re, im]` entries.
    matrix: Option<Vec<Vec<[f64; 2]>>>,
    error: Option<String>,
}

fn tomography_from_csv(path: &Path, report: &mut Report) -> CliResult<()> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let c = CorrelationVector::from_csv(&text).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let (block, check) = match reconstruct(&c) {
        Ok(w) => {
            let m = w.matrix();
            let matrix = (0..m.rows())
                .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect();
            let min = w.min_eigenvalue().ok();
            (
                ReconstructionBlock {
                    input: path.to_path_buf(),
                    qubits: c.qubits(),
                    min_eigenvalue: min,
                    matrix: Some(matrix),
                    error: None,
                },
                Check::new(
                    "tomography",
                    "physical_reconstruction",
                    true,
                    format!("{}-qubit state, min eigenvalue {:e}", c.qubits(), min.unwrap_or(f64::NAN)),
                ),
            )
        }
        Err(e) => (
            ReconstructionBlock {
                input: path.to_path_buf(),
                qubits: c.qubits(),
                min_eigenvalue: None,
                matrix: None,
                error: Some(e.to_string()),
            },
            Check::new("tomography", "physical_reconstruction", false, e.to_string()),
        ),
    };
    add(report, "tomography", (block, check));
    Ok(())
}
