//! `vqe-bench`: run VQE convergence, correlation, gradient-variance and exact
//! diagonalization experiments and write CSV tables plus a JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use vqe_core::experiments::output::{
    convergence_csv, correlation_csv, correlation_summary_csv, ed_csv, plateau_aggregate_csv,
    plateau_component_csv, plateau_raw_csv,
};
use vqe_core::experiments::{
    run_convergence, run_correlation, run_ed, run_plateau, run_plateau_serial, Experiment, ExperimentConfig,
    RawConfig,
};

const DEFAULT_OUTPUT: &str = "results";

#[derive(Parser)]
#[command(name = "vqe-bench", version, about = "Statevector VQE experiments with exact references")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Layerwise VQE energies against the exact ground state.
    Vqe(CommonArgs),
    /// Density-density correlations of optimized and exact states.
    Correlation(CommonArgs),
    /// Gradient variance over random parameter points.
    Plateau {
        #[command(flatten)]
        common: CommonArgs,
        /// Evaluate samples on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Exact ground energy and degeneracy.
    Ed(CommonArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Config file of `key = value` lines; flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// hubbard-nnn | tfim
    #[arg(long)]
    model: Option<String>,
    /// jw | bk | none
    #[arg(long)]
    mapping: Option<String>,
    /// match | generic
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated qubit counts.
    #[arg(long, value_name = "LIST")]
    qubits: Option<String>,
    /// Comma-separated layer counts.
    #[arg(long, value_name = "LIST", conflicts_with = "max_layers")]
    layers: Option<String>,
    /// Every depth up to this one.
    #[arg(long, value_name = "INT")]
    max_layers: Option<String>,
    /// Hopping energy.
    #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
    t: Option<String>,
    /// Nearest-neighbour interaction.
    #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
    v1: Option<String>,
    /// Next-nearest-neighbour interaction.
    #[arg(long, value_name = "REAL", allow_negative_numbers = true)]
    v2: Option<String>,
    /// Transverse field.
    #[arg(long = "h", value_name = "REAL", allow_negative_numbers = true)]
    field: Option<String>,
    /// Close the chain into a ring; a bare flag means true.
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    periodic: Option<String>,
    /// Particle count or `half`.
    #[arg(long, value_name = "INT|half")]
    filling: Option<String>,
    /// Random parameter points per (n, layers) cell.
    #[arg(long, value_name = "INT")]
    samples: Option<String>,
    /// Finite-difference step.
    #[arg(long, value_name = "REAL")]
    delta: Option<String>,
    #[arg(long, value_name = "INT")]
    seed: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "PATH")]
    output: Option<String>,
}

impl CommonArgs {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        [
            ("model", &self.model),
            ("mapping", &self.mapping),
            ("family", &self.family),
            ("qubits", &self.qubits),
            ("layers", &self.layers),
            ("max-layers", &self.max_layers),
            ("t", &self.t),
            ("v1", &self.v1),
            ("v2", &self.v2),
            ("h", &self.field),
            ("periodic", &self.periodic),
            ("filling", &self.filling),
            ("samples", &self.samples),
            ("delta", &self.delta),
            ("seed", &self.seed),
            ("output", &self.output),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config_file(path: &Path, e: std::io::Error) -> Self {
        Self {
            code: 3,
            message: format!("cannot read config file '{}': {e}", path.display()),
        }
    }

    fn invalid(e: impl std::fmt::Display) -> Self {
        Self {
            code: 4,
            message: format!("invalid configuration: {e}"),
        }
    }

    fn output(path: &Path, e: impl std::fmt::Display) -> Self {
        Self {
            code: 5,
            message: format!("cannot write output to '{}': {e}", path.display()),
        }
    }

    fn run(e: impl std::fmt::Display) -> Self {
        Self {
            code: 1,
            message: format!("run failed: {e}"),
        }
    }
}

fn describe(e: vqe_core::Error) -> String {
    match e {
        vqe_core::Error::Config(m) => m,
        other => other.to_string(),
    }
}

fn resolve(args: &CommonArgs, experiment: Experiment) -> Result<ExperimentConfig, Failure> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::config_file(path, e))?;
            RawConfig::parse(&text).map_err(|e| Failure::invalid(format!("{}: {}", path.display(), describe(e))))?
        }
        None => RawConfig::default(),
    };
    for (key, value) in args.overrides() {
        raw.set(key, value).map_err(|e| Failure::invalid(format!("--{key}: {}", describe(e))))?;
    }
    raw.resolve(experiment).map_err(|e| Failure::invalid(describe(e)))
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn prepare(cfg: &ExperimentConfig) -> Result<Self, Failure> {
        let dir = PathBuf::from(cfg.output.as_deref().unwrap_or(DEFAULT_OUTPUT));
        fs::create_dir_all(&dir).map_err(|e| Failure::output(&dir, e))?;
        if !dir.is_dir() {
            return Err(Failure::output(&dir, "not a directory"));
        }
        // probe before spending time on the run
        let probe = dir.join(".vqe-bench-probe");
        fs::write(&probe, b"").map_err(|e| Failure::output(&dir, e))?;
        let _ = fs::remove_file(probe);
        Ok(Self { dir, written: Vec::new() })
    }

    fn write(&mut self, name: &str, text: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| Failure::output(&path, e))?;
        self.written.push(name.to_string());
        Ok(())
    }
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn execute(command: Command) -> Result<(), Failure> {
    let (experiment, args, serial) = match &command {
        Command::Vqe(a) => (Experiment::Convergence, a, false),
        Command::Correlation(a) => (Experiment::Correlation, a, false),
        Command::Plateau { common, serial } => (Experiment::Plateau, common, *serial),
        Command::Ed(a) => (Experiment::Ed, a, false),
    };
    let cfg = resolve(args, experiment)?;

    if experiment == Experiment::Ed {
        let rows = run_ed(&cfg).map_err(Failure::run)?;
        for r in &rows {
            let sector = r.particles.map_or("all".to_string(), |k| k.to_string());
            println!("n={} particles={sector} E0={:.12} degeneracy={}", r.n, r.e0, r.degeneracy);
        }
        if cfg.output.is_some() {
            let mut out = Outputs::prepare(&cfg)?;
            out.write("ed.csv", &ed_csv(&rows).map_err(Failure::run)?)?;
        }
        return Ok(());
    }

    let mut out = Outputs::prepare(&cfg)?;
    let started_at = now();
    let clock = Instant::now();
    let (runs, references) = match experiment {
        Experiment::Convergence => {
            let rep = run_convergence(&cfg).map_err(Failure::run)?;
            let text = convergence_csv(&rep.records).map_err(Failure::run)?;
            out.write("convergence.csv", &text)?;
            print!("{text}");
            (json!(rep.statuses), json!(rep.references))
        }
        Experiment::Correlation => {
            let rep = run_correlation(&cfg).map_err(Failure::run)?;
            out.write("correlation.csv", &correlation_csv(&rep.records).map_err(Failure::run)?)?;
            let summary = correlation_summary_csv(&rep.summary).map_err(Failure::run)?;
            out.write("correlation_summary.csv", &summary)?;
            print!("{summary}");
            (json!(rep.statuses), json!(rep.references))
        }
        Experiment::Plateau => {
            let rep = if serial { run_plateau_serial(&cfg) } else { run_plateau(&cfg) }.map_err(Failure::run)?;
            out.write("plateau_raw.csv", &plateau_raw_csv(&rep).map_err(Failure::run)?)?;
            let aggregate = plateau_aggregate_csv(&rep).map_err(Failure::run)?;
            out.write("plateau_aggregate.csv", &aggregate)?;
            out.write("plateau_components.csv", &plateau_component_csv(&rep).map_err(Failure::run)?)?;
            print!("{aggregate}");
            let runs: Vec<Value> = rep
                .aggregates
                .iter()
                .map(|a| {
                    let excluded: Vec<Value> = rep
                        .samples
                        .iter()
                        .filter(|s| s.n == a.n && s.layers == a.layers)
                        .filter_map(|s| s.excluded.as_ref().map(|why| json!({"sample": s.sample, "reason": why})))
                        .collect();
                    json!({
                        "n": a.n,
                        "layers": a.layers,
                        "status": if a.samples_excluded == 0 { "ok" } else { "partial" },
                        "samples_used": a.samples_used,
                        "samples_excluded": a.samples_excluded,
                        "excluded": excluded,
                    })
                })
                .collect();
            (Value::Array(runs), Value::Null)
        }
        Experiment::Ed => unreachable!(),
    };
    let manifest = json!({
        "tool": "vqe-bench",
        "version": env!("CARGO_PKG_VERSION"),
        "library_version": vqe_core::VERSION,
        "command": experiment.name(),
        "config": cfg,
        "seed": cfg.seed,
        "parallel": experiment == Experiment::Plateau && !serial,
        "started_at": started_at,
        "finished_at": now(),
        "wall_time_seconds": clock.elapsed().as_secs_f64(),
        "references": references,
        "runs": runs,
        "outputs": out.written,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(Failure::run)?;
    out.write("manifest.json", &(text + "\n"))?;
    eprintln!("wrote {} files to {}", out.written.len(), out.dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
