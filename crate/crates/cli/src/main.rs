use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use posbody::adapters::ProblemKind;
use posbody::harness::{replicate, run_chase, run_problem, RoundingMode, RunConfig};
use posbody::lp::solve_recourse_steps;
use posbody::lp::TimeStep;
use posbody::stream::Stream;
use posbody::updates::{parse_updates, ProblemInstance};
use posbody::Error;

#[derive(Parser)]
#[command(name = "posbody", version, about = "Online chasing of positive bodies with low recourse")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// Projection accuracy for raw streams, in (0, 1].
    #[arg(long, global = true, default_value_t = 1.0)]
    eps: f64,
    /// Body chasing accuracy, in (0, 1].
    #[arg(long, global = true, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    alpha: f64,
    /// Budget factor of the problem bodies.
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// MST sampling constant.
    #[arg(long, global = true, default_value_t = 1.0)]
    gamma: f64,
    /// Set cover frequency bound (defaults to the instance's).
    #[arg(long, global = true)]
    f: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Replications for `replicate`.
    #[arg(long, global = true, default_value_t = 10)]
    runs: usize,
    /// Weight file for raw streams (`index:weight` tokens).
    #[arg(long, global = true)]
    weights: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Cap on `2 n T` for the offline LP.
    #[arg(long, global = true, default_value_t = posbody::lp::DEFAULT_SIZE_CAP)]
    oracle_cap: usize,
    /// Set cover rounding mode.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Det)]
    mode: Mode,
    /// Also solve the offline recourse LP.
    #[arg(long, global = true)]
    offline: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Det,
    Rand,
}

#[derive(Subcommand)]
enum Command {
    /// Project onto a raw constraint stream.
    Chase { stream: PathBuf },
    /// Chase a stream and build both dual certificates.
    Certify { stream: PathBuf },
    /// Optimal offline recourse of a raw stream.
    OfflineOpt { stream: PathBuf },
    Setcover { updates: PathBuf },
    Matching { updates: PathBuf },
    Mst { updates: PathBuf },
    /// Fractional load balancing (no rounding).
    Loadbalance { updates: PathBuf },
    /// Repeat a problem run over consecutive seeds.
    Replicate { updates: PathBuf },
}

enum Failure {
    Parse(String),
    Contract(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_parse() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Contract(e.to_string())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Contract(format!("{}: {e}", path.display())))
}

fn load_stream(path: &Path, opts: &Opts) -> Result<Stream, Failure> {
    let text = read(path)?;
    let weights = opts.weights.as_deref().map(read).transpose()?;
    Ok(Stream::parse(&text, weights.as_deref())?)
}

fn load_problem(path: &Path, expected: Option<ProblemKind>) -> Result<ProblemInstance, Failure> {
    let instance = parse_updates(&read(path)?)?;
    if let Some(kind) = expected {
        if instance.kind() != kind {
            return Err(Failure::Parse(format!("{} holds a {:?} instance", path.display(), instance.kind())));
        }
    }
    Ok(instance)
}

fn config(opts: &Opts) -> RunConfig {
    RunConfig {
        eps: opts.eps,
        delta: opts.delta,
        alpha: opts.alpha,
        beta: opts.beta,
        gamma: opts.gamma,
        f: opts.f,
        seed: opts.seed,
        mode: match opts.mode {
            Mode::Det => RoundingMode::Det,
            Mode::Rand => RoundingMode::Rand,
        },
        certify: false,
        offline: opts.offline,
        oracle_cap: opts.oracle_cap,
        ..RunConfig::default()
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let opts = &cli.opts;
    let mut cfg = config(opts);
    let problem = |path: &Path, kind| -> Result<String, Failure> {
        Ok(run_problem(&cfg, &load_problem(path, Some(kind))?)?.to_jsonl())
    };
    match &cli.command {
        Command::Chase { stream } => Ok(run_chase(&cfg, &load_stream(stream, opts)?)?.to_jsonl()),
        Command::Setcover { updates } => problem(updates, ProblemKind::SetCover),
        Command::Matching { updates } => problem(updates, ProblemKind::Matching),
        Command::Mst { updates } => problem(updates, ProblemKind::Mst),
        Command::Loadbalance { updates } => problem(updates, ProblemKind::LoadBalance),
        Command::Certify { stream } => {
            cfg.certify = true;
            Ok(run_chase(&cfg, &load_stream(stream, opts)?)?.to_jsonl())
        }
        Command::OfflineOpt { stream } => {
            let stream = load_stream(stream, opts)?;
            let steps: Vec<TimeStep> = stream
                .constraints
                .iter()
                .map(|h| TimeStep {
                    constraints: vec![h.clone()],
                    frozen: Vec::new(),
                })
                .collect();
            let sol = solve_recourse_steps(&steps, &stream.weights, opts.oracle_cap)?;
            let trajectory: Vec<&[f64]> = sol.trajectory.iter().map(|x| x.values()).collect();
            let out = serde_json::json!({
                "value": sol.value,
                "pivots": sol.pivots,
                "trajectory": trajectory,
            });
            Ok(format!("{out}\n"))
        }
        Command::Replicate { updates } => {
            let instance = load_problem(updates, None)?;
            let summary = replicate(&cfg, opts.runs, |c| run_problem(c, &instance))?;
            Ok(format!("{}\n", serde_json::to_string(&summary).expect("summaries serialize")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|out| match &cli.opts.report {
        Some(path) => fs::write(path, out).map_err(|e| Failure::Contract(format!("{}: {e}", path.display()))),
        None => {
            print!("{out}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Contract(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Parse(msg)) => {
            eprintln!("parse error: {msg}");
            ExitCode::from(2)
        }
    }
}
