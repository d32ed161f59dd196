use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ce_dynamics::diagnostics::{self, SmoothnessReport, StabilityReport, VarianceCheck};
use ce_dynamics::internal::StationaryMethod;
use ce_dynamics::markov_tree::log_domain_tree_stationary;
use ce_dynamics::runner::{self, LogBase, OutputFormat};
use ce_dynamics::{
    enumerate_arborescences, verify_equivalence, Dynamics, Error, EtaRule, Game, GameSource,
    RunConfig, RunTrace, TransitionMatrix,
};

#[derive(Parser)]
#[command(name = "ce-dynamics", version, about = "No-regret dynamics and correlated equilibria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run self-play and write regret curves and a summary.
    Run(RunArgs),
    /// Check SL-OMWU against OMWU over arborescences on a game.
    Equivalence(EquivalenceArgs),
    /// List the arborescences of the complete digraph.
    Trees(TreesArgs),
    /// Stationary distribution of a row-stochastic matrix.
    Stationary(StationaryArgs),
    /// Diagnostics on a saved trace.
    Diagnose(DiagnoseArgs),
    /// Generate a random game.
    Gen(GenArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GameArgs {
    /// Game JSON file.
    #[arg(long)]
    game: Option<PathBuf>,
    /// Random game with these action counts, e.g. 3,3.
    #[arg(long, value_delimiter = ',')]
    random: Option<Vec<usize>>,
}

impl GameArgs {
    fn source(&self, seed: u64) -> GameSource {
        match (&self.game, &self.random) {
            (Some(path), _) => GameSource::File(path.clone()),
            (None, Some(counts)) => GameSource::Random {
                action_counts: counts.clone(),
                seed,
            },
            (None, None) => unreachable!("clap enforces the group"),
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct EtaArgs {
    /// Fixed learning rate.
    #[arg(long)]
    eta: Option<f64>,
    /// theorem-internal, theorem-swap, adversarial or adaptive.
    #[arg(long, value_parser = parse_via::<EtaRule>)]
    eta_rule: Option<EtaRule>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long, value_parser = parse_via::<Dynamics>)]
    dynamics: Dynamics,
    #[arg(long)]
    horizon: usize,
    #[command(flatten)]
    eta: EtaArgs,
    /// Seed for a random game.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constant C of the theorem schedules.
    #[arg(long, default_value_t = 1.0)]
    schedule_constant: f64,
    /// Use log base 2 in the theorem schedules.
    #[arg(long)]
    log2: bool,
    #[arg(long, default_value_t = diagnostics::DEFAULT_C_PRIME)]
    c_prime: f64,
    #[arg(long, default_value_t = 64.0)]
    rvu_constant: f64,
    /// Output directory; the summary goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_via::<OutputFormat>)]
    format: OutputFormat,
    /// Also write trace.json.
    #[arg(long)]
    trace: bool,
    /// Do not record inner distributions (skips inner diagnostics).
    #[arg(long)]
    no_inner: bool,
}

#[derive(Args)]
struct EquivalenceArgs {
    #[command(flatten)]
    game: GameArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    #[arg(long, default_value_t = 200)]
    horizon: usize,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TreesArgs {
    /// Number of nodes.
    #[arg(long)]
    nodes: usize,
    /// Only trees rooted here (0-based).
    #[arg(long)]
    root: Option<usize>,
    #[arg(long, default_value = "csv", value_parser = parse_via::<OutputFormat>)]
    format: OutputFormat,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SolverArg {
    Linear,
    Tree,
    LogTree,
}

#[derive(Args)]
struct StationaryArgs {
    /// JSON array of matrix rows.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value = "linear")]
    method: SolverArg,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// trace.json written by `run --trace`.
    #[arg(long)]
    trace: PathBuf,
    /// Highest difference order (default ⌈log₂T⌉, at most T−1).
    #[arg(long)]
    order: Option<usize>,
    /// Smoothness parameter (default 1/(order+3)).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 64.0)]
    rvu_constant: f64,
    #[arg(long, default_value_t = diagnostics::DEFAULT_C_PRIME)]
    c_prime: f64,
    /// json: full report; csv: per-(order, round) smoothness table.
    #[arg(long, default_value = "json", value_parser = parse_via::<OutputFormat>)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Action counts, e.g. 3,3.
    #[arg(long, value_delimiter = ',', required = true)]
    actions: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_via<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failures of a command: library errors or a check that did not pass.
enum Failure {
    Lib(Error),
    CheckFailed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn emit(out: Option<&Path>, name: &str, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.display().to_string(),
                source,
            })?;
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => {
            std::io::stdout().write_all(bytes).map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable");
    v.push(b'\n');
    v
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let eta_rule = match (args.eta.eta, args.eta.eta_rule) {
        (Some(eta), _) => EtaRule::Fixed(eta),
        (None, Some(rule)) => rule,
        (None, None) => unreachable!("clap enforces the group"),
    };
    let mut config = RunConfig::new(args.game.source(args.seed), args.dynamics, args.horizon, eta_rule);
    config.schedule_constant = args.schedule_constant;
    config.log_base = if args.log2 { LogBase::Two } else { LogBase::Natural };
    config.c_prime = args.c_prime;
    config.rvu_constant = args.rvu_constant;
    config.record_inner = !args.no_inner;
    let output = runner::run_dynamics(&config)?;
    match args.out {
        Some(dir) => {
            for path in runner::emit_outputs(&output, &dir, args.format, args.trace)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => emit(None, "", &output.summary.to_json())?,
    }
    Ok(())
}

fn equivalence(args: EquivalenceArgs) -> Result<(), Failure> {
    let game = args.game.source(args.seed).load()?;
    let report = verify_equivalence(&game, args.eta, args.horizon, args.tolerance)?;
    emit(args.out.as_deref(), "equivalence.json", &pretty(&report))?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::CheckFailed(format!(
            "deviation {:e}, proportionality residual {:e} above {:e}",
            report.max_strategy_deviation, report.max_proportionality_residual, report.tolerance
        )))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io {
        path: "<csv>".into(),
        source: e.into(),
    }
}

fn trees(args: TreesArgs) -> Result<(), Failure> {
    let roots: Vec<usize> = match args.root {
        Some(r) => vec![r],
        None => (0..args.nodes).collect(),
    };
    let mut all = Vec::new();
    for root in roots {
        all.extend(enumerate_arborescences(args.nodes, root)?);
    }
    let bytes = match args.format {
        OutputFormat::Json => pretty(&all),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["tree".to_string(), "root".to_string()];
            header.extend((0..args.nodes).map(|v| format!("parent_{v}")));
            w.write_record(&header).map_err(csv_error)?;
            for (i, tree) in all.iter().enumerate() {
                let mut record = vec![i.to_string(), tree.root().to_string()];
                record.extend((0..args.nodes).map(|v| tree.parent(v).map_or(String::new(), |p| p.to_string())));
                w.write_record(&record).map_err(csv_error)?;
            }
            w.into_inner().map_err(|e| csv_error(e.into_error().into()))?
        }
    };
    emit(None, "", &bytes)?;
    Ok(())
}

#[derive(Serialize)]
struct StationaryOutput {
    stationary: Vec<f64>,
    residual: f64,
}

fn stationary(args: StationaryArgs) -> Result<(), Failure> {
    let bytes = std::fs::read(&args.matrix).map_err(|source| Error::Io {
        path: args.matrix.display().to_string(),
        source,
    })?;
    let q = TransitionMatrix::from_json(&bytes)?;
    let pi = match args.method {
        SolverArg::Linear => StationaryMethod::Numerical.solve(&q)?,
        SolverArg::Tree => StationaryMethod::TreeTheorem.solve(&q)?,
        SolverArg::LogTree => log_domain_tree_stationary(&q)?,
    };
    let residual = q.stationary_residual(pi.as_slice());
    emit(
        None,
        "",
        &pretty(&StationaryOutput {
            stationary: pi.into_vec(),
            residual,
        }),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct PlayerDiagnosis {
    player: usize,
    smoothness: Option<SmoothnessReport>,
    rvu: Option<diagnostics::RvuReport>,
    variance_checks: Vec<VarianceCheck>,
    stability: StabilityReport,
}

fn diagnose(args: DiagnoseArgs) -> Result<(), Failure> {
    let bytes = std::fs::read(&args.trace).map_err(|source| Error::Io {
        path: args.trace.display().to_string(),
        source,
    })?;
    let trace = RunTrace::from_json(&bytes)?;
    let horizon = trace.horizon();
    if horizon < 2 {
        return Err(Error::Config("diagnostics need at least two rounds".into()).into());
    }
    let order = args
        .order
        .unwrap_or_else(|| diagnostics::horizon_log(horizon) as usize)
        .min(horizon - 1);
    let alpha = args.alpha.unwrap_or(1.0 / (order as f64 + 3.0));
    let mut players = Vec::new();
    for player in 0..trace.num_players() {
        let sl = trace.dynamics.starts_with("sl-");
        let eta = trace.rounds[horizon - 1].etas[player];
        players.push(PlayerDiagnosis {
            player,
            smoothness: sl
                .then(|| diagnostics::smoothness_report(&trace, player, order, alpha))
                .transpose()?,
            rvu: sl
                .then(|| diagnostics::rvu_check(&trace, player, eta, args.rvu_constant))
                .transpose()?,
            variance_checks: diagnostics::check_variance_inequality(&trace, player, args.c_prime)?,
            stability: diagnostics::stability_check(&trace, player)?,
        });
    }
    match args.format {
        OutputFormat::Json => emit(args.out.as_deref(), "diagnostics.json", &pretty(&players))?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["player", "order", "t", "norm", "bound"]).map_err(csv_error)?;
            for p in &players {
                for row in p.smoothness.iter().flat_map(|s| &s.rows) {
                    w.serialize((p.player, row.order, row.t, row.norm, row.bound))
                        .map_err(csv_error)?;
                }
            }
            let out = w.into_inner().map_err(|e| csv_error(e.into_error().into()))?;
            emit(args.out.as_deref(), "smoothness.csv", &out)?;
        }
    }
    Ok(())
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let game = Game::random(&args.actions, args.seed)?;
    match args.out {
        Some(path) => std::fs::write(&path, game.to_json()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => emit(None, "", &game.to_json())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Equivalence(a) => equivalence(a),
        Command::Trees(a) => trees(a),
        Command::Stationary(a) => stationary(a),
        Command::Diagnose(a) => diagnose(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
        Err(Failure::CheckFailed(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(3)
        }
    }
}
