//! Self-play experiments: configuration, learning-rate schedules, the
//! adaptive learning-rate controller, and CSV/JSON output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, RvuReport, StabilityReport, VarianceCheck, VarianceTracker};
use crate::error::{Error, Result};
use crate::game::{Game, StrategyProfile};
use crate::internal::{ArboDynamics, SlOmwu, MAX_ARBO_ACTIONS};
use crate::learner::{InnerRecord, Learner, MwuLearner};
use crate::metrics::{self, RegretAccumulator, RoundRecord, RunTrace};
use crate::swap::BmOmwu;

/// Header of the per-round regret CSV.
pub const CSV_HEADER: &str = "t,player,external_regret,internal_regret_raw,internal_regret_clamped,swap_regret,ce_gap_running,eta,max_consec_ratio";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dynamics {
    /// OMWU directly over actions.
    Omwu,
    /// Plain MWU directly over actions.
    Mwu,
    SlOmwu,
    /// SL construction with plain MWU over pairs.
    SlMwu,
    BmOmwu,
    /// BM construction with plain MWU copies.
    BmMwu,
    Arbo,
}

impl Dynamics {
    pub const ALL: [Dynamics; 7] = [
        Dynamics::Omwu,
        Dynamics::Mwu,
        Dynamics::SlOmwu,
        Dynamics::SlMwu,
        Dynamics::BmOmwu,
        Dynamics::BmMwu,
        Dynamics::Arbo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dynamics::Omwu => "omwu",
            Dynamics::Mwu => "mwu",
            Dynamics::SlOmwu => "sl-omwu",
            Dynamics::SlMwu => "sl-mwu",
            Dynamics::BmOmwu => "bm-omwu",
            Dynamics::BmMwu => "bm-mwu",
            Dynamics::Arbo => "arbo",
        }
    }

    /// Dimension of each inner minimizer for `n` actions.
    pub fn inner_dimension(self, n: usize) -> usize {
        match self {
            Dynamics::Omwu | Dynamics::Mwu | Dynamics::BmOmwu | Dynamics::BmMwu => n,
            Dynamics::SlOmwu | Dynamics::SlMwu => n * (n - 1),
            Dynamics::Arbo => n.pow(n as u32 - 1),
        }
    }

    fn build(self, n: usize, eta: f64) -> Result<Box<dyn Learner>> {
        Ok(match self {
            Dynamics::Omwu => Box::new(MwuLearner::optimistic(n, eta)),
            Dynamics::Mwu => Box::new(MwuLearner::non_optimistic(n, eta)),
            Dynamics::SlOmwu => Box::new(SlOmwu::new(n, eta)),
            Dynamics::SlMwu => Box::new(SlOmwu::non_optimistic(n, eta)),
            Dynamics::BmOmwu => Box::new(BmOmwu::new(n, eta)),
            Dynamics::BmMwu => Box::new(BmOmwu::non_optimistic(n, eta)),
            Dynamics::Arbo => Box::new(ArboDynamics::new(n, eta)?),
        })
    }
}

impl fmt::Display for Dynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dynamics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dynamics::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown dynamics '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaRule {
    Fixed(f64),
    /// `1/(C m log⁴T)`
    TheoremInternal,
    /// `1/(C m n_i³ log⁴T)`
    TheoremSwap,
    /// `√(log(dim)/T)` with `dim` the inner minimizer's dimension.
    Adversarial,
    /// Theorem schedule until the variance inequality first fails, then
    /// the adversarial rate with restarted inner state.
    Adaptive,
}

impl FromStr for EtaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem-internal" => Ok(EtaRule::TheoremInternal),
            "theorem-swap" => Ok(EtaRule::TheoremSwap),
            "adversarial" => Ok(EtaRule::Adversarial),
            "adaptive" => Ok(EtaRule::Adaptive),
            other => other
                .strip_prefix("fixed:")
                .and_then(|v| v.parse().ok())
                .map(EtaRule::Fixed)
                .ok_or_else(|| Error::Config(format!("unknown eta rule '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameSource {
    File(PathBuf),
    Random { action_counts: Vec<usize>, seed: u64 },
}

impl GameSource {
    pub fn load(&self) -> Result<Game> {
        match self {
            GameSource::File(path) => {
                let bytes = fs::read(path).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                Game::from_json(&bytes)
            }
            GameSource::Random {
                action_counts,
                seed,
            } => Game::random(action_counts, *seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub game: GameSource,
    pub dynamics: Dynamics,
    pub horizon: usize,
    pub eta_rule: EtaRule,
    /// Constant `C` of the theorem schedules.
    pub schedule_constant: f64,
    pub log_base: LogBase,
    /// Constant on the `H⁵` term used by the adaptive rule and reports.
    pub c_prime: f64,
    /// Constant of the RVU check.
    pub rvu_constant: f64,
    /// Keep inner distributions and losses in the trace.
    pub record_inner: bool,
}

impl RunConfig {
    pub fn new(game: GameSource, dynamics: Dynamics, horizon: usize, eta_rule: EtaRule) -> Self {
        RunConfig {
            game,
            dynamics,
            horizon,
            eta_rule,
            schedule_constant: 1.0,
            log_base: LogBase::Natural,
            c_prime: diagnostics::DEFAULT_C_PRIME,
            rvu_constant: 64.0,
            record_inner: true,
        }
    }

    pub fn validate(&self, game: &Game) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if !(self.schedule_constant.is_finite() && self.schedule_constant > 0.0) {
            return Err(Error::Config("schedule constant must be positive".into()));
        }
        if let EtaRule::Fixed(eta) = self.eta_rule {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(Error::Config(format!("learning rate {eta} must be positive")));
            }
        }
        if self.dynamics == Dynamics::Arbo {
            if let Some(&n) = game.action_counts().iter().find(|&&n| n > MAX_ARBO_ACTIONS) {
                return Err(Error::SizeOutOfRange {
                    n,
                    min: 2,
                    max: MAX_ARBO_ACTIONS,
                });
            }
        }
        Ok(())
    }

    /// `log T` for the schedules, floored at 1 so short horizons keep a
    /// finite rate.
    fn horizon_log(&self) -> f64 {
        self.log_base.log(self.horizon as f64).max(1.0)
    }

    /// Learning rate of `player` under a non-adaptive reading of the rule.
    pub fn eta_for(&self, game: &Game, player: usize) -> f64 {
        let m = game.num_players() as f64;
        let n = game.action_counts()[player];
        let log4 = self.horizon_log().powi(4);
        match self.eta_rule {
            EtaRule::Fixed(eta) => eta,
            EtaRule::TheoremInternal => 1.0 / (self.schedule_constant * m * log4),
            EtaRule::TheoremSwap => {
                1.0 / (self.schedule_constant * m * (n as f64).powi(3) * log4)
            }
            EtaRule::Adversarial => {
                adversarial_eta(self.dynamics.inner_dimension(n), self.horizon)
            }
            EtaRule::Adaptive => {
                let base = if matches!(self.dynamics, Dynamics::BmOmwu | Dynamics::BmMwu) {
                    EtaRule::TheoremSwap
                } else {
                    EtaRule::TheoremInternal
                };
                RunConfig {
                    eta_rule: base,
                    ..self.clone()
                }
                .eta_for(game, player)
            }
        }
    }
}

/// `√(ln(dim)/T)`
pub fn adversarial_eta(dim: usize, horizon: usize) -> f64 {
    ((dim as f64).ln() / horizon as f64).sqrt()
}

/// Watches the variance inequality of every inner minimizer of one player
/// and decides when to fall back to the adversarial rate.
#[derive(Debug, Clone)]
pub struct AdaptiveController {
    horizon: usize,
    c_prime: f64,
    inner_dimension: usize,
    trackers: Vec<VarianceTracker>,
    switched_at: Option<usize>,
}

impl AdaptiveController {
    pub fn new(inner_dimension: usize, horizon: usize, c_prime: f64) -> Self {
        AdaptiveController {
            horizon,
            c_prime,
            inner_dimension,
            trackers: Vec::new(),
            switched_at: None,
        }
    }

    pub fn adversarial_eta(&self) -> f64 {
        adversarial_eta(self.inner_dimension, self.horizon)
    }

    /// 1-based round whose check failed.
    pub fn switched_at(&self) -> Option<usize> {
        self.switched_at
    }

    /// Feeds one completed round; returns the new learning rate when the
    /// inequality fails for the first time.
    pub fn observe(&mut self, round: usize, record: &InnerRecord) -> Result<Option<f64>> {
        if self.switched_at.is_some() {
            return Ok(None);
        }
        if self.trackers.is_empty() {
            self.trackers = record
                .distributions
                .iter()
                .map(|p| VarianceTracker::new(p.len()))
                .collect();
        }
        let mut violated = false;
        for ((tracker, p), l) in self
            .trackers
            .iter_mut()
            .zip(&record.distributions)
            .zip(&record.losses)
        {
            tracker.push(p, l)?;
            violated |= !tracker.report(self.horizon, self.c_prime).holds;
        }
        if violated {
            self.switched_at = Some(round);
            Ok(Some(self.adversarial_eta()))
        } else {
            Ok(None)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub t: usize,
    pub player: usize,
    pub external_regret: f64,
    pub internal_regret_raw: f64,
    pub internal_regret_clamped: f64,
    pub swap_regret: f64,
    pub ce_gap_running: f64,
    pub eta: f64,
    pub max_consec_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSummary {
    pub player: usize,
    pub actions: usize,
    pub external_regret: f64,
    pub internal_regret_raw: f64,
    pub internal_regret_clamped: f64,
    pub swap_regret: f64,
    pub best_swap: Vec<usize>,
    pub initial_eta: f64,
    pub final_eta: f64,
    /// 1-based round after which the adaptive rule switched.
    pub switched_at: Option<usize>,
    pub stability: Option<StabilityReport>,
    pub variance_checks: Vec<VarianceCheck>,
    pub rvu: Option<RvuReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: RunConfig,
    pub action_counts: Vec<usize>,
    pub horizon: usize,
    pub players: Vec<PlayerSummary>,
    /// CE gap of the average product distribution.
    pub ce_gap: f64,
    /// `max_i internal_regret_raw_i / T`, equal to `ce_gap` up to rounding.
    pub ce_gap_from_regret: f64,
    pub stability_passed: Option<bool>,
    pub variance_inequality_holds: Option<bool>,
    pub rvu_holds: Option<bool>,
}

impl Summary {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("summary serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| crate::game::parse_error(bytes, &e))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: RunTrace,
    pub curve: Vec<CurveRow>,
    pub summary: Summary,
}

/// Runs the configured self-play and summarizes it.
pub fn run_dynamics(config: &RunConfig) -> Result<RunOutput> {
    let game = config.game.load()?;
    run_on_game(&game, config)
}

/// Like [`run_dynamics`] with the game already loaded; `config.game` is only
/// echoed.
pub fn run_on_game(game: &Game, config: &RunConfig) -> Result<RunOutput> {
    config.validate(game)?;
    let m = game.num_players();
    let horizon = config.horizon;
    let mut learners: Vec<Box<dyn Learner>> = (0..m)
        .map(|i| config.dynamics.build(game.action_counts()[i], config.eta_for(game, i)))
        .collect::<Result<_>>()?;
    let mut controllers: Vec<Option<AdaptiveController>> = (0..m)
        .map(|i| {
            (config.eta_rule == EtaRule::Adaptive).then(|| {
                AdaptiveController::new(
                    learners[i].inner_dimension(),
                    horizon,
                    config.c_prime,
                )
            })
        })
        .collect();
    let initial_etas: Vec<f64> = learners.iter().map(|l| l.eta()).collect();

    let mut trace = RunTrace::new(game.action_counts().to_vec());
    trace.dynamics = config.dynamics.name().to_string();
    let mut regrets: Vec<RegretAccumulator> = game
        .action_counts()
        .iter()
        .map(|&n| RegretAccumulator::new(n))
        .collect();
    let mut previous_inner: Vec<Option<Vec<Vec<f64>>>> = vec![None; m];
    let mut max_ratio = vec![1.0f64; m];
    let mut curve = Vec::with_capacity(horizon * m);

    for round in 0..horizon {
        let at = |e: Error| Error::AtRound {
            round: round + 1,
            source: Box::new(e),
        };
        let etas: Vec<f64> = learners.iter().map(|l| l.eta()).collect();
        let strategies = learners
            .iter_mut()
            .map(|l| l.next_strategy())
            .collect::<Result<Vec<_>>>()
            .map_err(at)?;
        let profile = StrategyProfile::new(strategies);
        let losses = game.expected_losses(&profile).map_err(at)?;
        let mut inner = Vec::with_capacity(m);
        for (i, learner) in learners.iter_mut().enumerate() {
            learner.observe_loss(&losses[i]).map_err(at)?;
            let record = learner.inner_record();
            if let (Some(rec), Some(prev)) = (&record, &previous_inner[i]) {
                for (a, b) in prev.iter().zip(&rec.distributions) {
                    for (&x, &y) in a.iter().zip(b) {
                        max_ratio[i] = max_ratio[i].max((x / y).max(y / x));
                    }
                }
            }
            previous_inner[i] = record.as_ref().map(|r| r.distributions.clone());
            if let (Some(ctrl), Some(rec)) = (controllers[i].as_mut(), &record) {
                if let Some(eta) = ctrl.observe(round + 1, rec).map_err(at)? {
                    learner.restart(eta);
                    previous_inner[i] = None;
                    if round + 1 < horizon {
                        trace.restarts[i].push(round + 1);
                    }
                }
            }
            inner.push(if config.record_inner { record } else { None });
        }
        for (acc, (x, l)) in regrets.iter_mut().zip(profile.strategies.iter().zip(&losses)) {
            acc.push(x.as_slice(), l);
        }
        let t = round + 1;
        let ce_gap_running = regrets
            .iter()
            .map(|a| a.internal_raw())
            .fold(f64::NEG_INFINITY, f64::max)
            / t as f64;
        for (i, acc) in regrets.iter().enumerate() {
            curve.push(CurveRow {
                t,
                player: i,
                external_regret: acc.external(),
                internal_regret_raw: acc.internal_raw(),
                internal_regret_clamped: acc.internal_clamped(),
                swap_regret: acc.swap(),
                ce_gap_running,
                eta: etas[i],
                max_consec_ratio: max_ratio[i],
            });
        }
        trace.rounds.push(RoundRecord {
            strategies: profile.strategies.into_iter().map(|x| x.into_vec()).collect(),
            losses,
            etas,
            inner,
        });
    }

    let summary = summarize(game, config, &trace, &regrets, &initial_etas, &controllers)?;
    Ok(RunOutput {
        trace,
        curve,
        summary,
    })
}

fn summarize(
    game: &Game,
    config: &RunConfig,
    trace: &RunTrace,
    regrets: &[RegretAccumulator],
    initial_etas: &[f64],
    controllers: &[Option<AdaptiveController>],
) -> Result<Summary> {
    let mu = metrics::average_product_distribution(trace)?;
    let ce = metrics::ce_gap(game, &mu)?;
    let horizon = trace.horizon();
    let has_inner = config.record_inner;
    let sl = matches!(config.dynamics, Dynamics::SlOmwu | Dynamics::SlMwu);
    let mut players = Vec::new();
    for (i, acc) in regrets.iter().enumerate() {
        let final_eta = trace.rounds.last().map_or(initial_etas[i], |r| r.etas[i]);
        let (stability, variance_checks, rvu) = if has_inner {
            (
                Some(diagnostics::stability_check(trace, i)?),
                diagnostics::check_variance_inequality(trace, i, config.c_prime)?,
                if sl {
                    Some(diagnostics::rvu_check(trace, i, final_eta, config.rvu_constant)?)
                } else {
                    None
                },
            )
        } else {
            (None, Vec::new(), None)
        };
        players.push(PlayerSummary {
            player: i,
            actions: game.action_counts()[i],
            external_regret: acc.external(),
            internal_regret_raw: acc.internal_raw(),
            internal_regret_clamped: acc.internal_clamped(),
            swap_regret: acc.swap(),
            best_swap: acc.best_swap(),
            initial_eta: initial_etas[i],
            final_eta,
            switched_at: controllers[i].as_ref().and_then(|c| c.switched_at()),
            stability,
            variance_checks,
            rvu,
        });
    }
    let all = |f: &dyn Fn(&PlayerSummary) -> Option<bool>| -> Option<bool> {
        players.iter().map(f).collect::<Option<Vec<bool>>>().map(|v| v.iter().all(|&b| b))
    };
    let stability_passed = all(&|p| p.stability.as_ref().map(|s| s.passed));
    let variance_inequality_holds =
        has_inner.then(|| players.iter().all(|p| p.variance_checks.iter().all(|c| c.holds)));
    let rvu_holds = all(&|p| p.rvu.as_ref().map(|r| r.holds));
    let ce_gap_from_regret = regrets
        .iter()
        .map(|a| a.internal_raw())
        .fold(f64::NEG_INFINITY, f64::max)
        / horizon as f64;
    Ok(Summary {
        config: config.clone(),
        action_counts: game.action_counts().to_vec(),
        horizon,
        players,
        ce_gap: ce.gap,
        ce_gap_from_regret,
        stability_passed,
        variance_inequality_holds,
        rvu_holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!("unknown format '{s}'"))),
        }
    }
}

/// Renders the regret curve in long format, one row per round and player.
pub fn curve_csv(curve: &[CurveRow]) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::with_capacity(64 * (curve.len() + 1)));
    if curve.is_empty() {
        writer
            .write_record(CSV_HEADER.split(','))
            .expect("writing to a Vec");
    }
    for row in curve {
        writer.serialize(row).expect("writing to a Vec");
    }
    writer.into_inner().expect("flushing a Vec")
}

pub fn curve_json(curve: &[CurveRow]) -> Vec<u8> {
    let mut out = serde_json::to_vec(curve).expect("curve serializes");
    out.push(b'\n');
    out
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `regret.csv` or `regret.json`, `summary.json`, and optionally
/// `trace.json` into `dir`; returns the paths written.
pub fn emit_outputs(
    output: &RunOutput,
    dir: &Path,
    format: OutputFormat,
    with_trace: bool,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let (name, bytes) = match format {
        OutputFormat::Csv => ("regret.csv", curve_csv(&output.curve)),
        OutputFormat::Json => ("regret.json", curve_json(&output.curve)),
    };
    for (name, bytes) in [(name, bytes), ("summary.json", output.summary.to_json())] {
        let path = dir.join(name);
        write_file(&path, &bytes)?;
        written.push(path);
    }
    if with_trace {
        let path = dir.join("trace.json");
        write_file(&path, &output.trace.to_json())?;
        written.push(path);
    }
    Ok(written)
}
