//! Regret accounting and correlated-equilibrium gaps.
//!
//! Every regret here is a function of the per-round strategies `x^(t)` and
//! loss vectors `ℓ^(t)` of one player. All three notions reduce to the
//! matrix `A[g][k] = Σ_t x^(t)[g] ℓ^(t)[k]`:
//!
//! * external: `Σ_g A[g][g] − min_k Σ_g A[g][k]`
//! * internal (pair `j→k`): `A[j][j] − A[j][k]`
//! * swap: `Σ_g (A[g][g] − min_k A[g][k])`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, StrategyProfile};
use crate::learner::InnerRecord;
use crate::simplex::SimplexVector;

/// Largest joint distribution materialized densely.
pub const MAX_DENSE_PROFILES: usize = 1_000_000;

/// One round of self-play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub strategies: Vec<Vec<f64>>,
    pub losses: Vec<Vec<f64>>,
    pub etas: Vec<f64>,
    /// Inner minimizer data per player (pair distribution and pair loss for
    /// SL-OMWU, rows of `Q` and scaled losses for BM-OMWU).
    pub inner: Vec<Option<InnerRecord>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunTrace {
    /// Name of the dynamics that produced the trace, if known.
    #[serde(default)]
    pub dynamics: String,
    pub action_counts: Vec<usize>,
    pub rounds: Vec<RoundRecord>,
    /// For each player, the 0-based rounds whose strategy came from freshly
    /// restarted inner state.
    pub restarts: Vec<Vec<usize>>,
}

impl RunTrace {
    pub fn new(action_counts: Vec<usize>) -> Self {
        let m = action_counts.len();
        RunTrace {
            dynamics: String::new(),
            action_counts,
            rounds: Vec::new(),
            restarts: vec![Vec::new(); m],
        }
    }

    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn strategies(&self, player: usize) -> impl Iterator<Item = &[f64]> + '_ {
        self.rounds.iter().map(move |r| r.strategies[player].as_slice())
    }

    pub fn losses(&self, player: usize) -> impl Iterator<Item = &[f64]> + '_ {
        self.rounds.iter().map(move |r| r.losses[player].as_slice())
    }

    pub fn inner(&self, player: usize) -> impl Iterator<Item = Option<&InnerRecord>> + '_ {
        self.rounds.iter().map(move |r| r.inner[player].as_ref())
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("trace serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| crate::game::parse_error(bytes, &e))
    }
}

/// Streaming regret bookkeeping for one player.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretAccumulator {
    n: usize,
    /// `a[g*n + k] = Σ_t x[g] ℓ[k]`
    a: Vec<f64>,
    rounds: usize,
}

impl RegretAccumulator {
    pub fn new(n: usize) -> Self {
        RegretAccumulator {
            n,
            a: vec![0.0; n * n],
            rounds: 0,
        }
    }

    pub fn from_trace(trace: &RunTrace, player: usize) -> Self {
        let mut acc = RegretAccumulator::new(trace.action_counts[player]);
        for (x, l) in trace.strategies(player).zip(trace.losses(player)) {
            acc.push(x, l);
        }
        acc
    }

    pub fn push(&mut self, x: &[f64], loss: &[f64]) {
        let n = self.n;
        for g in 0..n {
            for k in 0..n {
                self.a[g * n + k] += x[g] * loss[k];
            }
        }
        self.rounds += 1;
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn at(&self, g: usize, k: usize) -> f64 {
        self.a[g * self.n + k]
    }

    /// `Σ_t ⟨x^(t), ℓ^(t)⟩`
    pub fn realized_loss(&self) -> f64 {
        (0..self.n).map(|g| self.at(g, g)).sum()
    }

    /// `Σ_t ℓ^(t)[k]`
    pub fn action_loss(&self, k: usize) -> f64 {
        (0..self.n).map(|g| self.at(g, k)).sum()
    }

    pub fn external(&self) -> f64 {
        let best = (0..self.n)
            .map(|k| self.action_loss(k))
            .fold(f64::INFINITY, f64::min);
        self.realized_loss() - best
    }

    /// `Σ_t x[j](ℓ[j] − ℓ[k])`
    pub fn pair_regret(&self, j: usize, k: usize) -> f64 {
        self.at(j, j) - self.at(j, k)
    }

    /// Raw maximum over the `n(n−1)` pair swaps; may be negative.
    pub fn internal_raw(&self) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for j in 0..self.n {
            for k in (0..self.n).filter(|&k| k != j) {
                best = best.max(self.pair_regret(j, k));
            }
        }
        best
    }

    pub fn internal_clamped(&self) -> f64 {
        self.internal_raw().max(0.0)
    }

    /// Best swap function: `φ(g) = argmin_k A[g][k]`, lowest index on ties.
    pub fn best_swap(&self) -> Vec<usize> {
        (0..self.n)
            .map(|g| {
                let mut best = 0;
                for k in 1..self.n {
                    if self.at(g, k) < self.at(g, best) {
                        best = k;
                    }
                }
                best
            })
            .collect()
    }

    /// Regret against a given swap function `φ`.
    pub fn swap_regret_against(&self, phi: &[usize]) -> f64 {
        self.realized_loss() - (0..self.n).map(|g| self.at(g, phi[g])).sum::<f64>()
    }

    pub fn swap(&self) -> f64 {
        self.swap_regret_against(&self.best_swap())
    }
}

pub fn external_regret(trace: &RunTrace, player: usize) -> f64 {
    RegretAccumulator::from_trace(trace, player).external()
}

pub fn internal_regret(trace: &RunTrace, player: usize) -> f64 {
    RegretAccumulator::from_trace(trace, player).internal_raw()
}

pub fn swap_regret(trace: &RunTrace, player: usize) -> f64 {
    RegretAccumulator::from_trace(trace, player).swap()
}

/// A joint distribution over action profiles.
#[derive(Debug, Clone, PartialEq)]
pub enum JointDistribution {
    /// Row-major over profiles, like the game's loss tensors.
    Dense {
        action_counts: Vec<usize>,
        probs: Vec<f64>,
    },
    /// Uniform mixture of the product distributions of a trace, never
    /// materialized.
    ProductMixture {
        action_counts: Vec<usize>,
        profiles: Vec<Vec<Vec<f64>>>,
    },
}

impl JointDistribution {
    pub fn dense(action_counts: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = action_counts.iter().product();
        if probs.len() != size {
            return Err(Error::mismatch("joint distribution", size, probs.len()));
        }
        SimplexVector::with_tolerance(probs.clone(), 1e-10)?;
        Ok(JointDistribution::Dense {
            action_counts,
            probs,
        })
    }

    pub fn action_counts(&self) -> &[usize] {
        match self {
            JointDistribution::Dense { action_counts, .. }
            | JointDistribution::ProductMixture { action_counts, .. } => action_counts,
        }
    }

    /// Dense probabilities, materializing a mixture if needed.
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        match self {
            JointDistribution::Dense { probs, .. } => Ok(probs.clone()),
            JointDistribution::ProductMixture {
                action_counts,
                profiles,
            } => dense_mixture(action_counts, profiles),
        }
    }
}

fn dense_mixture(action_counts: &[usize], profiles: &[Vec<Vec<f64>>]) -> Result<Vec<f64>> {
    let size = action_counts
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .filter(|&s| s <= MAX_DENSE_PROFILES)
        .ok_or_else(|| {
            Error::InvalidShape(format!(
                "joint distribution over {action_counts:?} exceeds {MAX_DENSE_PROFILES} entries"
            ))
        })?;
    let m = action_counts.len();
    let mut probs = vec![0.0; size];
    let weight = 1.0 / profiles.len() as f64;
    let mut product = vec![0.0; size];
    for profile in profiles {
        // outer product built one player at a time, last player fastest
        product[0] = weight;
        let mut len = 1;
        for x in profile.iter().take(m) {
            for idx in (0..len).rev() {
                let base = product[idx];
                for (a, &p) in x.iter().enumerate() {
                    product[idx * x.len() + a] = base * p;
                }
            }
            len *= x.len();
        }
        for (acc, p) in probs.iter_mut().zip(&product) {
            *acc += p;
        }
    }
    Ok(probs)
}

/// `μ̄ = (1/T) Σ_t x_1^(t) ⊗ … ⊗ x_m^(t)`, dense when it fits in
/// [`MAX_DENSE_PROFILES`] entries and lazy otherwise.
pub fn average_product_distribution(trace: &RunTrace) -> Result<JointDistribution> {
    if trace.horizon() == 0 {
        return Err(Error::InvalidShape("empty trace".into()));
    }
    let profiles: Vec<Vec<Vec<f64>>> = trace.rounds.iter().map(|r| r.strategies.clone()).collect();
    let fits = trace
        .action_counts
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .is_some_and(|s| s <= MAX_DENSE_PROFILES);
    if fits {
        let probs = dense_mixture(&trace.action_counts, &profiles)?;
        Ok(JointDistribution::Dense {
            action_counts: trace.action_counts.clone(),
            probs,
        })
    } else {
        Ok(JointDistribution::ProductMixture {
            action_counts: trace.action_counts.clone(),
            profiles,
        })
    }
}

/// Deviation gains `E_μ[1{a_i=j}(Λ_i(a) − Λ_i(k, a_{−i}))]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeGapReport {
    pub gap: f64,
    /// `deviation[i][j][k]`; the diagonal `j == k` is zero.
    pub deviation: Vec<Vec<Vec<f64>>>,
}

impl CeGapReport {
    pub fn player_gap(&self, player: usize) -> f64 {
        let d = &self.deviation[player];
        let mut best = f64::NEG_INFINITY;
        for (j, row) in d.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                if j != k {
                    best = best.max(v);
                }
            }
        }
        best
    }
}

pub fn ce_gap(game: &Game, mu: &JointDistribution) -> Result<CeGapReport> {
    if mu.action_counts() != game.action_counts() {
        return Err(Error::InvalidShape(format!(
            "distribution over {:?} does not match game {:?}",
            mu.action_counts(),
            game.action_counts()
        )));
    }
    let m = game.num_players();
    let mut deviation: Vec<Vec<Vec<f64>>> = game
        .action_counts()
        .iter()
        .map(|&n| vec![vec![0.0; n]; n])
        .collect();
    match mu {
        JointDistribution::Dense { probs, .. } => {
            let mut actions = vec![0; m];
            let mut swapped = vec![0; m];
            for (idx, &mass) in probs.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                game.profile_actions(idx, &mut actions);
                for i in 0..m {
                    let j = actions[i];
                    let here = game.loss(i, &actions);
                    swapped.copy_from_slice(&actions);
                    for k in 0..game.action_counts()[i] {
                        if k == j {
                            continue;
                        }
                        swapped[i] = k;
                        deviation[i][j][k] += mass * (here - game.loss(i, &swapped));
                    }
                }
            }
        }
        JointDistribution::ProductMixture { profiles, .. } => {
            let weight = 1.0 / profiles.len() as f64;
            for profile in profiles {
                let p = StrategyProfile::new(
                    profile
                        .iter()
                        .map(|x| SimplexVector::with_tolerance(x.clone(), 1e-9))
                        .collect::<Result<_>>()?,
                );
                for (i, dev) in deviation.iter_mut().enumerate() {
                    let loss = game.expected_loss(&p, i)?;
                    let x = &profile[i];
                    for (j, row) in dev.iter_mut().enumerate() {
                        for (k, d) in row.iter_mut().enumerate() {
                            if k != j {
                                *d += weight * x[j] * (loss[j] - loss[k]);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut report = CeGapReport {
        gap: f64::NEG_INFINITY,
        deviation,
    };
    report.gap = (0..m).map(|i| report.player_gap(i)).fold(f64::NEG_INFINITY, f64::max);
    Ok(report)
}
