//! No-internal-regret dynamics.
//!
//! [`SlOmwu`] is the Stoltz–Lugosi construction: one OMWU over the ordered
//! action pairs `j→k`, whose iterate `p` defines a Markov chain that moves
//! from `j` to `k` with probability `p[j→k]`; the played strategy is that
//! chain's stationary distribution. [`ArboDynamics`] runs OMWU over all
//! `n^(n-1)` arborescences instead and plays the root marginals. Fed the
//! same losses, the two produce the same strategies, which
//! [`verify_equivalence`] checks numerically.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, StrategyProfile};
use crate::learner::{check_loss, InnerRecord, Learner};
use crate::markov_tree::{
    solve_stationary, tree_index, tree_theorem_stationary, TransitionMatrix, TreeIndex,
};
use crate::omwu::Omwu;
use crate::simplex::{linf_distance, SimplexVector};

/// Largest action count accepted by [`ArboDynamics`].
pub const MAX_ARBO_ACTIONS: usize = 5;

/// Position of the ordered pair `j→k` (`j ≠ k`) in the canonical order
/// `(0→1), (0→2), …, (n-1→n-2)`.
pub fn pair_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j != k && j < n && k < n);
    j * (n - 1) + if k < j { k } else { k - 1 }
}

/// All ordered pairs in canonical order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
        .collect()
}

/// `L[j→k] = x[j] (ℓ[k] − ℓ[j])`.
pub fn pair_loss(x: &[f64], loss: &[f64]) -> Vec<f64> {
    let n = x.len();
    pairs(n)
        .into_iter()
        .map(|(j, k)| x[j] * (loss[k] - loss[j]))
        .collect()
}

/// Row-stochastic matrix with off-diagonal `(j,k)` entry `p[j→k]` and the
/// row remainder on the diagonal.
pub fn pair_transition_matrix(n: usize, p: &[f64]) -> Result<TransitionMatrix> {
    let mut entries = vec![0.0; n * n];
    for j in 0..n {
        let mut off = 0.0;
        for k in (0..n).filter(|&k| k != j) {
            let v = p[pair_index(n, j, k)];
            entries[j * n + k] = v;
            off += v;
        }
        // rounding can push the remainder a hair below zero
        entries[j * n + j] = (1.0 - off).max(0.0);
    }
    TransitionMatrix::from_row_major(n, entries)
}

/// How the stationary distribution of each round's chain is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StationaryMethod {
    /// Dense linear solve with power-iteration fallback.
    Numerical,
    /// Closed form over arborescences (`n ≤ 7`).
    TreeTheorem,
}

impl StationaryMethod {
    pub fn solve(self, q: &TransitionMatrix) -> Result<SimplexVector> {
        match self {
            StationaryMethod::Numerical => solve_stationary(q),
            StationaryMethod::TreeTheorem => tree_theorem_stationary(q),
        }
    }
}

/// Stoltz–Lugosi internal-regret minimizer with an OMWU over action pairs.
#[derive(Debug, Clone)]
pub struct SlOmwu {
    n: usize,
    pair_omwu: Omwu,
    method: StationaryMethod,
    pair_distribution: Option<SimplexVector>,
    last_matrix: Option<TransitionMatrix>,
    last_strategy: Option<SimplexVector>,
    awaiting_loss: bool,
    last_pair_loss: Option<Vec<f64>>,
}

impl SlOmwu {
    pub fn new(n: usize, eta: f64) -> Self {
        Self::with_method(n, eta, StationaryMethod::Numerical)
    }

    pub fn with_method(n: usize, eta: f64, method: StationaryMethod) -> Self {
        assert!(n >= 2, "need at least two actions");
        SlOmwu {
            n,
            pair_omwu: Omwu::new(n * (n - 1), eta),
            method,
            pair_distribution: None,
            last_matrix: None,
            last_strategy: None,
            awaiting_loss: false,
            last_pair_loss: None,
        }
    }

    /// The same construction driven by plain (non-optimistic) MWU.
    pub fn non_optimistic(n: usize, eta: f64) -> Self {
        let mut sl = Self::new(n, eta);
        sl.pair_omwu = Omwu::non_optimistic(n * (n - 1), eta);
        sl
    }

    pub fn pair_omwu(&self) -> &Omwu {
        &self.pair_omwu
    }

    /// `p^(t)` of the current round.
    pub fn pair_distribution(&self) -> Option<&SimplexVector> {
        self.pair_distribution.as_ref()
    }

    pub fn last_matrix(&self) -> Option<&TransitionMatrix> {
        self.last_matrix.as_ref()
    }

    pub fn last_strategy(&self) -> Option<&SimplexVector> {
        self.last_strategy.as_ref()
    }

    pub fn last_pair_loss(&self) -> Option<&[f64]> {
        self.last_pair_loss.as_deref()
    }
}

impl Learner for SlOmwu {
    fn num_actions(&self) -> usize {
        self.n
    }

    fn eta(&self) -> f64 {
        self.pair_omwu.eta()
    }

    fn inner_dimension(&self) -> usize {
        self.pair_omwu.dimension()
    }

    fn next_strategy(&mut self) -> Result<SimplexVector> {
        let p = self.pair_omwu.next_strategy();
        let q = pair_transition_matrix(self.n, p.as_slice())?;
        let x = self.method.solve(&q)?;
        self.pair_distribution = Some(p);
        self.last_matrix = Some(q);
        self.last_strategy = Some(x.clone());
        self.awaiting_loss = true;
        Ok(x)
    }

    fn observe_loss(&mut self, loss: &[f64]) -> Result<()> {
        if !self.awaiting_loss {
            return Err(Error::MissingStrategy);
        }
        check_loss(loss, self.n, -1.0, 1.0)?;
        let x = self.last_strategy.as_ref().expect("set with awaiting_loss");
        let big_l = pair_loss(x.as_slice(), loss);
        self.pair_omwu.observe_loss(&big_l)?;
        self.last_pair_loss = Some(big_l);
        self.awaiting_loss = false;
        Ok(())
    }

    fn inner_record(&self) -> Option<InnerRecord> {
        if self.awaiting_loss {
            return None;
        }
        Some(InnerRecord {
            distributions: vec![self.pair_distribution.clone()?.into_vec()],
            losses: vec![self.last_pair_loss.clone()?],
        })
    }

    fn restart(&mut self, eta: f64) {
        self.pair_omwu.restart(eta);
        self.pair_distribution = None;
        self.last_matrix = None;
        self.last_strategy = None;
        self.awaiting_loss = false;
        self.last_pair_loss = None;
    }
}

/// External-regret OMWU over all arborescences, playing root marginals.
#[derive(Debug, Clone)]
pub struct ArboDynamics {
    n: usize,
    trees: &'static TreeIndex,
    tree_omwu: Omwu,
    tree_distribution: Option<SimplexVector>,
    last_strategy: Option<SimplexVector>,
    awaiting_loss: bool,
    last_tree_loss: Option<Vec<f64>>,
}

impl ArboDynamics {
    pub fn new(n: usize, eta: f64) -> Result<Self> {
        if !(2..=MAX_ARBO_ACTIONS).contains(&n) {
            return Err(Error::SizeOutOfRange {
                n,
                min: 2,
                max: MAX_ARBO_ACTIONS,
            });
        }
        let trees = tree_index(n)?;
        Ok(ArboDynamics {
            n,
            trees,
            tree_omwu: Omwu::new(trees.len(), eta),
            tree_distribution: None,
            last_strategy: None,
            awaiting_loss: false,
            last_tree_loss: None,
        })
    }

    pub fn trees(&self) -> &'static TreeIndex {
        self.trees
    }

    /// `X^(t)` of the current round, indexed like [`TreeIndex::trees`].
    pub fn tree_distribution(&self) -> Option<&SimplexVector> {
        self.tree_distribution.as_ref()
    }

    pub fn last_tree_loss(&self) -> Option<&[f64]> {
        self.last_tree_loss.as_deref()
    }

    /// Root marginals of a distribution over trees.
    pub fn root_marginals(&self, x_trees: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|root| self.trees.rooted_at(root).map(|t| x_trees[t]).sum())
            .collect()
    }

    /// `𝓛[T] = Σ_{(a,b) ∈ E(T)} L[a→b]`.
    pub fn tree_loss(&self, pair_loss: &[f64]) -> Vec<f64> {
        (0..self.trees.len())
            .map(|t| {
                self.trees
                    .tree_edges(t)
                    .iter()
                    .map(|&(a, b)| pair_loss[pair_index(self.n, a, b)])
                    .sum()
            })
            .collect()
    }
}

impl Learner for ArboDynamics {
    fn num_actions(&self) -> usize {
        self.n
    }

    fn eta(&self) -> f64 {
        self.tree_omwu.eta()
    }

    fn inner_dimension(&self) -> usize {
        self.tree_omwu.dimension()
    }

    fn next_strategy(&mut self) -> Result<SimplexVector> {
        let big_x = self.tree_omwu.next_strategy();
        let x = SimplexVector::from_raw(self.root_marginals(big_x.as_slice()));
        self.tree_distribution = Some(big_x);
        self.last_strategy = Some(x.clone());
        self.awaiting_loss = true;
        Ok(x)
    }

    fn observe_loss(&mut self, loss: &[f64]) -> Result<()> {
        if !self.awaiting_loss {
            return Err(Error::MissingStrategy);
        }
        check_loss(loss, self.n, -1.0, 1.0)?;
        let x = self.last_strategy.as_ref().expect("set with awaiting_loss");
        let tree_loss = self.tree_loss(&pair_loss(x.as_slice(), loss));
        self.tree_omwu.observe_loss(&tree_loss)?;
        self.last_tree_loss = Some(tree_loss);
        self.awaiting_loss = false;
        Ok(())
    }

    fn inner_record(&self) -> Option<InnerRecord> {
        if self.awaiting_loss {
            return None;
        }
        Some(InnerRecord {
            distributions: vec![self.tree_distribution.clone()?.into_vec()],
            losses: vec![self.last_tree_loss.clone()?],
        })
    }

    fn restart(&mut self, eta: f64) {
        self.tree_omwu.restart(eta);
        self.tree_distribution = None;
        self.last_strategy = None;
        self.awaiting_loss = false;
        self.last_tree_loss = None;
    }
}

/// Outcome of running both dynamics side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub eta: f64,
    pub horizon: usize,
    pub tolerance: f64,
    /// `max_i ‖x_SL − x_arbo‖∞` for each round.
    pub strategy_deviation: Vec<f64>,
    /// Relative spread of `Π_{(a,b)∈T} p[a→b] / X[T]` over trees, max over players, per round.
    pub proportionality_residual: Vec<f64>,
    pub max_strategy_deviation: f64,
    pub max_proportionality_residual: f64,
    pub passed: bool,
}

/// `max_T |r_T − r_0| / r_0` with `r_T = Π_{(a,b)∈E(T)} p[a→b] / X[T]`.
pub fn proportionality_residual(trees: &TreeIndex, p: &[f64], x_trees: &[f64]) -> f64 {
    let n = trees.num_nodes();
    let ratio = |t: usize| {
        let prod: f64 = trees
            .tree_edges(t)
            .iter()
            .map(|&(a, b)| p[pair_index(n, a, b)])
            .product();
        prod / x_trees[t]
    };
    let reference = ratio(0);
    (0..trees.len())
        .map(|t| ((ratio(t) - reference) / reference).abs())
        .fold(0.0, f64::max)
}

/// Self-play of [`SlOmwu`] (tree-theorem stationary solver) for every
/// player, with an [`ArboDynamics`] per player replaying the same loss
/// stream in lockstep.
pub fn verify_equivalence(
    game: &Game,
    eta: f64,
    horizon: usize,
    tolerance: f64,
) -> Result<EquivalenceReport> {
    if let Some(&n) = game.action_counts().iter().find(|&&n| n > MAX_ARBO_ACTIONS) {
        return Err(Error::SizeOutOfRange {
            n,
            min: 2,
            max: MAX_ARBO_ACTIONS,
        });
    }
    let mut sl: Vec<SlOmwu> = game
        .action_counts()
        .iter()
        .map(|&n| SlOmwu::with_method(n, eta, StationaryMethod::TreeTheorem))
        .collect();
    let mut arbo: Vec<ArboDynamics> = game
        .action_counts()
        .iter()
        .map(|&n| ArboDynamics::new(n, eta))
        .collect::<Result<_>>()?;

    let mut strategy_deviation = Vec::with_capacity(horizon);
    let mut proportionality = Vec::with_capacity(horizon);
    for round in 0..horizon {
        let at = |e| Error::AtRound {
            round: round + 1,
            source: Box::new(e),
        };
        let mut strategies = Vec::with_capacity(sl.len());
        let mut deviation: f64 = 0.0;
        let mut residual: f64 = 0.0;
        for (a, b) in sl.iter_mut().zip(arbo.iter_mut()) {
            let xa = a.next_strategy().map_err(at)?;
            let xb = b.next_strategy().map_err(at)?;
            deviation = deviation.max(linf_distance(xa.as_slice(), xb.as_slice()));
            residual = residual.max(proportionality_residual(
                b.trees(),
                a.pair_distribution().expect("just computed").as_slice(),
                b.tree_distribution().expect("just computed").as_slice(),
            ));
            strategies.push(xa);
        }
        strategy_deviation.push(deviation);
        proportionality.push(residual);

        let profile = StrategyProfile::new(strategies);
        let losses = game.expected_losses(&profile)?;
        for ((a, b), loss) in sl.iter_mut().zip(arbo.iter_mut()).zip(&losses) {
            a.observe_loss(loss).map_err(at)?;
            b.observe_loss(loss).map_err(at)?;
        }
    }
    let max_strategy_deviation = strategy_deviation.iter().copied().fold(0.0, f64::max);
    let max_proportionality_residual = proportionality.iter().copied().fold(0.0, f64::max);
    Ok(EquivalenceReport {
        eta,
        horizon,
        tolerance,
        passed: max_strategy_deviation <= tolerance && max_proportionality_residual <= tolerance,
        strategy_deviation,
        proportionality_residual: proportionality,
        max_strategy_deviation,
        max_proportionality_residual,
    })
}
