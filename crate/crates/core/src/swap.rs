//! Blum–Mansour swap-regret minimizer with one OMWU per action.
//!
//! Copy `g` proposes row `g` of a row-stochastic matrix `Q`; the learner
//! plays the stationary distribution `x = Qᵀx` and hands copy `g` the loss
//! scaled by `x[g]`.

use crate::error::{Error, Result};
use crate::learner::{check_loss, InnerRecord, Learner};
use crate::markov_tree::{solve_stationary, TransitionMatrix};
use crate::omwu::Omwu;
use crate::simplex::SimplexVector;

#[derive(Debug, Clone)]
pub struct BmOmwu {
    n: usize,
    copies: Vec<Omwu>,
    last_matrix: Option<TransitionMatrix>,
    last_strategy: Option<SimplexVector>,
    awaiting_loss: bool,
    last_scaled_losses: Option<Vec<Vec<f64>>>,
}

impl BmOmwu {
    pub fn new(n: usize, eta: f64) -> Self {
        assert!(n >= 2, "need at least two actions");
        BmOmwu {
            n,
            copies: (0..n).map(|_| Omwu::new(n, eta)).collect(),
            last_matrix: None,
            last_strategy: None,
            awaiting_loss: false,
            last_scaled_losses: None,
        }
    }

    /// The same construction with plain (non-optimistic) MWU copies.
    pub fn non_optimistic(n: usize, eta: f64) -> Self {
        let mut bm = Self::new(n, eta);
        bm.copies = (0..n).map(|_| Omwu::non_optimistic(n, eta)).collect();
        bm
    }

    pub fn copies(&self) -> &[Omwu] {
        &self.copies
    }

    pub fn last_matrix(&self) -> Option<&TransitionMatrix> {
        self.last_matrix.as_ref()
    }

    pub fn last_strategy(&self) -> Option<&SimplexVector> {
        self.last_strategy.as_ref()
    }

    /// `|Σ_g ⟨Q[g,·], x[g] ℓ⟩ − ⟨x, ℓ⟩|` for the current round.
    pub fn loss_decomposition_gap(&self, loss: &[f64]) -> Option<f64> {
        let q = self.last_matrix.as_ref()?;
        let x = self.last_strategy.as_ref()?;
        let split: f64 = (0..self.n)
            .map(|g| {
                let row = q.row(g);
                x[g] * row.iter().zip(loss).map(|(a, b)| a * b).sum::<f64>()
            })
            .sum();
        Some((split - x.dot(loss)).abs())
    }
}

impl Learner for BmOmwu {
    fn num_actions(&self) -> usize {
        self.n
    }

    fn eta(&self) -> f64 {
        self.copies[0].eta()
    }

    fn inner_dimension(&self) -> usize {
        self.n
    }

    fn next_strategy(&mut self) -> Result<SimplexVector> {
        let rows: Vec<f64> = self
            .copies
            .iter()
            .flat_map(|c| c.next_strategy().into_vec())
            .collect();
        let q = TransitionMatrix::from_row_major(self.n, rows)?;
        let x = solve_stationary(&q)?;
        self.last_matrix = Some(q);
        self.last_strategy = Some(x.clone());
        self.awaiting_loss = true;
        Ok(x)
    }

    fn observe_loss(&mut self, loss: &[f64]) -> Result<()> {
        if !self.awaiting_loss {
            return Err(Error::MissingStrategy);
        }
        check_loss(loss, self.n, 0.0, 1.0)?;
        let x = self.last_strategy.as_ref().expect("set with awaiting_loss");
        let scaled: Vec<Vec<f64>> = (0..self.n)
            .map(|g| loss.iter().map(|l| x[g] * l).collect())
            .collect();
        for (copy, s) in self.copies.iter_mut().zip(&scaled) {
            copy.observe_loss(s)?;
        }
        self.last_scaled_losses = Some(scaled);
        self.awaiting_loss = false;
        Ok(())
    }

    fn inner_record(&self) -> Option<InnerRecord> {
        if self.awaiting_loss {
            return None;
        }
        Some(InnerRecord {
            distributions: self.last_matrix.as_ref()?.rows(),
            losses: self.last_scaled_losses.clone()?,
        })
    }

    fn restart(&mut self, eta: f64) {
        for copy in &mut self.copies {
            copy.restart(eta);
        }
        self.last_matrix = None;
        self.last_strategy = None;
        self.awaiting_loss = false;
        self.last_scaled_losses = None;
    }
}
