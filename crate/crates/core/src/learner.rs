//! The interface shared by every per-player dynamic, and plain (O)MWU over
//! actions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::omwu::Omwu;
use crate::simplex::SimplexVector;

/// Slack allowed on loss bounds; expected losses are convex combinations and
/// may overshoot `[0,1]` by a few ulps.
pub(crate) const LOSS_RANGE_SLACK: f64 = 1e-12;

/// What the inner regret minimizers of a learner saw in one round: for each
/// inner OMWU instance, the distribution it played and the loss it was fed.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InnerRecord {
    pub distributions: Vec<Vec<f64>>,
    pub losses: Vec<Vec<f64>>,
}

/// A no-regret learner over a finite action set, driven round by round.
pub trait Learner {
    fn num_actions(&self) -> usize;

    fn eta(&self) -> f64;

    /// Dimension of each inner OMWU (for the adversarial learning rate).
    fn inner_dimension(&self) -> usize;

    fn next_strategy(&mut self) -> Result<SimplexVector>;

    fn observe_loss(&mut self, loss: &[f64]) -> Result<()>;

    /// Inner distributions and losses of the most recently completed round.
    fn inner_record(&self) -> Option<InnerRecord>;

    /// Forgets all history and continues with learning rate `eta`.
    fn restart(&mut self, eta: f64);
}

pub(crate) fn check_loss(loss: &[f64], n: usize, lo: f64, hi: f64) -> Result<()> {
    if loss.len() != n {
        return Err(Error::mismatch("loss vector", n, loss.len()));
    }
    for (index, &value) in loss.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < lo - LOSS_RANGE_SLACK || value > hi + LOSS_RANGE_SLACK {
            return Err(Error::ObservedLossOutOfRange { index, value });
        }
    }
    Ok(())
}

/// (Optimistic) multiplicative weights played directly over the actions.
#[derive(Debug, Clone)]
pub struct MwuLearner {
    omwu: Omwu,
    current: Option<SimplexVector>,
    record: Option<InnerRecord>,
}

impl MwuLearner {
    pub fn optimistic(n: usize, eta: f64) -> Self {
        Self::wrap(Omwu::new(n, eta))
    }

    pub fn non_optimistic(n: usize, eta: f64) -> Self {
        Self::wrap(Omwu::non_optimistic(n, eta))
    }

    fn wrap(omwu: Omwu) -> Self {
        MwuLearner {
            omwu,
            current: None,
            record: None,
        }
    }
}

impl Learner for MwuLearner {
    fn num_actions(&self) -> usize {
        self.omwu.dimension()
    }

    fn eta(&self) -> f64 {
        self.omwu.eta()
    }

    fn inner_dimension(&self) -> usize {
        self.omwu.dimension()
    }

    fn next_strategy(&mut self) -> Result<SimplexVector> {
        let x = self.omwu.next_strategy();
        self.current = Some(x.clone());
        Ok(x)
    }

    fn observe_loss(&mut self, loss: &[f64]) -> Result<()> {
        if self.current.is_none() {
            return Err(Error::MissingStrategy);
        }
        check_loss(loss, self.num_actions(), -1.0, 1.0)?;
        self.omwu.observe_loss(loss)?;
        let x = self.current.take().expect("checked above");
        self.record = Some(InnerRecord {
            distributions: vec![x.into_vec()],
            losses: vec![loss.to_vec()],
        });
        Ok(())
    }

    fn inner_record(&self) -> Option<InnerRecord> {
        self.record.clone()
    }

    fn restart(&mut self, eta: f64) {
        self.omwu.restart(eta);
        self.current = None;
        self.record = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observe_requires_strategy() {
        let mut l = MwuLearner::optimistic(2, 0.1);
        assert!(matches!(l.observe_loss(&[0.0, 1.0]), Err(Error::MissingStrategy)));
        l.next_strategy().unwrap();
        l.observe_loss(&[0.0, 1.0]).unwrap();
        assert!(matches!(l.observe_loss(&[0.0, 1.0]), Err(Error::MissingStrategy)));
        let rec = l.inner_record().unwrap();
        assert_eq!(rec.distributions, vec![vec![0.5, 0.5]]);
    }

    #[test]
    fn loss_range_enforced() {
        let mut l = MwuLearner::optimistic(2, 0.1);
        l.next_strategy().unwrap();
        assert!(matches!(
            l.observe_loss(&[0.0, 1.5]),
            Err(Error::ObservedLossOutOfRange { index: 1, .. })
        ));
    }
}
