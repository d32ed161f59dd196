//! Optimistic multiplicative weights over a finite index set.
//!
//! The iterate after observing `ℓ^(1..t)` is
//! `x^(t+1) ∝ exp(-η (G^(t) + ℓ^(t)))` with `G^(t) = Σ_{s≤t} ℓ^(s)` and
//! `ℓ^(0) = 0`, which unrolls the ratio form
//! `x^(t+1)[j] ∝ x^(t)[j] exp(-η (2ℓ^(t)[j] - ℓ^(t-1)[j]))`.
//! Strategies are recomputed from the cumulative loss each round instead of
//! iterating the ratio form.

use crate::error::{Error, Result};
use crate::simplex::{softmax, SimplexVector};

#[derive(Debug, Clone, PartialEq)]
pub struct Omwu {
    eta: f64,
    optimistic: bool,
    cumulative_loss: Vec<f64>,
    last_loss: Vec<f64>,
    step: usize,
}

impl Omwu {
    /// Panics if `eta` is not a positive finite number or `dimension == 0`.
    pub fn new(dimension: usize, eta: f64) -> Self {
        Self::build(dimension, eta, true)
    }

    /// Plain (non-optimistic) multiplicative weights, `x^(t+1) ∝ exp(-η G^(t))`.
    pub fn non_optimistic(dimension: usize, eta: f64) -> Self {
        Self::build(dimension, eta, false)
    }

    fn build(dimension: usize, eta: f64, optimistic: bool) -> Self {
        assert!(dimension > 0, "dimension must be positive");
        assert!(eta > 0.0 && eta.is_finite(), "learning rate must be positive, got {eta}");
        Omwu {
            eta,
            optimistic,
            cumulative_loss: vec![0.0; dimension],
            last_loss: vec![0.0; dimension],
            step: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.cumulative_loss.len()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn is_optimistic(&self) -> bool {
        self.optimistic
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn cumulative_loss(&self) -> &[f64] {
        &self.cumulative_loss
    }

    pub fn last_loss(&self) -> &[f64] {
        &self.last_loss
    }

    /// Discards all observed losses and continues with learning rate `eta`.
    pub fn restart(&mut self, eta: f64) {
        *self = Self::build(self.dimension(), eta, self.optimistic);
    }

    pub fn next_strategy(&self) -> SimplexVector {
        if self.step == 0 {
            return SimplexVector::uniform(self.dimension());
        }
        let logits: Vec<f64> = self
            .cumulative_loss
            .iter()
            .zip(&self.last_loss)
            .map(|(&g, &l)| {
                let prediction = if self.optimistic { l } else { 0.0 };
                -self.eta * (g + prediction)
            })
            .collect();
        SimplexVector::from_raw(softmax(&logits))
    }

    pub fn observe_loss(&mut self, loss: &[f64]) -> Result<()> {
        if loss.len() != self.dimension() {
            return Err(Error::mismatch("OMWU loss vector", self.dimension(), loss.len()));
        }
        if let Some(index) = loss.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        for (g, &l) in self.cumulative_loss.iter_mut().zip(loss) {
            *g += l;
        }
        self.last_loss.copy_from_slice(loss);
        self.step += 1;
        Ok(())
    }
}
