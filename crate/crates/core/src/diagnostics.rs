//! Observational checks on recorded runs: finite differences of loss
//! sequences, variance statistics, the RVU-style regret inequality, the
//! variance inequality used by the adaptive learning rate, and consecutive
//! multiplicative closeness of inner distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::RunTrace;
use crate::simplex::linf_norm;

/// Default constant on the `H⁵` term of the variance inequality.
pub const DEFAULT_C_PRIME: f64 = 165_262.0;

/// Relative slack on the `exp(6η)` stability bound.
pub const STABILITY_SLACK: f64 = 1e-12;

/// Agreement required between the recursive and binomial differences.
pub const BINOMIAL_TOLERANCE: f64 = 1e-9;

/// Sum with pairwise (cascade) splitting, to keep alternating sums tame.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Differences of a vector sequence up to a maximum order.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDiffTable {
    /// `orders[h][t]` is the order-`h` difference at (0-based) time `t`.
    orders: Vec<Vec<Vec<f64>>>,
}

impl FiniteDiffTable {
    pub fn new(sequence: &[Vec<f64>], max_order: usize) -> Result<Self> {
        if sequence.is_empty() || max_order >= sequence.len() {
            return Err(Error::Config(format!(
                "difference order {max_order} needs more than {} terms",
                sequence.len()
            )));
        }
        let dim = sequence[0].len();
        if let Some(bad) = sequence.iter().find(|z| z.len() != dim) {
            return Err(Error::mismatch("sequence element", dim, bad.len()));
        }
        let mut orders = vec![sequence.to_vec()];
        for h in 1..=max_order {
            let prev = &orders[h - 1];
            let next = prev
                .windows(2)
                .map(|w| w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect())
                .collect();
            orders.push(next);
        }
        Ok(FiniteDiffTable { orders })
    }

    pub fn max_order(&self) -> usize {
        self.orders.len() - 1
    }

    pub fn order(&self, h: usize) -> &[Vec<f64>] {
        &self.orders[h]
    }

    pub fn get(&self, h: usize, t: usize) -> &[f64] {
        &self.orders[h][t]
    }

    /// `Σ_s C(h,s) (−1)^(h−s) z^(t+s)`, evaluated directly.
    pub fn binomial_form(sequence: &[Vec<f64>], h: usize, t: usize) -> Vec<f64> {
        let dim = sequence[t].len();
        let mut terms = vec![0.0; h + 1];
        (0..dim)
            .map(|e| {
                for (s, term) in terms.iter_mut().enumerate() {
                    let sign = if (h - s) % 2 == 0 { 1.0 } else { -1.0 };
                    *term = sign * binomial(h, s) * sequence[t + s][e];
                }
                pairwise_sum(&terms)
            })
            .collect()
    }

    /// Largest disagreement between the recursion and the binomial form.
    pub fn binomial_disagreement(&self, sequence: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for (h, diffs) in self.orders.iter().enumerate() {
            for (t, d) in diffs.iter().enumerate() {
                let direct = Self::binomial_form(sequence, h, t);
                for (a, b) in d.iter().zip(&direct) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }
}

/// `Var_q(z) = Σ_j q[j] (z[j] − ⟨q, z⟩)²`
pub fn variance(q: &[f64], z: &[f64]) -> Result<f64> {
    if q.len() != z.len() {
        return Err(Error::mismatch("variance vector", q.len(), z.len()));
    }
    let mean: f64 = q.iter().zip(z).map(|(a, b)| a * b).sum();
    Ok(q.iter().zip(z).map(|(a, b)| a * (b - mean).powi(2)).sum())
}

/// Distributions played and losses observed by one inner OMWU instance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InnerSeries {
    pub distributions: Vec<Vec<f64>>,
    pub losses: Vec<Vec<f64>>,
}

impl InnerSeries {
    pub fn len(&self) -> usize {
        self.distributions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distributions.is_empty()
    }
}

/// Inner series of `player` from round `start` onward, one per inner
/// minimizer.
pub fn inner_series(trace: &RunTrace, player: usize, start: usize) -> Result<Vec<InnerSeries>> {
    let mut series: Vec<InnerSeries> = Vec::new();
    for (t, rec) in trace.inner(player).enumerate().skip(start) {
        let rec = rec.ok_or_else(|| {
            Error::Config(format!("round {} of player {player} has no inner record", t + 1))
        })?;
        if series.is_empty() {
            series = vec![InnerSeries::default(); rec.distributions.len()];
        }
        for ((s, p), l) in series.iter_mut().zip(&rec.distributions).zip(&rec.losses) {
            s.distributions.push(p.clone());
            s.losses.push(l.clone());
        }
    }
    Ok(series)
}

/// First round of the segment since the player's last restart.
pub fn last_segment_start(trace: &RunTrace, player: usize) -> usize {
    trace
        .restarts
        .get(player)
        .and_then(|r| r.last().copied())
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessRow {
    pub order: usize,
    /// 1-based round.
    pub t: usize,
    pub norm: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub player: usize,
    pub alpha: f64,
    pub max_order: usize,
    pub max_eta: f64,
    /// `α/(36 e⁵ m)`: below it the bound is guaranteed and pass/fail applies.
    pub eta_threshold: f64,
    /// `α/(36 m)`, reported for reference only.
    pub eta_threshold_loose: f64,
    pub applicable: bool,
    pub rows: Vec<SmoothnessRow>,
    pub violations: usize,
    pub worst_ratio: f64,
    /// `None` when the preconditions do not hold.
    pub passed: Option<bool>,
    pub binomial_disagreement: f64,
}

/// `α^h h^(3h+1)` for `h ≥ 1`; order zero is checked against `∥L∥∞ ≤ 1`.
pub fn smoothness_bound(alpha: f64, h: usize) -> f64 {
    if h == 0 {
        1.0
    } else {
        let hf = h as f64;
        alpha.powi(h as i32) * hf.powi(3 * h as i32 + 1)
    }
}

/// Differences of the pair losses of an SL-OMWU player against the
/// higher-order smoothness bound.
pub fn smoothness_report(
    trace: &RunTrace,
    player: usize,
    max_order: usize,
    alpha: f64,
) -> Result<SmoothnessReport> {
    let series = inner_series(trace, player, 0)?;
    let [pairs] = series.as_slice() else {
        return Err(Error::Config(
            "smoothness check needs a single inner minimizer (sl-omwu)".into(),
        ));
    };
    let table = FiniteDiffTable::new(&pairs.losses, max_order)?;
    let m = trace.num_players() as f64;
    let max_eta = trace
        .rounds
        .iter()
        .map(|r| r.etas[player])
        .fold(0.0, f64::max);
    let eta_threshold = alpha / (36.0 * 5f64.exp() * m);
    let applicable = alpha <= 1.0 / (max_order as f64 + 3.0)
        && max_eta <= eta_threshold
        && trace.restarts.get(player).is_none_or(|r| r.is_empty());

    let mut rows = Vec::new();
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for h in 0..=max_order {
        let bound = smoothness_bound(alpha, h);
        for (t, d) in table.order(h).iter().enumerate() {
            let norm = linf_norm(d);
            if norm > bound {
                violations += 1;
            }
            worst_ratio = worst_ratio.max(norm / bound);
            rows.push(SmoothnessRow {
                order: h,
                t: t + 1,
                norm,
                bound,
            });
        }
    }
    Ok(SmoothnessReport {
        player,
        alpha,
        max_order,
        max_eta,
        eta_threshold,
        eta_threshold_loose: alpha / (36.0 * m),
        applicable,
        rows,
        violations,
        worst_ratio,
        passed: applicable.then_some(violations == 0),
        binomial_disagreement: table.binomial_disagreement(&pairs.losses),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvuReport {
    pub eta: f64,
    pub c: f64,
    pub dimension: usize,
    /// Measured regret against the best fixed vertex.
    pub regret: f64,
    pub rhs: f64,
    /// Same bound with `log n` in place of `log(dimension)`.
    pub rhs_literal: f64,
    pub slack: f64,
    pub holds: bool,
}

/// RVU-style bound on a single OMWU run, with `L^(0) = 0`.
pub fn rvu_from_series(series: &InnerSeries, eta: f64, c: f64, log_actions: f64) -> Result<RvuReport> {
    let dim = series
        .distributions
        .first()
        .map(Vec::len)
        .unwrap_or(2);
    let mut realized = 0.0;
    let mut cumulative = vec![0.0; dim];
    let mut diff_term = 0.0;
    let mut level_term = 0.0;
    let mut prev = vec![0.0; dim];
    for (p, l) in series.distributions.iter().zip(&series.losses) {
        realized += p.iter().zip(l).map(|(a, b)| a * b).sum::<f64>();
        for (acc, v) in cumulative.iter_mut().zip(l) {
            *acc += v;
        }
        let delta: Vec<f64> = l.iter().zip(&prev).map(|(a, b)| a - b).collect();
        diff_term += variance(p, &delta)?;
        level_term += variance(p, &prev)?;
        prev.clone_from(l);
    }
    let best = cumulative.iter().copied().fold(f64::INFINITY, f64::min);
    let regret = if series.is_empty() { 0.0 } else { realized - best };
    let tail = (eta / 2.0 + c * eta * eta) * diff_term - (1.0 - c * eta) * eta / 2.0 * level_term;
    let rhs = 2.0 * (dim as f64).ln() / eta + tail;
    let rhs_literal = 2.0 * log_actions / eta + tail;
    Ok(RvuReport {
        eta,
        c,
        dimension: dim,
        regret,
        rhs,
        rhs_literal,
        slack: rhs - regret,
        holds: regret <= rhs,
    })
}

/// RVU check for the pair-space minimizer of an SL-OMWU player, over the
/// segment since its last restart.
pub fn rvu_check(trace: &RunTrace, player: usize, eta: f64, c: f64) -> Result<RvuReport> {
    let start = last_segment_start(trace, player);
    let series = inner_series(trace, player, start)?;
    let n = trace.action_counts[player];
    match series.as_slice() {
        [] => rvu_from_series(
            &InnerSeries::default(),
            eta,
            c,
            (n as f64).ln(),
        )
        .map(|mut r| {
            r.dimension = n * (n - 1);
            r.rhs = 2.0 * (r.dimension as f64).ln() / eta;
            r.slack = r.rhs;
            r
        }),
        [pairs] => rvu_from_series(pairs, eta, c, (n as f64).ln()),
        _ => Err(Error::Config("RVU check needs a single inner minimizer (sl-omwu)".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCheck {
    pub rounds: usize,
    pub horizon_log: u32,
    /// `Σ_t Var_{p^t}(L^t − L^(t−1))`
    pub lhs: f64,
    /// `½ Σ_t Var_{p^t}(L^(t−1))`
    pub half_level: f64,
    pub c_prime: f64,
    pub rhs: f64,
    /// Smallest constant for which the inequality holds; `None` when no
    /// constant helps (`H = 0` with a positive excess).
    pub min_c_prime: Option<f64>,
    pub holds: bool,
}

/// `⌈log₂ T⌉`
pub fn horizon_log(horizon: usize) -> u32 {
    horizon.max(1).next_power_of_two().trailing_zeros()
}

/// Streaming form of the variance inequality for one inner minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceTracker {
    prev: Vec<f64>,
    lhs: f64,
    level: f64,
    rounds: usize,
}

impl VarianceTracker {
    pub fn new(dim: usize) -> Self {
        VarianceTracker {
            prev: vec![0.0; dim],
            lhs: 0.0,
            level: 0.0,
            rounds: 0,
        }
    }

    pub fn push(&mut self, p: &[f64], loss: &[f64]) -> Result<()> {
        let delta: Vec<f64> = loss.iter().zip(&self.prev).map(|(a, b)| a - b).collect();
        self.lhs += variance(p, &delta)?;
        self.level += variance(p, &self.prev)?;
        self.prev.copy_from_slice(loss);
        self.rounds += 1;
        Ok(())
    }

    /// The inequality with `H = ⌈log₂ horizon⌉`.
    pub fn report(&self, horizon: usize, c_prime: f64) -> VarianceCheck {
        let h = horizon_log(horizon);
        let h5 = f64::from(h).powi(5);
        let half_level = 0.5 * self.level;
        let rhs = half_level + c_prime * h5;
        let excess = self.lhs - half_level;
        let min_c_prime = if excess <= 0.0 {
            Some(0.0)
        } else if h5 > 0.0 {
            Some(excess / h5)
        } else {
            None
        };
        VarianceCheck {
            rounds: self.rounds,
            horizon_log: h,
            lhs: self.lhs,
            half_level,
            c_prime,
            rhs,
            min_c_prime,
            holds: self.lhs <= rhs,
        }
    }
}

/// The variance inequality for every inner minimizer of `player`, over the
/// segment since its last restart, with `H` taken from the full horizon.
pub fn check_variance_inequality(
    trace: &RunTrace,
    player: usize,
    c_prime: f64,
) -> Result<Vec<VarianceCheck>> {
    let start = last_segment_start(trace, player);
    inner_series(trace, player, start)?
        .iter()
        .map(|s| {
            let dim = s.distributions.first().map(Vec::len).unwrap_or(0);
            let mut tracker = VarianceTracker::new(dim);
            for (p, l) in s.distributions.iter().zip(&s.losses) {
                tracker.push(p, l)?;
            }
            Ok(tracker.report(trace.horizon(), c_prime))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub player: usize,
    pub max_eta: f64,
    /// Largest `max(p'/p, p/p')` over consecutive rounds and entries.
    pub max_ratio: f64,
    /// Largest ratio measured in units of its round's bound, as
    /// `ln(ratio) / (6η)`; at most 1 when the bound holds.
    pub max_normalized: f64,
    pub exp_bound: f64,
    pub linear_bound: f64,
    pub passed: bool,
    pub within_linear: bool,
}

/// `exp(6η) ≤ 1 + 7η`
pub fn exp_bound_below_linear(eta: f64) -> bool {
    (6.0 * eta).exp() <= 1.0 + 7.0 * eta
}

/// Consecutive multiplicative closeness of every inner distribution,
/// skipping the boundary at each restart.
pub fn stability_check(trace: &RunTrace, player: usize) -> Result<StabilityReport> {
    let restarts = trace.restarts.get(player).cloned().unwrap_or_default();
    let mut max_ratio: f64 = 1.0;
    let mut max_normalized: f64 = 0.0;
    let mut passed = true;
    let mut within_linear = true;
    let mut max_eta: f64 = 0.0;
    let mut prev: Option<Vec<Vec<f64>>> = None;
    for (t, (round, rec)) in trace.rounds.iter().zip(trace.inner(player)).enumerate() {
        let rec = rec.ok_or_else(|| {
            Error::Config(format!("round {} of player {player} has no inner record", t + 1))
        })?;
        let eta = round.etas[player];
        max_eta = max_eta.max(eta);
        if let Some(before) = prev.as_ref().filter(|_| !restarts.contains(&t)) {
            let eta_prev = trace.rounds[t - 1].etas[player];
            let step_eta = eta.max(eta_prev);
            for (a, b) in before.iter().zip(&rec.distributions) {
                for (&x, &y) in a.iter().zip(b) {
                    let r = (x / y).max(y / x);
                    max_ratio = max_ratio.max(r);
                    if step_eta > 0.0 {
                        max_normalized = max_normalized.max(r.ln() / (6.0 * step_eta));
                    }
                    if r > (6.0 * step_eta).exp() * (1.0 + STABILITY_SLACK) {
                        passed = false;
                    }
                    if r > 1.0 + 7.0 * step_eta {
                        within_linear = false;
                    }
                }
            }
        }
        prev = Some(rec.distributions.clone());
    }
    Ok(StabilityReport {
        player,
        max_eta,
        max_ratio,
        max_normalized,
        exp_bound: (6.0 * max_eta).exp(),
        linear_bound: 1.0 + 7.0 * max_eta,
        passed,
        within_linear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scalar(seq: &[f64]) -> Vec<Vec<f64>> {
        seq.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn constant_sequence_has_zero_differences() {
        let table = FiniteDiffTable::new(&scalar(&[0.3; 8]), 5).unwrap();
        for h in 1..=5 {
            assert!(table.order(h).iter().all(|d| d[0] == 0.0));
        }
    }

    #[test]
    fn linear_sequence_is_annihilated() {
        let seq: Vec<f64> = (1..=10).map(f64::from).collect();
        let table = FiniteDiffTable::new(&scalar(&seq), 2).unwrap();
        assert!(table.order(1).iter().all(|d| d[0] == 1.0));
        assert!(table.order(2).iter().all(|d| d[0] == 0.0));
        assert_eq!(table.order(2).len(), 8);
    }

    #[test]
    fn order_limit() {
        assert!(FiniteDiffTable::new(&scalar(&[1.0, 2.0]), 2).is_err());
        assert!(FiniteDiffTable::new(&scalar(&[1.0, 2.0]), 1).is_ok());
    }

    #[test]
    fn second_difference_by_hand() {
        let seq = scalar(&[0.1, 0.7, 0.2, 0.9]);
        let table = FiniteDiffTable::new(&seq, 2).unwrap();
        assert!((table.get(2, 0)[0] - (0.2 - 2.0 * 0.7 + 0.1)).abs() < 1e-15);
        assert!((table.get(2, 1)[0] - (0.9 - 2.0 * 0.2 + 0.7)).abs() < 1e-15);
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance(&[0.5, 0.5], &[0.0, 1.0]).unwrap(), 0.25);
        assert_eq!(variance(&[0.2, 0.3, 0.5], &[0.4; 3]).unwrap(), 0.0);
        assert!(variance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn horizon_log_values() {
        assert_eq!(horizon_log(1), 0);
        assert_eq!(horizon_log(2), 1);
        assert_eq!(horizon_log(3), 2);
        assert_eq!(horizon_log(1024), 10);
        assert_eq!(horizon_log(1025), 11);
    }

    #[test]
    fn exp_below_linear_on_grid() {
        for i in 0..=10_000 {
            let eta = f64::from(i) / 10_000.0 / 64.0;
            assert!(exp_bound_below_linear(eta), "eta = {eta}");
        }
    }

    #[test]
    fn empty_rvu_is_entropy_term() {
        let r = rvu_from_series(
            &InnerSeries {
                distributions: vec![],
                losses: vec![],
            },
            0.1,
            64.0,
            2f64.ln(),
        )
        .unwrap();
        assert_eq!(r.regret, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn constant_losses_in_variance_tracker() {
        let mut tr = VarianceTracker::new(3);
        for _ in 0..10 {
            tr.push(&[0.2, 0.3, 0.5], &[0.4; 3]).unwrap();
        }
        let rep = tr.report(10, 1.0);
        assert_eq!(rep.lhs, 0.0);
        assert!(rep.holds);
        assert_eq!(rep.min_c_prime, Some(0.0));
    }

    fn bounded_sequence(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.0f64..=1.0, dim), 11..30)
    }

    fn distribution(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..1.0, n).prop_map(|w| {
            let s: f64 = w.iter().sum();
            w.iter().map(|v| v / s).collect()
        })
    }

    proptest! {
        #[test]
        fn recursion_matches_binomial(seq in bounded_sequence(3)) {
            let table = FiniteDiffTable::new(&seq, 10).unwrap();
            prop_assert!(table.binomial_disagreement(&seq) <= BINOMIAL_TOLERANCE);
        }

        #[test]
        fn variance_shift_invariant(q in distribution(4), z in prop::collection::vec(-1.0f64..1.0, 4), c in -5.0f64..5.0) {
            let shifted: Vec<f64> = z.iter().map(|v| v + c).collect();
            prop_assert!((variance(&q, &z).unwrap() - variance(&q, &shifted).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn variance_multiplicative_sandwich(
            q in distribution(4),
            z in prop::collection::vec(-1.0f64..1.0, 4),
            noise in prop::collection::vec(-1.0f64..1.0, 4),
            zeta in 0.0f64..0.1,
        ) {
            // q' within a factor (1 ± ζ/3) of q entrywise, then renormalized:
            // the ratio stays in [1−ζ, 1+ζ] for ζ ≤ 0.1
            let raw: Vec<f64> = q.iter().zip(&noise).map(|(p, e)| p * (1.0 + e * zeta / 3.0)).collect();
            let s: f64 = raw.iter().sum();
            let q2: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let close = q.iter().zip(&q2).all(|(a, b)| b / a <= 1.0 + zeta && a / b <= 1.0 + zeta);
            prop_assert!(close);
            let v = variance(&q, &z).unwrap();
            let v2 = variance(&q2, &z).unwrap();
            prop_assert!(v2 >= (1.0 - zeta) * v - 1e-14);
            prop_assert!(v2 <= (1.0 + zeta) * v + 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn variance_bounded_by_sup_norm(q in distribution(5), z in prop::collection::vec(-3.0f64..3.0, 5)) {
            let v = variance(&q, &z).unwrap();
            prop_assert!(v >= 0.0);
            prop_assert!(v <= linf_norm(&z).powi(2) + 1e-12);
        }
    }
}
