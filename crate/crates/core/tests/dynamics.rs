use ce_dynamics::diagnostics;
use ce_dynamics::metrics::{self, RunTrace};
use ce_dynamics::runner::{adversarial_eta, run_on_game, RunOutput};
use ce_dynamics::{Dynamics, EtaRule, Game, GameSource, RunConfig};

fn biased_pennies() -> Game {
    let row = vec![0.1, 0.9, 0.6, 0.3];
    let col = row.iter().map(|v| 1.0 - v).collect();
    Game::new(vec![2, 2], vec![row, col]).unwrap()
}

fn run(game: &Game, dynamics: Dynamics, horizon: usize, eta: EtaRule) -> RunOutput {
    let config = RunConfig::new(
        GameSource::Random {
            action_counts: game.action_counts().to_vec(),
            seed: 0,
        },
        dynamics,
        horizon,
        eta,
    );
    run_on_game(game, &config).unwrap()
}

fn internal_at(out: &RunOutput, t: usize, player: usize) -> f64 {
    out.curve
        .iter()
        .find(|r| r.t == t && r.player == player)
        .unwrap()
        .internal_regret_clamped
}

#[test]
fn zero_sum_pennies_internal_regret_flattens() {
    let out = run(&biased_pennies(), Dynamics::SlOmwu, 4096, EtaRule::Fixed(0.05));
    for player in 0..2 {
        let ratio = internal_at(&out, 4096, player) / internal_at(&out, 2048, player);
        assert!(ratio < 1.8, "player {player}: ratio {ratio}");
    }
}

#[test]
fn fair_pennies_stays_at_uniform() {
    let game = Game::new(
        vec![2, 2],
        vec![vec![0.0, 1.0, 1.0, 0.0], vec![1.0, 0.0, 0.0, 1.0]],
    )
    .unwrap();
    let out = run(&game, Dynamics::SlOmwu, 200, EtaRule::Fixed(0.1));
    for round in &out.trace.rounds {
        for x in &round.strategies {
            assert_eq!(x, &vec![0.5, 0.5]);
        }
    }
    assert_eq!(out.summary.ce_gap, 0.0);
}

#[test]
fn sl_and_arbo_runs_coincide() {
    let game = Game::random(&[3, 4], 5).unwrap();
    let sl = run(&game, Dynamics::SlOmwu, 150, EtaRule::Fixed(0.05));
    let arbo = run(&game, Dynamics::Arbo, 150, EtaRule::Fixed(0.05));
    for (a, b) in sl.trace.rounds.iter().zip(&arbo.trace.rounds) {
        for (x, y) in a.strategies.iter().zip(&b.strategies) {
            for (p, q) in x.iter().zip(y) {
                assert!((p - q).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn trace_file_reproduces_summary_metrics() {
    let game = Game::random(&[3, 3, 2], 8).unwrap();
    let out = run(&game, Dynamics::BmOmwu, 120, EtaRule::Fixed(0.1));
    let back = RunTrace::from_json(&out.trace.to_json()).unwrap();
    assert_eq!(back.dynamics, "bm-omwu");
    for p in &out.summary.players {
        assert_eq!(metrics::swap_regret(&back, p.player), p.swap_regret);
        assert_eq!(metrics::internal_regret(&back, p.player), p.internal_regret_raw);
    }
    let mu = metrics::average_product_distribution(&back).unwrap();
    let gap = metrics::ce_gap(&game, &mu).unwrap();
    assert_eq!(gap.gap, out.summary.ce_gap);
}

#[test]
fn ce_gap_shrinks_with_more_rounds() {
    let game = Game::random(&[4, 4], 12).unwrap();
    let short = run(&game, Dynamics::SlOmwu, 256, EtaRule::Fixed(0.1));
    let long = run(&game, Dynamics::SlOmwu, 4096, EtaRule::Fixed(0.1));
    assert!(long.summary.ce_gap < short.summary.ce_gap);
    assert!(long.summary.ce_gap < 0.01);
}

#[test]
fn adaptive_switch_restarts_only_the_switching_player() {
    let game = Game::random(&[3, 3], 21).unwrap();
    let mut config = RunConfig::new(
        GameSource::Random {
            action_counts: vec![3, 3],
            seed: 21,
        },
        Dynamics::SlOmwu,
        300,
        EtaRule::Adaptive,
    );
    config.c_prime = 1e-12;
    let out = run_on_game(&game, &config).unwrap();
    for (i, p) in out.summary.players.iter().enumerate() {
        let at = p.switched_at.unwrap();
        let restart = out.trace.restarts[i][0];
        assert_eq!(restart, at);
        // the first restarted round plays uniformly again
        let x = &out.trace.rounds[restart].strategies[i];
        assert!(x.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
        assert_eq!(out.trace.rounds[restart].etas[i], adversarial_eta(6, 300));
    }
    // diagnostics use the segment after the restart
    let checks = diagnostics::check_variance_inequality(&out.trace, 0, 1e-12).unwrap();
    assert_eq!(checks[0].rounds, 300 - out.trace.restarts[0][0]);
}

#[test]
fn theorem_rate_smoothness_on_three_players() {
    let order = 4;
    let alpha = 1.0 / (order as f64 + 3.0);
    let eta = alpha / (36.0 * 5f64.exp() * 3.0);
    let game = Game::random(&[3, 2, 3], 4).unwrap();
    let out = run(&game, Dynamics::SlOmwu, 128, EtaRule::Fixed(eta));
    for player in 0..3 {
        let r = diagnostics::smoothness_report(&out.trace, player, order, alpha).unwrap();
        assert_eq!(r.passed, Some(true));
        assert!(r.binomial_disagreement <= diagnostics::BINOMIAL_TOLERANCE);
    }
}

#[test]
fn smoothness_is_observational_above_threshold() {
    let game = Game::random(&[3, 3], 4).unwrap();
    let out = run(&game, Dynamics::SlOmwu, 64, EtaRule::Fixed(0.2));
    let r = diagnostics::smoothness_report(&out.trace, 0, 5, 0.125).unwrap();
    assert!(!r.applicable);
    assert_eq!(r.passed, None);
    assert!(r.rows.iter().filter(|row| row.order == 0).all(|row| row.norm <= 1.0));
}

#[test]
fn concentrated_pair_mass_does_not_abort() {
    // in this run one player's pair distribution piles onto a single row of
    // the chain, driving that row's diagonal to zero
    let game = Game::random(&[3, 3, 2], 17).unwrap();
    let out = run(&game, Dynamics::SlOmwu, 1500, EtaRule::Fixed(0.1));
    assert!((out.summary.ce_gap - out.summary.ce_gap_from_regret).abs() < 1e-10);
}
