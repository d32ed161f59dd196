//! SL-OMWU self-play on a zero-sum biased matching-pennies game.
//!
//!     cargo run --release --example sl_omwu_selfplay

use ce_dynamics::runner::run_on_game;
use ce_dynamics::{Dynamics, EtaRule, Game, GameSource, RunConfig};

fn main() {
    let row = vec![0.1, 0.9, 0.6, 0.3];
    let col = row.iter().map(|v| 1.0 - v).collect();
    let game = Game::new(vec![2, 2], vec![row, col]).unwrap();
    let horizon = 4096;
    let config = RunConfig::new(
        GameSource::File("biased-pennies.json".into()),
        Dynamics::SlOmwu,
        horizon,
        EtaRule::Fixed(0.05),
    );
    let out = run_on_game(&game, &config).unwrap();

    println!("    t  player  external  internal  swap");
    for row in out.curve.iter().filter(|r| r.t.is_power_of_two() && r.t >= 64) {
        println!(
            "{:>5}  {:>6}  {:>8.3}  {:>8.3}  {:>6.3}",
            row.t, row.player, row.external_regret, row.internal_regret_clamped, row.swap_regret
        );
    }
    for player in 0..2 {
        let at = |t: usize| {
            out.curve
                .iter()
                .find(|r| r.t == t && r.player == player)
                .unwrap()
                .internal_regret_clamped
        };
        println!(
            "player {player}: IntReg(T)/IntReg(T/2) = {:.3}",
            at(horizon) / at(horizon / 2)
        );
    }
    println!("final strategies: {:.4?}", out.trace.rounds.last().unwrap().strategies);
    println!("CE gap of the average play: {:.2e}", out.summary.ce_gap);
}
