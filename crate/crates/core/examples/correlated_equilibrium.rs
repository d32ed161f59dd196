//! CE gap of the average product distribution, against the internal
//! regrets that bound it.
//!
//!     cargo run --release --example correlated_equilibrium

use ce_dynamics::runner::run_on_game;
use ce_dynamics::{ce_gap, Dynamics, EtaRule, Game, GameSource, JointDistribution, RunConfig};

fn main() {
    // a hand-made correlated equilibrium of a coordination game
    let coordination = Game::new(vec![2, 2], vec![vec![0.0, 1.0, 1.0, 0.0]; 2]).unwrap();
    let mu = JointDistribution::dense(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    println!("coordination game, half/half on the diagonal: gap {}", ce_gap(&coordination, &mu).unwrap().gap);

    let game = Game::random(&[3, 3, 2], 17).unwrap();
    for horizon in [128, 512, 2048, 8192] {
        let config = RunConfig::new(
            GameSource::Random {
                action_counts: vec![3, 3, 2],
                seed: 17,
            },
            Dynamics::SlOmwu,
            horizon,
            EtaRule::Fixed(0.1),
        );
        let out = run_on_game(&game, &config).unwrap();
        println!(
            "T = {horizon:>5}: CE gap {:.3e}, max IntReg/T {:.3e}",
            out.summary.ce_gap, out.summary.ce_gap_from_regret
        );
    }
}
