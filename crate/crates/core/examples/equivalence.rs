//! SL-OMWU and OMWU over arborescences produce the same strategies.
//!
//!     cargo run --release --example equivalence

use ce_dynamics::{verify_equivalence, Game};

fn main() {
    for seed in 0..5 {
        let game = Game::random(&[3, 4], seed).unwrap();
        let report = verify_equivalence(&game, 0.05, 300, 1e-8).unwrap();
        println!(
            "seed {seed}: max strategy gap {:.2e}, tree-ratio residual {:.2e}, passed {}",
            report.max_strategy_deviation, report.max_proportionality_residual, report.passed
        );
    }
}
