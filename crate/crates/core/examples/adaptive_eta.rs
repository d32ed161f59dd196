//! The adaptive learning rate: silent in self-play, switching to the
//! adversarial rate when the losses misbehave.
//!
//!     cargo run --release --example adaptive_eta

use ce_dynamics::runner::{run_on_game, AdaptiveController};
use ce_dynamics::{Dynamics, EtaRule, Game, GameSource, Learner, RunConfig, SlOmwu};

fn main() {
    let game = Game::random(&[3, 3], 5).unwrap();
    let config = RunConfig::new(
        GameSource::Random {
            action_counts: vec![3, 3],
            seed: 5,
        },
        Dynamics::SlOmwu,
        2048,
        EtaRule::Adaptive,
    );
    let out = run_on_game(&game, &config).unwrap();
    for p in &out.summary.players {
        println!(
            "self-play player {}: eta {:.3e}, switched at {:?}",
            p.player, p.initial_eta, p.switched_at
        );
    }

    // a sawtooth stream against a single learner, with a tiny constant
    let horizon = 2048;
    let mut learner = SlOmwu::new(3, 0.5);
    let mut controller = AdaptiveController::new(learner.inner_dimension(), horizon, 1e-3);
    for t in 1..=horizon {
        learner.next_strategy().unwrap();
        let loss = if t % 2 == 0 { [1.0, 0.0, 0.5] } else { [0.0, 1.0, 0.5] };
        learner.observe_loss(&loss).unwrap();
        if let Some(eta) = controller.observe(t, &learner.inner_record().unwrap()).unwrap() {
            learner.restart(eta);
            println!("sawtooth: switched after round {t} to eta {eta:.4}");
        }
    }
    if controller.switched_at().is_none() {
        println!("sawtooth: no switch");
    }
}
