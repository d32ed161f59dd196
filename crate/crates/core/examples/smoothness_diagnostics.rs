//! Finite differences of SL-OMWU pair losses, the RVU bound, the variance
//! inequality and multiplicative stability on one self-play trace.
//!
//!     cargo run --release --example smoothness_diagnostics

use ce_dynamics::diagnostics::{self, smoothness_bound};
use ce_dynamics::runner::run_on_game;
use ce_dynamics::{Dynamics, EtaRule, Game, GameSource, RunConfig};

fn main() {
    let order = 5;
    let alpha = 1.0 / (order as f64 + 3.0);
    let eta = alpha / (36.0 * 5f64.exp() * 2.0);
    let game = Game::random(&[3, 3], 3).unwrap();
    let config = RunConfig::new(
        GameSource::Random {
            action_counts: vec![3, 3],
            seed: 3,
        },
        Dynamics::SlOmwu,
        256,
        EtaRule::Fixed(eta),
    );
    let out = run_on_game(&game, &config).unwrap();

    let report = diagnostics::smoothness_report(&out.trace, 0, order, alpha).unwrap();
    println!("eta {eta:.3e} (pass/fail applies below {:.3e})", report.eta_threshold);
    for h in 0..=order {
        let worst = report
            .rows
            .iter()
            .filter(|r| r.order == h)
            .map(|r| r.norm)
            .fold(0.0, f64::max);
        println!("order {h}: max |D_h L| = {worst:.3e}, bound {:.3e}", smoothness_bound(alpha, h));
    }
    println!("smoothness passed: {:?}", report.passed);
    println!("recursion vs binomial form: {:.1e}", report.binomial_disagreement);

    let rvu = diagnostics::rvu_check(&out.trace, 0, eta, 64.0).unwrap();
    println!("RVU: regret {:.4} <= {:.1} (log n variant {:.1})", rvu.regret, rvu.rhs, rvu.rhs_literal);

    let check = &diagnostics::check_variance_inequality(&out.trace, 0, diagnostics::DEFAULT_C_PRIME)
        .unwrap()[0];
    println!(
        "variance inequality: {:.3e} vs {:.3e} + C' H^5, smallest C' = {:?}",
        check.lhs, check.half_level, check.min_c_prime
    );

    let stability = diagnostics::stability_check(&out.trace, 0).unwrap();
    println!(
        "stability: max ratio {:.8} <= exp(6 eta) = {:.8}: {}",
        stability.max_ratio, stability.exp_bound, stability.passed
    );
}
