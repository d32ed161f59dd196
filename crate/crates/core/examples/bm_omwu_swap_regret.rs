//! BM-OMWU against a stream of losses, with swap regret tracked online.
//!
//!     cargo run --example bm_omwu_swap_regret

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ce_dynamics::{BmOmwu, Learner, MwuLearner, RegretAccumulator};

fn main() {
    let n = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bm = BmOmwu::new(n, 0.05);
    let mut hedge = MwuLearner::optimistic(n, 0.05);
    let mut bm_regret = RegretAccumulator::new(n);
    let mut hedge_regret = RegretAccumulator::new(n);
    let mut worst_split: f64 = 0.0;

    for t in 1..=2000 {
        // each action is good in one phase and bad in the next
        let phase = (t / 250) % n;
        let loss: Vec<f64> = (0..n)
            .map(|a| if a == phase { 0.1 } else { 0.6 } + 0.3 * rng.gen::<f64>())
            .collect();
        let x = bm.next_strategy().unwrap();
        worst_split = worst_split.max(bm.loss_decomposition_gap(&loss).unwrap());
        let y = hedge.next_strategy().unwrap();
        bm.observe_loss(&loss).unwrap();
        hedge.observe_loss(&loss).unwrap();
        bm_regret.push(x.as_slice(), &loss);
        hedge_regret.push(y.as_slice(), &loss);
    }
    println!("             external  internal  swap");
    for (name, r) in [("bm-omwu", &bm_regret), ("omwu", &hedge_regret)] {
        println!(
            "{name:<12} {:>8.2}  {:>8.2}  {:>6.2}",
            r.external(),
            r.internal_raw(),
            r.swap()
        );
    }
    println!("best swap for bm-omwu: {:?}", bm_regret.best_swap());
    println!("max |sum_g x[g]<Q[g],l> - <x,l>|: {worst_split:.2e}");
}
