//! Optimistic vs plain multiplicative weights on a fixed loss stream.
//!
//!     cargo run --example omwu_basics

use ce_dynamics::Omwu;

fn main() {
    let eta = 0.1;
    let mut optimistic = Omwu::new(3, eta);
    let mut plain = Omwu::non_optimistic(3, eta);
    // action 2 is best on average; actions 0 and 1 alternate
    let losses = [[1.0, 0.0, 0.4], [0.0, 1.0, 0.4]];

    println!("round  optimistic                 plain");
    let mut worst_ratio: f64 = 1.0;
    let mut previous = optimistic.next_strategy();
    for t in 0..40 {
        let x = optimistic.next_strategy();
        let y = plain.next_strategy();
        for (a, b) in previous.as_slice().iter().zip(x.as_slice()) {
            worst_ratio = worst_ratio.max((a / b).max(b / a));
        }
        if t % 8 == 0 {
            println!("{t:>5}  {:.3?}  {:.3?}", x.as_slice(), y.as_slice());
        }
        let loss = &losses[t % 2];
        optimistic.observe_loss(loss).unwrap();
        plain.observe_loss(loss).unwrap();
        previous = x;
    }
    println!(
        "largest consecutive ratio {worst_ratio:.5}, bound exp(6 eta) = {:.5}",
        (6.0 * eta).exp()
    );
}
