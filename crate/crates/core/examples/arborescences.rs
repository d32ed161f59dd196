//! Directed spanning trees and the Markov chain tree theorem.
//!
//!     cargo run --example arborescences

use ce_dynamics::markov_tree::{tree_theorem_stationary, tree_weights};
use ce_dynamics::{enumerate_arborescences, solve_stationary, TransitionMatrix};

fn main() {
    for n in 2..=6usize {
        let trees = enumerate_arborescences(n, 0).unwrap();
        println!("n = {n}: {} trees per root (n^(n-2) = {})", trees.len(), n.pow(n as u32 - 2));
    }

    println!("\ntrees of the 4-node digraph rooted at node 0 (parents of nodes 1, 2, 3):");
    for tree in enumerate_arborescences(4, 0).unwrap() {
        let parents: Vec<usize> = (1..4).map(|v| tree.parent(v).unwrap()).collect();
        print!("{parents:?} ");
    }
    println!();

    let q = TransitionMatrix::from_rows(vec![
        vec![0.5, 0.3, 0.2],
        vec![0.1, 0.6, 0.3],
        vec![0.4, 0.4, 0.2],
    ])
    .unwrap();
    println!("\nper-root tree weights: {:.5?}", tree_weights(&q).unwrap());
    let by_trees = tree_theorem_stationary(&q).unwrap();
    let by_solve = solve_stationary(&q).unwrap();
    println!("stationary by trees:  {:.12?}", by_trees.as_slice());
    println!("stationary by solve:  {:.12?}", by_solve.as_slice());
    println!("residual |Q^T pi - pi|: {:.2e}", q.stationary_residual(by_trees.as_slice()));
}
