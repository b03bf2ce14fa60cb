//! Recovers a known 18-leaf tree from its path-length distance matrix.
//!
//! A random ternary tree is grown, distances are derived from it as
//! (path edges + 1) / 18, and the search gets only the matrix. Because the
//! matrix is an exact tree metric, the climb ends at s = 1 with a tree
//! isomorphic to the source.
//!
//! Run with: cargo run --example planted_reconstruction

use ncdtree::scoring::PenaltyConfig;
use ncdtree::search::{hill_climb, SearchConfig};
use ncdtree::synthgen::make_planted_instance;
use std::time::Instant;

fn main() {
    let instance = make_planted_instance(18, 20).unwrap();
    println!("source tree:\n{}\n", instance.source.to_newick());

    let mut cfg = SearchConfig::new(77);
    // Clean consistent data: the orphan-leaf penalty would fight the exact
    // reconstruction, so it stays off here.
    cfg.penalty = PenaltyConfig::disabled();
    let started = Instant::now();
    let outcome = hill_climb(&instance.matrix, &cfg).unwrap();
    println!(
        "search: s = {:.6} after {} evaluations in {:.2}s",
        outcome.score.s,
        outcome.evaluations,
        started.elapsed().as_secs_f64()
    );
    println!("recovered tree:\n{}\n", outcome.tree.to_newick());
    println!(
        "isomorphic to source: {}",
        outcome.tree.is_isomorphic(&instance.source).unwrap()
    );
}
