//! Hill-climbs a tree for a random distance matrix and prints the progress
//! trace.
//!
//! Run with: cargo run --example tree_search

use ncdtree::distance::DistanceMatrix;
use ncdtree::search::{hill_climb, SearchConfig};
use rand::{RngExt, SeedableRng};

fn main() {
    let n = 12;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let labels: Vec<String> = (0..n).map(|i| format!("item-{i:02}")).collect();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..i {
            let v: f64 = rng.random_range(0.1..1.0);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    let matrix = DistanceMatrix::from_rows(labels, rows).unwrap();

    let mut cfg = SearchConfig::new(42);
    cfg.plateau_limit = Some(20_000);
    let outcome = hill_climb(&matrix, &cfg).unwrap();

    println!("improvements (eval_count, best_s, seconds):");
    for point in &outcome.trace.points {
        println!("  {:>7}  {:.6}  {:.3}s", point.evals, point.best_s, point.seconds);
    }
    println!(
        "\nstopped after {} evaluations ({:?}); final s = {:.6}, penalty = {:.3}",
        outcome.evaluations, outcome.stop, outcome.score.s, outcome.score.penalty
    );
    println!("\nbest tree:\n{}", outcome.tree.to_newick());
    println!("\nDOT rendering (feed to graphviz):\n{}", outcome.tree.to_dot());
}
