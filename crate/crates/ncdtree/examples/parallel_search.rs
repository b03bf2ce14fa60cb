//! Runs several hill climbers in parallel around a shared best record.
//!
//! Run with: cargo run --release --example parallel_search

use ncdtree::scoring::PenaltyConfig;
use ncdtree::search::{parallel_search, SearchConfig};
use ncdtree::synthgen::make_planted_instance;
use std::time::Instant;

fn main() {
    let instance = make_planted_instance(18, 11).unwrap();
    for workers in [1, 4] {
        let mut cfg = SearchConfig::new(2);
        cfg.workers = workers;
        cfg.penalty = PenaltyConfig::disabled();
        let started = Instant::now();
        let outcome = parallel_search(&instance.matrix, &cfg).unwrap();
        println!(
            "workers = {workers}: s = {:.6} after {} evaluations in {:.2}s ({} improvements recorded)",
            outcome.score.s,
            outcome.evaluations,
            started.elapsed().as_secs_f64(),
            outcome.trace.points.len()
        );
    }
    println!("\nwith one worker the run is fully determined by the seed;");
    println!("with several, climbers race and adopt the shared incumbent.");
}
