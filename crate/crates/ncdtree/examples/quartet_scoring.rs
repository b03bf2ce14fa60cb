//! Scores candidate trees against a distance matrix: quartet costs, the
//! best/worst normalization bounds, and the normalized benefit S(T).
//!
//! Run with: cargo run --example quartet_scoring

use ncdtree::scoring::{cost_bounds, orphan_internal_count, score, PenaltyConfig};
use ncdtree::synthgen::make_planted_instance;
use ncdtree::tree::TernaryTree;

fn main() {
    let instance = make_planted_instance(8, 3).unwrap();
    let matrix = &instance.matrix;
    let bounds = cost_bounds(matrix).unwrap();
    println!(
        "8 leaves -> {} leaf 4-sets; best_total = {:.4}, worst_total = {:.4}",
        bounds.group_count(),
        bounds.best_total(),
        bounds.worst_total()
    );

    let source = score(&instance.source, matrix, &bounds, PenaltyConfig::default()).unwrap();
    println!(
        "\nsource tree:      raw_cost {:.4}  s {:.6}  penalty {:.3}  s_eff {:.6}",
        source.raw_cost, source.s, source.penalty, source.s_effective
    );

    let caterpillar = TernaryTree::caterpillar(matrix.labels()).unwrap();
    let cat = score(&caterpillar, matrix, &bounds, PenaltyConfig::default()).unwrap();
    println!(
        "caterpillar:      raw_cost {:.4}  s {:.6}  penalty {:.3}  s_eff {:.6}   ({} orphan internals)",
        cat.raw_cost,
        cat.s,
        cat.penalty,
        cat.s_effective,
        orphan_internal_count(&caterpillar)
    );

    for seed in 0..3 {
        let tree = TernaryTree::random(matrix.labels(), seed).unwrap();
        let sc = score(&tree, matrix, &bounds, PenaltyConfig::default()).unwrap();
        println!(
            "random (seed {seed}):  raw_cost {:.4}  s {:.6}  penalty {:.3}  s_eff {:.6}",
            sc.raw_cost, sc.s, sc.penalty, sc.s_effective
        );
    }
    println!("\nthe matrix was derived from the source tree, so only it reaches s = 1.");
}
