//! Clusters the tagged-file benchmark: sixteen 80-kilobyte random files
//! carrying planted 1-kilobyte tags, where files sharing more tags are more
//! related.
//!
//! Run with: cargo run --release --example tag_corpus
//! (compressing 120 pairs of 80 kB files takes a little while)

use ncdtree::compressor::{Compressor, CompressorId};
use ncdtree::distance::{build_matrix, CorpusItem};
use ncdtree::search::{hill_climb, SearchConfig};
use ncdtree::synthgen::{default_tag_specs, make_tag_corpus, TagLibrary};
use std::time::Instant;

fn main() {
    let library = TagLibrary::new(0);
    let specs = default_tag_specs();
    println!(
        "files: {}",
        specs.iter().map(|s| s.label.as_str()).collect::<Vec<_>>().join(" ")
    );
    let files = make_tag_corpus(&specs, &library, 2).unwrap();
    let corpus: Vec<CorpusItem> = files.into_iter().map(|f| f.item).collect();

    let started = Instant::now();
    let compressor = Compressor::from_id(&CompressorId::default())
        .unwrap()
        .with_cache();
    let matrix = build_matrix(&corpus, &compressor).unwrap();
    println!("matrix built in {:.1}s", started.elapsed().as_secs_f64());

    let outcome = hill_climb(&matrix, &SearchConfig::new(7)).unwrap();
    println!(
        "search: s = {:.6} (penalty {:.3}) after {} evaluations",
        outcome.score.s, outcome.score.penalty, outcome.evaluations
    );
    println!("\ntree (families should form clean subtrees):\n{}", outcome.tree.to_newick());
}
