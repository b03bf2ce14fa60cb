//! Clusters a corpus of four markedly different synthetic file kinds:
//! gene-like ACGT strings, prose excerpts, player-piano streams, and
//! executable-like binaries. Four files of each kind; like should end up
//! near like without the pipeline knowing anything about the formats.
//!
//! Run with: cargo run --release --example filetype_corpus

use ncdtree::compressor::{Compressor, CompressorId};
use ncdtree::distance::build_matrix;
use ncdtree::search::{hill_climb, SearchConfig};
use ncdtree::synthgen::{filetype_of, make_filetype_corpus};

fn main() {
    let corpus = make_filetype_corpus(0);
    for item in &corpus {
        println!("{:<10} {:>6} bytes", item.label, item.data.len());
    }
    let compressor = Compressor::from_id(&CompressorId::default())
        .unwrap()
        .with_cache();
    let matrix = build_matrix(&corpus, &compressor).unwrap();
    let outcome = hill_climb(&matrix, &SearchConfig::new(7)).unwrap();
    println!("\ns = {:.6}", outcome.score.s);
    println!("tree:\n{}", outcome.tree.to_newick());

    let labels = outcome.tree.labels();
    let lengths = outcome.tree.leaf_path_lengths();
    let mut same = 0;
    for i in 0..labels.len() {
        let nearest = (0..labels.len())
            .filter(|&j| j != i)
            .min_by_key(|&j| lengths[i][j])
            .unwrap();
        if filetype_of(&labels[i]) == filetype_of(&labels[nearest]) {
            same += 1;
        }
    }
    println!("\n{same}/16 leaves have a same-kind nearest neighbor in the tree.");
}
