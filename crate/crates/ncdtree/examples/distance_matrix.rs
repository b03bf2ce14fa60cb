//! Builds and prints the pairwise distance matrix of a small mixed corpus.
//!
//! Run with: cargo run --example distance_matrix

use ncdtree::compressor::{Compressor, CompressorId};
use ncdtree::distance::{build_matrix, CorpusItem};
use ncdtree::synthgen::PROSE;
use rand::{RngExt, SeedableRng};

fn main() {
    let prose = PROSE.as_bytes();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let corpus = vec![
        CorpusItem::new("essay-front", prose[..6000].to_vec()),
        CorpusItem::new("essay-mid", prose[3000..9000].to_vec()),
        CorpusItem::new("essay-back", prose[6000..].to_vec()),
        CorpusItem::new("noise-1", (0..6000).map(|_| rng.random()).collect::<Vec<u8>>()),
        CorpusItem::new("noise-2", (0..6000).map(|_| rng.random()).collect::<Vec<u8>>()),
    ];
    let compressor = Compressor::from_id(&CompressorId::default())
        .unwrap()
        .with_cache();
    let matrix = build_matrix(&corpus, &compressor).unwrap();

    println!("{:<12}", "");
    for label in matrix.labels() {
        print!("{label:>12}");
    }
    println!();
    for (i, label) in matrix.labels().iter().enumerate() {
        print!("{label:<12}");
        for j in 0..matrix.len() {
            print!("{:>12.4}", matrix.get(i, j));
        }
        println!();
    }
    println!("\noverlapping essay windows are close; independent noise is near 1.");
    println!("\nmatrix interchange format:\n{}", matrix.to_text());
}
