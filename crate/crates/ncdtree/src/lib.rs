//! Cluster arbitrary byte objects — text, genomes, music, executables — by
//! compressing them.
//!
//! The toolkit approximates the information shared between two byte strings
//! with a real compressor (the normalized compression distance), builds the
//! full pairwise distance matrix of a corpus, and organizes it into an
//! unrooted ternary tree with a randomized quartet-method hill climber.
//! MIDI files get a preprocessing pipeline into a compact player-piano byte
//! representation first; everything else is compared as raw bytes.
//!
//! # Modules
//!
//! - [`compressor`] — compressed-size measurement behind pluggable codecs
//!   (bzip2, gzip, store, external commands), with a shared size cache
//! - [`distance`] — the pairwise distance and the matrix text format
//! - [`tree`] — unrooted ternary trees, quartet topologies, DOT/Newick
//! - [`scoring`] — quartet costs, S(T) normalization, orphan-leaf penalty,
//!   minimum-spanning-tree baseline
//! - [`search`] — the three tree mutations and the randomized hill climber,
//!   single-threaded or with parallel workers around a shared best record
//! - [`midi`] — MIDI parsing and the player-piano stream
//! - [`synthgen`] — seeded generators for ground-truth benchmark corpora
//! - [`cli`] — the `ncdtree` command-line pipeline
//!
//! # Runnable examples
//!
//! Each major capability has a runnable example under `examples/`:
//!
//! ```text
//! cargo run --example compressed_sizes        # codec size measurements
//! cargo run --example distance_matrix         # corpus -> distance matrix
//! cargo run --example quartet_scoring         # S(T) of candidate trees
//! cargo run --example tree_search             # hill climb with trace
//! cargo run --example parallel_search         # multi-worker search
//! cargo run --example planted_reconstruction  # recover a known tree, S = 1
//! cargo run --example tag_corpus              # tagged-file clustering
//! cargo run --example filetype_corpus         # mixed file types cluster
//! cargo run --example midi_preprocess         # MIDI -> player-piano bytes
//! cargo run --example mst_baseline            # spanning-tree comparison
//! ```
//!
//! # A minimal end-to-end run
//!
//! ```
//! use ncdtree::compressor::{Compressor, CompressorId};
//! use ncdtree::distance::{build_matrix, CorpusItem};
//! use ncdtree::search::{hill_climb, SearchConfig};
//!
//! let corpus = vec![
//!     CorpusItem::new("ones", vec![1u8; 4000]),
//!     CorpusItem::new("more-ones", vec![1u8; 4100]),
//!     CorpusItem::new("twos", vec![2u8; 4000]),
//!     CorpusItem::new("mixed", (0..4000u32).map(|i| (i % 251) as u8).collect::<Vec<_>>()),
//! ];
//! let compressor = Compressor::from_id(&CompressorId::bzip2()).unwrap().with_cache();
//! let matrix = build_matrix(&corpus, &compressor).unwrap();
//! let outcome = hill_climb(&matrix, &SearchConfig::new(7)).unwrap();
//! println!("S(T) = {:.6}", outcome.score.s);
//! println!("{}", outcome.tree.to_newick());
//! ```

pub mod cli;
pub mod compressor;
pub mod distance;
pub mod midi;
pub mod scoring;
pub mod search;
pub mod synthgen;
pub mod tree;
mod util;

pub use compressor::{CompressedSize, Compressor, CompressorId};
pub use distance::{build_matrix, ncd, CorpusItem, DistanceMatrix};
pub use scoring::{cost_bounds, mst_baseline, score, PenaltyConfig, QuartetCostTable, TreeScore};
pub use search::{hill_climb, parallel_search, ProgressTrace, SearchConfig, SearchOutcome};
pub use tree::{Pairing, QuartetTopology, TernaryTree};
