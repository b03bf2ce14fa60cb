//! Measures compressed sizes across the registered codecs.
//!
//! Run with: cargo run --example compressed_sizes

use ncdtree::compressor::{compressed_size, concat_size, CompressorId};
use ncdtree::synthgen::PROSE;
use rand::{RngExt, SeedableRng};

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let random: Vec<u8> = (0..20_000).map(|_| rng.random()).collect();
    let repetitive = vec![b'a'; 20_000];
    let prose = PROSE.as_bytes().to_vec();

    let codecs = [
        CompressorId::brotli(),
        CompressorId::bzip2(),
        CompressorId::gzip(),
        CompressorId::store(),
    ];
    println!("{:<10} {:>12} {:>12} {:>12}", "codec", "random 20k", "aaaa 20k", "prose 12k");
    for id in &codecs {
        let sizes: Vec<u64> = [&random, &repetitive, &prose]
            .iter()
            .map(|data| compressed_size(data, id).unwrap().bytes)
            .collect();
        println!("{:<10} {:>12} {:>12} {:>12}", id.to_string(), sizes[0], sizes[1], sizes[2]);
    }

    // The quantity the distance is built from: how much does knowing x help
    // when compressing y?
    println!("\nconcatenation vs. solo sizes (brotli):");
    let id = CompressorId::brotli();
    let z_prose = compressed_size(&prose, &id).unwrap().bytes;
    let z_double = concat_size(&prose, &prose, &id).unwrap().bytes;
    let z_mixed = concat_size(&prose, &random, &id).unwrap().bytes;
    println!("  Z(prose)         = {z_prose}");
    println!("  Z(prose ‖ prose) = {z_double}  (duplicate costs almost nothing)");
    println!("  Z(prose ‖ rand)  = {z_mixed}  (unrelated data costs its full size)");
}
