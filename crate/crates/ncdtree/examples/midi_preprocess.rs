//! Converts a synthetic MIDI song into the player-piano byte stream the
//! compressor consumes, and shows why the representation is key-invariant.
//!
//! Run with: cargo run --example midi_preprocess

use ncdtree::midi::{parse_midi, player_piano_stream, END_OF_STEP, END_OF_TRACK};
use ncdtree::synthgen::{encode_midi, random_song};

fn main() {
    let song = random_song(3);
    let midi = encode_midi(&song);
    let parsed = parse_midi(&midi).unwrap();
    println!(
        "MIDI: {} bytes, {} tracks, division {} ticks/quarter, {} note events",
        midi.len(),
        parsed.track_count,
        parsed.division,
        parsed.events.len()
    );

    let stream = player_piano_stream(&midi).unwrap();
    println!("player-piano stream: {} bytes", stream.bytes.len());
    print!("first bytes as signed offsets: ");
    for &b in stream.bytes.iter().take(24) {
        match b as i8 {
            END_OF_STEP => print!("| "),
            END_OF_TRACK => print!("# "),
            v => print!("{v} "),
        }
    }
    println!("...   (| ends a 0.05 s step, # ends a track)");

    let decoded = stream.decode().unwrap();
    println!(
        "decoded: {} track blocks with {} steps",
        decoded.len(),
        decoded.iter().map(|t| t.len()).sum::<usize>()
    );

    // Transposing the song shifts its modal note equally, so the offsets
    // and therefore the whole stream are unchanged.
    let up5 = player_piano_stream(&encode_midi(&song.transposed(5))).unwrap();
    println!(
        "\nstream of the same song transposed up a fourth is identical: {}",
        up5 == stream
    );
}
