//! End-to-end pipeline checks that cross module boundaries: the golden MIDI
//! fixture, transposition invariance, the matrix file format, and the
//! tag-ordering property of the distance on generated corpora.

use std::sync::OnceLock;

use ncdtree::compressor::{Compressor, CompressorId};
use ncdtree::distance::{build_matrix, DistanceMatrix};
use ncdtree::midi::player_piano_stream;
use ncdtree::synthgen::{
    default_tag_specs, encode_midi, make_tag_corpus, random_song, TagLibrary, TaggedFileSpec,
};

const FIXTURE_MID: &[u8] = include_bytes!("data/fixture.mid");
const FIXTURE_PP: &[u8] = include_bytes!("data/fixture.pp");

#[test]
fn golden_fixture_produces_the_hand_traced_stream() {
    // The fixture has two tracks, division 480, fixed 0.05 s steps:
    // the louder track holds pitches {60, 64} for steps 0..9 and {64} for
    // 10..19 around modal note 60; the quieter one holds {48} for 20 steps
    // around modal 48. Expected bytes derived by hand from those rules.
    let stream = player_piano_stream(FIXTURE_MID).unwrap();
    let mut expected = Vec::new();
    for _ in 0..10 {
        expected.extend_from_slice(&[0x00, 0x04, 0x7F]);
    }
    for _ in 0..10 {
        expected.extend_from_slice(&[0x04, 0x7F]);
    }
    expected.push(0x80);
    for _ in 0..20 {
        expected.extend_from_slice(&[0x00, 0x7F]);
    }
    expected.push(0x80);
    assert_eq!(expected.as_slice(), FIXTURE_PP, "committed golden drifted");
    assert_eq!(stream.bytes, FIXTURE_PP, "pipeline output differs from golden");
}

#[test]
fn transposing_a_song_never_changes_its_stream() {
    // The modal note shifts with the transposition, so every offset byte is
    // unchanged: the stream is key-invariant.
    for seed in 0..50u64 {
        let song = random_song(seed);
        let mut semitones = (seed % 23) as i8 - 11; // -11..=11
        if semitones == 0 {
            semitones = 12;
        }
        let base = player_piano_stream(&encode_midi(&song)).unwrap();
        let shifted = player_piano_stream(&encode_midi(&song.transposed(semitones))).unwrap();
        assert_eq!(base, shifted, "seed {seed} shift {semitones}");
    }
}

#[test]
fn matrix_files_round_trip_between_builder_and_search_input() {
    let corpus = ncdtree::synthgen::make_filetype_corpus(1)
        .into_iter()
        .take(6)
        .collect::<Vec<_>>();
    let compressor = Compressor::from_id(&CompressorId::default())
        .unwrap()
        .with_cache();
    let matrix = build_matrix(&corpus, &compressor).unwrap();
    let text = matrix.to_text();
    let reread = DistanceMatrix::from_text(&text).unwrap();
    assert_eq!(reread.to_text(), text);
    // Values survive at exactly the six-digit precision the format carries
    // (half of the last digit, inclusive at the rounding boundary).
    for i in 0..matrix.len() {
        for j in 0..matrix.len() {
            assert!((reread.get(i, j) - matrix.get(i, j)).abs() <= 5.01e-7);
        }
    }
}

fn tag_matrix() -> &'static (Vec<TaggedFileSpec>, DistanceMatrix) {
    static MATRIX: OnceLock<(Vec<TaggedFileSpec>, DistanceMatrix)> = OnceLock::new();
    MATRIX.get_or_init(|| {
        let specs = default_tag_specs();
        let library = TagLibrary::new(0);
        let files = make_tag_corpus(&specs, &library, 2).unwrap();
        let corpus: Vec<_> = files.into_iter().map(|f| f.item).collect();
        let compressor = Compressor::from_id(&CompressorId::default())
            .unwrap()
            .with_cache();
        let matrix = build_matrix(&corpus, &compressor).unwrap();
        (specs, matrix)
    })
}

fn overlap(a: &TaggedFileSpec, b: &TaggedFileSpec) -> usize {
    a.tags.iter().filter(|t| b.tags.contains(t)).count()
}

#[test]
fn sharing_any_tag_beats_sharing_none_for_most_triples() {
    let (specs, matrix) = tag_matrix();
    let n = specs.len();
    let mut total = 0u32;
    let mut ordered = 0u32;
    for x in 0..n {
        for y in 0..n {
            if y == x || overlap(&specs[x], &specs[y]) == 0 {
                continue;
            }
            for z in 0..n {
                if z == x || z == y || overlap(&specs[x], &specs[z]) > 0 {
                    continue;
                }
                total += 1;
                if matrix.get(x, y) < matrix.get(x, z) {
                    ordered += 1;
                }
            }
        }
    }
    let fraction = ordered as f64 / total as f64;
    assert!(
        fraction >= 0.95,
        "only {ordered}/{total} = {fraction:.3} of shared-vs-disjoint triples ordered"
    );
}

#[test]
fn clearly_larger_overlap_means_smaller_distance_for_most_triples() {
    let (specs, matrix) = tag_matrix();
    let n = specs.len();
    let mut total = 0u32;
    let mut ordered = 0u32;
    for x in 0..n {
        for y in 0..n {
            if y == x {
                continue;
            }
            for z in 0..n {
                if z == x || z == y {
                    continue;
                }
                if overlap(&specs[x], &specs[y]) > overlap(&specs[x], &specs[z]) + 1 {
                    total += 1;
                    if matrix.get(x, y) < matrix.get(x, z) {
                        ordered += 1;
                    }
                }
            }
        }
    }
    let fraction = ordered as f64 / total as f64;
    assert!(
        fraction >= 0.90,
        "only {ordered}/{total} = {fraction:.3} of overlap-ordered triples respected"
    );
}
