//! Generators for the controlled-experiment datasets with known ground
//! truth: tagged random files, planted-tree distance matrices, a mixed
//! file-type corpus, and synthetic MIDI songs.
//!
//! Everything here is deterministic per seed, with per-file seeds derived
//! from the corpus seed so files can be generated independently.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::distance::{CorpusItem, DistanceMatrix};
use crate::midi::player_piano_stream;
use crate::tree::{TernaryTree, TreeError};
use crate::util::derive_seed;

/// Number of tags in a library; named `a` through `v`.
pub const TAG_COUNT: usize = 22;
/// Every tag is exactly this many random bytes.
pub const TAG_SIZE: usize = 1024;
/// Size of every tagged file.
pub const TAG_FILE_SIZE: usize = 81_920;
/// How many copies of each tag are planted per file.
pub const TAG_PLACEMENTS: usize = 10;

/// Bundled natural-language text used by the file-type corpus and available
/// to tests as a stand-in for "real" prose.
pub const PROSE: &str = include_str!("../assets/prose.txt");

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("unknown tag `{0}` (tags are lowercase a..v)")]
    UnknownTag(char),
    #[error("file spec `{label}` has {count} tags, need 1..=4")]
    BadTagCount { label: String, count: usize },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// The shared dictionary of random 1-kilobyte blocks.
#[derive(Debug, Clone)]
pub struct TagLibrary {
    pub seed: u64,
    tags: Vec<Vec<u8>>,
}

impl TagLibrary {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let tags = (0..TAG_COUNT)
            .map(|_| {
                let mut block = vec![0u8; TAG_SIZE];
                rng.fill_bytes(&mut block);
                block
            })
            .collect();
        TagLibrary { seed, tags }
    }

    pub fn names() -> impl Iterator<Item = char> {
        ('a'..='v').take(TAG_COUNT)
    }

    pub fn tag(&self, name: char) -> Option<&[u8]> {
        let index = (name as usize).checked_sub('a' as usize)?;
        self.tags.get(index).map(|t| t.as_slice())
    }
}

/// Which tags to plant into one file. The label doubles as the tag string
/// by convention (`"ab"` carries tags a and b).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TaggedFileSpec {
    pub label: String,
    pub tags: Vec<char>,
}

impl TaggedFileSpec {
    pub fn new(tags: &str) -> Self {
        TaggedFileSpec {
            label: tags.to_string(),
            tags: tags.chars().collect(),
        }
    }
}

/// Where one tag copy landed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct TagPlacement {
    pub tag: char,
    pub offset: usize,
}

/// A generated file plus its ground truth.
#[derive(Debug, Clone)]
pub struct TaggedFile {
    pub item: CorpusItem,
    pub tags: Vec<char>,
    pub placements: Vec<TagPlacement>,
}

/// The default 16-file corpus: four families of nested tag subsets, so
/// files within a family share one to three tags and files across families
/// share none. The pattern is configurable by passing different specs.
pub fn default_tag_specs() -> Vec<TaggedFileSpec> {
    ["a", "ab", "abc", "abcd", "e", "ef", "efg", "efgh", "i", "ij", "ijk", "ijkl", "m", "mn", "mno", "mnop"]
        .into_iter()
        .map(TaggedFileSpec::new)
        .collect()
}

/// Generates the tagged files: each starts as uniform random bytes, then
/// every tag in spec order is copied whole to ten uniformly random offsets,
/// later copies possibly overwriting earlier ones. At most 40 kilobytes are
/// ever tag-covered, so at least half of every file stays random.
pub fn make_tag_corpus(
    specs: &[TaggedFileSpec],
    library: &TagLibrary,
    seed: u64,
) -> Result<Vec<TaggedFile>, SynthError> {
    let mut out = Vec::with_capacity(specs.len());
    for (file_index, spec) in specs.iter().enumerate() {
        if spec.tags.is_empty() || spec.tags.len() > 4 {
            return Err(SynthError::BadTagCount {
                label: spec.label.clone(),
                count: spec.tags.len(),
            });
        }
        let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, file_index as u64));
        let mut data = vec![0u8; TAG_FILE_SIZE];
        rng.fill_bytes(&mut data);
        let mut placements = Vec::with_capacity(spec.tags.len() * TAG_PLACEMENTS);
        for &tag in &spec.tags {
            let block = library.tag(tag).ok_or(SynthError::UnknownTag(tag))?;
            for _ in 0..TAG_PLACEMENTS {
                let offset = rng.random_range(0..=TAG_FILE_SIZE - TAG_SIZE);
                data[offset..offset + TAG_SIZE].copy_from_slice(block);
                placements.push(TagPlacement { tag, offset });
            }
        }
        out.push(TaggedFile {
            item: CorpusItem::new(spec.label.clone(), data),
            tags: spec.tags.clone(),
            placements,
        });
    }
    Ok(out)
}

/// A known tree and the distance matrix it induces.
#[derive(Debug, Clone)]
pub struct PlantedTreeInstance {
    pub source: TernaryTree,
    pub matrix: DistanceMatrix,
}

/// Grows a random tree on `n` leaves and derives the matrix
/// `d(a,b) = (L(a,b) + 1) / n` from leaf path lengths (zero on the
/// diagonal). The matrix is an affine image of a tree metric, so the
/// unique optimal quartet tree is the source tree itself.
pub fn make_planted_instance(n: usize, seed: u64) -> Result<PlantedTreeInstance, SynthError> {
    let labels: Vec<String> = (0..n).map(|i| format!("p{i:02}")).collect();
    let source = TernaryTree::random(&labels, seed)?;
    let lengths = source.leaf_path_lengths();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows[i][j] = (lengths[i][j] as f64 + 1.0) / n as f64;
            }
        }
    }
    let matrix = DistanceMatrix::from_rows(labels, rows).expect("planted metric is valid");
    Ok(PlantedTreeInstance { source, matrix })
}

/// The four synthetic file types.
pub const FILETYPE_KINDS: [&str; 4] = ["gene", "text", "piano", "blob"];

/// Type of a file-type corpus item, read off its label prefix.
pub fn filetype_of(label: &str) -> Option<&'static str> {
    FILETYPE_KINDS
        .iter()
        .find(|kind| label.starts_with(&format!("{kind}-")))
        .copied()
}

/// Builds the 16-item mixed-type corpus: four files each of four markedly
/// different kinds, internally correlated and mutually unrelated.
///
/// - `gene-*`: ACGT strings mutated from one common ancestor
/// - `text-*`: overlapping excerpts of the bundled prose
/// - `piano-*`: player-piano streams of variations on one synthetic song
/// - `blob-*`: executable-like binaries sharing an opcode dictionary
pub fn make_filetype_corpus(seed: u64) -> Vec<CorpusItem> {
    let mut out = Vec::with_capacity(16);
    out.extend(gene_files(derive_seed(seed, 1)));
    out.extend(text_files());
    out.extend(piano_files(derive_seed(seed, 2)));
    out.extend(blob_files(derive_seed(seed, 3)));
    out
}

fn gene_files(seed: u64) -> Vec<CorpusItem> {
    const BASES: [u8; 4] = *b"ACGT";
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let ancestor: Vec<u8> = (0..6000).map(|_| BASES[rng.random_range(0..4)]).collect();
    (0..4)
        .map(|i| {
            let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, 10 + i as u64));
            let mut genome = ancestor.clone();
            // Point mutations on ~3% of sites.
            for _ in 0..genome.len() * 3 / 100 {
                let pos = rng.random_range(0..genome.len());
                genome[pos] = BASES[rng.random_range(0..4)];
            }
            // One structural deletion and a short novel tail.
            let del_len = rng.random_range(150..300);
            let del_at = rng.random_range(0..genome.len() - del_len);
            genome.drain(del_at..del_at + del_len);
            for _ in 0..rng.random_range(80..150) {
                genome.push(BASES[rng.random_range(0..4)]);
            }
            CorpusItem::new(format!("gene-{i}"), genome)
        })
        .collect()
}

fn text_files() -> Vec<CorpusItem> {
    let bytes = PROSE.as_bytes();
    let window = bytes.len() / 2;
    let stride = (bytes.len() - window) / 3;
    (0..4)
        .map(|i| {
            let start = i * stride;
            CorpusItem::new(format!("text-{i}"), bytes[start..start + window].to_vec())
        })
        .collect()
}

fn piano_files(seed: u64) -> Vec<CorpusItem> {
    let base = random_song(seed);
    let variants = [
        base.clone(),
        base.transposed(5),
        base.thinned(7, derive_seed(seed, 20)),
        base.transposed(-4).thinned(9, derive_seed(seed, 21)),
    ];
    variants
        .into_iter()
        .enumerate()
        .map(|(i, song)| {
            let stream = player_piano_stream(&encode_midi(&song))
                .expect("synthetic songs are valid MIDI");
            CorpusItem::new(format!("piano-{i}"), stream.bytes)
        })
        .collect()
}

fn blob_files(seed: u64) -> Vec<CorpusItem> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let dictionary: Vec<[u8; 8]> = (0..48)
        .map(|_| {
            let mut op = [0u8; 8];
            rng.fill_bytes(&mut op);
            op
        })
        .collect();
    let mut rodata = vec![0u8; 2048];
    rng.fill_bytes(&mut rodata);
    (0..4)
        .map(|i| {
            let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, 30 + i as u64));
            let mut body = vec![0x7F, b'E', b'L', b'F', 0x02, 0x01, 0x01, 0x00];
            while body.len() < 10_000 {
                // Bias toward low dictionary indices, like a real opcode
                // frequency profile.
                let a = rng.random_range(0..dictionary.len());
                let b = rng.random_range(0..dictionary.len());
                body.extend_from_slice(&dictionary[a.min(b)]);
                if rng.random_range(0..4) == 0 {
                    body.extend_from_slice(&rng.random::<u32>().to_le_bytes());
                }
            }
            body.extend_from_slice(&rodata);
            CorpusItem::new(format!("blob-{i}"), body)
        })
        .collect()
}

/// One synthetic note: absolute onset tick, duration in ticks, pitch,
/// velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthNote {
    pub onset: u64,
    pub duration: u64,
    pub pitch: u8,
    pub velocity: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SynthTrack {
    pub notes: Vec<SynthNote>,
}

/// A whole synthetic song, ready to encode as a standard MIDI file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthSong {
    pub division: u16,
    pub tracks: Vec<SynthTrack>,
}

impl SynthSong {
    /// Shifts every pitch by `semitones`. Callers keep pitches in range by
    /// construction; out-of-range results saturate at the MIDI limits.
    pub fn transposed(&self, semitones: i8) -> SynthSong {
        let tracks = self
            .tracks
            .iter()
            .map(|t| SynthTrack {
                notes: t
                    .notes
                    .iter()
                    .map(|n| SynthNote {
                        pitch: (n.pitch as i16 + semitones as i16).clamp(0, 127) as u8,
                        ..*n
                    })
                    .collect(),
            })
            .collect();
        SynthSong {
            division: self.division,
            tracks,
        }
    }

    /// Drops every `nth` note (per track) and jitters velocities slightly.
    pub fn thinned(&self, nth: usize, seed: u64) -> SynthSong {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let tracks = self
            .tracks
            .iter()
            .map(|t| SynthTrack {
                notes: t
                    .notes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (i + 1) % nth != 0)
                    .map(|(_, n)| SynthNote {
                        velocity: (n.velocity as i16 + rng.random_range(-5..=5)).clamp(1, 127)
                            as u8,
                        ..*n
                    })
                    .collect(),
            })
            .collect();
        SynthSong {
            division: self.division,
            tracks,
        }
    }
}

/// Generates a three-track random-walk song. Pitches stay within
/// [40, 87] so transpositions of up to an octave remain valid MIDI.
pub fn random_song(seed: u64) -> SynthSong {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut tracks = Vec::new();
    for t in 0..3u8 {
        let base_velocity = 95 - 20 * t; // distinct average volumes
        let mut pitch = 52 + 12 * (t % 2) as i16;
        let mut tick = 0u64;
        let mut notes = Vec::new();
        for _ in 0..rng.random_range(120..200) {
            pitch = (pitch + rng.random_range(-4..=4)).clamp(40, 87);
            let duration = [120u64, 240, 240, 480][rng.random_range(0..4)];
            notes.push(SynthNote {
                onset: tick,
                duration,
                pitch: pitch as u8,
                velocity: (base_velocity as i16 + rng.random_range(-8..=8)).clamp(1, 127) as u8,
            });
            tick += [0u64, 120, 240, 240, 480][rng.random_range(0..5)];
        }
        tracks.push(SynthTrack { notes });
    }
    SynthSong {
        division: 480,
        tracks,
    }
}

/// Encodes a song as a format-1 standard MIDI file with explicit status
/// bytes.
pub fn encode_midi(song: &SynthSong) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(b"MThd");
    out.extend_from_slice(&6u32.to_be_bytes());
    out.extend_from_slice(&1u16.to_be_bytes());
    out.extend_from_slice(&(song.tracks.len() as u16).to_be_bytes());
    out.extend_from_slice(&song.division.to_be_bytes());
    for track in &song.tracks {
        // (tick, off-before-on, pitch, velocity, is_on)
        let mut events: Vec<(u64, u8, u8, u8)> = Vec::with_capacity(track.notes.len() * 2);
        for n in &track.notes {
            events.push((n.onset, 1, n.pitch, n.velocity));
            events.push((n.onset + n.duration.max(1), 0, n.pitch, 64));
        }
        events.sort_by_key(|&(tick, on, pitch, _)| (tick, on, pitch));
        let mut data = Vec::new();
        let mut last_tick = 0u64;
        for (tick, on, pitch, velocity) in events {
            write_varint(&mut data, (tick - last_tick) as u32);
            last_tick = tick;
            data.push(if on == 1 { 0x90 } else { 0x80 });
            data.push(pitch);
            data.push(velocity);
        }
        data.extend_from_slice(&[0x00, 0xFF, 0x2F, 0x00]);
        out.extend_from_slice(b"MTrk");
        out.extend_from_slice(&(data.len() as u32).to_be_bytes());
        out.extend_from_slice(&data);
    }
    out
}

fn write_varint(out: &mut Vec<u8>, mut value: u32) {
    let mut stack = [0u8; 5];
    let mut i = 0;
    loop {
        stack[i] = (value & 0x7F) as u8;
        value >>= 7;
        i += 1;
        if value == 0 {
            break;
        }
    }
    while i > 1 {
        i -= 1;
        out.push(stack[i] | 0x80);
    }
    out.push(stack[0]);
}
