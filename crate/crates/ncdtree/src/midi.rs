//! MIDI parsing and conversion to the player-piano byte representation.
//!
//! Only Note-On and Note-Off events are kept; instrument indicators, control
//! signals, and tempo variations are ignored. Each track is summarized by an
//! average volume (mean Note-On velocity) and a modal note (most frequent
//! pitch, lowest on ties). Time is quantized into 0.05-second steps under a
//! fixed 120 BPM assumption, then tracks are emitted in decreasing
//! average-volume order as signed bytes: per step, the offset of every
//! sounding pitch from the track's modal note, with reserved end-of-step and
//! end-of-track markers.
//!
//! The output format, bit-exact: offsets are two's-complement signed bytes
//! clamped to [−96, +96]; `0x7F` (+127) ends a time step; `0x80` (−128) ends
//! a track block. See `docs/FORMATS.md` for the full layout.

use std::collections::BTreeMap;

/// Quantization step: 0.05 seconds, in microseconds.
pub const STEP_MICROS: u64 = 50_000;
/// Fixed tempo assumption: 500 000 µs per quarter note (120 BPM), applied
/// regardless of tempo meta events since those are ignored.
pub const DEFAULT_TEMPO_MICROS: u64 = 500_000;
/// Reserved byte closing each time step.
pub const END_OF_STEP: i8 = 127;
/// Reserved byte closing each track block.
pub const END_OF_TRACK: i8 = -128;
/// Pitch offsets are clamped into [−MAX_OFFSET, +MAX_OFFSET] so they can
/// never collide with the reserved values.
pub const MAX_OFFSET: i8 = 96;

#[derive(Debug, thiserror::Error)]
pub enum MidiError {
    #[error("malformed MIDI header: {0}")]
    MalformedHeader(String),
    #[error("track chunk is truncated")]
    TruncatedChunk,
    #[error("unsupported MIDI format {0} (only formats 0 and 1)")]
    UnsupportedFormat(u16),
    #[error("SMPTE time division is not supported")]
    UnsupportedDivision,
    #[error("malformed track data: {0}")]
    MalformedTrack(String),
    #[error("track has no note-on events")]
    EmptyTrack,
    #[error("malformed player-piano stream: {0}")]
    MalformedStream(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoteKind {
    On,
    Off,
}

/// A note event with its absolute tick. Note-Ons with velocity 0 are
/// normalized to Note-Offs at parse time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoteEvent {
    pub track_index: usize,
    pub tick: u64,
    pub kind: NoteKind,
    pub pitch: u8,
    pub velocity: u8,
}

/// Parsed note events plus the header metadata needed downstream.
#[derive(Debug, Clone)]
pub struct MidiFile {
    /// Ticks per quarter note.
    pub division: u16,
    /// Number of track chunks in the file (tracks without notes included).
    pub track_count: usize,
    /// All note events, grouped by track in file order, non-decreasing tick
    /// within each track.
    pub events: Vec<NoteEvent>,
}

/// Extracts Note-On/Note-Off events from a standard MIDI file (format 0
/// or 1). Running status is honored; everything that is not a note event is
/// skipped.
pub fn parse_midi(bytes: &[u8]) -> Result<MidiFile, MidiError> {
    let header = |msg: &str| MidiError::MalformedHeader(msg.to_string());
    if bytes.len() < 14 {
        return Err(header("file shorter than a header chunk"));
    }
    if &bytes[0..4] != b"MThd" {
        return Err(header("missing MThd magic"));
    }
    let header_len = read_u32(&bytes[4..8]) as usize;
    if header_len < 6 || bytes.len() < 8 + header_len {
        return Err(header("bad header length"));
    }
    let format = read_u16(&bytes[8..10]);
    if format > 1 {
        return Err(MidiError::UnsupportedFormat(format));
    }
    let division_raw = read_u16(&bytes[12..14]);
    if division_raw & 0x8000 != 0 {
        return Err(MidiError::UnsupportedDivision);
    }
    if division_raw == 0 {
        return Err(header("division of zero ticks per quarter"));
    }

    let mut events = Vec::new();
    let mut track_count = 0usize;
    let mut pos = 8 + header_len;
    while pos < bytes.len() {
        if bytes.len() - pos < 8 {
            return Err(MidiError::TruncatedChunk);
        }
        let chunk_type = &bytes[pos..pos + 4];
        let chunk_len = read_u32(&bytes[pos + 4..pos + 8]) as usize;
        pos += 8;
        if bytes.len() - pos < chunk_len {
            return Err(MidiError::TruncatedChunk);
        }
        if chunk_type == b"MTrk" {
            parse_track(&bytes[pos..pos + chunk_len], track_count, &mut events)?;
            track_count += 1;
        }
        // Alien chunk types are skipped, as the format prescribes.
        pos += chunk_len;
    }
    if track_count == 0 {
        return Err(header("no track chunks"));
    }
    Ok(MidiFile {
        division: division_raw,
        track_count,
        events,
    })
}

fn parse_track(data: &[u8], track_index: usize, events: &mut Vec<NoteEvent>) -> Result<(), MidiError> {
    let mut pos = 0usize;
    let mut tick = 0u64;
    let mut running_status: Option<u8> = None;
    while pos < data.len() {
        let (delta, used) = read_varint(&data[pos..])?;
        pos += used;
        tick += delta as u64;
        let first = *data.get(pos).ok_or(MidiError::TruncatedChunk)?;
        let status = if first & 0x80 != 0 {
            pos += 1;
            first
        } else {
            running_status.ok_or_else(|| {
                MidiError::MalformedTrack("data byte without running status".into())
            })?
        };
        match status & 0xF0 {
            0x80 | 0x90 => {
                running_status = Some(status);
                let pitch = *data.get(pos).ok_or(MidiError::TruncatedChunk)?;
                let velocity = *data.get(pos + 1).ok_or(MidiError::TruncatedChunk)?;
                pos += 2;
                if pitch > 127 || velocity > 127 {
                    return Err(MidiError::MalformedTrack("data byte above 127".into()));
                }
                let kind = if status & 0xF0 == 0x80 || velocity == 0 {
                    NoteKind::Off
                } else {
                    NoteKind::On
                };
                events.push(NoteEvent {
                    track_index,
                    tick,
                    kind,
                    pitch,
                    velocity,
                });
            }
            0xA0 | 0xB0 | 0xE0 => {
                // Aftertouch, control change, pitch bend: two data bytes,
                // ignored.
                running_status = Some(status);
                pos += 2;
            }
            0xC0 | 0xD0 => {
                // Program change, channel pressure: one data byte, ignored.
                running_status = Some(status);
                pos += 1;
            }
            0xF0 => match status {
                0xFF => {
                    let meta_type = *data.get(pos).ok_or(MidiError::TruncatedChunk)?;
                    pos += 1;
                    let (len, used) = read_varint(&data[pos..])?;
                    pos += used + len as usize;
                    running_status = None;
                    if meta_type == 0x2F {
                        // End of track.
                        return check_len(pos, data.len());
                    }
                }
                0xF0 | 0xF7 => {
                    let (len, used) = read_varint(&data[pos..])?;
                    pos += used + len as usize;
                    running_status = None;
                }
                other => {
                    return Err(MidiError::MalformedTrack(format!(
                        "unexpected status byte 0x{other:02X}"
                    )));
                }
            },
            _ => unreachable!("status byte has top bit set"),
        }
        if pos > data.len() {
            return Err(MidiError::TruncatedChunk);
        }
    }
    Ok(())
}

fn check_len(pos: usize, len: usize) -> Result<(), MidiError> {
    if pos > len {
        Err(MidiError::TruncatedChunk)
    } else {
        Ok(())
    }
}

fn read_u32(b: &[u8]) -> u32 {
    u32::from_be_bytes([b[0], b[1], b[2], b[3]])
}

fn read_u16(b: &[u8]) -> u16 {
    u16::from_be_bytes([b[0], b[1]])
}

fn read_varint(data: &[u8]) -> Result<(u32, usize), MidiError> {
    let mut value = 0u32;
    for (i, &byte) in data.iter().take(4).enumerate() {
        value = (value << 7) | (byte & 0x7F) as u32;
        if byte & 0x80 == 0 {
            return Ok((value, i + 1));
        }
    }
    Err(MidiError::MalformedTrack("unterminated variable-length quantity".into()))
}

/// Average volume and modal note of one track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackSummary {
    /// Mean Note-On velocity, in [0, 127].
    pub average_volume: f64,
    /// Most frequent Note-On pitch; ties resolve to the lowest pitch.
    pub modal_note: u8,
}

/// Summarizes the note-on events of one track.
pub fn summarize_track(events: &[NoteEvent]) -> Result<TrackSummary, MidiError> {
    let mut volume_sum = 0u64;
    let mut ons = 0u64;
    let mut pitch_counts = [0u32; 128];
    for e in events {
        if e.kind == NoteKind::On {
            volume_sum += e.velocity as u64;
            ons += 1;
            pitch_counts[e.pitch as usize] += 1;
        }
    }
    if ons == 0 {
        return Err(MidiError::EmptyTrack);
    }
    let max_count = *pitch_counts.iter().max().expect("non-empty");
    let modal_note = pitch_counts
        .iter()
        .position(|&c| c == max_count)
        .expect("non-empty") as u8;
    Ok(TrackSummary {
        average_volume: volume_sum as f64 / ons as f64,
        modal_note,
    })
}

/// One track's quantized timeline: for each 0.05 s step, the sorted set of
/// sounding pitches. Trailing silent steps are trimmed; leading and interior
/// silences stay as empty steps to preserve alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackRoll {
    pub track_index: usize,
    pub steps: Vec<Vec<u8>>,
}

/// Quantized rolls for every track that contains at least one Note-On.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedRoll {
    pub tracks: Vec<TrackRoll>,
}

/// Maps an event tick to its step index under the fixed tempo assumption.
/// Exact integer arithmetic; no rounding drift.
pub fn step_of_tick(tick: u64, division: u16, tempo_micros: u64) -> u64 {
    ((tick as u128 * tempo_micros as u128) / (division as u128 * STEP_MICROS as u128)) as u64
}

/// Quantizes note events into per-track rolls. A note sounds from the step
/// containing its Note-On up to but excluding the step containing its
/// Note-Off (so zero-length notes vanish). Note-Ons left open at the end of
/// a track sound until the track's final event tick. Duplicate Note-Ons on a
/// sounding pitch are counted with multiplicity and need matching offs; the
/// step still lists the pitch once.
pub fn quantize(events: &[NoteEvent], division: u16, tempo_micros: u64) -> QuantizedRoll {
    let mut by_track: BTreeMap<usize, Vec<&NoteEvent>> = BTreeMap::new();
    for e in events {
        by_track.entry(e.track_index).or_default().push(e);
    }
    let mut tracks = Vec::new();
    for (track_index, track_events) in by_track {
        if !track_events.iter().any(|e| e.kind == NoteKind::On) {
            continue;
        }
        let final_step = step_of_tick(
            track_events.last().expect("non-empty").tick,
            division,
            tempo_micros,
        );
        // Per-step pitch count deltas, via a sweep over events in order.
        let mut deltas: BTreeMap<u64, Vec<(u8, i32)>> = BTreeMap::new();
        let mut live = [0u32; 128];
        for e in &track_events {
            let step = step_of_tick(e.tick, division, tempo_micros);
            match e.kind {
                NoteKind::On => {
                    live[e.pitch as usize] += 1;
                    deltas.entry(step).or_default().push((e.pitch, 1));
                }
                NoteKind::Off => {
                    // Unmatched offs are ignored.
                    if live[e.pitch as usize] > 0 {
                        live[e.pitch as usize] -= 1;
                        deltas.entry(step).or_default().push((e.pitch, -1));
                    }
                }
            }
        }
        for pitch in 0..128u8 {
            for _ in 0..live[pitch as usize] {
                deltas.entry(final_step).or_default().push((pitch, -1));
            }
        }
        let mut steps: Vec<Vec<u8>> = Vec::new();
        let mut counts = [0i32; 128];
        let last_delta_step = *deltas.keys().last().expect("at least one note-on");
        for step in 0..=last_delta_step {
            if let Some(changes) = deltas.get(&step) {
                for &(pitch, delta) in changes {
                    counts[pitch as usize] += delta;
                }
            }
            let sounding: Vec<u8> = (0..128u8).filter(|&p| counts[p as usize] > 0).collect();
            steps.push(sounding);
        }
        while steps.last().is_some_and(|s| s.is_empty()) {
            steps.pop();
        }
        tracks.push(TrackRoll { track_index, steps });
    }
    QuantizedRoll { tracks }
}

/// The signed-byte player-piano representation of a whole file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerPianoStream {
    pub bytes: Vec<u8>,
}

impl PlayerPianoStream {
    /// Reference reader: splits the stream back into per-track, per-step
    /// offset lists. The inverse of [`emit_stream`] up to the offset
    /// clamping.
    pub fn decode(&self) -> Result<Vec<Vec<Vec<i8>>>, MidiError> {
        let mut tracks = Vec::new();
        let mut steps: Vec<Vec<i8>> = Vec::new();
        let mut current: Vec<i8> = Vec::new();
        for &b in &self.bytes {
            let v = b as i8;
            if v == END_OF_TRACK {
                if !current.is_empty() {
                    return Err(MidiError::MalformedStream(
                        "track ended inside an unterminated step".into(),
                    ));
                }
                tracks.push(std::mem::take(&mut steps));
            } else if v == END_OF_STEP {
                steps.push(std::mem::take(&mut current));
            } else {
                if v.abs() > MAX_OFFSET {
                    return Err(MidiError::MalformedStream(format!("offset {v} out of range")));
                }
                current.push(v);
            }
        }
        if !current.is_empty() || !steps.is_empty() {
            return Err(MidiError::MalformedStream("missing end-of-track terminator".into()));
        }
        Ok(tracks)
    }
}

/// Emits the stream: track blocks in decreasing average-volume order (ties
/// keep file order), each step's sounding pitches as offsets from the
/// track's modal note (ascending, clamped to ±96), end-of-step after every
/// step, end-of-track after every block.
///
/// Panics if a roll track has no summary; the pipeline always builds
/// summaries for exactly the rolled tracks.
pub fn emit_stream(roll: &QuantizedRoll, summaries: &[(usize, TrackSummary)]) -> PlayerPianoStream {
    let mut order: Vec<&TrackRoll> = roll.tracks.iter().collect();
    let summary_of = |track_index: usize| -> &TrackSummary {
        summaries
            .iter()
            .find(|(i, _)| *i == track_index)
            .map(|(_, s)| s)
            .unwrap_or_else(|| panic!("no summary for track {track_index}"))
    };
    order.sort_by(|a, b| {
        summary_of(b.track_index)
            .average_volume
            .total_cmp(&summary_of(a.track_index).average_volume)
    });
    let mut bytes = Vec::new();
    for track in order {
        let modal = summary_of(track.track_index).modal_note as i16;
        for step in &track.steps {
            for &pitch in step {
                let offset = (pitch as i16 - modal).clamp(-(MAX_OFFSET as i16), MAX_OFFSET as i16);
                bytes.push(offset as i8 as u8);
            }
            bytes.push(END_OF_STEP as u8);
        }
        bytes.push(END_OF_TRACK as u8);
    }
    PlayerPianoStream { bytes }
}

/// The full preprocessing pipeline: parse, summarize, quantize, emit.
/// Tracks without any Note-On are dropped with a warning.
pub fn player_piano_stream(midi_bytes: &[u8]) -> Result<PlayerPianoStream, MidiError> {
    let file = parse_midi(midi_bytes)?;
    let roll = quantize(&file.events, file.division, DEFAULT_TEMPO_MICROS);
    let rolled: Vec<usize> = roll.tracks.iter().map(|t| t.track_index).collect();
    for track_index in 0..file.track_count {
        if !rolled.contains(&track_index) {
            log::warn!("track {track_index} has no note-on events; dropped");
        }
    }
    let mut summaries = Vec::new();
    for &track_index in &rolled {
        let track_events: Vec<NoteEvent> = file
            .events
            .iter()
            .filter(|e| e.track_index == track_index)
            .copied()
            .collect();
        summaries.push((track_index, summarize_track(&track_events)?));
    }
    Ok(emit_stream(&roll, &summaries))
}
