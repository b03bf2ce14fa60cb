//! Compressed-size measurement behind a pluggable codec interface.
//!
//! The whole pipeline only ever asks one question of a compressor: "how many
//! bytes does the compressed form of this input occupy?". Sizes include the
//! codec's container/header bytes; the constant offsets largely cancel in the
//! distance ratio downstream. Every codec must be deterministic: the same
//! `CompressorId` and the same input always yield the same size, across calls
//! and across processes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use sha2::{Digest, Sha256};

/// Size of the synthetic header prepended by the `store` codec.
pub const STORE_HEADER_BYTES: u64 = 8;

/// Errors from size measurement.
#[derive(Debug, thiserror::Error)]
pub enum CompressorError {
    /// The requested codec name is not registered.
    #[error("unknown compressor `{0}`")]
    UnknownCompressor(String),
    /// A codec parameter is missing, unknown, or out of range.
    #[error("bad parameter for compressor `{name}`: {reason}")]
    BadParameter { name: String, reason: String },
    /// Input exceeds the configured hard limit (`max-input` parameter).
    #[error("input of {len} bytes exceeds configured limit of {limit} bytes")]
    InputTooLarge { len: usize, limit: usize },
    /// An external compressor process failed.
    #[error("external compressor `{command}` failed: {reason}")]
    ExternalFailed { command: String, reason: String },
}

/// Identifies a codec plus its parameters. Equal ids always measure equal
/// sizes on equal inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct CompressorId {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
}

impl CompressorId {
    pub fn new(name: &str) -> Self {
        CompressorId {
            name: name.to_string(),
            parameters: BTreeMap::new(),
        }
    }

    pub fn with_parameter(mut self, key: &str, value: &str) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    /// Long-window LZ codec (16 MB window at quality 9). The toolkit
    /// default: it deduplicates shared content across a whole concatenated
    /// pair and keeps the self-distance of an object near zero, which the
    /// block-sorting codecs cannot do.
    pub fn brotli() -> Self {
        CompressorId::new("brotli")
    }

    /// Block-sorting codec at the largest block size (900 kB window).
    /// Note that its self-concatenation overhead is large (measured 16-50%
    /// of the solo size on natural data), which inflates self-distances.
    pub fn bzip2() -> Self {
        CompressorId::new("bzip2")
    }

    /// Deflate-family codec; 32 kB window.
    pub fn gzip() -> Self {
        CompressorId::new("gzip")
    }

    /// Pass-through codec: a fixed header plus the raw bytes.
    pub fn store() -> Self {
        CompressorId::new("store")
    }
}

impl Default for CompressorId {
    fn default() -> Self {
        CompressorId::brotli()
    }
}

impl fmt::Display for CompressorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for (i, (k, v)) in self.parameters.iter().enumerate() {
            write!(f, "{}{}={}", if i == 0 { ":" } else { "," }, k, v)?;
        }
        Ok(())
    }
}

impl FromStr for CompressorId {
    type Err = CompressorError;

    /// Parses `name` or `name:key=val,key=val`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        if name.is_empty() {
            return Err(CompressorError::UnknownCompressor(s.to_string()));
        }
        let mut id = CompressorId::new(name);
        if let Some(params) = params {
            for pair in params.split(',') {
                let (k, v) = pair.split_once('=').ok_or_else(|| CompressorError::BadParameter {
                    name: name.to_string(),
                    reason: format!("expected key=value, got `{pair}`"),
                })?;
                id.parameters.insert(k.to_string(), v.to_string());
            }
        }
        Ok(id)
    }
}

/// Number of bytes the compressed form occupies, headers included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CompressedSize {
    pub bytes: u64,
}

impl fmt::Display for CompressedSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bytes)
    }
}

trait Codec: Send + Sync {
    fn compressed_len(&self, data: &[u8]) -> Result<u64, CompressorError>;
    /// Window beyond which the codec stops seeing redundancy; `None` means
    /// unbounded. Inputs past this point are measured anyway, with a warning,
    /// since the distance approximation degrades beyond the window.
    fn window(&self) -> Option<usize>;
}

struct BrotliCodec {
    quality: u32,
    lgwin: u32,
}

impl Codec for BrotliCodec {
    fn compressed_len(&self, data: &[u8]) -> Result<u64, CompressorError> {
        let mut out = Vec::new();
        let mut enc =
            brotli::CompressorWriter::new(&mut out, 4096, self.quality, self.lgwin);
        enc.write_all(data)
            .and_then(|_| enc.flush())
            .map_err(|e| CompressorError::ExternalFailed {
                command: "brotli".into(),
                reason: e.to_string(),
            })?;
        drop(enc);
        Ok(out.len() as u64)
    }

    fn window(&self) -> Option<usize> {
        Some(1usize << self.lgwin)
    }
}

struct Bzip2Codec {
    level: u32,
}

impl Codec for Bzip2Codec {
    fn compressed_len(&self, data: &[u8]) -> Result<u64, CompressorError> {
        let mut out = Vec::new();
        let mut enc = bzip2::read::BzEncoder::new(data, bzip2::Compression::new(self.level));
        enc.read_to_end(&mut out).map_err(|e| CompressorError::ExternalFailed {
            command: "bzip2".into(),
            reason: e.to_string(),
        })?;
        Ok(out.len() as u64)
    }

    fn window(&self) -> Option<usize> {
        Some(self.level as usize * 100_000)
    }
}

struct GzipCodec {
    level: u32,
}

impl Codec for GzipCodec {
    fn compressed_len(&self, data: &[u8]) -> Result<u64, CompressorError> {
        let mut out = Vec::new();
        let mut enc = flate2::read::GzEncoder::new(data, flate2::Compression::new(self.level));
        enc.read_to_end(&mut out).map_err(|e| CompressorError::ExternalFailed {
            command: "gzip".into(),
            reason: e.to_string(),
        })?;
        Ok(out.len() as u64)
    }

    fn window(&self) -> Option<usize> {
        Some(32 * 1024)
    }
}

struct StoreCodec;

impl Codec for StoreCodec {
    fn compressed_len(&self, data: &[u8]) -> Result<u64, CompressorError> {
        Ok(STORE_HEADER_BYTES + data.len() as u64)
    }

    fn window(&self) -> Option<usize> {
        None
    }
}

/// Pipes the input through an external command and counts stdout bytes.
/// The command must be level-stable: no compression drift between calls.
struct ExternalCodec {
    command: String,
}

impl Codec for ExternalCodec {
    fn compressed_len(&self, data: &[u8]) -> Result<u64, CompressorError> {
        let fail = |reason: String| CompressorError::ExternalFailed {
            command: self.command.clone(),
            reason,
        };
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| fail(e.to_string()))?;
        // Writer thread avoids deadlock when the tool's output outpaces its
        // input buffer.
        let mut stdin = child.stdin.take().expect("piped stdin");
        let data = data.to_vec();
        let writer = std::thread::spawn(move || stdin.write_all(&data));
        let mut out = Vec::new();
        child
            .stdout
            .take()
            .expect("piped stdout")
            .read_to_end(&mut out)
            .map_err(|e| fail(e.to_string()))?;
        writer
            .join()
            .map_err(|_| fail("writer thread panicked".into()))?
            .map_err(|e| fail(e.to_string()))?;
        let status = child.wait().map_err(|e| fail(e.to_string()))?;
        if !status.success() {
            return Err(fail(format!("exit status {status}")));
        }
        Ok(out.len() as u64)
    }

    fn window(&self) -> Option<usize> {
        None
    }
}

type SizeCache = RwLock<HashMap<[u8; 32], u64>>;

/// A ready-to-use size oracle: codec resolved from a [`CompressorId`], with an
/// optional shared content-addressed cache.
///
/// Cloning shares the cache. All methods are safe to call from many threads;
/// correctness never depends on cache hits.
#[derive(Clone)]
pub struct Compressor {
    id: CompressorId,
    codec: Arc<dyn Codec>,
    cache: Option<Arc<SizeCache>>,
    max_input: Option<usize>,
}

impl Compressor {
    /// Resolves an id against the built-in registry: `bzip2` (alias
    /// `bzip2-class`), `gzip` (alias `lz-class`), `store`, and `external`.
    pub fn from_id(id: &CompressorId) -> Result<Self, CompressorError> {
        let mut params = id.parameters.clone();
        let max_input = match params.remove("max-input") {
            Some(v) => Some(v.parse::<usize>().map_err(|_| CompressorError::BadParameter {
                name: id.name.clone(),
                reason: format!("max-input must be an integer, got `{v}`"),
            })?),
            None => None,
        };
        let parse_level = |params: &mut BTreeMap<String, String>, default: u32, hi: u32| {
            match params.remove("level") {
                Some(v) => match v.parse::<u32>() {
                    Ok(l) if (1..=hi).contains(&l) => Ok(l),
                    _ => Err(CompressorError::BadParameter {
                        name: id.name.clone(),
                        reason: format!("level must be in 1..={hi}, got `{v}`"),
                    }),
                },
                None => Ok(default),
            }
        };
        let codec: Arc<dyn Codec> = match id.name.as_str() {
            "brotli" => {
                let quality = parse_level(&mut params, 9, 11)?;
                let lgwin = match params.remove("window") {
                    Some(v) => match v.parse::<u32>() {
                        Ok(w) if (10..=24).contains(&w) => w,
                        _ => {
                            return Err(CompressorError::BadParameter {
                                name: id.name.clone(),
                                reason: format!("window must be in 10..=24 (log2 bytes), got `{v}`"),
                            })
                        }
                    },
                    None => 24,
                };
                Arc::new(BrotliCodec { quality, lgwin })
            }
            "bzip2" | "bzip2-class" => {
                let level = parse_level(&mut params, 9, 9)?;
                Arc::new(Bzip2Codec { level })
            }
            "gzip" | "lz-class" => {
                let level = parse_level(&mut params, 9, 9)?;
                Arc::new(GzipCodec { level })
            }
            "store" => Arc::new(StoreCodec),
            "external" => {
                let command = params.remove("command").ok_or_else(|| CompressorError::BadParameter {
                    name: id.name.clone(),
                    reason: "external codec requires a `command` parameter".into(),
                })?;
                Arc::new(ExternalCodec { command })
            }
            other => return Err(CompressorError::UnknownCompressor(other.to_string())),
        };
        if let Some(key) = params.keys().next() {
            return Err(CompressorError::BadParameter {
                name: id.name.clone(),
                reason: format!("unknown parameter `{key}`"),
            });
        }
        Ok(Compressor {
            id: id.clone(),
            codec,
            cache: None,
            max_input,
        })
    }

    /// Enables the in-memory size cache. Never changes any returned value;
    /// it only skips recompression of bytes already measured.
    pub fn with_cache(mut self) -> Self {
        if self.cache.is_none() {
            self.cache = Some(Arc::new(RwLock::new(HashMap::new())));
        }
        self
    }

    pub fn id(&self) -> &CompressorId {
        &self.id
    }

    /// Compressed length of `data` in bytes.
    pub fn compressed_size(&self, data: &[u8]) -> Result<CompressedSize, CompressorError> {
        if let Some(limit) = self.max_input {
            if data.len() > limit {
                return Err(CompressorError::InputTooLarge {
                    len: data.len(),
                    limit,
                });
            }
        }
        if let Some(window) = self.codec.window() {
            if data.len() > window {
                log::warn!(
                    "input of {} bytes exceeds the {} window of {} bytes; the distance \
                     approximation degrades beyond the window",
                    data.len(),
                    self.id.name,
                    window
                );
            }
        }
        if let Some(cache) = &self.cache {
            let key: [u8; 32] = Sha256::digest(data).into();
            if let Some(&bytes) = cache.read().unwrap().get(&key) {
                return Ok(CompressedSize { bytes });
            }
            let bytes = self.codec.compressed_len(data)?;
            cache.write().unwrap().insert(key, bytes);
            Ok(CompressedSize { bytes })
        } else {
            let bytes = self.codec.compressed_len(data)?;
            Ok(CompressedSize { bytes })
        }
    }

    /// Compressed length of the concatenation `a ‖ b`. Identical to
    /// `compressed_size` on the joined buffer; kept separate so the cache can
    /// key on pairs.
    pub fn concat_size(&self, a: &[u8], b: &[u8]) -> Result<CompressedSize, CompressorError> {
        let mut joined = Vec::with_capacity(a.len() + b.len());
        joined.extend_from_slice(a);
        joined.extend_from_slice(b);
        self.compressed_size(&joined)
    }
}

/// One-shot form of [`Compressor::compressed_size`].
pub fn compressed_size(data: &[u8], id: &CompressorId) -> Result<CompressedSize, CompressorError> {
    Compressor::from_id(id)?.compressed_size(data)
}

/// One-shot form of [`Compressor::concat_size`].
pub fn concat_size(a: &[u8], b: &[u8], id: &CompressorId) -> Result<CompressedSize, CompressorError> {
    Compressor::from_id(id)?.concat_size(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn pseudo_random_bytes(seed: u64, len: usize) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random()).collect()
    }

    #[test]
    fn store_empty_input_is_header_only() {
        let size = compressed_size(b"", &CompressorId::store()).unwrap();
        assert_eq!(size.bytes, STORE_HEADER_BYTES);
    }

    #[test]
    fn store_size_is_header_plus_length() {
        let size = compressed_size(b"hello", &CompressorId::store()).unwrap();
        assert_eq!(size.bytes, STORE_HEADER_BYTES + 5);
        assert!(size.bytes >= 5);
    }

    // Golden value recorded from `printf 'a%.0s' {1..10000} | bzip2 -9 | wc -c`
    // with the reference bzip2 1.0.8 binary.
    #[test]
    fn bzip2_collapses_repetitive_input() {
        let data = vec![b'a'; 10_000];
        let size = compressed_size(&data, &CompressorId::bzip2()).unwrap();
        assert_eq!(size.bytes, 47);
        assert!(size.bytes < 500);
    }

    // Golden value recorded by running the reference bzip2 1.0.8 binary on
    // these exact bytes: 82645, a slight expansion of the incompressible
    // input.
    #[test]
    fn bzip2_cannot_compress_random_bytes() {
        let data = pseudo_random_bytes(42, 81_920);
        let size = compressed_size(&data, &CompressorId::bzip2()).unwrap();
        assert_eq!(size.bytes, 82_645);
        assert!(size.bytes as f64 >= 81_920.0 * 0.98);
    }

    #[test]
    fn concat_with_empty_suffix_equals_solo_size() {
        let data = pseudo_random_bytes(7, 4096);
        for id in [CompressorId::bzip2(), CompressorId::gzip(), CompressorId::store()] {
            let c = Compressor::from_id(&id).unwrap();
            assert_eq!(
                c.concat_size(&data, b"").unwrap(),
                c.compressed_size(&data).unwrap()
            );
        }
    }

    #[test]
    fn concat_of_self_stays_near_solo_size_on_lz_codecs() {
        // LZ-family codecs see the duplicate directly, so x‖x costs barely
        // more than x.
        let data = crate::synthgen::PROSE.as_bytes();
        assert!(data.len() >= 10_240);
        for id in [CompressorId::brotli(), CompressorId::gzip()] {
            let c = Compressor::from_id(&id).unwrap();
            let solo = c.compressed_size(data).unwrap().bytes as f64;
            let doubled = c.concat_size(data, data).unwrap().bytes as f64;
            assert!(doubled <= 1.1 * solo, "{}: doubled {doubled} vs solo {solo}", id.name);
        }
    }

    // Golden values recorded from the reference bzip2 1.0.8 binary on the
    // bundled prose asset: `bzip2 -9 < prose.txt | wc -c` = 5119 and
    // `cat prose.txt prose.txt | bzip2 -9 | wc -c` = 6618. The block-sorting
    // transform pays a measured ~29% premium on a verbatim duplicate; this
    // is intrinsic to the codec, not an artifact of this implementation.
    #[test]
    fn bzip2_self_concat_overhead_matches_the_reference_binary() {
        let data = crate::synthgen::PROSE.as_bytes();
        let c = Compressor::from_id(&CompressorId::bzip2()).unwrap();
        let solo = c.compressed_size(data).unwrap().bytes;
        let doubled = c.concat_size(data, data).unwrap().bytes;
        assert_eq!(solo, 5119);
        assert_eq!(doubled, 6618);
        assert!(doubled as f64 <= 1.35 * solo as f64);
    }

    // Goldens recorded from the reference bzip2 binary on these exact
    // streams: Z(a) = 41479, Z(b) = 41483, Z(a‖b) = 82648. Independence
    // leaves nothing to share, so the concatenation costs almost the sum.
    #[test]
    fn concat_of_independent_random_blocks_is_near_sum() {
        let a = pseudo_random_bytes(1, 40_960);
        let b = pseudo_random_bytes(2, 40_960);
        let c = Compressor::from_id(&CompressorId::bzip2()).unwrap();
        let za = c.compressed_size(&a).unwrap().bytes;
        let zb = c.compressed_size(&b).unwrap().bytes;
        let zab = c.concat_size(&a, &b).unwrap().bytes;
        assert_eq!((za, zb, zab), (41_479, 41_483, 82_648));
        assert!(zab as f64 >= 0.95 * (za + zb) as f64);
    }

    #[test]
    fn repeated_calls_are_deterministic() {
        let data = pseudo_random_bytes(9, 20_000);
        for id in [CompressorId::bzip2(), CompressorId::gzip()] {
            let first = compressed_size(&data, &id).unwrap();
            for _ in 0..3 {
                assert_eq!(compressed_size(&data, &id).unwrap(), first);
            }
        }
    }

    #[test]
    fn cache_never_changes_returned_values() {
        let inputs: Vec<Vec<u8>> = (0..8).map(|i| pseudo_random_bytes(i, 3000)).collect();
        let plain = Compressor::from_id(&CompressorId::bzip2()).unwrap();
        let cached = plain.clone().with_cache();
        for x in &inputs {
            assert_eq!(
                plain.compressed_size(x).unwrap(),
                cached.compressed_size(x).unwrap()
            );
            // Second pass hits the cache.
            assert_eq!(
                plain.compressed_size(x).unwrap(),
                cached.compressed_size(x).unwrap()
            );
            for y in &inputs {
                assert_eq!(
                    plain.concat_size(x, y).unwrap(),
                    cached.concat_size(x, y).unwrap()
                );
            }
        }
    }

    #[test]
    fn store_concat_bound_is_exact() {
        // Z(x‖y) = Z(x) + Z(y) - header <= Z(x) + Z(y) + 64 on the store codec.
        let c = Compressor::from_id(&CompressorId::store()).unwrap();
        for (xl, yl) in [(0usize, 0usize), (1, 0), (100, 57), (4096, 1)] {
            let x = vec![1u8; xl];
            let y = vec![2u8; yl];
            let zx = c.compressed_size(&x).unwrap().bytes;
            let zy = c.compressed_size(&y).unwrap().bytes;
            let zxy = c.concat_size(&x, &y).unwrap().bytes;
            assert_eq!(zxy, zx + zy - STORE_HEADER_BYTES);
            assert!(zxy <= zx + zy + 64);
        }
    }

    #[test]
    fn unknown_compressor_is_rejected() {
        let err = compressed_size(b"x", &CompressorId::new("lzma-nope")).unwrap_err();
        assert!(matches!(err, CompressorError::UnknownCompressor(_)));
    }

    #[test]
    fn input_limit_is_enforced() {
        let id = CompressorId::bzip2().with_parameter("max-input", "10");
        let err = compressed_size(&[0u8; 11], &id).unwrap_err();
        assert!(matches!(err, CompressorError::InputTooLarge { len: 11, limit: 10 }));
        assert!(compressed_size(&[0u8; 10], &id).is_ok());
    }

    #[test]
    fn unknown_parameter_is_rejected() {
        let id = CompressorId::bzip2().with_parameter("levle", "9");
        assert!(matches!(
            Compressor::from_id(&id),
            Err(CompressorError::BadParameter { .. })
        ));
    }

    #[test]
    fn id_round_trips_through_display_and_parse() {
        for s in ["bzip2", "gzip:level=6", "external:command=bzip2 -9"] {
            let id: CompressorId = s.parse().unwrap();
            assert_eq!(id.to_string(), s);
            let again: CompressorId = id.to_string().parse().unwrap();
            assert_eq!(id, again);
        }
    }

    #[test]
    fn external_codec_matches_in_process_bzip2() {
        // The reference binary and the in-process codec implement the same
        // format; sizes must agree exactly.
        if !std::path::Path::new("/usr/bin/bzip2").exists() {
            eprintln!("skipping: /usr/bin/bzip2 not present");
            return;
        }
        let ext = Compressor::from_id(
            &CompressorId::new("external").with_parameter("command", "bzip2 -9 -c"),
        )
        .unwrap();
        let inp = Compressor::from_id(&CompressorId::bzip2()).unwrap();
        for seed in 0..3u64 {
            let data = pseudo_random_bytes(seed, 30_000);
            assert_eq!(
                ext.compressed_size(&data).unwrap(),
                inp.compressed_size(&data).unwrap()
            );
        }
        let repetitive = vec![b'a'; 10_000];
        assert_eq!(ext.compressed_size(&repetitive).unwrap().bytes, 47);
    }
}
