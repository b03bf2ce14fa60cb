//! Normalized compression distance and the pairwise distance matrix.
//!
//! The distance between two byte strings is the compressed size of the part
//! of one that the other does not explain, normalized by the larger solo
//! size:
//!
//! ```text
//! ncd(x, y) = max{ Z(y‖x) − Z(y), Z(x‖y) − Z(x) } / max{ Z(x), Z(y) }
//! ```
//!
//! where `Z` is [`Compressor::compressed_size`]. Taking the max over both
//! concatenation orders makes the value exactly symmetric even though real
//! compressors are order-sensitive. Negative numerator candidates (codec
//! overhead) clamp to zero.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::compressor::{Compressor, CompressorError};

/// Entries above this are logged as compressor anomalies; above
/// [`MAX_DISTANCE`] they are hard errors.
pub const ANOMALY_DISTANCE: f64 = 1.1;
/// Hard upper bound on any matrix entry; slack above 1 allows for compressor
/// imperfection.
pub const MAX_DISTANCE: f64 = 1.5;

#[derive(Debug, thiserror::Error)]
pub enum DistanceError {
    #[error(transparent)]
    Compressor(#[from] CompressorError),
    #[error("duplicate corpus label `{0}`")]
    DuplicateLabel(String),
    #[error("corpus item `{0}` has empty data")]
    EmptyData(String),
    #[error("corpus has {0} items, need at least 2")]
    CorpusTooSmall(usize),
    #[error("both compressed sizes are zero for pair ({0}, {1})")]
    DegenerateDenominator(String, String),
    #[error("distance {value} for pair ({a}, {b}) exceeds the {MAX_DISTANCE} bound")]
    OutOfRange { a: String, b: String, value: f64 },
    #[error("compressing pair ({a}, {b}): {source}")]
    PairFailed {
        a: String,
        b: String,
        source: CompressorError,
    },
    #[error("malformed matrix file: {0}")]
    MalformedMatrix(String),
}

/// A named byte string to be clustered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusItem {
    pub label: String,
    pub data: Vec<u8>,
}

impl CorpusItem {
    pub fn new(label: impl Into<String>, data: impl Into<Vec<u8>>) -> Self {
        CorpusItem {
            label: label.into(),
            data: data.into(),
        }
    }
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    d: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    /// Builds from explicit entries, enforcing every invariant.
    pub fn from_rows(labels: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self, DistanceError> {
        let m = DistanceMatrix { labels, d };
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Checks zero diagonal, exact symmetry, the [0, MAX_DISTANCE] range, and
    /// unique labels. Entries above [`ANOMALY_DISTANCE`] are logged, not
    /// rejected.
    pub fn validate(&self) -> Result<(), DistanceError> {
        let n = self.labels.len();
        if n < 2 {
            return Err(DistanceError::CorpusTooSmall(n));
        }
        let mut seen = HashSet::new();
        for l in &self.labels {
            if !seen.insert(l.as_str()) {
                return Err(DistanceError::DuplicateLabel(l.clone()));
            }
        }
        for i in 0..n {
            if self.d[i].len() != n {
                return Err(DistanceError::MalformedMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    self.d[i].len()
                )));
            }
            if self.d[i][i] != 0.0 {
                return Err(DistanceError::MalformedMatrix(format!(
                    "diagonal entry [{i}][{i}] is {}, expected 0",
                    self.d[i][i]
                )));
            }
            for j in 0..n {
                let v = self.d[i][j];
                if v != self.d[j][i] {
                    return Err(DistanceError::MalformedMatrix(format!(
                        "asymmetry at [{i}][{j}]: {v} vs {}",
                        self.d[j][i]
                    )));
                }
                if !(0.0..=MAX_DISTANCE).contains(&v) || !v.is_finite() {
                    return Err(DistanceError::OutOfRange {
                        a: self.labels[i].clone(),
                        b: self.labels[j].clone(),
                        value: v,
                    });
                }
                if i < j && v > ANOMALY_DISTANCE {
                    log::warn!(
                        "distance {} between `{}` and `{}` exceeds {}; compressor anomaly",
                        v,
                        self.labels[i],
                        self.labels[j],
                        ANOMALY_DISTANCE
                    );
                }
            }
        }
        Ok(())
    }

    /// Serializes to the interchange text format: `n`, then the `n` labels
    /// one per line, then the strict lower triangle row by row with six
    /// fractional digits. Bit-exact: equal matrices serialize identically.
    pub fn to_text(&self) -> String {
        let n = self.len();
        let mut out = String::new();
        let _ = writeln!(out, "{n}");
        for l in &self.labels {
            let _ = writeln!(out, "{l}");
        }
        for i in 1..n {
            let row: Vec<String> = (0..i).map(|j| format!("{:.6}", self.d[i][j])).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Parses the text format produced by [`DistanceMatrix::to_text`].
    pub fn from_text(text: &str) -> Result<Self, DistanceError> {
        let bad = |msg: String| DistanceError::MalformedMatrix(msg);
        let mut lines = text.lines();
        let n: usize = lines
            .next()
            .ok_or_else(|| bad("empty file".into()))?
            .trim()
            .parse()
            .map_err(|e| bad(format!("bad item count: {e}")))?;
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let l = lines
                .next()
                .ok_or_else(|| bad(format!("missing label {i}")))?;
            if l.is_empty() {
                return Err(bad(format!("label {i} is empty")));
            }
            labels.push(l.to_string());
        }
        let mut d = vec![vec![0.0; n]; n];
        for i in 1..n {
            let line = lines
                .next()
                .ok_or_else(|| bad(format!("missing matrix row {i}")))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != i {
                return Err(bad(format!(
                    "row {i} has {} entries, expected {i}",
                    entries.len()
                )));
            }
            for (j, e) in entries.iter().enumerate() {
                let v: f64 = e
                    .parse()
                    .map_err(|err| bad(format!("bad entry at row {i}: {err}")))?;
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(bad("trailing content after matrix rows".into()));
        }
        DistanceMatrix::from_rows(labels, d)
    }
}

/// Normalized compression distance between two items. Symmetric by
/// construction; clamped below at zero.
pub fn ncd(x: &CorpusItem, y: &CorpusItem, compressor: &Compressor) -> Result<f64, DistanceError> {
    if x.data.is_empty() {
        return Err(DistanceError::EmptyData(x.label.clone()));
    }
    if y.data.is_empty() {
        return Err(DistanceError::EmptyData(y.label.clone()));
    }
    let wrap = |source: CompressorError| DistanceError::PairFailed {
        a: x.label.clone(),
        b: y.label.clone(),
        source,
    };
    let zx = compressor.compressed_size(&x.data).map_err(wrap)?.bytes as f64;
    let zy = compressor.compressed_size(&y.data).map_err(wrap)?.bytes as f64;
    let zxy = compressor.concat_size(&x.data, &y.data).map_err(wrap)?.bytes as f64;
    let zyx = compressor.concat_size(&y.data, &x.data).map_err(wrap)?.bytes as f64;
    let denom = zx.max(zy);
    if denom == 0.0 {
        // Unreachable for non-empty data; defended anyway.
        return Err(DistanceError::DegenerateDenominator(
            x.label.clone(),
            y.label.clone(),
        ));
    }
    let numer = (zyx - zy).max(zxy - zx).max(0.0);
    Ok(numer / denom)
}

/// Computes the full pairwise matrix. Pairs are evaluated in parallel; the
/// result is identical to sequential evaluation because `ncd` is pure and the
/// codec deterministic. The diagonal is exactly zero and each pair is
/// computed once and mirrored.
pub fn build_matrix(
    corpus: &[CorpusItem],
    compressor: &Compressor,
) -> Result<DistanceMatrix, DistanceError> {
    let n = corpus.len();
    if n < 2 {
        return Err(DistanceError::CorpusTooSmall(n));
    }
    let mut seen = HashSet::new();
    for item in corpus {
        if !seen.insert(item.label.as_str()) {
            return Err(DistanceError::DuplicateLabel(item.label.clone()));
        }
        if item.data.is_empty() {
            return Err(DistanceError::EmptyData(item.label.clone()));
        }
    }
    // Warm the solo-size cache up front; each is reused n-1 times.
    let shared = compressor.clone().with_cache();
    corpus
        .par_iter()
        .try_for_each(|item| shared.compressed_size(&item.data).map(|_| ()))?;

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let computed: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| ncd(&corpus[i], &corpus[j], &shared).map(|v| (i, j, v)))
        .collect::<Result<_, _>>()?;

    let mut d = vec![vec![0.0; n]; n];
    for (i, j, v) in computed {
        if v > MAX_DISTANCE {
            return Err(DistanceError::OutOfRange {
                a: corpus[i].label.clone(),
                b: corpus[j].label.clone(),
                value: v,
            });
        }
        d[i][j] = v;
        d[j][i] = v;
    }
    let labels = corpus.iter().map(|c| c.label.clone()).collect();
    let m = DistanceMatrix { labels, d };
    m.validate()?;
    Ok(m)
}
