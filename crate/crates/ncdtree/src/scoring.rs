//! Quartet costs, normalization bounds, the normalized tree benefit score,
//! the orphan-leaf penalty, and the minimum-spanning-tree baseline.
//!
//! The cost of a pairing `uv | wx` is `d(u,v) + d(w,x)`. Summing, over all
//! C(n,4) leaf 4-sets, the cheapest of the three pairings gives `best_total`
//! and the dearest gives `worst_total`; neither bound need be attained by an
//! actual tree, but every tree's raw cost lies between them. The benefit
//! score rescales linearly so the worst bound maps to 0 and the best to 1:
//!
//! ```text
//! s = (worst_total − raw_cost) / (worst_total − best_total)
//! ```
//!
//! An optional penalty subtracts a fixed amount per internal node carrying
//! exactly one leaf, discouraging degenerate mostly-linear trees.

use crate::distance::DistanceMatrix;
use crate::tree::{Pairing, QuartetTopology, TernaryTree};

/// Default deduction per orphan internal node (one with exactly one adjacent
/// leaf).
pub const DEFAULT_PENALTY_WEIGHT: f64 = 0.005;

#[derive(Debug, thiserror::Error)]
pub enum ScoreError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("tree leaf labels do not match matrix labels")]
    LabelSetMismatch,
    #[error("matrix has {0} items, need at least 4 for quartet scoring")]
    MatrixTooSmall(usize),
    #[error("cost table was built for {expected} items, matrix has {got}")]
    BoundsMismatch { expected: usize, got: usize },
}

/// Orphan-leaf penalty configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    pub enabled: bool,
    pub weight: f64,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig {
            enabled: true,
            weight: DEFAULT_PENALTY_WEIGHT,
        }
    }
}

impl PenaltyConfig {
    pub fn disabled() -> Self {
        PenaltyConfig {
            enabled: false,
            weight: DEFAULT_PENALTY_WEIGHT,
        }
    }
}

/// Per-4-set pairing costs plus the global normalization bounds.
#[derive(Debug, Clone)]
pub struct QuartetCostTable {
    n: usize,
    /// Indexed by 4-set rank (ascending `i<j<k<l` iteration), one cost per
    /// pairing in [`Pairing::ALL`] order.
    costs: Vec<[f64; 3]>,
    mins: Vec<f64>,
    maxs: Vec<f64>,
    best_total: f64,
    worst_total: f64,
}

impl QuartetCostTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group_count(&self) -> usize {
        self.mins.len()
    }

    /// Sum of per-4-set minima.
    pub fn best_total(&self) -> f64 {
        self.best_total
    }

    /// Sum of per-4-set maxima.
    pub fn worst_total(&self) -> f64 {
        self.worst_total
    }

    /// The three pairing costs of the 4-set at `rank`.
    pub fn costs_at(&self, rank: usize) -> [f64; 3] {
        self.costs[rank]
    }

    pub fn min_at(&self, rank: usize) -> f64 {
        self.mins[rank]
    }

    pub fn max_at(&self, rank: usize) -> f64 {
        self.maxs[rank]
    }

    /// True when every tree scores 1 because the bounds coincide.
    pub fn is_degenerate(&self) -> bool {
        self.best_total == self.worst_total
    }
}

/// A scored tree: raw consistent-quartet cost, normalized benefit, penalty,
/// and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeScore {
    pub raw_cost: f64,
    /// Normalized benefit in [0, 1]; 1 exactly when raw_cost hits best_total.
    pub s: f64,
    pub penalty: f64,
    /// `s − penalty`; what the search maximizes.
    pub s_effective: f64,
}

/// [`TreeScore`] plus the per-4-set bookkeeping that makes exact incremental
/// rescoring possible.
#[derive(Debug, Clone)]
pub struct ScoreState {
    pub score: TreeScore,
    /// Consistent-pairing cost per 4-set rank.
    consistent_cost: Vec<f64>,
    /// matrix index -> tree leaf id
    tree_leaf_for_matrix: Vec<usize>,
    /// tree leaf id -> matrix index
    matrix_for_tree_leaf: Vec<usize>,
}

impl ScoreState {
    /// Cost of the pairing the tree is consistent with, for the 4-set at
    /// `rank` in ascending `i<j<k<l` order.
    pub fn consistent_cost_at(&self, rank: usize) -> f64 {
        self.consistent_cost[rank]
    }
}

/// Cost of one concrete quartet pairing: the sum of the two within-pair
/// distances.
pub fn quartet_cost(d: &DistanceMatrix, topology: &QuartetTopology) -> Result<f64, ScoreError> {
    let mut idx = [0usize; 4];
    for (slot, label) in topology.leaves.iter().enumerate() {
        idx[slot] = d
            .index_of(label)
            .ok_or_else(|| ScoreError::UnknownLabel(label.clone()))?;
    }
    let [[a0, a1], [b0, b1]] = topology.pairing.index_pairs();
    Ok(d.get(idx[a0], idx[a1]) + d.get(idx[b0], idx[b1]))
}

/// Computes all three pairing costs for every 4-set, their per-set extremes,
/// and the global best/worst totals.
pub fn cost_bounds(d: &DistanceMatrix) -> Result<QuartetCostTable, ScoreError> {
    let n = d.len();
    if n < 4 {
        return Err(ScoreError::MatrixTooSmall(n));
    }
    let groups = n * (n - 1) * (n - 2) * (n - 3) / 24;
    let mut costs = Vec::with_capacity(groups);
    let mut mins = Vec::with_capacity(groups);
    let mut maxs = Vec::with_capacity(groups);
    for_each_four_set(n, |_, [i, j, k, l]| {
        let three = [
            d.get(i, j) + d.get(k, l),
            d.get(i, k) + d.get(j, l),
            d.get(i, l) + d.get(j, k),
        ];
        costs.push(three);
        mins.push(three[0].min(three[1]).min(three[2]));
        maxs.push(three[0].max(three[1]).max(three[2]));
    });
    let best_total = compensated_sum(&mins);
    let worst_total = compensated_sum(&maxs);
    if best_total == worst_total {
        log::warn!(
            "degenerate cost bounds (best = worst = {best_total}); every tree scores 1"
        );
    }
    Ok(QuartetCostTable {
        n,
        costs,
        mins,
        maxs,
        best_total,
        worst_total,
    })
}

/// Scores a tree against the matrix. The raw cost sums, over every 4-set,
/// the cost of the pairing the tree is consistent with.
pub fn score(
    t: &TernaryTree,
    d: &DistanceMatrix,
    bounds: &QuartetCostTable,
    penalty: PenaltyConfig,
) -> Result<TreeScore, ScoreError> {
    Ok(score_full(t, d, bounds, penalty)?.score)
}

/// As [`score`], keeping the per-4-set costs for later incremental updates.
pub fn score_full(
    t: &TernaryTree,
    d: &DistanceMatrix,
    bounds: &QuartetCostTable,
    penalty: PenaltyConfig,
) -> Result<ScoreState, ScoreError> {
    let n = d.len();
    check_compatible(t, d, bounds)?;
    let tree_leaf_for_matrix: Vec<usize> = d
        .labels()
        .iter()
        .map(|label| t.leaf_id(label).map_err(|_| ScoreError::LabelSetMismatch))
        .collect::<Result<_, _>>()?;
    let mut matrix_for_tree_leaf = vec![0usize; n];
    for (mi, &leaf) in tree_leaf_for_matrix.iter().enumerate() {
        matrix_for_tree_leaf[leaf] = mi;
    }
    let lengths = t.leaf_path_lengths();
    let mut consistent_cost = vec![0.0; bounds.group_count()];
    for_each_four_set(n, |rank, [i, j, k, l]| {
        let (ti, tj, tk, tl) = (
            tree_leaf_for_matrix[i],
            tree_leaf_for_matrix[j],
            tree_leaf_for_matrix[k],
            tree_leaf_for_matrix[l],
        );
        let pairing = Pairing::from_path_sums([
            lengths[ti][tj] + lengths[tk][tl],
            lengths[ti][tk] + lengths[tj][tl],
            lengths[ti][tl] + lengths[tj][tk],
        ]);
        consistent_cost[rank] = bounds.costs[rank][pairing_rank(pairing)];
    });
    let score = finish_score(t, bounds, &consistent_cost, penalty);
    Ok(ScoreState {
        score,
        consistent_cost,
        tree_leaf_for_matrix,
        matrix_for_tree_leaf,
    })
}

/// Rescores a mutated tree from the pre-mutation state. `moved_tree_leaves`
/// must cover every leaf whose subtree was relocated by the mutation; 4-sets
/// not touching any moved leaf keep their pairing, so only the rest are
/// re-derived. The result is bit-identical to a full [`score_full`] on the
/// mutated tree: both fill the same per-4-set array and reduce it in the
/// same order.
pub fn score_incremental(
    t: &TernaryTree,
    d: &DistanceMatrix,
    bounds: &QuartetCostTable,
    penalty: PenaltyConfig,
    prior: &ScoreState,
    moved_tree_leaves: &[usize],
) -> Result<ScoreState, ScoreError> {
    let n = d.len();
    check_compatible(t, d, bounds)?;
    if prior.tree_leaf_for_matrix.len() != n {
        return Err(ScoreError::LabelSetMismatch);
    }
    if moved_tree_leaves.is_empty() {
        // Identity mutation; only the penalty could differ, and it cannot:
        // the tree is structurally unchanged.
        let mut state = prior.clone();
        state.score = finish_score(t, bounds, &state.consistent_cost, penalty);
        return Ok(state);
    }
    let mut moved = vec![false; n];
    for &leaf in moved_tree_leaves {
        moved[prior.matrix_for_tree_leaf[leaf]] = true;
    }
    let lengths = t.leaf_path_lengths();
    let mut consistent_cost = prior.consistent_cost.clone();
    for_each_four_set(n, |rank, [i, j, k, l]| {
        if !(moved[i] || moved[j] || moved[k] || moved[l]) {
            return;
        }
        let (ti, tj, tk, tl) = (
            prior.tree_leaf_for_matrix[i],
            prior.tree_leaf_for_matrix[j],
            prior.tree_leaf_for_matrix[k],
            prior.tree_leaf_for_matrix[l],
        );
        let pairing = Pairing::from_path_sums([
            lengths[ti][tj] + lengths[tk][tl],
            lengths[ti][tk] + lengths[tj][tl],
            lengths[ti][tl] + lengths[tj][tk],
        ]);
        consistent_cost[rank] = bounds.costs[rank][pairing_rank(pairing)];
    });
    let score = finish_score(t, bounds, &consistent_cost, penalty);
    Ok(ScoreState {
        score,
        consistent_cost,
        tree_leaf_for_matrix: prior.tree_leaf_for_matrix.clone(),
        matrix_for_tree_leaf: prior.matrix_for_tree_leaf.clone(),
    })
}

fn check_compatible(
    t: &TernaryTree,
    d: &DistanceMatrix,
    bounds: &QuartetCostTable,
) -> Result<(), ScoreError> {
    if bounds.n != d.len() {
        return Err(ScoreError::BoundsMismatch {
            expected: bounds.n,
            got: d.len(),
        });
    }
    if t.leaf_count() != d.len() {
        return Err(ScoreError::LabelSetMismatch);
    }
    Ok(())
}

fn finish_score(
    t: &TernaryTree,
    bounds: &QuartetCostTable,
    consistent_cost: &[f64],
    penalty: PenaltyConfig,
) -> TreeScore {
    let raw_cost = compensated_sum(consistent_cost);
    let s = if bounds.is_degenerate() {
        1.0
    } else {
        ((bounds.worst_total - raw_cost) / (bounds.worst_total - bounds.best_total))
            .clamp(0.0, 1.0)
    };
    let penalty_value = if penalty.enabled {
        penalty.weight * orphan_internal_count(t) as f64
    } else {
        0.0
    };
    TreeScore {
        raw_cost,
        s,
        penalty: penalty_value,
        s_effective: s - penalty_value,
    }
}

/// Internal nodes with exactly one adjacent leaf.
pub fn orphan_internal_count(t: &TernaryTree) -> usize {
    (t.leaf_count()..t.node_count())
        .filter(|&v| {
            t.neighbors(v)
                .iter()
                .filter(|&&w| t.is_leaf(w))
                .count()
                == 1
        })
        .count()
}

fn pairing_rank(p: Pairing) -> usize {
    match p {
        Pairing::UvWx => 0,
        Pairing::UwVx => 1,
        Pairing::UxVw => 2,
    }
}

/// Visits every 4-subset of `0..n` in ascending lexicographic order,
/// passing its rank in that order. This order is the canonical layout of
/// every per-4-set array in this module.
pub(crate) fn for_each_four_set(n: usize, mut f: impl FnMut(usize, [usize; 4])) {
    let mut rank = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    f(rank, [i, j, k, l]);
                    rank += 1;
                }
            }
        }
    }
}

/// Kahan-compensated sum; both the full and the incremental scorer reduce
/// their arrays through this one function, in index order, so equal arrays
/// give bit-equal totals.
fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// A minimum spanning tree over the complete distance graph. Not ternary and
/// not quartet-scored; reported by total edge weight only, as a qualitative
/// baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct MstTree {
    pub labels: Vec<String>,
    /// Edges as label-index pairs, `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub total_weight: f64,
}

impl MstTree {
    pub fn to_dot(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("graph mst {\n  node [shape=box];\n");
        for (u, v) in &self.edges {
            let _ = writeln!(
                out,
                "  \"{}\" -- \"{}\";",
                self.labels[*u].replace('"', "\\\""),
                self.labels[*v].replace('"', "\\\"")
            );
        }
        out.push_str("}\n");
        out
    }
}

/// Prim's algorithm, deterministic: among equally cheap frontier edges the
/// lowest-index vertex wins.
pub fn mst_baseline(d: &DistanceMatrix) -> MstTree {
    let n = d.len();
    let mut in_tree = vec![false; n];
    let mut best_cost = vec![f64::INFINITY; n];
    let mut best_from = vec![0usize; n];
    in_tree[0] = true;
    for v in 1..n {
        best_cost[v] = d.get(0, v);
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut total_weight = 0.0;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best_cost[a].total_cmp(&best_cost[b]))
            .expect("vertices remain");
        in_tree[next] = true;
        total_weight += best_cost[next];
        let from = best_from[next];
        edges.push((from.min(next), from.max(next)));
        for v in 0..n {
            if !in_tree[v] && d.get(next, v) < best_cost[v] {
                best_cost[v] = d.get(next, v);
                best_from[v] = next;
            }
        }
    }
    edges.sort_unstable();
    MstTree {
        labels: d.labels().to_vec(),
        edges,
        total_weight,
    }
}
