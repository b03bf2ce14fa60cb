//! Randomized hill climbing over ternary trees.
//!
//! A *simple mutation* is one of three structure-preserving transformations:
//! swapping two leaves, swapping two disjoint subtrees, or detaching a
//! subtree and reattaching it elsewhere. A *full mutation* chains `k` simple
//! mutations where `k` is drawn with probability `2^-k`, each kind picked
//! uniformly; nearby trees are examined often, distant ones eventually. The
//! climber accepts a candidate only on strict improvement of the effective
//! score and stops on a perfect score, a plateau of consecutive rejections,
//! or an evaluation cap.

use std::fmt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, RngExt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distance::DistanceMatrix;
use crate::scoring::{cost_bounds, score_full, score_incremental, PenaltyConfig, ScoreError, ScoreState, TreeScore};
use crate::tree::{TernaryTree, TreeError};
use crate::util::derive_seed;

/// Give up on a random draw after this many infeasible attempts and fall
/// back to returning the tree unchanged.
const REDRAW_LIMIT: usize = 128;
/// Cap on the geometric mutation count; 2^-32 is unreachable in practice.
const MAX_SIMPLE_MUTATIONS: usize = 32;

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("matrix has {0} items, need at least 4 to search")]
    MatrixTooSmall(usize),
    #[error("invalid search config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("writing checkpoint: {0}")]
    Checkpoint(#[from] std::io::Error),
}

/// The three simple mutations. Each preserves leaf count, internal count,
/// and every degree invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutationKind {
    LeafSwap,
    SubtreeSwap,
    SubtreeTransfer,
}

impl MutationKind {
    pub const ALL: [MutationKind; 3] = [
        MutationKind::LeafSwap,
        MutationKind::SubtreeSwap,
        MutationKind::SubtreeTransfer,
    ];
}

impl fmt::Display for MutationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            MutationKind::LeafSwap => "leaf-swap",
            MutationKind::SubtreeSwap => "subtree-swap",
            MutationKind::SubtreeTransfer => "subtree-transfer",
        };
        write!(f, "{name}")
    }
}

/// What one simple mutation did: its kind and every leaf whose position may
/// have moved (a superset of the leaves whose quartets changed).
#[derive(Debug, Clone)]
pub struct MutationRecord {
    pub kind: MutationKind,
    pub moved_leaves: Vec<usize>,
}

/// The simple-mutation chain applied by one full mutation.
#[derive(Debug, Clone)]
pub struct FullMutationRecord {
    pub steps: Vec<MutationRecord>,
}

impl FullMutationRecord {
    /// Union of moved leaves across all steps, deduplicated.
    pub fn moved_leaves(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .steps
            .iter()
            .flat_map(|s| s.moved_leaves.iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Applies one simple mutation of the given kind. Infeasible random choices
/// (overlapping subtrees, nowhere to reattach) are redrawn internally; if no
/// feasible draw exists the tree comes back unchanged with an empty moved
/// set.
pub fn simple_mutation(
    t: &TernaryTree,
    kind: MutationKind,
    rng: &mut impl Rng,
) -> (TernaryTree, MutationRecord) {
    let mut tree = t.clone();
    let moved_leaves = match kind {
        MutationKind::LeafSwap => apply_leaf_swap(&mut tree, rng),
        MutationKind::SubtreeSwap => apply_subtree_swap(&mut tree, rng),
        MutationKind::SubtreeTransfer => apply_subtree_transfer(&mut tree, rng),
    };
    debug_assert!(tree.validate().is_ok());
    (tree, MutationRecord { kind, moved_leaves })
}

fn apply_leaf_swap(tree: &mut TernaryTree, rng: &mut impl Rng) -> Vec<usize> {
    let n = tree.leaf_count();
    let a = rng.random_range(0..n);
    let b = loop {
        let b = rng.random_range(0..n);
        if b != a {
            break b;
        }
    };
    tree.swap_leaf_positions(a, b);
    vec![a, b]
}

fn apply_subtree_swap(tree: &mut TernaryTree, rng: &mut impl Rng) -> Vec<usize> {
    let n = tree.leaf_count();
    for _ in 0..REDRAW_LIMIT {
        let a = n + rng.random_range(0..tree.internal_count());
        let b = n + rng.random_range(0..tree.internal_count());
        // Adjacent internal nodes root the two complementary halves of one
        // edge; swapping them is the identity. Redraw.
        if a == b || tree.neighbors(a).contains(&b) {
            continue;
        }
        let pa = tree.neighbor_toward(a, b);
        let pb = tree.neighbor_toward(b, a);
        let mut moved = tree.subtree_leaves(a, pa);
        moved.extend(tree.subtree_leaves(b, pb));
        tree.swap_subtrees(a, pa, b, pb);
        return moved;
    }
    Vec::new()
}

fn apply_subtree_transfer(tree: &mut TernaryTree, rng: &mut impl Rng) -> Vec<usize> {
    let n = tree.leaf_count();
    for _ in 0..REDRAW_LIMIT {
        // A subtree is a directed edge parent -> root with an internal
        // parent; cutting it, smoothing the parent away, and splicing a new
        // internal node into an edge of the remainder preserves all arities.
        let parent = n + rng.random_range(0..tree.internal_count());
        let root = tree.neighbors(parent)[rng.random_range(0..3)];
        let sub = tree.subtree_nodes(root, parent);
        let mut in_subtree = vec![false; tree.node_count()];
        for &v in &sub {
            in_subtree[v] = true;
        }
        // Reattachment candidates: edges of the remaining component, minus
        // the two edges at the smoothed parent (whose fusion would recreate
        // the original position).
        let candidates: Vec<(usize, usize)> = tree
            .edges()
            .into_iter()
            .filter(|&(u, v)| {
                !in_subtree[u] && !in_subtree[v] && u != parent && v != parent
            })
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let (u, v) = candidates[rng.random_range(0..candidates.len())];
        let moved = tree.subtree_leaves(root, parent);
        tree.transfer_subtree(root, parent, u, v);
        return moved;
    }
    Vec::new()
}

/// Applies `k` simple mutations where `P(k) = 2^-k` (a fair coin is flipped
/// until heads), each kind drawn uniformly from the three.
pub fn full_mutation(t: &TernaryTree, rng: &mut impl Rng) -> (TernaryTree, FullMutationRecord) {
    let mut k = 1;
    while k < MAX_SIMPLE_MUTATIONS && !rng.random::<bool>() {
        k += 1;
    }
    let mut tree = t.clone();
    let mut steps = Vec::with_capacity(k);
    for _ in 0..k {
        let kind = MutationKind::ALL[rng.random_range(0..3)];
        let (next, record) = simple_mutation(&tree, kind, rng);
        tree = next;
        steps.push(record);
    }
    (tree, FullMutationRecord { steps })
}

/// Periodic checkpointing of the incumbent during long runs.
#[derive(Debug, Clone)]
pub struct CheckpointConfig {
    pub path: PathBuf,
    pub every_evals: u64,
}

/// Hill-climb configuration. `plateau_limit` counts consecutive rejected
/// full mutations before stopping; `None` picks a default from the matrix
/// size.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub seed: u64,
    pub plateau_limit: Option<u64>,
    pub max_evals: Option<u64>,
    pub penalty: PenaltyConfig,
    pub workers: usize,
    pub checkpoint: Option<CheckpointConfig>,
}

impl SearchConfig {
    pub fn new(seed: u64) -> Self {
        SearchConfig {
            seed,
            plateau_limit: None,
            max_evals: None,
            penalty: PenaltyConfig::default(),
            workers: 1,
            checkpoint: None,
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.plateau_limit == Some(0) {
            return Err(SearchError::InvalidConfig("plateau_limit must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(SearchError::InvalidConfig("workers must be at least 1".into()));
        }
        if let Some(cp) = &self.checkpoint {
            if cp.every_evals == 0 {
                return Err(SearchError::InvalidConfig("checkpoint interval must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// Sized default for the stopping plateau: searches on small instances give
/// up sooner.
pub fn default_plateau_limit(n: usize) -> u64 {
    if n <= 20 {
        50_000
    } else {
        200_000
    }
}

/// One point on the progress curve: candidate count, incumbent effective
/// score, elapsed wall time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub evals: u64,
    pub best_s: f64,
    pub seconds: f64,
}

/// Improvement history of a run; `best_s` is non-decreasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProgressTrace {
    pub points: Vec<TracePoint>,
}

impl ProgressTrace {
    /// CSV with header `eval_count,best_s,seconds`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eval_count,best_s,seconds\n");
        for p in &self.points {
            out.push_str(&format!("{},{:.6},{:.3}\n", p.evals, p.best_s, p.seconds));
        }
        out
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The incumbent reached raw s = 1; no tree can do better.
    Optimal,
    /// `plateau_limit` consecutive candidates were rejected.
    Plateau,
    /// The evaluation cap was reached.
    MaxEvals,
    /// Degenerate bounds: every tree scores 1, nothing to search.
    Degenerate,
}

/// Result of a search run.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub tree: TernaryTree,
    pub score: TreeScore,
    pub trace: ProgressTrace,
    pub evaluations: u64,
    pub stop: StopReason,
}

/// Single-threaded, fully deterministic hill climb: `(matrix, seed)`
/// determines the output tree and the trace's evaluation counts exactly
/// (wall times vary).
pub fn hill_climb(d: &DistanceMatrix, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    cfg.validate()?;
    let n = d.len();
    if n < 4 {
        return Err(SearchError::MatrixTooSmall(n));
    }
    let bounds = cost_bounds(d)?;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best_tree = TernaryTree::random_with(d.labels(), &mut rng)?;
    let mut best = score_full(&best_tree, d, &bounds, cfg.penalty)?;
    let mut trace = ProgressTrace::default();
    trace.points.push(TracePoint {
        evals: 0,
        best_s: best.score.s_effective,
        seconds: start.elapsed().as_secs_f64(),
    });
    let plateau_limit = cfg.plateau_limit.unwrap_or_else(|| default_plateau_limit(n));
    let mut plateau = 0u64;
    let mut evals = 0u64;

    let stop = if bounds.is_degenerate() {
        log::warn!("degenerate distance matrix: every tree scores 1, halting immediately");
        StopReason::Degenerate
    } else if best.score.s == 1.0 {
        StopReason::Optimal
    } else {
        loop {
            if cfg.max_evals.is_some_and(|cap| evals >= cap) {
                break StopReason::MaxEvals;
            }
            let (candidate_tree, record) = full_mutation(&best_tree, &mut rng);
            evals += 1;
            let candidate =
                score_incremental(&candidate_tree, d, &bounds, cfg.penalty, &best, &record.moved_leaves())?;
            log::trace!(
                "tree {evals}: raw_cost {:.6} s {:.6} penalty {:.6} s_effective {:.6}",
                candidate.score.raw_cost,
                candidate.score.s,
                candidate.score.penalty,
                candidate.score.s_effective
            );
            if candidate.score.s_effective > best.score.s_effective {
                best = candidate;
                best_tree = candidate_tree;
                plateau = 0;
                trace.points.push(TracePoint {
                    evals,
                    best_s: best.score.s_effective,
                    seconds: start.elapsed().as_secs_f64(),
                });
                if best.score.s == 1.0 {
                    break StopReason::Optimal;
                }
            } else {
                plateau += 1;
                if plateau >= plateau_limit {
                    break StopReason::Plateau;
                }
            }
            if let Some(cp) = &cfg.checkpoint {
                if evals.is_multiple_of(cp.every_evals) {
                    write_checkpoint(cp, evals, &best.score, &best_tree)?;
                }
            }
        }
    };
    Ok(SearchOutcome {
        tree: best_tree,
        score: best.score,
        trace,
        evaluations: evals,
        stop,
    })
}

fn write_checkpoint(
    cp: &CheckpointConfig,
    evals: u64,
    score: &TreeScore,
    tree: &TernaryTree,
) -> Result<(), std::io::Error> {
    let body = format!(
        "evals {evals}\ns {:.6}\ns_effective {:.6}\n{}\n",
        score.s,
        score.s_effective,
        tree.to_newick()
    );
    std::fs::write(&cp.path, body)
}

struct SharedBest {
    incumbent: Mutex<Option<(ScoreState, TernaryTree)>>,
    trace: Mutex<Vec<TracePoint>>,
    evals: AtomicU64,
    stop: AtomicBool,
}

/// Runs `workers` independent climbers from distinct derived seeds around a
/// shared monotone best record. Climbers adopt the shared incumbent whenever
/// it beats their local best. With one worker this is exactly [`hill_climb`].
/// Multi-worker results are not reproducible across runs; the shared record
/// only ever improves.
pub fn parallel_search(d: &DistanceMatrix, cfg: &SearchConfig) -> Result<SearchOutcome, SearchError> {
    cfg.validate()?;
    if cfg.workers == 1 {
        return hill_climb(d, cfg);
    }
    let n = d.len();
    if n < 4 {
        return Err(SearchError::MatrixTooSmall(n));
    }
    let bounds = cost_bounds(d)?;
    if bounds.is_degenerate() {
        // Same degenerate path as the single climber.
        let mut single = cfg.clone();
        single.workers = 1;
        return hill_climb(d, &single);
    }
    let start = Instant::now();
    let plateau_limit = cfg.plateau_limit.unwrap_or_else(|| default_plateau_limit(n));
    let shared = SharedBest {
        incumbent: Mutex::new(None),
        trace: Mutex::new(Vec::new()),
        evals: AtomicU64::new(0),
        stop: AtomicBool::new(false),
    };
    let worker_error: Mutex<Option<SearchError>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for w in 0..cfg.workers {
            let shared = &shared;
            let bounds = &bounds;
            let worker_error = &worker_error;
            scope.spawn(move || {
                let run = || -> Result<(), SearchError> {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, w as u64));
                    let mut best_tree = TernaryTree::random_with(d.labels(), &mut rng)?;
                    let mut best = score_full(&best_tree, d, bounds, cfg.penalty)?;
                    publish_if_better(shared, &best, &best_tree, start);
                    let mut plateau = 0u64;
                    loop {
                        if shared.stop.load(Ordering::Relaxed) {
                            return Ok(());
                        }
                        if cfg
                            .max_evals
                            .is_some_and(|cap| shared.evals.load(Ordering::Relaxed) >= cap)
                        {
                            return Ok(());
                        }
                        // Adopt the shared incumbent as the new climbing basis
                        // when it is strictly ahead.
                        {
                            let guard = shared.incumbent.lock().unwrap();
                            if let Some((state, tree)) = guard.as_ref() {
                                if state.score.s_effective > best.score.s_effective {
                                    best = state.clone();
                                    best_tree = tree.clone();
                                    plateau = 0;
                                }
                            }
                        }
                        let (candidate_tree, record) = full_mutation(&best_tree, &mut rng);
                        let evals = shared.evals.fetch_add(1, Ordering::Relaxed) + 1;
                        let candidate = score_incremental(
                            &candidate_tree,
                            d,
                            bounds,
                            cfg.penalty,
                            &best,
                            &record.moved_leaves(),
                        )?;
                        if candidate.score.s_effective > best.score.s_effective {
                            best = candidate;
                            best_tree = candidate_tree;
                            plateau = 0;
                            publish_if_better(shared, &best, &best_tree, start);
                            if best.score.s == 1.0 {
                                shared.stop.store(true, Ordering::Relaxed);
                                return Ok(());
                            }
                        } else {
                            plateau += 1;
                            if plateau >= plateau_limit {
                                return Ok(());
                            }
                        }
                        if let Some(cp) = &cfg.checkpoint {
                            if evals.is_multiple_of(cp.every_evals) {
                                let guard = shared.incumbent.lock().unwrap();
                                if let Some((state, tree)) = guard.as_ref() {
                                    write_checkpoint(cp, evals, &state.score, tree)?;
                                }
                            }
                        }
                    }
                };
                if let Err(e) = run() {
                    let mut slot = worker_error.lock().unwrap();
                    if slot.is_none() {
                        *slot = Some(e);
                    }
                    shared.stop.store(true, Ordering::Relaxed);
                }
            });
        }
    });

    if let Some(e) = worker_error.into_inner().unwrap() {
        return Err(e);
    }
    let (state, tree) = shared
        .incumbent
        .into_inner()
        .unwrap()
        .expect("at least one worker published a tree");
    let points = shared.trace.into_inner().unwrap();
    let evaluations = shared.evals.into_inner();
    let stop = if state.score.s == 1.0 {
        StopReason::Optimal
    } else if cfg.max_evals.is_some_and(|cap| evaluations >= cap) {
        StopReason::MaxEvals
    } else {
        StopReason::Plateau
    };
    Ok(SearchOutcome {
        tree,
        score: state.score,
        trace: ProgressTrace { points },
        evaluations,
        stop,
    })
}

fn publish_if_better(shared: &SharedBest, state: &ScoreState, tree: &TernaryTree, start: Instant) {
    let mut guard = shared.incumbent.lock().unwrap();
    let better = match guard.as_ref() {
        Some((current, _)) => state.score.s_effective > current.score.s_effective,
        None => true,
    };
    if better {
        *guard = Some((state.clone(), tree.clone()));
        // Trace updates ride the same critical section, so best_s never
        // regresses within the recorded sequence.
        shared.trace.lock().unwrap().push(TracePoint {
            evals: shared.evals.load(Ordering::Relaxed),
            best_s: state.score.s_effective,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
}
