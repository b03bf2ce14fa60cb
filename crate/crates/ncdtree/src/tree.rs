//! Unrooted ternary trees, quartet topologies, and consistency queries.
//!
//! A tree over `n` labeled leaves has exactly `n − 2` internal nodes of
//! degree 3 and `2n − 2` nodes in total. Every 4-subset of leaves admits
//! exactly three pairings, and exactly one of them is consistent with any
//! given tree: the one whose two within-pair paths are vertex-disjoint.
//! Consistency is decided here through the four-point rule — the consistent
//! pairing is the unique one minimizing the sum of within-pair path lengths —
//! which is equivalent and cheap once path lengths are known.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use rand::{Rng, RngExt};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum TreeError {
    #[error("need at least 4 labels to build a searchable tree, got {0}")]
    TooFewLabels(usize),
    #[error("duplicate leaf label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown leaf label `{0}`")]
    UnknownLabel(String),
    #[error("trees carry different leaf-label sets")]
    LabelSetMismatch,
    #[error("invalid tree: {0}")]
    Invalid(String),
}

/// One of the three pairings of an ordered 4-set `{u, v, w, x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pairing {
    /// `uv | wx`
    UvWx,
    /// `uw | vx`
    UwVx,
    /// `ux | vw`
    UxVw,
}

impl Pairing {
    pub const ALL: [Pairing; 3] = [Pairing::UvWx, Pairing::UwVx, Pairing::UxVw];

    /// Index pairs into the ordered 4-set, first pair then second.
    pub fn index_pairs(self) -> [[usize; 2]; 2] {
        match self {
            Pairing::UvWx => [[0, 1], [2, 3]],
            Pairing::UwVx => [[0, 2], [1, 3]],
            Pairing::UxVw => [[0, 3], [1, 2]],
        }
    }

    /// Picks the pairing minimizing the within-pair path-length sum. The two
    /// rejected pairings always tie strictly above the winner, so the minimum
    /// is unique.
    pub(crate) fn from_path_sums(sums: [u32; 3]) -> Pairing {
        let mut best = 0;
        for i in 1..3 {
            if sums[i] < sums[best] {
                best = i;
            }
        }
        debug_assert_eq!(
            Pairing::ALL.iter().enumerate().filter(|(i, _)| sums[*i] == sums[best]).count(),
            1,
            "four-point minimum must be unique on a tree metric"
        );
        Pairing::ALL[best]
    }
}

/// A pairing bound to the concrete ordered 4-set of leaf labels it divides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuartetTopology {
    pub leaves: [String; 4],
    pub pairing: Pairing,
}

/// Unrooted tree with `n` labeled leaves and `n − 2` degree-3 internal nodes.
///
/// Node ids: leaves are `0..n` (leaf `i` carries `labels()[i]`), internal
/// nodes are `n..2n−2`. Internal nodes additionally carry a display name
/// (`n0`, `n1`, ...) that is stable across mutations and never recycled
/// within a run; it has no semantic weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TernaryTree {
    labels: Vec<String>,
    adj: Vec<Vec<usize>>,
    internal_names: Vec<u64>,
    next_name: u64,
}

impl TernaryTree {
    /// Grows a random tree: one internal node joined to three leaves, then
    /// each remaining leaf attaches to a new internal node subdividing a
    /// uniformly random existing edge. Every topology has positive
    /// probability; deterministic per seed.
    pub fn random(labels: &[String], seed: u64) -> Result<Self, TreeError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(labels, &mut rng)
    }

    /// As [`TernaryTree::random`] but drawing from a caller-owned generator.
    pub fn random_with(labels: &[String], rng: &mut impl Rng) -> Result<Self, TreeError> {
        let n = labels.len();
        if n < 4 {
            return Err(TreeError::TooFewLabels(n));
        }
        check_unique(labels)?;
        let mut tree = TernaryTree {
            labels: labels.to_vec(),
            adj: vec![Vec::new(); 2 * n - 2],
            internal_names: (0..n as u64 - 2).collect(),
            next_name: n as u64 - 2,
        };
        let first_internal = n;
        for leaf in 0..3 {
            tree.attach(leaf, first_internal);
        }
        let mut edges: Vec<(usize, usize)> = vec![(0, n), (1, n), (2, n)];
        for leaf in 3..n {
            let new_internal = n + leaf - 2;
            let (u, v) = edges[rng.random_range(0..edges.len())];
            tree.detach(u, v);
            tree.attach(u, new_internal);
            tree.attach(new_internal, v);
            tree.attach(leaf, new_internal);
            edges.retain(|&e| e != (u, v));
            edges.push((u, new_internal));
            edges.push((new_internal, v));
            edges.push((leaf, new_internal));
        }
        debug_assert!(tree.validate().is_ok());
        Ok(tree)
    }

    /// Path-shaped tree: the first two labels share the first internal node,
    /// the last two share the last, and each middle label hangs alone off the
    /// internal chain.
    pub fn caterpillar(labels: &[String]) -> Result<Self, TreeError> {
        let n = labels.len();
        if n < 4 {
            return Err(TreeError::TooFewLabels(n));
        }
        check_unique(labels)?;
        let mut tree = TernaryTree {
            labels: labels.to_vec(),
            adj: vec![Vec::new(); 2 * n - 2],
            internal_names: (0..n as u64 - 2).collect(),
            next_name: n as u64 - 2,
        };
        for k in 0..n - 3 {
            tree.attach(n + k, n + k + 1);
        }
        tree.attach(0, n);
        tree.attach(1, n);
        for k in 1..n - 3 {
            tree.attach(k + 1, n + k);
        }
        tree.attach(n - 2, 2 * n - 3);
        tree.attach(n - 1, 2 * n - 3);
        debug_assert!(tree.validate().is_ok());
        Ok(tree)
    }

    pub fn leaf_count(&self) -> usize {
        self.labels.len()
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn internal_count(&self) -> usize {
        self.adj.len() - self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        node < self.labels.len()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    /// Display name of an internal node (`n0`, `n1`, ...).
    pub fn internal_name(&self, node: usize) -> String {
        debug_assert!(!self.is_leaf(node));
        format!("n{}", self.internal_names[node - self.labels.len()])
    }

    pub fn leaf_id(&self, label: &str) -> Result<usize, TreeError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| TreeError::UnknownLabel(label.to_string()))
    }

    /// Number of edges on the unique path between two leaves; zero when the
    /// labels coincide.
    pub fn path_length(&self, a: &str, b: &str) -> Result<usize, TreeError> {
        let a = self.leaf_id(a)?;
        let b = self.leaf_id(b)?;
        Ok(self.distances_from(a)[b] as usize)
    }

    /// BFS edge distances from `start` to every node.
    pub(crate) fn distances_from(&self, start: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.adj.len()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs leaf path lengths, `n × n`, in leaf-id order.
    pub fn leaf_path_lengths(&self) -> Vec<Vec<u32>> {
        let n = self.labels.len();
        (0..n)
            .map(|leaf| {
                let d = self.distances_from(leaf);
                d[..n].to_vec()
            })
            .collect()
    }

    /// The unique pairing of the given 4-set whose within-pair paths are
    /// vertex-disjoint in this tree.
    pub fn consistent_topology(&self, four: &[&str; 4]) -> Result<QuartetTopology, TreeError> {
        let ids = [
            self.leaf_id(four[0])?,
            self.leaf_id(four[1])?,
            self.leaf_id(four[2])?,
            self.leaf_id(four[3])?,
        ];
        let pairing = self.consistent_pairing_ids(ids);
        Ok(QuartetTopology {
            leaves: four.map(|s| s.to_string()),
            pairing,
        })
    }

    pub(crate) fn consistent_pairing_ids(&self, ids: [usize; 4]) -> Pairing {
        let du = self.distances_from(ids[0]);
        let dv = self.distances_from(ids[1]);
        let dw = self.distances_from(ids[2]);
        let sums = [
            du[ids[1]] + dw[ids[3]],
            du[ids[2]] + dv[ids[3]],
            du[ids[3]] + dv[ids[2]],
        ];
        Pairing::from_path_sums(sums)
    }

    /// Leaf-label-preserving isomorphism test. Internal identifiers carry no
    /// meaning; two trees are isomorphic exactly when they induce the same
    /// set of leaf bipartitions.
    pub fn is_isomorphic(&self, other: &TernaryTree) -> Result<bool, TreeError> {
        let mut mine: Vec<&str> = self.labels.iter().map(|s| s.as_str()).collect();
        let mut theirs: Vec<&str> = other.labels.iter().map(|s| s.as_str()).collect();
        mine.sort_unstable();
        theirs.sort_unstable();
        if mine != theirs {
            return Err(TreeError::LabelSetMismatch);
        }
        Ok(self.splits(&mine) == other.splits(&mine))
    }

    /// Canonical nontrivial bipartitions: for each internal edge, the leaf
    /// set on one side as a bitmask over `sorted_labels` indices, stored as
    /// the side not containing index 0.
    fn splits(&self, sorted_labels: &[&str]) -> HashSet<Vec<u64>> {
        let n = self.labels.len();
        let canonical_index: Vec<usize> = (0..n)
            .map(|leaf| {
                sorted_labels
                    .binary_search(&self.labels[leaf].as_str())
                    .expect("label present")
            })
            .collect();
        let words = n.div_ceil(64);
        let mut out = HashSet::new();
        for (u, v) in self.edges() {
            if self.is_leaf(u) || self.is_leaf(v) {
                continue;
            }
            let mut mask = vec![0u64; words];
            for leaf in self.subtree_leaves(u, v) {
                let c = canonical_index[leaf];
                mask[c / 64] |= 1 << (c % 64);
            }
            if mask[0] & 1 != 0 {
                for (w, m) in mask.iter_mut().enumerate() {
                    let bits = if (w + 1) * 64 <= n { 64 } else { n % 64 };
                    *m = !*m & if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
                }
            }
            out.insert(mask);
        }
        out
    }

    /// Undirected edge list with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.adj.len() - 1);
        for (u, nbrs) in self.adj.iter().enumerate() {
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Nodes of the component containing `root` after cutting edge
    /// `root — parent`.
    pub(crate) fn subtree_nodes(&self, root: usize, parent: usize) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        seen[parent] = true;
        seen[root] = true;
        let mut stack = vec![root];
        let mut out = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                    out.push(w);
                }
            }
        }
        out
    }

    pub(crate) fn subtree_leaves(&self, root: usize, parent: usize) -> Vec<usize> {
        self.subtree_nodes(root, parent)
            .into_iter()
            .filter(|&v| self.is_leaf(v))
            .collect()
    }

    /// The neighbor of `from` lying on the path toward `target`.
    pub(crate) fn neighbor_toward(&self, from: usize, target: usize) -> usize {
        debug_assert_ne!(from, target);
        let dist = self.distances_from(target);
        *self.adj[from]
            .iter()
            .min_by_key(|&&w| dist[w])
            .expect("connected tree")
    }

    pub(crate) fn detach(&mut self, u: usize, v: usize) {
        self.adj[u].retain(|&w| w != v);
        self.adj[v].retain(|&w| w != u);
    }

    pub(crate) fn attach(&mut self, u: usize, v: usize) {
        self.adj[u].push(v);
        self.adj[v].push(u);
    }

    /// Exchanges the positions of two leaves; every other adjacency is
    /// untouched.
    pub(crate) fn swap_leaf_positions(&mut self, a: usize, b: usize) {
        debug_assert!(self.is_leaf(a) && self.is_leaf(b) && a != b);
        let pa = self.adj[a][0];
        let pb = self.adj[b][0];
        self.detach(a, pa);
        self.detach(b, pb);
        self.attach(a, pb);
        self.attach(b, pa);
    }

    /// Exchanges the subtree rooted at `a` (away from `pa`) with the subtree
    /// rooted at `b` (away from `pb`). Callers guarantee the subtrees are
    /// disjoint, i.e. `pa` and `pb` lie on the `a — b` path.
    pub(crate) fn swap_subtrees(&mut self, a: usize, pa: usize, b: usize, pb: usize) {
        self.detach(a, pa);
        self.detach(b, pb);
        self.attach(a, pb);
        self.attach(b, pa);
    }

    /// Detaches the subtree rooted at `root` by cutting `root — parent`,
    /// smooths `parent` away, then subdivides the edge `(u, v)` with a fresh
    /// internal node and hangs the subtree there. `(u, v)` must be an edge of
    /// the remaining component as it stands after smoothing; the fused
    /// replacement edge is allowed. The new internal node reuses `parent`'s
    /// slot under a fresh display name.
    pub(crate) fn transfer_subtree(&mut self, root: usize, parent: usize, u: usize, v: usize) {
        debug_assert!(!self.is_leaf(parent));
        self.detach(root, parent);
        let (x, y) = {
            let rest = &self.adj[parent];
            debug_assert_eq!(rest.len(), 2);
            (rest[0], rest[1])
        };
        self.detach(parent, x);
        self.detach(parent, y);
        self.attach(x, y);
        self.detach(u, v);
        self.attach(u, parent);
        self.attach(parent, v);
        self.attach(root, parent);
        let slot = parent - self.labels.len();
        self.internal_names[slot] = self.next_name;
        self.next_name += 1;
    }

    /// Checks every structural invariant: node count, leaf degree 1,
    /// internal degree 3, connectivity, acyclicity, label uniqueness.
    pub fn validate(&self) -> Result<(), TreeError> {
        let n = self.labels.len();
        if n < 3 {
            return Err(TreeError::Invalid(format!("{n} leaves, need at least 3")));
        }
        check_unique(&self.labels)?;
        if self.adj.len() != 2 * n - 2 {
            return Err(TreeError::Invalid(format!(
                "{} nodes for {n} leaves, expected {}",
                self.adj.len(),
                2 * n - 2
            )));
        }
        let mut edge_count = 0;
        for (v, nbrs) in self.adj.iter().enumerate() {
            let expected = if self.is_leaf(v) { 1 } else { 3 };
            if nbrs.len() != expected {
                return Err(TreeError::Invalid(format!(
                    "node {v} has degree {}, expected {expected}",
                    nbrs.len()
                )));
            }
            let mut distinct: Vec<usize> = nbrs.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() != nbrs.len() || distinct.contains(&v) {
                return Err(TreeError::Invalid(format!("node {v} has duplicate or self edges")));
            }
            edge_count += nbrs.len();
        }
        if edge_count != 2 * (self.adj.len() - 1) {
            return Err(TreeError::Invalid("edge count is not node count minus one".into()));
        }
        if self.distances_from(0).contains(&u32::MAX) {
            return Err(TreeError::Invalid("tree is not connected".into()));
        }
        Ok(())
    }

    /// DOT rendering: undirected graph, box-shaped labeled leaves,
    /// point-shaped internal nodes. Output is deterministic.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph tree {\n  node [shape=point];\n");
        for (i, label) in self.labels.iter().enumerate() {
            let _ = writeln!(
                out,
                "  L{i} [shape=box, label=\"{}\"];",
                label.replace('\\', "\\\\").replace('"', "\\\"")
            );
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  {} -- {};", self.dot_id(u), self.dot_id(v));
        }
        out.push_str("}\n");
        out
    }

    fn dot_id(&self, node: usize) -> String {
        if self.is_leaf(node) {
            format!("L{node}")
        } else {
            self.internal_name(node)
        }
    }

    /// Newick rendering, rooted arbitrarily at the lowest-numbered internal
    /// node. The tree itself is unrooted; consumers should treat the root as
    /// a drawing convention only.
    pub fn to_newick(&self) -> String {
        let n = self.labels.len();
        let root = (n..self.adj.len())
            .min_by_key(|&v| self.internal_names[v - n])
            .expect("at least one internal node");
        let mut out = String::new();
        self.newick_rec(root, usize::MAX, &mut out);
        out.push(';');
        out
    }

    fn newick_rec(&self, node: usize, parent: usize, out: &mut String) {
        if self.is_leaf(node) {
            out.push_str(&quote_newick(&self.labels[node]));
            return;
        }
        out.push('(');
        let mut first = true;
        for &w in &self.adj[node] {
            if w == parent {
                continue;
            }
            if !first {
                out.push(',');
            }
            first = false;
            self.newick_rec(w, node, out);
        }
        out.push(')');
        out.push_str(&self.internal_name(node));
    }

    #[cfg(test)]
    pub(crate) fn renumber_internals_for_test(&mut self, offset: u64) {
        for name in &mut self.internal_names {
            *name += offset;
        }
        self.next_name += offset;
    }
}

fn check_unique(labels: &[String]) -> Result<(), TreeError> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(TreeError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

fn quote_newick(label: &str) -> String {
    let needs_quote = label
        .chars()
        .any(|c| c.is_whitespace() || "(),:;'[]".contains(c));
    if needs_quote {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("t{i:02}")).collect()
    }

    /// Independent oracle: the pairing whose two within-pair paths share no
    /// vertex. Used to cross-check the four-point implementation.
    pub(crate) fn consistent_by_disjoint_paths(t: &TernaryTree, ids: [usize; 4]) -> Pairing {
        let path_vertices = |a: usize, b: usize| -> HashSet<usize> {
            // Walk back from b using BFS parents.
            let mut parent = vec![usize::MAX; t.node_count()];
            let mut dist = vec![u32::MAX; t.node_count()];
            dist[a] = 0;
            let mut queue = VecDeque::from([a]);
            while let Some(v) = queue.pop_front() {
                for &w in t.neighbors(v) {
                    if dist[w] == u32::MAX {
                        dist[w] = dist[v] + 1;
                        parent[w] = v;
                        queue.push_back(w);
                    }
                }
            }
            let mut out = HashSet::from([b]);
            let mut cur = b;
            while cur != a {
                cur = parent[cur];
                out.insert(cur);
            }
            out
        };
        let mut found = None;
        for pairing in Pairing::ALL {
            let [[p0, p1], [q0, q1]] = pairing.index_pairs();
            let first = path_vertices(ids[p0], ids[p1]);
            let second = path_vertices(ids[q0], ids[q1]);
            if first.is_disjoint(&second) {
                assert!(found.is_none(), "two disjoint pairings for one 4-set");
                found = Some(pairing);
            }
        }
        found.expect("exactly one pairing must be vertex-disjoint")
    }

    #[test]
    fn four_leaf_tree_has_six_nodes() {
        let t = TernaryTree::random(&labels(4), 1).unwrap();
        assert_eq!(t.node_count(), 6);
        assert_eq!(t.internal_count(), 2);
        assert_eq!(t.leaf_count(), 4);
        t.validate().unwrap();
    }

    #[test]
    fn eighteen_leaf_tree_has_thirty_four_nodes() {
        let t = TernaryTree::random(&labels(18), 7).unwrap();
        assert_eq!(t.node_count(), 34);
        assert_eq!(t.internal_count(), 16);
        t.validate().unwrap();
    }

    #[test]
    fn same_seed_grows_identical_trees() {
        let a = TernaryTree::random(&labels(11), 99).unwrap();
        let b = TernaryTree::random(&labels(11), 99).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = TernaryTree::random(&labels(11), 100).unwrap();
        assert!(c.validate().is_ok());
    }

    #[test]
    fn too_few_labels_is_rejected() {
        assert!(matches!(
            TernaryTree::random(&labels(3), 0),
            Err(TreeError::TooFewLabels(3))
        ));
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let mut ls = labels(5);
        ls[4] = ls[0].clone();
        assert!(matches!(
            TernaryTree::random(&ls, 0),
            Err(TreeError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn sibling_pair_tree_is_consistent_with_its_pairing() {
        // u,v on one internal node, w,x on the other: the quartet uv|wx.
        let ls: Vec<String> = ["u", "v", "w", "x"].map(String::from).to_vec();
        let t = TernaryTree::caterpillar(&ls).unwrap();
        let topo = t.consistent_topology(&["u", "v", "w", "x"]).unwrap();
        assert_eq!(topo.pairing, Pairing::UvWx);
        assert_ne!(topo.pairing, Pairing::UwVx);
        assert_ne!(topo.pairing, Pairing::UxVw);
    }

    #[test]
    fn caterpillar_pairs_outer_leaves_with_their_neighbors() {
        let ls: Vec<String> = ["a", "b", "c", "d"].map(String::from).to_vec();
        let t = TernaryTree::caterpillar(&ls).unwrap();
        // Hand check on the 6-node tree: the a–b path (a, i0, b) avoids the
        // c–d path (c, i1, d).
        let topo = t.consistent_topology(&["a", "b", "c", "d"]).unwrap();
        assert_eq!(topo.pairing, Pairing::UvWx);
    }

    #[test]
    fn sibling_leaves_are_two_edges_apart() {
        let ls: Vec<String> = ["a", "b", "c", "d"].map(String::from).to_vec();
        let t = TernaryTree::caterpillar(&ls).unwrap();
        assert_eq!(t.path_length("a", "b").unwrap(), 2);
        assert_eq!(t.path_length("a", "a").unwrap(), 0);
    }

    #[test]
    fn caterpillar_ends_are_n_minus_one_apart() {
        let ls = labels(18);
        let t = TernaryTree::caterpillar(&ls).unwrap();
        assert_eq!(t.path_length("t00", "t17").unwrap(), 17);
    }

    #[test]
    fn unknown_label_is_reported() {
        let t = TernaryTree::random(&labels(5), 0).unwrap();
        assert!(matches!(
            t.path_length("t00", "zzz"),
            Err(TreeError::UnknownLabel(_))
        ));
        assert!(matches!(
            t.consistent_topology(&["t00", "t01", "t02", "zzz"]),
            Err(TreeError::UnknownLabel(_))
        ));
    }

    #[test]
    fn tree_is_isomorphic_to_itself_and_to_renumbered_self() {
        let t = TernaryTree::random(&labels(9), 5).unwrap();
        assert!(t.is_isomorphic(&t).unwrap());
        let mut renumbered = t.clone();
        renumbered.renumber_internals_for_test(1000);
        assert!(t.is_isomorphic(&renumbered).unwrap());
    }

    #[test]
    fn non_sibling_leaf_swap_breaks_isomorphism() {
        let t = TernaryTree::caterpillar(&labels(6)).unwrap();
        let mut swapped = t.clone();
        // Leaves 0 and 5 sit at opposite ends; swapping them changes at
        // least one quartet.
        swapped.swap_leaf_positions(0, 5);
        swapped.validate().unwrap();
        assert!(!t.is_isomorphic(&swapped).unwrap());
    }

    #[test]
    fn sibling_leaf_swap_preserves_isomorphism() {
        let t = TernaryTree::caterpillar(&labels(6)).unwrap();
        let mut swapped = t.clone();
        swapped.swap_leaf_positions(0, 1);
        assert!(t.is_isomorphic(&swapped).unwrap());
    }

    #[test]
    fn isomorphism_agrees_with_the_quartet_characterization() {
        // Two trees on one leaf set are isomorphic exactly when every 4-set
        // gets the same consistent pairing; cross-check the split-based
        // implementation against that definition.
        let all_quartets_agree = |a: &TernaryTree, b: &TernaryTree| -> bool {
            let n = a.leaf_count();
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        for l in k + 1..n {
                            let ids = [i, j, k, l];
                            if a.consistent_pairing_ids(ids) != b.consistent_pairing_ids(ids) {
                                return false;
                            }
                        }
                    }
                }
            }
            true
        };
        let ls = labels(7);
        for seed_a in 0..6u64 {
            for seed_b in 0..6u64 {
                let a = TernaryTree::random(&ls, seed_a).unwrap();
                let b = TernaryTree::random(&ls, seed_b).unwrap();
                assert_eq!(
                    a.is_isomorphic(&b).unwrap(),
                    all_quartets_agree(&a, &b),
                    "seeds {seed_a}/{seed_b}"
                );
            }
        }
    }

    #[test]
    fn label_set_mismatch_is_an_error() {
        let a = TernaryTree::random(&labels(5), 0).unwrap();
        let b = TernaryTree::random(&labels(6), 0).unwrap();
        assert!(matches!(a.is_isomorphic(&b), Err(TreeError::LabelSetMismatch)));
    }

    #[test]
    fn every_four_set_has_exactly_one_consistent_pairing() {
        for n in 4..=10usize {
            let ls = labels(n);
            let t = TernaryTree::random(&ls, n as u64).unwrap();
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        for l in k + 1..n {
                            let ids = [i, j, k, l];
                            let by_four_point = t.consistent_pairing_ids(ids);
                            let by_disjoint = consistent_by_disjoint_paths(&t, ids);
                            assert_eq!(by_four_point, by_disjoint, "n={n} ids={ids:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejected_pairings_tie_on_path_length_sum() {
        let t = TernaryTree::random(&labels(8), 3).unwrap();
        let lengths = t.leaf_path_lengths();
        for i in 0..8 {
            for j in i + 1..8 {
                for k in j + 1..8 {
                    for l in k + 1..8 {
                        let sums = [
                            lengths[i][j] + lengths[k][l],
                            lengths[i][k] + lengths[j][l],
                            lengths[i][l] + lengths[j][k],
                        ];
                        let mut sorted = sums;
                        sorted.sort_unstable();
                        assert!(sorted[0] < sorted[1], "unique minimum");
                        assert_eq!(sorted[1], sorted[2], "rejected pairings tie");
                    }
                }
            }
        }
    }

    #[test]
    fn dot_output_shapes_leaves_and_internals() {
        let t = TernaryTree::caterpillar(&labels(4)).unwrap();
        let dot = t.to_dot();
        assert!(dot.starts_with("graph tree {"));
        assert!(dot.contains("node [shape=point]"));
        assert!(dot.contains("[shape=box, label=\"t00\"]"));
        assert!(dot.contains("n0 -- n1;"));
    }

    #[test]
    fn newick_output_is_rooted_at_lowest_internal() {
        let ls: Vec<String> = ["a", "b", "c", "d"].map(String::from).to_vec();
        let t = TernaryTree::caterpillar(&ls).unwrap();
        let nwk = t.to_newick();
        assert!(nwk.ends_with(';'));
        assert!(nwk.starts_with('('));
        assert!(nwk.contains("n0"));
        for leaf in ["a", "b", "c", "d"] {
            assert!(nwk.contains(leaf));
        }
    }

    #[test]
    fn newick_quotes_awkward_labels() {
        assert_eq!(quote_newick("plain-label_1.mid"), "plain-label_1.mid");
        assert_eq!(quote_newick("has space"), "'has space'");
        assert_eq!(quote_newick("it's"), "'it''s'");
    }
}
