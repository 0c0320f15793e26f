//! Genealogical trees of the splitting process.
//!
//! [`BinaryTree`] holds finite, fully built genealogies (every node has zero
//! or two children). The [`lazy`] submodule reveals trees on demand and
//! carries the spine used by the limit samplers.

pub mod lazy;

pub use lazy::{Budget, LazyForest, Place, SpineKind, SpineState};

use std::collections::VecDeque;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq)]
struct TreeNode {
    parent: Option<NodeId>,
    children: Option<[NodeId; 2]>,
    depth: u32,
    birth: f64,
}

/// A finite rooted tree in which every node has zero or two children.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryTree {
    nodes: Vec<TreeNode>,
    leaves: Vec<NodeId>,
}

/// Tree edge identified by its lower endpoint: the edge `node - parent(node)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeEdge {
    pub child: NodeId,
}

impl BinaryTree {
    pub fn single() -> Self {
        BinaryTree {
            nodes: vec![TreeNode {
                parent: None,
                children: None,
                depth: 0,
                birth: 0.0,
            }],
            leaves: vec![0],
        }
    }

    /// Build from a child table (`children[i]` are the children of node `i`,
    /// node 0 is the root). Rejects anything that is not a full binary tree.
    pub fn from_children(children: &[Option<[NodeId; 2]>]) -> Result<Self> {
        let mut tree = BinaryTree {
            nodes: Vec::with_capacity(children.len()),
            leaves: Vec::new(),
        };
        let mut parent = vec![None; children.len()];
        for (i, c) in children.iter().enumerate() {
            if let Some([a, b]) = *c {
                for x in [a, b] {
                    if x >= children.len() || x == 0 || parent[x].is_some() || a == b {
                        return Err(Error::InvalidGraph(format!("node {i} has a bad child {x}")));
                    }
                    parent[x] = Some(i);
                }
            }
        }
        if children.is_empty() || parent.iter().skip(1).any(Option::is_none) {
            return Err(Error::InvalidGraph("not a single rooted tree".into()));
        }
        let mut depth = vec![u32::MAX; children.len()];
        depth[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            if let Some([a, b]) = children[u] {
                depth[a] = depth[u] + 1;
                depth[b] = depth[u] + 1;
                queue.extend([a, b]);
            }
        }
        if depth.contains(&u32::MAX) {
            return Err(Error::InvalidGraph("tree has a cycle".into()));
        }
        for i in 0..children.len() {
            tree.nodes.push(TreeNode {
                parent: parent[i],
                children: children[i],
                depth: depth[i],
                birth: 0.0,
            });
            if children[i].is_none() {
                tree.leaves.push(i);
            }
        }
        Ok(tree)
    }

    /// Complete tree of the given height (`2^height` leaves).
    pub fn complete(height: u32) -> Self {
        let mut children = Vec::new();
        let mut frontier = vec![0usize];
        children.push(None);
        for _ in 0..height {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for &u in &frontier {
                let a = children.len();
                children.push(None);
                children.push(None);
                children[u] = Some([a, a + 1]);
                next.extend([a, a + 1]);
            }
            frontier = next;
        }
        Self::from_children(&children).expect("complete tree is valid")
    }

    fn split_leaf(&mut self, leaf: NodeId, time: f64) -> [NodeId; 2] {
        let depth = self.nodes[leaf].depth + 1;
        let a = self.nodes.len();
        for _ in 0..2 {
            self.nodes.push(TreeNode {
                parent: Some(leaf),
                children: None,
                depth,
                birth: time,
            });
        }
        self.nodes[leaf].children = Some([a, a + 1]);
        [a, a + 1]
    }

    fn rebuild_leaves(&mut self) {
        self.leaves = (0..self.nodes.len()).filter(|&i| self.nodes[i].children.is_none()).collect();
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Leaves in increasing node order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node < self.nodes.len()
    }

    pub fn is_leaf(&self, node: NodeId) -> bool {
        self.nodes.get(node).is_some_and(|n| n.children.is_none())
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.nodes[node].parent
    }

    pub fn children(&self, node: NodeId) -> Option<[NodeId; 2]> {
        self.nodes[node].children
    }

    pub fn depth(&self, node: NodeId) -> u32 {
        self.nodes[node].depth
    }

    /// Time at which the node was born (0 for the root and for trees not
    /// built by a timed process).
    pub fn birth(&self, node: NodeId) -> f64 {
        self.nodes[node].birth
    }

    /// All tree edges.
    pub fn edges(&self) -> impl Iterator<Item = TreeEdge> + '_ {
        (1..self.nodes.len()).map(|child| TreeEdge { child })
    }

    /// Graph distance between any two nodes.
    pub fn distance(&self, x: NodeId, y: NodeId) -> Result<u32> {
        for n in [x, y] {
            if !self.contains(n) {
                return Err(Error::NoSuchNode(n));
            }
        }
        let (mut a, mut b) = (x, y);
        let mut d = 0;
        while self.nodes[a].depth > self.nodes[b].depth {
            a = self.nodes[a].parent.expect("non-root");
            d += 1;
        }
        while self.nodes[b].depth > self.nodes[a].depth {
            b = self.nodes[b].parent.expect("non-root");
            d += 1;
        }
        while a != b {
            a = self.nodes[a].parent.expect("non-root");
            b = self.nodes[b].parent.expect("non-root");
            d += 2;
        }
        Ok(d)
    }

    /// Distance between two leaves.
    pub fn tree_distance(&self, x: NodeId, y: NodeId) -> Result<u32> {
        for n in [x, y] {
            if !self.contains(n) {
                return Err(Error::NoSuchNode(n));
            }
            if !self.is_leaf(n) {
                return Err(Error::NotALeaf(n));
            }
        }
        self.distance(x, y)
    }

    fn neighbours(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes[u]
            .parent
            .into_iter()
            .chain(self.nodes[u].children.into_iter().flatten())
    }

    /// Leaves reachable from `from` without using `blocked`, with distances.
    fn reachable_leaves(&self, from: NodeId, blocked: Option<TreeEdge>) -> Vec<(NodeId, u32)> {
        let is_blocked = |a: NodeId, b: NodeId| {
            blocked.is_some_and(|e| {
                let p = self.nodes[e.child].parent;
                (a == e.child && Some(b) == p) || (b == e.child && Some(a) == p)
            })
        };
        let mut out = Vec::new();
        let mut stack = vec![(from, usize::MAX, 0u32)];
        while let Some((u, came, d)) = stack.pop() {
            if self.is_leaf(u) {
                out.push((u, d));
            }
            for w in self.neighbours(u) {
                if w != came && !is_blocked(u, w) {
                    stack.push((w, u, d + 1));
                }
            }
        }
        out
    }

    /// Sum of `2^-d(x, from)` over leaves `x` reachable from `from` without
    /// crossing `blocked`.
    pub fn leaf_weight(&self, from: NodeId, blocked: Option<TreeEdge>) -> Result<f64> {
        self.check_node(from)?;
        Ok(self
            .reachable_leaves(from, blocked)
            .iter()
            .map(|&(_, d)| (-(d as f64)).exp2())
            .sum())
    }

    /// Same sum as [`leaf_weight`](Self::leaf_weight), computed exactly.
    pub fn leaf_weight_exact(&self, from: NodeId, blocked: Option<TreeEdge>) -> Result<Dyadic> {
        self.check_node(from)?;
        let leaves = self.reachable_leaves(from, blocked);
        let scale = leaves.iter().map(|&(_, d)| d).max().unwrap_or(0);
        let mut numer = BigUint::from(0u32);
        for (_, d) in leaves {
            numer += BigUint::from(1u32) << (scale - d);
        }
        Ok(Dyadic { numer, scale })
    }

    /// Total crossing intensity factor `z` of a cut edge `u - v` (u the
    /// parent side): the product of the leaf weights of the two sides.
    pub fn crossing_rate(&self, cut: TreeEdge) -> Result<f64> {
        self.check_node(cut.child)?;
        let parent = self.nodes[cut.child]
            .parent
            .ok_or_else(|| Error::Domain("the root has no parent edge".into()))?;
        let upper = self.leaf_weight(parent, Some(cut))?;
        let lower = self.leaf_weight(cut.child, Some(cut))?;
        Ok(upper * lower)
    }

    /// Walk from the root to a uniformly chosen child until a leaf.
    pub fn forward_walk_leaf<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        let mut u = 0;
        while let Some([a, b]) = self.nodes[u].children {
            u = if rng::coin(rng) { a } else { b };
        }
        u
    }

    fn check_node(&self, node: NodeId) -> Result<()> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(Error::NoSuchNode(node))
        }
    }

    /// Nested-parenthesis dump, e.g. `((3:0.50,4:0.50)1:1.00,2:1.00)0;`, with
    /// each node annotated by the length of its parent edge (birth-time gap).
    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        self.write_newick(0, &mut out);
        out.push(';');
        out
    }

    fn write_newick(&self, u: NodeId, out: &mut String) {
        use std::fmt::Write;
        if let Some([a, b]) = self.nodes[u].children {
            out.push('(');
            self.write_newick(a, out);
            out.push(',');
            self.write_newick(b, out);
            out.push(')');
        }
        write!(out, "{u}").expect("string write");
        if let Some(p) = self.nodes[u].parent {
            write!(out, ":{:.2}", self.nodes[u].birth - self.nodes[p].birth).expect("string write");
        }
    }
}

/// Non-negative dyadic rational `numer / 2^scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub numer: BigUint,
    pub scale: u32,
}

impl Dyadic {
    pub fn is_one(&self) -> bool {
        self.numer == BigUint::from(1u32) << self.scale
    }
}

/// Genealogy of a rate-1 binary splitting process run for time `t`.
///
/// Uses the embedded jump chain: with `k` living lineages the next split
/// comes after `Exp(1)/k` and hits a uniformly chosen lineage.
pub fn sample_yule_tree<R: Rng + ?Sized>(t: f64, rng: &mut R) -> BinaryTree {
    let mut tree = BinaryTree::single();
    let mut lineages = vec![0usize];
    let mut clock = 0.0;
    loop {
        clock += rng::exp1(rng) / lineages.len() as f64;
        if clock > t {
            break;
        }
        let i = rng.random_range(0..lineages.len());
        let leaf = lineages.swap_remove(i);
        lineages.extend(tree.split_leaf(leaf, clock));
    }
    tree.rebuild_leaves();
    tree
}

/// Distance between leaves `i` and `j` of the binary canopy tree, whose
/// leaves are indexed by the naturals so that leaves `0..2^k` form a complete
/// subtree of height `k`.
pub fn canopy_distance(i: u64, j: u64) -> u32 {
    if i == j {
        0
    } else {
        2 * (64 - (i ^ j).leading_zeros())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    /// Plain BFS over the tree's undirected edges.
    fn bfs_distance(tree: &BinaryTree, x: NodeId, y: NodeId) -> u32 {
        let mut dist = vec![u32::MAX; tree.node_count()];
        dist[x] = 0;
        let mut q = VecDeque::from([x]);
        while let Some(u) = q.pop_front() {
            let mut nb = Vec::new();
            if let Some(p) = tree.parent(u) {
                nb.push(p);
            }
            if let Some([a, b]) = tree.children(u) {
                nb.extend([a, b]);
            }
            for w in nb {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        dist[y]
    }

    fn brute_crossing(tree: &BinaryTree, cut: TreeEdge) -> f64 {
        let parent = tree.parent(cut.child).unwrap();
        let upper = tree.reachable_leaves(parent, Some(cut));
        let lower = tree.reachable_leaves(cut.child, Some(cut));
        let mut z = 0.0;
        for &(x, _) in &upper {
            for &(y, _) in &lower {
                z += (1.0 - tree.distance(x, y).unwrap() as f64).exp2();
            }
        }
        z
    }

    #[test]
    fn zero_time_tree_is_a_single_vertex() {
        let t = sample_yule_tree(0.0, &mut stream(1));
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.leaves(), &[0]);
    }

    #[test]
    fn tiny_distances() {
        let cherry = BinaryTree::complete(1);
        assert_eq!(cherry.tree_distance(1, 1).unwrap(), 0);
        assert_eq!(cherry.tree_distance(1, 2).unwrap(), 2);
        assert!(matches!(cherry.tree_distance(0, 1), Err(Error::NotALeaf(0))));
        assert!(matches!(cherry.tree_distance(1, 7), Err(Error::NoSuchNode(7))));
    }

    #[test]
    fn leaf_weight_small_cases() {
        let single = BinaryTree::single();
        assert_eq!(single.leaf_weight(0, None).unwrap(), 1.0);
        let cherry = BinaryTree::complete(1);
        assert_eq!(cherry.leaf_weight(0, None).unwrap(), 1.0);
    }

    #[test]
    fn two_leaf_crossing_rate() {
        let cherry = BinaryTree::complete(1);
        let z = cherry.crossing_rate(TreeEdge { child: 1 }).unwrap();
        assert_eq!(z, 0.5);
        assert_eq!(brute_crossing(&cherry, TreeEdge { child: 1 }), 0.5);
    }

    #[test]
    fn canopy_small_distances() {
        assert_eq!(canopy_distance(0, 1), 2);
        assert_eq!(canopy_distance(0, 2), 4);
        assert_eq!(canopy_distance(0, 3), 4);
        assert_eq!(canopy_distance(5, 5), 0);
    }

    #[test]
    fn canopy_distance_matches_explicit_tree() {
        // leaves 0..16 of the canopy are the leaves of a complete tree of height 4,
        // listed left to right
        let tree = BinaryTree::complete(4);
        let mut order = Vec::new();
        let mut stack = vec![0];
        while let Some(u) = stack.pop() {
            match tree.children(u) {
                Some([a, b]) => {
                    stack.push(b);
                    stack.push(a);
                }
                None => order.push(u),
            }
        }
        for i in 0..16 {
            for j in 0..16 {
                assert_eq!(canopy_distance(i as u64, j as u64), bfs_distance(&tree, order[i], order[j]));
            }
        }
    }

    #[test]
    fn canopy_distance_is_a_metric() {
        for i in 0..64u64 {
            assert_eq!(canopy_distance(i, i), 0);
            for j in 0..64u64 {
                assert_eq!(canopy_distance(i, j), canopy_distance(j, i));
                if i != j {
                    assert!(canopy_distance(i, j) > 0);
                }
                for k in 0..64u64 {
                    assert!(canopy_distance(i, k) <= canopy_distance(i, j) + canopy_distance(j, k));
                }
            }
        }
    }

    #[test]
    fn canopy_root_weights_sum_to_one() {
        // sum over x != 0 of 2^(1 - d(0, x)), leaves 1..2^20
        let mut partial = 0.0;
        for x in 1..(1u64 << 20) {
            partial += (1.0 - canopy_distance(0, x) as f64).exp2();
        }
        assert!((partial - (1.0 - (-20f64).exp2())).abs() < 1e-12);
    }

    #[test]
    fn newick_golden() {
        let mut t = BinaryTree::single();
        let [a, _] = t.split_leaf(0, 1.0);
        t.split_leaf(a, 1.5);
        t.rebuild_leaves();
        assert_eq!(t.to_newick(), "((3:0.50,4:0.50)1:1.00,2:1.00)0;");
    }

    #[test]
    fn from_children_rejects_unary_and_forests() {
        assert!(BinaryTree::from_children(&[Some([1, 1]), None]).is_err());
        assert!(BinaryTree::from_children(&[None, None]).is_err());
        assert!(BinaryTree::from_children(&[Some([1, 2]), None, None]).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn distances_match_bfs(seed in any::<u64>(), t in 0.0f64..3.0) {
            let mut rng = stream(seed);
            let tree = sample_yule_tree(t, &mut rng);
            let leaves = tree.leaves();
            for &x in leaves.iter().take(12) {
                for &y in leaves.iter().take(12) {
                    prop_assert_eq!(tree.tree_distance(x, y).unwrap(), bfs_distance(&tree, x, y));
                }
            }
        }

        #[test]
        fn yule_trees_are_full_and_weigh_one(seed in any::<u64>(), t in 0.0f64..4.0) {
            let tree = sample_yule_tree(t, &mut stream(seed));
            for u in 0..tree.node_count() {
                if let Some([a, b]) = tree.children(u) {
                    prop_assert_eq!(tree.parent(a), Some(u));
                    prop_assert_eq!(tree.parent(b), Some(u));
                }
            }
            prop_assert!(tree.leaf_weight_exact(0, None).unwrap().is_one());
            prop_assert!((tree.leaf_weight(0, None).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn crossing_product_matches_double_sum(seed in any::<u64>(), t in 0.5f64..3.0) {
            let mut rng = stream(seed);
            let tree = sample_yule_tree(t, &mut rng);
            for cut in tree.edges() {
                let z = tree.crossing_rate(cut).unwrap();
                prop_assert!(z <= 1.0);
                prop_assert!((z - brute_crossing(&tree, cut)).abs() < 1e-12);
            }
        }
    }
}
