//! Trees revealed on demand, and the spine they hang from.
//!
//! A node's fate (leaf, or parent of two children) is drawn the first time a
//! walk reaches it. For a Yule subtree of age `a` the node carries its
//! remaining time `r`: its clock is `Exp(1)`, it is a leaf when the clock
//! exceeds `r`, and otherwise both children get `r - clock`. Complete
//! subtrees (the canopy) carry a remaining height instead.

use std::collections::VecDeque;

use rand::Rng;

use super::BinaryTree;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    Time(f64),
    Height(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fate {
    Hidden,
    Leaf,
    Internal([usize; 2]),
}

#[derive(Clone, Debug)]
struct LazyNode {
    parent: Option<usize>,
    budget: Budget,
    fate: Fate,
}

/// Arena of lazily revealed trees. Tree roots have no parent inside the arena.
#[derive(Clone, Debug, Default)]
pub struct LazyForest {
    nodes: Vec<LazyNode>,
    leaves: usize,
}

impl LazyForest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_root(&mut self, budget: Budget) -> usize {
        self.nodes.push(LazyNode {
            parent: None,
            budget,
            fate: Fate::Hidden,
        });
        self.nodes.len() - 1
    }

    /// Nodes created so far (revealed or pending).
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes known to be leaves.
    pub fn revealed_leaves(&self) -> usize {
        self.leaves
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.nodes[node].parent
    }

    fn reveal<R: Rng + ?Sized>(&mut self, u: usize, rng: &mut R) -> Fate {
        if self.nodes[u].fate != Fate::Hidden {
            return self.nodes[u].fate;
        }
        let child_budget = match self.nodes[u].budget {
            Budget::Time(r) => {
                let clock = rng::exp1(rng);
                (clock < r).then(|| Budget::Time(r - clock))
            }
            Budget::Height(0) => None,
            Budget::Height(h) => Some(Budget::Height(h - 1)),
        };
        let fate = match child_budget {
            None => {
                self.leaves += 1;
                Fate::Leaf
            }
            Some(budget) => {
                let a = self.nodes.len();
                for _ in 0..2 {
                    self.nodes.push(LazyNode {
                        parent: Some(u),
                        budget,
                        fate: Fate::Hidden,
                    });
                }
                Fate::Internal([a, a + 1])
            }
        };
        self.nodes[u].fate = fate;
        fate
    }

    /// Walk away from the tree root through uniformly chosen children until a
    /// leaf; leaf `x` is reached with probability `2^-d(x, from)`.
    pub fn forward_walk<R: Rng + ?Sized>(&mut self, from: usize, rng: &mut R) -> usize {
        let mut u = from;
        while let Fate::Internal([a, b]) = self.reveal(u, rng) {
            u = if rng::coin(rng) { a } else { b };
        }
        u
    }

    /// Non-backtracking walk from `leaf` to another leaf of the same tree:
    /// step to the parent, then at every node choose uniformly between the
    /// unvisited child branch and the parent. Returns `None` when the walk
    /// leaves the tree above its root, which happens with the leftover
    /// probability `1 - sum_y 2^(1-d(leaf, y))`.
    pub fn walk_within<R: Rng + ?Sized>(&mut self, leaf: usize, rng: &mut R) -> Option<usize> {
        let mut came = leaf;
        let mut cur = self.nodes[leaf].parent?;
        loop {
            if rng::coin(rng) {
                let Fate::Internal([a, b]) = self.nodes[cur].fate else {
                    unreachable!("ancestors of a revealed node are internal")
                };
                let other = if a == came { b } else { a };
                return Some(self.forward_walk(other, rng));
            }
            came = cur;
            cur = self.nodes[cur].parent?;
        }
    }

    /// Reveal the whole tree under `root` and copy it out.
    pub fn materialize<R: Rng + ?Sized>(&mut self, root: usize, rng: &mut R) -> BinaryTree {
        let mut index = std::collections::HashMap::new();
        let mut order = vec![root];
        index.insert(root, 0usize);
        let mut children = vec![None];
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            if let Fate::Internal([a, b]) = self.reveal(u, rng) {
                let ia = order.len();
                for (k, c) in [a, b].into_iter().enumerate() {
                    index.insert(c, ia + k);
                    order.push(c);
                    children.push(None);
                }
                children[index[&u]] = Some([ia, ia + 1]);
            }
            head += 1;
        }
        BinaryTree::from_children(&children).expect("revealed tree is binary")
    }
}

/// A revealed leaf of the spine tree: the end vertex `v_0` or a leaf of one
/// of the hanging subtrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Origin,
    Node(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpineKind {
    /// Subtree `n` is a Yule tree whose age is the sum of the first `n` labels.
    Yule,
    /// Subtree `n` is a complete binary tree of height `n - 1` (canopy tree).
    Canopy,
}

/// The revealed prefix `v_0 v_1 ... v_n` of the spine together with the
/// subtrees hung at `v_1..v_n`.
#[derive(Clone, Debug)]
pub struct SpineState {
    kind: SpineKind,
    labels: Vec<f64>,
    ages: Vec<f64>,
    roots: Vec<usize>,
    prefix: VecDeque<f64>,
    shift: f64,
    forest: LazyForest,
}

impl SpineState {
    pub fn new(kind: SpineKind) -> Self {
        SpineState {
            kind,
            labels: Vec::new(),
            ages: Vec::new(),
            roots: Vec::new(),
            prefix: VecDeque::new(),
            shift: 0.0,
            forest: LazyForest::new(),
        }
    }

    /// Yule spine whose first labels are forced to `prefix`; `shift` is added
    /// to the first freely drawn label.
    pub fn with_prefix(prefix: Vec<f64>, shift: f64) -> Self {
        SpineState {
            prefix: prefix.into(),
            shift,
            ..Self::new(SpineKind::Yule)
        }
    }

    pub fn kind(&self) -> SpineKind {
        self.kind
    }

    /// Number of spine edges revealed.
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Edge labels `s_1..s_n` (empty for the canopy).
    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    /// Subtree ages `a_i = s_1 + ... + s_i` (empty for the canopy).
    pub fn ages(&self) -> &[f64] {
        &self.ages
    }

    /// Root `w_i` of subtree `i` (1-based, as on the spine).
    pub fn subtree_root(&self, i: usize) -> usize {
        self.roots[i - 1]
    }

    pub fn forest(&self) -> &LazyForest {
        &self.forest
    }

    pub fn forest_mut(&mut self) -> &mut LazyForest {
        &mut self.forest
    }

    /// Reveal the next spine edge and its (lazy) subtree; returns `w_{n+1}`.
    pub fn extend_spine<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let budget = match self.kind {
            SpineKind::Yule => {
                let label = match self.prefix.pop_front() {
                    Some(l) => l,
                    None => rng::exp1(rng) + std::mem::take(&mut self.shift),
                };
                let age = self.ages.last().copied().unwrap_or(0.0) + label;
                self.labels.push(label);
                self.ages.push(age);
                Budget::Time(age)
            }
            SpineKind::Canopy => Budget::Height(self.roots.len() as u32),
        };
        let root = self.forest.add_root(budget);
        self.roots.push(root);
        root
    }

    /// Fully reveal subtree `i` (1-based) and copy it out.
    pub fn subtree<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) -> BinaryTree {
        let root = self.roots[i - 1];
        self.forest.materialize(root, rng)
    }
}
