//! Rooted loopless multigraphs.
//!
//! Parallel edges between a pair of vertices are stored as one bundle with a
//! multiplicity, split into edges present at the start of a run ("old") and
//! edges created by splitting events ("new").

mod canon;
mod interchange;

pub use canon::{canonical_form, CanonicalCode, CANON_MAX_MULTIPLICITY, CANON_MAX_VERTICES};
pub use interchange::{deserialize, serialize, GraphDocument};

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parallel edges between one pair of vertices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Bundle {
    pub old: u32,
    pub new: u32,
}

impl Bundle {
    pub fn new_edges(count: u32) -> Self {
        Bundle { old: 0, new: count }
    }

    pub fn multiplicity(&self) -> u32 {
        self.old + self.new
    }

    fn add(&mut self, other: Bundle) {
        self.old += other.old;
        self.new += other.new;
    }
}

#[derive(Clone, Debug)]
struct Slot {
    pos: usize,
    adj: Vec<(VertexId, Bundle)>,
}

/// A loopless multigraph with a distinguished root.
///
/// Vertex ids come from a monotone counter carried by the graph and are never
/// reused, so a process run can be traced back through its splits.
#[derive(Clone, Debug)]
pub struct RootedMultigraph {
    root: VertexId,
    slots: Vec<Option<Slot>>,
    live: Vec<VertexId>,
    next_id: u32,
    edge_total: u64,
}

impl RootedMultigraph {
    /// One vertex (id 0), no edges.
    pub fn create_single() -> Self {
        let mut g = RootedMultigraph {
            root: VertexId(0),
            slots: Vec::new(),
            live: Vec::new(),
            next_id: 0,
            edge_total: 0,
        };
        g.root = g.add_vertex();
        g
    }

    /// Build a graph from explicit parts. Repeated pairs are merged, zero
    /// multiplicities are dropped; loops and dangling endpoints are errors.
    pub fn from_parts<V, E>(root: VertexId, vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId, u32)>,
    {
        let mut g = RootedMultigraph {
            root,
            slots: Vec::new(),
            live: Vec::new(),
            next_id: 0,
            edge_total: 0,
        };
        for v in vertices {
            if g.contains(v) {
                return Err(Error::InvalidGraph(format!("duplicate vertex {v}")));
            }
            g.insert_vertex(v);
        }
        if !g.contains(root) {
            return Err(Error::InvalidGraph(format!("root {root} is not a vertex")));
        }
        for (u, v, m) in edges {
            g.add_edges(u, v, Bundle::new_edges(m))?;
        }
        Ok(g)
    }

    fn insert_vertex(&mut self, v: VertexId) {
        let idx = v.0 as usize;
        if self.slots.len() <= idx {
            self.slots.resize(idx + 1, None);
        }
        self.slots[idx] = Some(Slot {
            pos: self.live.len(),
            adj: Vec::new(),
        });
        self.live.push(v);
        self.next_id = self.next_id.max(v.0 + 1);
    }

    /// Add an isolated vertex with a fresh id.
    pub fn add_vertex(&mut self) -> VertexId {
        let v = VertexId(self.next_id);
        self.insert_vertex(v);
        v
    }

    /// Add parallel edges between `u` and `v`.
    pub fn add_edges(&mut self, u: VertexId, v: VertexId, bundle: Bundle) -> Result<()> {
        if u == v {
            return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
        }
        if !self.contains(u) {
            return Err(Error::NoSuchVertex(u));
        }
        if !self.contains(v) {
            return Err(Error::NoSuchVertex(v));
        }
        if bundle.multiplicity() == 0 {
            return Ok(());
        }
        self.bump(u, v, bundle);
        self.bump(v, u, bundle);
        self.edge_total += u64::from(bundle.multiplicity());
        Ok(())
    }

    fn bump(&mut self, from: VertexId, to: VertexId, bundle: Bundle) {
        let adj = &mut self.slots[from.0 as usize].as_mut().expect("live vertex").adj;
        match adj.iter_mut().find(|(w, _)| *w == to) {
            Some((_, b)) => b.add(bundle),
            None => adj.push((to, bundle)),
        }
    }

    fn drop_entry(&mut self, from: VertexId, to: VertexId) {
        let adj = &mut self.slots[from.0 as usize].as_mut().expect("live vertex").adj;
        if let Some(i) = adj.iter().position(|(w, _)| *w == to) {
            adj.swap_remove(i);
        }
    }

    fn take_vertex(&mut self, v: VertexId) -> Result<Vec<(VertexId, Bundle)>> {
        let slot = self
            .slots
            .get_mut(v.0 as usize)
            .and_then(Option::take)
            .ok_or(Error::NoSuchVertex(v))?;
        self.live.swap_remove(slot.pos);
        if let Some(&moved) = self.live.get(slot.pos) {
            self.slots[moved.0 as usize].as_mut().expect("live vertex").pos = slot.pos;
        }
        Ok(slot.adj)
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn contains(&self, v: VertexId) -> bool {
        matches!(self.slots.get(v.0 as usize), Some(Some(_)))
    }

    pub fn vertex_count(&self) -> usize {
        self.live.len()
    }

    /// Total number of edges, counted with multiplicity.
    pub fn edge_count(&self) -> u64 {
        self.edge_total
    }

    /// The id the next new vertex will receive.
    pub fn next_id(&self) -> u32 {
        self.next_id
    }

    /// Live vertices in internal order (deterministic, not sorted).
    pub fn vertices(&self) -> &[VertexId] {
        &self.live
    }

    pub fn sorted_vertices(&self) -> Vec<VertexId> {
        let mut vs = self.live.clone();
        vs.sort_unstable();
        vs
    }

    /// Neighbour bundles of `v` in internal order.
    pub fn neighbors(&self, v: VertexId) -> Result<&[(VertexId, Bundle)]> {
        self.slots
            .get(v.0 as usize)
            .and_then(Option::as_ref)
            .map(|s| s.adj.as_slice())
            .ok_or(Error::NoSuchVertex(v))
    }

    /// Degree counted with multiplicity.
    pub fn degree(&self, v: VertexId) -> Result<u64> {
        Ok(self
            .neighbors(v)?
            .iter()
            .map(|(_, b)| u64::from(b.multiplicity()))
            .sum())
    }

    pub fn bundle(&self, u: VertexId, v: VertexId) -> Bundle {
        self.neighbors(u)
            .ok()
            .and_then(|adj| adj.iter().find(|(w, _)| *w == v).map(|(_, b)| *b))
            .unwrap_or_default()
    }

    pub fn multiplicity(&self, u: VertexId, v: VertexId) -> u32 {
        self.bundle(u, v).multiplicity()
    }

    /// Edge bundles as `(u, v, multiplicity)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, u32)> {
        let mut out: Vec<_> = self
            .live
            .iter()
            .flat_map(|&u| {
                self.slots[u.0 as usize]
                    .as_ref()
                    .expect("live vertex")
                    .adj
                    .iter()
                    .filter(move |(v, _)| u < *v)
                    .map(move |&(v, b)| (u, v, b.multiplicity()))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Number of old edges (with multiplicity).
    pub fn old_edge_count(&self) -> u64 {
        self.live
            .iter()
            .flat_map(|&u| self.slots[u.0 as usize].as_ref().expect("live vertex").adj.iter().map(move |e| (u, e)))
            .filter(|(u, (v, _))| u < v)
            .map(|(_, (_, b))| u64::from(b.old))
            .sum()
    }

    /// Mark every current edge as old.
    pub fn tag_all_old(&mut self) {
        for slot in self.slots.iter_mut().flatten() {
            for (_, b) in slot.adj.iter_mut() {
                b.old += b.new;
                b.new = 0;
            }
        }
    }

    /// Replace `v` by two fresh vertices. Every bundle `u-v` of multiplicity
    /// `m` sends `Bin(m, 1/2)` edges to the first offspring and the rest to
    /// the second (one draw per old/new class); `Po(lambda/2)` new edges join
    /// the offspring; a root `v` hands the root to either offspring with
    /// probability 1/2.
    pub fn split_vertex<R: Rng + ?Sized>(
        &mut self,
        v: VertexId,
        lambda: f64,
        rng: &mut R,
    ) -> Result<(VertexId, VertexId)> {
        let adj = self.take_vertex(v)?;
        let v1 = self.add_vertex();
        let v2 = self.add_vertex();
        for (u, b) in adj {
            self.drop_entry(u, v);
            let old1 = rng::fair_binomial(rng, u64::from(b.old)) as u32;
            let new1 = rng::fair_binomial(rng, u64::from(b.new)) as u32;
            let first = Bundle { old: old1, new: new1 };
            let second = Bundle {
                old: b.old - old1,
                new: b.new - new1,
            };
            for (child, part) in [(v1, first), (v2, second)] {
                if part.multiplicity() > 0 {
                    self.bump(child, u, part);
                    self.bump(u, child, part);
                }
            }
        }
        let fresh = rng::poisson(rng, lambda / 2.0) as u32;
        if fresh > 0 {
            let b = Bundle::new_edges(fresh);
            self.bump(v1, v2, b);
            self.bump(v2, v1, b);
            self.edge_total += u64::from(fresh);
        }
        if self.root == v {
            self.root = if rng::coin(rng) { v1 } else { v2 };
        }
        Ok((v1, v2))
    }

    /// Breadth-first order of the component of `start`.
    pub fn component_of(&self, start: VertexId) -> Result<Vec<VertexId>> {
        if !self.contains(start) {
            return Err(Error::NoSuchVertex(start));
        }
        let mut seen = vec![false; self.slots.len()];
        let mut order = vec![start];
        seen[start.0 as usize] = true;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &(w, _) in &self.slots[u.0 as usize].as_ref().expect("live vertex").adj {
                if !seen[w.0 as usize] {
                    seen[w.0 as usize] = true;
                    order.push(w);
                }
            }
        }
        Ok(order)
    }

    /// Induced sub-multigraph on the component of the root. Ids are kept.
    pub fn root_component(&self) -> RootedMultigraph {
        let order = self.component_of(self.root).expect("root is live");
        if order.len() == self.live.len() {
            return self.clone();
        }
        let mut g = RootedMultigraph {
            root: self.root,
            slots: Vec::new(),
            live: Vec::with_capacity(order.len()),
            next_id: 0,
            edge_total: 0,
        };
        for &v in &order {
            g.insert_vertex(v);
            let adj = self.slots[v.0 as usize].as_ref().expect("live vertex").adj.clone();
            g.edge_total += adj.iter().map(|(_, b)| u64::from(b.multiplicity())).sum::<u64>();
            g.slots[v.0 as usize].as_mut().expect("just inserted").adj = adj;
        }
        g.edge_total /= 2;
        g.next_id = self.next_id;
        g
    }

    pub fn is_connected(&self) -> bool {
        self.component_of(self.root).expect("root is live").len() == self.live.len()
    }

    /// True when some vertex has no incident edge. A single-vertex graph is
    /// reported as having no isolated vertex.
    pub fn has_isolated_vertex(&self) -> bool {
        self.live.len() > 1
            && self
                .live
                .iter()
                .any(|v| self.slots[v.0 as usize].as_ref().expect("live vertex").adj.is_empty())
    }

    /// Rename vertices through `map`, which must be injective on the vertex set.
    pub fn relabel<F: Fn(VertexId) -> VertexId>(&self, map: F) -> Result<RootedMultigraph> {
        let vertices: Vec<_> = self.sorted_vertices().into_iter().map(&map).collect();
        let edges = self.edges().into_iter().map(|(u, v, m)| (map(u), map(v), m));
        RootedMultigraph::from_parts(map(self.root), vertices, edges)
    }

    /// Copy with contiguous ids: breadth-first from the root, then any other
    /// vertices in id order. Neighbours are visited in id order.
    pub fn compacted(&self) -> RootedMultigraph {
        let mut ids = vec![u32::MAX; self.slots.len()];
        let mut order = Vec::with_capacity(self.live.len());
        let mut queue = VecDeque::new();
        let assign = |v: VertexId, ids: &mut Vec<u32>, order: &mut Vec<VertexId>| -> bool {
            if ids[v.0 as usize] == u32::MAX {
                ids[v.0 as usize] = order.len() as u32;
                order.push(v);
                true
            } else {
                false
            }
        };
        for start in std::iter::once(self.root).chain(self.sorted_vertices()) {
            if assign(start, &mut ids, &mut order) {
                queue.push_back(start);
            }
            while let Some(u) = queue.pop_front() {
                let mut nbrs: Vec<_> = self.slots[u.0 as usize]
                    .as_ref()
                    .expect("live vertex")
                    .adj
                    .iter()
                    .map(|(w, _)| *w)
                    .collect();
                nbrs.sort_unstable();
                for w in nbrs {
                    if assign(w, &mut ids, &mut order) {
                        queue.push_back(w);
                    }
                }
            }
        }
        self.relabel(|v| VertexId(ids[v.0 as usize]))
            .expect("compaction is a bijection")
    }
}

impl PartialEq for RootedMultigraph {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
            && self.sorted_vertices() == other.sorted_vertices()
            && self.edges() == other.edges()
    }
}

impl Eq for RootedMultigraph {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;
    use rand::Rng;

    fn path3() -> RootedMultigraph {
        RootedMultigraph::from_parts(
            VertexId(0),
            [VertexId(0), VertexId(1), VertexId(2)],
            [(VertexId(0), VertexId(1), 1), (VertexId(1), VertexId(2), 2)],
        )
        .unwrap()
    }

    /// Random graph on `n` vertices, root 0, multiplicities up to `max_m`.
    pub(crate) fn random_graph(n: u32, max_m: u32, rng: &mut impl Rng) -> RootedMultigraph {
        let vs: Vec<_> = (0..n).map(VertexId).collect();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let m = rng.random_range(0..=max_m);
                edges.push((VertexId(u), VertexId(v), m));
            }
        }
        RootedMultigraph::from_parts(VertexId(0), vs, edges).unwrap()
    }

    #[test]
    fn single_vertex() {
        let g = RootedMultigraph::create_single();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert!(g.is_connected());
        assert!(!g.has_isolated_vertex());
        assert_eq!(g.root_component(), g);
    }

    #[test]
    fn predicates_on_small_graphs() {
        let two = RootedMultigraph::from_parts(
            VertexId(0),
            [VertexId(0), VertexId(1)],
            [(VertexId(0), VertexId(1), 1)],
        )
        .unwrap();
        assert!(two.is_connected());
        assert!(!two.has_isolated_vertex());

        let three = RootedMultigraph::from_parts(
            VertexId(0),
            [VertexId(0), VertexId(1), VertexId(2)],
            [(VertexId(0), VertexId(1), 1)],
        )
        .unwrap();
        assert!(!three.is_connected());
        assert!(three.has_isolated_vertex());
    }

    #[test]
    fn root_component_of_disconnected_pair() {
        let g = RootedMultigraph::from_parts(VertexId(3), [VertexId(3), VertexId(5)], []).unwrap();
        let c = g.root_component();
        assert_eq!(c.sorted_vertices(), vec![VertexId(3)]);
        assert_eq!(c.root(), VertexId(3));
    }

    #[test]
    fn loops_are_rejected() {
        let err = RootedMultigraph::from_parts(VertexId(0), [VertexId(0)], [(VertexId(0), VertexId(0), 1)]);
        assert!(matches!(err, Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn split_unknown_vertex() {
        let mut g = RootedMultigraph::create_single();
        let err = g.split_vertex(VertexId(9), 1.0, &mut stream(1)).unwrap_err();
        assert_eq!(err.to_string(), "no such vertex: 9");
    }

    #[test]
    fn split_isolated_root_without_new_edges() {
        // lambda tiny enough that Po(lambda/2) is zero for this seed
        let mut g = RootedMultigraph::create_single();
        let (a, b) = g.split_vertex(VertexId(0), 1e-12, &mut stream(4)).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 0);
        assert!(g.root() == a || g.root() == b);
        assert!(!g.contains(VertexId(0)));
    }

    #[test]
    fn compaction_is_breadth_first() {
        let g = RootedMultigraph::from_parts(
            VertexId(7),
            [VertexId(7), VertexId(2), VertexId(9)],
            [(VertexId(7), VertexId(9), 1), (VertexId(9), VertexId(2), 1)],
        )
        .unwrap();
        let c = g.compacted();
        assert_eq!(c.root(), VertexId(0));
        assert_eq!(c.multiplicity(VertexId(0), VertexId(1)), 1);
        assert_eq!(c.multiplicity(VertexId(1), VertexId(2)), 1);
    }

    #[test]
    fn path_edges_sorted() {
        let g = path3();
        assert_eq!(g.edges(), vec![(VertexId(0), VertexId(1), 1), (VertexId(1), VertexId(2), 2)]);
        assert_eq!(g.degree(VertexId(1)).unwrap(), 3);
    }

    proptest! {
        #[test]
        fn split_conserves_edges(seed in any::<u64>(), n in 1u32..6, pick in 0u32..6) {
            let mut rng = stream(seed);
            let mut g = random_graph(n, 3, &mut rng);
            g.tag_all_old();
            let v = VertexId(pick % n);
            let away: Vec<_> = g.edges().into_iter().filter(|&(a, b, _)| a != v && b != v).collect();
            let at_v = g.degree(v).unwrap();
            let (v1, v2) = g.split_vertex(v, 1.5, &mut rng).unwrap();
            let after_away: Vec<_> = g.edges().into_iter().filter(|&(a, b, _)| ![v1, v2].contains(&a) && ![v1, v2].contains(&b)).collect();
            prop_assert_eq!(away, after_away);
            let between = u64::from(g.multiplicity(v1, v2));
            let rerouted = g.degree(v1).unwrap() + g.degree(v2).unwrap() - 2 * between;
            prop_assert_eq!(rerouted, at_v);
            // the only new edges are the ones between the offspring
            prop_assert_eq!(u64::from(g.bundle(v1, v2).new), between);
            prop_assert_eq!(g.old_edge_count() + between, g.edge_count());
            for (a, b, _) in g.edges() { prop_assert_ne!(a, b); }
        }

        #[test]
        fn root_component_is_connected_and_idempotent(seed in any::<u64>(), n in 1u32..7) {
            let mut rng = stream(seed);
            let g = random_graph(n, 1, &mut rng);
            // thin the graph so that disconnected cases are common
            let edges: Vec<_> = g.edges().into_iter().filter(|_| rng.random_bool(0.4)).collect();
            let g = RootedMultigraph::from_parts(g.root(), g.sorted_vertices(), edges).unwrap();
            let c = g.root_component();
            prop_assert!(c.is_connected());
            prop_assert!(c.contains(g.root()));
            prop_assert_eq!(c.root_component(), c.clone());
        }
    }
}
