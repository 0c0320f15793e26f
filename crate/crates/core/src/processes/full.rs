use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::Rng;

use crate::error::{Error, Result};
use crate::genealogy::BinaryTree;
use crate::multigraph::{RootedMultigraph, VertexId};
use crate::rng;

pub const DEFAULT_MAX_VERTICES: usize = 10_000_000;

#[derive(Clone, Debug)]
pub struct ProcessOptions {
    pub max_vertices: usize,
    /// Keep a log of every split so the genealogy can be rebuilt.
    pub record_genealogy: bool,
    /// Mark the edges of the initial graph as old.
    pub tag_old_edges: bool,
}

impl Default for ProcessOptions {
    fn default() -> Self {
        ProcessOptions {
            max_vertices: DEFAULT_MAX_VERTICES,
            record_genealogy: false,
            tag_old_edges: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitRecord {
    pub time: f64,
    pub parent: VertexId,
    pub children: [VertexId; 2],
}

/// Pending split. Ordered so that `BinaryHeap` pops the earliest time first,
/// ties going to the smaller vertex id.
#[derive(Clone, Copy, Debug)]
struct Event {
    time: f64,
    vertex: VertexId,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// State of the full process: the graph, the clock and one pending split
/// time per living vertex.
#[derive(Clone, Debug)]
pub struct FullProcessState {
    graph: RootedMultigraph,
    clock: f64,
    lambda: f64,
    queue: BinaryHeap<Event>,
    genealogy: Option<Vec<SplitRecord>>,
    max_vertices: usize,
}

struct CapHit;

impl FullProcessState {
    pub fn new<R: Rng + ?Sized>(
        mut init: RootedMultigraph,
        lambda: f64,
        opts: &ProcessOptions,
        rng: &mut R,
    ) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        if opts.tag_old_edges {
            init.tag_all_old();
        }
        let queue = init
            .sorted_vertices()
            .into_iter()
            .map(|vertex| Event {
                time: rng::exp1(rng),
                vertex,
            })
            .collect();
        Ok(FullProcessState {
            graph: init,
            clock: 0.0,
            lambda,
            queue,
            genealogy: opts.record_genealogy.then(Vec::new),
            max_vertices: opts.max_vertices,
        })
    }

    pub fn graph(&self) -> &RootedMultigraph {
        &self.graph
    }

    pub fn into_graph(self) -> RootedMultigraph {
        self.graph
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn next_event_time(&self) -> Option<f64> {
        self.queue.peek().map(|e| e.time)
    }

    pub fn split_log(&self) -> Option<&[SplitRecord]> {
        self.genealogy.as_deref()
    }

    /// Pending split times, earliest first.
    pub fn pending(&self) -> Vec<(f64, VertexId)> {
        let mut v: Vec<_> = self.queue.iter().map(|e| (e.time, e.vertex)).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        v
    }

    /// Exactly one pending split per living vertex, all later than the clock.
    pub fn check_invariants(&self) -> bool {
        let mut seen = HashMap::new();
        for e in &self.queue {
            if e.time <= self.clock || !self.graph.contains(e.vertex) {
                return false;
            }
            *seen.entry(e.vertex).or_insert(0) += 1;
        }
        seen.len() == self.graph.vertex_count() && seen.values().all(|&c| c == 1)
    }

    /// Apply the next split, whatever its time.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<SplitRecord> {
        let event = self.queue.pop()?;
        self.clock = event.time;
        let (a, b) = self
            .graph
            .split_vertex(event.vertex, self.lambda, rng)
            .expect("queued vertices are alive");
        for child in [a, b] {
            self.queue.push(Event {
                time: event.time + rng::exp1(rng),
                vertex: child,
            });
        }
        let record = SplitRecord {
            time: event.time,
            parent: event.vertex,
            children: [a, b],
        };
        if let Some(log) = self.genealogy.as_mut() {
            log.push(record);
        }
        Some(record)
    }

    fn advance<R: Rng + ?Sized>(
        &mut self,
        t_end: f64,
        pruning: Option<&mut usize>,
        rng: &mut R,
    ) -> std::result::Result<(), CapHit> {
        let mut pruning = pruning;
        while self.next_event_time().is_some_and(|t| t <= t_end) {
            self.step(rng);
            if self.graph.vertex_count() > self.max_vertices {
                return Err(CapHit);
            }
            if let Some(kept) = pruning.as_deref_mut() {
                if self.graph.vertex_count() > 2 * *kept {
                    self.prune();
                    *kept = self.graph.vertex_count();
                }
            }
        }
        self.clock = self.clock.max(t_end);
        Ok(())
    }

    /// Drop everything outside the root component, with its pending splits.
    pub fn prune(&mut self) {
        self.graph = self.graph.root_component();
        let graph = &self.graph;
        self.queue.retain(|e| graph.contains(e.vertex));
    }

    /// Genealogy of a run started from a single vertex, as a binary tree
    /// together with the vertex id of every tree node.
    pub fn genealogy_tree(&self) -> Option<(BinaryTree, Vec<VertexId>)> {
        let log = self.genealogy.as_ref()?;
        let first = log.first().map_or(self.graph.root(), |r| r.parent);
        let mut ids = vec![first];
        let mut index = HashMap::from([(first, 0usize)]);
        let mut children = vec![None];
        for r in log {
            let p = *index.get(&r.parent)?;
            let a = ids.len();
            for (k, c) in r.children.iter().enumerate() {
                index.insert(*c, a + k);
                ids.push(*c);
                children.push(None);
            }
            children[p] = Some([a, a + 1]);
        }
        let tree = BinaryTree::from_children(&children).ok()?;
        Some((tree, ids))
    }
}

/// Run the full process from `init` up to time `t_end`.
///
/// Exceeding `opts.max_vertices` returns [`Error::VertexCap`] carrying the
/// state reached so far.
pub fn run_full_process<R: Rng + ?Sized>(
    init: RootedMultigraph,
    lambda: f64,
    t_end: f64,
    rng: &mut R,
    opts: &ProcessOptions,
) -> Result<FullProcessState> {
    check_time(t_end)?;
    let mut state = FullProcessState::new(init, lambda, opts, rng)?;
    match state.advance(t_end, None, rng) {
        Ok(()) => Ok(state),
        Err(CapHit) => Err(Error::VertexCap {
            cap: opts.max_vertices,
            time: state.clock,
            state: Box::new(state),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pruning {
    /// Drop non-root components whenever the graph is more than twice the
    /// size of the root component last kept, and at the end.
    Lazy,
    /// Simulate everything and take the root component at the end.
    EndOnly,
}

/// Cluster process: the root component of the full process at `t_end`.
pub fn run_cluster_process<R: Rng + ?Sized>(
    init: RootedMultigraph,
    lambda: f64,
    t_end: f64,
    rng: &mut R,
    opts: &ProcessOptions,
) -> Result<RootedMultigraph> {
    run_cluster_process_with(init, lambda, t_end, rng, opts, Pruning::Lazy)
}

pub fn run_cluster_process_with<R: Rng + ?Sized>(
    init: RootedMultigraph,
    lambda: f64,
    t_end: f64,
    rng: &mut R,
    opts: &ProcessOptions,
    pruning: Pruning,
) -> Result<RootedMultigraph> {
    check_time(t_end)?;
    if !init.is_connected() {
        return Err(Error::Domain("cluster process needs a connected start".into()));
    }
    let mut state = FullProcessState::new(init, lambda, opts, rng)?;
    let mut kept = state.graph.vertex_count();
    let outcome = match pruning {
        Pruning::Lazy => state.advance(t_end, Some(&mut kept), rng),
        Pruning::EndOnly => state.advance(t_end, None, rng),
    };
    match outcome {
        Ok(()) => Ok(state.graph.root_component()),
        Err(CapHit) => Err(Error::VertexCap {
            cap: opts.max_vertices,
            time: state.clock,
            state: Box::new(state),
        }),
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and non-negative, got {t}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn zero_time_leaves_graph_unchanged() {
        let g = RootedMultigraph::from_parts(
            VertexId(0),
            [VertexId(0), VertexId(1)],
            [(VertexId(0), VertexId(1), 2)],
        )
        .unwrap();
        let s = run_full_process(g.clone(), 1.0, 0.0, &mut stream(1), &ProcessOptions::default()).unwrap();
        assert_eq!(s.graph(), &g);
        let c = run_cluster_process(g.clone(), 1.0, 0.0, &mut stream(1), &ProcessOptions::default()).unwrap();
        assert_eq!(c, g);
    }

    #[test]
    fn queue_invariant_holds_along_a_run() {
        let mut rng = stream(8);
        let opts = ProcessOptions::default();
        let mut s = FullProcessState::new(RootedMultigraph::create_single(), 2.0, &opts, &mut rng).unwrap();
        assert!(s.check_invariants());
        for _ in 0..200 {
            s.step(&mut rng);
            assert!(s.check_invariants());
        }
        s.prune();
        assert!(s.check_invariants());
    }

    #[test]
    fn vertex_cap_reports_partial_state() {
        let opts = ProcessOptions {
            max_vertices: 50,
            ..ProcessOptions::default()
        };
        match run_full_process(RootedMultigraph::create_single(), 1.0, 30.0, &mut stream(2), &opts) {
            Err(Error::VertexCap { cap, state, .. }) => {
                assert_eq!(cap, 50);
                assert_eq!(state.graph().vertex_count(), 51);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn same_seed_same_run() {
        let run = |seed| {
            run_full_process(RootedMultigraph::create_single(), 1.5, 3.0, &mut stream(seed), &ProcessOptions::default())
                .unwrap()
                .into_graph()
        };
        assert_eq!(run(5), run(5));
    }

    #[test]
    fn genealogy_leaves_are_current_vertices() {
        let opts = ProcessOptions {
            record_genealogy: true,
            ..ProcessOptions::default()
        };
        let s = run_full_process(RootedMultigraph::create_single(), 1.0, 2.5, &mut stream(4), &opts).unwrap();
        let (tree, ids) = s.genealogy_tree().unwrap();
        let mut leaves: Vec<_> = tree.leaves().iter().map(|&n| ids[n]).collect();
        leaves.sort();
        assert_eq!(leaves, s.graph().sorted_vertices());
    }

    #[test]
    fn cluster_is_connected_and_rooted() {
        let mut rng = stream(12);
        for _ in 0..200 {
            let c = run_cluster_process(RootedMultigraph::create_single(), 1.0, 3.0, &mut rng, &ProcessOptions::default())
                .unwrap();
            assert!(c.is_connected());
            assert!(c.contains(c.root()));
        }
    }

    #[test]
    fn disconnected_start_is_rejected() {
        let g = RootedMultigraph::from_parts(VertexId(0), [VertexId(0), VertexId(1)], []).unwrap();
        assert!(run_cluster_process(g, 1.0, 1.0, &mut stream(1), &ProcessOptions::default()).is_err());
    }
}
