//! Exact samplers for the invariant graph `M(lambda)` on the spine tree and
//! for the synchronous graph `G(lambda)` on the canopy tree.
//!
//! Both graphs are the root component of the Poisson edge model on an
//! infinite tree, with `Po(2^(1-d(x,y)) lambda)` edges between leaves `x`,
//! `y`. The sampler reveals the spine one edge at a time. An edge crossing
//! the cut `v_n v_(n+1)` whose far end is still unknown is a stub; at `v_n`
//! each stub enters `T_n` with probability 1/2 and otherwise moves on, and
//! the leaves of `T_n` emit `Po(lambda/2)` fresh stubs in total. Once no stub
//! is left, no edge crosses the current cut and the component of `v_0` is
//! decided by the revealed part.
//!
//! Subtrees are revealed lazily: stub origins and endpoints are found by
//! forward walks, and edges inside a subtree are explored only from vertices
//! already known to be in the component.

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genealogy::{Place, SpineKind, SpineState};
use crate::multigraph::{RootedMultigraph, VertexId};
use crate::processes::{run_cluster_process, ProcessOptions};
use crate::rng;
use crate::stats::wilson_ci;

pub const DEFAULT_MAX_SPINE: usize = 10_000;
pub const DEFAULT_MAX_REVEALED: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerCaps {
    pub max_spine: usize,
    pub max_revealed: usize,
}

impl Default for SamplerCaps {
    fn default() -> Self {
        SamplerCaps {
            max_spine: DEFAULT_MAX_SPINE,
            max_revealed: DEFAULT_MAX_REVEALED,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SamplerDiagnostics {
    /// Number of spine edges revealed before the stubs ran out.
    pub spine_length: usize,
    /// Leaves of the spine tree revealed, `v_0` included.
    pub revealed_leaves: usize,
    /// Stub count after step 0, 1, ..., `spine_length`.
    pub stub_trajectory: Vec<u64>,
    /// Fresh stubs emitted by the leaves of `T_1, T_2, ...`.
    pub fresh_stubs: Vec<u64>,
    pub component_size: usize,
}

/// A crossing edge whose far endpoint lies beyond the current cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PendingStub {
    pub origin: Place,
    /// The walk towards the far endpoint currently sits at `v_position`.
    pub position: usize,
}

/// Working state of one sampler run.
#[derive(Clone, Debug)]
pub struct RevealState {
    spine: SpineState,
    stubs: Vec<PendingStub>,
    crossing: Vec<(Place, Place)>,
    diagnostics: SamplerDiagnostics,
    lambda: f64,
}

impl RevealState {
    /// Step 0: reveal `v_0` and its `Po(lambda)` edges to the right.
    pub fn start<R: Rng + ?Sized>(spine: SpineState, lambda: f64, rng: &mut R) -> Self {
        let count = rng::poisson(rng, lambda);
        let stubs = (0..count)
            .map(|_| PendingStub {
                origin: Place::Origin,
                position: 1,
            })
            .collect();
        RevealState {
            spine,
            stubs,
            crossing: Vec::new(),
            diagnostics: SamplerDiagnostics {
                stub_trajectory: vec![count],
                ..SamplerDiagnostics::default()
            },
            lambda,
        }
    }

    pub fn spine(&self) -> &SpineState {
        &self.spine
    }

    pub fn stubs(&self) -> &[PendingStub] {
        &self.stubs
    }

    pub fn diagnostics(&self) -> &SamplerDiagnostics {
        &self.diagnostics
    }

    pub fn is_finished(&self) -> bool {
        self.stubs.is_empty()
    }

    /// Reveal the next spine edge and carry every stub across `v_n`.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let w = self.spine.extend_spine(rng);
        let n = self.spine.len();
        let forest = self.spine.forest_mut();
        let mut kept = Vec::with_capacity(self.stubs.len());
        for stub in self.stubs.drain(..) {
            if rng::coin(rng) {
                let end = forest.forward_walk(w, rng);
                self.crossing.push((stub.origin, Place::Node(end)));
            } else {
                kept.push(PendingStub {
                    position: n + 1,
                    ..stub
                });
            }
        }
        let fresh = rng::poisson(rng, self.lambda / 2.0);
        for _ in 0..fresh {
            let origin = forest.forward_walk(w, rng);
            kept.push(PendingStub {
                origin: Place::Node(origin),
                position: n + 1,
            });
        }
        self.stubs = kept;
        self.diagnostics.spine_length = n;
        self.diagnostics.fresh_stubs.push(fresh);
        self.diagnostics.stub_trajectory.push(self.stubs.len() as u64);
        self.diagnostics.revealed_leaves = self.spine.forest().revealed_leaves() + 1;
    }

    fn check_caps(&self, caps: &SamplerCaps) -> Result<()> {
        let reason = if self.spine.len() > caps.max_spine {
            format!("spine longer than {}", caps.max_spine)
        } else if self.diagnostics.revealed_leaves > caps.max_revealed {
            format!("more than {} revealed leaves", caps.max_revealed)
        } else {
            return Ok(());
        };
        Err(Error::SamplerCap {
            reason,
            diagnostics: Box::new(self.diagnostics.clone()),
        })
    }

    /// Explore the component of `v_0` once the stubs have run out; vertices
    /// are numbered in discovery order, `v_0` first.
    pub fn finish<R: Rng + ?Sized>(mut self, caps: &SamplerCaps, rng: &mut R) -> Result<(RootedMultigraph, SamplerDiagnostics)> {
        assert!(self.is_finished(), "stubs still pending");
        let mut adjacency: HashMap<Place, Vec<Place>> = HashMap::new();
        for &(a, b) in &self.crossing {
            adjacency.entry(a).or_default().push(b);
            adjacency.entry(b).or_default().push(a);
        }
        let mut id: HashMap<Place, u32> = HashMap::from([(Place::Origin, 0)]);
        let mut processed = vec![false];
        let mut queue = VecDeque::from([Place::Origin]);
        let mut edges: HashMap<(u32, u32), u32> = HashMap::new();
        let mut add_edge = |a: u32, b: u32| {
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        };
        while let Some(x) = queue.pop_front() {
            let ix = id[&x];
            for &y in adjacency.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                let iy = discover(&mut id, &mut processed, &mut queue, y);
                if !processed[iy as usize] {
                    add_edge(ix, iy);
                }
            }
            if let Place::Node(leaf) = x {
                let proposals = rng::poisson(rng, self.lambda);
                for _ in 0..proposals {
                    let Some(y) = self.spine.forest_mut().walk_within(leaf, rng) else {
                        continue;
                    };
                    let iy = discover(&mut id, &mut processed, &mut queue, Place::Node(y));
                    if !processed[iy as usize] {
                        add_edge(ix, iy);
                    }
                }
                self.diagnostics.revealed_leaves = self.spine.forest().revealed_leaves() + 1;
                self.check_caps(caps)?;
            }
            processed[ix as usize] = true;
        }
        let n = id.len() as u32;
        let mut edges: Vec<_> = edges.into_iter().map(|((a, b), m)| (VertexId(a), VertexId(b), m)).collect();
        edges.sort_unstable();
        let g = RootedMultigraph::from_parts(VertexId(0), (0..n).map(VertexId), edges)?;
        self.diagnostics.component_size = n as usize;
        Ok((g, self.diagnostics))
    }
}

fn discover(id: &mut HashMap<Place, u32>, processed: &mut Vec<bool>, queue: &mut VecDeque<Place>, p: Place) -> u32 {
    let next = id.len() as u32;
    *id.entry(p).or_insert_with(|| {
        processed.push(false);
        queue.push_back(p);
        next
    })
}

fn run<R: Rng + ?Sized>(spine: SpineState, lambda: f64, rng: &mut R, caps: &SamplerCaps) -> Result<(RootedMultigraph, SamplerDiagnostics)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let mut state = RevealState::start(spine, lambda, rng);
    while !state.is_finished() {
        state.step(rng);
        state.check_caps(caps)?;
    }
    state.finish(caps, rng)
}

/// Exact sample of `M(lambda)`, vertices numbered breadth-first from the root 0.
pub fn sample_m_lambda<R: Rng + ?Sized>(lambda: f64, rng: &mut R, caps: &SamplerCaps) -> Result<(RootedMultigraph, SamplerDiagnostics)> {
    run(SpineState::new(SpineKind::Yule), lambda, rng, caps)
}

/// `M(lambda)` sampled on a spine whose first labels are the gaps of a
/// rate-1 Poisson process on `[0, t]`, the last gap being added to the first
/// free label.
pub fn sample_m_lambda_with_prefix<R: Rng + ?Sized>(
    lambda: f64,
    t: f64,
    rng: &mut R,
    caps: &SamplerCaps,
) -> Result<(RootedMultigraph, SamplerDiagnostics)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("prefix time must be positive, got {t}")));
    }
    let (prefix, shift) = prefix_labels(t, rng);
    run(SpineState::with_prefix(prefix, shift), lambda, rng, caps)
}

/// Forced labels `(t - t_1, t_1 - t_2, ..., t_(k-1) - t_k)` for `k ~ Po(t)`
/// points `t_1 >= ... >= t_k` uniform on `[0, t]`, and the shift `t_k` (or `t`
/// when `k = 0`).
pub fn prefix_labels<R: Rng + ?Sized>(t: f64, rng: &mut R) -> (Vec<f64>, f64) {
    let k = rng::poisson(rng, t);
    let mut points: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * t).collect();
    points.sort_by(|a, b| b.total_cmp(a));
    let mut labels = Vec::with_capacity(points.len());
    let mut prev = t;
    for &p in &points {
        labels.push(prev - p);
        prev = p;
    }
    (labels, prev)
}

/// Exact sample of the synchronous graph `G(lambda)` on the canopy tree.
pub fn sample_g_lambda<R: Rng + ?Sized>(lambda: f64, rng: &mut R, caps: &SamplerCaps) -> Result<(RootedMultigraph, SamplerDiagnostics)> {
    run(SpineState::new(SpineKind::Canopy), lambda, rng, caps)
}

/// Run the cluster process for time `t` from `m`.
pub fn evolve<R: Rng + ?Sized>(m: RootedMultigraph, lambda: f64, t: f64, rng: &mut R) -> Result<RootedMultigraph> {
    run_cluster_process(m, lambda, t, rng, &ProcessOptions::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitModel {
    M,
    G,
}

impl LimitModel {
    pub fn sample<R: Rng + ?Sized>(self, lambda: f64, rng: &mut R, caps: &SamplerCaps) -> Result<(RootedMultigraph, SamplerDiagnostics)> {
        match self {
            LimitModel::M => sample_m_lambda(lambda, rng, caps),
            LimitModel::G => sample_g_lambda(lambda, rng, caps),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DoubleEdgeEstimate {
    /// Samples with root degree exactly 2.
    pub hits: usize,
    /// Hits whose two root edges share their other endpoint.
    pub doubles: usize,
    pub draws: usize,
    pub frequency: f64,
    pub stderr: f64,
    /// Wilson interval at `z = 3`.
    pub ci: (f64, f64),
}

/// Whether the root has degree 2 and, if so, whether both edges go to the same
/// neighbour.
pub fn root_double_edge(g: &RootedMultigraph) -> Option<bool> {
    let root = g.root();
    (g.degree(root).ok()? == 2).then(|| g.neighbors(root).map(|n| n.len() == 1).unwrap_or(false))
}

/// Sample until `n` graphs have root degree 2 and report how often the two
/// root edges are parallel. Fails after `budget` draws.
pub fn double_edge_stat<R: Rng + ?Sized>(
    model: LimitModel,
    lambda: f64,
    n: usize,
    budget: usize,
    rng: &mut R,
    caps: &SamplerCaps,
) -> Result<DoubleEdgeEstimate> {
    let (mut hits, mut doubles, mut draws) = (0, 0, 0);
    while hits < n {
        if draws == budget {
            return Err(Error::BudgetExhausted { budget, hits });
        }
        draws += 1;
        let (g, _) = model.sample(lambda, rng, caps)?;
        if let Some(double) = root_double_edge(&g) {
            hits += 1;
            doubles += usize::from(double);
        }
    }
    Ok(double_edge_summary(hits, doubles, draws))
}

pub fn double_edge_summary(hits: usize, doubles: usize, draws: usize) -> DoubleEdgeEstimate {
    let p = doubles as f64 / hits.max(1) as f64;
    DoubleEdgeEstimate {
        hits,
        doubles,
        draws,
        frequency: p,
        stderr: (p * (1.0 - p) / hits.max(1) as f64).sqrt(),
        ci: wilson_ci(doubles as u64, hits as u64, 3.0).unwrap_or((0.0, 1.0)),
    }
}
