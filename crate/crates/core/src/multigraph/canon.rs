//! Canonical codes for small rooted multigraphs.
//!
//! Vertices are first coloured by iterated refinement (root alone in colour
//! 0, then colour plus the multiset of neighbour colours and multiplicities);
//! the code is the lexicographically smallest upper-triangle multiplicity
//! matrix over all orderings that list colour classes in colour order. The
//! colours are isomorphism invariant, so the minimum is too, and the root
//! always sits at position 0.

use std::fmt;

use super::RootedMultigraph;

pub const CANON_MAX_VERTICES: usize = 8;
pub const CANON_MAX_MULTIPLICITY: u32 = 15;

const OVERFLOW_MARKER: u8 = 0xff;

/// Isomorphism-class key. `overflow` marks graphs beyond the exact range,
/// whose `code` is only a coarse signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    pub code: Vec<u8>,
    pub overflow: bool,
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.overflow {
            write!(f, "x")?;
        }
        for b in &self.code {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

pub fn canonical_form(g: &RootedMultigraph) -> CanonicalCode {
    let n = g.vertex_count();
    let order = g.sorted_vertices();
    let mut index = std::collections::HashMap::with_capacity(n);
    for (i, v) in order.iter().enumerate() {
        index.insert(*v, i);
    }
    let mut adj = vec![0u32; n * n];
    let mut too_heavy = false;
    for (u, v, m) in g.edges() {
        let (a, b) = (index[&u], index[&v]);
        adj[a * n + b] = m;
        adj[b * n + a] = m;
        too_heavy |= m > CANON_MAX_MULTIPLICITY;
    }
    if n > CANON_MAX_VERTICES || too_heavy {
        return coarse_signature(g);
    }
    let root = index[&g.root()];
    let colors = refine(n, &adj, root);

    // positions grouped by colour, colour classes in increasing colour order
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut by_color: Vec<usize> = (0..n).collect();
    by_color.sort_by_key(|&v| colors[v]);
    for v in by_color {
        match cells.last_mut() {
            Some(cell) if colors[cell[0]] == colors[v] => cell.push(v),
            _ => cells.push(vec![v]),
        }
    }

    let mut best: Option<Vec<u8>> = None;
    let mut current: Vec<usize> = Vec::with_capacity(n);
    search(&cells, 0, &mut current, &adj, n, &mut best);
    let mut code = Vec::with_capacity(1 + n * (n - 1) / 2);
    code.push(n as u8);
    code.extend(best.expect("at least one ordering"));
    CanonicalCode {
        code,
        overflow: false,
    }
}

fn refine(n: usize, adj: &[u32], root: usize) -> Vec<usize> {
    let mut colors: Vec<usize> = (0..n).map(|v| usize::from(v != root)).collect();
    let mut classes = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
    loop {
        let sigs: Vec<(usize, Vec<(usize, u32)>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<(usize, u32)> = (0..n)
                    .filter(|&w| adj[v * n + w] > 0)
                    .map(|w| (colors[w], adj[v * n + w]))
                    .collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| distinct.binary_search(s).expect("present"))
            .collect();
        colors = next;
        if distinct.len() == classes {
            return colors;
        }
        classes = distinct.len();
    }
}

fn search(
    cells: &[Vec<usize>],
    depth: usize,
    current: &mut Vec<usize>,
    adj: &[u32],
    n: usize,
    best: &mut Option<Vec<u8>>,
) {
    if depth == cells.len() {
        let enc = encode(current, adj, n);
        if best.as_ref().is_none_or(|b| enc < *b) {
            *best = Some(enc);
        }
        return;
    }
    let mut cell = cells[depth].clone();
    permute(&mut cell, 0, &mut |perm| {
        let base = current.len();
        current.extend_from_slice(perm);
        search(cells, depth + 1, current, adj, n, best);
        current.truncate(base);
    });
}

fn permute(items: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

fn encode(order: &[usize], adj: &[u32], n: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(adj[order[i] * n + order[j]] as u8);
        }
    }
    out
}

fn coarse_signature(g: &RootedMultigraph) -> CanonicalCode {
    let mut degrees: Vec<u64> = g
        .vertices()
        .iter()
        .map(|&v| g.degree(v).expect("live vertex"))
        .collect();
    degrees.sort_unstable();
    let mut code = vec![OVERFLOW_MARKER];
    code.extend((g.vertex_count() as u64).to_be_bytes());
    code.extend(g.degree(g.root()).expect("root is live").to_be_bytes());
    for d in degrees {
        code.extend(d.to_be_bytes());
    }
    CanonicalCode {
        code,
        overflow: true,
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::VertexId;
    use crate::rng::stream;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn graph(root: u32, n: u32, edges: &[(u32, u32, u32)]) -> RootedMultigraph {
        RootedMultigraph::from_parts(
            VertexId(root),
            (0..n).map(VertexId),
            edges.iter().map(|&(u, v, m)| (VertexId(u), VertexId(v), m)),
        )
        .unwrap()
    }

    #[test]
    fn single_vertex_is_deterministic() {
        let a = canonical_form(&RootedMultigraph::create_single());
        let b = canonical_form(&RootedMultigraph::create_single());
        assert_eq!(a, b);
        assert!(!a.overflow);
    }

    #[test]
    fn path_and_star_differ() {
        let path = graph(0, 3, &[(0, 1, 1), (1, 2, 1)]);
        let star = graph(0, 3, &[(0, 1, 1), (0, 2, 1)]);
        assert_ne!(canonical_form(&path), canonical_form(&star));
    }

    #[test]
    fn root_position_matters() {
        let end = graph(0, 3, &[(0, 1, 1), (1, 2, 1)]);
        let middle = graph(1, 3, &[(0, 1, 1), (1, 2, 1)]);
        assert_ne!(canonical_form(&end), canonical_form(&middle));
    }

    #[test]
    fn large_graphs_overflow() {
        let edges: Vec<_> = (0..9).map(|i| (i, i + 1, 1)).collect();
        let g = graph(0, 10, &edges);
        assert!(canonical_form(&g).overflow);
        let heavy = graph(0, 2, &[(0, 1, 16)]);
        assert!(canonical_form(&heavy).overflow);
    }

    proptest! {
        #[test]
        fn invariant_under_relabeling(seed in any::<u64>(), n in 1u32..=8) {
            let mut rng = stream(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(0.35) {
                        edges.push((u, v, rng.random_range(1..=3)));
                    }
                }
            }
            let root = rng.random_range(0..n);
            let g = graph(root, n, &edges);
            let mut perm: Vec<u32> = (0..n).map(|i| i * 3 + 11).collect();
            perm.shuffle(&mut rng);
            let h = g.relabel(|v| VertexId(perm[v.0 as usize])).unwrap();
            prop_assert_eq!(canonical_form(&g), canonical_form(&h));
        }
    }
}
