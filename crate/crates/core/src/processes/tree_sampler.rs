use rand::Rng;

use crate::error::{Error, Result};
use crate::genealogy::sample_yule_tree;
use crate::multigraph::{RootedMultigraph, VertexId};
use crate::rng;

/// Root cluster at time `t` built from the genealogy: a Yule tree of age
/// `t`, the root lineage chosen by a forward walk, and independent
/// `Po(2^(1-d) lambda)` bundles between every pair of leaves.
///
/// Leaf `i` in the tree's leaf order becomes vertex `i`.
pub fn sample_gtcirc_via_tree<R: Rng + ?Sized>(lambda: f64, t: f64, rng: &mut R, max_vertices: usize) -> Result<RootedMultigraph> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and non-negative, got {t}")));
    }
    let tree = sample_yule_tree(t, rng);
    let leaves = tree.leaves();
    if leaves.len() > max_vertices {
        return Err(Error::PopulationCap {
            cap: max_vertices,
            time: t,
        });
    }
    let root_leaf = tree.forward_walk_leaf(rng);
    let root = leaves.iter().position(|&l| l == root_leaf).expect("walk ends at a leaf");
    let mut edges = Vec::new();
    for i in 0..leaves.len() {
        for j in i + 1..leaves.len() {
            let d = tree.distance(leaves[i], leaves[j])?;
            let m = rng::poisson(rng, lambda * 2f64.powi(1 - d as i32));
            if m > 0 {
                edges.push((VertexId(i as u32), VertexId(j as u32), m as u32));
            }
        }
    }
    let vertices = (0..leaves.len() as u32).map(VertexId);
    let g = RootedMultigraph::from_parts(VertexId(root as u32), vertices, edges)?;
    Ok(g.root_component())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn zero_time_is_single_vertex() {
        let g = sample_gtcirc_via_tree(1.0, 0.0, &mut stream(1), 100).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn output_is_connected() {
        let mut rng = stream(2);
        for _ in 0..300 {
            assert!(sample_gtcirc_via_tree(1.5, 2.0, &mut rng, 10_000).unwrap().is_connected());
        }
    }
}
