//! Genealogical trees: Yule sampling, forward walks to a leaf, and the
//! crossing rate of an edge, computed by the product formula and by summing
//! 2^(1 - d) over pairs separated by the edge.

use splitgraph::genealogy::{canopy_distance, sample_yule_tree, BinaryTree, TreeEdge};
use splitgraph::rng::stream;

fn main() -> splitgraph::Result<()> {
    let mut rng = stream(2);
    let tree = sample_yule_tree(2.0, &mut rng);
    println!("Yule tree at t=2 with {} leaves: {}", tree.leaf_count(), tree.to_newick());

    let mut hits = vec![0usize; tree.node_count()];
    for _ in 0..10_000 {
        hits[tree.forward_walk_leaf(&mut rng)] += 1;
    }
    for &leaf in tree.leaves() {
        let depth = tree.depth(leaf);
        println!(
            "  leaf {leaf}: depth {depth}, walk frequency {:.4} vs 2^-depth = {:.4}",
            hits[leaf] as f64 / 1e4,
            0.5f64.powi(depth as i32)
        );
    }

    for child in 1..tree.node_count().min(6) {
        let z = tree.crossing_rate(TreeEdge { child })?;
        println!("  crossing rate above node {child}: {z:.6}");
    }

    let complete = BinaryTree::complete(4);
    println!("complete tree of height 4: {} leaves", complete.leaf_count());
    println!("canopy distance between leaves 0 and 5: {}", canopy_distance(0, 5));
    Ok(())
}
