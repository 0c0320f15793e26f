//! The full process from one vertex: its size is geometric with mean e^t,
//! and the split log rebuilds the genealogy.

use splitgraph::processes::{run_full_process, ProcessOptions};
use splitgraph::rng::stream;
use splitgraph::stats::mean_ci;
use splitgraph::RootedMultigraph;

fn main() -> splitgraph::Result<()> {
    let mut rng = stream(5);
    let opts = ProcessOptions::default();
    for t in [0.5, 1.0, 2.0] {
        let sizes: Vec<f64> = (0..20_000)
            .map(|_| run_full_process(RootedMultigraph::create_single(), 1.0, t, &mut rng, &opts).map(|s| s.graph().vertex_count() as f64))
            .collect::<splitgraph::Result<_>>()?;
        let single = sizes.iter().filter(|&&s| s == 1.0).count() as f64 / sizes.len() as f64;
        let ci = mean_ci(&sizes)?;
        println!(
            "t={t}: P(one vertex)={single:.4} vs {:.4}, mean={:.3}±{:.3} vs {:.3}",
            (-t).exp(),
            ci.mean,
            1.96 * ci.stderr,
            t.exp()
        );
    }

    let opts = ProcessOptions {
        record_genealogy: true,
        ..ProcessOptions::default()
    };
    let state = run_full_process(RootedMultigraph::create_single(), 1.0, 1.5, &mut rng, &opts)?;
    if let Some((tree, ids)) = state.genealogy_tree() {
        let depths: Vec<String> = tree.leaves().iter().map(|&l| format!("{}@{}", ids[l], tree.depth(l))).collect();
        println!("genealogy of one run: {} splits, vertex@depth {}", tree.node_count() / 2, depths.join(" "));
    }
    println!("graph: {:?}", state.graph().edges());
    Ok(())
}
