//! Connectivity of the full process from one vertex as t passes lambda.

use splitgraph::processes::{run_full_process, ProcessOptions};
use splitgraph::rng::stream;
use splitgraph::RootedMultigraph;

fn main() -> splitgraph::Result<()> {
    let lambda = 6.0;
    let runs = 500;
    let mut rng = stream(4);
    let opts = ProcessOptions::default();
    println!("t/lambda  connected  isolated");
    for frac in [0.3, 0.6, 0.9, 1.2] {
        let (mut connected, mut isolated) = (0, 0);
        for _ in 0..runs {
            let s = run_full_process(RootedMultigraph::create_single(), lambda, frac * lambda, &mut rng, &opts)?;
            connected += usize::from(s.graph().is_connected());
            isolated += usize::from(s.graph().has_isolated_vertex());
        }
        println!("{frac:>8}  {:>9.3}  {:>8.3}", connected as f64 / runs as f64, isolated as f64 / runs as f64);
    }
    Ok(())
}
