//! How often are the two root edges parallel, given root degree 2?
//! G(lambda) sits at 2/7; M(lambda) lands well below 1/4.

use splitgraph::limit_sampler::{double_edge_stat, LimitModel, SamplerCaps};
use splitgraph::rng::stream;

fn main() -> splitgraph::Result<()> {
    let caps = SamplerCaps::default();
    for (name, model) in [("G", LimitModel::G), ("M", LimitModel::M)] {
        let est = double_edge_stat(model, 1.0, 5_000, 1_000_000, &mut stream(3), &caps)?;
        println!(
            "{name}(1): {}/{} parallel = {:.4} (3-sigma interval {:.4}..{:.4}, {} draws)",
            est.doubles, est.hits, est.frequency, est.ci.0, est.ci.1, est.draws
        );
    }
    println!("2/7 = {:.4}", 2.0 / 7.0);
    Ok(())
}
