//! Draw a few exact samples of the limit graph M(lambda) and show what the
//! sampler saw on the way.
//!
//! cargo run --example sample_limit -- 1.0 5

use splitgraph::limit_sampler::{sample_m_lambda, SamplerCaps};
use splitgraph::multigraph::serialize;
use splitgraph::rng::stream;
use splitgraph::canonical_form;

fn main() -> splitgraph::Result<()> {
    let mut args = std::env::args().skip(1);
    let lambda: f64 = args.next().map_or(1.0, |a| a.parse().expect("lambda"));
    let count: usize = args.next().map_or(5, |a| a.parse().expect("count"));
    let mut rng = stream(7);
    for _ in 0..count {
        let (g, diag) = sample_m_lambda(lambda, &mut rng, &SamplerCaps::default())?;
        println!("{}", serialize(&g));
        println!(
            "  spine {} stubs {:?} revealed leaves {} class {}",
            diag.spine_length,
            diag.stub_trajectory,
            diag.revealed_leaves,
            canonical_form(&g)
        );
    }
    Ok(())
}
