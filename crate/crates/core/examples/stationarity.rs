//! M(1) is invariant under the cluster process: evolve samples for one time
//! unit and compare isomorphism-class frequencies with fresh samples.

use splitgraph::limit_sampler::{evolve, sample_m_lambda, SamplerCaps};
use splitgraph::rng::stream;
use splitgraph::stats::{tv_distance, tv_noise_floor, EmpiricalDistribution};
use splitgraph::canonical_form;

fn main() -> splitgraph::Result<()> {
    let n = 20_000;
    let caps = SamplerCaps::default();
    let mut rng = stream(11);
    let mut fresh = EmpiricalDistribution::new();
    let mut evolved = EmpiricalDistribution::new();
    for _ in 0..n {
        fresh.add(canonical_form(&sample_m_lambda(1.0, &mut rng, &caps)?.0));
        let m = sample_m_lambda(1.0, &mut rng, &caps)?.0;
        evolved.add(canonical_form(&evolve(m, 1.0, 1.0, &mut rng)?));
    }
    let tv = tv_distance(&fresh, &evolved)?;
    let floor = tv_noise_floor(&fresh, &evolved, 200, &mut rng)?;
    let overflow = fresh.mass_where(|c| c.overflow) as f64 / n as f64;
    println!("classes seen: {} / {}", fresh.support_size(), evolved.support_size());
    println!("TV = {tv:.4}, same-law noise floor = {floor:.4}, overflow mass = {overflow:.3}");
    Ok(())
}
