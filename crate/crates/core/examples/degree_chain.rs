//! The root-degree chain X' = Bin(X, 1/2) + Po(lambda/2): Poisson stationary
//! law, burn-in from 0, and the law of its first zero (the spine length of the
//! limit sampler).

use splitgraph::processes::{degree_chain_survival, degree_chain_transition, simulate_degree_chain};
use splitgraph::rng::stream;
use splitgraph::stats::{poisson_pmf, tv_to_pmf, EmpiricalDistribution};

fn main() -> splitgraph::Result<()> {
    let lambda = 2.0;
    let states = 40;
    let p = degree_chain_transition(lambda, states);
    let pi = poisson_pmf(lambda, states - 1);
    let moved: Vec<f64> = (0..states).map(|y| (0..states).map(|x| pi[x] * p[x][y]).sum()).collect();
    let err = moved.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("Po({lambda}) pushed one step moves by at most {err:.2e}");

    let mut rng = stream(8);
    let d: EmpiricalDistribution<u64> = (0..20_000).map(|_| simulate_degree_chain(lambda, 0, 100, &mut rng)[100]).collect();
    println!("X_100 from 0: mean {:.3}, TV to Po({lambda}) {:.4}", d.mean(), tv_to_pmf(&d, &pi)?);

    let survival = degree_chain_survival(1.0, 20, 60);
    for l in [0, 5, 10, 20] {
        println!(
            "lambda=1: P(first zero after {l:>2}) = {:.5}   (1 - 1/e)^{l:<2} = {:.5}",
            survival[l],
            (1.0 - (-1f64).exp()).powi(l as i32)
        );
    }
    Ok(())
}
