//! The singleton-free process stays below the thinned Yule bound
//! exp((1 - e^-lambda) t).

use splitgraph::processes::run_singleton_free;
use splitgraph::rng::stream;
use splitgraph::stats::mean_ci;

fn main() -> splitgraph::Result<()> {
    let mut rng = stream(9);
    for lambda in [0.5, 1.0, 2.0] {
        for t in [2.0, 4.0] {
            let sizes: Vec<f64> = (0..10_000)
                .map(|_| run_singleton_free(lambda, t, &mut rng, 1_000_000).map(|s| s as f64))
                .collect::<splitgraph::Result<_>>()?;
            let ci = mean_ci(&sizes)?;
            let bound = ((1.0 - (-lambda).exp()) * t).exp();
            println!("lambda={lambda} t={t}: mean {:.3}±{:.3}, bound {bound:.3}", ci.mean, 1.96 * ci.stderr);
        }
    }
    Ok(())
}
