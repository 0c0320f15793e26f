//! Old edges at the root are all killed in finite time; the time it takes
//! grows with lambda.

use splitgraph::processes::kill_time_all_old_edges;
use splitgraph::rng::stream;
use splitgraph::stats::quantile;

fn main() {
    let mut rng = stream(6);
    for lambda in [0.5, 1.0, 2.0, 4.0] {
        let runs: Vec<_> = (0..5_000).map(|_| kill_time_all_old_edges(lambda, &mut rng, 200.0)).collect();
        let killed = runs.iter().filter(|r| r.killed).count();
        let mut times: Vec<f64> = runs.iter().filter(|r| r.old_edges > 0).map(|r| r.time).collect();
        let median = if times.is_empty() { 0.0 } else { quantile(&mut times, 0.5) };
        println!(
            "lambda={lambda}: killed {killed}/5000, median time with old edges present {median:.3}"
        );
    }
}
