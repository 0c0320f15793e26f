use rand::Rng;

use crate::rng;

/// Trajectory `x0, x1, ..., x_steps` of the chain `X' = Bin(X, 1/2) + Po(lambda/2)`.
///
/// `lambda = 0` is accepted and gives pure halving, absorbed at 0.
pub fn simulate_degree_chain<R: Rng + ?Sized>(lambda: f64, x0: u64, steps: usize, rng: &mut R) -> Vec<u64> {
    let mut path = Vec::with_capacity(steps + 1);
    let mut x = x0;
    path.push(x);
    for _ in 0..steps {
        x = rng::fair_binomial(rng, x) + rng::poisson(rng, lambda / 2.0);
        path.push(x);
    }
    path
}

/// Transition matrix of the chain on `0..states`; row `x` holds
/// `P(X' = y | X = x)` and mass leaving the window is dropped.
pub fn degree_chain_transition(lambda: f64, states: usize) -> Vec<Vec<f64>> {
    let fresh = crate::stats::poisson_pmf(lambda / 2.0, states);
    let mut halving = vec![1.0];
    let mut rows = Vec::with_capacity(states);
    for _ in 0..states {
        let mut row = vec![0.0; states];
        for (k, &b) in halving.iter().enumerate() {
            for (j, &f) in fresh.iter().enumerate().take(states - k.min(states)) {
                row[k + j] += b * f;
            }
        }
        rows.push(row);
        // Bin(x+1, 1/2) from Bin(x, 1/2)
        let mut next = vec![0.0; halving.len() + 1];
        for (k, &b) in halving.iter().enumerate() {
            next[k] += 0.5 * b;
            next[k + 1] += 0.5 * b;
        }
        halving = next;
    }
    rows
}

/// `P(X_1, ..., X_steps all positive)` for each `steps` in `0..=max_steps`
/// when `X_0 ~ Po(lambda)`, i.e. the law of the first time the chain hits 0
/// (`X_0 = 0` counts as hitting at time 0).
pub fn degree_chain_survival(lambda: f64, max_steps: usize, states: usize) -> Vec<f64> {
    let p = degree_chain_transition(lambda, states);
    let mut dist = crate::stats::poisson_pmf(lambda, states - 1);
    dist[0] = 0.0;
    let mut out = vec![dist.iter().sum()];
    for _ in 0..max_steps {
        let mut next = vec![0.0; states];
        for (x, &px) in dist.iter().enumerate() {
            if px > 0.0 {
                for (y, &q) in p[x].iter().enumerate().skip(1) {
                    next[y] += px * q;
                }
            }
        }
        dist = next;
        out.push(dist.iter().sum());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KillOutcome {
    pub killed: bool,
    /// Kill time, or the cap when not killed.
    pub time: f64,
    /// Number of old edges at the start.
    pub old_edges: u64,
}

/// Descendant of the left endpoint still carrying unkilled old edges.
#[derive(Clone, Copy, Debug)]
struct Carrier {
    new_degree: u64,
    old: u64,
    root: bool,
}

/// Start from two vertices joined by `Po(lambda/2)` old edges, the left one
/// being the root, and run the full process until every old edge is killed.
///
/// An old edge is killed once its left endpoint is a non-root vertex meeting
/// no new edge. Only the descendants of the left vertex that still carry
/// old edges are simulated: the killing of an edge depends on nothing else,
/// and each carrier's split clock is an independent rate-1 clock.
pub fn kill_time_all_old_edges<R: Rng + ?Sized>(lambda: f64, rng: &mut R, time_cap: f64) -> KillOutcome {
    let old_edges = rng::poisson(rng, lambda / 2.0);
    let mut carriers = Vec::new();
    if old_edges > 0 {
        carriers.push(Carrier {
            new_degree: 0,
            old: old_edges,
            root: true,
        });
    }
    let mut time = 0.0;
    while !carriers.is_empty() {
        time += rng::exp1(rng) / carriers.len() as f64;
        if time > time_cap {
            return KillOutcome {
                killed: false,
                time: time_cap,
                old_edges,
            };
        }
        let c = carriers.swap_remove(rng.random_range(0..carriers.len()));
        let kept_new = rng::fair_binomial(rng, c.new_degree);
        let fresh = rng::poisson(rng, lambda / 2.0);
        let old_first = rng::fair_binomial(rng, c.old);
        let root_first = c.root && rng::coin(rng);
        let offspring = [
            Carrier {
                new_degree: kept_new + fresh,
                old: old_first,
                root: root_first,
            },
            Carrier {
                new_degree: c.new_degree - kept_new + fresh,
                old: c.old - old_first,
                root: c.root && !root_first,
            },
        ];
        for o in offspring {
            let dead = !o.root && o.new_degree == 0;
            if o.old > 0 && !dead {
                carriers.push(o);
            }
        }
    }
    KillOutcome {
        killed: true,
        time,
        old_edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn chain_trajectory_has_steps_plus_one_entries() {
        let path = simulate_degree_chain(2.0, 3, 10, &mut stream(1));
        assert_eq!(path.len(), 11);
        assert_eq!(path[0], 3);
    }

    #[test]
    fn zero_lambda_is_absorbed_at_zero() {
        let mut rng = stream(3);
        let mut hits = 0;
        for _ in 0..10_000 {
            let path = simulate_degree_chain(0.0, 8, 64, &mut rng);
            if path.contains(&0) {
                hits += 1;
                let first = path.iter().position(|&x| x == 0).unwrap();
                assert!(path[first..].iter().all(|&x| x == 0));
            }
        }
        assert!(hits as f64 / 10_000.0 > 0.999);
    }

    #[test]
    fn transition_rows_sum_to_one() {
        for row in degree_chain_transition(1.0, 40).iter().take(20) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_is_stationary_for_the_matrix() {
        let lambda = 2.0;
        let states = 60;
        let p = degree_chain_transition(lambda, states);
        let pi = crate::stats::poisson_pmf(lambda, states - 1);
        for y in 0..30 {
            let next: f64 = (0..states).map(|x| pi[x] * p[x][y]).sum();
            assert!((next - pi[y]).abs() < 1e-12, "state {y}");
        }
    }

    #[test]
    fn survival_starts_at_one_minus_empty_mass() {
        let s = degree_chain_survival(1.0, 3, 40);
        assert!((s[0] - (1.0 - (-1f64).exp())).abs() < 1e-12);
        assert!(s.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn no_old_edges_means_killed_at_zero() {
        let mut rng = stream(5);
        for _ in 0..1000 {
            let out = kill_time_all_old_edges(0.5, &mut rng, 10.0);
            if out.old_edges == 0 {
                assert!(out.killed);
                assert_eq!(out.time, 0.0);
            }
        }
    }

    #[test]
    fn most_runs_are_killed() {
        let mut rng = stream(6);
        let killed = (0..2000)
            .filter(|_| kill_time_all_old_edges(1.0, &mut rng, 200.0).killed)
            .count();
        assert!(killed >= 1995);
    }
}
