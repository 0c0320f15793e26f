use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Copy, Debug)]
struct Member {
    degree: u64,
    tokens: u64,
}

/// Size at `t_end` of the singleton-free process started from one vertex
/// carrying `Po(lambda/2)` tokens.
///
/// A vertex's edge count changes only when it splits itself, so each vertex
/// is summarised by its degree and token count. Offspring that are isolated
/// and tokenless are discarded on the spot. The starting vertex is kept even
/// when it has no tokens.
pub fn run_singleton_free<R: Rng + ?Sized>(lambda: f64, t_end: f64, rng: &mut R, max_vertices: usize) -> Result<u64> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::Domain(format!("time must be finite and non-negative, got {t_end}")));
    }
    let mut members = vec![Member {
        degree: 0,
        tokens: rng::poisson(rng, lambda / 2.0),
    }];
    let mut time = 0.0;
    while !members.is_empty() {
        time += rng::exp1(rng) / members.len() as f64;
        if time > t_end {
            break;
        }
        let m = members.swap_remove(rng.random_range(0..members.len()));
        let kept = rng::fair_binomial(rng, m.degree);
        let fresh = rng::poisson(rng, lambda / 2.0);
        let tok = rng::fair_binomial(rng, m.tokens);
        for child in [
            Member {
                degree: kept + fresh,
                tokens: tok,
            },
            Member {
                degree: m.degree - kept + fresh,
                tokens: m.tokens - tok,
            },
        ] {
            if child.degree > 0 || child.tokens > 0 {
                members.push(child);
            }
        }
        if members.len() > max_vertices {
            return Err(Error::PopulationCap {
                cap: max_vertices,
                time,
            });
        }
    }
    Ok(members.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn zero_time_gives_one_vertex() {
        let mut rng = stream(1);
        for _ in 0..100 {
            assert_eq!(run_singleton_free(1.0, 0.0, &mut rng, 1000).unwrap(), 1);
        }
    }

    #[test]
    fn cap_is_reported() {
        let mut rng = stream(2);
        let hit = (0..200).any(|_| matches!(run_singleton_free(4.0, 30.0, &mut rng, 20), Err(Error::PopulationCap { .. })));
        assert!(hit);
    }
}
