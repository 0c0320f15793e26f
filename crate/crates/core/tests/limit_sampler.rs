use proptest::prelude::*;

use splitgraph::genealogy::{SpineKind, SpineState};
use splitgraph::limit_sampler::{
    prefix_labels, sample_g_lambda, sample_m_lambda, sample_m_lambda_with_prefix, RevealState, SamplerCaps,
};
use splitgraph::rng::stream;
use splitgraph::stats::{chi_square_fit, fit_poisson, EmpiricalDistribution};
use splitgraph::VertexId;

fn caps() -> SamplerCaps {
    SamplerCaps::default()
}

#[test]
fn root_degree_of_m_is_poisson() {
    let mut rng = stream(21);
    for lambda in [0.5, 1.5] {
        let d: EmpiricalDistribution<u64> = (0..20_000)
            .map(|_| {
                let (g, _) = sample_m_lambda(lambda, &mut rng, &caps()).unwrap();
                g.degree(g.root()).unwrap()
            })
            .collect();
        let fit = fit_poisson(&d, lambda).unwrap();
        assert!(fit.chi_square.p_value > 0.001, "lambda={lambda}: {fit:?}");
    }
}

#[test]
fn root_degree_of_g_is_poisson() {
    let mut rng = stream(22);
    let d: EmpiricalDistribution<u64> = (0..20_000)
        .map(|_| {
            let (g, _) = sample_g_lambda(1.0, &mut rng, &caps()).unwrap();
            g.degree(g.root()).unwrap()
        })
        .collect();
    assert!(fit_poisson(&d, 1.0).unwrap().chi_square.p_value > 0.001);
}

// Independent oracle for one step of the stub count: Bin(x, 1/2) + Po(lambda/2).
fn stub_step_pmf(lambda: f64, x: u64, y: u64) -> f64 {
    let mut binom = vec![0.5f64.powi(x as i32); x as usize + 1];
    for k in 1..=x as usize {
        binom[k] = binom[k - 1] * (x as usize - k + 1) as f64 / k as f64;
    }
    let mu = lambda / 2.0;
    let po = |j: u64| (-mu).exp() * mu.powi(j as i32) / (1..=j).map(|i| i as f64).product::<f64>();
    (0..=x.min(y)).map(|k| binom[k as usize] * po(y - k)).sum()
}

#[test]
fn stub_counts_follow_the_degree_chain() {
    let lambda = 1.0;
    let mut rng = stream(23);
    let mut start = EmpiricalDistribution::new();
    let mut from_two = EmpiricalDistribution::new();
    let mut fresh = EmpiricalDistribution::new();
    for _ in 0..20_000 {
        let (_, diag) = sample_m_lambda(lambda, &mut rng, &caps()).unwrap();
        let path = &diag.stub_trajectory;
        start.add(path[0]);
        assert_eq!(*path.last().unwrap(), 0);
        assert_eq!(path.len(), diag.spine_length + 1);
        assert!(path[..path.len() - 1].iter().all(|&x| x > 0));
        for w in path.windows(2) {
            if w[0] == 2 {
                from_two.add(w[1]);
            }
        }
        for &f in &diag.fresh_stubs {
            fresh.add(f);
        }
    }
    assert!(fit_poisson(&start, lambda).unwrap().chi_square.p_value > 0.001);
    assert!(fit_poisson(&fresh, lambda / 2.0).unwrap().chi_square.p_value > 0.001);
    let fit = chi_square_fit(&from_two, 0, |y| stub_step_pmf(lambda, 2, y)).unwrap();
    assert!(fit.p_value > 0.001, "{fit:?}");
}

#[test]
fn stepping_by_hand_matches_the_sampler() {
    let mut a = stream(24);
    let mut b = stream(24);
    let (g, diag) = sample_m_lambda(1.3, &mut a, &caps()).unwrap();
    let mut state = RevealState::start(SpineState::new(SpineKind::Yule), 1.3, &mut b);
    while !state.is_finished() {
        state.step(&mut b);
    }
    let (h, diag2) = state.finish(&caps(), &mut b).unwrap();
    assert_eq!(diag.stub_trajectory, diag2.stub_trajectory);
    assert_eq!(g.edges(), h.edges());
}

#[test]
fn tiny_lambda_is_almost_always_a_single_vertex() {
    let mut rng = stream(25);
    let singles = (0..2_000)
        .filter(|_| sample_m_lambda(0.01, &mut rng, &caps()).unwrap().0.vertex_count() == 1)
        .count();
    assert!(singles >= 1_960, "{singles}");
}

#[test]
fn prefix_labels_are_a_poisson_process() {
    let mut rng = stream(26);
    let t = 1.5;
    let mut counts = EmpiricalDistribution::new();
    for _ in 0..20_000 {
        let (labels, shift) = prefix_labels(t, &mut rng);
        assert!(labels.iter().all(|&l| l >= 0.0) && shift >= 0.0);
        assert!((labels.iter().sum::<f64>() + shift - t).abs() < 1e-9);
        counts.add(labels.len() as u64);
    }
    assert!(fit_poisson(&counts, t).unwrap().chi_square.p_value > 0.001);
}

#[test]
fn spine_caps_are_reported() {
    let mut rng = stream(27);
    let tight = SamplerCaps {
        max_spine: 0,
        ..SamplerCaps::default()
    };
    let failures = (0..200).filter(|_| sample_m_lambda(3.0, &mut rng, &tight).is_err()).count();
    assert!(failures > 150, "{failures}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn samples_are_connected_and_numbered(seed in any::<u64>(), lambda in 0.05f64..2.0, g_model in any::<bool>()) {
        let mut rng = stream(seed);
        let (g, diag) = if g_model {
            sample_g_lambda(lambda, &mut rng, &caps()).unwrap()
        } else {
            sample_m_lambda(lambda, &mut rng, &caps()).unwrap()
        };
        prop_assert!(g.is_connected());
        prop_assert_eq!(g.root(), VertexId(0));
        prop_assert_eq!(g.vertex_count(), diag.component_size);
        let ids: Vec<u32> = g.sorted_vertices().iter().map(|v| v.0).collect();
        prop_assert_eq!(ids, (0..g.vertex_count() as u32).collect::<Vec<_>>());
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>()) {
        let a = sample_m_lambda_with_prefix(1.0, 1.0, &mut stream(seed), &caps()).unwrap().0;
        let b = sample_m_lambda_with_prefix(1.0, 1.0, &mut stream(seed), &caps()).unwrap().0;
        prop_assert_eq!(a.edges(), b.edges());
    }
}
