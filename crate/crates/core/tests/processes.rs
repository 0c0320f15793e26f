use proptest::prelude::*;
use rand::Rng;

use splitgraph::processes::{
    run_cluster_process_with, run_full_process, FullProcessState, ProcessOptions, Pruning,
};
use splitgraph::rng::stream;
use splitgraph::stats::{chi_square_fit, fit_geometric, fit_poisson, tv_distance, tv_noise_floor, EmpiricalDistribution};
use splitgraph::{canonical_form, RootedMultigraph, VertexId};

fn binomial_pmf(n: u64, k: u64) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * 0.5f64.powi(n as i32)
}

#[test]
fn bundle_splits_binomially() {
    let mut rng = stream(11);
    let g = RootedMultigraph::from_parts(VertexId(0), [VertexId(0), VertexId(1)], [(VertexId(0), VertexId(1), 4)]).unwrap();
    let mut first = EmpiricalDistribution::new();
    for _ in 0..20_000 {
        let mut h = g.clone();
        let (a, _) = h.split_vertex(VertexId(1), 0.0, &mut rng).unwrap();
        first.add(u64::from(h.multiplicity(VertexId(0), a)));
        assert_eq!(h.edge_count(), 4);
    }
    let fit = chi_square_fit(&first, 0, |k| if k <= 4 { binomial_pmf(4, k) } else { 0.0 }).unwrap();
    assert!(fit.p_value > 0.001, "{fit:?}");
}

#[test]
fn offspring_edges_are_poisson_and_root_moves_fairly() {
    let mut rng = stream(12);
    let lambda = 2.0;
    let mut fresh = EmpiricalDistribution::new();
    let mut root_first = 0;
    let n = 20_000;
    for _ in 0..n {
        let mut g = RootedMultigraph::create_single();
        let (a, b) = g.split_vertex(VertexId(0), lambda, &mut rng).unwrap();
        fresh.add(u64::from(g.multiplicity(a, b)));
        if g.root() == a {
            root_first += 1;
        }
    }
    assert!(fit_poisson(&fresh, lambda / 2.0).unwrap().chi_square.p_value > 0.001);
    let f = root_first as f64 / n as f64;
    assert!((f - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
}

#[test]
fn full_process_size_is_geometric() {
    let mut rng = stream(13);
    let t = 1.0;
    let sizes: EmpiricalDistribution<u64> = (0..20_000)
        .map(|_| {
            run_full_process(RootedMultigraph::create_single(), 1.0, t, &mut rng, &ProcessOptions::default())
                .unwrap()
                .graph()
                .vertex_count() as u64
        })
        .collect();
    assert!(fit_geometric(&sizes, (-t).exp()).unwrap().p_value > 0.001);
}

// Every split adds Po(lambda/2) edges and none are lost, so given N vertices
// the edge count is Po((N - 1) lambda / 2).
#[test]
fn edge_count_given_size() {
    let mut rng = stream(14);
    let lambda = 1.5;
    let mut by_size: std::collections::BTreeMap<usize, EmpiricalDistribution<u64>> = Default::default();
    for _ in 0..30_000 {
        let s = run_full_process(RootedMultigraph::create_single(), lambda, 1.0, &mut rng, &ProcessOptions::default()).unwrap();
        let g = s.graph();
        by_size.entry(g.vertex_count()).or_default().add(g.edge_count());
    }
    for size in [2usize, 3, 4] {
        let d = &by_size[&size];
        let fit = fit_poisson(d, (size - 1) as f64 * lambda / 2.0).unwrap();
        assert!(fit.chi_square.p_value > 0.001, "size {size}: {fit:?}");
    }
}

#[test]
fn old_edges_are_conserved_by_the_full_process() {
    let mut rng = stream(15);
    let init = RootedMultigraph::from_parts(
        VertexId(0),
        (0..3).map(VertexId),
        [(VertexId(0), VertexId(1), 2), (VertexId(1), VertexId(2), 1)],
    )
    .unwrap();
    let opts = ProcessOptions {
        tag_old_edges: true,
        ..ProcessOptions::default()
    };
    for _ in 0..200 {
        let s = run_full_process(init.clone(), 1.0, 2.0, &mut rng, &opts).unwrap();
        assert_eq!(s.graph().old_edge_count(), 3);
        assert!(s.graph().edge_count() >= 3);
    }
}

#[test]
fn lazy_and_end_pruning_agree_in_law() {
    let n = 20_000;
    let (lambda, t) = (1.0, 1.5);
    let codes = |pruning: Pruning, seed: u64| -> EmpiricalDistribution<_> {
        let mut rng = stream(seed);
        (0..n)
            .map(|_| {
                let g = run_cluster_process_with(
                    RootedMultigraph::create_single(),
                    lambda,
                    t,
                    &mut rng,
                    &ProcessOptions::default(),
                    pruning,
                )
                .unwrap();
                canonical_form(&g)
            })
            .collect()
    };
    let a = codes(Pruning::Lazy, 16);
    let b = codes(Pruning::EndOnly, 17);
    let tv = tv_distance(&a, &b).unwrap();
    let floor = tv_noise_floor(&a, &b, 200, &mut stream(18)).unwrap();
    assert!(tv < 0.01 + floor, "tv={tv} floor={floor}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stepping_keeps_invariants(seed in any::<u64>(), lambda in 0.01f64..3.0, steps in 1usize..60) {
        let mut rng = stream(seed);
        let opts = ProcessOptions { record_genealogy: true, ..ProcessOptions::default() };
        let mut s = FullProcessState::new(RootedMultigraph::create_single(), lambda, &opts, &mut rng).unwrap();
        let mut last = 0.0;
        for i in 0..steps {
            let rec = s.step(&mut rng).expect("a vertex is always pending");
            prop_assert!(rec.time >= last);
            last = rec.time;
            prop_assert!(s.check_invariants());
            prop_assert_eq!(s.graph().vertex_count(), i + 2);
        }
        let (tree, ids) = s.genealogy_tree().expect("genealogy recorded");
        prop_assert_eq!(tree.leaf_count(), s.graph().vertex_count());
        prop_assert_eq!(ids.len(), tree.node_count());
        for &leaf in tree.leaves() {
            prop_assert!(s.graph().contains(ids[leaf]));
        }
    }

    #[test]
    fn cluster_process_is_connected(seed in any::<u64>(), lambda in 0.1f64..2.0, t in 0.0f64..2.0) {
        let mut rng = stream(seed);
        let g = run_cluster_process_with(RootedMultigraph::create_single(), lambda, t, &mut rng, &ProcessOptions::default(), Pruning::Lazy).unwrap();
        prop_assert!(g.is_connected());
        prop_assert!(g.contains(g.root()));
    }

    #[test]
    fn same_seed_same_graph(seed in any::<u64>()) {
        let run = |s: u64| {
            let mut rng = stream(s);
            let t = rng.random_range(0.0..2.0);
            run_full_process(RootedMultigraph::create_single(), 1.0, t, &mut rng, &ProcessOptions::default()).unwrap().into_graph()
        };
        let (a, b) = (run(seed), run(seed));
        prop_assert_eq!(a.edges(), b.edges());
        prop_assert_eq!(a.root(), b.root());
    }
}
