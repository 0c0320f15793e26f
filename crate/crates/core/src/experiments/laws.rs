//! Experiments on scalar laws: Yule sizes, the degree chain, singleton-free
//! sizes, old-edge killing and crossing rates.

use rand::Rng;

use super::{keep_ok, Check, ExperimentConfig, Report, Runner, Table};
use crate::error::Result;
use crate::genealogy::sample_yule_tree;
use crate::multigraph::RootedMultigraph;
use crate::processes::{kill_time_all_old_edges, run_full_process, run_singleton_free, simulate_degree_chain};
use crate::rng;
use crate::stats::{fit_geometric, fit_poisson, mann_whitney, mean_ci, poisson_pmf, poisson_support, tv_to_pmf, EmpiricalDistribution};

pub const SIGNIFICANCE: f64 = 0.01;

/// Size of the full process from one vertex against `Geo(e^-t)`.
pub(super) fn yule_law(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let lambda = cfg.lambdas_or(&[1.0])[0];
    let n = cfg.samples();
    let opts = cfg.process_options();
    let mut report = Report::default();
    let mut table = Table::new(&[
        "t",
        "n",
        "frac_single",
        "expected_single",
        "mean",
        "stderr",
        "expected_mean",
        "chi2",
        "dof",
        "p_value",
    ]);
    for t in cfg.times_or(&[0.5, 1.0]) {
        let runs = runner.replicate(&format!("yule-law/t={t}"), n, |rng, _| {
            run_full_process(RootedMultigraph::create_single(), lambda, t, rng, &opts).map(|s| s.graph().vertex_count() as u64)
        });
        let sizes = keep_ok(runs, &mut report.cap_exceeded)?;
        let d: EmpiricalDistribution<u64> = sizes.iter().copied().collect();
        let p = (-t).exp();
        let fit = fit_geometric(&d, p)?;
        let ci = mean_ci(&sizes.iter().map(|&s| s as f64).collect::<Vec<_>>())?;
        let single = d.frequency(&1);
        table.push(vec![
            t.into(),
            sizes.len().into(),
            single.into(),
            p.into(),
            ci.mean.into(),
            ci.stderr.into(),
            t.exp().into(),
            fit.statistic.into(),
            fit.dof.into(),
            fit.p_value.into(),
        ]);
        report.checks.push(Check::assert(
            format!("geometric-fit-t={t}"),
            fit.p_value >= SIGNIFICANCE,
            format!("chi2={:.3} dof={} p={:.4}", fit.statistic, fit.dof, fit.p_value),
        ));
        let se_single = (p * (1.0 - p) / sizes.len() as f64).sqrt();
        report.checks.push(Check::report(
            format!("single-vertex-t={t}"),
            (single - p).abs() <= 3.0 * se_single,
            format!("freq={single:.4} expected={p:.4} 3se={:.4}", 3.0 * se_single),
        ));
        report.checks.push(Check::report(
            format!("mean-t={t}"),
            (ci.mean - t.exp()).abs() <= 3.0 * ci.stderr,
            format!("mean={:.4} expected={:.4} 3se={:.4}", ci.mean, t.exp(), 3.0 * ci.stderr),
        ));
    }
    report.table = Some(table);
    Ok(report)
}

/// One-step stationarity of `Po(lambda)` and burn-in from 0.
pub(super) fn chain(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    const BURN_IN: usize = 100;
    let n = cfg.samples();
    let mut report = Report::default();
    let mut table = Table::new(&["lambda", "quantity", "n", "mean", "chi2", "dof", "p_value", "tv"]);
    for lambda in cfg.lambdas_or(&[2.0]) {
        let pairs = runner.replicate(&format!("chain/lambda={lambda}"), n, |rng, _| {
            let x0 = rng::poisson(rng, lambda);
            let x1 = simulate_degree_chain(lambda, x0, 1, rng)[1];
            let x100 = simulate_degree_chain(lambda, 0, BURN_IN, rng)[BURN_IN];
            (x1, x100)
        });
        let one: EmpiricalDistribution<u64> = pairs.iter().map(|p| p.0).collect();
        let burn: EmpiricalDistribution<u64> = pairs.iter().map(|p| p.1).collect();
        let pmf = poisson_pmf(lambda, poisson_support(lambda, 1e-12));
        for (label, d) in [("x1_from_poisson", &one), ("x100_from_zero", &burn)] {
            let fit = fit_poisson(d, lambda)?;
            let tv = tv_to_pmf(d, &pmf)?;
            table.push(vec![
                lambda.into(),
                label.into(),
                n.into(),
                d.mean().into(),
                fit.chi_square.statistic.into(),
                fit.chi_square.dof.into(),
                fit.chi_square.p_value.into(),
                tv.into(),
            ]);
            let check = if label == "x1_from_poisson" {
                Check::assert(
                    format!("one-step-lambda={lambda}"),
                    fit.chi_square.p_value >= SIGNIFICANCE,
                    format!("p={:.4}", fit.chi_square.p_value),
                )
            } else {
                Check::assert(format!("burn-in-lambda={lambda}"), tv < 0.02, format!("tv={tv:.4} bound=0.02"))
            };
            report.checks.push(check);
        }
    }
    report.table = Some(table);
    Ok(report)
}

/// Mean size of the singleton-free process against the thinned Yule bound.
pub(super) fn singleton_free(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let mut report = Report::default();
    let mut table = Table::new(&["lambda", "t", "n", "mean", "stderr", "ci_lo", "ci_hi", "bound"]);
    for lambda in cfg.lambdas_or(&[1.0]) {
        let mut means = Vec::new();
        for t in cfg.times_or(&[3.0, 5.0]) {
            let runs = runner.replicate(&format!("singleton-free/lambda={lambda}/t={t}"), n, |rng, _| {
                run_singleton_free(lambda, t, rng, cfg.max_vertices).map(|s| s as f64)
            });
            let sizes = keep_ok(runs, &mut report.cap_exceeded)?;
            let ci = mean_ci(&sizes)?;
            let bound = ((1.0 - (-lambda).exp()) * t).exp();
            table.push(vec![
                lambda.into(),
                t.into(),
                sizes.len().into(),
                ci.mean.into(),
                ci.stderr.into(),
                ci.lo.into(),
                ci.hi.into(),
                bound.into(),
            ]);
            report.checks.push(Check::assert(
                format!("bound-lambda={lambda}-t={t}"),
                ci.mean - 3.0 * ci.stderr <= bound,
                format!("mean={:.4} stderr={:.4} bound={bound:.4}", ci.mean, ci.stderr),
            ));
            means.push((t, ci.mean));
        }
        means.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let (Some(first), Some(last)) = (means.first(), means.last()) {
            if first.0 < last.0 {
                report.checks.push(Check::assert(
                    format!("growth-lambda={lambda}"),
                    last.1 >= first.1,
                    format!("mean(t={})={:.4} mean(t={})={:.4}", first.0, first.1, last.0, last.1),
                ));
            }
        }
    }
    report.table = Some(table);
    Ok(report)
}

/// Fraction of runs in which every old edge is killed before the cap.
pub(super) fn kill_time(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let cap = cfg.times_or(&[200.0])[0];
    let mut report = Report::default();
    let mut table = Table::new(&["lambda", "time_cap", "n", "frac_killed", "mean_time", "median_time", "mean_old_edges"]);
    let mut lambdas = cfg.lambdas_or(&[1.0]);
    let asserted = lambdas.clone();
    for extra in [0.5, 2.0] {
        if !lambdas.contains(&extra) {
            lambdas.push(extra);
        }
    }
    let mut times_by_lambda = Vec::new();
    for &lambda in &lambdas {
        let runs = runner.replicate(&format!("kill-time/lambda={lambda}"), n, |rng, _| kill_time_all_old_edges(lambda, rng, cap));
        let killed = runs.iter().filter(|r| r.killed).count();
        let mut times: Vec<f64> = runs.iter().map(|r| r.time).collect();
        let mean_time = times.iter().sum::<f64>() / n as f64;
        let mean_old = runs.iter().map(|r| r.old_edges as f64).sum::<f64>() / n as f64;
        let median = crate::stats::quantile(&mut times.clone(), 0.5);
        let frac = killed as f64 / n as f64;
        table.push(vec![
            lambda.into(),
            cap.into(),
            n.into(),
            frac.into(),
            mean_time.into(),
            median.into(),
            mean_old.into(),
        ]);
        if asserted.contains(&lambda) {
            report.checks.push(Check::assert(
                format!("killed-lambda={lambda}"),
                frac >= 0.999,
                format!("killed {killed}/{n} (needs >= 99.9%)"),
            ));
        }
        times.sort_by(f64::total_cmp);
        times_by_lambda.push((lambda, times));
    }
    let find = |l: f64| times_by_lambda.iter().find(|(x, _)| *x == l).map(|(_, t)| t);
    if let (Some(small), Some(large)) = (find(0.5), find(2.0)) {
        let mw = mann_whitney(large, small)?;
        report.checks.push(Check::report(
            "increasing-in-lambda",
            mw.z > 0.0 && mw.p_value < 0.01,
            format!("Mann-Whitney lambda=2 vs 0.5: z={:.3} p={:.3e}", mw.z, mw.p_value),
        ));
    }
    report.table = Some(table);
    Ok(report)
}

/// `z <= 1` and product formula against the double sum on random Yule trees.
pub(super) fn crossing(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let results = runner.replicate("crossing", n, |rng, _| -> Result<(usize, f64, f64)> {
        let tree = loop {
            let t = rng.random_range(0.5..4.0);
            let tree = sample_yule_tree(t, rng);
            if tree.node_count() > 1 {
                break tree;
            }
        };
        let cut = crate::genealogy::TreeEdge {
            child: rng.random_range(1..tree.node_count()),
        };
        let z = tree.crossing_rate(cut)?;
        let below = |mut x: usize| loop {
            if x == cut.child {
                return true;
            }
            match tree.parent(x) {
                Some(p) => x = p,
                None => return false,
            }
        };
        let (inside, outside): (Vec<usize>, Vec<usize>) = tree.leaves().iter().partition(|&&x| below(x));
        let mut brute = 0.0;
        for &x in &inside {
            for &y in &outside {
                brute += 2f64.powi(1 - tree.distance(x, y)? as i32);
            }
        }
        Ok((tree.leaf_count(), z, brute))
    });
    let results: Vec<_> = results.into_iter().collect::<Result<_>>()?;
    let max_leaves = results.iter().map(|r| r.0).max().unwrap_or(0);
    let max_z = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let mean_z = results.iter().map(|r| r.1).sum::<f64>() / n as f64;
    let max_diff = results.iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);
    let mut table = Table::new(&["trees", "max_leaves", "max_z", "mean_z", "max_abs_diff"]);
    table.push(vec![n.into(), max_leaves.into(), max_z.into(), mean_z.into(), max_diff.into()]);
    Ok(Report {
        table: Some(table),
        checks: vec![
            Check::assert("z-at-most-one", max_z <= 1.0, format!("max z={max_z:.6}")),
            Check::assert("product-equals-sum", max_diff <= 1e-12, format!("max |z - sum|={max_diff:.3e}")),
        ],
        ..Report::default()
    })
}
