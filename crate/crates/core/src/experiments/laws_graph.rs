//! Experiments comparing laws of whole graphs through canonical codes.

use super::laws::SIGNIFICANCE;
use super::{keep_ok, Check, ExperimentConfig, Report, Runner, Table};
use crate::error::Result;
use crate::limit_sampler::{evolve, sample_m_lambda, sample_m_lambda_with_prefix, SamplerCaps};
use crate::multigraph::{canonical_form, CanonicalCode, RootedMultigraph, VertexId};
use crate::processes::{degree_chain_survival, run_cluster_process, sample_gtcirc_via_tree};
use crate::rng::RandomStream;
use crate::stats::{fit_poisson, tv_distance, tv_noise_floor, EmpiricalDistribution};

const BOOTSTRAP_RESAMPLES: usize = 200;
const OVERFLOW_LIMIT: f64 = 0.01;

type Codes = EmpiricalDistribution<CanonicalCode>;

fn codes_of(graphs: &[RootedMultigraph]) -> Codes {
    graphs.iter().map(canonical_form).collect()
}

fn overflow(d: &Codes) -> f64 {
    d.mass_where(|c| c.overflow) as f64 / d.total().max(1) as f64
}

fn m_codes(runner: &mut Runner<'_>, tag: &str, lambda: f64, n: usize, caps: &SamplerCaps, report: &mut Report) -> Result<Codes> {
    let runs = runner.replicate(tag, n, |rng, _| sample_m_lambda(lambda, rng, caps).map(|(g, _)| g));
    Ok(codes_of(&keep_ok(runs, &mut report.cap_exceeded)?))
}

/// TV distance with its bootstrap noise floor.
fn compare(runner: &mut Runner<'_>, tag: &str, a: &Codes, b: &Codes) -> Result<(f64, f64)> {
    let tv = tv_distance(a, b)?;
    let mut rng = runner.stream(tag);
    let floor = tv_noise_floor(a, b, BOOTSTRAP_RESAMPLES, &mut rng)?;
    Ok((tv, floor))
}

/// `M(lambda)` against its evolution by the cluster process, and against the
/// sampler with a Poisson prefix on the spine.
pub(super) fn stationarity(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let caps = cfg.sampler_caps();
    let mut report = Report::default();
    let mut table = Table::new(&[
        "comparison",
        "lambda",
        "t",
        "n",
        "tv",
        "noise_floor",
        "threshold",
        "overflow_a",
        "overflow_b",
    ]);
    for lambda in cfg.lambdas_or(&[1.0]) {
        let reference = m_codes(runner, &format!("stationarity/reference/lambda={lambda}"), lambda, n, &caps, &mut report)?;
        for t in cfg.times_or(&[1.0]) {
            let runs = runner.replicate(&format!("stationarity/evolved/lambda={lambda}/t={t}"), n, |rng, _| {
                let (m, _) = sample_m_lambda(lambda, rng, &caps)?;
                evolve(m, lambda, t, rng)
            });
            let evolved = codes_of(&keep_ok(runs, &mut report.cap_exceeded)?);
            let (tv, floor) = compare(runner, &format!("stationarity/bootstrap/lambda={lambda}/t={t}"), &reference, &evolved)?;
            let threshold = 0.03 + floor;
            let (oa, ob) = (overflow(&reference), overflow(&evolved));
            table.push(vec![
                "evolved".into(),
                lambda.into(),
                t.into(),
                n.into(),
                tv.into(),
                floor.into(),
                threshold.into(),
                oa.into(),
                ob.into(),
            ]);
            report.checks.push(Check::assert(
                format!("stationarity-lambda={lambda}-t={t}"),
                tv < threshold,
                format!("tv={tv:.4} threshold=0.03+{floor:.4}"),
            ));
            report.checks.push(Check::report(
                format!("overflow-evolved-lambda={lambda}-t={t}"),
                oa < OVERFLOW_LIMIT && ob < OVERFLOW_LIMIT,
                format!("overflow mass {oa:.4} / {ob:.4}"),
            ));

            let runs = runner.replicate(&format!("stationarity/prefix/lambda={lambda}/t={t}"), n, |rng, _| {
                if t > 0.0 {
                    sample_m_lambda_with_prefix(lambda, t, rng, &caps).map(|(g, _)| g)
                } else {
                    sample_m_lambda(lambda, rng, &caps).map(|(g, _)| g)
                }
            });
            let prefixed = codes_of(&keep_ok(runs, &mut report.cap_exceeded)?);
            let (tv, floor) = compare(runner, &format!("stationarity/prefix-bootstrap/lambda={lambda}/t={t}"), &reference, &prefixed)?;
            let threshold = 0.02 + floor;
            let ob = overflow(&prefixed);
            table.push(vec![
                "prefix".into(),
                lambda.into(),
                t.into(),
                n.into(),
                tv.into(),
                floor.into(),
                threshold.into(),
                oa.into(),
                ob.into(),
            ]);
            report.checks.push(Check::assert(
                format!("prefix-shift-lambda={lambda}-t={t}"),
                tv < threshold,
                format!("tv={tv:.4} threshold=0.02+{floor:.4}"),
            ));
        }
    }
    report.table = Some(table);
    Ok(report)
}

fn five_cycle() -> RootedMultigraph {
    let v = |i| VertexId(i);
    RootedMultigraph::from_parts(v(0), (0..5).map(v), (0..5).map(|i| (v(i), v((i + 1) % 5), 1))).expect("cycle is valid")
}

/// Root cluster from a single vertex (and from a 5-cycle) against `M(lambda)`
/// over a grid of times.
pub(super) fn convergence(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let caps = cfg.sampler_caps();
    let opts = cfg.process_options();
    let mut report = Report::default();
    let mut table = Table::new(&["start", "lambda", "t", "n", "tv", "noise_floor"]);
    let mut times = cfg.times_or(&[1.0, 2.0, 4.0, 8.0]);
    times.sort_by(f64::total_cmp);
    for lambda in cfg.lambdas_or(&[1.0]) {
        let reference = m_codes(runner, &format!("convergence/reference/lambda={lambda}"), lambda, n, &caps, &mut report)?;
        for (start, init) in [("single", RootedMultigraph::create_single()), ("cycle5", five_cycle())] {
            let mut series: Vec<(f64, f64, f64)> = Vec::new();
            for &t in &times {
                let runs = runner.replicate(&format!("convergence/{start}/lambda={lambda}/t={t}"), n, |rng, _| {
                    run_cluster_process(init.clone(), lambda, t, rng, &opts)
                });
                let codes = codes_of(&keep_ok(runs, &mut report.cap_exceeded)?);
                let (tv, floor) = compare(runner, &format!("convergence/bootstrap/{start}/lambda={lambda}/t={t}"), &reference, &codes)?;
                table.push(vec![start.into(), lambda.into(), t.into(), n.into(), tv.into(), floor.into()]);
                series.push((t, tv, floor));
            }
            let monotone = series.windows(2).all(|w| w[1].1 <= w[0].1 + w[1].2);
            let trend: Vec<String> = series.iter().map(|(t, tv, _)| format!("{t}:{tv:.4}")).collect();
            report.checks.push(Check::assert(
                format!("non-increasing-{start}-lambda={lambda}"),
                monotone,
                format!("tv by t {}", trend.join(" ")),
            ));
            if let Some(&(t, tv, floor)) = series.last() {
                report.checks.push(Check::assert(
                    format!("final-{start}-lambda={lambda}"),
                    tv < 0.05,
                    format!("tv(t={t})={tv:.4} bound=0.05 noise_floor={floor:.4}"),
                ));
                report.checks.push(Check::report(
                    format!("final-above-floor-{start}-lambda={lambda}"),
                    tv < 0.05 + floor,
                    format!("tv(t={t})={tv:.4} threshold=0.05+{floor:.4}"),
                ));
            }
        }
    }
    report.table = Some(table);
    Ok(report)
}

/// Event-driven cluster process against the genealogical-tree sampler.
pub(super) fn cross_validate(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let opts = cfg.process_options();
    let mut report = Report::default();
    let mut table = Table::new(&["lambda", "t", "n", "tv", "noise_floor", "threshold"]);
    for lambda in cfg.lambdas_or(&[1.0]) {
        for t in cfg.times_or(&[1.0, 2.0]) {
            let runs = runner.replicate(&format!("cross-validate/events/lambda={lambda}/t={t}"), n, |rng, _| {
                run_cluster_process(RootedMultigraph::create_single(), lambda, t, rng, &opts)
            });
            let events = codes_of(&keep_ok(runs, &mut report.cap_exceeded)?);
            let runs = runner.replicate(&format!("cross-validate/tree/lambda={lambda}/t={t}"), n, |rng, _| {
                sample_gtcirc_via_tree(lambda, t, rng, cfg.max_vertices)
            });
            let tree = codes_of(&keep_ok(runs, &mut report.cap_exceeded)?);
            let (tv, floor) = compare(runner, &format!("cross-validate/bootstrap/lambda={lambda}/t={t}"), &events, &tree)?;
            let threshold = 0.02 + floor;
            table.push(vec![lambda.into(), t.into(), n.into(), tv.into(), floor.into(), threshold.into()]);
            report.checks.push(Check::assert(
                format!("agree-lambda={lambda}-t={t}"),
                tv < threshold,
                format!("tv={tv:.4} threshold=0.02+{floor:.4}"),
            ));
        }
    }
    report.table = Some(table);
    Ok(report)
}

fn root_degree_of(g: &RootedMultigraph) -> u64 {
    g.degree(g.root()).expect("root is a vertex")
}

/// Root degree of `M(lambda)` against `Po(lambda)` and against the root
/// degree of a long cluster-process run.
pub(super) fn root_degree(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    const ORACLE_TIME: f64 = 12.0;
    let n = cfg.samples();
    let caps = cfg.sampler_caps();
    let opts = cfg.process_options();
    let mut report = Report::default();
    let mut table = Table::new(&["lambda", "source", "n", "mean_degree", "chi2", "dof", "p_value", "tv", "tv_m_vs_cluster"]);
    for lambda in cfg.lambdas_or(&[0.5, 1.0, 2.0]) {
        let runs = runner.replicate(&format!("root-degree/m/lambda={lambda}"), n, |rng, _| {
            sample_m_lambda(lambda, rng, &caps).map(|(g, _)| root_degree_of(&g))
        });
        let m: EmpiricalDistribution<u64> = keep_ok(runs, &mut report.cap_exceeded)?.into_iter().collect();
        let runs = runner.replicate(&format!("root-degree/cluster/lambda={lambda}"), n, |rng, _| {
            run_cluster_process(RootedMultigraph::create_single(), lambda, ORACLE_TIME, rng, &opts).map(|g| root_degree_of(&g))
        });
        let cluster: EmpiricalDistribution<u64> = keep_ok(runs, &mut report.cap_exceeded)?.into_iter().collect();
        let fit_m = fit_poisson(&m, lambda)?;
        let fit_c = fit_poisson(&cluster, lambda)?;
        let tv = tv_distance(&m, &cluster)?;
        for (source, d, fit) in [("m_sampler", &m, &fit_m), ("cluster_t12", &cluster, &fit_c)] {
            table.push(vec![
                lambda.into(),
                source.into(),
                d.total().into(),
                d.mean().into(),
                fit.chi_square.statistic.into(),
                fit.chi_square.dof.into(),
                fit.chi_square.p_value.into(),
                fit.tv.into(),
                tv.into(),
            ]);
        }
        report.checks.push(Check::assert(
            format!("poisson-fit-lambda={lambda}"),
            fit_m.chi_square.p_value >= SIGNIFICANCE,
            format!("chi2={:.3} dof={} p={:.4}", fit_m.chi_square.statistic, fit_m.chi_square.dof, fit_m.chi_square.p_value),
        ));
        report.checks.push(Check::assert(
            format!("cluster-oracle-lambda={lambda}"),
            tv < 0.02,
            format!("tv(M, cluster t={ORACLE_TIME})={tv:.4} bound=0.02"),
        ));
    }
    report.table = Some(table);
    Ok(report)
}

/// Tail of the spine length used by the `M(lambda)` sampler, against the
/// geometric envelope `(1 - e^-lambda)^L` and against the exact law of the
/// first zero of the degree chain.
pub(super) fn spine_tail(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let caps = cfg.sampler_caps();
    let levels = [5usize, 10, 20];
    let mut report = Report::default();
    let mut table = Table::new(&["lambda", "L", "n", "tail", "stderr", "envelope", "chain_tail"]);
    for lambda in cfg.lambdas_or(&[1.0]) {
        let runs = runner.replicate(&format!("spine-tail/lambda={lambda}"), n, |rng: &mut RandomStream, _| {
            sample_m_lambda(lambda, rng, &caps).map(|(_, d)| d.spine_length)
        });
        let lengths = keep_ok(runs, &mut report.cap_exceeded)?;
        let total = lengths.len() as f64;
        let states = (8.0 * lambda + 60.0) as usize;
        let exact = degree_chain_survival(lambda, 20, states);
        for &l in &levels {
            let tail = lengths.iter().filter(|&&s| s > l).count() as f64 / total;
            let stderr = (tail * (1.0 - tail) / total).sqrt();
            let envelope = (1.0 - (-lambda).exp()).powi(l as i32);
            table.push(vec![
                lambda.into(),
                l.into(),
                lengths.len().into(),
                tail.into(),
                stderr.into(),
                envelope.into(),
                exact[l].into(),
            ]);
            report.checks.push(Check::assert(
                format!("envelope-lambda={lambda}-L={l}"),
                tail <= envelope + 3.0 * stderr,
                format!("P(S>{l})={tail:.5} envelope={envelope:.5} 3se={:.5}", 3.0 * stderr),
            ));
            let chain_se = (exact[l] * (1.0 - exact[l]) / total).sqrt();
            report.checks.push(Check::assert(
                format!("chain-law-lambda={lambda}-L={l}"),
                (tail - exact[l]).abs() <= 3.0 * chain_se + 1e-12,
                format!("P(S>{l})={tail:.5} chain={:.5} 3se={:.5}", exact[l], 3.0 * chain_se),
            ));
        }
    }
    report.table = Some(table);
    Ok(report)
}
