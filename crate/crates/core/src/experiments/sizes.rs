//! Sampling, mean sizes, the connectivity threshold and double edges.

use super::{keep_ok, line_chart, Check, ExperimentConfig, Report, Runner, SampleKind, Series, Table};
use crate::error::{Error, Result};
use crate::limit_sampler::{double_edge_summary, root_double_edge, sample_g_lambda, sample_m_lambda, DoubleEdgeEstimate, LimitModel};
use crate::multigraph::{serialize, RootedMultigraph};
use crate::processes::{run_cluster_process, run_full_process};
use crate::stats::{mean_ci, wilson_ci, MeanCi};

/// Graph documents, one per line.
pub(super) fn sample(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let lambda = cfg.lambdas_or(&[1.0])[0];
    let t = cfg.times_or(&[1.0])[0];
    let caps = cfg.sampler_caps();
    let opts = cfg.process_options();
    let runs = runner.replicate("sample", n, |rng, _| match cfg.kind {
        SampleKind::M => sample_m_lambda(lambda, rng, &caps).map(|(g, d)| (g, Some(d))),
        SampleKind::G => sample_g_lambda(lambda, rng, &caps).map(|(g, d)| (g, Some(d))),
        SampleKind::Cluster => run_cluster_process(RootedMultigraph::create_single(), lambda, t, rng, &opts).map(|g| (g, None)),
    });
    let mut report = Report::default();
    let mut documents = String::new();
    let mut diagnostics = String::new();
    for run in runs {
        match run {
            Ok((g, diag)) => {
                documents.push_str(&serialize(&g));
                documents.push('\n');
                if let Some(d) = diag {
                    diagnostics.push_str(&serde_json::to_string(&d)?);
                    diagnostics.push('\n');
                }
            }
            Err(Error::SamplerCap { reason, diagnostics: d }) => {
                report.cap_exceeded += 1;
                let line = serde_json::json!({ "error": reason, "diagnostics": *d });
                diagnostics.push_str(&line.to_string());
                diagnostics.push('\n');
            }
            Err(Error::VertexCap { .. } | Error::PopulationCap { .. }) => report.cap_exceeded += 1,
            Err(e) => return Err(e),
        }
    }
    report.documents = Some(documents);
    if cfg.diagnostics && cfg.kind != SampleKind::Cluster {
        report.sidecars.push((".diagnostics.jsonl".into(), diagnostics));
    }
    Ok(report)
}

/// Mean size of `M(lambda)` at `n` and `2n` samples, plus the plateau of the
/// cluster-process mean size between `t = 10` and `t = 12` at `lambda = 1`.
pub(super) fn mean_size(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let caps = cfg.sampler_caps();
    let opts = cfg.process_options();
    let mut report = Report::default();
    let mut table = Table::new(&["lambda", "n", "mean", "stderr", "ci_lo", "ci_hi"]);
    let mut at_full: Vec<(f64, MeanCi)> = Vec::new();
    let lambdas = cfg.lambdas_or(&[0.5, 1.0, 2.0]);
    for &lambda in &lambdas {
        let runs = runner.replicate(&format!("mean-size/lambda={lambda}"), 2 * n, |rng, _| {
            sample_m_lambda(lambda, rng, &caps).map(|(g, _)| g.vertex_count() as f64)
        });
        let sizes = keep_ok(runs, &mut report.cap_exceeded)?;
        let half = mean_ci(&sizes[..sizes.len() / 2])?;
        let full = mean_ci(&sizes)?;
        for (count, ci) in [(sizes.len() / 2, half), (sizes.len(), full)] {
            table.push(vec![lambda.into(), count.into(), ci.mean.into(), ci.stderr.into(), ci.lo.into(), ci.hi.into()]);
        }
        let change = (full.mean - half.mean).abs();
        report.checks.push(Check::assert(
            format!("doubling-stable-lambda={lambda}"),
            change < 2.0 * full.stderr,
            format!("|mean(2n) - mean(n)|={change:.4} 2*stderr(2n)={:.4}", 2.0 * full.stderr),
        ));
        at_full.push((lambda, full));
    }
    at_full.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let (Some(lo), Some(hi)) = (at_full.first(), at_full.last()) {
        if lo.0 < hi.0 {
            report.checks.push(Check::assert(
                format!("increasing-lambda={}-vs-{}", lo.0, hi.0),
                hi.1.mean - 3.0 * hi.1.stderr > lo.1.mean + 3.0 * lo.1.stderr,
                format!("{:.4}±{:.4} vs {:.4}±{:.4} (3 stderr)", lo.1.mean, 3.0 * lo.1.stderr, hi.1.mean, 3.0 * hi.1.stderr),
            ));
        }
    }

    let plateau_lambda = 1.0;
    let mut plateau = Table::new(&["lambda", "t", "n", "mean", "stderr"]);
    let mut by_t = Vec::new();
    for t in [10.0, 12.0] {
        let runs = runner.replicate(&format!("mean-size/plateau/t={t}"), n, |rng, _| {
            run_cluster_process(RootedMultigraph::create_single(), plateau_lambda, t, rng, &opts).map(|g| g.vertex_count() as f64)
        });
        let ci = mean_ci(&keep_ok(runs, &mut report.cap_exceeded)?)?;
        plateau.push(vec![plateau_lambda.into(), t.into(), n.into(), ci.mean.into(), ci.stderr.into()]);
        by_t.push(ci);
    }
    let (a, b) = (by_t[0], by_t[1]);
    let combined = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    report.checks.push(Check::assert(
        "plateau-t=10-vs-12",
        (b.mean - a.mean).abs() < 2.0 * combined,
        format!("mean(10)={:.4} mean(12)={:.4} 2*stderr={:.4}", a.mean, b.mean, 2.0 * combined),
    ));
    report.sidecars.push((".plateau.csv".into(), plateau.to_csv()));
    if cfg.svg {
        let series = Series {
            name: "M(lambda)".into(),
            points: at_full.iter().map(|(l, ci)| (*l, ci.mean)).collect(),
        };
        report.sidecars.push((".svg".into(), line_chart("mean size of M(lambda)", "lambda", "mean size", &[series], true)));
    }
    report.table = Some(table);
    Ok(report)
}

fn fraction_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Connectivity and isolated vertices of the full process from one vertex.
pub(super) fn threshold(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    let n = cfg.samples();
    let opts = cfg.process_options();
    let mut report = Report::default();
    let mut table = Table::new(&[
        "lambda",
        "t",
        "n",
        "frac_connected",
        "frac_isolated",
        "connected_ci_lo",
        "connected_ci_hi",
        "isolated_ci_lo",
        "isolated_ci_hi",
    ]);
    for lambda in cfg.lambdas_or(&[8.0]) {
        let default_grid: Vec<f64> = [0.0, 0.3, 0.6, 0.9, 1.2].iter().map(|f| f * lambda).collect();
        let mut grid = cfg.times_or(&default_grid);
        grid.sort_by(f64::total_cmp);
        let mut points: Vec<(f64, f64, f64, usize)> = Vec::new();
        for &t in &grid {
            let runs = runner.replicate(&format!("threshold/lambda={lambda}/t={t}"), n, |rng, _| {
                run_full_process(RootedMultigraph::create_single(), lambda, t, rng, &opts).map(|s| {
                    let g = s.graph();
                    (g.is_connected(), g.has_isolated_vertex())
                })
            });
            let flags = keep_ok(runs, &mut report.cap_exceeded)?;
            let m = flags.len();
            let connected = flags.iter().filter(|f| f.0).count();
            let isolated = flags.iter().filter(|f| f.1).count();
            let (c_lo, c_hi) = wilson_ci(connected as u64, m as u64, 1.96)?;
            let (i_lo, i_hi) = wilson_ci(isolated as u64, m as u64, 1.96)?;
            let (fc, fi) = (connected as f64 / m as f64, isolated as f64 / m as f64);
            table.push(vec![
                lambda.into(),
                t.into(),
                m.into(),
                fc.into(),
                fi.into(),
                c_lo.into(),
                c_hi.into(),
                i_lo.into(),
                i_hi.into(),
            ]);
            if t == 0.0 {
                report.checks.push(Check::assert("connected-at-t=0", connected == m, format!("{connected}/{m}")));
            }
            points.push((t, fc, fi, m));
        }
        let trend = points.windows(2).all(|w| {
            let slack = 3.0 * (fraction_se(w[0].2, w[0].3).powi(2) + fraction_se(w[1].2, w[1].3).powi(2)).sqrt();
            w[1].2 >= w[0].2 - slack
        });
        report.checks.push(Check::report(
            format!("isolated-non-decreasing-lambda={lambda}"),
            trend,
            points.iter().map(|p| format!("{}:{:.3}", p.0, p.2)).collect::<Vec<_>>().join(" "),
        ));
        let at = |t: f64| points.iter().find(|p| (p.0 - t).abs() < 1e-9).copied();
        if let (Some(early), Some(late)) = (at(0.6 * lambda), at(1.2 * lambda)) {
            let gap = early.1 - late.1;
            let se = (fraction_se(early.1, early.3).powi(2) + fraction_se(late.1, late.3).powi(2)).sqrt();
            report.checks.push(Check::assert(
                format!("connected-gap-lambda={lambda}"),
                gap - 3.0 * se >= 0.3,
                format!("connected({})-connected({})={gap:.4} 3se={:.4} needs >= 0.3", early.0, late.0, 3.0 * se),
            ));
            let gap = late.2 - early.2;
            report.checks.push(Check::assert(
                format!("isolated-gap-lambda={lambda}"),
                gap >= 0.3,
                format!("isolated({})-isolated({})={gap:.4} needs >= 0.3", late.0, early.0),
            ));
        }
    }
    report.table = Some(table);
    Ok(report)
}

/// Rejection sampling of root degree 2, run in deterministic batches.
fn conditional_double_edges(
    runner: &mut Runner<'_>,
    tag: &str,
    model: LimitModel,
    lambda: f64,
    n: usize,
    cfg: &ExperimentConfig,
    report: &mut Report,
) -> Result<DoubleEdgeEstimate> {
    let caps = cfg.sampler_caps();
    let budget = 200 * n;
    let (mut hits, mut doubles, mut draws) = (0, 0, 0);
    while hits < n {
        if draws >= budget {
            return Err(Error::BudgetExhausted { budget, hits });
        }
        let batch = ((n - hits) * 6).max(64);
        let runs = runner.replicate_range(tag, draws..draws + batch, |rng, _| {
            model.sample(lambda, rng, &caps).map(|(g, _)| root_double_edge(&g))
        });
        for run in runs {
            draws += 1;
            match run {
                Ok(Some(double)) => {
                    hits += 1;
                    doubles += usize::from(double);
                    if hits == n {
                        break;
                    }
                }
                Ok(None) => {}
                Err(Error::SamplerCap { .. }) => report.cap_exceeded += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(double_edge_summary(hits, doubles, draws))
}

/// Conditional on root degree 2, how often both root edges are parallel, for
/// `G(lambda)` and `M(lambda)`.
pub(super) fn double_edge(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    const TWO_SEVENTHS: f64 = 2.0 / 7.0;
    let n = cfg.samples();
    let mut report = Report::default();
    let mut table = Table::new(&["model", "lambda", "hits", "draws", "frequency", "stderr", "ci_lo", "ci_hi"]);
    for lambda in cfg.lambdas_or(&[1.0]) {
        let g = conditional_double_edges(runner, &format!("double-edge/g/lambda={lambda}"), LimitModel::G, lambda, n, cfg, &mut report)?;
        let m = conditional_double_edges(runner, &format!("double-edge/m/lambda={lambda}"), LimitModel::M, lambda, n, cfg, &mut report)?;
        for (name, e) in [("g", &g), ("m", &m)] {
            table.push(vec![
                name.into(),
                lambda.into(),
                e.hits.into(),
                e.draws.into(),
                e.frequency.into(),
                e.stderr.into(),
                e.ci.0.into(),
                e.ci.1.into(),
            ]);
        }
        report.checks.push(Check::assert(
            format!("g-two-sevenths-lambda={lambda}"),
            (g.frequency - TWO_SEVENTHS).abs() <= 3.0 * g.stderr,
            format!("G={:.4} target={TWO_SEVENTHS:.4} 3se={:.4}", g.frequency, 3.0 * g.stderr),
        ));
        report.checks.push(Check::assert(
            format!("m-below-quarter-lambda={lambda}"),
            m.frequency + 3.0 * m.stderr < 0.26,
            format!("M={:.4} upper={:.4} bound=0.26", m.frequency, m.frequency + 3.0 * m.stderr),
        ));
        report.checks.push(Check::assert(
            format!("m-below-g-lambda={lambda}"),
            m.frequency + 3.0 * m.stderr < g.frequency - 3.0 * g.stderr,
            format!("M upper={:.4} G lower={:.4}", m.frequency + 3.0 * m.stderr, g.frequency - 3.0 * g.stderr),
        ));
    }
    report.table = Some(table);
    Ok(report)
}
