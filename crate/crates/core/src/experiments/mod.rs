//! Experiment drivers behind the command-line tool.
//!
//! Every experiment fans its replicas over a rayon pool. Replica `i` of a
//! stage tagged `tag` draws from `replica_stream(derive_seed(seed, tag), i)`
//! and results are collected in replica order, so output depends only on
//! the configuration and not on the number of threads.

mod laws;
mod laws_graph;
pub mod output;
mod sizes;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limit_sampler::SamplerCaps;
use crate::processes::ProcessOptions;
use crate::rng::{derive_seed, replica_stream, RandomStream};

pub use output::{line_chart, Cell, Format, Series, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    MeanSize,
    Threshold,
    Stationarity,
    Convergence,
    DoubleEdge,
    Chain,
    SingletonFree,
    KillTime,
    CrossValidate,
    YuleLaw,
    RootDegree,
    Crossing,
    SpineTail,
}

impl Command {
    pub const ALL: [Command; 14] = [
        Command::Sample,
        Command::MeanSize,
        Command::Threshold,
        Command::Stationarity,
        Command::Convergence,
        Command::DoubleEdge,
        Command::Chain,
        Command::SingletonFree,
        Command::KillTime,
        Command::CrossValidate,
        Command::YuleLaw,
        Command::RootDegree,
        Command::Crossing,
        Command::SpineTail,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Sample => "sample",
            Command::MeanSize => "mean-size",
            Command::Threshold => "threshold",
            Command::Stationarity => "stationarity",
            Command::Convergence => "convergence",
            Command::DoubleEdge => "double-edge",
            Command::Chain => "chain",
            Command::SingletonFree => "singleton-free",
            Command::KillTime => "kill-time",
            Command::CrossValidate => "cross-validate",
            Command::YuleLaw => "yule-law",
            Command::RootDegree => "root-degree",
            Command::Crossing => "crossing",
            Command::SpineTail => "spine-tail",
        }
    }

    /// Replica count used when `--samples` is not given.
    pub fn default_samples(self) -> usize {
        match self {
            Command::Sample => 10,
            Command::Threshold => 2_000,
            Command::KillTime => 10_000,
            Command::DoubleEdge => 40_000,
            Command::Crossing => 1_000,
            _ => 100_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    M,
    G,
    Cluster,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    /// Empty means the command's default list.
    pub lambdas: Vec<f64>,
    /// Empty means the command's default list.
    pub times: Vec<f64>,
    pub samples: Option<usize>,
    pub seed: u64,
    /// 0 lets rayon decide.
    pub threads: usize,
    pub max_spine: usize,
    pub max_vertices: usize,
    pub kind: SampleKind,
    pub diagnostics: bool,
    pub svg: bool,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            lambdas: Vec::new(),
            times: Vec::new(),
            samples: None,
            seed: 1,
            threads: 0,
            max_spine: crate::limit_sampler::DEFAULT_MAX_SPINE,
            max_vertices: crate::processes::DEFAULT_MAX_VERTICES,
            kind: SampleKind::M,
            diagnostics: false,
            svg: false,
        }
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or_else(|| self.command.default_samples())
    }

    pub fn lambdas_or(&self, default: &[f64]) -> Vec<f64> {
        if self.lambdas.is_empty() {
            default.to_vec()
        } else {
            self.lambdas.clone()
        }
    }

    pub fn times_or(&self, default: &[f64]) -> Vec<f64> {
        if self.times.is_empty() {
            default.to_vec()
        } else {
            self.times.clone()
        }
    }

    pub fn sampler_caps(&self) -> SamplerCaps {
        SamplerCaps {
            max_spine: self.max_spine,
            ..SamplerCaps::default()
        }
    }

    pub fn process_options(&self) -> ProcessOptions {
        ProcessOptions {
            max_vertices: self.max_vertices,
            ..ProcessOptions::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples() == 0 {
            return Err(Error::Domain("samples must be at least 1".into()));
        }
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::Domain(format!("lambda must be positive, got {l}")));
        }
        if let Some(t) = self.times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(Error::Domain(format!("t must be non-negative, got {t}")));
        }
        Ok(())
    }
}

/// One asserted (or merely reported) pass/fail statement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Reported checks never affect the exit status.
    pub asserted: bool,
    pub detail: String,
}

impl Check {
    pub fn assert(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            asserted: true,
            detail: detail.into(),
        }
    }

    pub fn report(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            asserted: false,
            ..Check::assert(name, passed, detail)
        }
    }

    /// `RESULT <command> <check> PASS|FAIL|INFO-PASS|INFO-FAIL <detail>`
    pub fn line(&self, command: Command) -> String {
        let verdict = match (self.asserted, self.passed) {
            (true, true) => "PASS",
            (true, false) => "FAIL",
            (false, true) => "INFO-PASS",
            (false, false) => "INFO-FAIL",
        };
        format!("RESULT {} {} {} {}", command.name(), self.name, verdict, self.detail)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub table: Option<Table>,
    /// Primary output for commands that emit documents instead of a table.
    pub documents: Option<String>,
    /// Extra outputs as `(file suffix, content)`.
    pub sidecars: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub cap_exceeded: usize,
    pub seeds: BTreeMap<String, u64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.asserted)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn primary(&self, format: Format) -> String {
        match (&self.documents, &self.table) {
            (Some(d), _) => d.clone(),
            (None, Some(t)) => t.render(format),
            (None, None) => String::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub version: &'static str,
    pub seeds: BTreeMap<String, u64>,
    pub wall_clock_seconds: f64,
    pub cap_exceeded: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Runs replicas of one experiment stage and keeps track of the seeds used.
pub struct Runner<'a> {
    seed: u64,
    seeds: &'a mut BTreeMap<String, u64>,
}

impl Runner<'_> {
    /// `f(stream, index)` for `index in 0..n`, results in index order.
    pub fn replicate<T, F>(&mut self, tag: &str, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut RandomStream, usize) -> T + Sync,
    {
        self.replicate_range(tag, 0..n, f)
    }

    /// As [`Runner::replicate`] for replica indices in `range`, so that a stage
    /// can be extended batch by batch.
    pub fn replicate_range<T, F>(&mut self, tag: &str, range: std::ops::Range<usize>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut RandomStream, usize) -> T + Sync,
    {
        let stage = derive_seed(self.seed, tag);
        self.seeds.insert(tag.to_string(), stage);
        range
            .into_par_iter()
            .map(|i| {
                let mut rng = replica_stream(stage, i as u64);
                f(&mut rng, i)
            })
            .collect()
    }

    /// A single stream for a sequential stage.
    pub fn stream(&mut self, tag: &str) -> RandomStream {
        let stage = derive_seed(self.seed, tag);
        self.seeds.insert(tag.to_string(), stage);
        replica_stream(stage, 0)
    }
}

/// Drop failed replicas, counting cap failures; other errors are returned.
pub(crate) fn keep_ok<T>(results: Vec<Result<T>>, cap_exceeded: &mut usize) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => out.push(v),
            Err(Error::VertexCap { .. } | Error::PopulationCap { .. } | Error::SamplerCap { .. }) => *cap_exceeded += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Run one experiment. The returned manifest is enough to rerun it.
pub fn run(cfg: &ExperimentConfig) -> Result<(Report, RunManifest)> {
    cfg.validate()?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let mut seeds = BTreeMap::new();
    let mut report = pool.install(|| {
        let mut runner = Runner {
            seed: cfg.seed,
            seeds: &mut seeds,
        };
        dispatch(cfg, &mut runner)
    })?;
    let total = cfg.samples().max(1);
    if report.cap_exceeded * 100 > total {
        report.checks.push(Check::assert(
            "caps",
            false,
            format!("{} of {} replicas exceeded caps", report.cap_exceeded, total),
        ));
    }
    report.seeds = seeds.clone();
    let manifest = RunManifest {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION"),
        seeds,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        cap_exceeded: report.cap_exceeded,
        checks: report.checks.clone(),
        passed: report.passed(),
    };
    Ok((report, manifest))
}

fn dispatch(cfg: &ExperimentConfig, runner: &mut Runner<'_>) -> Result<Report> {
    match cfg.command {
        Command::Sample => sizes::sample(cfg, runner),
        Command::MeanSize => sizes::mean_size(cfg, runner),
        Command::Threshold => sizes::threshold(cfg, runner),
        Command::DoubleEdge => sizes::double_edge(cfg, runner),
        Command::Stationarity => laws_graph::stationarity(cfg, runner),
        Command::Convergence => laws_graph::convergence(cfg, runner),
        Command::CrossValidate => laws_graph::cross_validate(cfg, runner),
        Command::RootDegree => laws_graph::root_degree(cfg, runner),
        Command::SpineTail => laws_graph::spine_tail(cfg, runner),
        Command::Chain => laws::chain(cfg, runner),
        Command::SingletonFree => laws::singleton_free(cfg, runner),
        Command::KillTime => laws::kill_time(cfg, runner),
        Command::YuleLaw => laws::yule_law(cfg, runner),
        Command::Crossing => laws::crossing(cfg, runner),
    }
}
