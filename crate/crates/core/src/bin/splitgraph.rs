use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use splitgraph::experiments::{self, Command, ExperimentConfig, Format, SampleKind};

#[derive(Parser)]
#[command(name = "splitgraph", version, about = "Vertex-splitting graph processes and their invariant limits")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Edge intensity; repeat or comma-separate for a list.
    #[arg(long, global = true, value_delimiter = ',')]
    lambda: Vec<f64>,
    /// Time horizon; repeat or comma-separate for a list.
    #[arg(long = "t", global = true, value_delimiter = ',')]
    t: Vec<f64>,
    /// Replicas per configuration (command default when omitted).
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads, 0 for all cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, default_value_t = splitgraph::limit_sampler::DEFAULT_MAX_SPINE)]
    max_spine: usize,
    #[arg(long, global = true, default_value_t = splitgraph::processes::DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    /// Output file; sidecars and the manifest are written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write sampler diagnostics as a JSON-lines sidecar.
    #[arg(long, global = true)]
    diagnostics: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    M,
    G,
    Cluster,
}

#[derive(Subcommand)]
enum Sub {
    /// Emit sampled graphs as JSON documents, one per line.
    Sample {
        #[arg(long, value_enum, default_value_t = KindArg::M)]
        kind: KindArg,
    },
    /// Mean size of M(lambda) over a list of lambdas.
    MeanSize {
        /// Also write an SVG chart of mean size against lambda.
        #[arg(long)]
        svg: bool,
    },
    /// Connectivity and isolated vertices of the full process over a time grid.
    Threshold,
    /// M(lambda) against its cluster-process evolution and the prefixed sampler.
    Stationarity,
    /// Root cluster from fixed starts against M(lambda) over a time grid.
    Convergence,
    /// Conditional double-edge frequency for G(lambda) and M(lambda).
    DoubleEdge,
    /// Stationarity and burn-in of the root-degree chain.
    Chain,
    /// Mean size of the singleton-free process against its Yule bound.
    SingletonFree,
    /// Killing of the initial old edges.
    KillTime,
    /// Event-driven cluster sampler against the genealogical-tree sampler.
    CrossValidate,
    /// Size law of the full process from one vertex.
    YuleLaw,
    /// Root degree of M(lambda).
    RootDegree,
    /// Crossing rates of random Yule trees.
    Crossing,
    /// Tail of the spine length used by the M(lambda) sampler.
    SpineTail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let (command, kind, svg) = match cli.command {
        Sub::Sample { kind } => (
            Command::Sample,
            match kind {
                KindArg::M => SampleKind::M,
                KindArg::G => SampleKind::G,
                KindArg::Cluster => SampleKind::Cluster,
            },
            false,
        ),
        Sub::MeanSize { svg } => (Command::MeanSize, SampleKind::M, svg),
        Sub::Threshold => (Command::Threshold, SampleKind::M, false),
        Sub::Stationarity => (Command::Stationarity, SampleKind::M, false),
        Sub::Convergence => (Command::Convergence, SampleKind::M, false),
        Sub::DoubleEdge => (Command::DoubleEdge, SampleKind::M, false),
        Sub::Chain => (Command::Chain, SampleKind::M, false),
        Sub::SingletonFree => (Command::SingletonFree, SampleKind::M, false),
        Sub::KillTime => (Command::KillTime, SampleKind::M, false),
        Sub::CrossValidate => (Command::CrossValidate, SampleKind::M, false),
        Sub::YuleLaw => (Command::YuleLaw, SampleKind::M, false),
        Sub::RootDegree => (Command::RootDegree, SampleKind::M, false),
        Sub::Crossing => (Command::Crossing, SampleKind::M, false),
        Sub::SpineTail => (Command::SpineTail, SampleKind::M, false),
    };
    let config = ExperimentConfig {
        lambdas: c.lambda.clone(),
        times: c.t.clone(),
        samples: c.samples,
        seed: c.seed,
        threads: c.threads,
        max_spine: c.max_spine,
        max_vertices: c.max_vertices,
        kind,
        diagnostics: c.diagnostics,
        svg,
        ..ExperimentConfig::new(command)
    };
    let format = match c.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    match run(&config, format, c.out.as_ref()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(config: &ExperimentConfig, format: Format, out: Option<&PathBuf>) -> splitgraph::Result<bool> {
    let (report, manifest) = experiments::run(config)?;
    let manifest = serde_json::to_string_pretty(&manifest)?;
    match out {
        Some(path) => {
            std::fs::write(path, report.primary(format))?;
            for (suffix, content) in &report.sidecars {
                std::fs::write(with_suffix(path, suffix), content)?;
            }
            std::fs::write(with_suffix(path, ".manifest.json"), manifest + "\n")?;
        }
        None => {
            print!("{}", report.primary(format));
            for (suffix, _) in &report.sidecars {
                eprintln!("note: {suffix} output needs --out");
            }
        }
    }
    for check in &report.checks {
        eprintln!("{}", check.line(config.command));
    }
    Ok(report.passed())
}

fn with_suffix(path: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
