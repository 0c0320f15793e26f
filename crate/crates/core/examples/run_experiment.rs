//! Drive an experiment from code rather than the command line and print its
//! table and checks.
//!
//! cargo run --example run_experiment -- cross-validate 20000

use splitgraph::experiments::{run, Command, ExperimentConfig, Format};

fn main() -> splitgraph::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "yule-law".into());
    let command = Command::ALL
        .into_iter()
        .find(|c| c.name() == name)
        .unwrap_or_else(|| panic!("unknown experiment {name}"));
    let mut cfg = ExperimentConfig::new(command);
    cfg.samples = args.next().map(|s| s.parse().expect("sample count"));
    let (report, manifest) = run(&cfg)?;
    print!("{}", report.primary(Format::Csv));
    for check in &report.checks {
        println!("{}", check.line(command));
    }
    println!("{:.1}s, seeds {:?}", manifest.wall_clock_seconds, manifest.seeds);
    Ok(())
}
