//! `mlab <experiment> [--config <file>]... [--out <path>] [--format json|csv] [--seed <u64>] [--parallel <k>]`
//!
//! `mlab list` prints the registry; `mlab all` runs every experiment. Exit status is 0 when
//! every criterion passes, 1 when any fails or an experiment errors, 2 on config or path errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;

use multiplier_lab::error::Error;
use multiplier_lab::experiments::{
    emit_report, lookup, parse_config, run, ExperimentConfig, Format, Report, EXPERIMENTS,
};

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Parser)]
#[command(name = "mlab", version, about = "Run multiplier-lab experiments")]
struct Cli {
    /// Experiment name, `all`, or `list`.
    experiment: String,
    /// JSON config files; each must name this experiment (any experiment under `all`).
    #[arg(long = "config", value_name = "FILE")]
    configs: Vec<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutFormat,
    /// Overrides the seed of every config.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of configs run concurrently.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

fn configs(cli: &Cli) -> Result<Vec<ExperimentConfig>, Error> {
    let all = cli.experiment == "all";
    if !all {
        lookup(&cli.experiment)?;
    }
    let mut out = Vec::new();
    if cli.configs.is_empty() {
        let names: Vec<&str> = if all {
            EXPERIMENTS.iter().map(|e| e.name).collect()
        } else {
            vec![cli.experiment.as_str()]
        };
        for name in names {
            out.push(ExperimentConfig::new(name, cli.seed.unwrap_or(0), serde_json::json!({}))?);
        }
    }
    for path in &cli.configs {
        let mut c = parse_config(path)?;
        if !all && c.experiment != cli.experiment {
            return Err(Error::Config(format!(
                "{}: config is for `{}`, not `{}`",
                path.display(),
                c.experiment,
                cli.experiment
            )));
        }
        if let Some(s) = cli.seed {
            c.seed = s;
        }
        out.push(c);
    }
    Ok(out)
}

fn run_timed(c: &ExperimentConfig) -> Result<Report, Error> {
    let start = Instant::now();
    let r = run(c);
    eprintln!("{}: {:.3}s", c.experiment, start.elapsed().as_secs_f64());
    r
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.experiment == "list" {
        for e in EXPERIMENTS {
            println!("{:>2}  {:<20} {}", e.criterion, e.name, e.summary);
        }
        return ExitCode::SUCCESS;
    }
    let cfgs = match configs(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("mlab: {e}");
            return ExitCode::from(2);
        }
    };
    let results: Vec<Result<Report, Error>> = if cli.parallel > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(cli.parallel).build() {
            Ok(pool) => pool.install(|| cfgs.par_iter().map(run_timed).collect()),
            Err(e) => {
                eprintln!("mlab: {e}");
                return ExitCode::from(2);
            }
        }
    } else {
        cfgs.iter().map(run_timed).collect()
    };
    let mut reports = Vec::new();
    let mut errored = false;
    for r in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => {
                eprintln!("mlab: {e}");
                errored = true;
            }
        }
    }
    let format = match cli.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    if let Err(e) = emit_report(&reports, format, cli.out.as_deref()) {
        eprintln!("mlab: {e}");
        return ExitCode::from(2);
    }
    for rep in &reports {
        for row in rep.failing() {
            eprintln!("FAIL {}: {}", rep.experiment, row.criterion);
        }
    }
    if errored || !reports.iter().all(Report::passed) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
