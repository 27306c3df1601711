use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use sampled_prophet::{run_with_threads, ExperimentConfig, ExperimentKind, ReportStatus};

#[derive(Debug, Parser)]
#[command(name = "sampled-prophet", version, about = "Run a seeded prophet/OCRS experiment")]
struct Cli {
    /// selectability, prophet-ratio, thresholds-diagnostic, lower-bound or decomposition-stats
    kind: ExperimentKind,
    /// JSON experiment config
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    /// Report JSON path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV table path
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads; all cores when absent
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let text = fs::read_to_string(&cli.config).with_context(|| format!("reading {}", cli.config.display()))?;
    let mut cfg = ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", cli.config.display()))?;
    if let Some(kind) = cfg.kind {
        if kind != cli.kind {
            bail!("config is for {kind}, command line asks for {}", cli.kind);
        }
    }
    cfg.kind = Some(cli.kind);
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    if let Some(eps) = cli.eps {
        cfg.epsilon = eps;
    }
    cfg.validate()?;
    let threads = cli.threads.unwrap_or(0);
    let report = run_with_threads(&cfg, threads)?;
    let json = report.to_json();
    match &cli.out {
        Some(path) => fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => writeln!(io::stdout(), "{json}")?,
    }
    if let Some(path) = &cli.csv {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        report.write_csv(file)?;
    }
    Ok(match &report.status {
        ReportStatus::Ok => ExitCode::SUCCESS,
        ReportStatus::Refused { reason } => {
            eprintln!("refused: {reason}");
            ExitCode::from(3)
        }
        ReportStatus::Error { message } => {
            eprintln!("error: {message}");
            ExitCode::from(4)
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sampled-prophet: {e:#}");
            ExitCode::from(2)
        }
    }
}
