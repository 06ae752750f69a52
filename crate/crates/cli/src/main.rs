use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fluctlab::error::{Error, Result};
use fluctlab::experiment::{self, ExperimentConfig, Format, ReportBundle, Stage};

/// Ladder height processes of spectrally positive Lévy processes: analytic
/// tables, exact simulation and Monte Carlo convergence checks.
#[derive(Parser)]
#[command(name = "fluctlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic tables and characteristic gaps only.
    Calc(Common),
    /// Write rescaled sample paths (default 100 per n).
    Simulate(Common),
    /// Write ladder points up to the local-time horizon (default 100 per n).
    Ladder(Common),
    /// Fixed-n Monte Carlo checks.
    Verify(Common),
    /// Checks over the n-grid with tracked marginals and trends.
    Converge(Common),
    /// Everything, plus the limit sampler check.
    All(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "ID")]
    preset: Option<String>,
    /// Comma separated, e.g. 4,16,64.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    #[arg(long, value_name = "N")]
    paths: Option<usize>,
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "LIST", default_value = "csv,json")]
    format: String,
}

const DUMP_PATHS: usize = 100;

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(p) = &self.preset {
            c.preset = p.clone();
        }
        if let Some(g) = &self.n_grid {
            c.n_grid = g.clone();
        }
        if let Some(p) = self.paths {
            c.paths_per_n = Some(p);
        }
        if let Some(s) = self.seed {
            c.seed_base = s;
        }
        if let Some(o) = &self.out {
            c.output_dir = o.clone();
        }
        Ok(c)
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("FLUCTLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Usage(format!("FLUCTLAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))
}

fn print_bundle(bundle: &ReportBundle) {
    for r in &bundle.reports {
        println!(
            "n={:<4} {:<28} {:<14} value={:<12.6} threshold={:<12.6} {}",
            r.n,
            r.label,
            r.metric.name(),
            r.value,
            r.threshold,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    for t in &bundle.trends {
        println!(
            "trend {:<28} n={}→{}: {:.4e} → {:.4e} {}",
            t.label,
            t.first_n,
            t.last_n,
            t.first,
            t.last,
            if t.pass { "pass" } else { "FAIL" }
        );
    }
    if let Some(f) = &bundle.failure {
        eprintln!("error: {}", f.message);
    }
    println!("verdict: {}", bundle.verdict.name());
}

fn run(cli: Cli) -> Result<i32> {
    configure_threads()?;
    let (common, stage) = match &cli.command {
        Command::Calc(c) => (c, Some(Stage::Calc)),
        Command::Verify(c) => (c, Some(Stage::Verify)),
        Command::Converge(c) => (c, Some(Stage::Converge)),
        Command::All(c) => (c, Some(Stage::All)),
        Command::Simulate(c) | Command::Ladder(c) => (c, None),
    };
    let config = common.config()?;
    let formats = Format::parse_list(&common.format)?;
    let out = config.output_dir.clone();
    let Some(stage) = stage else {
        let count = config.paths_per_n.unwrap_or(DUMP_PATHS);
        let files = match cli.command {
            Command::Simulate(_) => experiment::dump_paths(&config, count, &out)?,
            _ => experiment::dump_ladders(&config, count, &out)?,
        };
        for f in files {
            eprintln!("wrote {}", f.display());
        }
        return Ok(0);
    };
    let resume = (stage != Stage::Calc).then_some(out.as_path());
    let bundle = experiment::run_experiment(&config, stage, resume)?;
    print_bundle(&bundle);
    for f in experiment::emit_outputs(&bundle, &formats, &out)? {
        eprintln!("wrote {}", f.display());
    }
    Ok(bundle.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
