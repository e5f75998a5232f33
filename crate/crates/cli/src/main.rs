//! `eistwist`: run verification suites and export tables.

mod config;
mod context;
mod error;
mod report;
mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use eistwist::{c64, Exec};
use eistwist::dds::{check_fe_with, Lambda};
use eistwist::group::cusp_set;
use serde::Serialize;

use config::{Overrides, RunConfig};
use context::Context;
use error::CliError;
use report::{ensure_dir, write_json, RunMeta, SuiteReport};

#[derive(Parser)]
#[command(name = "eistwist", version, about = "Twisted Eisenstein series and double Dirichlet series on Γ₀(N)+")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    level: Option<u64>,
    /// Tail tolerance for every coset sum.
    #[arg(long)]
    tolerance: Option<f64>,
    /// `RE_MIN:RE_MAX:N,IM_MIN:IM_MAX:N`
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cache: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        RunConfig::load(
            self.config.as_deref(),
            &Overrides {
                level: self.level,
                tolerance: self.tolerance,
                grid: self.grid.clone(),
                out: self.out.clone(),
                cache: self.cache.clone(),
            },
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write `<suite>.json`, `<suite>.meta.json` and CSV tables.
    Run {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Write one table as CSV to stdout; `lambda-grid` gives FE residuals over the s-grid.
    Emit {
        #[arg(value_enum)]
        kind: Emit,
        #[command(flatten)]
        common: Common,
    },
    /// Print the cusps of Γ₀(N)+ as JSON.
    Cusps {
        #[arg(long)]
        level: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Group,
    Psi,
    Eisenstein,
    Fourier,
    Scattering,
    Lambda,
    All,
}

impl Suite {
    fn names(self) -> Vec<&'static str> {
        match self {
            Suite::Group => vec!["group"],
            Suite::Psi => vec!["psi"],
            Suite::Eisenstein => vec!["eisenstein"],
            Suite::Fourier => vec!["fourier"],
            Suite::Scattering => vec!["scattering"],
            Suite::Lambda => vec!["lambda"],
            Suite::All => suites::SUITES.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Fourier,
    Scattering,
    LambdaGrid,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers).build()?)
}

/// Returns whether every check passed.
fn run(suite: Suite, common: &Common) -> Result<bool, CliError> {
    let config = common.load()?;
    let out = ensure_dir(&config.out)?;
    let workers = config.workers;
    let fingerprint = config.fingerprint();
    let ctx = Context::new(config)?;
    let pool = pool(workers)?;
    // suites run concurrently; reports are assembled and written in a fixed order
    let results: Vec<_> = pool.install(|| {
        suite
            .names()
            .into_par_iter()
            .map(|name| {
                let start = Instant::now();
                (name, suites::run_suite(name, &ctx, &out), start.elapsed())
            })
            .collect()
    });
    let stats = ctx.finish()?;
    let mut all_pass = true;
    for (name, checks, elapsed) in results {
        let report = SuiteReport::new(name, ctx.level(), fingerprint.clone(), checks?);
        write_json(&out.join(format!("{name}.json")), &report)?;
        write_json(
            &out.join(format!("{name}.meta.json")),
            &RunMeta::new(name, elapsed, pool.current_num_threads(), stats.clone()),
        )?;
        for c in &report.checks {
            println!("{} {name}: {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        all_pass &= report.pass;
    }
    Ok(all_pass)
}

/// One heatmap cell: `s = x + iy` and the functional-equation residual there.
#[derive(Serialize)]
struct GridRow {
    x: f64,
    y: f64,
    value: f64,
}

fn emit(kind: Emit, common: &Common) -> Result<(), CliError> {
    let config = common.load()?;
    let pool = pool(config.workers)?;
    let ctx = Context::new(config)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    pool.install(|| -> Result<(), CliError> {
        match kind {
            Emit::Fourier => suites::fourier_table(&ctx)?.iter().try_for_each(|r| w.serialize(r))?,
            Emit::Scattering => suites::scattering_table(&ctx)?.iter().try_for_each(|r| w.serialize(r))?,
            Emit::LambdaGrid => {
                let wv = ctx.config.grid.w[0];
                let l = Lambda::new(
                    ctx.params(c64(wv, 0.0)),
                    ctx.symbols()?,
                    ctx.scattering()?,
                    suites::lambda_options(&ctx),
                )?;
                let report = check_fe_with(&l, &suites::s_grid(&ctx), None, Exec::Parallel);
                for r in &report.records {
                    w.serialize(GridRow {
                        x: r.grid_point.s.re,
                        y: r.grid_point.s.im,
                        value: r.residual,
                    })?;
                }
            }
        }
        Ok(())
    })?;
    let bytes = w.into_inner().map_err(|e| CliError::io(std::path::Path::new("<csv>"), e.into_error()))?;
    std::io::stdout()
        .write_all(&bytes)
        .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))?;
    ctx.finish()?;
    Ok(())
}

fn cusps(level: u64) -> Result<(), CliError> {
    if level == 0 {
        return Err(CliError::Config("level must be positive".into()));
    }
    let text = serde_json::to_string_pretty(&cusp_set(level)?).expect("cusps serialize");
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{text}").map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { suite, common } => run(*suite, common),
        Command::Emit { kind, common } => emit(*kind, common).map(|_| true),
        Command::Cusps { level } => cusps(*level).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("eistwist: {e}");
            ExitCode::from(2)
        }
    }
}
