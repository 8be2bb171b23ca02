use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hpfmm_cli::commands;
use hpfmm_cli::config::{RawConfig, RunConfig};
use hpfmm_cli::csv::write_atomic;

#[derive(Parser)]
#[command(name = "hpfmm", version, about = "Half-plane impedance FMM runs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// FMM against direct summation on a random system.
    Validate(Common),
    /// Truncation error and bounds for the single-source example.
    Convergence(Common),
    /// Timings over a doubling ladder of system sizes.
    Scaling(Common),
    /// Potential of the eight-circle system on a grid.
    Field(Common),
    /// Mode taken from `--mode` or the config file.
    Run(Common),
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run mode; must agree with the subcommand unless it is `run`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    /// Number of sources.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    threads: Option<usize>,
    /// Extra overrides, `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn configure(mode: Option<&str>, c: &Common) -> Result<RunConfig> {
    let mut raw = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RawConfig::default(),
    };
    match (mode, c.mode.as_deref()) {
        (Some(m), Some(f)) if m != f => bail!("--mode {f} conflicts with the {m} subcommand"),
        (Some(m), _) | (None, Some(m)) => raw.set("mode", m)?,
        (None, None) => {}
    }
    let flags = [
        ("p", c.p.map(|v| v.to_string())),
        ("n_sources", c.n.map(|v| v.to_string())),
        ("seed", c.seed.map(|v| v.to_string())),
        ("out_path", c.out.as_ref().map(|v| v.display().to_string())),
        ("threads", c.threads.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            raw.set(k, v)?;
        }
    }
    for kv in &c.set {
        let (k, v) = kv.split_once('=').with_context(|| format!("--set expects key=value, got {kv:?}"))?;
        raw.set(k.trim(), v.trim())?;
    }
    raw.resolve()
}

fn execute(cli: Cli) -> Result<bool> {
    let (mode, common) = match &cli.cmd {
        Cmd::Validate(c) => (Some("validate"), c),
        Cmd::Convergence(c) => (Some("convergence"), c),
        Cmd::Scaling(c) => (Some("scaling"), c),
        Cmd::Field(c) => (Some("field"), c),
        Cmd::Run(c) => (None, c),
    };
    let cfg = configure(mode, common)?;
    if cfg.threads != 1 {
        rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global()?;
    }
    let report = commands::run(&cfg)?;
    write_atomic(&cfg.out_path, &report.table.render())?;
    let mut rp = cfg.out_path.clone().into_os_string();
    rp.push(".report.txt");
    write_atomic(&PathBuf::from(rp), &report.render())?;
    println!("{}", report.summary);
    Ok(report.pass)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
