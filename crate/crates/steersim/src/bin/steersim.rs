//! Thin command-line wrapper around the steersim library.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime error, 3 I/O.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use steersim::config;
use steersim::engine::{self, SimConfig, SimTrace, SweepSpec};
use steersim::error::{Error, Result};
use steersim::metrics;
use steersim::seed::{derive_seed, stream_rng};
use steersim::traffic::{generate_requests, ArrivalConfig, ContentLibrary, RequestStream};

#[derive(Parser)]
#[command(
    name = "steersim",
    version,
    about = "Multi-access traffic steering simulator"
)]
struct Cli {
    /// Suppress progress output.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation: writes trace.csv, summary.txt, and the resolved
    /// config into the output directory.
    Run(RunArgs),
    /// Run one simulation per sweep point into per-point subdirectories.
    Sweep(SweepArgs),
    /// Check a config file and report every violation.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute the summary of an existing run directory.
    Summarize {
        /// Run directory containing trace.csv and config-resolved.toml.
        #[arg(long)]
        dir: PathBuf,
    },
    /// Generate a replayable request stream CSV.
    GenTraffic(GenTrafficArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated normalized thresholds, e.g. 0.4,0.6,0.8.
    #[arg(long, value_delimiter = ',')]
    thresholds: Vec<f64>,
    /// Worker threads for running sweep points in parallel.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct GenTrafficArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => run_cmd(&args, cli.quiet),
        Command::Sweep(args) => sweep_cmd(&args, cli.quiet),
        Command::ValidateConfig { config } => validate_config_cmd(&config),
        Command::Summarize { dir } => summarize_cmd(&dir),
        Command::GenTraffic(args) => gen_traffic_cmd(&args, cli.quiet),
    }
}

fn write_run_outputs(cfg: &SimConfig, trace: &SimTrace, dir: &Path, quiet: bool) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let hash = config::config_hash(cfg);
    std::fs::write(
        dir.join("config-resolved.toml"),
        config::render_resolved(cfg),
    )
    .map_err(|e| Error::io(dir.join("config-resolved.toml"), e))?;
    let stats_text = toml::to_string(&trace.stats).map_err(|e| Error::Invariant {
        epoch_s: 0.0,
        message: format!("stats serialization failed: {e}"),
    })?;
    std::fs::write(dir.join("stats.toml"), stats_text)
        .map_err(|e| Error::io(dir.join("stats.toml"), e))?;
    let trace_path = dir.join("trace.csv");
    metrics::write_trace(trace, &trace_path)?;
    let rows = metrics::read_trace(&trace_path)?;
    let agv_policy = cfg.policies.for_type(cfg.agv.traffic_type);
    let report = if rows.is_empty() {
        metrics::stats_only_summary(&trace.stats, &hash)
    } else {
        metrics::summarize(&rows, cfg.agv.user_id, agv_policy, &trace.stats, &hash)?
    };
    report.write(&dir.join("summary.txt"))?;
    metrics::export_popularity(&trace.library, &dir.join("popularity.csv"))?;
    if !quiet {
        println!("config_hash {hash}");
        println!("seed {}", cfg.seed);
        println!("trace {}", trace_path.display());
        print!("{}", report.render());
    }
    Ok(())
}

fn run_cmd(args: &RunArgs, quiet: bool) -> Result<()> {
    let cfg = config::load_validated(&args.config, args.seed)?;
    let trace = engine::run(&cfg)?;
    write_run_outputs(&cfg, &trace, &args.out, quiet)
}

fn sweep_cmd(args: &SweepArgs, quiet: bool) -> Result<()> {
    if args.thresholds.is_empty() {
        return Err(Error::invalid(
            "sweep needs at least one --thresholds value",
        ));
    }
    let base = config::load_validated(&args.config, args.seed)?;
    let points: Vec<(usize, SweepSpec)> = args
        .thresholds
        .iter()
        .map(|&q| SweepSpec::NormalizedThreshold(q))
        .enumerate()
        .collect();

    let pending = Mutex::new(points);
    let failures = Mutex::new(Vec::<String>::new());
    let threads = args.threads.max(1);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let Some((idx, spec)) = pending.lock().unwrap().pop() else {
                    break;
                };
                let label = spec.label();
                let result = spec.apply(&base).and_then(|mut cfg| {
                    cfg.seed = derive_seed(base.seed, "sweep", idx as u64);
                    let trace = engine::run(&cfg)?;
                    write_run_outputs(&cfg, &trace, &args.out.join(&label), true)?;
                    Ok(())
                });
                match result {
                    Ok(()) => {
                        if !quiet {
                            println!("point {label}: ok");
                        }
                    }
                    Err(e) => failures.lock().unwrap().push(format!("point {label}: {e}")),
                }
            });
        }
    });
    let failures = failures.into_inner().unwrap();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::Invariant {
            epoch_s: 0.0,
            message: failures.join("\n"),
        })
    }
}

fn validate_config_cmd(path: &Path) -> Result<()> {
    let cfg = config::load(path, None)?;
    let report = cfg.validation_report();
    if report.is_empty() {
        println!("{}: ok", path.display());
        Ok(())
    } else {
        for problem in &report {
            println!("{}: {problem}", path.display());
        }
        Err(Error::InvalidConfig {
            path: path.display().to_string(),
            report: report.join("\n"),
        })
    }
}

fn summarize_cmd(dir: &Path) -> Result<()> {
    let cfg_path = dir.join("config-resolved.toml");
    let text = std::fs::read_to_string(&cfg_path).map_err(|e| Error::io(&cfg_path, e))?;
    let cfg: SimConfig = toml::from_str(&text).map_err(|e| Error::InvalidConfig {
        path: cfg_path.display().to_string(),
        report: e.to_string(),
    })?;
    let rows = metrics::read_trace(&dir.join("trace.csv"))?;
    // The exact byte ledger lives in stats.toml, written by `run`; without
    // it the ledger fields fall back to zero.
    let stats = match std::fs::read_to_string(dir.join("stats.toml")) {
        Ok(text) => toml::from_str(&text).map_err(|e| Error::InvalidConfig {
            path: dir.join("stats.toml").display().to_string(),
            report: e.to_string(),
        })?,
        Err(_) => Default::default(),
    };
    let agv_policy = cfg.policies.for_type(cfg.agv.traffic_type);
    let hash = config::config_hash(&cfg);
    let report = if rows.is_empty() {
        metrics::stats_only_summary(&stats, &hash)
    } else {
        metrics::summarize(&rows, cfg.agv.user_id, agv_policy, &stats, &hash)?
    };
    report.write(&dir.join("summary.txt"))?;
    print!("{}", report.render());
    Ok(())
}

fn gen_traffic_cmd(args: &GenTrafficArgs, quiet: bool) -> Result<()> {
    let cfg = config::load_validated(&args.config, args.seed)?;
    let mut lib_rng = stream_rng(cfg.seed, "library", 0);
    let library = ContentLibrary::generate(
        cfg.library.n_files,
        cfg.library.zipf_alpha,
        cfg.library.size_min_bytes,
        cfg.library.size_max_bytes,
        &mut lib_rng,
    )?;
    let users: Vec<_> = cfg.layout.static_users.iter().map(|(id, _)| *id).collect();
    let stream = if users.is_empty() {
        RequestStream::default()
    } else {
        generate_requests(
            &ArrivalConfig {
                lambda_per_s: cfg.lambda_per_s,
                horizon_s: cfg.duration_s,
                seed: derive_seed(cfg.seed, "traffic", 0),
            },
            &library,
            &users,
        )?
    };
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    stream.write_csv(&args.out)?;
    if !quiet {
        println!("{} requests -> {}", stream.len(), args.out.display());
    }
    Ok(())
}
