//! `qtanner`: Monte Carlo driver for quantum GLDPC decoders.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qtanner::code::resolve_code;
use qtanner::harness::io::{read_curve_csv, write_convergence_csv, write_curve_csv, write_meta};
use qtanner::harness::{convergence_study, pseudothreshold, run_sweep_on, DecoderKind, ExperimentConfig};

#[derive(Parser)]
#[command(name = "qtanner", version, about = "Simulate decoders for quantum GLDPC codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate BLER over a grid of physical error rates.
    Sim(SimArgs),
    /// Locate where a BLER curve crosses k unprotected qubits.
    Threshold {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// BLER against the iteration cap on common error samples.
    Convergence {
        #[command(flatten)]
        run: SimArgs,
        /// Inclusive range `a:b` or a list `n1,n2,...`.
        #[arg(long, default_value = "1:20")]
        iters_grid: String,
    },
    /// Load a code file and run its invariant checks.
    Validate {
        #[arg(long)]
        code: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OsdStrategyArg {
    Cs,
    Exhaustive,
}

#[derive(Args)]
struct SimArgs {
    /// A code file or `builtin:NAME`.
    #[arg(long)]
    code: String,
    #[arg(long, value_parser = parse_decoder)]
    decoder: DecoderKind,
    /// Comma-separated physical error rates.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    p: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Defaults to 20 for SOGRAND decoders and 100 for BP.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    list_size: Option<usize>,
    #[arg(long)]
    query_budget: Option<usize>,
    #[arg(long)]
    osd_order: Option<usize>,
    #[arg(long, value_enum, default_value = "cs")]
    osd_strategy: OsdStrategyArg,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop a point after this many failures.
    #[arg(long)]
    max_failures: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV; a `.meta.json` sidecar is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_decoder(s: &str) -> Result<DecoderKind, String> {
    s.parse().map_err(|e: qtanner::harness::HarnessError| e.to_string())
}

impl SimArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(self.code.clone(), self.decoder);
        cfg.p_grid = self.p.clone();
        cfg.trials = self.trials;
        cfg.iters = self.iters;
        if let Some(l) = self.list_size {
            cfg.list_size = l;
        }
        if self.query_budget.is_some() {
            cfg.query_budget = self.query_budget;
        }
        if let Some(w) = self.osd_order {
            cfg.osd_order = w;
        }
        cfg.osd_exhaustive = matches!(self.osd_strategy, OsdStrategyArg::Exhaustive);
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        cfg.seed = self.seed;
        cfg.max_failures = self.max_failures;
        cfg.validate()?;
        Ok(cfg)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            if t == 0 {
                bail!("--threads must be at least 1");
            }
            b = b.num_threads(t);
        }
        Ok(b.build()?)
    }
}

fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let grid: Vec<usize> = match s.split_once(':') {
        Some((a, b)) => {
            let a: usize = a.trim().parse().context("bad grid start")?;
            let b: usize = b.trim().parse().context("bad grid end")?;
            (a..=b).collect()
        }
        None => s.split(',').map(|x| x.trim().parse().with_context(|| format!("bad grid entry `{x}`"))).collect::<Result<_>>()?,
    };
    if grid.is_empty() || grid.contains(&0) {
        bail!("iteration grid `{s}` must be non-empty and positive");
    }
    Ok(grid)
}

fn sim(args: &SimArgs) -> Result<()> {
    let cfg = args.config()?;
    let code = resolve_code(&cfg.code)?;
    let points = args.pool()?.install(|| run_sweep_on(&code, &cfg))?;
    for pt in &points {
        eprintln!(
            "p={} {}: {}/{} failures, bler {:.3e} [{:.3e}, {:.3e}]",
            pt.p, pt.decoder, pt.failures, pt.trials, pt.bler, pt.ci_low, pt.ci_high
        );
    }
    match &args.out {
        Some(out) => {
            write_curve_csv(out, &points)?;
            write_meta(out, "sweep", &cfg, None)?;
        }
        None => print!("{}", qtanner::harness::io::curve_to_csv(&points)),
    }
    Ok(())
}

fn convergence(args: &SimArgs, grid: &str) -> Result<()> {
    let grid = parse_grid(grid)?;
    let cfg = args.config()?;
    let code = resolve_code(&cfg.code)?;
    let rows = args.pool()?.install(|| convergence_study(&code, &cfg, &grid))?;
    match &args.out {
        Some(out) => {
            write_convergence_csv(out, &rows)?;
            write_meta(out, "convergence", &cfg, Some(&grid))?;
        }
        None => print!("{}", qtanner::harness::io::convergence_to_csv(&rows)),
    }
    Ok(())
}

fn threshold(input: &Path, k: usize) -> Result<()> {
    let points = read_curve_csv(input)?;
    let mut curves: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for pt in &points {
        curves.entry(pt.decoder.as_str()).or_default().push((pt.p, pt.bler));
    }
    if curves.is_empty() {
        bail!("{}: no curve points", input.display());
    }
    println!("decoder,k,p_th");
    let mut missing = Vec::new();
    for (decoder, curve) in curves {
        match pseudothreshold(&curve, k) {
            Ok(p) => println!("{decoder},{k},{p:e}"),
            Err(e) => {
                println!("{decoder},{k},");
                missing.push(format!("{decoder}: {e}"));
            }
        }
    }
    if !missing.is_empty() {
        bail!("{}", missing.join("; "));
    }
    Ok(())
}

fn validate(spec: &str) -> Result<()> {
    let code = resolve_code(spec)?;
    println!(
        "{}: n={} k={} d={}, X graph {} checks of length {}, Z graph {} checks of length {}",
        code.name(),
        code.n(),
        code.k(),
        code.d(),
        code.x_graph().m(),
        code.x_graph().component().n(),
        code.z_graph().m(),
        code.z_graph().component().n(),
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sim(args) => sim(args),
        Command::Threshold { input, k } => threshold(input, *k),
        Command::Convergence { run, iters_grid } => convergence(run, iters_grid),
        Command::Validate { code } => validate(code),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
