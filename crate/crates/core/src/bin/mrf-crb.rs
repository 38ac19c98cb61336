use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mrf_crb::estimators::Bandwidth;
use mrf_crb::experiments::{parse_theta_grid, run_experiment, ExperimentConfig, LatticeSize, Mode};
use mrf_crb::lattice::Boundary;
use mrf_crb::samplers::SamplerKind;
use mrf_crb::{Error, Result};

/// Monte Carlo Fisher information and Cramér-Rao bounds for Potts fields.
#[derive(Parser)]
#[command(name = "mrf-crb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo FIM and CRB per (theta, seed).
    Estimate(Common),
    /// Exact FIM and CRB by enumeration (small lattices only).
    Exact(Common),
    /// Monte Carlo CRB over a theta grid, with exact values when tractable.
    Sweep(Common),
    /// Monte Carlo versus exact over a theta grid, with pass/fail.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Relative error tolerance.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
    /// CRB against field size for several label counts.
    Scaling {
        #[command(flatten)]
        common: Common,
        /// Comma-separated sizes, e.g. 16x16,32x32,64x64.
        #[arg(long, default_value = "16x16,32x32,64x64")]
        sizes: String,
        /// Comma-separated label counts.
        #[arg(long, default_value = "2,3,4")]
        ks: String,
    },
    /// Exchange-algorithm ML estimator variance against the CRB.
    Benchmark {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        bench: BenchArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Ising,
    Potts,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "ising")]
    model: ModelArg,
    /// Number of labels (Potts only; defaults to 3).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "32x32")]
    size: String,
    /// torus or free.
    #[arg(long, default_value = "torus")]
    boundary: String,
    /// `a:b:n` or a comma list.
    #[arg(long)]
    theta: Option<String>,
    /// gibbs, gibbs_random or sw.
    #[arg(long)]
    sampler: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    nmc: usize,
    #[arg(long, default_value_t = 1000)]
    burn: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Independent chains per grid point.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    /// Output directory; without it the CSV goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write every chain's sufficient-statistic trace into --out.
    #[arg(long)]
    dump_chains: bool,
    /// Start chains from this labelled field instead of a uniform draw.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Suppress progress lines on standard error.
    #[arg(long, short)]
    quiet: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Observed fields (replicates).
    #[arg(long, default_value_t = 100)]
    nml: usize,
    /// Gibbs sweeps used to draw each observed field.
    #[arg(long, default_value_t = 1000)]
    field_sweeps: usize,
    #[arg(long, default_value_t = 1000)]
    post_samples: usize,
    #[arg(long, default_value_t = 250)]
    post_burn: usize,
    /// Gibbs sweeps per auxiliary draw.
    #[arg(long, default_value_t = 10)]
    aux_moves: usize,
    #[arg(long, default_value_t = 0.05)]
    proposal_sd: f64,
    /// Fixed KDE bandwidth; Silverman's rule if unset.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Upper end of the flat prior; ln(1 + sqrt K) if unset.
    #[arg(long)]
    theta_max: Option<f64>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad {what} `{t}`"))))
        .collect()
}

fn base_config(mode: Mode, c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(mode);
    cfg.num_labels = match (c.model, c.k) {
        (ModelArg::Ising, None | Some(2)) => 2,
        (ModelArg::Ising, Some(k)) => {
            return Err(Error::InvalidParameter(format!("ising model has K = 2, got --k {k}")))
        }
        (ModelArg::Potts, k) => k.unwrap_or(3),
    };
    cfg.size = c.size.parse::<LatticeSize>()?;
    cfg.boundary = c.boundary.parse::<Boundary>()?;
    if let Some(t) = &c.theta {
        cfg.thetas = parse_theta_grid(t)?;
    }
    cfg.sampler = c.sampler.as_deref().map(str::parse::<SamplerKind>).transpose()?;
    cfg.n_mc = c.nmc;
    cfg.n_burn = c.burn;
    cfg.seed = c.seed;
    cfg.n_seeds = c.seeds;
    cfg.out_dir = c.out.clone();
    cfg.dump_chains = c.dump_chains;
    cfg.initial_field = c.init.clone();
    if c.dump_chains && c.out.is_none() {
        return Err(Error::InvalidParameter("--dump-chains needs --out".into()));
    }
    Ok(cfg)
}

fn build(command: &Command) -> Result<(ExperimentConfig, &Common)> {
    Ok(match command {
        Command::Estimate(c) => (base_config(Mode::Estimate, c)?, c),
        Command::Exact(c) => (base_config(Mode::Exact, c)?, c),
        Command::Sweep(c) => (base_config(Mode::Sweep, c)?, c),
        Command::Validate { common, tol } => {
            let mut cfg = base_config(Mode::Validate, common)?;
            cfg.tolerance = *tol;
            (cfg, common)
        }
        Command::Scaling { common, sizes, ks } => {
            let mut cfg = base_config(Mode::Scaling, common)?;
            cfg.sizes = parse_list(sizes, "size")?;
            cfg.label_counts = parse_list(ks, "label count")?;
            (cfg, common)
        }
        Command::Benchmark { common, bench } => {
            let mut cfg = base_config(Mode::Benchmark, common)?;
            let b = &mut cfg.benchmark;
            b.n_ml = bench.nml;
            b.field_sweeps = bench.field_sweeps;
            b.post_samples = bench.post_samples;
            b.post_burn = bench.post_burn;
            b.aux_moves = bench.aux_moves;
            b.proposal_sd = bench.proposal_sd;
            b.bandwidth = bench.bandwidth.map_or(Bandwidth::Auto, Bandwidth::Fixed);
            b.theta_max = bench.theta_max;
            (cfg, common)
        }
    })
}

fn run(cli: &Cli) -> Result<()> {
    let (config, common) = build(&cli.command)?;
    let quiet = common.quiet;
    let progress = move |line: &str| {
        if !quiet {
            eprintln!("{line}");
        }
    };
    let output = run_experiment(&config, &progress)?;
    match &config.out_dir {
        Some(dir) => {
            output.write_files(&config, dir)?;
            progress(&format!("wrote {}/{}.csv and .json", dir.display(), config.mode));
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            output.write_csv(&config, &mut lock)?;
            lock.flush()?;
        }
    }
    if let Some(pass) = output.summary.get("pass").and_then(|p| p.as_bool()) {
        progress(if pass { "validation: PASS" } else { "validation: FAIL" });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mrf-crb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
