//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical
//! non-convergence, 4 validation or self-test failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::ConfigFile;
use crate::coverage::CoverageOptions;
use crate::error::{Error, Result};
use crate::montecarlo::McSpec;
use crate::selftest::Check;
use crate::sweep::{figure_preset, parse_grid, run_to_file, Axis, Methods, Quantity, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Analytic,
    Mc,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    /// Coverage with nearest-UAV association.
    PCov,
    /// Cell-free coverage.
    PCf,
}

#[derive(Debug, Parser)]
#[command(name = "uav3d", version, about = "Coverage of UAV networks modeled by marked 3D Poisson point processes")]
pub struct Cli {
    /// TOML configuration; reference parameters when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Monte Carlo drops per estimate.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub drops: usize,
    /// Worker threads; all logical cores when omitted.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Evaluation method; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    /// Relative tolerance of the numerical integrals.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage at the configured point.
    Coverage {
        #[arg(long, value_enum, default_value = "p-cov")]
        quantity: QuantityArg,
        /// Also report the lower bound.
        #[arg(long)]
        bound: bool,
    },
    /// Coverage over a grid of one parameter.
    Sweep {
        /// theta_bar, h_bar, lambda, beta_db or n_antennas.
        #[arg(long)]
        axis: String,
        /// Explicit list `a,b,c` or range `min:max:count[:log]`.
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value = "p-cov")]
        quantity: QuantityArg,
        #[arg(long)]
        bound: bool,
    },
    /// Preset sweep reproducing one figure (fig2a ... fig6b).
    Figure { id: String },
    /// Monte Carlo against analytic cross-checks.
    Validate,
    /// Inversion and derivative known-answer corpus.
    Selftest,
}

fn methods(arg: Option<MethodArg>, default: Methods) -> Methods {
    match arg {
        None => default,
        Some(MethodArg::Analytic) => Methods { analytic: true, mc: false, ..default },
        Some(MethodArg::Mc) => Methods { analytic: false, mc: true, ..default },
        Some(MethodArg::Both) => Methods { analytic: true, mc: true, ..default },
    }
}

fn quantity(q: QuantityArg) -> Quantity {
    match q {
        QuantityArg::PCov => Quantity::Coverage,
        QuantityArg::PCf => Quantity::CellFree,
    }
}

fn options(cli: &Cli) -> Result<CoverageOptions> {
    match cli.tol {
        None => Ok(CoverageOptions::default()),
        Some(t) if t > 0.0 && t < 1.0 => Ok(CoverageOptions::default().with_tolerance(t)),
        Some(t) => Err(Error::Config(format!("--tol must lie in (0, 1), got {t}"))),
    }
}

fn mc_spec(cli: &Cli) -> Result<McSpec> {
    if cli.drops < 100 {
        return Err(Error::Config(format!("--drops must be at least 100, got {}", cli.drops)));
    }
    Ok(McSpec::default().with_drops(cli.drops).with_seed(cli.seed))
}

fn base_config(cli: &Cli) -> Result<ConfigFile> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    cfg.resolve()?;
    Ok(cfg)
}

fn output_path(dir: &Path, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}

fn report(checks: &[Check]) -> i32 {
    for c in checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {} failed", checks.len(), failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let opts = options(cli)?;
    let mc = mc_spec(cli)?;
    let (spec, label, file) = match &cli.command {
        Command::Validate => {
            println!("validation suite, {} drops per estimate, seed {}", mc.drops, mc.seed);
            return Ok(report(&crate::validation::run(mc.drops, mc.seed, &opts)));
        }
        Command::Selftest => return Ok(report(&crate::selftest::run())),
        Command::Coverage { quantity: q, bound } => {
            let m = methods(cli.method, Methods { bound: *bound, ..Methods::ANALYTIC });
            let spec = SweepSpec { base: base_config(cli)?, axes: vec![], quantity: quantity(*q), methods: m };
            (spec, "coverage".to_string(), "coverage.csv".to_string())
        }
        Command::Sweep { axis, grid, quantity: q, bound } => {
            let axis: Axis = axis.parse()?;
            let m = methods(cli.method, Methods { bound: *bound, ..Methods::ANALYTIC });
            let spec = SweepSpec {
                base: base_config(cli)?,
                axes: vec![(axis, parse_grid(axis, grid)?)],
                quantity: quantity(*q),
                methods: m,
            };
            let name = axis.column();
            (spec, format!("sweep {name} {grid}"), format!("sweep_{name}.csv"))
        }
        Command::Figure { id } => {
            if cli.config.is_some() {
                return Err(Error::Config("figure presets use the reference parameters; drop --config".into()));
            }
            let mut spec = figure_preset(id)?;
            spec.methods = methods(cli.method, spec.methods);
            (spec, format!("figure {id}"), format!("{id}.csv"))
        }
    };
    let path = output_path(&cli.out, &file)?;
    let rows = run_to_file(&spec, &label, &opts, &mc, &path)?;
    log::info!("{} rows", rows.len());
    println!("{}", path.display());
    Ok(EXIT_OK)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            }
        }
    }
}
