//! `fbnoma` — finite-blocklength NOMA/OMA designs, figure sweeps, and the
//! solver-vs-oracle check.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when a single
//! fixed-gain solve is infeasible (sweeps always exit 0).

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};
use fbnoma_cli::config::{self, Overrides, Resolved};
use fbnoma_cli::oracle_check::{self, OracleCheckOpts};
use fbnoma_cli::{plot, presets, report, sweep};
use fbnoma_core::channel::{db_to_linear, monte_carlo_average, Scheme};
use fbnoma_core::fbl::Blocklength;
use fbnoma_core::model::SystemParams;
use fbnoma_core::noma::{optimize_noma_with_scan, Tolerances};
use fbnoma_core::oma::{optimize_oma, optimize_oma_fixed_slots};
use fbnoma_core::oracle::GridSpec;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fbnoma",
    version,
    about = "Two-user downlink NOMA with finite blocklength: optimal designs, OMA benchmarks, figure sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and print the design
    Solve(SolveArgs),
    /// Sweep a variable (or run a figure preset) and write CSV + SVG
    Sweep(SweepArgs),
    /// List the built-in figure presets and their parameters
    Presets,
    /// Compare the solvers against the brute-force grids
    OracleCheck(OracleCheckArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// TOML config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Channel coefficient magnitude |h~1| of the strong user
    #[arg(long)]
    h1: Option<f64>,
    /// Channel coefficient magnitude |h~2| of the weak user
    #[arg(long)]
    h2: Option<f64>,
    /// Noise power at user 1 (default 1)
    #[arg(long)]
    noise1: Option<f64>,
    /// Noise power at user 2 (default 1)
    #[arg(long)]
    noise2: Option<f64>,
    /// Average transmit SNR in dB (power budget with unit noise)
    #[arg(long)]
    snr_db: Option<f64>,
    /// Power budget in linear units (alternative to --snr-db)
    #[arg(long)]
    power: Option<f64>,
    /// Blocklength N
    #[arg(long)]
    n: Option<u32>,
    /// Effective-throughput target T0 for user 2, bps/Hz
    #[arg(long)]
    t0: Option<f64>,
    /// Rayleigh-fading Monte Carlo scenario instead of fixed gains
    #[arg(long)]
    fading: bool,
    /// Distance to user 1, meters (fading)
    #[arg(long)]
    d1: Option<f64>,
    /// Distance to user 2, meters (fading)
    #[arg(long)]
    d2: Option<f64>,
    /// Path-loss exponent (fading, default 2)
    #[arg(long)]
    alpha: Option<f64>,
    /// RNG seed (fading; required, never taken from the clock)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of channel realizations (fading, default 1000)
    #[arg(long)]
    realizations: Option<u32>,
    /// Coarse-scan density of the outer NOMA power search
    #[arg(long)]
    scan_points: Option<usize>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            h1: self.h1,
            h2: self.h2,
            noise1: self.noise1,
            noise2: self.noise2,
            fading: self.fading,
            d1: self.d1,
            d2: self.d2,
            alpha: self.alpha,
            seed: self.seed,
            realizations: self.realizations,
            snr_db: self.snr_db,
            power: self.power,
            n: self.n,
            t0: self.t0,
            scan_points: self.scan_points,
        }
    }

    fn resolve(&self) -> Result<Resolved> {
        let file = match &self.config {
            Some(path) => config::load(path)?,
            None => Default::default(),
        };
        config::resolve(&file, &self.overrides())
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Scheme(s) to solve: noma, oma, oma-fixed (repeat or comma-separate)
    #[arg(long, value_delimiter = ',', default_values_t = [String::from("noma")])]
    scheme: Vec<String>,
    /// Write machine-readable row(s) to this CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Run a built-in figure preset (see `fbnoma presets`)
    #[arg(long)]
    preset: Option<String>,
    /// Output directory for preset CSV/SVG files (default `out/`)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Sweep variable: p2, r2, r1, t0, n, snr_db
    #[arg(long)]
    var: Option<String>,
    #[arg(long)]
    start: Option<f64>,
    #[arg(long)]
    stop: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Schemes to run per point (comma-separated)
    #[arg(long, value_delimiter = ',')]
    schemes: Vec<String>,
    /// CSV output path (non-preset sweeps)
    #[arg(long)]
    csv: Option<PathBuf>,
    /// SVG plot output path
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// Number of randomized instances
    #[arg(long, default_value_t = 20)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Coarse NOMA grid points as P2,R2,R1
    #[arg(long, default_value = "61,201,61")]
    noma_grid: String,
    /// Coarse OMA grid points as P2,R2,R1
    #[arg(long, default_value = "201,61,61")]
    oma_grid: String,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("FBNOMA_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .ok();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Presets => {
            print!("{}", presets::describe());
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve(args) => solve(args),
        Command::Sweep(args) => run_sweeps(args),
        Command::OracleCheck(args) => {
            let opts = OracleCheckOpts {
                instances: args.instances,
                seed: args.seed,
                noma_grid: parse_grid(&args.noma_grid)?,
                oma_grid: parse_grid(&args.oma_grid)?,
            };
            let summary = oracle_check::run(&opts);
            print!("{}", oracle_check::format_summary(&summary));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_grid(text: &str) -> Result<GridSpec> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| anyhow!("grid spec `{text}`: {e}"))?;
    match parts[..] {
        [p2, r2, r1] => GridSpec::new(p2, r2, r1).map_err(|e| anyhow!("{e}")),
        _ => Err(anyhow!("grid spec `{text}` must be three comma-separated counts")),
    }
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let base = args.common.resolve()?;
    let schemes: Vec<Scheme> = args
        .scheme
        .iter()
        .map(|s| sweep::parse_scheme(s))
        .collect::<Result<_>>()?;
    let p_total = db_to_linear(base.snr_db);
    let params = SystemParams::new(
        Blocklength::new(base.n).map_err(|e| anyhow!("system.n: {e}"))?,
        p_total,
        base.t0,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let tol = Tolerances::for_power_budget(p_total);

    let mut rows: Vec<sweep::ResultRow> = Vec::new();
    let mut all_feasible = true;
    match base.scenario {
        sweep::Scenario::Fading(fading) => {
            for &scheme in &schemes {
                let stats = monte_carlo_average(&fading, &params, scheme, &tol);
                println!("{}", report::format_monte_carlo(scheme.label(), &stats));
            }
        }
        sweep::Scenario::Fixed(fixed) => {
            let gains = fixed.gains().map_err(|e| anyhow!("scenario: {e}"))?;
            for &scheme in &schemes {
                match scheme {
                    Scheme::Noma => {
                        let r = optimize_noma_with_scan(&gains, &params, &tol, base.scan_points);
                        print!("{}", report::format_noma(&r, &params));
                        all_feasible &= r.feasible;
                        rows.push(sweep::noma_row("solve", base.snr_db, &r));
                    }
                    Scheme::Oma => {
                        let s = optimize_oma(&gains, &params, &tol);
                        print!("{}", report::format_oma("oma", &s, &params));
                        all_feasible &= s.feasible;
                        rows.push(sweep::oma_row("solve", base.snr_db, "oma", &s));
                    }
                    Scheme::OmaFixedSlots => {
                        let s = optimize_oma_fixed_slots(&gains, &params, &tol);
                        print!("{}", report::format_oma("oma-fixed", &s, &params));
                        all_feasible &= s.feasible;
                        rows.push(sweep::oma_row("solve", base.snr_db, "oma-fixed", &s));
                    }
                }
                println!();
            }
        }
    }
    if let Some(path) = &args.csv {
        sweep::write_csv(path, &rows)?;
    }
    if all_feasible {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(3))
    }
}

fn run_sweeps(args: SweepArgs) -> Result<ExitCode> {
    let runs: Vec<(String, sweep::ResolvedSweep, PathBuf, PathBuf)> = if let Some(name) =
        &args.preset
    {
        let preset = presets::find(name)
            .ok_or_else(|| anyhow!("unknown preset `{name}` (see `fbnoma presets`)"))?;
        let out_dir = args.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
        preset
            .runs
            .into_iter()
            .map(|(_, mut run)| {
                // Presets accept a few lightweight overrides.
                if let Some(r) = args.common.realizations {
                    if let sweep::Scenario::Fading(ref mut f) = run.scenario {
                        f.realizations = r;
                    }
                }
                if let Some(s) = args.common.seed {
                    if let sweep::Scenario::Fading(ref mut f) = run.scenario {
                        f.seed = s;
                    }
                }
                if let Some(p) = args.common.scan_points {
                    run.scan_points = p;
                }
                if let Some(p) = args.points {
                    run.points = p;
                }
                let csv = out_dir.join(format!("{}.csv", run.name));
                let svg = out_dir.join(format!("{}.svg", run.name));
                (run.name.clone(), run, csv, svg)
            })
            .collect()
    } else {
        let file = match &args.common.config {
            Some(path) => config::load(path)?,
            None => Default::default(),
        };
        let base = config::resolve(&file, &args.common.overrides())?;
        let spec = config::resolve_sweep(
            "sweep".into(),
            &base,
            &file,
            args.var.as_deref(),
            args.start,
            args.stop,
            args.points,
            &args.schemes,
        )?;
        let csv = args
            .csv
            .clone()
            .or(file.output.csv)
            .ok_or_else(|| anyhow!("missing required field `output.csv` (or --csv)"))?;
        let svg = args
            .plot
            .clone()
            .or(file.output.plot)
            .unwrap_or_else(|| csv.with_extension("svg"));
        vec![("sweep".into(), spec, csv, svg)]
    };

    for (name, spec, csv_path, svg_path) in runs {
        let rows = sweep::run_sweep(&spec)?;
        sweep::write_csv(&csv_path, &rows)?;
        println!("{name}: wrote {} rows to {}", rows.len(), csv_path.display());
        let title = format!("{name}: T1 vs {}", spec.var.label());
        match plot::render_svg(&svg_path, &title, spec.var.label(), &rows) {
            Ok(()) => println!("{name}: wrote plot to {}", svg_path.display()),
            Err(err) => eprintln!("warning: plot for {name} failed ({err:#}); CSV is unaffected"),
        }
    }
    Ok(ExitCode::SUCCESS)
}
