//! Argument parsing and subcommand dispatch.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use spinbatt_core::analytics::{default_window, DEFAULT_GRID_POINTS, DEFAULT_THRESHOLD};
use spinbatt_core::{
    classify_regime, collapse_curve, find_charging_time_with, sample_trajectory, scaling_fit,
    AnalyticPrediction, ModelParams, SearchOptions,
};

use crate::error::CliError;
use crate::format::fmt_sig;
use crate::output::{report_json, trajectory_json, write_trajectory_csv};
use crate::sweep::{run_sweep, write_sweep_csv, SweepSpec};
use crate::verify::{run_verify, VERIFY_TOLERANCE};

#[derive(Debug, Parser)]
#[command(
    name = "spinbatt",
    version,
    about = "Central-spin quantum battery charging lab"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample Delta E(t) and eta(t) on a uniform time grid.
    Simulate(SimulateArgs),
    /// Locate the charging time and print the charging report as JSON.
    Report(ReportArgs),
    /// Run a parameter sweep from a JSON spec.
    Sweep(SweepArgs),
    /// Sweep n_b = m = n_c and fit gamma ~ n_b^alpha.
    Scaling(ScalingArgs),
    /// eta(T) against n_c / n_b for several battery sizes.
    Collapse(CollapseArgs),
    /// Compare the subspace dynamics against the full-space oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Battery spins.
    #[arg(long = "nb")]
    pub n_b: u32,
    /// Charger spins.
    #[arg(long = "nc")]
    pub n_c: u32,
    /// Initially excited charger spins.
    #[arg(long)]
    pub m: u32,
    #[arg(long, default_value_t = 1.0)]
    pub coupling: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::with_energies(self.n_b, self.n_c, self.m, self.coupling, self.omega)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// End of the time grid; defaults to the charging-search window.
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub samples: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Include the level populations p0..pd.
    #[arg(long, value_enum, default_value_t = Toggle::Off)]
    pub populations: Toggle,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Search window for the charging time.
    #[arg(long)]
    pub window: Option<f64>,
    /// Ratio that counts as "much less than".
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            window: self.window,
            threshold: self.threshold,
            ..SearchOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Jobs {
    /// Worker threads.
    #[arg(long, env = "SPINBATT_JOBS", default_value_t = default_jobs())]
    pub jobs: usize,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep spec.
    pub spec: PathBuf,
    #[command(flatten)]
    pub jobs: Jobs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    /// Sizes n_b = m = n_c.
    #[arg(long, value_delimiter = ',', default_values_t = [10u32, 20, 40, 80, 160])]
    pub sizes: Vec<u32>,
    #[command(flatten)]
    pub jobs: Jobs,
    /// Per-size CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fit result as JSON; stderr when absent.
    #[arg(long)]
    pub fit_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CollapseArgs {
    /// Battery sizes.
    #[arg(long = "nb", value_delimiter = ',', default_values_t = [50u32, 100])]
    pub n_b: Vec<u32>,
    /// Ratios n_c / n_b; defaults to 1, 1.5, ..., 10.
    #[arg(long, value_delimiter = ',')]
    pub ratios: Vec<f64>,
    /// Use m = n_c instead of m = n_b.
    #[arg(long)]
    pub m_equals_nc: bool,
    #[command(flatten)]
    pub jobs: Jobs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest n_b + n_c to check.
    #[arg(long, default_value_t = 8)]
    pub max_spins: u32,
    #[command(flatten)]
    pub jobs: Jobs,
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<(), CliError> {
    let mut out = open_out(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Numeric(format!("cannot start worker pool: {e}")))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Report(args) => report(args),
        Command::Sweep(args) => sweep(args),
        Command::Scaling(args) => scaling(args),
        Command::Collapse(args) => collapse(args),
        Command::Verify(args) => verify(args),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let params = args.model.params()?;
    let t_max = match args.tmax {
        Some(t) if t.is_finite() && t > 0.0 => t,
        Some(t) => return Err(CliError::Usage(format!("--tmax must be positive, got {t}"))),
        None => {
            let regime = classify_regime(&params, DEFAULT_THRESHOLD)?;
            default_window(&params, &AnalyticPrediction::new(regime, &params)?)
        }
    };
    if args.samples < 2 {
        return Err(CliError::Usage(format!(
            "--samples must be at least 2, got {}",
            args.samples
        )));
    }
    let populations = args.populations == Toggle::On;
    let trajectory = sample_trajectory(&params, t_max, args.samples, populations)?;
    match args.format {
        Format::Csv => {
            let mut out = open_out(args.out.as_deref())?;
            write_trajectory_csv(&mut out, &trajectory, populations)?;
            out.flush()?;
            Ok(())
        }
        Format::Json => write_json(
            args.out.as_deref(),
            &trajectory_json(&trajectory, populations),
        ),
    }
}

fn report(args: ReportArgs) -> Result<(), CliError> {
    let params = args.model.params()?;
    if !(args.search.threshold > 1.0 && args.search.threshold.is_finite()) {
        return Err(CliError::Usage(format!(
            "--threshold must be > 1, got {}",
            args.search.threshold
        )));
    }
    if let Some(w) = args.search.window.filter(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(CliError::Usage(format!(
            "--window must be positive, got {w}"
        )));
    }
    let report = find_charging_time_with(&params, &args.search.options())?;
    write_json(args.out.as_deref(), &report_json(&report))
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.spec).map_err(|e| {
        CliError::Usage(format!(
            "cannot read sweep spec {}: {e}",
            args.spec.display()
        ))
    })?;
    let spec = SweepSpec::from_json(&text)?;
    let rows = run_sweep(&spec, args.jobs.jobs)?;
    let mut out = open_out(args.out.as_deref())?;
    write_sweep_csv(&mut out, &spec, &rows)?;
    out.flush()?;
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    if failed > 0 {
        eprintln!(
            "{failed} of {} points failed; see the error column",
            rows.len()
        );
    }
    Ok(())
}

fn scaling(args: ScalingArgs) -> Result<(), CliError> {
    if args.sizes.len() < 3 || args.sizes.contains(&0) {
        return Err(CliError::Usage(
            "--sizes needs at least 3 positive values".into(),
        ));
    }
    let reports = pool(args.jobs.jobs)?.install(|| {
        use rayon::prelude::*;
        args.sizes
            .par_iter()
            .map(|&n| {
                let params = ModelParams::new(n, n, n)?;
                find_charging_time_with(&params, &SearchOptions::default())
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    let gammas: Vec<f64> = reports
        .iter()
        .map(|r| r.gamma.expect("advantage is defined for n_b = m = n_c"))
        .collect();

    let mut out = open_out(args.out.as_deref())?;
    writeln!(out, "n,t_charge,eta_max,p_collective,gamma")?;
    for (r, g) in reports.iter().zip(&gammas) {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.params.n_b(),
            fmt_sig(r.t_charge_numeric),
            fmt_sig(r.eta_max),
            fmt_sig(r.p_collective),
            fmt_sig(*g)
        )?;
    }
    out.flush()?;
    drop(out);

    let points: Vec<(f64, f64)> = args
        .sizes
        .iter()
        .map(|&n| f64::from(n))
        .zip(gammas)
        .collect();
    let fit = scaling_fit(&points)?;
    let value = json!({
        "exponent": crate::format::round_sig(fit.exponent),
        "prefactor": crate::format::round_sig(fit.prefactor),
        "r_squared": crate::format::round_sig(fit.r_squared),
        "sizes": args.sizes,
    });
    match args.fit_out.as_deref() {
        Some(path) => write_json(Some(path), &value),
        None => {
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&value).map_err(io::Error::from)?
            );
            Ok(())
        }
    }
}

fn collapse(args: CollapseArgs) -> Result<(), CliError> {
    let ratios = if args.ratios.is_empty() {
        (0..19).map(|i| 1.0 + 0.5 * f64::from(i)).collect()
    } else {
        args.ratios
    };
    if args.n_b.is_empty() || args.n_b.contains(&0) {
        return Err(CliError::Usage("--nb needs positive battery sizes".into()));
    }
    if let Some(r) = ratios.iter().find(|r| !(r.is_finite() && **r >= 1.0)) {
        return Err(CliError::Usage(format!("ratios must be >= 1, got {r}")));
    }
    let curves = pool(args.jobs.jobs)?.install(|| {
        use rayon::prelude::*;
        args.n_b
            .par_iter()
            .map(|&n_b| collapse_curve(n_b, !args.m_equals_nc, &ratios))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut out = open_out(args.out.as_deref())?;
    writeln!(out, "n_b,ratio,n_c,m,eta_max")?;
    for (&n_b, curve) in args.n_b.iter().zip(&curves) {
        for point in curve {
            let m = if args.m_equals_nc { point.n_c } else { n_b };
            writeln!(
                out,
                "{n_b},{},{},{m},{}",
                fmt_sig(point.ratio),
                point.n_c,
                fmt_sig(point.eta_max)
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let results = run_verify(args.max_spins, args.jobs.jobs)?;
    let worst = results
        .iter()
        .filter_map(|r| r.deviation.as_ref().ok().map(|d| d / r.params.omega()))
        .fold(0.0, f64::max);
    println!(
        "checked {} triples with n_b + n_c <= {}; worst deviation {} (tolerance {})",
        results.len(),
        args.max_spins,
        fmt_sig(worst),
        fmt_sig(VERIFY_TOLERANCE)
    );
    let failures: Vec<String> = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| {
            let p = &r.params;
            match &r.deviation {
                Ok(d) => format!(
                    "(n_b={}, n_c={}, m={}) deviation {}",
                    p.n_b(),
                    p.n_c(),
                    p.m(),
                    fmt_sig(*d)
                ),
                Err(e) => format!("(n_b={}, n_c={}, m={}) error: {e}", p.n_b(), p.n_c(), p.m()),
            }
        })
        .collect();
    if failures.is_empty() {
        println!("PASS");
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "{} triple(s) exceed tolerance:\n  {}",
            failures.len(),
            failures.join("\n  ")
        )))
    }
}
