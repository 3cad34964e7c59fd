//! Command-line front end: single-mode comparisons, parameter sweeps, the
//! vacuum-energy computation, and the verification suite. Data goes to CSV
//! (one file per invocation, LF line endings, floats with 17 significant
//! digits); summaries and reports go to stdout.
//!
//! Exit codes: 0 success, 1 verification failure, 2 validation error,
//! 3 numerical failure.

mod verify;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use diracsea::exact::{evolve_exact, ExactError};
use diracsea::modes::{mode_energy, mode_norm, ModeIndex, ParamError, PhysParams, Sign};
use diracsea::oracle::{evolve_ode, OdeRun, OracleError};
use diracsea::perturb::{pair_sum, EnergyBreakdown, PerturbError};
use diracsea::vacuum::{
    pair_energy_shift, vacuum_density_direct, vacuum_density_pert, GridScheme, MomentumGrid,
    Route, VacuumError,
};

#[derive(Parser)]
#[command(name = "diracsea", version, about = "Dirac-sea vacuum energy laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare the exact, oracle, and second-order energies of one mode.
    ModeEnergy(ModeEnergyArgs),
    /// Mode-energy rows over a momentum grid.
    Sweep(SweepArgs),
    /// Vacuum energy density by the second-order and exact routes.
    Vacuum(VacuumArgs),
    /// Run the verification suite and report per-group pass/fail.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Copy)]
struct PhysArgs {
    /// Mass m (natural units).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    m: f64,
    /// Potential amplitude alpha; alpha and c must not have opposite signs.
    #[arg(long, default_value_t = -0.01, allow_negative_numbers = true)]
    alpha: f64,
    /// Switch rate c (negative).
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    c: f64,
    /// Working tolerance: the ODE oracle runs at tol, the series at tol/10.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

impl PhysArgs {
    fn to_params(self) -> Result<PhysParams, CliError> {
        let params = PhysParams::new(self.m, self.alpha, self.c)?
            .with_series_tol(self.tol / 10.0)?
            .with_ode_tol(self.tol)?;
        Ok(params)
    }
}

#[derive(Args)]
struct ModeEnergyArgs {
    #[command(flatten)]
    phys: PhysArgs,
    /// Energy-sign branch, +1 or -1.
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    lambda: i32,
    /// Momentum of the mode.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    p: f64,
    /// Switch-off time at which energies are evaluated (<= 0).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t1: f64,
    /// Target R(t_start) for seeding the ODE oracle.
    #[arg(long = "seed-threshold", default_value_t = 1e-12)]
    seed_threshold: f64,
    /// Output CSV path.
    #[arg(long, default_value = "mode_energy.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    phys: PhysArgs,
    /// Energy-sign branch, +1 or -1.
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    lambda: i32,
    /// Sweep momenta over [-p_max, p_max].
    #[arg(long = "p-max", default_value_t = 3.0)]
    p_max: f64,
    /// Number of grid points.
    #[arg(long = "n-points", default_value_t = 61)]
    n_points: usize,
    /// Target R(t_start) for seeding the ODE oracle.
    #[arg(long = "seed-threshold", default_value_t = 1e-12)]
    seed_threshold: f64,
    /// Output CSV path.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct VacuumArgs {
    #[command(flatten)]
    phys: PhysArgs,
    /// Momentum cutoff of the direct route.
    #[arg(long = "p-max", default_value_t = 50.0)]
    p_max: f64,
    /// Number of grid points of the direct route.
    #[arg(long = "n-points", default_value_t = 4001)]
    n_points: usize,
    /// Output CSV path for the per-momentum integrand rows.
    #[arg(long, default_value = "vacuum.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Working tolerance handed to the suite (series at tol/10, ODE at tol).
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Run a single group: specfun, norms, identities, scaling, routes.
    #[arg(long)]
    group: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "validation: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical: {msg}"),
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::InvalidRun(msg) => CliError::Validation(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<PerturbError> for CliError {
    fn from(e: PerturbError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<VacuumError> for CliError {
    fn from(e: VacuumError) -> Self {
        match e {
            VacuumError::InvalidGrid(msg) => CliError::Validation(msg),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("io: {e}"))
    }
}

/// Scientific notation with 17 significant digits.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_lambda(v: i32) -> Result<Sign, CliError> {
    Sign::from_i32(v).ok_or_else(|| CliError::Validation(format!("lambda must be +1 or -1, got {v}")))
}

const MODE_HEADER: &str =
    "lambda,p,E,eps_exact,eps_oracle,eps0,eps1,eps2,delta_exact,delta_pert,residual,norm_drift";

struct ModeRow {
    lambda: i32,
    p: f64,
    energy: f64,
    breakdown: EnergyBreakdown,
    delta_exact: f64,
    norm_drift: f64,
}

impl ModeRow {
    fn to_csv(&self) -> String {
        let b = &self.breakdown;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.lambda,
            sci(self.p),
            sci(self.energy),
            sci(b.exact),
            sci(b.oracle),
            sci(b.eps0),
            sci(b.eps1),
            sci(b.eps2),
            sci(self.delta_exact),
            sci(b.delta_pert),
            sci(b.residual),
            sci(self.norm_drift),
        )
    }
}

fn mode_row(
    params: &PhysParams,
    lambda: Sign,
    p: f64,
    t1: f64,
    seed_threshold: f64,
) -> Result<ModeRow, CliError> {
    let mode = ModeIndex::new(lambda, p);
    let exact_state = evolve_exact(&mode, params, t1)?;
    let eps_exact = mode_energy(&exact_state, params);

    let run = OdeRun::seeded_with_threshold(params, t1, seed_threshold)?;
    let ode_state = evolve_ode(&mode, params, &run)?;
    let eps_oracle = mode_energy(&ode_state, params);
    let norm_drift = (mode_norm(&ode_state) - 1.0).abs();

    let breakdown = EnergyBreakdown::assemble(&mode, params, t1, eps_exact, eps_oracle)?;
    Ok(ModeRow {
        lambda: lambda.as_i32(),
        p,
        energy: mode.energy(params),
        delta_exact: eps_exact - breakdown.eps0,
        breakdown,
        norm_drift,
    })
}

fn run_mode_energy(args: ModeEnergyArgs) -> Result<u8, CliError> {
    let params = args.phys.to_params()?;
    let lambda = parse_lambda(args.lambda)?;
    if args.t1 > 0.0 {
        return Err(CliError::Validation(format!(
            "t1 must be <= 0, got {}",
            args.t1
        )));
    }
    let row = mode_row(&params, lambda, args.p, args.t1, args.seed_threshold)?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    writeln!(out, "{MODE_HEADER}")?;
    writeln!(out, "{}", row.to_csv())?;
    out.flush()?;
    println!(
        "mode-energy: lambda={} p={} eps_exact={} delta_pert={} -> {}",
        row.lambda,
        sci(row.p),
        sci(row.breakdown.exact),
        sci(row.breakdown.delta_pert),
        args.out.display()
    );
    Ok(0)
}

fn run_sweep(args: SweepArgs) -> Result<u8, CliError> {
    let params = args.phys.to_params()?;
    let lambda = parse_lambda(args.lambda)?;
    if args.p_max <= 0.0 || !args.p_max.is_finite() {
        return Err(CliError::Validation(format!(
            "p-max must be positive, got {}",
            args.p_max
        )));
    }
    if args.n_points < 2 {
        return Err(CliError::Validation(format!(
            "n-points must be at least 2, got {}",
            args.n_points
        )));
    }

    let n = args.n_points;
    let h = 2.0 * args.p_max / (n - 1) as f64;
    let momenta: Vec<f64> = (0..n).map(|i| -args.p_max + i as f64 * h).collect();
    // Row evaluation is independent per momentum; the write below keeps grid
    // order regardless of scheduling.
    let rows: Vec<ModeRow> = momenta
        .par_iter()
        .map(|&p| mode_row(&params, lambda, p, 0.0, args.seed_threshold))
        .collect::<Result<_, _>>()?;

    let mut out = BufWriter::new(File::create(&args.out)?);
    writeln!(out, "{MODE_HEADER}")?;
    for row in &rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    out.flush()?;
    println!("sweep: {} rows -> {}", rows.len(), args.out.display());
    Ok(0)
}

fn run_vacuum(args: VacuumArgs) -> Result<u8, CliError> {
    let params = args.phys.to_params()?;
    let grid = MomentumGrid::new(args.p_max, args.n_points, GridScheme::Uniform)?;

    let pert = vacuum_density_pert(&params)?;
    let direct = vacuum_density_direct(&params, &grid, Route::Exact)?;

    let points = grid.points();
    let pairs_exact: Vec<f64> = points
        .par_iter()
        .map(|&p| pair_energy_shift(&params, p, Route::Exact))
        .collect::<Result<_, _>>()?;

    let mut out = BufWriter::new(File::create(&args.out)?);
    writeln!(out, "p,pair_pert,pair_exact")?;
    for (p, pair_exact) in points.iter().zip(&pairs_exact) {
        writeln!(
            out,
            "{},{},{}",
            sci(*p),
            sci(pair_sum(*p, &params)),
            sci(*pair_exact)
        )?;
    }
    out.flush()?;

    let verdict = if params.alpha == 0.0 {
        "zero"
    } else if pert.density_pert < 0.0 && direct.density < 0.0 {
        "true"
    } else {
        "false"
    };
    println!("integral_I    = {}", sci(pert.integral_i));
    println!("density_pert  = {}", sci(pert.density_pert));
    println!("density_exact = {}", sci(direct.density));
    println!("tail_bound    = {}", sci(direct.tail_bound));
    println!("verdict: density < 0: {verdict}");
    println!("rows -> {}", args.out.display());
    Ok(0)
}

fn run_verify(args: VerifyArgs) -> Result<u8, CliError> {
    if args.tol <= 0.0 || !args.tol.is_finite() {
        return Err(CliError::Validation(format!(
            "tol must be positive, got {}",
            args.tol
        )));
    }
    let selected = match &args.group {
        None => verify::GROUPS.to_vec(),
        Some(name) => {
            let name = name.as_str();
            if !verify::GROUPS.contains(&name) {
                return Err(CliError::Validation(format!(
                    "unknown group '{name}'; expected one of {}",
                    verify::GROUPS.join(", ")
                )));
            }
            vec![name]
        }
    };

    let mut all_passed = true;
    for group in selected {
        let report = verify::run_group(group, args.tol);
        let tag = if report.passed { "PASS" } else { "FAIL" };
        println!("{tag} {}: {}", report.name, report.detail);
        all_passed &= report.passed;
    }
    Ok(if all_passed { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ModeEnergy(args) => run_mode_energy(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Vacuum(args) => run_vacuum(args),
        Command::Verify(args) => run_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("diracsea: error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
