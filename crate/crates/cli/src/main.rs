use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dicke_battery::config::RunConfig;
use dicke_battery::discharge::DischargeFrame;
use dicke_battery::integrator::Scheme;
use dicke_battery::Error;

mod scenarios;

use scenarios::{Outcome, Scenario};

#[derive(Parser)]
#[command(name = "dicke-battery", version, about = "Charge, store and discharge a driven Dicke quantum battery")]
struct Cli {
    #[command(subcommand)]
    scenario: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state ergotropy per atom against θ (N = 2, 4; r = 0.1)
    Fig1(Flags),
    /// Numerical vs analytic charging curves (r = 10, θ = 1.87, Ω_R = 2Nγ₋); --t-end is in units of 1/(Nγ₋)
    Fig2(Flags),
    /// Average-power bound against charge fraction (r = 1, 5, 10)
    Fig3(Flags),
    /// Discharge of the charged steady state (N = 2, 4, 8); --t-end is in units of 1/(Nγ₀)
    Fig4(Flags),
    /// Steady-state populations and ergotropy
    Steady(Flags),
    /// Secular charging trajectory from the uncharged battery
    Charge(Flags),
    /// Discharge trajectory from the charged steady state
    Discharge(Flags),
    /// Closed-form quantities over a grid of N, r and θ
    Sweep(Flags),
}

/// Every flag mirrors the config-file key of the same name (dashes become underscores).
#[derive(Args, Debug, Clone, Default)]
struct Flags {
    /// Flat TOML file of run settings; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, visible_alias = "n")]
    n_atoms: Option<usize>,
    #[arg(long)]
    omega0: Option<f64>,
    /// Detuning Δ (rate units)
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Rabi frequency Ω_R
    #[arg(long)]
    rabi: Option<f64>,
    /// Dressing angle θ in [0, π]; use with --omega-p instead of --delta/--rabi
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    omega_p: Option<f64>,
    /// Ω_R = value·N at fixed θ
    #[arg(long)]
    rabi_per_atom: Option<f64>,
    /// Target x = r·cot⁴(θ/2); sets γ₊
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    gamma0: Option<f64>,
    #[arg(long)]
    gamma_plus: Option<f64>,
    #[arg(long)]
    gamma_minus: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// CSV output path (stdout when absent); the JSON summary goes next to it
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = parse_frame)]
    frame: Option<DischargeFrame>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_step: Option<f64>,
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    /// min,max,step
    #[arg(long, value_delimiter = ',')]
    theta_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    r_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    tau_list: Option<Vec<f64>>,
    /// Write the JSON summary (to stderr when printing the CSV to stdout)
    #[arg(long)]
    summary: bool,
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_frame(s: &str) -> Result<DischargeFrame, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    match s {
        "rk45_adaptive" => Ok(Scheme::Rk45Adaptive),
        "rk4_fixed" => Ok(Scheme::Rk4Fixed),
        _ => Err(format!("unknown scheme {s:?} (rk45_adaptive | rk4_fixed)")),
    }
}

impl Flags {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            n_atoms: self.n_atoms,
            omega0: self.omega0,
            delta: self.delta,
            rabi: self.rabi,
            theta: self.theta,
            omega_p: self.omega_p,
            rabi_per_atom: self.rabi_per_atom,
            x: self.x,
            gamma0: self.gamma0,
            gamma_plus: self.gamma_plus,
            gamma_minus: self.gamma_minus,
            t_end: self.t_end,
            out: self.out.as_ref().map(|p| p.display().to_string()),
            frame: self.frame,
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            scheme: self.scheme,
            theta_grid: self.theta_grid.clone(),
            n_list: self.n_list.clone(),
            r_list: self.r_list.clone(),
            tau_list: self.tau_list.clone(),
            summary: self.summary.then_some(true),
            threads: self.threads,
        }
    }
}

enum Failure {
    Model(Error),
    Partial(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Model(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

fn run(scenario: Scenario, flags: &Flags) -> Result<(), Failure> {
    let started = Instant::now();
    let file = match &flags.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    let cfg = scenarios::resolve(scenario, file.overlay(flags.to_config()));
    let threads = cfg.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let outcome: Outcome = pool.install(|| scenarios::run(scenario, &cfg))?;

    let out = cfg.out.as_ref().map(PathBuf::from);
    match &out {
        Some(path) => std::fs::write(path, &outcome.csv).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => print!("{}", outcome.csv),
    }
    let mut summary = outcome.summary;
    summary["scenario"] = serde_json::json!(scenario.name());
    summary["wall_time_seconds"] = serde_json::json!(started.elapsed().as_secs_f64());
    summary["failed_points"] = serde_json::json!(outcome.failed);
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    match &out {
        Some(path) => {
            let p = summary_path(path);
            std::fs::write(&p, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        }
        None if cfg.summary == Some(true) => eprintln!("{text}"),
        None => {}
    }
    if outcome.failed > 0 {
        return Err(Failure::Partial(outcome.failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (scenario, flags) = match &cli.scenario {
        Command::Fig1(f) => (Scenario::Fig1, f),
        Command::Fig2(f) => (Scenario::Fig2, f),
        Command::Fig3(f) => (Scenario::Fig3, f),
        Command::Fig4(f) => (Scenario::Fig4, f),
        Command::Steady(f) => (Scenario::Steady, f),
        Command::Charge(f) => (Scenario::Charge, f),
        Command::Discharge(f) => (Scenario::Discharge, f),
        Command::Sweep(f) => (Scenario::Sweep, f),
    };
    match run(scenario, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Model(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Partial(n)) => {
            eprintln!("error: {n} sweep point(s) failed; see the status column");
            ExitCode::from(4)
        }
    }
}
