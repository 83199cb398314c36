use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use dicke_battery::asymptotics::{
    average_power_bound, energy_analytic, energy_lower_bound, power_analytic, power_bound_curve, tau90, Branch,
};
use dicke_battery::charging::charging_trajectory;
use dicke_battery::config::RunConfig;
use dicke_battery::discharge::{
    charged_state_bare, default_t_end, fit_slope, initial_coherence, run_discharge,
};
use dicke_battery::export::{self, ChargingRow, ErgotropyRow, SteadyRow};
use dicke_battery::integrator::InvariantMaxima;
use dicke_battery::lindblad::SecularFrame;
use dicke_battery::steady::{closed_form_per_atom, ergotropy_asymptotic, ergotropy_exact, steady_state};
use dicke_battery::{Error, ModelParams, Result, SpinOperators};

/// Samples per charging curve.
const CHARGE_SAMPLES: f64 = 400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Steady,
    Charge,
    Discharge,
    Sweep,
}

pub struct Outcome {
    pub csv: String,
    pub summary: Value,
    pub failed: usize,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
            Scenario::Steady => "steady",
            Scenario::Charge => "charge",
            Scenario::Discharge => "discharge",
            Scenario::Sweep => "sweep",
        }
    }

    /// Settings that reproduce the corresponding figure; any user value replaces them.
    pub fn defaults(self) -> RunConfig {
        let figure = RunConfig {
            theta: Some(1.87),
            gamma0: Some(1.0),
            gamma_plus: Some(10.0),
            gamma_minus: Some(1.0),
            ..Default::default()
        };
        match self {
            Scenario::Fig1 => RunConfig {
                n_list: Some(vec![2, 4]),
                r_list: Some(vec![0.1]),
                theta_grid: Some(vec![0.02, 3.12, 0.02]),
                ..Default::default()
            },
            Scenario::Fig2 => RunConfig {
                rabi_per_atom: Some(2.0),
                n_list: Some(vec![8, 16, 32]),
                t_end: Some(10.0),
                ..figure
            },
            Scenario::Fig3 => RunConfig {
                r_list: Some(vec![1.0, 5.0, 10.0]),
                theta_grid: Some(vec![0.01, 3.13, 0.01]),
                ..Default::default()
            },
            Scenario::Fig4 => RunConfig {
                omega_p: Some(50.0),
                n_list: Some(vec![2, 4, 8]),
                t_end: Some(8.0),
                ..figure
            },
            Scenario::Charge => RunConfig { t_end: Some(20.0), ..Default::default() },
            Scenario::Sweep => RunConfig { tau_list: Some(vec![1.0]), ..Default::default() },
            Scenario::Steady | Scenario::Discharge => RunConfig::default(),
        }
    }
}

/// Scenario defaults under the user's settings. A user-given Δ or Ω_R displaces
/// the default angle.
pub fn resolve(scenario: Scenario, user: RunConfig) -> RunConfig {
    let mut defaults = scenario.defaults();
    if user.delta.is_some() || user.rabi.is_some() {
        defaults.theta = None;
        defaults.omega_p = None;
        defaults.rabi_per_atom = None;
    }
    defaults.overlay(user)
}

fn model_for(cfg: &RunConfig, n_atoms: usize) -> Result<ModelParams> {
    RunConfig { n_atoms: Some(n_atoms), ..cfg.clone() }.model_params(&ModelParams::default())
}

fn n_list(cfg: &RunConfig, base: &ModelParams) -> Vec<usize> {
    cfg.n_list.clone().unwrap_or_else(|| vec![base.n_atoms])
}

fn maxima_json(m: InvariantMaxima) -> Value {
    if m.min_eigval.is_infinite() {
        return Value::Null;
    }
    json!(m)
}

fn base_summary(p: &ModelParams) -> Value {
    json!({ "params": p, "derived": p.derive().ok() })
}

pub fn run(scenario: Scenario, cfg: &RunConfig) -> Result<Outcome> {
    let base = cfg.model_params(&ModelParams::default())?;
    let integrator = cfg.integrator()?;
    let mut summary = base_summary(&base);
    let mut failed = 0;
    let csv = match scenario {
        Scenario::Fig1 => {
            let thetas = cfg.thetas()?.unwrap_or_else(|| vec![base.theta()]);
            let rs = cfg.r_list.clone().unwrap_or_else(|| vec![base.gamma_plus / base.gamma_minus]);
            let mut rows = Vec::new();
            for &n in &n_list(cfg, &base) {
                for &r in &rs {
                    for &theta in &thetas {
                        let x = r / (theta / 2.0).tan().powi(4);
                        let report = ergotropy_exact(n, x, theta)?;
                        rows.push(ErgotropyRow {
                            n_atoms: n,
                            theta_in_rad: theta,
                            x,
                            ergotropy_per_atom_exact_in_omega0: report.ergotropy_per_atom,
                            ergotropy_per_atom_closed_in_omega0: closed_form_per_atom(n, x, theta),
                            ergotropy_per_atom_asymptotic_in_omega0: ergotropy_asymptotic(x, theta, r).ok(),
                        });
                    }
                }
            }
            export::csv_string(&rows)?
        }
        Scenario::Fig2 => {
            let t_scaled = cfg.t_end.unwrap_or(10.0);
            let curves: Vec<(Vec<ChargingRow>, Value, InvariantMaxima)> = n_list(cfg, &base)
                .par_iter()
                .map(|&n| fig2_curve(cfg, n, t_scaled, &integrator))
                .collect::<Result<_>>()?;
            let mut rows = Vec::new();
            let mut per_n = Vec::new();
            let mut maxima = InvariantMaxima::default();
            for (r, s, m) in curves {
                rows.extend(r);
                per_n.push(s);
                maxima = maxima.merge(m);
            }
            summary["curves"] = json!(per_n);
            summary["invariant_maxima"] = maxima_json(maxima);
            export::csv_string(&rows)?
        }
        Scenario::Fig3 => {
            let thetas = cfg.thetas()?.unwrap_or_else(|| vec![base.theta()]);
            let rs = cfg.r_list.clone().unwrap_or_else(|| vec![base.gamma_plus / base.gamma_minus]);
            let mut rows = Vec::new();
            for &r in &rs {
                let branch = if r >= 1.0 { Branch::Charging } else { Branch::Inverted };
                for p in power_bound_curve(r, &thetas, branch)? {
                    rows.push(export::PowerBoundRow {
                        r,
                        theta_in_rad: p.theta,
                        charge_fraction: p.charge_fraction,
                        power_bound_in_n_sq_omega0_gamma_minus: p.bound,
                        tau90: p.tau90,
                        admissible: p.admissible,
                    });
                }
            }
            export::csv_string(&rows)?
        }
        Scenario::Fig4 => {
            let t_scaled = cfg.t_end.unwrap_or(8.0);
            let frame = cfg.frame.unwrap_or_default();
            let ns = n_list(cfg, &base);
            let runs: Vec<(Vec<export::DischargeRow>, Value, f64, InvariantMaxima)> = ns
                .par_iter()
                .map(|&n| {
                    let p = model_for(cfg, n)?;
                    let ops = SpinOperators::new(n)?;
                    let rho0 = charged_state_bare(&ops, &p.derive()?)?;
                    let t_end = t_scaled / (n as f64 * p.gamma0);
                    let res = run_discharge(&rho0, &p, frame, t_end, &integrator)?;
                    let s = discharge_summary(&res, n, p.gamma0);
                    let peak = res.peak_variance();
                    Ok((export::discharge_rows(&res, p.gamma0), s, peak, res.trajectory.invariant_maxima()))
                })
                .collect::<Result<_>>()?;
            let mut rows = Vec::new();
            let mut per_n = Vec::new();
            let mut peaks = Vec::new();
            let mut maxima = InvariantMaxima::default();
            for (r, s, peak, m) in runs {
                rows.extend(r);
                per_n.push(s);
                peaks.push(peak);
                maxima = maxima.merge(m);
            }
            if ns.len() >= 2 {
                let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
                let ys: Vec<f64> = peaks.iter().map(|p| p.ln()).collect();
                summary["variance_exponent"] = json!(fit_slope(&xs, &ys));
            }
            summary["frame"] = json!(frame);
            summary["runs"] = json!(per_n);
            summary["invariant_maxima"] = maxima_json(maxima);
            export::csv_string(&rows)?
        }
        Scenario::Steady => {
            let d = base.derive()?;
            let report = ergotropy_exact(base.n_atoms, d.x, d.theta)?;
            let ops = SpinOperators::new(base.n_atoms)?;
            let rows: Vec<SteadyRow> = report
                .populations
                .iter()
                .enumerate()
                .map(|(index, &population)| SteadyRow { index, m: ops.m(index), population })
                .collect();
            let coherence = initial_coherence(&steady_state(base.n_atoms, d.x)?, &d, &ops)?;
            summary["steady"] = json!({
                "energy_per_atom": report.battery_charge() / base.n_atoms as f64,
                "ergotropy": report.ergotropy,
                "ergotropy_per_atom": report.ergotropy_per_atom,
                "ergotropy_per_atom_closed": report.ergotropy_per_atom_closed,
                "closed_form_used": report.closed_form_used,
                "ergotropy_per_atom_asymptotic": ergotropy_asymptotic(d.x, d.theta, d.ratio_r).ok(),
                "coherence_jp": [coherence.re, coherence.im],
            });
            export::csv_string(&rows)?
        }
        Scenario::Charge => {
            let t_end = cfg.t_end.unwrap_or(20.0);
            let traj = charging_trajectory(&base, t_end, t_end / CHARGE_SAMPLES, &integrator, SecularFrame::CoRotating)?;
            let d = base.derive()?;
            let n = base.n_atoms as f64;
            let report = ergotropy_exact(base.n_atoms, d.x, d.theta)?;
            summary["charge"] = json!({
                "final_energy_per_atom": traj.records.last().map(|r| r.energy / n),
                "steady_energy_per_atom": report.battery_charge() / n,
                "steps": traj.stats,
            });
            summary["invariant_maxima"] = maxima_json(traj.invariant_maxima());
            export::csv_string(&export::trajectory_rows(&traj))?
        }
        Scenario::Discharge => {
            let d = base.derive()?;
            let ops = SpinOperators::new(base.n_atoms)?;
            let rho0 = charged_state_bare(&ops, &d)?;
            let t_end = cfg.t_end.unwrap_or_else(|| default_t_end(base.n_atoms, base.gamma0));
            let res = run_discharge(&rho0, &base, cfg.frame.unwrap_or_default(), t_end, &integrator)?;
            summary["discharge"] = discharge_summary(&res, base.n_atoms, base.gamma0);
            summary["invariant_maxima"] = maxima_json(res.trajectory.invariant_maxima());
            export::csv_string(&export::discharge_rows(&res, base.gamma0))?
        }
        Scenario::Sweep => {
            let rows = sweep(cfg, &base)?;
            failed = rows.iter().filter(|r| r.status != "ok").count();
            summary["points"] = json!(rows.len());
            export::csv_string(&rows)?
        }
    };
    Ok(Outcome { csv, summary, failed })
}

fn fig2_curve(
    cfg: &RunConfig,
    n: usize,
    t_scaled: f64,
    integrator: &dicke_battery::IntegratorConfig,
) -> Result<(Vec<ChargingRow>, Value, InvariantMaxima)> {
    let p = model_for(cfg, n)?;
    let d = p.derive()?;
    let t_end = t_scaled / (n as f64 * p.gamma_minus);
    let traj = charging_trajectory(&p, t_end, t_end / CHARGE_SAMPLES, integrator, SecularFrame::CoRotating)?;
    let rows: Vec<ChargingRow> = traj
        .times
        .iter()
        .zip(&traj.records)
        .map(|(&t, r)| ChargingRow {
            n_atoms: n,
            rabi_in_gamma_minus: p.rabi,
            n_gamma_minus_t: n as f64 * p.gamma_minus * t,
            energy_per_atom_numeric_in_omega0: r.energy / n as f64,
            energy_per_atom_analytic_in_omega0: energy_analytic(t, n, &d),
            energy_per_atom_lower_bound_in_omega0: energy_lower_bound(n as f64 * d.gamma_eff * t / 2.0, d.theta),
        })
        .collect();
    let max_dev = rows
        .iter()
        .map(|r| (r.energy_per_atom_numeric_in_omega0 - r.energy_per_atom_analytic_in_omega0).abs())
        .fold(0.0, f64::max);
    let s = json!({
        "n_atoms": n,
        "rabi": p.rabi,
        "max_deviation": max_dev,
        "final_numeric": rows.last().map(|r| r.energy_per_atom_numeric_in_omega0),
        "plateau": d.charge_fraction(),
    });
    Ok((rows, s, traj.invariant_maxima()))
}

fn discharge_summary(res: &dicke_battery::discharge::DischargeResult, n: usize, gamma0: f64) -> Value {
    json!({
        "n_atoms": n,
        "stored_energy_initial": res.stored_energy_initial,
        "coherent_fraction": res.coherent_fraction,
        "half_time_times_n_gamma0": res.half_time().map(|t| t * n as f64 * gamma0),
        "peak_energy_variance": res.peak_variance(),
        "energy_balance_violation": res.energy_balance_violation(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub grid_index: usize,
    pub n_atoms: usize,
    pub r: f64,
    pub theta_in_rad: f64,
    pub tau: f64,
    pub x: Option<f64>,
    pub gamma_eff_in_gamma_minus: Option<f64>,
    pub energy_per_atom_steady_in_omega0: Option<f64>,
    pub ergotropy_per_atom_in_omega0: Option<f64>,
    pub tau90: Option<f64>,
    pub average_power_bound_in_omega0_gamma_minus: Option<f64>,
    pub analytic_power_in_omega0_gamma_minus: Option<f64>,
    pub status: String,
    pub error: String,
}

struct Point {
    n: usize,
    r: f64,
    theta: f64,
    tau: f64,
}

fn sweep(cfg: &RunConfig, base: &ModelParams) -> Result<Vec<SweepRow>> {
    let ns = n_list(cfg, base);
    let rs = cfg.r_list.clone().unwrap_or_else(|| vec![base.gamma_plus / base.gamma_minus]);
    let thetas = cfg.thetas()?.unwrap_or_else(|| vec![base.theta()]);
    let taus = cfg.tau_list.clone().unwrap_or_else(|| vec![1.0]);
    let mut points = Vec::new();
    for &n in &ns {
        for &r in &rs {
            for &theta in &thetas {
                for &tau in &taus {
                    points.push(Point { n, r, theta, tau });
                }
            }
        }
    }
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(grid_index, pt)| {
            let mut row = SweepRow {
                grid_index,
                n_atoms: pt.n,
                r: pt.r,
                theta_in_rad: pt.theta,
                tau: pt.tau,
                x: None,
                gamma_eff_in_gamma_minus: None,
                energy_per_atom_steady_in_omega0: None,
                ergotropy_per_atom_in_omega0: None,
                tau90: None,
                average_power_bound_in_omega0_gamma_minus: None,
                analytic_power_in_omega0_gamma_minus: None,
                status: "ok".into(),
                error: String::new(),
            };
            if let Err(e) = sweep_point(cfg, base, pt, &mut row) {
                row.status = if e.is_numerical() { "numerical_error" } else { "invalid" }.into();
                row.error = e.to_string();
            }
            row
        })
        .collect();
    Ok(rows)
}

fn sweep_point(cfg: &RunConfig, base: &ModelParams, pt: &Point, row: &mut SweepRow) -> Result<()> {
    let omega_p = match cfg.rabi_per_atom {
        Some(k) => k * pt.n as f64 / pt.theta.sin(),
        None => base.omega_p(),
    };
    let p = ModelParams {
        omega0: base.omega0,
        ..ModelParams::from_angle(pt.n, pt.theta, omega_p, base.gamma0, pt.r * base.gamma_minus, base.gamma_minus)
    };
    p.validate()?;
    let d = p.derive()?;
    row.x = Some(d.x);
    row.gamma_eff_in_gamma_minus = Some(d.gamma_eff / d.gamma_minus);
    let report = ergotropy_exact(pt.n, d.x, d.theta)?;
    row.energy_per_atom_steady_in_omega0 = Some(report.battery_charge() / pt.n as f64);
    row.ergotropy_per_atom_in_omega0 = Some(report.ergotropy_per_atom);
    row.tau90 = Some(tau90(d.theta)?);
    if d.gamma_eff > 0.0 {
        row.average_power_bound_in_omega0_gamma_minus = Some(average_power_bound(pt.n, &d)?);
        let t = 2.0 * pt.tau / (pt.n as f64 * d.gamma_eff);
        row.analytic_power_in_omega0_gamma_minus = Some(power_analytic(t, pt.n, &d));
    } else if d.gamma_eff == 0.0 {
        return Err(Error::BranchPoint { x: d.x });
    }
    Ok(())
}
