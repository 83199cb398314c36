//! CSV rows for trajectories and figure data. Column names carry their units.

use std::io::Write;

use serde::Serialize;

use crate::discharge::DischargeResult;
use crate::error::{Error, Result};
use crate::integrator::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub time_in_inverse_gamma_minus: f64,
    pub energy_per_atom_in_omega0: f64,
    pub re_jp: f64,
    pub im_jp: f64,
    pub energy_variance_in_omega0_sq: f64,
    pub trace_error: f64,
    pub min_eigval: f64,
}

pub fn trajectory_rows(traj: &Trajectory) -> Vec<TrajectoryRow> {
    let n = traj.n_atoms as f64;
    traj.times
        .iter()
        .zip(&traj.records)
        .map(|(&t, r)| TrajectoryRow {
            time_in_inverse_gamma_minus: t,
            energy_per_atom_in_omega0: r.energy / n,
            re_jp: r.coherence_jp.re,
            im_jp: r.coherence_jp.im,
            energy_variance_in_omega0_sq: r.energy_variance,
            trace_error: r.trace_error,
            min_eigval: r.min_eigval,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyRow {
    pub index: usize,
    pub m: f64,
    pub population: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErgotropyRow {
    pub n_atoms: usize,
    pub theta_in_rad: f64,
    pub x: f64,
    pub ergotropy_per_atom_exact_in_omega0: f64,
    pub ergotropy_per_atom_closed_in_omega0: Option<f64>,
    /// Empty at the branch point x = 1.
    pub ergotropy_per_atom_asymptotic_in_omega0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChargingRow {
    pub n_atoms: usize,
    pub rabi_in_gamma_minus: f64,
    pub n_gamma_minus_t: f64,
    pub energy_per_atom_numeric_in_omega0: f64,
    pub energy_per_atom_analytic_in_omega0: f64,
    pub energy_per_atom_lower_bound_in_omega0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBoundRow {
    pub r: f64,
    pub theta_in_rad: f64,
    pub charge_fraction: f64,
    pub power_bound_in_n_sq_omega0_gamma_minus: f64,
    pub tau90: f64,
    pub admissible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DischargeRow {
    pub n_atoms: usize,
    pub n_gamma0_t: f64,
    pub energy_per_atom_in_omega0: f64,
    pub coherent_power_in_omega0_gamma_minus: f64,
    pub coherent_energy_per_atom_in_omega0: f64,
    pub energy_variance_in_omega0_sq: f64,
    pub stored_energy_per_atom_reference_in_omega0: f64,
}

/// Rows for one discharge run; `gamma0` sets the time axis Nγ₀t.
pub fn discharge_rows(res: &DischargeResult, gamma0: f64) -> Vec<DischargeRow> {
    let n_atoms = res.trajectory.n_atoms;
    let n = n_atoms as f64;
    let stored = res.stored_energy_initial / n;
    res.trajectory
        .times
        .iter()
        .enumerate()
        .map(|(k, &t)| DischargeRow {
            n_atoms,
            n_gamma0_t: n * gamma0 * t,
            energy_per_atom_in_omega0: res.trajectory.records[k].energy / n,
            coherent_power_in_omega0_gamma_minus: res.coherent_power[k],
            coherent_energy_per_atom_in_omega0: res.coherent_energy[k] / n,
            energy_variance_in_omega0_sq: res.energy_variance_series[k],
            stored_energy_per_atom_reference_in_omega0: stored,
        })
        .collect()
}

/// Serialize `rows` as CSV with a header row.
pub fn write_csv<W: Write, R: Serialize>(writer: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn csv_string<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}
