//! Superradiant release of the stored energy once the charging channel is closed
//! and the γ₀ channel reopened.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig, Observables, Sampling, Trajectory};
use crate::lindblad::{expectation, Basis, DensityMatrix, FullGenerator};
use crate::model::{build_hamiltonians, DerivedParams, ModelParams};
use crate::spin::{CMatrix, RotationMatrix, SpinOperators};
use crate::steady::steady_state;

/// Samples per superradiant time 1/(Nγ₀).
pub const SAMPLES_PER_EMISSION_TIME: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DischargeFrame {
    /// No Hamiltonian in the frame rotating at ω₀.
    #[default]
    DriveOff,
    /// The pump H₁ stays on.
    Driven,
}

impl std::str::FromStr for DischargeFrame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drive_off" => Ok(Self::DriveOff),
            "driven" => Ok(Self::Driven),
            other => Err(Error::InvalidParameter(format!("unknown frame {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DischargeResult {
    /// Bare-basis trajectory under γ₀𝓛[J₋].
    pub trajectory: Trajectory,
    /// dW/dt = γ₀|⟨J₊⟩|², in units of ω₀γ₋.
    pub coherent_power: Vec<f64>,
    /// W(t), in units of ω₀.
    pub coherent_energy: Vec<f64>,
    pub stored_energy_initial: f64,
    /// W(t_end)/E(0).
    pub coherent_fraction: f64,
    pub energy_variance_series: Vec<f64>,
}

impl DischargeResult {
    pub fn times(&self) -> &[f64] {
        &self.trajectory.times
    }

    pub fn energies(&self) -> Vec<f64> {
        self.trajectory.energies()
    }

    /// Largest violation of E(0) − E(t) ≥ W(t); zero or negative when it holds.
    pub fn energy_balance_violation(&self) -> f64 {
        let e0 = self.stored_energy_initial;
        self.trajectory
            .records
            .iter()
            .zip(&self.coherent_energy)
            .map(|(r, w)| w - (e0 - r.energy))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// First time the stored energy falls to half its initial value, linearly interpolated.
    pub fn half_time(&self) -> Option<f64> {
        half_time(&self.trajectory.times, &self.energies())
    }

    pub fn peak_variance(&self) -> f64 {
        self.energy_variance_series.iter().copied().fold(0.0, f64::max)
    }
}

pub fn half_time(times: &[f64], energies: &[f64]) -> Option<f64> {
    let half = 0.5 * *energies.first()?;
    if half <= 0.0 {
        return None;
    }
    energies.windows(2).zip(times.windows(2)).find_map(|(e, t)| {
        (e[0] > half && e[1] <= half).then(|| t[0] + (t[1] - t[0]) * (e[0] - half) / (e[0] - e[1]))
    })
}

/// ⟨J₊⟩ at the end of charging: Tr[ρ(cosθJ_x − sinθJ_z + iJ_y)] for a dressed-basis ρ.
pub fn initial_coherence(
    rho_ss: &DensityMatrix,
    derived: &DerivedParams,
    ops: &SpinOperators,
) -> Result<Complex64> {
    rho_ss.require_basis(Basis::Dressed)?;
    let (s, c) = derived.theta.sin_cos();
    let i = Complex64::new(0.0, 1.0);
    let op: CMatrix = &ops.jx * Complex64::from(c) - &ops.jz * Complex64::from(s) + &ops.jy * i;
    expectation(rho_ss, &op)
}

/// The steady charged state rotated into the bare basis.
pub fn charged_state_bare(ops: &SpinOperators, derived: &DerivedParams) -> Result<DensityMatrix> {
    let rotation = RotationMatrix::new(ops, derived.theta)?;
    steady_state(ops.n_atoms(), derived.x)?.change_basis(&rotation)
}

fn check_discharge(rho0: &DensityMatrix, gamma0: f64) -> Result<()> {
    rho0.require_basis(Basis::Bare)?;
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(Error::InvalidParameter(format!("γ₀ must be positive, got {gamma0}")));
    }
    Ok(())
}

/// Discharge from `rho0` (bare basis) under the Hamiltonian selected by `frame`.
pub fn run_discharge(
    rho0: &DensityMatrix,
    model: &ModelParams,
    frame: DischargeFrame,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<DischargeResult> {
    model.validate()?;
    let ops = SpinOperators::new(model.n_atoms)?;
    let hamiltonian = match frame {
        DischargeFrame::DriveOff => CMatrix::zeros(ops.dim(), ops.dim()),
        DischargeFrame::Driven => build_hamiltonians(model, &ops).h1,
    };
    run_discharge_with_hamiltonian(rho0, &ops, hamiltonian, model.gamma0, t_end, cfg)
}

/// Discharge under an arbitrary bare-basis Hamiltonian; used to vary the frame convention.
pub fn run_discharge_with_hamiltonian(
    rho0: &DensityMatrix,
    ops: &SpinOperators,
    hamiltonian: CMatrix,
    gamma0: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<DischargeResult> {
    check_discharge(rho0, gamma0)?;
    let generator = FullGenerator::new(hamiltonian, gamma0, ops)?;
    let every = 1.0 / (SAMPLES_PER_EMISSION_TIME * ops.n_atoms() as f64 * gamma0);
    let trajectory = integrate(rho0, &generator, t_end, cfg, Sampling::every(every), &Observables::bare(ops))?;

    let coherent_power: Vec<f64> = trajectory.records.iter().map(|r| gamma0 * r.coherence_jp.norm_sqr()).collect();
    let mut coherent_energy = Vec::with_capacity(coherent_power.len());
    let mut w = 0.0;
    coherent_energy.push(0.0);
    for k in 1..coherent_power.len() {
        w += 0.5 * (trajectory.times[k] - trajectory.times[k - 1]) * (coherent_power[k] + coherent_power[k - 1]);
        coherent_energy.push(w);
    }
    let stored_energy_initial = trajectory.records[0].energy;
    let coherent_fraction = if stored_energy_initial > 0.0 { w / stored_energy_initial } else { 0.0 };
    let energy_variance_series = trajectory.records.iter().map(|r| r.energy_variance).collect();
    Ok(DischargeResult {
        trajectory,
        coherent_power,
        coherent_energy,
        stored_energy_initial,
        coherent_fraction,
        energy_variance_series,
    })
}

/// Default discharge window, several superradiant times 8/(Nγ₀).
pub fn default_t_end(n_atoms: usize, gamma0: f64) -> f64 {
    8.0 / (n_atoms as f64 * gamma0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceScaling {
    pub n_atoms: Vec<usize>,
    pub peak_variance: Vec<f64>,
    /// Least-squares slope of ln(peak ΔH_B²) against ln N.
    pub exponent: f64,
}

/// Peak-over-time ΔH_B² during drive-off discharge from the charged state, for each N,
/// and its power-law exponent in N. Points run in parallel, results stay in input order.
pub fn variance_scaling(n_list: &[usize], model: &ModelParams, cfg: &IntegratorConfig) -> Result<VarianceScaling> {
    if n_list.len() < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 atom numbers, got {}", n_list.len())));
    }
    let peaks: Vec<f64> = n_list
        .par_iter()
        .map(|&n| {
            let m = ModelParams { n_atoms: n, ..*model };
            let ops = SpinOperators::new(n)?;
            let rho0 = charged_state_bare(&ops, &m.derive()?)?;
            let t_end = default_t_end(n, m.gamma0);
            Ok(run_discharge(&rho0, &m, DischargeFrame::DriveOff, t_end, cfg)?.peak_variance())
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = peaks.iter().map(|p| p.ln()).collect();
    let exponent = fit_slope(&xs, &ys);
    Ok(VarianceScaling { n_atoms: n_list.to_vec(), peak_variance: peaks, exponent })
}

pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::trace_of_product;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn model(n: usize) -> ModelParams {
        ModelParams::from_angle(n, 1.87, 50.0, 1.0, 10.0, 1.0)
    }

    fn charged(n: usize) -> (DensityMatrix, ModelParams) {
        let m = model(n);
        let ops = SpinOperators::new(n).unwrap();
        (charged_state_bare(&ops, &m.derive().unwrap()).unwrap(), m)
    }

    #[test]
    fn initial_coherence_matches_bare_trace() {
        let m = model(6);
        let d = m.derive().unwrap();
        let ops = SpinOperators::new(6).unwrap();
        let rho_ss = steady_state(6, d.x).unwrap();
        let y = initial_coherence(&rho_ss, &d, &ops).unwrap();
        let bare = charged_state_bare(&ops, &d).unwrap();
        let direct = trace_of_product(bare.matrix(), &ops.jp);
        assert_abs_diff_eq!(y.re, direct.re, epsilon = 1e-12);
        assert_abs_diff_eq!(y.im, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(direct.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn initial_coherence_large_n_limit() {
        let mut prev = f64::INFINITY;
        for &n in &[20usize, 80, 320] {
            let d = model(n).derive().unwrap();
            let ops = SpinOperators::new(n).unwrap();
            let rho_ss = steady_state(n, d.x).unwrap();
            let y = initial_coherence(&rho_ss, &d, &ops).unwrap();
            let gap = (y.norm() / (n as f64 / 2.0) - 1.87f64.sin()).abs();
            assert!(gap < prev, "N={n}: {gap}");
            prev = gap;
        }
        assert!(prev < 0.01);
    }

    #[test]
    fn ground_state_emits_nothing() {
        let ops = SpinOperators::new(4).unwrap();
        let rho0 = DensityMatrix::bare_ground(&ops);
        let out = run_discharge(&rho0, &model(4), DischargeFrame::DriveOff, 1.0, &IntegratorConfig::default()).unwrap();
        assert!(out.coherent_energy.iter().all(|&w| w == 0.0));
        assert_eq!(out.coherent_fraction, 0.0);
        assert!(out.energy_variance_series[0].abs() < 1e-14);
        assert_eq!(out.half_time(), None);
    }

    #[test]
    fn excited_atom_decays_without_coherent_power() {
        let rho0 = DensityMatrix::pure(Basis::Bare, 2, 1);
        let out = run_discharge(&rho0, &model(1), DischargeFrame::DriveOff, 5.0, &IntegratorConfig::default()).unwrap();
        assert!(out.coherent_power.iter().all(|&p| p < 1e-24));
        let e_end = *out.energies().last().unwrap();
        assert_abs_diff_eq!(e_end, (-5.0f64).exp(), epsilon = 1e-7);
        assert_abs_diff_eq!(out.half_time().unwrap(), 2f64.ln(), epsilon = 1e-4);
    }

    #[test]
    fn invariants_of_coherent_emission() {
        let (rho0, m) = charged(6);
        let out = run_discharge(&rho0, &m, DischargeFrame::DriveOff, default_t_end(6, 1.0), &IntegratorConfig::default()).unwrap();
        assert!(out.coherent_power.iter().all(|&p| p >= 0.0));
        assert!(out.coherent_energy.windows(2).all(|w| w[1] >= w[0]));
        assert!(out.coherent_fraction > 0.0 && out.coherent_fraction <= 1.0 + 1e-9);
        assert!(out.energy_balance_violation() <= 1e-6 * 6.0);
        let cadence = out.times()[1] - out.times()[0];
        assert!(cadence <= 0.01 / 6.0 + 1e-15);
    }

    #[test]
    fn phase_convention_does_not_change_emission() {
        let (rho0, m) = charged(5);
        let ops = SpinOperators::new(5).unwrap();
        let cfg = IntegratorConfig::default();
        let t_end = default_t_end(5, 1.0);
        let base = run_discharge(&rho0, &m, DischargeFrame::DriveOff, t_end, &cfg).unwrap();
        let shifted = run_discharge_with_hamiltonian(&rho0, &ops, &ops.jz * Complex64::from(3.7), 1.0, t_end, &cfg).unwrap();
        for (a, b) in base.trajectory.records.iter().zip(&shifted.trajectory.records) {
            assert_abs_diff_eq!(a.coherence_jp.norm(), b.coherence_jp.norm(), epsilon = 1e-7);
            assert_abs_diff_eq!(a.energy, b.energy, epsilon = 1e-8);
        }
    }

    #[test]
    fn coherent_fraction_grows_with_n() {
        let fractions: Vec<f64> = [2usize, 4, 8]
            .iter()
            .map(|&n| {
                let (rho0, m) = charged(n);
                run_discharge(&rho0, &m, DischargeFrame::DriveOff, default_t_end(n, 1.0), &IntegratorConfig::default())
                    .unwrap()
                    .coherent_fraction
            })
            .collect();
        assert!(fractions.windows(2).all(|w| w[1] > w[0]), "{fractions:?}");
        assert_abs_diff_eq!(fractions[0], 0.207, epsilon = 2e-3);
        assert_abs_diff_eq!(fractions[2], 0.658, epsilon = 2e-3);
    }

    #[test]
    fn uniform_state_variance() {
        // x = 1 at θ = π/2: ΔH_B² of the dressed-uniform state is the uniform variance of m.
        let n = 6;
        let ops = SpinOperators::new(n).unwrap();
        let d = ModelParams::from_angle(n, FRAC_PI_2, 10.0, 1.0, 1.0, 1.0).derive().unwrap();
        let rho0 = charged_state_bare(&ops, &d).unwrap();
        let obs = Observables::bare(&ops).record(rho0.matrix());
        let j = n as f64 / 2.0;
        assert_abs_diff_eq!(obs.energy_variance, j * (j + 1.0) / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (rho0, m) = charged(3);
        let cfg = IntegratorConfig::default();
        let bad = ModelParams { gamma0: 0.0, ..m };
        assert!(run_discharge(&rho0, &bad, DischargeFrame::DriveOff, 1.0, &cfg).is_err());
        let ops = SpinOperators::new(3).unwrap();
        let dressed = steady_state(3, m.derive().unwrap().x).unwrap();
        assert!(run_discharge_with_hamiltonian(&dressed, &ops, CMatrix::zeros(4, 4), 1.0, 1.0, &cfg).is_err());
        assert!(variance_scaling(&[2, 4], &m, &cfg).is_err());
        assert_eq!("driven".parse::<DischargeFrame>().unwrap(), DischargeFrame::Driven);
        assert!("sideways".parse::<DischargeFrame>().is_err());
    }

    #[test]
    fn slope_fit() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert_abs_diff_eq!(fit_slope(&xs, &ys), 2.0, epsilon = 1e-14);
    }
}
