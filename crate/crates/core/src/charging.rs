//! Numerical charging runs under the secular master equation, starting from the
//! uncharged battery.

use crate::error::Result;
use crate::integrator::{integrate, IntegratorConfig, Observables, Sampling, Trajectory};
use crate::lindblad::{dressed_ground_state, SecularFrame, SecularGenerator};
use crate::model::ModelParams;
use crate::spin::{RotationMatrix, SpinOperators};

/// Dressed-basis trajectory from the bare ground state, sampled every `every`.
pub fn charging_trajectory(
    model: &ModelParams,
    t_end: f64,
    every: f64,
    cfg: &IntegratorConfig,
    frame: SecularFrame,
) -> Result<Trajectory> {
    let derived = model.derive()?;
    let ops = SpinOperators::new(model.n_atoms)?;
    let rotation = RotationMatrix::new(&ops, derived.theta)?;
    let rho0 = dressed_ground_state(&ops, &rotation)?;
    let generator = SecularGenerator::new(&derived, &ops, frame);
    let observables = Observables::dressed(&ops, &rotation)?;
    integrate(&rho0, &generator, t_end, cfg, Sampling::every(every), &observables)
}
