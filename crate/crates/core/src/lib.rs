//! Simulation of a collectively driven and damped ensemble of two-level atoms used
//! as a quantum battery: dissipative charging, steady-state ergotropy and
//! superradiant discharge.
//!
//! Units: ħ = 1, energies in ω₀, rates and inverse times in γ₋. States live in the
//! symmetric spin-j = N/2 subspace, indexed by ascending m.

pub mod asymptotics;
pub mod charging;
pub mod config;
pub mod discharge;
pub mod error;
pub mod export;
pub mod integrator;
pub mod lindblad;
pub mod model;
pub mod spin;
pub mod steady;

pub use error::{Error, Result};
pub use integrator::{integrate, IntegratorConfig, Observables, Sampling, Trajectory};
pub use lindblad::{Basis, DensityMatrix, FullGenerator, Generator, SecularFrame, SecularGenerator};
pub use model::{DerivedParams, ModelParams};
pub use spin::{CMatrix, RotationMatrix, SpinOperators};
