//! Flat run configuration shared by the config file and the command line.
//!
//! Every key is optional. Values set later (command-line flags over a file) win.
//!
//! ```toml
//! n_atoms = 8
//! theta = 1.87          # or delta/rabi
//! omega_p = 50.0
//! gamma0 = 1.0
//! gamma_plus = 10.0
//! gamma_minus = 1.0
//! t_end = 20.0
//! frame = "drive_off"
//! theta_grid = [0.05, 3.05, 0.05]
//! n_list = [2, 4]
//! r_list = [1.0, 5.0, 10.0]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::discharge::DischargeFrame;
use crate::error::{Error, Result};
use crate::integrator::{IntegratorConfig, Scheme};
use crate::model::ModelParams;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_atoms: Option<usize>,
    pub omega0: Option<f64>,
    pub delta: Option<f64>,
    pub rabi: Option<f64>,
    /// Dressing angle; combined with `omega_p` in place of `delta`/`rabi`.
    pub theta: Option<f64>,
    pub omega_p: Option<f64>,
    /// Sets Ω_R = rabi_per_atom·N at fixed θ.
    pub rabi_per_atom: Option<f64>,
    /// Target x; fixes γ₊ = x·tan⁴(θ/2)·γ₋.
    pub x: Option<f64>,
    pub gamma0: Option<f64>,
    pub gamma_plus: Option<f64>,
    pub gamma_minus: Option<f64>,
    pub t_end: Option<f64>,
    pub out: Option<String>,
    pub frame: Option<DischargeFrame>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub scheme: Option<Scheme>,
    /// [min, max, step]
    pub theta_grid: Option<Vec<f64>>,
    pub n_list: Option<Vec<usize>>,
    pub r_list: Option<Vec<f64>>,
    /// Dimensionless times NΓt/2 at which sweeps report the analytic power.
    pub tau_list: Option<Vec<f64>>,
    /// Also write a JSON run summary next to the CSV.
    pub summary: Option<bool>,
    /// Worker threads for sweeps and multi-N scenarios.
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident, $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// `self` with every key set in `top` replaced.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(
            base, top, n_atoms, omega0, delta, rabi, theta, omega_p, rabi_per_atom, x, gamma0, gamma_plus,
            gamma_minus, t_end, out, frame, rel_tol, abs_tol, max_step, scheme, theta_grid, n_list, r_list,
            tau_list, summary, threads,
        )
    }

    /// Model parameters starting from `defaults`.
    pub fn model_params(&self, defaults: &ModelParams) -> Result<ModelParams> {
        if (self.delta.is_some() || self.rabi.is_some()) && (self.theta.is_some() || self.omega_p.is_some()) {
            return Err(Error::Config("give either delta/rabi or theta/omega_p, not both".into()));
        }
        if self.rabi.is_some() && self.rabi_per_atom.is_some() {
            return Err(Error::Config("rabi and rabi_per_atom are exclusive".into()));
        }
        let mut p = *defaults;
        if let Some(n) = self.n_atoms {
            p.n_atoms = n;
        }
        if let Some(v) = self.omega0 {
            p.omega0 = v;
        }
        if let Some(v) = self.gamma0 {
            p.gamma0 = v;
        }
        if let Some(v) = self.gamma_plus {
            p.gamma_plus = v;
        }
        if let Some(v) = self.gamma_minus {
            p.gamma_minus = v;
        }
        if let Some(v) = self.delta {
            p.delta = v;
        }
        if let Some(v) = self.rabi {
            p.rabi = v;
        }
        if self.theta.is_some() || self.omega_p.is_some() {
            let theta = self.theta.unwrap_or_else(|| p.theta());
            let omega_p = self.omega_p.unwrap_or_else(|| p.omega_p());
            if !(0.0..=std::f64::consts::PI).contains(&theta) {
                return Err(Error::InvalidParameter(format!("theta must lie in [0, π], got {theta}")));
            }
            p.delta = omega_p * theta.cos();
            p.rabi = omega_p * theta.sin();
        }
        if let Some(k) = self.rabi_per_atom {
            let theta = p.theta();
            p.rabi = k * p.n_atoms as f64;
            p.delta = p.rabi * theta.cos() / theta.sin();
        }
        if let Some(x) = self.x {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::InvalidParameter(format!("x must be positive, got {x}")));
            }
            p.gamma_plus = x * (p.theta() / 2.0).tan().powi(4) * p.gamma_minus;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig> {
        let d = IntegratorConfig::default();
        let cfg = IntegratorConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_step: self.max_step.unwrap_or(d.max_step),
            scheme: self.scheme.unwrap_or(d.scheme),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// θ values of `theta_grid`, or `None` when unset.
    pub fn thetas(&self) -> Result<Option<Vec<f64>>> {
        self.theta_grid.as_deref().map(theta_grid).transpose()
    }
}

/// Points min + k·step up to max (inclusive within round-off).
pub fn theta_grid(spec: &[f64]) -> Result<Vec<f64>> {
    let [lo, hi, step] = spec else {
        return Err(Error::Config(format!("theta_grid needs [min, max, step], got {} values", spec.len())));
    };
    if !(step > &0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Config(format!("bad theta_grid {spec:?}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}
