//! Large-N charging curve, the average-power bound, and the mean-field
//! solutions it is built from.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DerivedParams;

/// τ₉₀ brackets are searched on [0, TAU_BRACKET].
pub const TAU_BRACKET: f64 = 100.0;

fn ln_cosh(u: f64) -> f64 {
    let a = u.abs();
    a + (0.5 * (1.0 + (-2.0 * a).exp())).ln()
}

fn sech(u: f64) -> f64 {
    (-ln_cosh(u)).exp()
}

/// Battery charge per atom ⟨E⟩/(Nω₀) at time t in the large-N limit.
pub fn energy_analytic(t: f64, n_atoms: usize, d: &DerivedParams) -> f64 {
    let (s, c) = d.theta.sin_cos();
    let u = n_atoms as f64 * d.gamma_eff * t / 2.0 + d.phi0;
    0.5 - 0.5 * c * u.tanh() - 0.5 * s * (d.omega_p * t).cos() * sech(u)
}

/// Instantaneous power d⟨E⟩/dt of [`energy_analytic`] for the whole battery, in
/// units of ω₀γ₋ (differentiated by hand).
pub fn power_analytic(t: f64, n_atoms: usize, d: &DerivedParams) -> f64 {
    let n = n_atoms as f64;
    let (s, c) = d.theta.sin_cos();
    let k = n * d.gamma_eff / 2.0;
    let u = k * t + d.phi0;
    let sh = sech(u);
    let (sw, cw) = (d.omega_p * t).sin_cos();
    n * (-0.5 * c * k * sh * sh + 0.5 * s * sh * (d.omega_p * sw + k * cw * u.tanh()))
}

/// ½(1 − cosθ·tanh(τ+φ₀) − sinθ/cosh(τ+φ₀)), the charge fraction with cos(Ω_P t) → 1.
pub fn energy_lower_bound(tau: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let u = tau + c.atanh();
    0.5 * (1.0 - c * u.tanh() - s * sech(u))
}

fn check_angle(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::DegenerateAngle { theta });
    }
    Ok(())
}

/// Dimensionless time at which [`energy_lower_bound`] reaches 90% of sin²(θ/2).
pub fn tau90(theta: f64) -> Result<f64> {
    check_angle(theta)?;
    let target = 0.9 * (theta / 2.0).sin().powi(2);
    let f = |tau: f64| energy_lower_bound(tau, theta) - target;
    let (mut lo, mut hi) = (0.0, TAU_BRACKET);
    if f(lo) >= 0.0 || f(hi) <= 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// x > 1, r ≥ 1; charge fraction sin²(θ/2).
    Charging,
    /// x < 1, r ≤ 1; charge fraction cos²(θ/2).
    Inverted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerBoundPoint {
    pub theta: f64,
    pub charge_fraction: f64,
    /// Lower bound on P_av/(N²ω₀γ₋).
    pub bound: f64,
    pub tau90: f64,
    /// Γ has the sign that makes the branch charge (bound ≥ 0).
    pub admissible: bool,
}

pub fn power_bound_point(r: f64, theta: f64, branch: Branch) -> Result<PowerBoundPoint> {
    check_angle(theta)?;
    let (charge_fraction, tau, shape) = match branch {
        Branch::Charging => {
            let e = (theta / 2.0).sin().powi(2);
            (e, tau90(theta)?, r * (1.0 - e).powi(2) - e * e)
        }
        Branch::Inverted => {
            // mirror image θ → π − θ of the charging branch
            let e = (theta / 2.0).cos().powi(2);
            (e, tau90(std::f64::consts::PI - theta)?, (1.0 - e).powi(2) - r * e * e)
        }
    };
    let bound = 0.9 / (2.0 * tau) * charge_fraction * shape;
    Ok(PowerBoundPoint { theta, charge_fraction, bound, tau90: tau, admissible: shape >= 0.0 })
}

pub fn power_bound_curve(r: f64, thetas: &[f64], branch: Branch) -> Result<Vec<PowerBoundPoint>> {
    let ok = match branch {
        Branch::Charging => r >= 1.0,
        Branch::Inverted => r > 0.0 && r <= 1.0,
    };
    if !ok {
        return Err(Error::InvalidParameter(format!("r = {r} not allowed on the {branch:?} branch")));
    }
    thetas.iter().map(|&th| power_bound_point(r, th, branch)).collect()
}

/// Charging window T = 2τ₉₀/(NΓ) used for the average power.
pub fn charging_window(n_atoms: usize, d: &DerivedParams) -> Result<f64> {
    if !(d.gamma_eff > 0.0) {
        return Err(Error::InvalidParameter(format!("Γ = {} must be positive", d.gamma_eff)));
    }
    Ok(2.0 * tau90(d.theta)? / (n_atoms as f64 * d.gamma_eff))
}

/// 0.9·sin²(θ/2)·N²Γ/(2τ₉₀) in units of ω₀.
pub fn average_power_bound(n_atoms: usize, d: &DerivedParams) -> Result<f64> {
    let n = n_atoms as f64;
    Ok(0.9 * d.charge_fraction() * n * n * d.gamma_eff / (2.0 * tau90(d.theta)?))
}

/// ⟨n⟩(t) = a − b·tanh(ct + φ₀) with the exact (not large-N) coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFieldSolution {
    pub n_atoms: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub phi0: f64,
    /// Initial coherence amplitude y₀ = −(N/2)sinθ.
    pub y0: f64,
    x: f64,
    raise_rate: f64,
}

impl MeanFieldSolution {
    pub fn new(n_atoms: usize, d: &DerivedParams) -> Result<Self> {
        if (d.x - 1.0).abs() < 1e-12 {
            return Err(Error::BranchPoint { x: d.x });
        }
        let j = n_atoms as f64 / 2.0;
        let a = 0.5 * (d.x + 1.0) / (d.x - 1.0);
        let b = (j * (j + 1.0) + a * a).sqrt();
        let c = d.gamma_eff * b;
        let n0 = -j * d.theta.cos();
        let arg = (a - n0) / b;
        if arg.abs() >= 1.0 {
            return Err(Error::Range(format!("tanh⁻¹ argument {arg} outside (−1, 1)")));
        }
        Ok(Self {
            n_atoms,
            a,
            b,
            c,
            phi0: arg.atanh(),
            y0: -j * d.theta.sin(),
            x: d.x,
            raise_rate: d.raise_rate(),
        })
    }

    pub fn mean_n(&self, t: f64) -> f64 {
        self.a - self.b * (self.c * t + self.phi0).tanh()
    }

    pub fn mean_n_rate(&self, t: f64) -> f64 {
        let s = sech(self.c * t + self.phi0);
        -self.b * self.c * s * s
    }

    /// Right-hand side of the closed ⟨n⟩ equation with ⟨n²⟩ → ⟨n⟩²:
    /// γ₋sin⁴(θ/2)[(x−1)(⟨n⟩² − j(j+1)) − (x+1)⟨n⟩].
    pub fn closure_rhs(&self, n: f64) -> f64 {
        self.closure_rhs_moments(n, n * n)
    }

    /// Same, keeping ⟨n²⟩ separate. Exact for the secular population dynamics.
    pub fn closure_rhs_moments(&self, n: f64, n_sq: f64) -> f64 {
        let j = self.n_atoms as f64 / 2.0;
        self.raise_rate * ((self.x - 1.0) * (n_sq - j * (j + 1.0)) - (self.x + 1.0) * n)
    }

    pub fn residual(&self, t: f64) -> f64 {
        (self.mean_n_rate(t) - self.closure_rhs(self.mean_n(t))).abs()
    }
}

/// Mean-field ⟨n⟩(t) together with its largest closure residual over `times`.
pub fn meanfield_populations_ode(
    n_atoms: usize,
    d: &DerivedParams,
    times: &[f64],
) -> Result<(MeanFieldSolution, f64)> {
    let sol = MeanFieldSolution::new(n_atoms, d)?;
    let worst = times.iter().map(|&t| sol.residual(t)).fold(0.0, f64::max);
    Ok((sol, worst))
}

/// y(t), whose real part is ⟨J_x′⟩, from the closed coherence equation with exact a, b, c.
pub fn coherence_ode_solution(t: f64, n_atoms: usize, d: &DerivedParams) -> Result<Complex64> {
    let mf = MeanFieldSolution::new(n_atoms, d)?;
    let decay = -0.125 * d.theta.sin().powi(2) * d.gamma0 * t
        + mf.c / (2.0 * mf.b) * ((3.0 - d.x) / (d.x - 1.0)) * t
        + ln_cosh(mf.phi0)
        - ln_cosh(mf.c * t + mf.phi0);
    Ok(Complex64::from_polar(mf.y0 * decay.exp(), d.omega_p * t))
}

/// Large-N form Re y ≈ −(N/2)sinθ·cos(Ω_P t)·coshφ₀/cosh(NΓt/2 + φ₀), φ₀ = tanh⁻¹(cosθ).
pub fn coherence_reduced(t: f64, n_atoms: usize, d: &DerivedParams) -> f64 {
    let j = n_atoms as f64 / 2.0;
    let u = n_atoms as f64 * d.gamma_eff * t / 2.0 + d.phi0;
    -j * d.theta.sin() * (d.omega_p * t).cos() * (ln_cosh(d.phi0) - ln_cosh(u)).exp()
}
