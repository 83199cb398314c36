//! Physical parameters, dressed-frame quantities and Hamiltonians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{max_abs_diff, CMatrix, RotationMatrix, SpinOperators};

/// Inputs of the driven collective-decay model. Rates are in units of γ₋
/// when `gamma_minus = 1`; ħ = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_atoms: usize,
    /// Atomic frequency. Energies are reported in units of ω₀, so this is only echoed.
    pub omega0: f64,
    /// Detuning Δ = ω₀ − ω_P.
    pub delta: f64,
    /// Rabi frequency Ω_R ≥ 0.
    pub rabi: f64,
    /// γ(ω_P)
    pub gamma0: f64,
    /// γ(ω_P + Ω_P)
    pub gamma_plus: f64,
    /// γ(ω_P − Ω_P)
    pub gamma_minus: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::from_angle(4, 1.87, 50.0, 1.0, 10.0, 1.0)
    }
}

impl ModelParams {
    /// Parameters for a given dressing angle θ and generalized Rabi frequency Ω_P.
    pub fn from_angle(
        n_atoms: usize,
        theta: f64,
        omega_p: f64,
        gamma0: f64,
        gamma_plus: f64,
        gamma_minus: f64,
    ) -> Self {
        Self {
            n_atoms,
            omega0: 1.0,
            delta: omega_p * theta.cos(),
            rabi: omega_p * theta.sin(),
            gamma0,
            gamma_plus,
            gamma_minus,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_atoms == 0 {
            return bad("n_atoms must be at least 1".into());
        }
        for (name, v) in [
            ("omega0", self.omega0),
            ("delta", self.delta),
            ("rabi", self.rabi),
            ("gamma0", self.gamma0),
            ("gamma_plus", self.gamma_plus),
            ("gamma_minus", self.gamma_minus),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if self.rabi < 0.0 {
            return bad(format!("rabi must be non-negative, got {}", self.rabi));
        }
        if self.delta == 0.0 && self.rabi == 0.0 {
            return bad("delta and rabi cannot both vanish (Ω_P = 0)".into());
        }
        if self.gamma0 < 0.0 || self.gamma_plus < 0.0 {
            return bad("decay rates must be non-negative".into());
        }
        if self.gamma_minus <= 0.0 {
            return bad(format!("gamma_minus must be positive, got {}", self.gamma_minus));
        }
        Ok(())
    }

    pub fn omega_p(&self) -> f64 {
        self.delta.hypot(self.rabi)
    }

    pub fn theta(&self) -> f64 {
        self.rabi.atan2(self.delta)
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        derive(self)
    }
}

/// Quantities of the dressed frame that the closed forms are written in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    pub omega_p: f64,
    pub theta: f64,
    /// r = γ₊/γ₋
    pub ratio_r: f64,
    /// x = r·cot⁴(θ/2)
    pub x: f64,
    /// Γ = γ₊cos⁴(θ/2) − γ₋sin⁴(θ/2)
    pub gamma_eff: f64,
    /// φ₀ = tanh⁻¹(cos θ)
    pub phi0: f64,
    pub gamma0: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

impl DerivedParams {
    /// Rate multiplying 𝓛[J₊′]: γ₋ sin⁴(θ/2).
    pub fn raise_rate(&self) -> f64 {
        self.gamma_minus * (self.theta / 2.0).sin().powi(4)
    }

    /// Rate multiplying 𝓛[J₋′]: γ₊ cos⁴(θ/2).
    pub fn lower_rate(&self) -> f64 {
        self.gamma_plus * (self.theta / 2.0).cos().powi(4)
    }

    /// Rate multiplying 𝓛[J_z′]: γ₀ sin²θ.
    pub fn dephasing_rate(&self) -> f64 {
        self.gamma0 * self.theta.sin().powi(2)
    }

    /// Asymptotic charge fraction sin²(θ/2) on the x > 1 branch.
    pub fn charge_fraction(&self) -> f64 {
        (self.theta / 2.0).sin().powi(2)
    }
}

pub fn derive(p: &ModelParams) -> Result<DerivedParams> {
    p.validate()?;
    let theta = p.theta();
    if theta <= 0.0 || theta >= std::f64::consts::PI {
        return Err(Error::DegenerateAngle { theta });
    }
    let ratio_r = p.gamma_plus / p.gamma_minus;
    let half = theta / 2.0;
    let x = ratio_r * (half.cos() / half.sin()).powi(4);
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "x = r·cot⁴(θ/2) = {x} must be positive and finite (gamma_plus > 0 required)"
        )));
    }
    let gamma_eff = p.gamma_plus * half.cos().powi(4) - p.gamma_minus * half.sin().powi(4);
    Ok(DerivedParams {
        omega_p: p.omega_p(),
        theta,
        ratio_r,
        x,
        gamma_eff,
        phi0: theta.cos().atanh(),
        gamma0: p.gamma0,
        gamma_plus: p.gamma_plus,
        gamma_minus: p.gamma_minus,
    })
}

#[derive(Debug, Clone)]
pub struct Hamiltonians {
    /// ω₀ J_z in units of ω₀, i.e. J_z.
    pub h0: CMatrix,
    /// Δ J_z − Ω_R J_x in the frame rotating at ω_P.
    pub h1: CMatrix,
    /// Ω_P J_z written in the dressed basis.
    pub h1_dressed: CMatrix,
}

pub fn build_hamiltonians(p: &ModelParams, ops: &SpinOperators) -> Hamiltonians {
    Hamiltonians {
        h0: ops.jz.clone(),
        h1: ops.jz.scale(p.delta) - ops.jx.scale(p.rabi),
        h1_dressed: ops.jz.scale(p.omega_p()),
    }
}

/// Elementwise residual of J₋ = −sinθ J_z′ − (1−cosθ)/2 J₊′ + (1+cosθ)/2 J₋′,
/// where primes are operators rotated by `r`.
pub fn jminus_decomposition_residual(ops: &SpinOperators, r: &RotationMatrix) -> Result<f64> {
    let (s, c) = r.theta().sin_cos();
    let jz_r = r.rotate(&ops.jz)?;
    let jp_r = r.rotate(&ops.jp)?;
    let jm_r = r.rotate(&ops.jm)?;
    let rebuilt = jz_r.scale(-s) - jp_r.scale((1.0 - c) / 2.0) + jm_r.scale((1.0 + c) / 2.0);
    Ok(max_abs_diff(&ops.jm, &rebuilt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params(delta: f64, rabi: f64, gp: f64, gm: f64) -> ModelParams {
        ModelParams { n_atoms: 4, omega0: 1.0, delta, rabi, gamma0: 1.0, gamma_plus: gp, gamma_minus: gm }
    }

    fn sorted_eigenvalues(h: &CMatrix) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    #[test]
    fn resonant_symmetric_point() {
        let d = params(0.0, 1.0, 1.0, 1.0).derive().unwrap();
        assert_abs_diff_eq!(d.omega_p, 1.0);
        assert_abs_diff_eq!(d.theta, FRAC_PI_2);
        assert_abs_diff_eq!(d.x, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.gamma_eff, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.phi0, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn charging_regime_values() {
        // Values frozen from an independent evaluation of r·cot⁴(θ/2) and
        // γ₊cos⁴(θ/2) − γ₋sin⁴(θ/2) at θ = 1.87, r = 10.
        let p = ModelParams::from_angle(4, 1.87, 30.0, 1.0, 10.0, 1.0);
        let d = p.derive().unwrap();
        assert_abs_diff_eq!(d.theta, 1.87, epsilon = 1e-14);
        assert_abs_diff_eq!(d.x, 2.966856606057059, epsilon = 1e-12);
        assert_abs_diff_eq!(d.gamma_eff, 0.8243104799186338, epsilon = 1e-12);
        assert_abs_diff_eq!(d.charge_fraction(), 0.6473796764986305, epsilon = 1e-12);
    }

    #[test]
    fn negative_detuning_quadrant() {
        let d = params(-1.0, 0.5, 3.0, 1.0).derive().unwrap();
        assert!(d.theta > FRAC_PI_2 && d.theta < PI);
        assert!(d.x < d.ratio_r);
    }

    #[test]
    fn degenerate_and_invalid_inputs() {
        assert!(matches!(params(1.0, 0.0, 1.0, 1.0).derive(), Err(Error::DegenerateAngle { .. })));
        assert!(matches!(params(-1.0, 0.0, 1.0, 1.0).derive(), Err(Error::DegenerateAngle { .. })));
        assert!(matches!(params(0.0, 0.0, 1.0, 1.0).derive(), Err(Error::InvalidParameter(_))));
        assert!(params(1.0, -1.0, 1.0, 1.0).derive().is_err());
        assert!(params(1.0, 1.0, 1.0, 0.0).derive().is_err());
        assert!(params(1.0, 1.0, 0.0, 1.0).derive().is_err());
    }

    #[test]
    fn hamiltonian_spectra() {
        let ops = SpinOperators::new(1).unwrap();
        let h = build_hamiltonians(&params(3.0, 4.0, 1.0, 1.0), &ops);
        let ev = sorted_eigenvalues(&h.h1);
        assert_abs_diff_eq!(ev[0], -2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(ev[1], 2.5, epsilon = 1e-12);

        let ops = SpinOperators::new(6).unwrap();
        let h = build_hamiltonians(&params(0.7, 0.0, 1.0, 1.0), &ops);
        assert!(max_abs_diff(&h.h1, &ops.jz.scale(0.7)) == 0.0);
        let h = build_hamiltonians(&params(-0.4, 2.3, 1.0, 1.0), &ops);
        let omega_p = (0.4f64).hypot(2.3);
        for (k, ev) in sorted_eigenvalues(&h.h1).iter().enumerate() {
            assert_abs_diff_eq!(*ev, ops.m(k) * omega_p, epsilon = 1e-10);
        }
    }

    #[test]
    fn dressed_hamiltonian_rotates_to_driven() {
        let p = ModelParams::from_angle(5, 1.87, 7.0, 1.0, 10.0, 1.0);
        let ops = SpinOperators::new(5).unwrap();
        let h = build_hamiltonians(&p, &ops);
        let r = ops.rotation(p.theta()).unwrap();
        assert!(max_abs_diff(&r.rotate(&h.h1_dressed).unwrap(), &h.h1) < 1e-10);
    }

    #[test]
    fn jminus_decomposition() {
        let ops = SpinOperators::new(3).unwrap();
        assert!(jminus_decomposition_residual(&ops, &ops.rotation(0.0).unwrap()).unwrap() < 1e-15);
        assert!(jminus_decomposition_residual(&ops, &ops.rotation(PI).unwrap()).unwrap() < 1e-12);
        assert!(jminus_decomposition_residual(&ops, &ops.rotation(1.87).unwrap()).unwrap() < 1e-10);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scale_covariance(delta in -5.0..5.0f64, rabi in 0.01..5.0f64, s in 0.1..20.0f64) {
                let a = params(delta, rabi, 2.0, 1.0).derive().unwrap();
                let b = params(s * delta, s * rabi, 2.0, 1.0).derive().unwrap();
                prop_assert!((a.theta - b.theta).abs() < 1e-12);
                prop_assert!((a.x - b.x).abs() <= 1e-10 * a.x.max(1.0));
                prop_assert!((b.omega_p - s * a.omega_p).abs() < 1e-10 * b.omega_p);
            }

            #[test]
            fn mirror_and_sign_identities(theta in 0.05..3.09f64, r in 0.05..20.0f64) {
                let a = ModelParams::from_angle(3, theta, 10.0, 1.0, r, 1.0).derive().unwrap();
                let b = ModelParams::from_angle(3, PI - theta, 10.0, 1.0, r, 1.0).derive().unwrap();
                prop_assert!((a.x * b.x / (r * r) - 1.0).abs() < 1e-9);
                if (a.x - 1.0).abs() > 1e-9 {
                    prop_assert_eq!(a.gamma_eff > 0.0, a.x > 1.0);
                }
            }
        }
    }
}
