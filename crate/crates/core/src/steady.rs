//! Detailed-balance steady state of the secular dynamics and its ergotropy.
//!
//! Populations live in the dressed basis, index i ↔ m = −N/2 + i, with weight
//! x^{N/2−m}. All power sums are evaluated after subtracting the largest
//! exponent, so any finite positive x is representable.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{Basis, DensityMatrix};

/// Below this distance from x = 1 the closed-form ergotropy is replaced by the exact sums.
pub const BRANCH_EPS: f64 = 1e-6;

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Range(format!("x = {x} must be positive and finite")));
    }
    Ok(())
}

fn m_value(n_atoms: usize, i: usize) -> f64 {
    i as f64 - n_atoms as f64 / 2.0
}

pub fn steady_populations(n_atoms: usize, x: f64) -> Result<Vec<f64>> {
    check_x(x)?;
    if n_atoms == 0 {
        return Err(Error::InvalidParameter("n_atoms must be at least 1".into()));
    }
    let ln_x = x.ln();
    let exponents: Vec<f64> = (0..=n_atoms).map(|i| (n_atoms - i) as f64 * ln_x).collect();
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|e| (e - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// ρ_ss as a diagonal matrix in the dressed basis.
pub fn steady_state(n_atoms: usize, x: f64) -> Result<DensityMatrix> {
    Ok(DensityMatrix::diagonal(Basis::Dressed, &steady_populations(n_atoms, x)?))
}

fn mean_m(populations: &[f64]) -> f64 {
    let n = populations.len() - 1;
    populations.iter().enumerate().map(|(i, p)| m_value(n, i) * p).sum()
}

/// Tr(ρ_ss H₀) in units of ω₀.
pub fn steady_energy(n_atoms: usize, x: f64, theta: f64) -> Result<f64> {
    Ok(theta.cos() * mean_m(&steady_populations(n_atoms, x)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgotropyReport {
    pub n_atoms: usize,
    pub x: f64,
    pub theta: f64,
    /// r = x·tan⁴(θ/2)
    pub r: f64,
    pub populations: Vec<f64>,
    /// Tr(ρ_ss H₀)/ω₀
    pub energy_ss: f64,
    /// Tr(ρ_p H₀)/ω₀
    pub passive_energy: f64,
    pub ergotropy: f64,
    pub ergotropy_per_atom: f64,
    pub ergotropy_per_atom_closed: f64,
    /// False when |x − 1| ≤ BRANCH_EPS and the closed form fell back to the sums.
    pub closed_form_used: bool,
}

impl ErgotropyReport {
    /// Stored charge ⟨H₀⟩ + N/2 in units of ω₀.
    pub fn battery_charge(&self) -> f64 {
        self.energy_ss + self.n_atoms as f64 / 2.0
    }
}

/// Energy of the passive state: largest population on the lowest H₀ level.
pub fn passive_energy(populations: &[f64]) -> f64 {
    let n = populations.len() - 1;
    let mut sorted = populations.to_vec();
    // stable, descending
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.iter().enumerate().map(|(i, p)| m_value(n, i) * p).sum()
}

pub fn ergotropy_exact(n_atoms: usize, x: f64, theta: f64) -> Result<ErgotropyReport> {
    let populations = steady_populations(n_atoms, x)?;
    let energy_ss = theta.cos() * mean_m(&populations);
    let passive = passive_energy(&populations);
    let ergotropy = energy_ss - passive;
    let per_atom = ergotropy / n_atoms as f64;
    let (closed, closed_form_used) = match closed_form_per_atom(n_atoms, x, theta) {
        Some(v) => (v, true),
        None => (per_atom, false),
    };
    Ok(ErgotropyReport {
        n_atoms,
        x,
        theta,
        r: x * (theta / 2.0).tan().powi(4),
        populations,
        energy_ss,
        passive_energy: passive,
        ergotropy,
        ergotropy_per_atom: per_atom,
        ergotropy_per_atom_closed: closed,
        closed_form_used,
    })
}

/// Closed-form R/N, or `None` within BRANCH_EPS of x = 1 where (x−1) factors cancel.
pub fn closed_form_per_atom(n_atoms: usize, x: f64, theta: f64) -> Option<f64> {
    if (x - 1.0).abs() <= BRANCH_EPS || !(x > 0.0 && x.is_finite()) {
        return None;
    }
    let n = n_atoms as f64;
    let ni = n_atoms as i32;
    let ratio = if x < 1.0 {
        let num = n * (x - 1.0) * (1.0 + x.powi(ni + 1)) + 2.0 * x * (1.0 - x.powi(ni));
        let den = (x - 1.0) * (1.0 - x.powi(ni + 1));
        num / den
    } else {
        // numerator and denominator divided by x^{N+1}
        let y = 1.0 / x;
        let num = n * (x - 1.0) * (y.powi(ni + 1) + 1.0) + 2.0 * (y.powi(ni) - 1.0);
        let den = (x - 1.0) * (y.powi(ni + 1) - 1.0);
        num / den
    };
    let sign = if x < 1.0 { 1.0 } else { -1.0 };
    Some((theta.cos() + sign) * ratio / (2.0 * n))
}

/// Large-N ergotropy per atom in units of ω₀: cos²(θ/2) for x < 1, sin²(θ/2) for x > 1.
pub fn ergotropy_asymptotic(x: f64, theta: f64, r: f64) -> Result<f64> {
    check_x(x)?;
    if x == 1.0 {
        return Err(Error::BranchPoint { x });
    }
    let implied = r * ((theta / 2.0).cos() / (theta / 2.0).sin()).powi(4);
    if (implied - x).abs() > 1e-9 * x.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "x = {x} inconsistent with r·cot⁴(θ/2) = {implied}"
        )));
    }
    let (trig, ratio) = if x < 1.0 {
        ((theta / 2.0).cos().powi(2), 1.0 / (1.0 + (r / x).sqrt()))
    } else {
        ((theta / 2.0).sin().powi(2), 1.0 / (1.0 + (x / r).sqrt()))
    };
    debug_assert!((trig - ratio).abs() < 1e-9, "branch forms disagree: {trig} vs {ratio}");
    Ok(trig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn x_of(theta: f64, r: f64) -> f64 {
        r / (theta / 2.0).tan().powi(4)
    }

    #[test]
    fn uniform_at_x_one() {
        for n in [1, 4, 17] {
            let p = steady_populations(n, 1.0).unwrap();
            assert!(p.iter().all(|v| (v - 1.0 / (n as f64 + 1.0)).abs() < 1e-15));
            assert_abs_diff_eq!(steady_energy(n, 1.0, 0.9).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn single_atom_populations() {
        let p = steady_populations(1, 2.0).unwrap();
        assert_abs_diff_eq!(p[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn extreme_x_is_representable() {
        let p = steady_populations(200, 1e300).unwrap();
        assert_abs_diff_eq!(p[0], 1.0);
        let p = steady_populations(200, 1e-300).unwrap();
        assert_abs_diff_eq!(p[200], 1.0);
        assert!(matches!(steady_populations(4, f64::INFINITY), Err(Error::Range(_))));
        assert!(steady_populations(4, 0.0).is_err());
        assert!(steady_populations(0, 2.0).is_err());
    }

    #[test]
    fn strong_x_energy_is_bare_ground() {
        let e = steady_energy(6, 1e6, 1e-3).unwrap();
        assert_abs_diff_eq!(e, -3.0, epsilon = 1e-4);
    }

    #[test]
    fn ergotropy_vanishes_at_x_one() {
        let r: f64 = 0.1;
        let theta = 2.0 * (r.powf(0.25)).atan();
        let x = x_of(theta, r);
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-12);
        for n in [2, 4, 30] {
            let rep = ergotropy_exact(n, 1.0, theta).unwrap();
            assert!(rep.ergotropy.abs() < 1e-12);
            assert!(!rep.closed_form_used);
        }
    }

    #[test]
    fn closed_form_matches_brute_force_n4() {
        let (theta, r) = (2.0, 0.1);
        let rep = ergotropy_exact(4, x_of(theta, r), theta).unwrap();
        assert!(rep.closed_form_used);
        assert_abs_diff_eq!(rep.ergotropy_per_atom, rep.ergotropy_per_atom_closed, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.r, r, epsilon = 1e-12);
    }

    #[test]
    fn single_atom_hand_value() {
        // N=1, x=2: R = (1 − cosθ)/6
        let theta = 1.1;
        let rep = ergotropy_exact(1, 2.0, theta).unwrap();
        assert_abs_diff_eq!(rep.ergotropy, (1.0 - theta.cos()) / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.ergotropy_per_atom_closed, (1.0 - theta.cos()) / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn superextensive_at_small_n() {
        // N=4 per-atom ergotropy above N=2 for r = 0.1 away from x = 1.
        let r: f64 = 0.1;
        let theta_c = 2.0 * r.powf(0.25).atan();
        for k in 1..40 {
            let theta = k as f64 * PI / 40.0;
            if (theta - theta_c).abs() < 0.05 {
                continue;
            }
            let x = x_of(theta, r);
            let a = ergotropy_exact(2, x, theta).unwrap().ergotropy_per_atom;
            let b = ergotropy_exact(4, x, theta).unwrap().ergotropy_per_atom;
            assert!(b > a, "θ={theta}: N=4 {b} vs N=2 {a}");
        }
    }

    #[test]
    fn asymptotic_limits() {
        let eps = 1e-4;
        let theta = FRAC_PI_2 - eps;
        let v = ergotropy_asymptotic(x_of(theta, 1.0), theta, 1.0).unwrap();
        assert!((v - 0.5).abs() < eps);

        // r ≪ x < 1: R/N → 1
        let (r, x): (f64, f64) = (1e-4, 0.9);
        let theta = 2.0 * (r / x).powf(0.25).atan();
        let v = ergotropy_asymptotic(x, theta, r).unwrap();
        assert!((v - 1.0).abs() < 0.02, "{v}");

        assert!(matches!(ergotropy_asymptotic(1.0, FRAC_PI_2, 1.0), Err(Error::BranchPoint { .. })));
        assert!(ergotropy_asymptotic(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn finite_n_converges_to_asymptote() {
        for &(theta, r) in &[(1.87, 10.0), (2.4, 0.1), (0.9, 1.0)] {
            let x = x_of(theta, r);
            let limit = ergotropy_asymptotic(x, theta, r).unwrap();
            let gaps: Vec<f64> = [10, 50, 200]
                .iter()
                .map(|&n| (ergotropy_exact(n, x, theta).unwrap().ergotropy_per_atom - limit).abs())
                .collect();
            assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
        }
    }

    #[test]
    fn extensive_regime_all_energy_extractable() {
        let (theta, r) = (1.87, 10.0);
        let rep = ergotropy_exact(200, x_of(theta, r), theta).unwrap();
        assert!((rep.ergotropy / rep.battery_charge() - 1.0).abs() < 0.01);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn report_invariants(n in 1usize..=40, theta in 0.05..3.09f64, r in 0.01..50.0f64) {
                let x = x_of(theta, r);
                let rep = ergotropy_exact(n, x, theta).unwrap();
                let total: f64 = rep.populations.iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
                prop_assert!(rep.populations.iter().all(|p| (0.0..=1.0).contains(p)));
                prop_assert!(rep.ergotropy >= -1e-13);
                prop_assert!((rep.ergotropy - (rep.energy_ss - rep.passive_energy)).abs() < 1e-10);
            }

            #[test]
            fn detailed_balance(n in 1usize..=30, theta in 0.2..2.9f64, r in 0.1..10.0f64) {
                let x = x_of(theta, r);
                let p = steady_populations(n, x).unwrap();
                let up = (theta / 2.0).sin().powi(4);
                let down = r * (theta / 2.0).cos().powi(4);
                for i in 0..n {
                    let lhs = up * p[i];
                    let rhs = down * p[i + 1];
                    prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(rhs).max(1e-300));
                }
            }

            #[test]
            fn ladder_reflection(n in 1usize..=30, theta in 0.1..3.0f64, r in 0.1..10.0f64) {
                let x = x_of(theta, r);
                let a = ergotropy_exact(n, x, theta).unwrap();
                let b = ergotropy_exact(n, 1.0 / x, PI - theta).unwrap();
                prop_assert!((a.ergotropy - b.ergotropy).abs() < 1e-10 * (n as f64));
            }
        }
    }
}
