//! Browser bindings: ergotropy against θ, a charging curve, and the power/charge
//! trade-off. Every export returns a flat `Float64Array` of row-major samples.

use wasm_bindgen::prelude::*;

use dicke_battery::asymptotics::{energy_analytic, energy_lower_bound, power_bound_curve, Branch};
use dicke_battery::charging::charging_trajectory;
use dicke_battery::steady::{ergotropy_asymptotic, ergotropy_exact};
use dicke_battery::{IntegratorConfig, ModelParams, Result, SecularFrame};

/// Largest N the page will integrate numerically.
pub const MAX_NUMERIC_ATOMS: usize = 40;

fn thetas(points: usize) -> Vec<f64> {
    let lo = 0.01;
    let hi = std::f64::consts::PI - 0.01;
    let step = (hi - lo) / (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|k| lo + k as f64 * step).collect()
}

/// Rows (θ, exact R/N, large-N R/N or NaN at x = 1).
pub fn ergotropy_rows(n_atoms: usize, r: f64, points: usize) -> Result<Vec<[f64; 3]>> {
    thetas(points)
        .into_iter()
        .map(|theta| {
            let x = r / (theta / 2.0).tan().powi(4);
            let exact = ergotropy_exact(n_atoms, x, theta)?.ergotropy_per_atom;
            let limit = ergotropy_asymptotic(x, theta, r).unwrap_or(f64::NAN);
            Ok([theta, exact, limit])
        })
        .collect()
}

/// Rows (Nγ₋t, numeric E/N, analytic E/N, lower bound) from the uncharged battery with Ω_R = rabi_per_atom·N.
pub fn charging_rows(
    n_atoms: usize,
    theta: f64,
    r: f64,
    rabi_per_atom: f64,
    scaled_t_end: f64,
    samples: usize,
) -> Result<Vec<[f64; 4]>> {
    if n_atoms > MAX_NUMERIC_ATOMS {
        return Err(dicke_battery::Error::InvalidParameter(format!(
            "numeric curve limited to N ≤ {MAX_NUMERIC_ATOMS}"
        )));
    }
    let omega_p = rabi_per_atom * n_atoms as f64 / theta.sin();
    let model = ModelParams::from_angle(n_atoms, theta, omega_p, 1.0, r, 1.0);
    model.validate()?;
    let d = model.derive()?;
    let n = n_atoms as f64;
    let t_end = scaled_t_end / n;
    let traj = charging_trajectory(
        &model,
        t_end,
        t_end / samples.max(1) as f64,
        &IntegratorConfig::default(),
        SecularFrame::CoRotating,
    )?;
    Ok(traj
        .times
        .iter()
        .zip(&traj.records)
        .map(|(&t, rec)| {
            [n * t, rec.energy / n, energy_analytic(t, n_atoms, &d), energy_lower_bound(n * d.gamma_eff * t / 2.0, d.theta)]
        })
        .collect())
}

/// Rows (charge fraction, power bound / N², admissible as 0 or 1) on the branch that charges for this r.
pub fn power_rows(r: f64, points: usize) -> Result<Vec<[f64; 3]>> {
    let branch = if r >= 1.0 { Branch::Charging } else { Branch::Inverted };
    Ok(power_bound_curve(r, &thetas(points), branch)?
        .into_iter()
        .map(|p| [p.charge_fraction, p.bound, if p.admissible { 1.0 } else { 0.0 }])
        .collect())
}

fn flatten<const K: usize>(rows: Vec<[f64; K]>) -> Vec<f64> {
    rows.into_iter().flatten().collect()
}

fn to_js(e: dicke_battery::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = ergotropyCurve)]
pub fn ergotropy_curve(n_atoms: usize, r: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    ergotropy_rows(n_atoms, r, points).map(flatten).map_err(to_js)
}

#[wasm_bindgen(js_name = chargingCurve)]
pub fn charging_curve(
    n_atoms: usize,
    theta: f64,
    r: f64,
    rabi_per_atom: f64,
    scaled_t_end: f64,
    samples: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    charging_rows(n_atoms, theta, r, rabi_per_atom, scaled_t_end, samples).map(flatten).map_err(to_js)
}

#[wasm_bindgen(js_name = powerBoundCurve)]
pub fn power_bound(r: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    power_rows(r, points).map(flatten).map_err(to_js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ergotropy_rows_shape() {
        let rows = ergotropy_rows(4, 0.1, 50).unwrap();
        assert_eq!(rows.len(), 50);
        assert!(rows.iter().all(|r| r[1] >= 0.0 && r[1] <= 1.0));
    }

    #[test]
    fn charging_rows_settle_near_plateau() {
        let rows = charging_rows(16, 1.87, 10.0, 2.0, 20.0, 100).unwrap();
        assert_eq!(rows.len(), 101);
        assert!(rows[0][1].abs() < 1e-12);
        let last = rows.last().unwrap();
        assert!((last[2] - (1.87f64 / 2.0).sin().powi(2)).abs() < 1e-3);
        assert!((last[1] - last[2]).abs() < 0.02);
        assert!(charging_rows(64, 1.87, 10.0, 2.0, 20.0, 10).is_err());
    }

    #[test]
    fn power_rows_branches() {
        let charging = power_rows(10.0, 30).unwrap();
        assert!(charging.iter().any(|r| r[2] == 1.0) && charging.iter().any(|r| r[2] == 0.0));
        let inverted = power_rows(0.2, 30).unwrap();
        assert!(inverted.iter().filter(|r| r[2] == 1.0).all(|r| r[1] >= 0.0));
    }
}
