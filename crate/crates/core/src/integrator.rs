//! Adaptive Dormand–Prince 5(4) and fixed-step RK4 integration of density matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lindblad::{diagnostics, hermitian_part, trace_distance, trace_of_product, Basis, DensityMatrix, Generator};
use crate::spin::{re, CMatrix, RotationMatrix, SpinOperators};

/// Smallest step accepted before the integrator gives up, in units of 1/γ₋.
pub const MIN_STEP: f64 = 1e-14;
/// A sampled state with an eigenvalue below this aborts the integration.
pub const POSITIVITY_ABORT: f64 = -1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Rk45Adaptive,
    Rk4Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the adaptive step, and the step itself for RK4.
    pub max_step: f64,
    pub scheme: Scheme,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-10, max_step: 0.05, scheme: Scheme::Rk45Adaptive }
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        Self { max_step: step, scheme: Scheme::Rk4Fixed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "integrator tolerances and max_step must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Operators whose expectation values are recorded along a trajectory, expressed
/// in the basis the trajectory is stored in.
#[derive(Debug, Clone)]
pub struct Observables {
    basis: Basis,
    n_atoms: usize,
    h0: CMatrix,
    h0_sq: CMatrix,
    jp: CMatrix,
}

impl Observables {
    pub fn bare(ops: &SpinOperators) -> Self {
        Self {
            basis: Basis::Bare,
            n_atoms: ops.n_atoms(),
            h0: ops.jz.clone(),
            h0_sq: &ops.jz * &ops.jz,
            jp: ops.jp.clone(),
        }
    }

    /// Bare-frame observables rewritten for dressed-basis states: A ↦ u†Au.
    pub fn dressed(ops: &SpinOperators, rotation: &RotationMatrix) -> Result<Self> {
        let h0 = rotation.unrotate(&ops.jz)?;
        Ok(Self {
            basis: Basis::Dressed,
            n_atoms: ops.n_atoms(),
            h0_sq: &h0 * &h0,
            h0,
            jp: rotation.unrotate(&ops.jp)?,
        })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn record(&self, rho: &CMatrix) -> ObservableRecord {
        let energy = trace_of_product(rho, &self.h0).re;
        let second = trace_of_product(rho, &self.h0_sq).re;
        let diag = diagnostics(rho);
        ObservableRecord {
            energy: energy + self.n_atoms as f64 / 2.0,
            coherence_jp: trace_of_product(rho, &self.jp),
            energy_variance: second - energy * energy,
            trace_error: diag.trace_error,
            hermiticity_error: diag.hermiticity_error,
            min_eigval: diag.min_eigval,
        }
    }
}

/// Per-sample observables. Energies are in units of ω₀; `energy` is the battery
/// charge ⟨H₀⟩ + Nω₀/2, zero in the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableRecord {
    pub energy: f64,
    pub coherence_jp: Complex64,
    pub energy_variance: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigval: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub every: f64,
    pub keep_states: bool,
}

impl Sampling {
    pub fn every(every: f64) -> Self {
        Self { every, keep_states: false }
    }

    pub fn with_states(mut self) -> Self {
        self.keep_states = true;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub n_atoms: usize,
    pub basis: Basis,
    pub times: Vec<f64>,
    /// Empty unless requested through [`Sampling::keep_states`].
    pub states: Vec<DensityMatrix>,
    pub records: Vec<ObservableRecord>,
    pub final_state: DensityMatrix,
    pub stats: StepStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantMaxima {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigval: f64,
}

impl InvariantMaxima {
    pub fn merge(self, other: InvariantMaxima) -> InvariantMaxima {
        InvariantMaxima {
            trace_error: self.trace_error.max(other.trace_error),
            hermiticity_error: self.hermiticity_error.max(other.hermiticity_error),
            min_eigval: self.min_eigval.min(other.min_eigval),
        }
    }
}

impl Default for InvariantMaxima {
    fn default() -> Self {
        Self { trace_error: 0.0, hermiticity_error: 0.0, min_eigval: f64::INFINITY }
    }
}

impl Trajectory {
    pub fn invariant_maxima(&self) -> InvariantMaxima {
        self.records.iter().fold(InvariantMaxima::default(), |acc, r| {
            acc.merge(InvariantMaxima {
                trace_error: r.trace_error,
                hermiticity_error: r.hermiticity_error,
                min_eigval: r.min_eigval,
            })
        })
    }

    pub fn energies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.energy).collect()
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<'a, G: Generator> {
    generator: &'a G,
    cfg: IntegratorConfig,
    h: f64,
    stats: StepStats,
}

impl<'a, G: Generator> Stepper<'a, G> {
    fn new(generator: &'a G, cfg: IntegratorConfig, y0: &CMatrix) -> Self {
        let h = match cfg.scheme {
            Scheme::Rk4Fixed => cfg.max_step,
            Scheme::Rk45Adaptive => initial_step(generator, y0, &cfg),
        };
        Self { generator, cfg, h, stats: StepStats::default() }
    }

    /// Advance `y` from `t` to exactly `t_target`.
    fn advance(&mut self, t: &mut f64, y: &mut CMatrix, t_target: f64) -> Result<()> {
        while *t < t_target {
            let remaining = t_target - *t;
            let landing = self.h >= remaining;
            let h = if landing { remaining } else { self.h };
            match self.cfg.scheme {
                Scheme::Rk4Fixed => {
                    *y = self.rk4_step(y, h);
                    if !all_finite(y) {
                        // a fixed step this large overflowed
                        return Err(Error::StepUnderflow { t: *t, step: h });
                    }
                    self.stats.accepted += 1;
                }
                Scheme::Rk45Adaptive => {
                    let (candidate, err) = self.dopri_step(y, h);
                    let err = if err.is_finite() { err } else { f64::INFINITY };
                    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    if err <= 1.0 {
                        *y = candidate;
                        self.stats.accepted += 1;
                        // A shortened landing step says little about the natural step size.
                        if !landing || factor < 1.0 {
                            self.h = (h * factor).min(self.cfg.max_step);
                        }
                    } else {
                        self.stats.rejected += 1;
                        self.h = h * factor.min(1.0);
                        if self.h < MIN_STEP {
                            return Err(Error::StepUnderflow { t: *t, step: self.h });
                        }
                        continue;
                    }
                }
            }
            *y = hermitian_part(y);
            *t = if landing { t_target } else { *t + h };
        }
        Ok(())
    }

    fn rk4_step(&self, y: &CMatrix, h: f64) -> CMatrix {
        let g = self.generator;
        let k1 = g.apply(y);
        let k2 = g.apply(&(y + &k1 * re(h / 2.0)));
        let k3 = g.apply(&(y + &k2 * re(h / 2.0)));
        let k4 = g.apply(&(y + &k3 * re(h)));
        y + (k1 + k2 * re(2.0) + k3 * re(2.0) + k4) * re(h / 6.0)
    }

    fn dopri_step(&self, y: &CMatrix, h: f64) -> (CMatrix, f64) {
        let g = self.generator;
        let mut k: Vec<CMatrix> = Vec::with_capacity(7);
        k.push(g.apply(y));
        for (stage, row) in A.iter().enumerate().skip(1) {
            let mut arg = y.clone();
            for (kj, &a) in k.iter().zip(row.iter()) {
                if a != 0.0 {
                    arg += kj * re(a * h);
                }
            }
            if stage == 6 {
                // The last row holds the fifth-order weights; its argument is the new state.
                k.push(g.apply(&arg));
                let mut err = CMatrix::zeros(y.nrows(), y.ncols());
                for (kj, &e) in k.iter().zip(B_ERR.iter()) {
                    if e != 0.0 {
                        err += kj * re(e * h);
                    }
                }
                let norm = if all_finite(&arg) { error_norm(&err, y, &arg, &self.cfg) } else { f64::INFINITY };
                return (arg, norm);
            }
            k.push(g.apply(&arg));
        }
        unreachable!("tableau has seven stages")
    }
}

fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn error_norm(err: &CMatrix, y0: &CMatrix, y1: &CMatrix, cfg: &IntegratorConfig) -> f64 {
    err.iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| e.norm() / (cfg.abs_tol + cfg.rel_tol * a.norm().max(b.norm())))
        .fold(0.0, f64::max)
}

fn initial_step<G: Generator>(g: &G, y0: &CMatrix, cfg: &IntegratorConfig) -> f64 {
    let f0 = g.apply(y0);
    let scale = |m: &CMatrix| {
        m.iter()
            .zip(y0.iter())
            .map(|(v, y)| v.norm() / (cfg.abs_tol + cfg.rel_tol * y.norm()))
            .fold(0.0, f64::max)
    };
    let d0 = scale(y0);
    let d1 = scale(&f0);
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(cfg.max_step).max(MIN_STEP * 10.0)
}

fn check_start<G: Generator>(rho0: &DensityMatrix, generator: &G, t_end: f64, cfg: &IntegratorConfig) -> Result<()> {
    cfg.validate()?;
    rho0.require_basis(generator.basis())?;
    if rho0.dim() != generator.dim() {
        return Err(Error::DimensionMismatch { expected: generator.dim(), found: rho0.dim() });
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end must be positive, got {t_end}")));
    }
    Ok(())
}

/// Integrate `rho0` under `generator` up to `t_end`, recording observables at
/// multiples of `sampling.every` (plus t = 0 and t_end).
pub fn integrate<G: Generator>(
    rho0: &DensityMatrix,
    generator: &G,
    t_end: f64,
    cfg: &IntegratorConfig,
    sampling: Sampling,
    observables: &Observables,
) -> Result<Trajectory> {
    check_start(rho0, generator, t_end, cfg)?;
    if observables.basis() != generator.basis() {
        return Err(Error::WrongBasis { expected: generator.basis(), found: observables.basis() });
    }
    if !(sampling.every > 0.0) {
        return Err(Error::InvalidParameter("sample interval must be positive".into()));
    }
    let n_samples = (t_end / sampling.every).round().max(1.0) as usize;
    let mut times = Vec::with_capacity(n_samples + 1);
    let mut records = Vec::with_capacity(n_samples + 1);
    let mut states = Vec::new();

    let mut y = rho0.matrix().clone();
    let mut t = 0.0;
    let mut stepper = Stepper::new(generator, *cfg, &y);
    let mut store = |t: f64, y: &CMatrix, times: &mut Vec<f64>, records: &mut Vec<ObservableRecord>| -> Result<()> {
        let lab = generator.to_lab(t, y.clone());
        let rec = observables.record(&lab);
        if rec.min_eigval < POSITIVITY_ABORT {
            return Err(Error::PositivityViolation { t, min_eigval: rec.min_eigval });
        }
        times.push(t);
        records.push(rec);
        if sampling.keep_states {
            states.push(DensityMatrix::new(generator.basis(), lab)?);
        }
        Ok(())
    };
    store(0.0, &y, &mut times, &mut records)?;
    for k in 1..=n_samples {
        let target = if k == n_samples { t_end } else { k as f64 * sampling.every };
        stepper.advance(&mut t, &mut y, target)?;
        store(t, &y, &mut times, &mut records)?;
    }
    let final_state = DensityMatrix::new(generator.basis(), generator.to_lab(t, y))?;
    Ok(Trajectory {
        n_atoms: observables.n_atoms,
        basis: generator.basis(),
        times,
        states,
        records,
        final_state,
        stats: stepper.stats,
    })
}

/// Final state after evolving for `t_end`, without sampling.
pub fn evolve<G: Generator>(
    rho0: &DensityMatrix,
    generator: &G,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix> {
    check_start(rho0, generator, t_end, cfg)?;
    let mut y = rho0.matrix().clone();
    let mut t = 0.0;
    let mut stepper = Stepper::new(generator, *cfg, &y);
    stepper.advance(&mut t, &mut y, t_end)?;
    let lab = generator.to_lab(t, y);
    let min_eigval = crate::lindblad::min_eigenvalue(&lab);
    if min_eigval < POSITIVITY_ABORT {
        return Err(Error::PositivityViolation { t, min_eigval });
    }
    DensityMatrix::new(generator.basis(), lab)
}

#[derive(Debug, Clone)]
pub struct SteadyRun {
    pub state: DensityMatrix,
    pub time: f64,
    /// Estimated trace distance to the fixed point at termination.
    pub residual_estimate: f64,
    pub diagnostics: crate::lindblad::Diagnostics,
}

/// Integrate in chunks of `chunk` until the geometric extrapolation of successive
/// chunk-to-chunk trace distances falls below `tol`, or `max_time` is reached.
pub fn integrate_to_steady<G: Generator>(
    rho0: &DensityMatrix,
    generator: &G,
    cfg: &IntegratorConfig,
    chunk: f64,
    tol: f64,
    max_time: f64,
) -> Result<SteadyRun> {
    check_start(rho0, generator, chunk, cfg)?;
    let mut y = rho0.matrix().clone();
    let mut t = 0.0;
    let mut stepper = Stepper::new(generator, *cfg, &y);
    let mut previous: Option<f64> = None;
    let mut estimate = f64::INFINITY;
    let mut worst = crate::lindblad::Diagnostics { trace_error: 0.0, hermiticity_error: 0.0, min_eigval: f64::INFINITY };
    while t < max_time {
        let before = generator.to_lab(t, y.clone());
        let target = t + chunk;
        stepper.advance(&mut t, &mut y, target)?;
        let after = generator.to_lab(t, y.clone());
        let d = diagnostics(&after);
        if d.min_eigval < POSITIVITY_ABORT {
            return Err(Error::PositivityViolation { t, min_eigval: d.min_eigval });
        }
        worst.trace_error = worst.trace_error.max(d.trace_error);
        worst.hermiticity_error = worst.hermiticity_error.max(d.hermiticity_error);
        worst.min_eigval = worst.min_eigval.min(d.min_eigval);
        let step = trace_distance(&before, &after);
        if let Some(prev) = previous {
            let q = if prev > 0.0 { step / prev } else { 0.0 };
            if q < 1.0 {
                estimate = step * q / (1.0 - q);
                if estimate < tol && step < tol.sqrt() {
                    break;
                }
            }
        }
        previous = Some(step);
    }
    Ok(SteadyRun {
        state: DensityMatrix::new(generator.basis(), generator.to_lab(t, y))?,
        time: t,
        residual_estimate: estimate,
        diagnostics: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{FnGenerator, FullGenerator, SecularFrame, SecularGenerator};
    use crate::model::{build_hamiltonians, ModelParams};
    use crate::steady::steady_populations;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_generator_keeps_state() {
        let ops = SpinOperators::new(3).unwrap();
        let zero = FnGenerator::new(Basis::Bare, 4, |r: &CMatrix| CMatrix::zeros(r.nrows(), r.ncols()));
        let rho0 = DensityMatrix::pure(Basis::Bare, 4, 2);
        let traj = integrate(&rho0, &zero, 3.0, &IntegratorConfig::default(), Sampling::every(0.5), &Observables::bare(&ops)).unwrap();
        assert_eq!(traj.times.len(), 7);
        assert!(traj.records.iter().all(|r| (r.energy - 2.0).abs() < 1e-15));
        assert_eq!(*traj.times.last().unwrap(), 3.0);
    }

    #[test]
    fn single_atom_decay_is_exponential() {
        let ops = SpinOperators::new(1).unwrap();
        let g = FullGenerator::new(CMatrix::zeros(2, 2), 1.0, &ops).unwrap();
        let rho0 = DensityMatrix::pure(Basis::Bare, 2, 1);
        let cfg = IntegratorConfig::default();
        let traj = integrate(&rho0, &g, 5.0, &cfg, Sampling::every(0.25), &Observables::bare(&ops)).unwrap();
        for (t, r) in traj.times.iter().zip(&traj.records) {
            let expected = (-t).exp();
            assert!((r.energy - expected).abs() <= 10.0 * cfg.rel_tol * expected.max(1e-2), "t={t}");
        }
    }

    #[test]
    fn rk4_agrees_with_adaptive() {
        let ops = SpinOperators::new(3).unwrap();
        let p = ModelParams::from_angle(3, 1.1, 4.0, 1.0, 1.0, 1.0);
        let h = build_hamiltonians(&p, &ops).h1;
        let g = FullGenerator::new(h, 0.7, &ops).unwrap();
        let rho0 = DensityMatrix::bare_ground(&ops);
        let tight = IntegratorConfig { rel_tol: 1e-11, abs_tol: 1e-13, ..IntegratorConfig::default() };
        let a = evolve(&rho0, &g, 2.0, &tight).unwrap();
        let b = evolve(&rho0, &g, 2.0, &IntegratorConfig::rk4(1e-3)).unwrap();
        assert!(a.trace_distance(&b).unwrap() < 1e-9);
    }

    #[test]
    fn unitary_evolution_conserves_drive_energy() {
        let ops = SpinOperators::new(4).unwrap();
        let p = ModelParams::from_angle(4, 1.3, 3.0, 1.0, 1.0, 1.0);
        let h = build_hamiltonians(&p, &ops).h1;
        let g = FullGenerator::new(h.clone(), 0.0, &ops).unwrap();
        let mut rho0 = CMatrix::zeros(5, 5);
        rho0[(0, 0)] = Complex64::new(0.5, 0.0);
        rho0[(3, 3)] = Complex64::new(0.5, 0.0);
        rho0[(0, 3)] = Complex64::new(0.5, 0.0);
        rho0[(3, 0)] = Complex64::new(0.5, 0.0);
        let rho0 = DensityMatrix::new(Basis::Bare, rho0).unwrap();
        let e0 = trace_of_product(rho0.matrix(), &h).re;
        let traj = integrate(&rho0, &g, 4.0, &IntegratorConfig::default(), Sampling::every(0.1).with_states(), &Observables::bare(&ops)).unwrap();
        for s in &traj.states {
            assert_abs_diff_eq!(trace_of_product(s.matrix(), &h).re, e0, epsilon = 1e-8);
        }
    }

    #[test]
    fn secular_run_reaches_detailed_balance() {
        let n = 6;
        let ops = SpinOperators::new(n).unwrap();
        let p = ModelParams::from_angle(n, 1.87, 400.0, 1.0, 10.0, 1.0);
        let d = p.derive().unwrap();
        let r = ops.rotation(d.theta).unwrap();
        let g = SecularGenerator::new(&d, &ops, SecularFrame::CoRotating);
        let rho0 = crate::lindblad::dressed_ground_state(&ops, &r).unwrap();
        let run = integrate_to_steady(&rho0, &g, &IntegratorConfig::default(), 1.0, 1e-10, 500.0).unwrap();
        let oracle = DensityMatrix::diagonal(Basis::Dressed, &steady_populations(n, d.x).unwrap());
        assert!(run.state.trace_distance(&oracle).unwrap() < 1e-6);
    }

    #[test]
    fn corotating_and_dressed_frames_agree() {
        let n = 3;
        let ops = SpinOperators::new(n).unwrap();
        let d = ModelParams::from_angle(n, 1.6, 12.0, 1.0, 3.0, 1.0).derive().unwrap();
        let r = ops.rotation(d.theta).unwrap();
        let rho0 = crate::lindblad::dressed_ground_state(&ops, &r).unwrap();
        let cfg = IntegratorConfig { rel_tol: 1e-10, abs_tol: 1e-12, ..IntegratorConfig::default() };
        let a = evolve(&rho0, &SecularGenerator::new(&d, &ops, SecularFrame::Dressed), 1.7, &cfg).unwrap();
        let b = evolve(&rho0, &SecularGenerator::new(&d, &ops, SecularFrame::CoRotating), 1.7, &cfg).unwrap();
        assert!(a.trace_distance(&b).unwrap() < 1e-8);
    }

    #[test]
    fn rejects_bad_inputs() {
        let ops = SpinOperators::new(2).unwrap();
        let g = FullGenerator::new(ops.jz.clone(), 1.0, &ops).unwrap();
        let obs = Observables::bare(&ops);
        let cfg = IntegratorConfig::default();
        let dressed = DensityMatrix::pure(Basis::Dressed, 3, 0);
        assert!(matches!(integrate(&dressed, &g, 1.0, &cfg, Sampling::every(0.1), &obs), Err(Error::WrongBasis { .. })));
        let bare = DensityMatrix::bare_ground(&ops);
        assert!(integrate(&bare, &g, 0.0, &cfg, Sampling::every(0.1), &obs).is_err());
        let bad = IntegratorConfig { rel_tol: 0.0, ..cfg };
        assert!(evolve(&bare, &g, 1.0, &bad).is_err());
    }

    #[test]
    fn diverging_generator_trips_guards() {
        // dρ/dt = ρ − (ρ diag flipped): drives populations negative.
        let g = FnGenerator::new(Basis::Bare, 2, |r: &CMatrix| {
            let mut out = CMatrix::zeros(2, 2);
            out[(0, 0)] = -r[(0, 0)] * 50.0;
            out[(1, 1)] = r[(0, 0)] * 50.0;
            out[(0, 0)] -= Complex64::new(10.0, 0.0);
            out[(1, 1)] += Complex64::new(10.0, 0.0);
            out
        });
        let ops = SpinOperators::new(1).unwrap();
        let rho0 = DensityMatrix::pure(Basis::Bare, 2, 0);
        let err = integrate(&rho0, &g, 2.0, &IntegratorConfig::default(), Sampling::every(0.1), &Observables::bare(&ops)).unwrap_err();
        assert!(matches!(err, Error::PositivityViolation { .. }));

        let stiff = FnGenerator::new(Basis::Bare, 1, |r: &CMatrix| r.map(|z| z * z * z * 1e6));
        let rho0 = DensityMatrix::pure(Basis::Bare, 1, 0);
        let err = evolve(&rho0, &stiff, 1.0, &IntegratorConfig::default()).unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. }), "{err:?}");
    }
}
