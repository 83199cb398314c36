//! Full and secular Lindblad generators for collective decay.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DerivedParams;
use crate::spin::{commutator, re, CMatrix, RotationMatrix, SpinOperators};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const MIN_EIGVAL_TOL: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// J_z eigenbasis |m⟩.
    Bare,
    /// Dressed basis |e_m⟩ = exp(iJ_yθ)|m⟩.
    Dressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigval: f64,
}

#[derive(Debug, Clone)]
pub struct DensityMatrix {
    basis: Basis,
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn new(basis: Basis, rho: CMatrix) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::DimensionMismatch { expected: rho.nrows(), found: rho.ncols() });
        }
        Ok(Self { basis, rho })
    }

    /// |i⟩⟨i| in the given basis.
    pub fn pure(basis: Basis, dim: usize, index: usize) -> Self {
        let mut rho = CMatrix::zeros(dim, dim);
        rho[(index, index)] = Complex64::new(1.0, 0.0);
        Self { basis, rho }
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(basis: Basis, populations: &[f64]) -> Self {
        let n = populations.len();
        let rho = CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(populations[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { basis, rho }
    }

    /// The uncharged battery |−N/2⟩ in the bare basis.
    pub fn bare_ground(ops: &SpinOperators) -> Self {
        Self::pure(Basis::Bare, ops.dim(), 0)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> CMatrix {
        self.rho
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    pub fn require_basis(&self, expected: Basis) -> Result<()> {
        if self.basis != expected {
            return Err(Error::WrongBasis { expected, found: self.basis });
        }
        Ok(())
    }

    /// Express the state in the other basis using `rotation`.
    pub fn change_basis(&self, rotation: &RotationMatrix) -> Result<Self> {
        let (rho, basis) = match self.basis {
            Basis::Bare => (rotation.unrotate(&self.rho)?, Basis::Dressed),
            Basis::Dressed => (rotation.rotate(&self.rho)?, Basis::Bare),
        };
        Ok(Self { basis, rho })
    }

    pub fn diagnostics(&self) -> Diagnostics {
        diagnostics(&self.rho)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.diagnostics();
        if d.hermiticity_error > HERMITICITY_TOL || d.trace_error > TRACE_TOL {
            return Err(Error::InvalidParameter(format!(
                "not a density matrix: hermiticity error {:e}, trace error {:e}",
                d.hermiticity_error, d.trace_error
            )));
        }
        if d.min_eigval < MIN_EIGVAL_TOL {
            return Err(Error::InvalidParameter(format!(
                "not positive semidefinite: min eigenvalue {:e}",
                d.min_eigval
            )));
        }
        Ok(())
    }

    /// ½‖ρ − σ‖₁ for states in the same basis.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        other.require_basis(self.basis)?;
        check_dim(self.dim(), &other.rho)?;
        Ok(trace_distance(&self.rho, &other.rho))
    }
}

pub(crate) fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub(crate) fn min_eigenvalue(a: &CMatrix) -> f64 {
    SymmetricEigen::new(hermitian_part(a))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = hermitian_part(&(a - b));
    0.5 * SymmetricEigen::new(diff).eigenvalues.iter().map(|v| v.abs()).sum::<f64>()
}

pub(crate) fn diagnostics(rho: &CMatrix) -> Diagnostics {
    let hermiticity_error = rho
        .iter()
        .zip(rho.adjoint().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Diagnostics {
        trace_error: (rho.trace() - Complex64::new(1.0, 0.0)).norm(),
        hermiticity_error,
        min_eigval: min_eigenvalue(rho),
    }
}

fn check_dim(dim: usize, a: &CMatrix) -> Result<()> {
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: a.nrows().max(a.ncols()) });
    }
    Ok(())
}

/// Tr(ρ·obs).
pub fn expectation(rho: &DensityMatrix, obs: &CMatrix) -> Result<Complex64> {
    check_dim(rho.dim(), obs)?;
    Ok(trace_of_product(&rho.rho, obs))
}

pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// 𝓛[L]ρ = LρL† − ½{L†L, ρ}.
pub fn lindblad_dissipator(jump: &CMatrix, rho: &CMatrix) -> Result<CMatrix> {
    check_dim(rho.nrows(), jump)?;
    check_dim(jump.nrows(), rho)?;
    let jd = jump.adjoint();
    let jdj = &jd * jump;
    Ok(jump * rho * &jd - (&jdj * rho + rho * &jdj).scale(0.5))
}

/// −i[H₁, ρ] + γ𝓛[J₋]ρ in the bare basis.
pub fn rhs_full(rho: &DensityMatrix, h1: &CMatrix, ops: &SpinOperators, gamma: f64) -> Result<CMatrix> {
    rho.require_basis(Basis::Bare)?;
    check_dim(rho.dim(), h1)?;
    Ok(commutator(h1, &rho.rho) * (-I) + lindblad_dissipator(&ops.jm, &rho.rho)? * re(gamma))
}

/// Secular generator in the dressed basis, where J_z′ and J_±′ take the bare-form matrices:
/// −i[Ω_P J_z′, ρ] + γ₀sin²θ 𝓛[J_z′]ρ + γ₋sin⁴(θ/2) 𝓛[J₊′]ρ + γ₊cos⁴(θ/2) 𝓛[J₋′]ρ.
pub fn rhs_secular(rho: &DensityMatrix, derived: &DerivedParams, ops: &SpinOperators) -> Result<CMatrix> {
    rho.require_basis(Basis::Dressed)?;
    check_dim(ops.dim(), &rho.rho)?;
    let h = ops.jz.scale(derived.omega_p);
    Ok(commutator(&h, &rho.rho) * (-I)
        + lindblad_dissipator(&ops.jz, &rho.rho)? * re(derived.dephasing_rate())
        + lindblad_dissipator(&ops.jp, &rho.rho)? * re(derived.raise_rate())
        + lindblad_dissipator(&ops.jm, &rho.rho)? * re(derived.lower_rate()))
}

/// A time-independent linear generator dρ/dt = 𝓖(ρ), possibly integrated in a
/// frame that differs from the one states are reported in.
pub trait Generator: Sync {
    fn basis(&self) -> Basis;
    fn dim(&self) -> usize;
    fn apply(&self, rho: &CMatrix) -> CMatrix;

    /// Map an integration-frame state at time `t` to the reporting frame.
    fn to_lab(&self, _t: f64, rho: CMatrix) -> CMatrix {
        rho
    }
}

/// Adds γ·𝓛[J₋]ρ using the ladder structure of J₋ (O(d²)).
fn add_lowering(out: &mut CMatrix, rho: &CMatrix, ladder: &[f64], rate: f64) {
    if rate == 0.0 {
        return;
    }
    let d = rho.nrows();
    // (J₊J₋)_aa = c_{a−1}²
    let occ = |a: usize| if a == 0 { 0.0 } else { ladder[a - 1] * ladder[a - 1] };
    for b in 0..d {
        for a in 0..d {
            let mut v = -0.5 * (occ(a) + occ(b)) * rho[(a, b)];
            if a + 1 < d && b + 1 < d {
                v += ladder[a] * ladder[b] * rho[(a + 1, b + 1)];
            }
            out[(a, b)] += v * rate;
        }
    }
}

/// Adds γ·𝓛[J₊]ρ.
fn add_raising(out: &mut CMatrix, rho: &CMatrix, ladder: &[f64], rate: f64) {
    if rate == 0.0 {
        return;
    }
    let d = rho.nrows();
    // (J₋J₊)_aa = c_a²
    for b in 0..d {
        for a in 0..d {
            let mut v = -0.5 * (ladder[a] * ladder[a] + ladder[b] * ladder[b]) * rho[(a, b)];
            if a > 0 && b > 0 {
                v += ladder[a - 1] * ladder[b - 1] * rho[(a - 1, b - 1)];
            }
            out[(a, b)] += v * rate;
        }
    }
}

/// Collective decay through γ·𝓛[J₋] under a Hamiltonian, integrated in the bare basis.
#[derive(Debug, Clone)]
pub struct FullGenerator {
    hamiltonian: CMatrix,
    gamma: f64,
    ladder: Vec<f64>,
}

impl FullGenerator {
    pub fn new(hamiltonian: CMatrix, gamma: f64, ops: &SpinOperators) -> Result<Self> {
        check_dim(ops.dim(), &hamiltonian)?;
        Ok(Self { hamiltonian, gamma, ladder: ops.ladder().to_vec() })
    }
}

impl Generator for FullGenerator {
    fn basis(&self) -> Basis {
        Basis::Bare
    }

    fn dim(&self) -> usize {
        self.ladder.len()
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = commutator(&self.hamiltonian, rho) * (-I);
        add_lowering(&mut out, rho, &self.ladder, self.gamma);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SecularFrame {
    /// Integrate with the Ω_P J_z′ term present.
    Dressed,
    /// Integrate the dissipator alone in the frame co-rotating with Ω_P J_z′ and
    /// restore the phases exp(−iΩ_P(m−n)t) when reporting. Exact, because every
    /// secular jump operator is an eigenoperator of the dressed Hamiltonian.
    CoRotating,
}

#[derive(Debug, Clone)]
pub struct SecularGenerator {
    omega_p: f64,
    dephasing: f64,
    raise: f64,
    lower: f64,
    m: Vec<f64>,
    ladder: Vec<f64>,
    frame: SecularFrame,
}

impl SecularGenerator {
    pub fn new(derived: &DerivedParams, ops: &SpinOperators, frame: SecularFrame) -> Self {
        Self {
            omega_p: derived.omega_p,
            dephasing: derived.dephasing_rate(),
            raise: derived.raise_rate(),
            lower: derived.lower_rate(),
            m: (0..ops.dim()).map(|i| ops.m(i)).collect(),
            ladder: ops.ladder().to_vec(),
            frame,
        }
    }

    pub fn frame(&self) -> SecularFrame {
        self.frame
    }
}

impl Generator for SecularGenerator {
    fn basis(&self) -> Basis {
        Basis::Dressed
    }

    fn dim(&self) -> usize {
        self.m.len()
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = rho.nrows();
        let with_h = self.frame == SecularFrame::Dressed;
        let mut out = CMatrix::from_fn(d, d, |a, b| {
            let dm = self.m[a] - self.m[b];
            let mut v = rho[(a, b)] * (-0.5 * self.dephasing * dm * dm);
            if with_h {
                v += rho[(a, b)] * (-I * self.omega_p * dm);
            }
            v
        });
        add_raising(&mut out, rho, &self.ladder, self.raise);
        add_lowering(&mut out, rho, &self.ladder, self.lower);
        out
    }

    fn to_lab(&self, t: f64, mut rho: CMatrix) -> CMatrix {
        if self.frame == SecularFrame::CoRotating {
            let d = rho.nrows();
            for b in 0..d {
                for a in 0..d {
                    let phase = Complex64::from_polar(1.0, -self.omega_p * (self.m[a] - self.m[b]) * t);
                    rho[(a, b)] *= phase;
                }
            }
        }
        rho
    }
}

/// Wraps a closure as a generator.
pub struct FnGenerator<F> {
    basis: Basis,
    dim: usize,
    f: F,
}

impl<F: Fn(&CMatrix) -> CMatrix + Sync> FnGenerator<F> {
    pub fn new(basis: Basis, dim: usize, f: F) -> Self {
        Self { basis, dim, f }
    }
}

impl<F: Fn(&CMatrix) -> CMatrix + Sync> Generator for FnGenerator<F> {
    fn basis(&self) -> Basis {
        self.basis
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        (self.f)(rho)
    }
}

/// Initial charging state: the bare ground state written in the dressed basis.
pub fn dressed_ground_state(ops: &SpinOperators, rotation: &RotationMatrix) -> Result<DensityMatrix> {
    DensityMatrix::bare_ground(ops).change_basis(rotation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::spin::max_abs_diff;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
        // small LCG; keeps the test free of an RNG dependency
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(next(), next()));
        hermitian_part(&a)
    }

    fn random_state(dim: usize, seed: u64) -> CMatrix {
        let a = random_hermitian(dim, seed);
        let p = &a * &a.adjoint() + CMatrix::identity(dim, dim).scale(0.01);
        let tr = p.trace();
        p / tr
    }

    #[test]
    fn diagonal_jump_on_mixed_state_vanishes() {
        let ops = SpinOperators::new(5).unwrap();
        let rho = CMatrix::identity(6, 6).scale(1.0 / 6.0);
        let out = lindblad_dissipator(&ops.jz, &rho).unwrap();
        assert!(out.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn single_atom_decay_rates() {
        let ops = SpinOperators::new(1).unwrap();
        let excited = DensityMatrix::pure(Basis::Bare, 2, 1);
        let out = lindblad_dissipator(&ops.jm, excited.matrix()).unwrap();
        assert_abs_diff_eq!(out[(1, 1)].re, -1.0);
        assert_abs_diff_eq!(out[(0, 0)].re, 1.0);
    }

    #[test]
    fn dissipator_is_traceless() {
        let ops = SpinOperators::new(7).unwrap();
        for seed in 0..5 {
            let rho = random_hermitian(8, seed);
            for jump in [&ops.jm, &ops.jp, &ops.jz, &ops.jx] {
                let out = lindblad_dissipator(jump, &rho).unwrap();
                assert!(out.trace().norm() < 1e-12);
            }
        }
        let bad = CMatrix::identity(3, 3);
        assert!(lindblad_dissipator(&ops.jm, &bad).is_err());
    }

    #[test]
    fn ground_state_is_dark() {
        let ops = SpinOperators::new(4).unwrap();
        let p = ModelParams { rabi: 0.0, delta: 2.0, ..ModelParams::default() };
        let h = crate::model::build_hamiltonians(&p, &ops);
        let rhs = rhs_full(&DensityMatrix::bare_ground(&ops), &h.h1, &ops, 1.3).unwrap();
        assert!(rhs.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn full_rhs_matches_handwritten_n2() {
        // Term-by-term assembly of −i[H,ρ] + γ(J₋ρJ₊ − ½J₊J₋ρ − ½ρJ₊J₋) with
        // hand-entered spin-1 matrices.
        let s2 = 2f64.sqrt();
        let jm = CMatrix::from_row_slice(3, 3, &[c(0.0), c(s2), c(0.0), c(0.0), c(0.0), c(s2), c(0.0), c(0.0), c(0.0)]);
        let jp = jm.transpose();
        let jz = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0), c(0.0), c(1.0)]));
        let (delta, rabi, gamma) = (0.7, 1.9, 0.45);
        let h = jz.scale(delta) - (&jp + &jm).scale(rabi / 2.0);
        let rho = random_state(3, 11);
        let expected = (&h * &rho - &rho * &h) * (-I)
            + (&jm * &rho * &jp - (&jp * &jm * &rho).scale(0.5) - (&rho * &jp * &jm).scale(0.5)) * re(gamma);

        let ops = SpinOperators::new(2).unwrap();
        let p = ModelParams { n_atoms: 2, delta, rabi, ..ModelParams::default() };
        let hams = crate::model::build_hamiltonians(&p, &ops);
        let got = rhs_full(&DensityMatrix::new(Basis::Bare, rho.clone()).unwrap(), &hams.h1, &ops, gamma).unwrap();
        assert!(max_abs_diff(&got, &expected) < 1e-13);

        let generator = FullGenerator::new(hams.h1.clone(), gamma, &ops).unwrap();
        assert!(max_abs_diff(&generator.apply(&rho), &expected) < 1e-13);
    }

    #[test]
    fn structured_generators_match_dense() {
        for n in [1usize, 3, 8] {
            let ops = SpinOperators::new(n).unwrap();
            let p = ModelParams::from_angle(n, 1.3, 6.0, 0.8, 3.0, 1.0);
            let d = p.derive().unwrap();
            let rho = random_state(n + 1, n as u64 + 3);
            let dressed = DensityMatrix::new(Basis::Dressed, rho.clone()).unwrap();
            let dense = rhs_secular(&dressed, &d, &ops).unwrap();
            let fast = SecularGenerator::new(&d, &ops, SecularFrame::Dressed).apply(&rho);
            assert!(max_abs_diff(&dense, &fast) < 1e-12);

            let h = crate::model::build_hamiltonians(&p, &ops).h1;
            let bare = DensityMatrix::new(Basis::Bare, rho.clone()).unwrap();
            let dense = rhs_full(&bare, &h, &ops, 0.9).unwrap();
            let fast = FullGenerator::new(h, 0.9, &ops).unwrap().apply(&rho);
            assert!(max_abs_diff(&dense, &fast) < 1e-12);
        }
    }

    #[test]
    fn basis_tags_are_enforced() {
        let ops = SpinOperators::new(2).unwrap();
        let d = ModelParams::from_angle(2, 1.0, 5.0, 1.0, 1.0, 1.0).derive().unwrap();
        let bare = DensityMatrix::bare_ground(&ops);
        assert!(matches!(rhs_secular(&bare, &d, &ops), Err(Error::WrongBasis { .. })));
        let dressed = DensityMatrix::pure(Basis::Dressed, 3, 0);
        assert!(matches!(rhs_full(&dressed, &ops.jz, &ops, 1.0), Err(Error::WrongBasis { .. })));
    }

    #[test]
    fn secular_population_rates_follow_birth_death_chain() {
        // Up-rate from m: γ₋sin⁴(θ/2)(j(j+1) − m(m+1)); down-rate: γ₊cos⁴(θ/2)(j(j+1) − m(m−1)).
        let n = 6;
        let ops = SpinOperators::new(n).unwrap();
        let d = ModelParams::from_angle(n, 1.87, 40.0, 1.0, 10.0, 1.0).derive().unwrap();
        let pops: Vec<f64> = (0..=n).map(|i| (i as f64 + 1.0) / 28.0).collect();
        let rho = DensityMatrix::diagonal(Basis::Dressed, &pops);
        let rhs = rhs_secular(&rho, &d, &ops).unwrap();
        let j = n as f64 / 2.0;
        let up = |m: f64| d.raise_rate() * (j * (j + 1.0) - m * (m + 1.0));
        let down = |m: f64| d.lower_rate() * (j * (j + 1.0) - m * (m - 1.0));
        for i in 0..=n {
            let m = ops.m(i);
            let mut rate = -(up(m) + down(m)) * pops[i];
            if i > 0 {
                rate += up(m - 1.0) * pops[i - 1];
            }
            if i < n {
                rate += down(m + 1.0) * pops[i + 1];
            }
            assert_abs_diff_eq!(rhs[(i, i)].re, rate, epsilon = 1e-12);
        }
    }

    #[test]
    fn dephasing_preserves_populations() {
        let ops = SpinOperators::new(5).unwrap();
        let rho = random_state(6, 5);
        let out = lindblad_dissipator(&ops.jz, &rho).unwrap();
        for i in 0..6 {
            assert!(out[(i, i)].norm() < 1e-15);
        }
    }

    #[test]
    fn expectation_values() {
        let ops = SpinOperators::new(4).unwrap();
        let g = DensityMatrix::bare_ground(&ops);
        assert_abs_diff_eq!(expectation(&g, &ops.identity()).unwrap().re, 1.0);
        assert_abs_diff_eq!(expectation(&g, &ops.jz).unwrap().re, -2.0);
        let rho = DensityMatrix::new(Basis::Bare, random_state(5, 9)).unwrap();
        assert!(expectation(&rho, &ops.jx).unwrap().im.abs() < 1e-12);
        assert!(expectation(&rho, &CMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn energy_identity_across_bases() {
        // Tr(ρJ_z) in the bare basis = cosθ Tr(ρJ_z′) + sinθ Tr(ρJ_x′) in the dressed basis.
        let ops = SpinOperators::new(6).unwrap();
        let theta = 1.87;
        let r = ops.rotation(theta).unwrap();
        let dressed = DensityMatrix::new(Basis::Dressed, random_state(7, 21)).unwrap();
        let bare = dressed.change_basis(&r).unwrap();
        let lhs = expectation(&bare, &ops.jz).unwrap().re;
        let rhs = theta.cos() * expectation(&dressed, &ops.jz).unwrap().re
            + theta.sin() * expectation(&dressed, &ops.jx).unwrap().re;
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn dressed_ground_state_mean() {
        // ⟨n⟩₀ = ⟨J_z′⟩ in the rotated ground state = −(N/2)cosθ
        for &(n, theta) in &[(4, 1.87), (9, 0.6), (12, 2.5)] {
            let ops = SpinOperators::new(n).unwrap();
            let r = ops.rotation(theta).unwrap();
            let rho = dressed_ground_state(&ops, &r).unwrap();
            let mean = expectation(&rho, &ops.jz).unwrap().re;
            assert_abs_diff_eq!(mean, -(n as f64) / 2.0 * theta.cos(), epsilon = 1e-11);
            rho.validate().unwrap();
        }
    }

    #[test]
    fn corotating_frame_restores_phase() {
        let ops = SpinOperators::new(3).unwrap();
        let d = ModelParams::from_angle(3, 1.2, 9.0, 1.0, 2.0, 1.0).derive().unwrap();
        let g = SecularGenerator::new(&d, &ops, SecularFrame::CoRotating);
        let rho = random_state(4, 2);
        let lab = g.to_lab(0.3, rho.clone());
        let expected = rho[(2, 0)] * Complex64::from_polar(1.0, -9.0 * 2.0 * 0.3);
        assert!((lab[(2, 0)] - expected).norm() < 1e-14);
        assert_eq!(lab[(1, 1)], rho[(1, 1)]);
    }

    #[test]
    fn trace_distance_basics() {
        let a = DensityMatrix::pure(Basis::Bare, 3, 0);
        let b = DensityMatrix::pure(Basis::Bare, 3, 2);
        assert_abs_diff_eq!(a.trace_distance(&b).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a.trace_distance(&a).unwrap(), 0.0);
        let c = DensityMatrix::pure(Basis::Dressed, 3, 0);
        assert!(a.trace_distance(&c).is_err());
    }
}
