//! Collective angular-momentum operators on the symmetric j = N/2 subspace.
//!
//! Basis index `i` labels the J_z eigenstate with m = -N/2 + i, so index 0 is
//! the all-ground state. ħ = 1.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct SpinOperators {
    n_atoms: usize,
    ladder: Vec<f64>,
    pub jz: CMatrix,
    pub jp: CMatrix,
    pub jm: CMatrix,
    pub jx: CMatrix,
    pub jy: CMatrix,
}

impl SpinOperators {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidParameter("n_atoms must be at least 1".into()));
        }
        let dim = n_atoms + 1;
        let ladder = ladder_coefficients(n_atoms);
        let jz = CMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                Complex64::new(magnetic(n_atoms, r), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut jp = CMatrix::zeros(dim, dim);
        for (i, &c) in ladder.iter().enumerate().take(n_atoms) {
            jp[(i + 1, i)] = Complex64::new(c, 0.0);
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm).scale(0.5);
        let jy = (&jp - &jm) / (2.0 * I);
        Ok(Self { n_atoms, ladder, jz, jp, jm, jx, jy })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.n_atoms + 1
    }

    pub fn j(&self) -> f64 {
        self.n_atoms as f64 / 2.0
    }

    /// m value of basis index `i`.
    pub fn m(&self, i: usize) -> f64 {
        magnetic(self.n_atoms, i)
    }

    /// ⟨i+1|J₊|i⟩ for i in 0..N; the entry at N is zero.
    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim())
    }

    /// exp(i J_y θ), the rotation taking |m⟩ to the dressed state |e_m⟩.
    pub fn rotation(&self, theta: f64) -> Result<RotationMatrix> {
        RotationMatrix::new(self, theta)
    }
}

fn magnetic(n_atoms: usize, i: usize) -> f64 {
    i as f64 - n_atoms as f64 / 2.0
}

pub(crate) fn ladder_coefficients(n_atoms: usize) -> Vec<f64> {
    let j = n_atoms as f64 / 2.0;
    (0..=n_atoms)
        .map(|i| {
            let m = magnetic(n_atoms, i);
            (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RotationMatrix {
    theta: f64,
    pub u: CMatrix,
}

impl RotationMatrix {
    pub fn new(ops: &SpinOperators, theta: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "rotation angle {theta} outside [0, π]"
            )));
        }
        // i·J_y = (J₊ − J₋)/2 is real antisymmetric, so the exponential is real orthogonal.
        let dim = ops.dim();
        let generator = DMatrix::<f64>::from_fn(dim, dim, |r, c| {
            0.5 * (ops.jp[(r, c)].re - ops.jm[(r, c)].re) * theta
        });
        let u = generator.exp().map(|v| Complex64::new(v, 0.0));
        Ok(Self { theta, u })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// u · a · u†
    pub fn rotate(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check_dim(a)?;
        Ok(&self.u * a * self.u.adjoint())
    }

    /// u† · a · u, the inverse of [`RotationMatrix::rotate`].
    pub fn unrotate(&self, a: &CMatrix) -> Result<CMatrix> {
        self.check_dim(a)?;
        Ok(self.u.adjoint() * a * &self.u)
    }

    fn check_dim(&self, a: &CMatrix) -> Result<()> {
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.nrows().max(a.ncols()),
            });
        }
        Ok(())
    }
}

/// Build the spin operators for `n_atoms` atoms.
pub fn build_spin_operators(n_atoms: usize) -> Result<SpinOperators> {
    SpinOperators::new(n_atoms)
}

pub fn rotation_matrix(ops: &SpinOperators, theta: f64) -> Result<RotationMatrix> {
    RotationMatrix::new(ops, theta)
}

pub fn rotate_operator(r: &RotationMatrix, a: &CMatrix) -> Result<CMatrix> {
    r.rotate(a)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest elementwise modulus of `a − b`.
/// Real scalar as a complex one, for scaling complex matrices.
#[inline]
pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
