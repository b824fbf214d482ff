use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::FockBasis;
use super::state::{DensityOperator, FockState, StateVector};
use crate::error::{Error, Result};

/// Dense linear operator on a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    basis: Arc<FockBasis>,
    matrix: DMatrix<Complex64>,
}

/// Anything a [`FockOperator`] can act on.
pub trait Evolve: Sized {
    fn evolve(&self, op: &FockOperator) -> Result<Self>;
}

impl FockOperator {
    pub fn new(basis: Arc<FockBasis>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c {
            return Err(Error::NotSquare { rows: r, cols: c });
        }
        if r != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: r,
            });
        }
        Ok(FockOperator { basis, matrix })
    }

    pub fn identity(basis: Arc<FockBasis>) -> Self {
        let d = basis.dim();
        FockOperator {
            basis,
            matrix: DMatrix::identity(d, d),
        }
    }

    /// Diagonal operator whose entry for each basis state is `f(occupation)`.
    pub fn diagonal(basis: Arc<FockBasis>, f: impl Fn(&[u32]) -> Complex64) -> Self {
        let d = basis.dim();
        let mut matrix = DMatrix::zeros(d, d);
        for i in 0..d {
            matrix[(i, i)] = f(basis.state(i));
        }
        FockOperator { basis, matrix }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        FockOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &FockOperator) -> Result<Self> {
        if self.basis != next.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(FockOperator {
            basis: self.basis.clone(),
            matrix: &next.matrix * &self.matrix,
        })
    }

    pub fn apply<S: Evolve>(&self, state: &S) -> Result<S> {
        state.evolve(self)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        super::transform::unitarity_deviation(&self.matrix)
    }

    /// Largest matrix element connecting states with different total photon
    /// number; zero for anything built from linear optics.
    pub fn max_cross_sector_element(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.basis.dim() {
            for j in 0..self.basis.dim() {
                if self.basis.total_photons(i) != self.basis.total_photons(j) {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }
}

impl Evolve for StateVector {
    fn evolve(&self, op: &FockOperator) -> Result<Self> {
        if self.basis() != op.basis() {
            return Err(Error::BasisMismatch);
        }
        StateVector::new(self.basis().clone(), op.matrix() * self.amplitudes())
    }
}

impl Evolve for DensityOperator {
    fn evolve(&self, op: &FockOperator) -> Result<Self> {
        if self.basis() != op.basis() {
            return Err(Error::BasisMismatch);
        }
        let m = op.matrix();
        DensityOperator::new(self.basis().clone(), m * self.matrix() * m.adjoint())
    }
}
