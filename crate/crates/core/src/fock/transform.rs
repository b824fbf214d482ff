use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::FockBasis;
use super::operator::FockOperator;
use super::permanent::permanent;
use crate::error::{Error, Result};

/// Tolerance used to classify a transform as unitary or contractive.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Unitary,
    /// Contraction (all singular values at most one). Lifting such a
    /// transform gives the Fock-space amplitudes conditioned on no photon
    /// leaving through the implied loss ports.
    Subunitary,
}

/// Linear map on mode creation operators: input mode `modes[j]` is sent to
/// `sum_i matrix[(i, j)] * a_dag(modes[i])`.
///
/// Column `j` is therefore the single-photon output amplitude vector for a
/// photon entering `modes[j]`, and composing `a` then `b` multiplies `b * a`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTransform {
    matrix: DMatrix<Complex64>,
    modes: Vec<usize>,
    kind: TransformKind,
}

impl ModeTransform {
    pub fn new(matrix: DMatrix<Complex64>, modes: &[usize]) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows != modes.len() {
            return Err(Error::DimensionMismatch {
                expected: modes.len(),
                found: rows,
            });
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::DuplicateMode(*m));
            }
        }
        let deviation = unitarity_deviation(&matrix);
        let kind = if deviation <= UNITARITY_TOL {
            TransformKind::Unitary
        } else {
            let max_sv = matrix
                .clone()
                .singular_values()
                .iter()
                .cloned()
                .fold(0.0, f64::max);
            if max_sv > 1.0 + UNITARITY_TOL {
                return Err(Error::NotContractive {
                    max_singular_value: max_sv,
                });
            }
            TransformKind::Subunitary
        };
        Ok(ModeTransform {
            matrix,
            modes: modes.to_vec(),
            kind,
        })
    }

    /// Like [`ModeTransform::new`] but rejects anything that is not unitary.
    pub fn unitary(matrix: DMatrix<Complex64>, modes: &[usize]) -> Result<Self> {
        let t = Self::new(matrix, modes)?;
        if t.kind != TransformKind::Unitary {
            return Err(Error::NotUnitary {
                deviation: unitarity_deviation(&t.matrix),
            });
        }
        Ok(t)
    }

    pub fn identity(modes: &[usize]) -> Result<Self> {
        Self::new(DMatrix::identity(modes.len(), modes.len()), modes)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn is_unitary(&self) -> bool {
        self.kind == TransformKind::Unitary
    }

    /// The same transform written over a larger mode list, identity on the
    /// modes it does not touch.
    pub fn embed(&self, modes: &[usize]) -> Result<Self> {
        let pos: Vec<usize> = self
            .modes
            .iter()
            .map(|m| {
                modes
                    .iter()
                    .position(|x| x == m)
                    .ok_or(Error::UnknownMode(*m))
            })
            .collect::<Result<_>>()?;
        let mut matrix = DMatrix::identity(modes.len(), modes.len());
        for (a, &pa) in pos.iter().enumerate() {
            for (b, &pb) in pos.iter().enumerate() {
                matrix[(pa, pb)] = self.matrix[(a, b)];
            }
        }
        Self::new(matrix, modes)
    }

    /// Apply `self`, then `next`. The result acts on the union of both mode
    /// lists, `self`'s modes first.
    pub fn then(&self, next: &ModeTransform) -> Result<Self> {
        let mut modes = self.modes.clone();
        for m in &next.modes {
            if !modes.contains(m) {
                modes.push(*m);
            }
        }
        let a = self.embed(&modes)?;
        let b = next.embed(&modes)?;
        Self::new(&b.matrix * &a.matrix, &modes)
    }

    /// Compose a sequence of elements in the order light meets them.
    pub fn sequence<'a, I>(elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a ModeTransform>,
    {
        let mut iter = elements.into_iter();
        let first = iter
            .next()
            .ok_or(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            })?
            .clone();
        iter.try_fold(first, |acc, t| acc.then(t))
    }

    /// Second-quantised action of this transform on a truncated Fock basis:
    /// `<m|U|n> = per(U[m, n]) / sqrt(prod m_i! prod n_j!)` on the touched
    /// modes, identity on the rest. Total photon number is conserved, so
    /// the operator is block diagonal across photon-number sectors.
    pub fn lift(&self, basis: &Arc<FockBasis>) -> Result<FockOperator> {
        let touched = basis.positions(&self.modes)?;
        let untouched: Vec<usize> = (0..basis.num_modes())
            .filter(|p| !touched.contains(p))
            .collect();

        // Group basis states by (untouched occupations, touched photon count);
        // only states within one group can couple.
        let mut groups: HashMap<(Vec<u32>, u32), Vec<usize>> = HashMap::new();
        for i in 0..basis.dim() {
            let occ = basis.state(i);
            let key_u = untouched.iter().map(|&p| occ[p]).collect();
            let n_t = touched.iter().map(|&p| occ[p]).sum();
            groups.entry((key_u, n_t)).or_default().push(i);
        }

        let dim = basis.dim();
        let mut out = DMatrix::zeros(dim, dim);
        for members in groups.values() {
            for &col in members {
                let n_occ = basis.state(col);
                let cols = repeat_indices(touched.iter().map(|&p| n_occ[p]));
                let norm_n = factorial_product(touched.iter().map(|&p| n_occ[p]));
                for &row in members {
                    let m_occ = basis.state(row);
                    let rows = repeat_indices(touched.iter().map(|&p| m_occ[p]));
                    let norm_m = factorial_product(touched.iter().map(|&p| m_occ[p]));
                    let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
                        self.matrix[(rows[r], cols[c])]
                    });
                    out[(row, col)] = permanent(&sub) / (norm_m * norm_n).sqrt();
                }
            }
        }
        FockOperator::new(basis.clone(), out)
    }
}

/// Largest absolute entry of `U^dagger U - I`.
pub fn unitarity_deviation(matrix: &DMatrix<Complex64>) -> f64 {
    let n = matrix.ncols();
    let gram = matrix.adjoint() * matrix;
    (gram - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn repeat_indices(occ: impl Iterator<Item = u32>) -> Vec<usize> {
    occ.enumerate()
        .flat_map(|(i, n)| std::iter::repeat_n(i, n as usize))
        .collect()
}

fn factorial_product(occ: impl Iterator<Item = u32>) -> f64 {
    occ.map(|n| (1..=n).map(f64::from).product::<f64>())
        .product()
}
