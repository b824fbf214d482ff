use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use super::basis::{FockBasis, Occupation, DEFAULT_MAX_BASIS_SIZE};
use crate::error::{Error, Result};

/// Outcome probabilities at or below this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-30;

/// Tolerance on the projector norm accepted by `project`.
const PROJECTOR_NORM_TOL: f64 = 1e-9;

/// Result of conditioning a state on a measurement outcome. `state` is the
/// renormalised conditional state, or `None` when the outcome has (numerically)
/// zero probability.
#[derive(Debug, Clone)]
pub struct Projection<S> {
    pub state: Option<S>,
    pub probability: f64,
}

impl<S> Projection<S> {
    pub fn is_empty(&self) -> bool {
        self.state.is_none()
    }
}

/// Operations shared by pure and mixed Fock states.
pub trait FockState: Sized {
    fn basis(&self) -> &Arc<FockBasis>;

    /// `<psi|psi>` or `Tr rho`.
    fn weight(&self) -> f64;

    /// Probability of finding `n` photons in global mode `mode`.
    fn occupancy_probability(&self, mode: usize, n: u32) -> Result<f64>;

    /// Condition on the modes of `projector` being found in that state. The
    /// probability is absolute (not divided by the input weight).
    fn project(&self, projector: &StateVector) -> Result<Projection<Self>>;
}

/// Pure state on a truncated Fock basis. Amplitudes need not be normalised;
/// truncated constructions keep their discarded weight visible as `1 - norm²`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: DVector<Complex64>,
}

/// Mixed state on a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    basis: Arc<FockBasis>,
    matrix: DMatrix<Complex64>,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector { basis, amplitudes })
    }

    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        let zeros = vec![0u32; basis.num_modes()];
        Self::from_terms(basis, &[(zeros, Complex64::new(1.0, 0.0))])
            .expect("vacuum is in every basis")
    }

    /// Superposition of basis states given by occupation vectors.
    pub fn from_terms(basis: Arc<FockBasis>, terms: &[(Occupation, Complex64)]) -> Result<Self> {
        let mut amplitudes = DVector::zeros(basis.dim());
        for (occ, amp) in terms {
            let i = basis
                .index_of(occ)
                .ok_or_else(|| Error::OccupationOutsideBasis(occ.clone()))?;
            amplitudes[i] += amp;
        }
        Ok(StateVector { basis, amplitudes })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupation: &[u32]) -> Complex64 {
        self.basis
            .index_of(occupation)
            .map(|i| self.amplitudes[i])
            .unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    /// Unit-norm copy, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n * n > ZERO_PROBABILITY).then(|| StateVector {
            basis: self.basis.clone(),
            amplitudes: self.amplitudes.unscale(n),
        })
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            basis: self.basis.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }

    /// `|self> ⊗ |other>` on the concatenated mode list, truncated at
    /// `photon_cap`. Returns the state and the probability weight that fell
    /// above the cap.
    pub fn tensor(&self, other: &StateVector, photon_cap: usize) -> Result<(StateVector, f64)> {
        let basis = joint_basis(
            &self.basis,
            &other.basis,
            photon_cap,
            DEFAULT_MAX_BASIS_SIZE,
        )?;
        self.tensor_on(other, basis)
    }

    /// As [`StateVector::tensor`], onto a caller-supplied joint basis whose
    /// modes are `self`'s followed by `other`'s.
    pub fn tensor_on(
        &self,
        other: &StateVector,
        basis: Arc<FockBasis>,
    ) -> Result<(StateVector, f64)> {
        check_joint(&self.basis, &other.basis, &basis)?;
        let mut amplitudes = DVector::zeros(basis.dim());
        let mut discarded = 0.0;
        let mut occ = Vec::with_capacity(basis.num_modes());
        for (i, a) in self.amplitudes.iter().enumerate() {
            for (j, b) in other.amplitudes.iter().enumerate() {
                let amp = a * b;
                if amp == Complex64::default() {
                    continue;
                }
                occ.clear();
                occ.extend_from_slice(self.basis.state(i));
                occ.extend_from_slice(other.basis.state(j));
                match basis.index_of(&occ) {
                    Some(k) => amplitudes[k] = amp,
                    None => discarded += amp.norm_sqr(),
                }
            }
        }
        Ok((StateVector { basis, amplitudes }, discarded))
    }

    /// Multiply every amplitude by `e^{i theta}` per photon in `mode`.
    pub fn with_mode_phase(&self, mode: usize, theta: f64) -> Result<Self> {
        let p = self.basis.position(mode).ok_or(Error::UnknownMode(mode))?;
        let mut amplitudes = self.amplitudes.clone();
        for (i, a) in amplitudes.iter_mut().enumerate() {
            let n = self.basis.state(i)[p] as f64;
            *a *= Complex64::from_polar(1.0, theta * n);
        }
        Ok(StateVector {
            basis: self.basis.clone(),
            amplitudes,
        })
    }

    /// `|<self|other>|` for normalised states: 1 when equal up to global phase.
    pub fn overlap_magnitude(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm() / (self.norm() * other.norm()))
    }
}

impl FockState for StateVector {
    fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    fn weight(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    fn occupancy_probability(&self, mode: usize, n: u32) -> Result<f64> {
        let p = occupancy_position(&self.basis, mode, n)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.basis.state(*i)[p] == n)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    fn project(&self, projector: &StateVector) -> Result<Projection<Self>> {
        let (rest, bra) = partial_bra(&self.basis, projector)?;
        let residual = &bra * &self.amplitudes;
        let probability = residual.norm_squared();
        let state = (probability > ZERO_PROBABILITY).then(|| StateVector {
            basis: rest,
            amplitudes: residual.unscale(probability.sqrt()),
        });
        Ok(Projection { state, probability })
    }
}

impl DensityOperator {
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
        Ok(DensityOperator { basis, matrix })
    }

    /// Operator diagonal in the Fock basis with entries `f(occupation)`.
    pub fn diagonal(basis: Arc<FockBasis>, f: impl Fn(&[u32]) -> f64) -> Self {
        let d = basis.dim();
        let mut matrix = DMatrix::zeros(d, d);
        for i in 0..d {
            matrix[(i, i)] = Complex64::new(f(basis.state(i)), 0.0);
        }
        DensityOperator { basis, matrix }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Unit-trace copy, or `None` when the trace vanishes.
    pub fn normalized(&self) -> Option<Self> {
        let t = self.trace().re;
        (t > ZERO_PROBABILITY).then(|| DensityOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.unscale(t),
        })
    }

    /// Convex (or any real-weighted) combination of operators on one basis.
    pub fn weighted_sum<'a>(
        terms: impl IntoIterator<Item = (f64, &'a DensityOperator)>,
    ) -> Result<Self> {
        let mut iter = terms.into_iter();
        let (w0, first) = iter.next().ok_or(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        let mut matrix = first.matrix.scale(w0);
        for (w, op) in iter {
            if op.basis != first.basis {
                return Err(Error::BasisMismatch);
            }
            matrix += op.matrix.scale(w);
        }
        Ok(DensityOperator {
            basis: first.basis.clone(),
            matrix,
        })
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.matrix + self.matrix.adjoint()).scale(0.5);
        h.symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Hermitian within 1e-12, eigenvalues at least -1e-10.
    pub fn is_physical(&self) -> bool {
        self.hermiticity_deviation() <= 1e-12 && self.min_eigenvalue() >= -1e-10
    }

    pub fn tensor(
        &self,
        other: &DensityOperator,
        photon_cap: usize,
    ) -> Result<(DensityOperator, f64)> {
        let basis = joint_basis(
            &self.basis,
            &other.basis,
            photon_cap,
            DEFAULT_MAX_BASIS_SIZE,
        )?;
        self.tensor_on(other, basis)
    }

    pub fn tensor_on(
        &self,
        other: &DensityOperator,
        basis: Arc<FockBasis>,
    ) -> Result<(DensityOperator, f64)> {
        check_joint(&self.basis, &other.basis, &basis)?;
        let (da, db) = (self.basis.dim(), other.basis.dim());
        // joint index of each product basis state, None when above the cap
        let mut joint = vec![None; da * db];
        let mut discarded = 0.0;
        for i in 0..da {
            for j in 0..db {
                let mut occ = self.basis.state(i).to_vec();
                occ.extend_from_slice(other.basis.state(j));
                joint[i * db + j] = basis.index_of(&occ);
                if joint[i * db + j].is_none() {
                    discarded += (self.matrix[(i, i)] * other.matrix[(j, j)]).re;
                }
            }
        }
        let mut matrix = DMatrix::zeros(basis.dim(), basis.dim());
        for (r, jr) in joint.iter().enumerate() {
            let Some(jr) = *jr else { continue };
            for (c, jc) in joint.iter().enumerate() {
                let Some(jc) = *jc else { continue };
                matrix[(jr, jc)] = self.matrix[(r / db, c / db)] * other.matrix[(r % db, c % db)];
            }
        }
        Ok((DensityOperator { basis, matrix }, discarded))
    }

    /// Trace out the listed global modes. Tracing every mode leaves a 1x1
    /// operator on the empty-mode basis.
    pub fn partial_trace(&self, modes: &[usize]) -> Result<DensityOperator> {
        let traced = self.basis.positions(modes)?;
        let kept: Vec<usize> = (0..self.basis.num_modes())
            .filter(|p| !traced.contains(p))
            .collect();
        let kept_modes: Vec<usize> = kept.iter().map(|&p| self.basis.modes()[p]).collect();
        let out_basis =
            FockBasis::over_modes_with_limit(&kept_modes, self.basis.photon_cap(), usize::MAX)?;

        let mut groups: HashMap<Vec<u32>, Vec<(usize, usize)>> = HashMap::new();
        for i in 0..self.basis.dim() {
            let occ = self.basis.state(i);
            let t: Vec<u32> = traced.iter().map(|&p| occ[p]).collect();
            let k: Vec<u32> = kept.iter().map(|&p| occ[p]).collect();
            let ki = out_basis
                .index_of(&k)
                .expect("kept part fits under the cap");
            groups.entry(t).or_default().push((i, ki));
        }

        let mut matrix = DMatrix::zeros(out_basis.dim(), out_basis.dim());
        for members in groups.values() {
            for &(i, ki) in members {
                for &(j, kj) in members {
                    matrix[(ki, kj)] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityOperator {
            basis: out_basis,
            matrix,
        })
    }
}

impl FockState for DensityOperator {
    fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    fn weight(&self) -> f64 {
        self.trace().re
    }

    fn occupancy_probability(&self, mode: usize, n: u32) -> Result<f64> {
        let p = occupancy_position(&self.basis, mode, n)?;
        Ok((0..self.basis.dim())
            .filter(|&i| self.basis.state(i)[p] == n)
            .map(|i| self.matrix[(i, i)].re)
            .sum())
    }

    fn project(&self, projector: &StateVector) -> Result<Projection<Self>> {
        let (rest, bra) = partial_bra(&self.basis, projector)?;
        let reduced = &bra * &self.matrix * bra.adjoint();
        let probability = reduced.trace().re;
        let state = (probability > ZERO_PROBABILITY).then(|| DensityOperator {
            basis: rest,
            matrix: reduced.unscale(probability),
        });
        Ok(Projection { state, probability })
    }
}

fn occupancy_position(basis: &FockBasis, mode: usize, n: u32) -> Result<usize> {
    if n as usize > basis.photon_cap() {
        return Err(Error::invalid(
            "n",
            n as f64,
            "photon number above the basis cap",
        ));
    }
    basis.position(mode).ok_or(Error::UnknownMode(mode))
}

fn joint_basis(
    a: &FockBasis,
    b: &FockBasis,
    photon_cap: usize,
    limit: usize,
) -> Result<Arc<FockBasis>> {
    if let Some(m) = a.modes().iter().find(|m| b.modes().contains(m)) {
        return Err(Error::OverlappingModes(*m));
    }
    let modes: Vec<usize> = a.modes().iter().chain(b.modes()).copied().collect();
    FockBasis::over_modes_with_limit(&modes, photon_cap, limit)
}

fn check_joint(a: &FockBasis, b: &FockBasis, joint: &FockBasis) -> Result<()> {
    if let Some(m) = a.modes().iter().find(|m| b.modes().contains(m)) {
        return Err(Error::OverlappingModes(*m));
    }
    let expected: Vec<usize> = a.modes().iter().chain(b.modes()).copied().collect();
    if joint.modes() != expected.as_slice() {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// Builds the map `|psi> -> <projector|psi>` from the full basis to the
/// basis of the remaining modes, as a dense matrix.
fn partial_bra(
    basis: &FockBasis,
    projector: &StateVector,
) -> Result<(Arc<FockBasis>, DMatrix<Complex64>)> {
    let norm = projector.norm();
    if (norm - 1.0).abs() > PROJECTOR_NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let sub = basis.positions(projector.basis.modes())?;
    let rest: Vec<usize> = (0..basis.num_modes())
        .filter(|p| !sub.contains(p))
        .collect();
    let rest_modes: Vec<usize> = rest.iter().map(|&p| basis.modes()[p]).collect();
    let rest_basis = FockBasis::over_modes_with_limit(&rest_modes, basis.photon_cap(), usize::MAX)?;

    let mut bra = DMatrix::zeros(rest_basis.dim(), basis.dim());
    for i in 0..basis.dim() {
        let occ = basis.state(i);
        let s: Vec<u32> = sub.iter().map(|&p| occ[p]).collect();
        let Some(pi) = projector.basis.index_of(&s) else {
            continue;
        };
        let r: Vec<u32> = rest.iter().map(|&p| occ[p]).collect();
        let ri = rest_basis
            .index_of(&r)
            .expect("remaining part fits under the cap");
        bra[(ri, i)] = projector.amplitudes[pi].conj();
    }
    Ok((rest_basis, bra))
}

fn complex_pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("StateVector", 4)?;
        s.serialize_field("modes", self.basis.modes())?;
        s.serialize_field("photon_cap", &self.basis.photon_cap())?;
        s.serialize_field("basis", self.basis.states())?;
        let amps: Vec<[f64; 2]> = self.amplitudes.iter().map(complex_pair).collect();
        s.serialize_field("amplitudes", &amps)?;
        s.end()
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DensityOperator", 4)?;
        s.serialize_field("modes", self.basis.modes())?;
        s.serialize_field("photon_cap", &self.basis.photon_cap())?;
        s.serialize_field("basis", self.basis.states())?;
        let rows: Vec<Vec<[f64; 2]>> = self
            .matrix
            .row_iter()
            .map(|row| row.iter().map(complex_pair).collect())
            .collect();
        s.serialize_field("matrix", &rows)?;
        s.end()
    }
}
