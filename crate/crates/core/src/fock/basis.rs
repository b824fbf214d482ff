use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Photon numbers per mode, in the order of [`FockBasis::modes`].
pub type Occupation = Vec<u32>;

/// Largest basis a constructor will build unless told otherwise. Dense
/// operators scale with the square of this.
pub const DEFAULT_MAX_BASIS_SIZE: usize = 5000;

/// Truncated multimode Fock basis: every occupation vector over `modes` whose
/// total photon number is at most `photon_cap`, in lexicographic order.
///
/// Modes carry global labels so states built on different subsets of a
/// larger layout can be combined and projected against each other.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: Vec<usize>,
    photon_cap: usize,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.photon_cap == other.photon_cap
    }
}

impl Eq for FockBasis {}

/// Number of occupation vectors over `num_modes` modes with total at most
/// `cap`, i.e. C(num_modes + cap, cap). Saturates instead of overflowing.
pub fn basis_size(num_modes: usize, cap: usize) -> usize {
    let mut size: u128 = 1;
    for k in 1..=cap as u128 {
        size = size * (num_modes as u128 + k) / k;
        if size > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    size as usize
}

impl FockBasis {
    /// Basis over modes `0..num_modes`.
    pub fn new(num_modes: usize, photon_cap: usize) -> Result<Arc<Self>> {
        if num_modes == 0 {
            return Err(Error::NoModes);
        }
        let modes: Vec<usize> = (0..num_modes).collect();
        Self::over_modes_with_limit(&modes, photon_cap, DEFAULT_MAX_BASIS_SIZE)
    }

    pub fn over_modes(modes: &[usize], photon_cap: usize) -> Result<Arc<Self>> {
        Self::over_modes_with_limit(modes, photon_cap, DEFAULT_MAX_BASIS_SIZE)
    }

    /// Basis over an explicit list of global mode labels. An empty list is
    /// allowed and yields the one-element basis of the empty occupation,
    /// which is what tracing out every mode leaves behind.
    pub fn over_modes_with_limit(
        modes: &[usize],
        photon_cap: usize,
        limit: usize,
    ) -> Result<Arc<Self>> {
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::DuplicateMode(*m));
            }
        }
        let size = basis_size(modes.len(), photon_cap);
        if size > limit {
            return Err(Error::BasisTooLarge {
                modes: modes.len(),
                cap: photon_cap,
                size,
                limit,
            });
        }

        let mut states = Vec::with_capacity(size);
        let mut current = vec![0u32; modes.len()];
        enumerate(&mut current, 0, photon_cap as u32, &mut states);
        debug_assert_eq!(states.len(), size);

        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Arc::new(FockBasis {
            modes: modes.to_vec(),
            photon_cap,
            states,
            index,
        }))
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn photon_cap(&self) -> usize {
        self.photon_cap
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// Position of a global mode label inside this basis' occupation vectors.
    pub fn position(&self, mode: usize) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    pub(crate) fn positions(&self, modes: &[usize]) -> Result<Vec<usize>> {
        modes
            .iter()
            .map(|&m| self.position(m).ok_or(Error::UnknownMode(m)))
            .collect()
    }

    pub fn total_photons(&self, i: usize) -> u32 {
        self.states[i].iter().sum()
    }
}

fn enumerate(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Occupation>) {
    if pos == current.len() {
        out.push(current.to_vec());
        return;
    }
    for n in 0..=remaining {
        current[pos] = n;
        enumerate(current, pos + 1, remaining - n, out);
    }
    current[pos] = 0;
}
