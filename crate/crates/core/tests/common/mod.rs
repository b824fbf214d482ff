//! Test oracles that share no code with the library's lifting.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type Sparse = BTreeMap<Vec<u32>, Complex64>;

/// `a†_i` on a sparse Fock vector.
pub fn create(state: &Sparse, mode: usize) -> Sparse {
    let mut out = Sparse::new();
    for (occ, amp) in state {
        let mut next = occ.clone();
        next[mode] += 1;
        *out.entry(next).or_default() += amp * f64::from(occ[mode] + 1).sqrt();
    }
    out
}

/// `U|n>` by expanding `∏_j (Σ_i U_ij a†_i)^{n_j} / √n_j!` on the vacuum.
pub fn expand(u: &DMatrix<Complex64>, input: &[u32]) -> Sparse {
    let m = u.nrows();
    let mut state = Sparse::new();
    state.insert(vec![0; m], Complex64::new(1.0, 0.0));
    for (j, &n) in input.iter().enumerate() {
        for k in 1..=n {
            let mut next = Sparse::new();
            for i in 0..m {
                for (occ, amp) in create(&state, i) {
                    *next.entry(occ).or_default() += u[(i, j)] * amp;
                }
            }
            state = next
                .into_iter()
                .map(|(o, a)| (o, a / f64::from(k).sqrt()))
                .collect();
        }
    }
    state
}

/// Haar-like random unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for c in &cols {
            let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    DMatrix::from_fn(n, n, |r, c| cols[c][r])
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Poisson probability of `n` at mean `mean`.
pub fn poisson(mean: f64, n: u32) -> f64 {
    (-mean).exp() * mean.powi(n as i32) / factorial(n)
}
