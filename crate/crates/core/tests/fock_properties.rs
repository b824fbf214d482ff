mod common;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nla_weaksim::elements::{loss_channel, LossSpec};
use nla_weaksim::fock::{FockBasis, FockState, ModeTransform, StateVector};

use common::{expand, random_unitary};

fn random_state(basis: &std::sync::Arc<FockBasis>, rng: &mut ChaCha8Rng) -> StateVector {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let v = DVector::from_fn(basis.dim(), |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    StateVector::new(basis.clone(), v / Complex64::new(n, 0.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifting_matches_operator_expansion(seed in any::<u64>(), modes in 1usize..=3, cap in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(modes, &mut rng);
        let all: Vec<usize> = (0..modes).collect();
        let basis = FockBasis::new(modes, cap).unwrap();
        let op = ModeTransform::unitary(u.clone(), &all).unwrap().lift(&basis).unwrap();
        for col in 0..basis.dim() {
            let out = expand(&u, basis.state(col));
            for row in 0..basis.dim() {
                let want = out.get(basis.state(row)).copied().unwrap_or_default();
                prop_assert!((op.matrix()[(row, col)] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn lifted_unitaries_preserve_norm(seed in any::<u64>(), cap in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = FockBasis::new(4, cap).unwrap();
        let u = random_unitary(3, &mut rng);
        let op = ModeTransform::unitary(u, &[0, 2, 3]).unwrap().lift(&basis).unwrap();
        let psi = random_state(&basis, &mut rng);
        let out = op.apply(&psi).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        prop_assert!(op.max_cross_sector_element() < 1e-12);
    }

    #[test]
    fn lifting_respects_composition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = FockBasis::new(3, 3).unwrap();
        let a = ModeTransform::unitary(random_unitary(2, &mut rng), &[0, 1]).unwrap();
        let b = ModeTransform::unitary(random_unitary(2, &mut rng), &[1, 2]).unwrap();
        let composed = a.then(&b).unwrap().lift(&basis).unwrap();
        let stepwise = a.lift(&basis).unwrap().then(&b.lift(&basis).unwrap()).unwrap();
        prop_assert!((composed.matrix() - stepwise.matrix()).norm() < 1e-10);
    }

    #[test]
    fn channels_keep_density_operators_physical(seed in any::<u64>(), loss in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = FockBasis::new(2, 3).unwrap();
        let rho = random_state(&basis, &mut rng).to_density();
        let out = loss_channel(LossSpec::new(loss).unwrap(), 1).unwrap().apply(&rho).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.hermiticity_deviation() < 1e-12);
        prop_assert!(out.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = FockBasis::new(3, 2).unwrap();
        let psi = random_state(&basis, &mut rng);
        let sub = FockBasis::over_modes(&[2], 2).unwrap();
        let probe = random_state(&sub, &mut rng);
        let once = psi.project(&probe).unwrap();
        prop_assert!(once.probability >= 0.0 && once.probability <= 1.0 + 1e-12);
        let residual = once.state.unwrap();
        // the post-measurement state: residual with the measured mode in `probe`
        let joint = FockBasis::over_modes(&[0, 1, 2], 4).unwrap();
        let (after, discarded) = residual.tensor_on(&probe, joint).unwrap();
        prop_assert_eq!(discarded, 0.0);
        let twice = after.project(&probe).unwrap();
        prop_assert!((twice.probability - 1.0).abs() < 1e-12);
        let r2 = twice.state.unwrap();
        for i in 0..residual.basis().dim() {
            let occ = residual.basis().state(i);
            prop_assert!((residual.amplitude(occ) - r2.amplitude(occ)).norm() < 1e-12);
        }
    }
}

#[test]
fn oracle_equivalence_on_small_bases() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        for modes in 1..=3 {
            let u: DMatrix<Complex64> = random_unitary(modes, &mut rng);
            let all: Vec<usize> = (0..modes).collect();
            let basis = FockBasis::new(modes, 3).unwrap();
            let op = ModeTransform::unitary(u.clone(), &all)
                .unwrap()
                .lift(&basis)
                .unwrap();
            for col in 0..basis.dim() {
                let out = expand(&u, basis.state(col));
                for row in 0..basis.dim() {
                    let want = out.get(basis.state(row)).copied().unwrap_or_default();
                    worst = worst.max((op.matrix()[(row, col)] - want).norm());
                }
            }
        }
    }
    assert!(worst < 1e-10, "worst deviation {worst:e}");
}
