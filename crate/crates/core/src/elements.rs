//! Optical elements of the weak-measurement amplifier, written as mode
//! transforms (or Kraus channels, for loss) over a polarisation-resolved
//! signal/meter mode layout.
//!
//! Beamsplitter convention: a beamsplitter with intensity transmissivity `T`
//! acts on a mode pair as `[[√T, −√R], [√R, √T]]` (columns are input modes).
//! Two photons entering opposite ports leave one in each port with amplitude
//! `T − R`, which is `−1/3` at `T = 1/3`: the sign flip behind the
//! linear-optics CZ gate.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockBasis, FockOperator, FockState, ModeTransform};

/// Working transmissivity of the interfering polarisation in each PPBS.
pub const PPBS_TRANSMISSIVITY: f64 = 1.0 / 3.0;

/// Horizontal and vertical polarisation modes of one spatial mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpatialMode {
    pub h: usize,
    pub v: usize,
}

impl SpatialMode {
    pub fn modes(&self) -> [usize; 2] {
        [self.h, self.v]
    }
}

/// Global mode indices for the signal and meter, plus optional vacuum ports
/// that receive the light reflected out of the two attenuating PPBS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeLayout {
    pub signal: SpatialMode,
    pub meter: SpatialMode,
    pub signal_dump: Option<SpatialMode>,
    pub meter_dump: Option<SpatialMode>,
}

impl ModeLayout {
    /// `s_H = 0, s_V = 1, m_H = 2, m_V = 3`.
    pub const fn standard() -> Self {
        ModeLayout {
            signal: SpatialMode { h: 0, v: 1 },
            meter: SpatialMode { h: 2, v: 3 },
            signal_dump: None,
            meter_dump: None,
        }
    }

    /// Standard layout plus explicit dump ports on modes 4..8.
    pub const fn with_dump_ports() -> Self {
        ModeLayout {
            signal_dump: Some(SpatialMode { h: 4, v: 5 }),
            meter_dump: Some(SpatialMode { h: 6, v: 7 }),
            ..Self::standard()
        }
    }

    pub fn has_dump_ports(&self) -> bool {
        self.signal_dump.is_some()
    }

    /// Every mode of the layout: signal, meter, then dump ports.
    pub fn modes(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(8);
        out.extend(self.signal.modes());
        out.extend(self.meter.modes());
        out.extend(self.dump_modes());
        out
    }

    pub fn dump_modes(&self) -> Vec<usize> {
        [self.signal_dump, self.meter_dump]
            .iter()
            .flatten()
            .flat_map(|s| s.modes())
            .collect()
    }
}

impl Default for ModeLayout {
    fn default() -> Self {
        Self::standard()
    }
}

fn check_fraction(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::invalid(name, value, "must lie in [0, 1]"));
    }
    Ok(())
}

/// Intensity transmissivities of a partially polarising beamsplitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PpbsSpec {
    pub t_h: f64,
    pub t_v: f64,
}

impl PpbsSpec {
    pub fn new(t_h: f64, t_v: f64) -> Result<Self> {
        check_fraction("t_h", t_h)?;
        check_fraction("t_v", t_v)?;
        Ok(PpbsSpec { t_h, t_v })
    }

    /// Splits horizontal light, fully transmits vertical.
    pub fn horizontal() -> Self {
        PpbsSpec {
            t_h: PPBS_TRANSMISSIVITY,
            t_v: 1.0,
        }
    }

    /// Splits vertical light, fully transmits horizontal.
    pub fn vertical() -> Self {
        PpbsSpec {
            t_h: 1.0,
            t_v: PPBS_TRANSMISSIVITY,
        }
    }
}

/// Fraction of intensity lost from a mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub loss: f64,
}

impl LossSpec {
    pub fn new(loss: f64) -> Result<Self> {
        check_fraction("loss", loss)?;
        Ok(LossSpec { loss })
    }

    pub fn none() -> Self {
        LossSpec { loss: 0.0 }
    }
}

impl Default for LossSpec {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveplateKind {
    Half,
    Quarter,
}

/// Waveplate with its fast axis at `angle` radians from horizontal,
/// normalised to `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveplateSetting {
    pub kind: WaveplateKind,
    pub angle: f64,
}

impl WaveplateSetting {
    pub fn new(kind: WaveplateKind, angle: f64) -> Self {
        WaveplateSetting {
            kind,
            angle: angle.rem_euclid(PI),
        }
    }

    pub fn jones(&self) -> [[Complex64; 2]; 2] {
        match self.kind {
            WaveplateKind::Half => hwp_jones(self.angle),
            WaveplateKind::Quarter => qwp_jones(self.angle),
        }
    }

    pub fn transform(&self, mode: SpatialMode) -> ModeTransform {
        jones_transform(self.jones(), mode)
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`, so that `HWP(0)|H> = |H>`.
pub fn hwp_jones(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (2.0 * theta).sin_cos();
    [[re(c), re(s)], [re(s), re(-c)]]
}

/// `R(θ) diag(1, i) R(−θ)` with `R` the rotation by `θ`.
pub fn qwp_jones(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let i = Complex64::i();
    [
        [re(c * c) + i * s * s, re(c * s) - i * c * s],
        [re(c * s) - i * c * s, re(s * s) + i * c * c],
    ]
}

fn jones_transform(j: [[Complex64; 2]; 2], mode: SpatialMode) -> ModeTransform {
    let m = DMatrix::from_row_slice(2, 2, &[j[0][0], j[0][1], j[1][0], j[1][1]]);
    ModeTransform::unitary(m, &mode.modes()).expect("Jones matrices of waveplates are unitary")
}

pub fn hwp(angle: f64, mode: SpatialMode) -> ModeTransform {
    WaveplateSetting::new(WaveplateKind::Half, angle).transform(mode)
}

pub fn qwp(angle: f64, mode: SpatialMode) -> ModeTransform {
    WaveplateSetting::new(WaveplateKind::Quarter, angle).transform(mode)
}

fn bs_matrix(t: f64) -> DMatrix<Complex64> {
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    DMatrix::from_row_slice(2, 2, &[re(st), re(-sr), re(sr), re(st)])
}

/// Beamsplitter of intensity transmissivity `t` on the mode pair `(a, b)`.
pub fn beamsplitter(t: f64, modes: (usize, usize)) -> Result<ModeTransform> {
    check_fraction("t", t)?;
    ModeTransform::unitary(bs_matrix(t), &[modes.0, modes.1])
}

/// Partially polarising beamsplitter between two spatial modes: a
/// beamsplitter of `t_h` on the two H modes and one of `t_v` on the two V
/// modes. Mode order is `[a.h, a.v, b.h, b.v]`.
pub fn ppbs(spec: PpbsSpec, a: SpatialMode, b: SpatialMode) -> Result<ModeTransform> {
    let spec = PpbsSpec::new(spec.t_h, spec.t_v)?;
    let h = bs_matrix(spec.t_h);
    let v = bs_matrix(spec.t_v);
    let mut m = DMatrix::zeros(4, 4);
    for r in 0..2 {
        for c in 0..2 {
            m[(2 * r, 2 * c)] = h[(r, c)];
            m[(2 * r + 1, 2 * c + 1)] = v[(r, c)];
        }
    }
    ModeTransform::unitary(m, &[a.h, a.v, b.h, b.v])
}

/// The transmitted port of a PPBS whose other input is vacuum and whose
/// reflected output is discarded: `diag(√t_h, √t_v)` on one spatial mode.
/// Lifting this contraction conditions on nothing leaving through the
/// reflected port.
pub fn ppbs_transmitted(spec: PpbsSpec, mode: SpatialMode) -> Result<ModeTransform> {
    let spec = PpbsSpec::new(spec.t_h, spec.t_v)?;
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[re(spec.t_h.sqrt()), re(0.0), re(0.0), re(spec.t_v.sqrt())],
    );
    ModeTransform::new(m, &mode.modes())
}

pub fn phase_shifter(theta: f64, mode: usize) -> ModeTransform {
    ModeTransform::unitary(
        DMatrix::from_element(1, 1, Complex64::from_polar(1.0, theta)),
        &[mode],
    )
    .expect("a phase is unitary")
}

/// Pure-loss channel on one mode, equivalent to a beamsplitter of
/// transmissivity `1 − L` against vacuum followed by discarding the
/// reflected port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    pub spec: LossSpec,
    pub mode: usize,
}

pub fn loss_channel(spec: LossSpec, mode: usize) -> Result<LossChannel> {
    let spec = LossSpec::new(spec.loss)?;
    Ok(LossChannel { spec, mode })
}

impl LossChannel {
    /// Kraus operators `K_k`, removing `k` photons from the mode:
    /// `K_k|n> = √C(n,k) (1−L)^((n−k)/2) L^(k/2) |n−k>`.
    pub fn kraus_operators(&self, basis: &Arc<FockBasis>) -> Result<Vec<FockOperator>> {
        let p = basis
            .position(self.mode)
            .ok_or(Error::UnknownMode(self.mode))?;
        let eta = 1.0 - self.spec.loss;
        let loss = self.spec.loss;
        let d = basis.dim();
        (0..=basis.photon_cap() as u32)
            .map(|k| {
                let mut m = DMatrix::zeros(d, d);
                for col in 0..d {
                    let occ = basis.state(col);
                    let n = occ[p];
                    if n < k {
                        continue;
                    }
                    let mut out = occ.to_vec();
                    out[p] = n - k;
                    let row = basis
                        .index_of(&out)
                        .expect("fewer photons stay under the cap");
                    let amp =
                        (binomial(n, k) * eta.powi((n - k) as i32) * loss.powi(k as i32)).sqrt();
                    m[(row, col)] = re(amp);
                }
                FockOperator::new(basis.clone(), m)
            })
            .collect()
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let kraus = self.kraus_operators(rho.basis())?;
        let d = rho.basis().dim();
        let mut out = DMatrix::zeros(d, d);
        for k in &kraus {
            out += k.matrix() * rho.matrix() * k.matrix().adjoint();
        }
        DensityOperator::new(rho.basis().clone(), out)
    }
}

/// Largest entry of `Σ K†K − I`.
pub fn kraus_completeness_deviation(kraus: &[FockOperator]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let d = first.basis().dim();
    let sum = kraus
        .iter()
        .fold(DMatrix::<Complex64>::zeros(d, d), |acc, k| {
            acc + k.matrix().adjoint() * k.matrix()
        });
    (sum - DMatrix::identity(d, d))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::StateVector;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn two_photon_coincidence(t: f64) -> Complex64 {
        let basis = FockBasis::new(2, 2).unwrap();
        let op = beamsplitter(t, (0, 1)).unwrap().lift(&basis).unwrap();
        let input = StateVector::from_terms(basis.clone(), &[(vec![1, 1], re(1.0))]).unwrap();
        op.apply(&input).unwrap().amplitude(&[1, 1])
    }

    fn brute_force_coincidence(t: f64) -> f64 {
        // a† -> √T a† + √R b†,  b† -> −√R a† + √T b†; the a†b† coefficient of
        // the product is T − R (with a†b† |0> = |1,1>).
        let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
        st * st + sr * (-sr)
    }

    #[test]
    fn full_transmission_is_identity() {
        let t = beamsplitter(1.0, (0, 1)).unwrap();
        assert!((t.matrix() - DMatrix::<Complex64>::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel_dip() {
        assert!(two_photon_coincidence(0.5).norm() < 1e-15);
        assert!(brute_force_coincidence(0.5).abs() < 1e-15);
    }

    #[test]
    fn one_third_beamsplitter_flips_sign() {
        let amp = two_photon_coincidence(1.0 / 3.0);
        assert!((amp - re(brute_force_coincidence(1.0 / 3.0))).norm() < 1e-15);
        assert!((amp - re(-1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn invalid_transmissivity() {
        assert!(beamsplitter(1.2, (0, 1)).is_err());
        assert!(PpbsSpec::new(0.5, -0.1).is_err());
        assert!(LossSpec::new(2.0).is_err());
    }

    #[test]
    fn ppbs_blocks() {
        let layout = ModeLayout::standard();
        let v = ppbs(PpbsSpec::vertical(), layout.signal, layout.meter).unwrap();
        let m = v.matrix();
        // H modes (positions 0 and 2) untouched
        assert!((m[(0, 0)] - re(1.0)).norm() < 1e-15);
        assert!((m[(2, 2)] - re(1.0)).norm() < 1e-15);
        assert!(m[(0, 2)].norm() < 1e-15);
        // V modes mixed at T = 1/3
        assert!((m[(1, 1)] - re((1.0f64 / 3.0).sqrt())).norm() < 1e-15);
        assert!((m[(3, 1)] - re((2.0f64 / 3.0).sqrt())).norm() < 1e-15);

        let h = ppbs(PpbsSpec::horizontal(), layout.signal, layout.meter).unwrap();
        assert!((h.matrix()[(1, 1)] - re(1.0)).norm() < 1e-15);
        assert!((h.matrix()[(2, 0)] - re((2.0f64 / 3.0).sqrt())).norm() < 1e-15);

        let id = ppbs(
            PpbsSpec::new(1.0, 1.0).unwrap(),
            layout.signal,
            layout.meter,
        )
        .unwrap();
        assert!((id.matrix() - DMatrix::<Complex64>::identity(4, 4)).norm() < 1e-15);
    }

    #[test]
    fn equal_ppbs_is_polarisation_blind_beamsplitter() {
        let layout = ModeLayout::standard();
        for t in [0.0, 0.2, 0.5, 0.9] {
            let p = ppbs(PpbsSpec::new(t, t).unwrap(), layout.signal, layout.meter).unwrap();
            let h = beamsplitter(t, (0, 2)).unwrap();
            let v = beamsplitter(t, (1, 3)).unwrap();
            let both = h.then(&v).unwrap().embed(&[0, 1, 2, 3]).unwrap();
            assert!((p.matrix() - both.matrix()).norm() < 1e-15);
        }
    }

    #[test]
    fn hwp_examples() {
        let h = hwp(0.0, ModeLayout::standard().signal);
        assert!((h.matrix()[(0, 0)] - re(1.0)).norm() < 1e-15);
        assert!(h.matrix()[(1, 0)].norm() < 1e-15);

        let d = hwp(PI / 8.0, ModeLayout::standard().signal);
        assert!((d.matrix()[(0, 0)] - re(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((d.matrix()[(1, 0)] - re(FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn qwp_at_zero_is_diag_one_i() {
        let q = qwp_jones(0.0);
        assert!((q[0][0] - re(1.0)).norm() < 1e-15);
        assert!((q[1][1] - Complex64::i()).norm() < 1e-15);
        assert!(q[0][1].norm() < 1e-15);
    }

    #[test]
    fn waveplate_angles_normalise() {
        let w = WaveplateSetting::new(WaveplateKind::Half, -PI / 4.0);
        assert!((w.angle - 3.0 * PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn waveplates_conserve_photons_per_spatial_mode() {
        let basis = FockBasis::new(4, 3).unwrap();
        let layout = ModeLayout::standard();
        for angle in [0.1, 0.7, 2.0] {
            for t in [hwp(angle, layout.signal), qwp(angle, layout.meter)] {
                let op = t.lift(&basis).unwrap();
                for i in 0..basis.dim() {
                    for j in 0..basis.dim() {
                        let (a, b) = (basis.state(i), basis.state(j));
                        if a[0] + a[1] != b[0] + b[1] || a[2] + a[3] != b[2] + b[3] {
                            assert!(op.matrix()[(i, j)].norm() < 1e-14);
                        }
                    }
                }
            }
        }
    }

    fn single_mode_fock(n: u32, cap: usize) -> DensityOperator {
        let b = FockBasis::over_modes(&[0], cap).unwrap();
        DensityOperator::diagonal(b, |occ| if occ[0] == n { 1.0 } else { 0.0 })
    }

    #[test]
    fn loss_examples() {
        let one = single_mode_fock(1, 3);
        let id = loss_channel(LossSpec::none(), 0)
            .unwrap()
            .apply(&one)
            .unwrap();
        assert!((id.matrix() - one.matrix()).norm() < 1e-15);

        let all = loss_channel(LossSpec::new(1.0).unwrap(), 0)
            .unwrap()
            .apply(&one)
            .unwrap();
        assert!((all.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);

        let partial = loss_channel(LossSpec::new(0.6).unwrap(), 0)
            .unwrap()
            .apply(&one)
            .unwrap();
        assert!((partial.matrix()[(0, 0)].re - 0.6).abs() < 1e-15);
        assert!((partial.matrix()[(1, 1)].re - 0.4).abs() < 1e-15);
    }

    #[test]
    fn loss_matches_beamsplitter_with_vacuum_ancilla() {
        for loss in [0.0, 0.25, 0.6, 1.0] {
            for n in 0..=3u32 {
                let rho = single_mode_fock(n, 3);
                let channel = loss_channel(LossSpec::new(loss).unwrap(), 0).unwrap();
                let direct = channel.apply(&rho).unwrap();

                // brute force: BS(T = 1 − L) with mode 1 in vacuum, trace mode 1
                let vac = FockBasis::over_modes(&[1], 3).unwrap();
                let vac = DensityOperator::diagonal(vac, |o| if o[0] == 0 { 1.0 } else { 0.0 });
                let (joint, lost) = rho.tensor(&vac, 3).unwrap();
                assert_eq!(lost, 0.0);
                let bs = beamsplitter(1.0 - loss, (0, 1))
                    .unwrap()
                    .lift(joint.basis())
                    .unwrap();
                let out = bs.apply(&joint).unwrap().partial_trace(&[1]).unwrap();
                assert!((out.matrix() - direct.matrix()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kraus_sets_are_complete() {
        let basis = FockBasis::new(4, 3).unwrap();
        for loss in [0.0, 0.3, 0.77, 1.0] {
            let k = loss_channel(LossSpec::new(loss).unwrap(), 1)
                .unwrap()
                .kraus_operators(&basis)
                .unwrap();
            assert!(kraus_completeness_deviation(&k) < 1e-12);
        }
    }

    #[test]
    fn losses_compose_multiplicatively() {
        let (l1, l2) = (0.3, 0.45);
        let b = FockBasis::over_modes(&[0], 3).unwrap();
        let psi = StateVector::from_terms(
            b,
            &[(vec![0], re(0.6)), (vec![1], Complex64::new(0.0, 0.8))],
        )
        .unwrap();
        let rho = psi.to_density();
        let c1 = loss_channel(LossSpec::new(l1).unwrap(), 0).unwrap();
        let c2 = loss_channel(LossSpec::new(l2).unwrap(), 0).unwrap();
        let c12 = loss_channel(LossSpec::new(1.0 - (1.0 - l1) * (1.0 - l2)).unwrap(), 0).unwrap();
        let two_step = c2.apply(&c1.apply(&rho).unwrap()).unwrap();
        let one_step = c12.apply(&rho).unwrap();
        assert!((two_step.matrix() - one_step.matrix()).norm() < 1e-12);
    }
}
