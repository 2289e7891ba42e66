//! Normalized NV ground-state Hamiltonian.
//!
//! In the body frame the field is along the NV axis and
//! `H′ = Sz² + ε·Sz = diag(1+ε, 0, 1−ε)`. The lab frame Hamiltonian at orientation
//! `(θ, φ)` is `H = R H′ R†`.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::spin_algebra::{frame_operator, re, rotation_operator, Ket3, Mat3, SpinState, C64};
use crate::{Error, Result};

/// Zero-field splitting in Hz, used only when converting to physical units.
pub const ZERO_FIELD_SPLITTING_HZ: f64 = 2.87e9;

/// Largest splitting for which a pair of levels is treated as nearly degenerate.
pub const MAX_DEGENERATE_SPLITTING: f64 = 0.5;

/// Which two levels form the (nearly) degenerate subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DegeneratePair {
    /// `|+1⟩, |0⟩`, degenerate at ε = −1.
    PlusOneZero,
    /// `|−1⟩, |0⟩`, degenerate at ε = +1.
    MinusOneZero,
    /// `|+1⟩, |−1⟩`, degenerate at ε = 0.
    PlusMinus,
}

impl DegeneratePair {
    /// Basis indices of the pair, in the order used for 2×2 matrices.
    pub fn levels(self) -> [usize; 2] {
        match self {
            DegeneratePair::PlusOneZero => [0, 1],
            DegeneratePair::MinusOneZero => [2, 1],
            DegeneratePair::PlusMinus => [0, 2],
        }
    }

    /// The remaining, gapped level.
    pub fn outside_level(self) -> usize {
        let [a, b] = self.levels();
        3 - a - b
    }

    /// `+1` for ε = −1, `−1` for ε = +1.
    pub fn field_sign(self) -> Option<i32> {
        match self {
            DegeneratePair::PlusOneZero => Some(1),
            DegeneratePair::MinusOneZero => Some(-1),
            DegeneratePair::PlusMinus => None,
        }
    }

    /// The ε at which the pair is exactly degenerate.
    pub fn crossing_epsilon(self) -> f64 {
        match self {
            DegeneratePair::PlusOneZero => -1.0,
            DegeneratePair::MinusOneZero => 1.0,
            DegeneratePair::PlusMinus => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NvParams {
    /// `γB_z′ / D`
    pub epsilon: f64,
}

impl NvParams {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon }
    }

    /// Parameters near the `|+1⟩/|0⟩` crossing with splitting `Δ = 1 + ε`.
    pub fn from_delta(delta: f64) -> Self {
        Self {
            epsilon: delta - 1.0,
        }
    }

    pub fn zero_field() -> Self {
        Self { epsilon: 0.0 }
    }

    pub fn delta(&self) -> f64 {
        1.0 + self.epsilon
    }

    /// Body-frame energies of `(|+1⟩, |0⟩, |−1⟩)`.
    pub fn energies(&self) -> [f64; 3] {
        [1.0 + self.epsilon, 0.0, 1.0 - self.epsilon]
    }

    /// Splitting within `pair`.
    pub fn splitting(&self, pair: DegeneratePair) -> f64 {
        let e = self.energies();
        let [a, b] = pair.levels();
        e[a] - e[b]
    }

    /// The pair with the smallest splitting, provided it is at most
    /// [`MAX_DEGENERATE_SPLITTING`].
    pub fn degenerate_pair(&self) -> Result<DegeneratePair> {
        let best = [
            DegeneratePair::PlusOneZero,
            DegeneratePair::MinusOneZero,
            DegeneratePair::PlusMinus,
        ]
        .into_iter()
        .min_by(|a, b| {
            self.splitting(*a)
                .abs()
                .total_cmp(&self.splitting(*b).abs())
        })
        .expect("three candidates");
        if self.splitting(best).abs() > MAX_DEGENERATE_SPLITTING {
            return Err(Error::NotDegenerate(self.epsilon));
        }
        Ok(best)
    }
}

pub fn body_frame_hamiltonian(params: &NvParams) -> Mat3 {
    let [a, b, c] = params.energies();
    Mat3::from_diagonal(&Ket3::new(re(a), re(b), re(c)))
}

pub fn lab_frame_hamiltonian(theta: f64, phi: f64, params: &NvParams) -> Mat3 {
    let r = rotation_operator(theta, phi);
    r * body_frame_hamiltonian(params) * r.adjoint()
}

/// How eigenvector phases are chosen in [`instantaneous_frame`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FrameGauge {
    /// Columns of `e^{−iφSz} e^{−iθSy}`: smooth in `(θ, φ)` away from the poles
    /// and well defined inside a degenerate pair.
    #[default]
    Rotated,
    /// Numerical eigenvectors, sorted by energy, each rotated so its
    /// largest-magnitude component is real and positive.
    Pivot,
}

/// Instantaneous eigenbasis of the lab-frame Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct InstantaneousFrame {
    /// Eigenvectors as columns.
    pub vectors: Mat3,
    pub energies: [f64; 3],
}

impl InstantaneousFrame {
    pub fn vector(&self, i: usize) -> Ket3 {
        self.vectors.column(i).into_owned()
    }

    pub fn state(&self, i: usize) -> SpinState {
        SpinState::normalized(self.vector(i)).expect("frame vectors are unit")
    }
}

/// Eigenbasis of `H(θ, φ)`.
///
/// With [`FrameGauge::Rotated`] the columns are ordered like the body-frame basis
/// `(|+1⟩′, |0⟩′, |−1⟩′)` and carry the energies `(1+ε, 0, 1−ε)`. With
/// [`FrameGauge::Pivot`] they are sorted by ascending energy, which requires a
/// non-degenerate spectrum.
pub fn instantaneous_frame(
    theta: f64,
    phi: f64,
    params: &NvParams,
    gauge: FrameGauge,
) -> Result<InstantaneousFrame> {
    match gauge {
        FrameGauge::Rotated => Ok(InstantaneousFrame {
            vectors: frame_operator(theta, phi),
            energies: params.energies(),
        }),
        FrameGauge::Pivot => {
            let h = lab_frame_hamiltonian(theta, phi, params);
            let eig = SymmetricEigen::new((h + h.adjoint()) * re(0.5));
            let mut order = [0usize, 1, 2];
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let energies = order.map(|k| eig.eigenvalues[k]);
            let gap = (energies[1] - energies[0]).min(energies[2] - energies[1]);
            if gap < 1e-9 {
                return Err(Error::DegenerateSpectrum(gap));
            }
            let mut vectors = Mat3::zeros();
            for (col, &k) in order.iter().enumerate() {
                let v = pivot_gauge(&eig.eigenvectors.column(k).into_owned())?;
                vectors.set_column(col, &v);
            }
            Ok(InstantaneousFrame { vectors, energies })
        }
    }
}

/// Rotates the phase of `v` so its largest-magnitude component (lowest index on
/// ties) is real and positive.
pub fn pivot_gauge(v: &Ket3) -> Result<Ket3> {
    let mut pivot = 0;
    for i in 1..3 {
        if v[i].norm() > v[pivot].norm() {
            pivot = i;
        }
    }
    let mag = v[pivot].norm();
    if mag < 1e-10 {
        return Err(Error::GaugeFixing(mag));
    }
    let phase: C64 = v[pivot].conj() / mag;
    Ok(v * phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::{spin1_operators, MatrixChecks, I};
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn sorted_spectrum(h: &Mat3) -> [f64; 3] {
        let mut ev: Vec<f64> = SymmetricEigen::new(*h)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }

    #[test]
    fn zero_field_has_degenerate_plus_minus() {
        let h = body_frame_hamiltonian(&NvParams::zero_field());
        assert_eq!(
            h,
            Mat3::from_diagonal(&Ket3::new(re(1.0), re(0.0), re(1.0)))
        );
        assert_eq!(
            NvParams::zero_field().degenerate_pair(),
            Ok(DegeneratePair::PlusMinus)
        );
    }

    #[test]
    fn minus_one_field_makes_plus_one_and_zero_degenerate() {
        let p = NvParams::new(-1.0);
        let h = body_frame_hamiltonian(&p);
        assert_eq!(
            h,
            Mat3::from_diagonal(&Ket3::new(re(0.0), re(0.0), re(2.0)))
        );
        assert_eq!(p.degenerate_pair(), Ok(DegeneratePair::PlusOneZero));
        assert_eq!(
            NvParams::new(1.0).degenerate_pair(),
            Ok(DegeneratePair::MinusOneZero)
        );
    }

    #[test]
    fn small_delta_substitution() {
        let p = NvParams::from_delta(1e-4);
        assert!((p.epsilon - (-1.0 + 1e-4)).abs() < 1e-16);
        let e = p.energies();
        assert!((e[0] - 1e-4).abs() < 1e-15);
        assert_eq!(e[1], 0.0);
        assert!((e[2] - (2.0 - 1e-4)).abs() < 1e-15);
        assert!((p.delta() - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn far_from_crossings_is_rejected() {
        // ε = 0.5 sits between crossings: smallest gap is 0.5, still accepted
        assert!(NvParams::new(0.5).degenerate_pair().is_ok());
        assert_eq!(
            NvParams::new(3.0).degenerate_pair(),
            Err(Error::NotDegenerate(3.0))
        );
    }

    #[test]
    fn lab_frame_at_pole_equals_body_frame() {
        let p = NvParams::new(-0.7);
        let diff = lab_frame_hamiltonian(0.0, 2.1, &p) - body_frame_hamiltonian(&p);
        assert!(diff.max_abs() < 1e-15);
    }

    #[test]
    fn lab_frame_spectrum_at_degeneracy() {
        let h = lab_frame_hamiltonian(PI / 3.0, PI / 5.0, &NvParams::new(-1.0));
        let ev = sorted_spectrum(&h);
        for (got, want) in ev.iter().zip([0.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn lab_frame_matches_generator_form() {
        // H′ = Sz² + ε Sz rotated by R built from matrix exponentials
        let s = spin1_operators();
        let (theta, phi, eps) = (1.1, -0.4, -0.93);
        let hp = s.sz * s.sz + s.sz * re(eps);
        let r = crate::spin_algebra::expm3(&(s.sz * (-I * phi))).unwrap()
            * crate::spin_algebra::expm3(&(s.sy * (-I * theta))).unwrap()
            * crate::spin_algebra::expm3(&(s.sz * (I * phi))).unwrap();
        let want = r * hp * r.adjoint();
        let got = lab_frame_hamiltonian(theta, phi, &NvParams::new(eps));
        assert!((got - want).max_abs() < 1e-13);
    }

    #[test]
    fn rotated_frame_at_origin_is_body_basis() {
        let f = instantaneous_frame(0.0, 0.0, &NvParams::new(-1.0), FrameGauge::Rotated).unwrap();
        assert!((f.vectors - Mat3::identity()).max_abs() < 1e-15);
        assert_eq!(f.energies, [0.0, 0.0, 2.0]);
    }

    #[test]
    fn rotated_frame_first_vector_at_zero_azimuth() {
        let s = spin1_operators();
        let f =
            instantaneous_frame(PI / 3.0, 0.0, &NvParams::new(-1.0), FrameGauge::Rotated).unwrap();
        let want = crate::spin_algebra::expm3(&(s.sy * (-I * (PI / 3.0)))).unwrap()
            * SpinState::m(1).into_inner();
        assert!((f.vector(0) - want).norm() < 1e-14);
    }

    #[test]
    fn pivot_frame_diagonalizes() {
        let p = NvParams::new(-0.8);
        let (theta, phi) = (0.9, 2.5);
        let f = instantaneous_frame(theta, phi, &p, FrameGauge::Pivot).unwrap();
        let h = lab_frame_hamiltonian(theta, phi, &p);
        let d = f.vectors.adjoint() * h * f.vectors;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { f.energies[i] } else { 0.0 };
                assert!((d[(i, j)] - re(want)).norm() < 1e-12);
            }
            let v = f.vector(i);
            let pivot = (0..3).fold(0, |p, k| if v[k].norm() > v[p].norm() { k } else { p });
            assert!(v[pivot].im.abs() < 1e-15 && v[pivot].re > 0.0);
        }
        assert_eq!(f.energies.map(|e| (e * 1e9).round() / 1e9), [0.0, 0.2, 1.8]);
    }

    #[test]
    fn pivot_frame_refuses_degenerate_spectrum() {
        let err = instantaneous_frame(0.4, 0.1, &NvParams::new(-1.0), FrameGauge::Pivot);
        assert!(matches!(err, Err(Error::DegenerateSpectrum(_))));
    }

    #[test]
    fn pivot_gauge_rejects_zero_vector() {
        assert!(matches!(
            pivot_gauge(&Ket3::zeros()),
            Err(Error::GaugeFixing(_))
        ));
    }

    proptest! {
        #[test]
        fn spectrum_is_rotation_invariant(theta in 0.0..PI, phi in -7.0..7.0f64, eps in -2.0..2.0f64) {
            let h = lab_frame_hamiltonian(theta, phi, &NvParams::new(eps));
            prop_assert!(h.is_hermitian(1e-14));
            let mut want = NvParams::new(eps).energies();
            want.sort_by(f64::total_cmp);
            let got = sorted_spectrum(&h);
            for k in 0..3 {
                prop_assert!((got[k] - want[k]).abs() < 1e-12);
            }
            let tr: C64 = h.trace();
            prop_assert!((tr - re(2.0)).norm() < 1e-12);
        }

        #[test]
        fn hamiltonian_is_periodic_in_azimuth(theta in 0.0..PI, phi in -7.0..7.0f64, eps in -2.0..2.0f64) {
            let p = NvParams::new(eps);
            let d = lab_frame_hamiltonian(theta, phi + TAU, &p) - lab_frame_hamiltonian(theta, phi, &p);
            prop_assert!(d.max_abs() < 1e-12);
        }

        #[test]
        fn rotated_frame_is_orthonormal_eigenbasis(theta in 0.0..PI, phi in -7.0..7.0f64, eps in -2.0..2.0f64) {
            let p = NvParams::new(eps);
            let f = instantaneous_frame(theta, phi, &p, FrameGauge::Rotated).unwrap();
            prop_assert!(f.vectors.is_unitary(1e-12));
            let d = f.vectors.adjoint() * lab_frame_hamiltonian(theta, phi, &p) * f.vectors;
            let want = body_frame_hamiltonian(&p);
            prop_assert!((d - want).max_abs() < 1e-12);
        }
    }
}
