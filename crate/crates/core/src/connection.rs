//! Berry connection `A_{ab,α} = ⟨a|∂_α b⟩` on a degenerate pair.
//!
//! `A = A_θ dθ + A_φ dφ` with 2×2 anti-Hermitian coefficients. The pair basis is
//! the rotated body-frame pair `W(θ, φ)|m⟩` (see
//! [`frame_operator`](crate::spin_algebra::frame_operator)), in which the
//! closed forms below hold.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::hamiltonian::{instantaneous_frame, DegeneratePair, FrameGauge, NvParams};
use crate::path::SpherePoint;
use crate::spin_algebra::{c, re, Ket3, Mat2, MatrixChecks};
use crate::{Error, Result};

/// Closest approach to a pole for which the `φ` derivative of the frame is used.
pub const POLE_GUARD: f64 = 1e-6;

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connection {
    pub a_theta: Mat2,
    pub a_phi: Mat2,
    pub basis: DegeneratePair,
}

impl Connection {
    /// `A_θ dθ + A_φ dφ`
    pub fn one_form(&self, dtheta: f64, dphi: f64) -> Mat2 {
        self.a_theta * re(dtheta) + self.a_phi * re(dphi)
    }

    /// Connection seen from the frame `|a′⟩ = Σ_b |b⟩ V_ba` for a constant unitary
    /// `V`: `A′ = V† A V`.
    pub fn gauge_transform(&self, v: &Mat2) -> Connection {
        Connection {
            a_theta: v.adjoint() * self.a_theta * v,
            a_phi: v.adjoint() * self.a_phi * v,
            basis: self.basis,
        }
    }

    pub fn anti_hermiticity_residual(&self) -> f64 {
        self.a_theta
            .anti_hermiticity_residual()
            .max(self.a_phi.anti_hermiticity_residual())
    }

    /// Largest entry difference over both coefficients.
    pub fn max_diff(&self, other: &Connection) -> f64 {
        (self.a_theta - other.a_theta)
            .max_abs()
            .max((self.a_phi - other.a_phi).max_abs())
    }
}

/// Zero field, `{|+1⟩, |−1⟩}` pair: `A_θ = 0`, `A_φ = diag(−i cosθ, i cosθ)`.
pub fn analytic_connection_zero_field(theta: f64) -> Connection {
    let ct = theta.cos();
    Connection {
        a_theta: Mat2::zeros(),
        a_phi: Mat2::new(c(0.0, -ct), re(0.0), re(0.0), c(0.0, ct)),
        basis: DegeneratePair::PlusMinus,
    }
}

/// `ε = ∓1`, `{|±1⟩, |0⟩}` pair.
///
/// `sign = +1` is the `ε = −1` crossing (`|+1⟩, |0⟩`), `sign = −1` the `ε = +1`
/// crossing (`|−1⟩, |0⟩`):
///
/// ```text
/// A_φ = [[∓i cosθ, i sinθ/√2], [i sinθ/√2, 0]]
/// A_θ = [[0, ∓1/√2], [±1/√2, 0]]
/// ```
///
/// Panics if `sign` is zero.
pub fn analytic_connection_degenerate(theta: f64, sign: i32) -> Connection {
    assert!(sign != 0, "sign must be +1 or -1");
    let sg = sign.signum() as f64;
    let (st, ct) = theta.sin_cos();
    let off = st * FRAC_1_SQRT_2;
    Connection {
        a_theta: Mat2::new(
            re(0.0),
            re(-sg * FRAC_1_SQRT_2),
            re(sg * FRAC_1_SQRT_2),
            re(0.0),
        ),
        a_phi: Mat2::new(c(0.0, -sg * ct), c(0.0, off), c(0.0, off), re(0.0)),
        basis: if sign > 0 {
            DegeneratePair::PlusOneZero
        } else {
            DegeneratePair::MinusOneZero
        },
    }
}

/// Central-difference estimate of `⟨a|∂_α b⟩` from the rotated frame.
///
/// The pair is whichever one `params` is closest to degeneracy for.
pub fn numeric_connection(theta: f64, phi: f64, params: &NvParams, h: f64) -> Result<Connection> {
    if !(h > 0.0 && h <= 1e-2) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step {h} outside (0, 1e-2]"
        )));
    }
    if theta.abs() < POLE_GUARD || (theta - PI).abs() < POLE_GUARD {
        return Err(Error::PoleProximity(theta));
    }
    let pair = params.degenerate_pair()?;
    let [ia, ib] = pair.levels();
    let vectors = |t: f64, p: f64| -> Result<[Ket3; 2]> {
        let f = instantaneous_frame(t, p, params, FrameGauge::Rotated)?;
        Ok([f.vector(ia), f.vector(ib)])
    };
    let here = vectors(theta, phi)?;
    let derivative = |plus: [Ket3; 2], minus: [Ket3; 2]| -> Mat2 {
        let d = [
            (plus[0] - minus[0]) / re(2.0 * h),
            (plus[1] - minus[1]) / re(2.0 * h),
        ];
        Mat2::from_fn(|a, b| here[a].dotc(&d[b]))
    };
    let a_theta = derivative(vectors(theta + h, phi)?, vectors(theta - h, phi)?);
    let a_phi = derivative(vectors(theta, phi + h)?, vectors(theta, phi - h)?);
    Ok(Connection {
        a_theta,
        a_phi,
        basis: pair,
    })
}

/// Anything that yields a connection at a point of the sphere.
pub trait ConnectionField: Sync {
    fn connection_at(&self, point: SpherePoint) -> Result<Connection>;

    fn describe(&self) -> String;
}

/// Closed-form connection for one of the three degenerate pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyticConnection {
    pub pair: DegeneratePair,
}

impl AnalyticConnection {
    /// The `|+1⟩, |0⟩` pair at `ε = −1`, used by all default experiments.
    pub const DEGENERATE: Self = Self {
        pair: DegeneratePair::PlusOneZero,
    };
    pub const ZERO_FIELD: Self = Self {
        pair: DegeneratePair::PlusMinus,
    };

    pub fn new(pair: DegeneratePair) -> Self {
        Self { pair }
    }
}

impl ConnectionField for AnalyticConnection {
    fn connection_at(&self, point: SpherePoint) -> Result<Connection> {
        Ok(match self.pair {
            DegeneratePair::PlusOneZero => analytic_connection_degenerate(point.theta, 1),
            DegeneratePair::MinusOneZero => analytic_connection_degenerate(point.theta, -1),
            DegeneratePair::PlusMinus => analytic_connection_zero_field(point.theta),
        })
    }

    fn describe(&self) -> String {
        format!("analytic({:?})", self.pair)
    }
}

/// Finite-difference connection of the rotated frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericConnection {
    pub params: NvParams,
    pub step: f64,
}

impl NumericConnection {
    pub fn new(params: NvParams) -> Self {
        Self {
            params,
            step: DEFAULT_FD_STEP,
        }
    }
}

impl ConnectionField for NumericConnection {
    fn connection_at(&self, point: SpherePoint) -> Result<Connection> {
        numeric_connection(point.theta, point.phi, &self.params, self.step)
    }

    fn describe(&self) -> String {
        format!(
            "numeric(epsilon={}, h={:e})",
            self.params.epsilon, self.step
        )
    }
}

/// Another field viewed through a constant change of frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugedConnection<C> {
    pub inner: C,
    pub v: Mat2,
}

impl<C: ConnectionField> ConnectionField for GaugedConnection<C> {
    fn connection_at(&self, point: SpherePoint) -> Result<Connection> {
        Ok(self.inner.connection_at(point)?.gauge_transform(&self.v))
    }

    fn describe(&self) -> String {
        format!("gauged({})", self.inner.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::commutator;
    use std::f64::consts::SQRT_2;

    #[test]
    fn zero_field_examples() {
        assert!(analytic_connection_zero_field(PI / 2.0).a_phi.max_abs() < 1e-16);
        let a0 = analytic_connection_zero_field(0.0).a_phi;
        assert_eq!(a0, Mat2::new(c(0.0, -1.0), re(0.0), re(0.0), c(0.0, 1.0)));
        let a3 = analytic_connection_zero_field(PI / 3.0).a_phi;
        assert!((a3 - Mat2::new(c(0.0, -0.5), re(0.0), re(0.0), c(0.0, 0.5))).max_abs() < 1e-15);
    }

    #[test]
    fn degenerate_examples() {
        let a = analytic_connection_degenerate(PI / 3.0, 1);
        assert!((a.a_phi[(0, 0)] - c(0.0, -0.5)).norm() < 1e-15);
        assert!((a.a_phi[(0, 1)] - c(0.0, 3f64.sqrt() / (2.0 * SQRT_2))).norm() < 1e-15);
        let at_pole = analytic_connection_degenerate(0.0, 1);
        assert_eq!(at_pole.a_phi[(0, 1)], re(0.0));
        assert_eq!(at_pole.a_phi[(1, 0)], re(0.0));
        assert_eq!(at_pole.a_theta, a.a_theta);
        for sign in [1, -1] {
            for theta in [0.0, 0.4, 1.9, PI] {
                let a = analytic_connection_degenerate(theta, sign);
                assert_eq!(a.a_theta + a.a_theta.adjoint(), Mat2::zeros());
                assert!(a.anti_hermiticity_residual() < 1e-15);
            }
        }
    }

    #[test]
    #[should_panic]
    fn zero_sign_panics() {
        analytic_connection_degenerate(1.0, 0);
    }

    #[test]
    fn numeric_matches_analytic_at_reference_point() {
        let num = numeric_connection(PI / 3.0, 0.7, &NvParams::new(-1.0), 1e-4).unwrap();
        let ana = analytic_connection_degenerate(PI / 3.0, 1);
        assert!(num.max_diff(&ana) < 1e-7, "diff = {:e}", num.max_diff(&ana));
        assert_eq!(num.basis, DegeneratePair::PlusOneZero);
    }

    #[test]
    fn numeric_converges_at_second_order() {
        let params = NvParams::new(-1.0);
        let ana = analytic_connection_degenerate(1.1, 1);
        let e1 = numeric_connection(1.1, 0.3, &params, 1e-2)
            .unwrap()
            .max_diff(&ana);
        let e2 = numeric_connection(1.1, 0.3, &params, 5e-3)
            .unwrap()
            .max_diff(&ana);
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "order = {order}");
    }

    #[test]
    fn zero_field_numeric_is_diagonal() {
        let num = numeric_connection(0.8, 2.0, &NvParams::zero_field(), 1e-4).unwrap();
        assert_eq!(num.basis, DegeneratePair::PlusMinus);
        for (a, b) in [(0, 1), (1, 0)] {
            assert!(num.a_theta[(a, b)].norm() < 1e-7);
            assert!(num.a_phi[(a, b)].norm() < 1e-7);
        }
    }

    #[test]
    fn numeric_refuses_poles_and_bad_steps() {
        let p = NvParams::new(-1.0);
        assert_eq!(
            numeric_connection(1e-7, 0.0, &p, 1e-4),
            Err(Error::PoleProximity(1e-7))
        );
        assert!(matches!(
            numeric_connection(PI - 1e-8, 0.0, &p, 1e-4),
            Err(Error::PoleProximity(_))
        ));
        assert!(matches!(
            numeric_connection(1.0, 0.0, &p, 0.0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            numeric_connection(1.0, 0.0, &p, 0.1),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            numeric_connection(1.0, 0.0, &NvParams::new(5.0), 1e-4),
            Err(Error::NotDegenerate(_))
        ));
    }

    #[test]
    fn numeric_a_theta_is_azimuth_independent() {
        let p = NvParams::new(-1.0);
        let reference = numeric_connection(1.2, 0.0, &p, 1e-4).unwrap().a_theta;
        for k in 0..20 {
            let phi = -3.0 + 0.31 * k as f64;
            let a = numeric_connection(1.2, phi, &p, 1e-4).unwrap().a_theta;
            assert!((a - reference).max_abs() < 1e-7);
        }
    }

    #[test]
    fn numeric_is_anti_hermitian() {
        for (theta, phi, eps) in [(0.3, 0.1, -1.0), (2.5, -1.0, 1.0), (1.0, 4.0, 0.0)] {
            let a = numeric_connection(theta, phi, &NvParams::new(eps), 1e-4).unwrap();
            assert!(a.anti_hermiticity_residual() < 1e-6);
        }
    }

    #[test]
    fn zero_field_coefficients_commute() {
        for (t1, t2) in [(0.1, 2.0), (1.0, 1.5), (0.0, PI)] {
            let a = analytic_connection_zero_field(t1).a_phi;
            let b = analytic_connection_zero_field(t2).a_phi;
            assert_eq!(commutator(&a, &b), Mat2::zeros());
        }
    }

    #[test]
    fn gauge_transform_round_trips() {
        let v = crate::spin_algebra::expm2(&Mat2::new(
            c(0.0, 0.3),
            c(0.2, 0.1),
            c(-0.2, 0.1),
            c(0.0, -0.7),
        ))
        .unwrap();
        let a = analytic_connection_degenerate(0.9, 1);
        let back = a.gauge_transform(&v).gauge_transform(&v.adjoint());
        assert!(back.max_diff(&a) < 1e-15);
        assert!(a.gauge_transform(&v).anti_hermiticity_residual() < 1e-15);
    }
}
