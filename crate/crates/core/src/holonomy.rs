//! Path-ordered Wilson lines `U = 𝒫 exp(−∫ A)`.
//!
//! Each segment is cut into `n` equal steps in its parameter. Step `k`
//! contributes `exp(−[A_θ Δθ_k + A_φ Δφ_k])` with the connection sampled at the
//! step midpoint and `Δθ_k, Δφ_k` the exact increments across the step. Later
//! steps and later segments multiply on the left. Every factor is the
//! exponential of an anti-Hermitian matrix, so the product is unitary to
//! rounding, and the scheme is second order in `1/n`.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::connection::ConnectionField;
use crate::path::{Segment, SpherePath};
use crate::spin_algebra::{c, cis, expm2, pauli_coefficients, re, Mat2, MatrixChecks, I};
use crate::{Error, Result};

pub const DEFAULT_STEPS: usize = 4096;

/// Unitarity required of every constructed [`Holonomy`].
pub const UNITARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Holonomy {
    matrix: Mat2,
    path_label: String,
    steps_used: usize,
}

impl Holonomy {
    pub fn new(matrix: Mat2, path_label: impl Into<String>, steps_used: usize) -> Result<Self> {
        if !matrix.all_finite() {
            return Err(Error::NonFinite);
        }
        let residual = matrix.unitarity_residual();
        if residual > UNITARITY_TOL {
            return Err(Error::NonUnitary(residual));
        }
        Ok(Self {
            matrix,
            path_label: path_label.into(),
            steps_used,
        })
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn path_label(&self) -> &str {
        &self.path_label
    }

    pub fn steps_used(&self) -> usize {
        self.steps_used
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.matrix.unitarity_residual()
    }

    /// `|U_ii|²`: probability of staying in pair level `i`.
    pub fn population(&self, i: usize) -> f64 {
        self.matrix[(i, i)].norm_sqr()
    }
}

/// Product integral over one segment.
pub fn segment_holonomy<C>(segment: &Segment, field: &C, n_steps: usize) -> Result<Mat2>
where
    C: ConnectionField + ?Sized,
{
    if n_steps == 0 {
        return Err(Error::InvalidConfig("n_steps must be at least 1".into()));
    }
    let n = n_steps as f64;
    let mut u = Mat2::identity();
    let mut prev = segment.point(0.0);
    for k in 0..n_steps {
        let next = segment.point((k + 1) as f64 / n);
        let mid = segment.point((k as f64 + 0.5) / n);
        let a = field.connection_at(mid)?;
        let step = expm2(&-a.one_form(next.theta - prev.theta, next.phi - prev.phi))?;
        u = step * u;
        prev = next;
    }
    Ok(u)
}

/// `𝒫 exp(−∫_path A)` with `n_steps` per segment.
pub fn wilson_line<C>(path: &SpherePath, field: &C, n_steps: usize) -> Result<Holonomy>
where
    C: ConnectionField + ?Sized,
{
    let mut u = Mat2::identity();
    for seg in path.segments() {
        u = segment_holonomy(seg, field, n_steps)? * u;
    }
    Holonomy::new(u, path.label(), n_steps * path.segments().len())
}

/// Meridian sweep through polar angle `Θ` on the `|+1⟩, |0⟩` pair:
/// a rotation by `Θ/√2`, independent of the azimuth.
pub fn closed_form_longitude(theta_total: f64) -> Holonomy {
    let (s, co) = (theta_total / SQRT_2).sin_cos();
    let m = Mat2::new(re(co), re(s), re(-s), re(co));
    Holonomy::new(m, format!("longitude closed form, Theta={theta_total}"), 0)
        .expect("rotation matrix is unitary")
}

/// Latitude `θ = π/3` swept through azimuth `Φ` on the `|+1⟩, |0⟩` pair.
pub fn closed_form_latitude_pi3(phi_total: f64) -> Holonomy {
    let r7 = 7f64.sqrt();
    let (s, co) = (r7 * phi_total / 4.0).sin_cos();
    let off = c(0.0, -(6.0f64 / 7.0).sqrt() * s);
    let m = Mat2::new(c(co, s / r7), off, off, c(co, -s / r7)) * cis(phi_total / 4.0);
    Holonomy::new(m, format!("latitude pi/3 closed form, Phi={phi_total}"), 0)
        .expect("closed form is unitary")
}

/// Unit Pauli-vector axis `n` of `U = e^{iα}(cos β + i sin β n·σ)`, choosing the
/// branch with `cos β ≥ 0`. `None` when `U` is (up to phase) the identity.
pub fn rotation_axis(u: &Mat2) -> Option<[f64; 3]> {
    let det = u.determinant();
    let mut phase = det.sqrt();
    let (a, b) = pauli_coefficients(u);
    if (a / phase).re < 0.0 {
        phase = -phase;
    }
    let v: Vec<f64> = b.iter().map(|bk| (bk / (phase * I)).re).collect();
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm < 1e-14 {
        return None;
    }
    Some([v[0] / norm, v[1] / norm, v[2] / norm])
}

/// `∮ cos θ dφ`, the phase of the zero-field holonomy `diag(e^{iΩ̃}, e^{−iΩ̃})`.
pub fn abelian_phase_integral(path: &SpherePath, n_steps: usize) -> f64 {
    let n = n_steps.max(1) as f64;
    path.segments()
        .iter()
        .map(|seg| {
            (0..n_steps.max(1))
                .map(|k| {
                    let (a, b) = (seg.point(k as f64 / n), seg.point((k + 1) as f64 / n));
                    seg.point((k as f64 + 0.5) / n).theta.cos() * (b.phi - a.phi)
                })
                .sum::<f64>()
        })
        .sum()
}

/// Largest deviation over the real and imaginary parts of all entries.
/// Suited to comparisons against values quoted to a fixed number of decimals.
pub fn max_component_deviation(a: &Mat2, b: &Mat2) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x.re - y.re).abs().max((x.im - y.im).abs()))
        .fold(0.0, f64::max)
}

/// Populations after running two loops in both orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    /// `|⟨i|U_B U_A|i⟩|²`: A first, then B.
    pub pop_ab: f64,
    /// `|⟨i|U_A U_B|i⟩|²`: B first, then A.
    pub pop_ba: f64,
    pub difference: f64,
}

impl Witness {
    pub fn from_matrices(u_a: &Mat2, u_b: &Mat2, initial: usize) -> Self {
        let pop_ab = (u_b * u_a)[(initial, initial)].norm_sqr();
        let pop_ba = (u_a * u_b)[(initial, initial)].norm_sqr();
        Self {
            pop_ab,
            pop_ba,
            difference: (pop_ab - pop_ba).abs(),
        }
    }
}

/// Non-commutativity witness for two paths with common endpoints.
///
/// `initial` indexes the pair basis (0 is `|+1⟩` for the default pair).
pub fn ordering_witness<C>(
    path_a: &SpherePath,
    path_b: &SpherePath,
    field: &C,
    n_steps: usize,
    initial: usize,
) -> Result<Witness>
where
    C: ConnectionField + ?Sized,
{
    if initial > 1 {
        return Err(Error::InvalidConfig(format!(
            "initial pair level {initial} must be 0 or 1"
        )));
    }
    let tol = crate::path::JOIN_TOL;
    let shared = path_a.start().same_orientation(&path_b.start(), tol)
        && path_a.end().same_orientation(&path_b.end(), tol);
    if !shared {
        return Err(Error::EndpointMismatch);
    }
    let u_a = wilson_line(path_a, field, n_steps)?;
    let u_b = wilson_line(path_b, field, n_steps)?;
    Ok(Witness::from_matrices(u_a.matrix(), u_b.matrix(), initial))
}
