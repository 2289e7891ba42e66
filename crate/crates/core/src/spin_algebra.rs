//! Small dense complex linear algebra for spin-1 systems.
//!
//! Matrices are fixed-size `nalgebra` types. The three-level basis is ordered
//! `(|+1⟩, |0⟩, |−1⟩)` so that `Sz = diag(1, 0, −1)`.

use nalgebra::{Matrix2, Matrix3, SMatrix, SymmetricEigen, Vector2, Vector3};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat3 = Matrix3<C64>;
pub type Ket2 = Vector2<C64>;
pub type Ket3 = Vector3<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `e^{iθ}`
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::new(theta.cos(), theta.sin())
}

/// Structural predicates shared by the 2×2 and 3×3 matrices.
pub trait MatrixChecks {
    /// Largest entry modulus.
    fn max_abs(&self) -> f64;
    /// `‖M†M − I‖_max`
    fn unitarity_residual(&self) -> f64;
    /// `‖M + M†‖_max`
    fn anti_hermiticity_residual(&self) -> f64;
    /// `‖M − M†‖_max`
    fn hermiticity_residual(&self) -> f64;
    fn all_finite(&self) -> bool;

    fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }
    fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.anti_hermiticity_residual() <= tol
    }
    fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }
}

impl<const N: usize> MatrixChecks for SMatrix<C64, N, N> {
    fn max_abs(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn unitarity_residual(&self) -> f64 {
        (self.adjoint() * self - SMatrix::<C64, N, N>::identity()).max_abs()
    }

    fn anti_hermiticity_residual(&self) -> f64 {
        (self + self.adjoint()).max_abs()
    }

    fn hermiticity_residual(&self) -> f64 {
        (self - self.adjoint()).max_abs()
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Commutator `[a, b] = ab − ba`.
pub fn commutator<const N: usize>(
    a: &SMatrix<C64, N, N>,
    b: &SMatrix<C64, N, N>,
) -> SMatrix<C64, N, N> {
    a * b - b * a
}

/// Spin-1 angular momentum operators with `ħ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spin1Operators {
    pub sx: Mat3,
    pub sy: Mat3,
    pub sz: Mat3,
}

pub fn spin1_operators() -> Spin1Operators {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = re(0.0);
    let sx = Mat3::new(z, re(r), z, re(r), z, re(r), z, re(r), z);
    let sy = Mat3::new(z, c(0.0, -r), z, c(0.0, r), z, c(0.0, -r), z, c(0.0, r), z);
    let sz = Mat3::from_diagonal(&Ket3::new(re(1.0), z, re(-1.0)));
    Spin1Operators { sx, sy, sz }
}

/// Pauli decomposition `M = a·I + bx·σx + by·σy + bz·σz` with complex coefficients.
pub fn pauli_coefficients(m: &Mat2) -> (C64, [C64; 3]) {
    let a = (m[(0, 0)] + m[(1, 1)]) * re(0.5);
    let bx = (m[(0, 1)] + m[(1, 0)]) * re(0.5);
    let by = (m[(0, 1)] - m[(1, 0)]) * I * 0.5;
    let bz = (m[(0, 0)] - m[(1, 1)]) * re(0.5);
    (a, [bx, by, bz])
}

/// Closed-form exponential of a 2×2 matrix.
///
/// With `M = a·I + b·σ` and `λ² = b·b`, `e^M = e^a (cosh λ · I + sinh(λ)/λ · b·σ)`.
/// Both `cosh λ` and `sinh λ / λ` are even in `λ`, so the branch of the square
/// root does not matter.
pub fn expm2(m: &Mat2) -> Result<Mat2> {
    if !m.all_finite() {
        return Err(Error::NonFinite);
    }
    let (a, [bx, by, bz]) = pauli_coefficients(m);
    let lambda_sq = bx * bx + by * by + bz * bz;
    let (ch, sh_over) = if lambda_sq.norm() < 1e-8 {
        // series to beat cancellation in sinh(λ)/λ
        let l2 = lambda_sq;
        (
            re(1.0) + l2 / 2.0 + l2 * l2 / 24.0,
            re(1.0) + l2 / 6.0 + l2 * l2 / 120.0,
        )
    } else {
        let lambda = lambda_sq.sqrt();
        (lambda.cosh(), lambda.sinh() / lambda)
    };
    let scale = a.exp();
    let s = sh_over;
    Ok(Mat2::new(
        scale * (ch + s * bz),
        scale * s * (bx - I * by),
        scale * s * (bx + I * by),
        scale * (ch - s * bz),
    ))
}

/// Exponential of a 3×3 matrix.
///
/// Hermitian and anti-Hermitian arguments go through a unitary
/// diagonalization, which keeps `e^{−iHt}` unitary to machine precision.
/// Anything else falls back to scaling-and-squaring with a Padé approximant.
pub fn expm3(m: &Mat3) -> Result<Mat3> {
    if !m.all_finite() {
        return Err(Error::NonFinite);
    }
    let tol = 1e-14 * m.max_abs().max(1.0);
    if m.is_anti_hermitian(tol) {
        // M = iK with K Hermitian
        let k = m * (-I);
        let k = (k + k.adjoint()) * re(0.5);
        let eig = SymmetricEigen::new(k);
        let phases = eig.eigenvalues.map(cis);
        let v = eig.eigenvectors;
        Ok(v * Mat3::from_diagonal(&phases) * v.adjoint())
    } else if m.is_hermitian(tol) {
        let h = (m + m.adjoint()) * re(0.5);
        let eig = SymmetricEigen::new(h);
        let weights = eig.eigenvalues.map(|e| re(e.exp()));
        let v = eig.eigenvectors;
        Ok(v * Mat3::from_diagonal(&weights) * v.adjoint())
    } else {
        Ok(m.exp())
    }
}

/// `e^{−iφ Sz}` in closed form.
pub fn z_rotation(phi: f64) -> Mat3 {
    Mat3::from_diagonal(&Ket3::new(cis(-phi), re(1.0), cis(phi)))
}

/// `e^{−iθ Sy}`, the real spin-1 Wigner small-d matrix.
pub fn y_rotation(theta: f64) -> Mat3 {
    let (s, cth) = theta.sin_cos();
    let s = s * std::f64::consts::FRAC_1_SQRT_2;
    let p = 0.5 * (1.0 + cth);
    let q = 0.5 * (1.0 - cth);
    Mat3::new(
        re(p),
        re(-s),
        re(q),
        re(s),
        re(cth),
        re(-s),
        re(q),
        re(s),
        re(p),
    )
}

/// Orientation operator `R = e^{−iφSz} e^{−iθSy} e^{iφSz}` taking the NV axis `z′`
/// to the direction `(θ, φ)`.
pub fn rotation_operator(theta: f64, phi: f64) -> Mat3 {
    let phi = phi.rem_euclid(std::f64::consts::TAU);
    z_rotation(phi) * y_rotation(theta) * z_rotation(-phi)
}

/// `W = e^{−iφSz} e^{−iθSy}`.
///
/// `W` and [`rotation_operator`] differ by the diagonal factor `e^{−iφSz}` on the
/// right, which commutes with any body-frame Hamiltonian diagonal in `Sz`. The
/// columns of `W` are the rotated basis states in the gauge where the Berry
/// connection takes its standard textbook form.
pub fn frame_operator(theta: f64, phi: f64) -> Mat3 {
    z_rotation(phi) * y_rotation(theta)
}

/// Normalized three-level state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState(Ket3);

impl SpinState {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(amplitudes: Ket3) -> Result<Self> {
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self(amplitudes))
    }

    /// Rescales any non-zero vector onto the unit sphere.
    pub fn normalized(amplitudes: Ket3) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self(amplitudes / re(norm)))
    }

    /// Basis state by index: 0 → `|+1⟩`, 1 → `|0⟩`, 2 → `|−1⟩`.
    pub fn basis(index: usize) -> Self {
        assert!(index < 3, "spin-1 basis index out of range");
        let mut v = Ket3::zeros();
        v[index] = re(1.0);
        Self(v)
    }

    /// Basis state by magnetic quantum number.
    pub fn m(ms: i32) -> Self {
        Self::basis(ms_index(ms))
    }

    pub fn amplitudes(&self) -> &Ket3 {
        &self.0
    }

    pub fn into_inner(self) -> Ket3 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Populations in the fixed basis.
    pub fn populations(&self) -> [f64; 3] {
        [
            self.0[0].norm_sqr(),
            self.0[1].norm_sqr(),
            self.0[2].norm_sqr(),
        ]
    }

    /// Populations in the basis formed by the columns of `frame`.
    pub fn populations_in(&self, frame: &Mat3) -> [f64; 3] {
        let amps = frame.adjoint() * self.0;
        [amps[0].norm_sqr(), amps[1].norm_sqr(), amps[2].norm_sqr()]
    }
}

/// Index of `|m⟩` in the `(|+1⟩, |0⟩, |−1⟩)` ordering.
pub fn ms_index(ms: i32) -> usize {
    match ms {
        1 => 0,
        0 => 1,
        -1 => 2,
        _ => panic!("spin-1 has no m_s = {ms}"),
    }
}
