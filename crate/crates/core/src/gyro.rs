//! Rotation-sensor signal and sensitivity model.
//!
//! A rotation at rate `ω` about the axis perpendicular to the NV axis carries
//! the degenerate pair around a meridian, so the population left in the start
//! state is `cos²(ωt/√2)`. With `N` centres, collection efficiency `η` and
//! contrast `R` the photon signal is `F = Nη(1 − R sin²(ωt/√2))`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::holonomy::closed_form_longitude;
use crate::{Error, Result};

/// Published sensitivity of an Abelian-phase diamond gyroscope, rad s⁻¹ Hz⁻¹ᐟ².
/// Its parameters are not reproduced here; it is a comparison figure only.
pub const ABELIAN_REFERENCE_SENSITIVITY: f64 = 5.4e-3;

/// Largest `|ωt|` accepted by [`holonomy_consistency_check`].
pub const MAX_ROTATION_ANGLE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GyroParams {
    /// `N`
    pub n_centers: f64,
    /// `η`
    pub collection_eff: f64,
    /// `R`
    pub contrast: f64,
    /// `T₁`, seconds
    pub t1: f64,
    /// `T₂*`, seconds
    pub t2_star: f64,
    /// Total measurement time `τ`, seconds
    pub tau: f64,
    /// Rotation rate, rad/s
    pub omega: f64,
    /// Evolution time, seconds
    pub t: f64,
}

impl GyroParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_centers", self.n_centers),
            ("collection_eff", self.collection_eff),
            ("contrast", self.contrast),
            ("t1", self.t1),
            ("t2_star", self.t2_star),
            ("tau", self.tau),
            ("t", self.t),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "omega must be finite, got {}",
                self.omega
            )));
        }
        if self.collection_eff > 1.0 || self.contrast > 1.0 {
            return Err(Error::InvalidConfig(
                "collection_eff and contrast must not exceed 1".into(),
            ));
        }
        if self.t2_star > self.t1 {
            return Err(Error::InvalidConfig(format!(
                "t2_star ({}) must not exceed t1 ({})",
                self.t2_star, self.t1
            )));
        }
        Ok(())
    }

    /// `α = √(2T₁/T₂*)`
    pub fn alpha(&self) -> f64 {
        (2.0 * self.t1 / self.t2_star).sqrt()
    }
}

/// `F = Nη(1 − R sin²(ωt/√2))`
pub fn signal(params: &GyroParams) -> Result<f64> {
    params.validate()?;
    Ok(signal_unchecked(params, params.omega * params.t))
}

fn signal_unchecked(p: &GyroParams, omega_t: f64) -> f64 {
    p.n_centers * p.collection_eff * (1.0 - p.contrast * (omega_t / SQRT_2).sin().powi(2))
}

/// `(ωt, F)` on `n_points` evenly spaced rotation angles in `[0, max_omega_t]`.
pub fn signal_curve(
    params: &GyroParams,
    max_omega_t: f64,
    n_points: usize,
) -> Result<Vec<(f64, f64)>> {
    params.validate()?;
    if n_points < 2 || !max_omega_t.is_finite() {
        return Err(Error::InvalidConfig(
            "signal curve needs at least 2 points over a finite range".into(),
        ));
    }
    Ok((0..n_points)
        .map(|i| {
            let x = max_omega_t * i as f64 / (n_points - 1) as f64;
            (x, signal_unchecked(params, x))
        })
        .collect())
}

/// `δω` with its derivation laid out step by step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sensitivity {
    pub alpha: f64,
    /// `1/(αR√(NηT₂*τ))`
    pub delta_omega: f64,
    /// The same expression with `α = 1`.
    pub abelian_delta_omega: f64,
    /// Signal slope `dF/dω = √2 NηR t` taken at `t = T₁`.
    pub slope_at_t1: f64,
    /// Photon shot noise `δF = √(Nη)`.
    pub shot_noise: f64,
    /// `δF / (dF/dω)` for a single run of length `T₁`.
    pub single_shot: f64,
    /// `τ / T₁`
    pub repetitions: f64,
    /// `single_shot / √repetitions`; equals `delta_omega`.
    pub chained: f64,
}

pub fn min_detectable_rotation(params: &GyroParams) -> Result<Sensitivity> {
    params.validate()?;
    let p = params;
    let n_eta = p.n_centers * p.collection_eff;
    let alpha = p.alpha();
    let abelian_delta_omega = 1.0 / (p.contrast * (n_eta * p.t2_star * p.tau).sqrt());
    let slope_at_t1 = SQRT_2 * n_eta * p.contrast * p.t1;
    let shot_noise = n_eta.sqrt();
    let single_shot = shot_noise / slope_at_t1;
    let repetitions = p.tau / p.t1;
    Ok(Sensitivity {
        alpha,
        delta_omega: abelian_delta_omega / alpha,
        abelian_delta_omega,
        slope_at_t1,
        shot_noise,
        single_shot,
        repetitions,
        chained: single_shot / repetitions.sqrt(),
    })
}

/// `|U₁₁|²` of the meridian holonomy swept through `ωt`.
pub fn holonomy_consistency_check(omega: f64, t: f64) -> Result<f64> {
    let angle = omega * t;
    if !angle.is_finite() || angle.abs() > MAX_ROTATION_ANGLE {
        return Err(Error::InvalidConfig(format!(
            "rotation angle omega*t = {angle} is out of range"
        )));
    }
    Ok(closed_form_longitude(angle).population(0))
}
