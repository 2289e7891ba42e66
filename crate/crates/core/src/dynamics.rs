//! Time-ordered Schrödinger evolution `i dψ/ds = T H(s) ψ` along a path.
//!
//! `s ∈ [0, 1]` is reduced time and `T` the total time in units of `1/D`. Each
//! step freezes the Hamiltonian at the step midpoint and applies its exact
//! exponential `W diag(e^{−iTΔs E_j}) W†`, so every step is unitary.

use rayon::prelude::*;
use serde::Serialize;

use crate::connection::AnalyticConnection;
use crate::hamiltonian::{DegeneratePair, NvParams};
use crate::holonomy::{wilson_line, Holonomy, DEFAULT_STEPS};
use crate::path::{SpherePath, SpherePoint};
use crate::spin_algebra::{cis, frame_operator, y_rotation, Ket3, Mat3, SpinState};
use crate::{Error, Result};

pub const MIN_STEPS: usize = 100;

/// Largest allowed `T/n`. Eigenvalues reach about 2, so this keeps the phase
/// per step below 0.2 rad.
pub const MAX_STEP: f64 = 0.1;

/// Step size used when the step count is left to [`default_steps`].
pub const DEFAULT_STEP: f64 = 0.05;

/// `max(MIN_STEPS, ⌈T / DEFAULT_STEP⌉)`
pub fn default_steps(total_time: f64) -> usize {
    ((total_time / DEFAULT_STEP).ceil() as usize).max(MIN_STEPS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub path: SpherePath,
    pub total_time: f64,
    pub params: NvParams,
    pub n_steps: usize,
    pub initial: SpinState,
}

impl EvolutionConfig {
    /// Default step count, starting in the rotated `|+1⟩` at the path start.
    pub fn new(path: SpherePath, total_time: f64, params: NvParams) -> Self {
        let initial = rotated_state(path.start(), 0);
        Self {
            path,
            total_time,
            params,
            n_steps: default_steps(total_time),
            initial,
        }
    }

    pub fn with_steps(mut self, n_steps: usize) -> Self {
        self.n_steps = n_steps;
        self
    }

    pub fn with_initial(mut self, initial: SpinState) -> Self {
        self.initial = initial;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_time.is_finite() && self.total_time > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "total time must be positive, got {}",
                self.total_time
            )));
        }
        if !self.params.epsilon.is_finite() {
            return Err(Error::NonFinite);
        }
        if self.n_steps < MIN_STEPS {
            return Err(Error::InvalidConfig(format!(
                "n_steps must be at least {MIN_STEPS}, got {}",
                self.n_steps
            )));
        }
        let h = self.total_time / self.n_steps as f64;
        if h > MAX_STEP {
            return Err(Error::StepStability(h));
        }
        Ok(())
    }
}

/// Rotated basis state `W(θ, φ)|i⟩`.
pub fn rotated_state(at: SpherePoint, index: usize) -> SpinState {
    let v = frame_operator(at.theta, at.phi).column(index).into_owned();
    SpinState::normalized(v).expect("frame columns are unit vectors")
}

pub fn evolve(config: &EvolutionConfig) -> Result<SpinState> {
    config.validate()?;
    Ok(propagate(config, &[0.0]))
}

/// Evolution with `ε` shifted by `offsets[k]` on the `k`-th of `offsets.len()`
/// equal intervals of reduced time.
pub(crate) fn evolve_with_offsets(config: &EvolutionConfig, offsets: &[f64]) -> Result<SpinState> {
    config.validate()?;
    if offsets.is_empty() {
        return Err(Error::InvalidConfig("offset schedule is empty".into()));
    }
    if offsets.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(propagate(config, offsets))
}

fn propagate(config: &EvolutionConfig, offsets: &[f64]) -> SpinState {
    let n = config.n_steps;
    let ds = 1.0 / n as f64;
    let tau = config.total_time * ds;
    let eps0 = config.params.epsilon;
    let m = offsets.len();
    let mut psi = *config.initial.amplitudes();
    for k in 0..n {
        let s = (k as f64 + 0.5) * ds;
        let eps = eps0 + offsets[((s * m as f64) as usize).min(m - 1)];
        let p = config.path.point_at(s);
        // W = Z(φ) Y(θ) with Z diagonal and Y real
        let z = [cis(-p.phi), cis(0.0), cis(p.phi)];
        let y = y_rotation(p.theta);
        let mut v = Ket3::new(z[0].conj() * psi[0], psi[1], z[2].conj() * psi[2]);
        v = y.transpose() * v;
        let energies = [1.0 + eps, 0.0, 1.0 - eps];
        for j in 0..3 {
            v[j] *= cis(-tau * energies[j]);
        }
        v = y * v;
        psi = Ket3::new(z[0] * v[0], v[1], z[2] * v[2]);
    }
    SpinState::normalized(psi).expect("unitary steps keep the state finite")
}

/// Populations of `(W|+1⟩, W|0⟩, W|−1⟩)` evaluated at `at`.
pub fn frame_populations(state: &SpinState, at: SpherePoint) -> [f64; 3] {
    state.populations_in(&rotated_frame(at))
}

fn rotated_frame(at: SpherePoint) -> Mat3 {
    frame_operator(at.theta, at.phi)
}

/// Evolves and reads out rotated-frame populations at the path end.
pub fn evolve_populations(config: &EvolutionConfig) -> Result<[f64; 3]> {
    let state = evolve(config)?;
    Ok(frame_populations(&state, config.path.end()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta: f64,
    pub total_time: f64,
    pub pop_p1: f64,
    pub pop_0: f64,
    pub pop_m1: f64,
}

/// Rotated-frame populations on the `deltas × times` grid, delta-major, each
/// point at its default step count.
pub fn degeneracy_sweep(deltas: &[f64], times: &[f64], path: &SpherePath) -> Result<Vec<SweepRow>> {
    if deltas.is_empty() || times.is_empty() {
        return Err(Error::InvalidConfig(
            "sweep needs at least one delta and one time".into(),
        ));
    }
    let grid: Vec<(f64, f64)> = deltas
        .iter()
        .flat_map(|&d| times.iter().map(move |&t| (d, t)))
        .collect();
    grid.par_iter()
        .map(|&(delta, total_time)| {
            let config =
                EvolutionConfig::new(path.clone(), total_time, NvParams::from_delta(delta));
            let [pop_p1, pop_0, pop_m1] = evolve_populations(&config)?;
            Ok(SweepRow {
                delta,
                total_time,
                pop_p1,
                pop_0,
                pop_m1,
            })
        })
        .collect()
}

/// Degenerate-adiabatic target: the Wilson line of the pair selected by the
/// field sign (`+1` for `|+1⟩, |0⟩`, `−1` for `|−1⟩, |0⟩`).
pub fn adiabatic_reference(path: &SpherePath, epsilon_sign: i32) -> Result<Holonomy> {
    let pair = match epsilon_sign {
        1 => DegeneratePair::PlusOneZero,
        -1 => DegeneratePair::MinusOneZero,
        other => {
            return Err(Error::InvalidConfig(format!(
                "field sign must be +1 or -1, got {other}"
            )))
        }
    };
    wilson_line(path, &AnalyticConnection::new(pair), DEFAULT_STEPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::lab_frame_hamiltonian;
    use crate::holonomy::closed_form_latitude_pi3;
    use crate::path::{circle, square, stationary};
    use crate::spin_algebra::{expm3, MatrixChecks, I};
    use std::f64::consts::{PI, TAU};

    /// Brute-force oracle: lab-frame Hamiltonian built from `R`, exponentiated
    /// by eigendecomposition at every step.
    fn brute_force(config: &EvolutionConfig) -> Ket3 {
        let n = config.n_steps;
        let mut psi = *config.initial.amplitudes();
        for k in 0..n {
            let p = config.path.point_at((k as f64 + 0.5) / n as f64);
            let h = lab_frame_hamiltonian(p.theta, p.phi, &config.params);
            let u = expm3(&(h * (-I * config.total_time / n as f64))).unwrap();
            psi = u * psi;
        }
        psi
    }

    #[test]
    fn matches_brute_force_oracle() {
        let config =
            EvolutionConfig::new(square(), 40.0, NvParams::from_delta(0.03)).with_steps(2000);
        let fast = evolve(&config).unwrap();
        let slow = brute_force(&config);
        assert!((fast.amplitudes() - slow).norm() < 1e-10);
    }

    #[test]
    fn stationary_path_keeps_eigenbasis_populations() {
        let at = SpherePoint::new(0.9, 0.4);
        let init = SpinState::normalized(Ket3::new(
            crate::spin_algebra::c(0.6, 0.1),
            crate::spin_algebra::c(0.0, 0.5),
            crate::spin_algebra::c(0.3, 0.0),
        ))
        .unwrap();
        let before = frame_populations(&init, at);
        let config = EvolutionConfig::new(stationary(0.9, 0.4), 500.0, NvParams::from_delta(0.2))
            .with_initial(init);
        let after = evolve_populations(&config).unwrap();
        for j in 0..3 {
            assert!((before[j] - after[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn norm_is_conserved() {
        let config = EvolutionConfig::new(circle(PI / 3.0), 2000.0, NvParams::from_delta(1e-3));
        assert!((evolve(&config).unwrap().norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn slow_degenerate_loop_follows_holonomy() {
        let config = EvolutionConfig::new(circle(PI / 3.0), 1e5, NvParams::from_delta(0.0));
        let pops = evolve_populations(&config).unwrap();
        let target = closed_form_latitude_pi3(TAU).population(0);
        assert!((pops[0] - target).abs() < 0.01, "{pops:?}");
        assert!(pops[2] < 1e-3);
    }

    #[test]
    fn split_levels_do_not_mix() {
        let config = EvolutionConfig::new(circle(PI / 3.0), 1e5, NvParams::from_delta(1e-2));
        assert!(evolve_populations(&config).unwrap()[0] >= 0.95);
    }

    #[test]
    fn doubling_steps_is_converged() {
        let base = EvolutionConfig::new(circle(PI / 3.0), 1e4, NvParams::from_delta(1e-5));
        let twice = base.clone().with_steps(2 * base.n_steps);
        let (a, b) = (
            evolve_populations(&base).unwrap(),
            evolve_populations(&twice).unwrap(),
        );
        for j in 0..3 {
            assert!((a[j] - b[j]).abs() < 1e-6, "{a:?} {b:?}");
        }
    }

    #[test]
    fn validation() {
        let ok = EvolutionConfig::new(circle(1.0), 100.0, NvParams::zero_field());
        assert!(ok.validate().is_ok());
        assert!(matches!(
            ok.clone().with_steps(50).validate(),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            ok.clone().with_steps(999).validate(),
            Err(Error::StepStability(_))
        ));
        let mut bad = ok.clone();
        bad.total_time = 0.0;
        assert!(matches!(evolve(&bad), Err(Error::InvalidConfig(_))));
        bad.total_time = f64::NAN;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_offsets_match_plain_evolution_bitwise() {
        let config = EvolutionConfig::new(square(), 300.0, NvParams::from_delta(0.0));
        let a = evolve(&config).unwrap();
        let b = evolve_with_offsets(&config, &[0.0; 17]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_order_and_values() {
        let path = square();
        let rows = degeneracy_sweep(&[0.0, 0.1], &[50.0, 80.0], &path).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.delta, r.total_time)).collect();
        assert_eq!(
            keys,
            vec![(0.0, 50.0), (0.0, 80.0), (0.1, 50.0), (0.1, 80.0)]
        );
        let direct =
            evolve_populations(&EvolutionConfig::new(path, 80.0, NvParams::from_delta(0.1)))
                .unwrap();
        assert_eq!(rows[3].pop_p1, direct[0]);
        assert!(degeneracy_sweep(&[], &[1.0], &square()).is_err());
    }

    #[test]
    fn adiabatic_reference_targets() {
        let circle_pop = adiabatic_reference(&circle(PI / 3.0), 1)
            .unwrap()
            .population(0);
        assert!((circle_pop - 0.380).abs() < 2.5e-3);
        let square_pop = adiabatic_reference(&square(), 1).unwrap().population(0);
        assert!((square_pop - 0.881).abs() < 5e-3);
        let still = adiabatic_reference(&stationary(1.0, 2.0), -1).unwrap();
        assert!((still.population(0) - 1.0).abs() < 1e-15);
        assert!(adiabatic_reference(&square(), 0).is_err());
        assert!(still.matrix().is_unitary(1e-12));
    }
}
