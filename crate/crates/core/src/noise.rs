//! Monte Carlo robustness: on-axis field noise and perturbed loop geometry.
//!
//! Every ensemble member draws from its own ChaCha8 stream, selected by member
//! index under the master seed, so results do not depend on thread scheduling.
//! Statistics are accumulated in member order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    evolve, evolve_populations, evolve_with_offsets, frame_populations, EvolutionConfig,
};
use crate::holonomy::abelian_phase_integral;
use crate::path::{Segment, SegmentKind, SpherePath};
use crate::spin_algebra::SpinState;
use crate::{Error, Result};

pub const DEFAULT_EVENTS: usize = 1000;
pub const DEFAULT_MEMBERS: usize = 50;

/// Fourier modes in a path perturbation.
pub const PERTURBATION_HARMONICS: usize = 5;

/// Grid used to locate the peak of a path perturbation.
const PEAK_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Standard deviation of the `ε` fluctuation, in units of `D`.
    pub sigma: f64,
    /// Number of equal intervals over which the fluctuation is held constant.
    pub n_events: usize,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Self {
        Self {
            sigma,
            n_events: DEFAULT_EVENTS,
            seed,
        }
    }

    pub fn with_events(mut self, n_events: usize) -> Self {
        self.n_events = n_events;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise sigma must be finite and non-negative, got {}",
                self.sigma
            )));
        }
        if self.n_events == 0 {
            return Err(Error::InvalidConfig("n_events must be at least 1".into()));
        }
        Ok(())
    }
}

/// Random stream of ensemble member `member`.
pub fn member_rng(seed: u64, member: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(member);
    rng
}

fn noise_offsets(spec: &NoiseSpec, member: u64) -> Vec<f64> {
    if spec.sigma == 0.0 {
        return vec![0.0; spec.n_events];
    }
    let mut rng = member_rng(spec.seed, member);
    (0..spec.n_events)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            spec.sigma * z
        })
        .collect()
}

/// One noisy run plus the extra `|+1⟩`–`|0⟩` dynamical phase the noise added.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyOutcome {
    pub state: SpinState,
    pub relative_phase: f64,
}

/// Evolution with `ε(s) = ε₀ + δε_k`, `δε_k ~ N(0, σ²)` redrawn on each of
/// `n_events` intervals. Uses the stream of member 0.
pub fn noisy_evolve(config: &EvolutionConfig, noise: &NoiseSpec) -> Result<SpinState> {
    Ok(noisy_member(config, noise, 0)?.state)
}

pub fn noisy_member(
    config: &EvolutionConfig,
    noise: &NoiseSpec,
    member: u64,
) -> Result<NoisyOutcome> {
    noise.validate()?;
    let offsets = noise_offsets(noise, member);
    let state = if noise.sigma == 0.0 {
        evolve(config)?
    } else {
        evolve_with_offsets(config, &offsets)?
    };
    let relative_phase = config.total_time * offsets.iter().sum::<f64>() / offsets.len() as f64;
    Ok(NoisyOutcome {
        state,
        relative_phase,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub n_members: usize,
    /// Rotated-frame populations `(|+1⟩, |0⟩, |−1⟩)` at the path end.
    pub mean_population: [f64; 3],
    /// Sample standard deviation.
    pub std_population: [f64; 3],
    pub relative_phase_mean: f64,
    pub relative_phase_std: f64,
    pub member_populations: Vec<[f64; 3]>,
}

/// Mean and sample standard deviation, shifted by the first value so identical
/// samples give that value and zero exactly.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let x0 = xs[0];
    let n = xs.len() as f64;
    let mean = x0 + xs.iter().map(|x| x - x0).sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn summarize(pops: Vec<[f64; 3]>, phases: &[f64]) -> EnsembleResult {
    let mut mean_population = [0.0; 3];
    let mut std_population = [0.0; 3];
    for j in 0..3 {
        let column: Vec<f64> = pops.iter().map(|p| p[j]).collect();
        (mean_population[j], std_population[j]) = mean_std(&column);
    }
    let (relative_phase_mean, relative_phase_std) = mean_std(phases);
    EnsembleResult {
        n_members: pops.len(),
        mean_population,
        std_population,
        relative_phase_mean,
        relative_phase_std,
        member_populations: pops,
    }
}

fn check_members(n_members: usize) -> Result<()> {
    if n_members < 2 {
        return Err(Error::InvalidConfig(format!(
            "an ensemble needs at least 2 members, got {n_members}"
        )));
    }
    Ok(())
}

pub fn ensemble_run(
    config: &EvolutionConfig,
    noise: &NoiseSpec,
    n_members: usize,
) -> Result<EnsembleResult> {
    check_members(n_members)?;
    config.validate()?;
    noise.validate()?;
    let end = config.path.end();
    let outcomes: Vec<NoisyOutcome> = (0..n_members as u64)
        .into_par_iter()
        .map(|m| noisy_member(config, noise, m))
        .collect::<Result<_>>()?;
    let pops = outcomes
        .iter()
        .map(|o| frame_populations(&o.state, end))
        .collect();
    let phases: Vec<f64> = outcomes.iter().map(|o| o.relative_phase).collect();
    Ok(summarize(pops, &phases))
}

/// `(θ₀, φ_start, φ_end)` of a single-latitude loop.
fn circle_parameters(path: &SpherePath) -> Result<(f64, f64, f64)> {
    match path.segments() {
        [Segment {
            kind:
                SegmentKind::Latitude {
                    theta,
                    phi_start,
                    phi_end,
                },
            ..
        }] => Ok((*theta, *phi_start, *phi_end)),
        _ => Err(Error::InvalidPath(
            "path perturbation needs a single latitude segment".into(),
        )),
    }
}

/// Harmonic amplitudes of a random polar perturbation
/// `δ(s) = Σ_{k=1}^{5} c_k sin(kπs)`, rescaled so that `max|δ|` over a dense
/// grid equals `max_divergence`. `δ` vanishes at both ends, so loops stay closed.
pub fn perturbation_harmonics(max_divergence: f64, seed: u64, member: u64) -> Vec<f64> {
    if max_divergence == 0.0 {
        return vec![0.0; PERTURBATION_HARMONICS];
    }
    let mut rng = member_rng(seed, member);
    let raw: Vec<f64> = (0..PERTURBATION_HARMONICS)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let peak = (0..=PEAK_GRID)
        .map(|i| {
            let s = i as f64 / PEAK_GRID as f64;
            raw.iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * s).sin())
                .sum::<f64>()
                .abs()
        })
        .fold(0.0, f64::max);
    raw.iter().map(|c| c * max_divergence / peak).collect()
}

fn perturbed_path(
    base: &SpherePath,
    max_divergence: f64,
    seed: u64,
    member: u64,
) -> Result<SpherePath> {
    if max_divergence == 0.0 {
        return Ok(base.clone());
    }
    let (theta, phi0, phi1) = circle_parameters(base)?;
    let harmonics = perturbation_harmonics(max_divergence, seed, member);
    SpherePath::with_label(
        vec![Segment::modulated(theta, phi0, phi1, harmonics)],
        format!("{} perturbed, member {member}", base.label()),
    )
}

fn check_divergence(max_divergence: f64) -> Result<()> {
    if !(max_divergence.is_finite() && max_divergence >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "max divergence must be finite and non-negative, got {max_divergence}"
        )));
    }
    Ok(())
}

/// Ensemble over randomly perturbed copies of the circle in `config.path`.
pub fn perturbed_path_study(
    config: &EvolutionConfig,
    max_divergence: f64,
    n_members: usize,
    seed: u64,
) -> Result<EnsembleResult> {
    check_members(n_members)?;
    check_divergence(max_divergence)?;
    config.validate()?;
    circle_parameters(&config.path)?;
    let pops: Vec<[f64; 3]> = (0..n_members as u64)
        .into_par_iter()
        .map(|m| {
            let mut member = config.clone();
            member.path = perturbed_path(&config.path, max_divergence, seed, m)?;
            evolve_populations(&member)
        })
        .collect::<Result<_>>()?;
    Ok(summarize(pops, &vec![0.0; n_members]))
}

/// The same perturbations read two ways: the degenerate pair's loop
/// population and the zero-field loop phase `∮cos θ dφ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelianContrast {
    /// Mean `|Δ|U₁₁|²|` of the degenerate-pair holonomy.
    pub non_abelian_population_shift: f64,
    /// Mean `|Δ|U₁₁|²|` of the zero-field holonomy; zero since it is diagonal.
    pub abelian_population_shift: f64,
    /// Mean `|ΔΩ̃|` of the zero-field loop phase.
    pub abelian_phase_shift: f64,
    /// Unperturbed `Ω̃`.
    pub abelian_phase: f64,
}

/// Compares perturbation sensitivity with and without the degeneracy, using
/// the adiabatic holonomies of the same perturbed loops as
/// [`perturbed_path_study`].
pub fn abelian_contrast(
    base: &SpherePath,
    max_divergence: f64,
    n_members: usize,
    seed: u64,
) -> Result<AbelianContrast> {
    use crate::connection::AnalyticConnection;
    use crate::holonomy::{wilson_line, DEFAULT_STEPS};

    check_members(n_members)?;
    check_divergence(max_divergence)?;
    circle_parameters(base)?;
    let reference =
        wilson_line(base, &AnalyticConnection::DEGENERATE, DEFAULT_STEPS)?.population(0);
    let zero_ref = wilson_line(base, &AnalyticConnection::ZERO_FIELD, DEFAULT_STEPS)?.population(0);
    let omega_ref = abelian_phase_integral(base, DEFAULT_STEPS);
    let shifts: Vec<[f64; 3]> = (0..n_members as u64)
        .into_par_iter()
        .map(|m| {
            let path = perturbed_path(base, max_divergence, seed, m)?;
            let na =
                wilson_line(&path, &AnalyticConnection::DEGENERATE, DEFAULT_STEPS)?.population(0);
            let ab =
                wilson_line(&path, &AnalyticConnection::ZERO_FIELD, DEFAULT_STEPS)?.population(0);
            let omega = abelian_phase_integral(&path, DEFAULT_STEPS);
            Ok([
                (na - reference).abs(),
                (ab - zero_ref).abs(),
                (omega - omega_ref).abs(),
            ])
        })
        .collect::<Result<_>>()?;
    let mean = |j: usize| shifts.iter().map(|s| s[j]).sum::<f64>() / n_members as f64;
    Ok(AbelianContrast {
        non_abelian_population_shift: mean(0),
        abelian_population_shift: mean(1),
        abelian_phase_shift: mean(2),
        abelian_phase: omega_ref,
    })
}
