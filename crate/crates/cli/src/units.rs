//! Conversions between the dimensionless core and laboratory units.
//!
//! Energies are in units of the zero-field splitting `D`, so one unit of time
//! is `1/D` and `ε = γB/D`.

use nvholo::hamiltonian::ZERO_FIELD_SPLITTING_HZ;

/// Electron gyromagnetic ratio, Hz per gauss.
pub const GYROMAGNETIC_HZ_PER_GAUSS: f64 = 2.8e6;

pub fn time_to_us(t: f64) -> f64 {
    t / ZERO_FIELD_SPLITTING_HZ * 1e6
}

pub fn us_to_time(us: f64) -> f64 {
    us * 1e-6 * ZERO_FIELD_SPLITTING_HZ
}

/// Field along the NV axis for a given `ε`.
pub fn epsilon_to_gauss(eps: f64) -> f64 {
    eps * ZERO_FIELD_SPLITTING_HZ / GYROMAGNETIC_HZ_PER_GAUSS
}

pub fn gauss_to_epsilon(gauss: f64) -> f64 {
    gauss * GYROMAGNETIC_HZ_PER_GAUSS / ZERO_FIELD_SPLITTING_HZ
}
