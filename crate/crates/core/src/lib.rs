//! Non-Abelian geometric phases of a rotating NV center.
//!
//! The crate works in normalized units: energies are measured in units of the
//! zero-field splitting `D`, times in units of `1/D`, and `ħ = 1`. Spin-1
//! vectors use the basis ordering `(|+1⟩, |0⟩, |−1⟩)` throughout.
//!
//! * [`spin_algebra`]: spin-1 operators, rotations and small matrix exponentials.
//! * [`hamiltonian`]: body- and lab-frame ground-state Hamiltonians.
//! * [`path`]: piecewise-smooth paths on the orientation sphere and their text format.
//! * [`connection`]: the Berry connection on a degenerate pair, analytic and numeric.
//! * [`holonomy`]: path-ordered Wilson lines and the ordering witness.
//! * [`dynamics`]: time-ordered Schrödinger evolution along a path.
//! * [`noise`]: field-noise and path-perturbation ensembles.
//! * [`gyro`]: gyroscope signal and sensitivity model.

pub mod connection;
pub mod dynamics;
pub mod error;
pub mod gyro;
pub mod hamiltonian;
pub mod holonomy;
pub mod noise;
pub mod path;
pub mod spin_algebra;

pub use error::{Error, Result};
