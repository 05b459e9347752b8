//! Pulse synthesis and open-system benchmarking for nonadiabatic, noncyclic
//! geometric quantum gates.
//!
//! The crate is organised bottom-up:
//!
//! - [`path`]: auxiliary-state path parameterization, geometric and
//!   dynamical phase functionals, and the linear zero-dynamical-phase schedule.
//! - [`control`]: reverse-engineered detuning/drive fields, the resonant
//!   dynamical-gate baseline, and systematic-error injection.
//! - [`gates`]: analytic evolution operators, the named-gate parameter table
//!   and global-phase-invariant gate comparison.
//! - [`dynamics`]: fixed-step RK4 Schrödinger and Lindblad propagation.
//! - [`metrics`]: state fidelity, initial-state-averaged gate fidelities and
//!   the decoherence / systematic-error sweeps.
//! - [`transmon`]: three-level transmon with DRAG-corrected fields.
//! - [`two_qubit`]: parametrically modulated coupled transmons and the
//!   geometric controlled-phase gate.
//! - [`runner`]: manifest-driven experiment orchestration and CSV output.
//!
//! Units: time in microseconds, angular frequencies in rad/µs. A frequency
//! quoted as `2π × f MHz` is `2π·f` rad/µs; see [`units::mhz`].

pub mod control;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod metrics;
pub mod output;
pub mod path;
pub mod runner;
pub mod transmon;
pub mod two_qubit;
pub mod units;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix of runtime dimension.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector of runtime dimension.
pub type CVector = nalgebra::DVector<C64>;
