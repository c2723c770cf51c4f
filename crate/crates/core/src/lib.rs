//! Exact charging dynamics of the central-spin quantum battery.
//!
//! `N_b` battery spins couple to `N_c` charger spins through a homogeneous
//! flip-flop interaction. Starting from the battery ground state and an
//! `m`-excitation Dicke state on the charger, the dynamics never leave a
//! `(min(N_b, m) + 1)`-dimensional invariant subspace. The crate builds the
//! tridiagonal Hamiltonian of that subspace ([`model`]), diagonalizes it
//! ([`eigen`]), evolves the state exactly ([`dynamics`]) and extracts charging
//! time, stored energy, power and collective advantage ([`analytics`]).
//!
//! [`oracle`] is an independent brute-force check that builds the full
//! `2^(N_b + N_c)`-dimensional Hamiltonian from single-site spin operators.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analytics;
pub mod dynamics;
pub mod eigen;
mod error;
pub mod model;
pub mod oracle;

pub use analytics::{
    analytic_charging_time, analytic_delta_e, charging_advantage, classify_regime, collapse_curve,
    find_charging_time, find_charging_time_with, scaling_fit, single_cell_power,
    su2_approximation_error, AnalyticPrediction, ChargingReport, CollapsePoint, DeltaELaw,
    PowerLawFit, Regime, RegimeClass, SearchOptions,
};
pub use dynamics::{
    efficiency, energy_stored, propagate, sample_trajectory, Amplitude, SpectralEvolution,
    StateVector, Trajectory,
};
pub use eigen::{decompose, EigenSystem};
pub use error::{Error, Result};
pub use model::{build_hamiltonian, coupling_element, ModelParams, TridiagonalHamiltonian};
