//! Charging-time detection, figures of merit and the closed-form regime
//! predictions they are checked against.

mod charging;
mod regime;
mod scaling;

pub use charging::{
    charging_advantage, default_window, find_charging_time, find_charging_time_with,
    single_cell_power, ChargingReport, SearchOptions, DEFAULT_GRID_POINTS, QUALIFYING_FRACTION,
    TIME_TOLERANCE,
};
pub use regime::{
    analytic_charging_time, analytic_delta_e, classify_regime, rabi_frequency,
    su2_approximation_error, AnalyticPrediction, DeltaELaw, Regime, RegimeClass, DEFAULT_THRESHOLD,
};
pub use scaling::{collapse_curve, scaling_fit, CollapsePoint, PowerLawFit};
