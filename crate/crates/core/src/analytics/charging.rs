//! Charging time, stored energy, power and collective advantage.

use core::f64::consts::PI;

use super::regime::{classify_regime, AnalyticPrediction, DEFAULT_THRESHOLD};
use crate::dynamics::SpectralEvolution;
use crate::error::{domain, Error, Result};
use crate::model::{build_hamiltonian, ModelParams};

/// Uniform samples scanned before refinement.
pub const DEFAULT_GRID_POINTS: usize = 2001;
/// A local maximum qualifies when it reaches this fraction of the window maximum.
pub const QUALIFYING_FRACTION: f64 = 0.999;
/// Relative width at which golden-section refinement stops.
pub const TIME_TOLERANCE: f64 = 1e-10;

/// Knobs for [`find_charging_time_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Search `(0, window]`; `None` uses [`default_window`].
    pub window: Option<f64>,
    /// Ratio used for `<<` when classifying the regime.
    pub threshold: f64,
    pub grid_points: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            window: None,
            threshold: DEFAULT_THRESHOLD,
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

/// Charging figures of merit for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ChargingReport {
    pub params: ModelParams,
    pub t_charge_numeric: f64,
    pub delta_e_max: f64,
    pub eta_max: f64,
    /// `Delta E(T) / T`.
    pub p_collective: f64,
    /// `None` when the parallel scheme is undefined (`m < N_b` or `N_c < N_b`).
    pub p_single: Option<f64>,
    pub p_parallel: Option<f64>,
    pub gamma: Option<f64>,
    pub prediction: AnalyticPrediction,
    /// `|T - T_analytic| / T_analytic`.
    pub t_deviation: Option<f64>,
    /// Grid neighbours of the selected maximum, the initial refinement bracket.
    pub bracket: (f64, f64),
    pub window: f64,
}

/// Single-cell power of the resource-matched parallel scheme,
/// `(2 omega A / pi) sqrt((m/N_b) (N_c/N_b - m/N_b + 1))`.
pub fn single_cell_power(params: &ModelParams) -> Result<f64> {
    if params.n_c() < params.n_b() || params.m() < params.n_b() {
        return Err(domain!(
            "advantage undefined: parallel charging needs n_c >= n_b and m >= n_b (n_b = {}, n_c = {}, m = {})",
            params.n_b(),
            params.n_c(),
            params.m()
        ));
    }
    let n_b = f64::from(params.n_b());
    let m_per = f64::from(params.m()) / n_b;
    let c_per = f64::from(params.n_c()) / n_b;
    Ok(2.0 * params.omega() * params.coupling() / PI * libm::sqrt(m_per * (c_per - m_per + 1.0)))
}

/// `Gamma = P_collective / (N_b * P_single)`.
pub fn charging_advantage(report: &ChargingReport) -> Result<f64> {
    let single = single_cell_power(&report.params)?;
    Ok(report.p_collective / (f64::from(report.params.n_b()) * single))
}

/// Search window used when none is given: four analytic charging times when a
/// closed form exists, otherwise `2 * sum_j 1 / u_j`. The first maximum of a
/// chain started at one end arrives after about one transit time
/// `sum_j 1 / u_j` (between 0.4x and 1.6x of it across all regimes).
pub fn default_window(params: &ModelParams, prediction: &AnalyticPrediction) -> f64 {
    if let Some(t) = prediction.t_charge {
        return 4.0 * t;
    }
    let transit: f64 = build_hamiltonian(params)
        .offdiag()
        .iter()
        .map(|u| 1.0 / u)
        .sum();
    2.0 * transit
}

/// Locates the charging time with default options and an optional window.
pub fn find_charging_time(params: &ModelParams, window: Option<f64>) -> Result<ChargingReport> {
    find_charging_time_with(
        params,
        &SearchOptions {
            window,
            ..SearchOptions::default()
        },
    )
}

/// Locates `T`, the first local maximum of `Delta E` in `(0, window]` whose
/// height reaches [`QUALIFYING_FRACTION`] of the grid maximum, and refines it.
pub fn find_charging_time_with(
    params: &ModelParams,
    opts: &SearchOptions,
) -> Result<ChargingReport> {
    if opts.grid_points < 3 {
        return Err(domain!(
            "grid needs at least 3 points, got {}",
            opts.grid_points
        ));
    }
    let regime = classify_regime(params, opts.threshold)?;
    let prediction = AnalyticPrediction::new(regime, params)?;
    let window = match opts.window {
        Some(w) if w.is_finite() && w > 0.0 => w,
        Some(w) => {
            return Err(domain!(
                "search window must be positive and finite, got {w}"
            ))
        }
        None => default_window(params, &prediction),
    };

    let evolution = SpectralEvolution::for_params(params)?;
    let last = (opts.grid_points - 1) as f64;
    let time = |i: usize| window * (i as f64) / last;
    let values: alloc::vec::Vec<f64> = (0..opts.grid_points)
        .map(|i| evolution.excitations(time(i)))
        .collect();
    let peak = values.iter().copied().fold(0.0, f64::max);
    let hit = (1..opts.grid_points - 1).find(|&i| {
        values[i] > values[i - 1]
            && values[i] >= values[i + 1]
            && values[i] >= QUALIFYING_FRACTION * peak
    });
    let Some(i) = hit else {
        return Err(Error::NoMaximum { window });
    };
    let bracket = (time(i - 1), time(i + 1));
    let t_charge = refine_maximum(&evolution, bracket.0, bracket.1);

    let delta_e_max = params.omega() * evolution.excitations(t_charge);
    let p_collective = delta_e_max / t_charge;
    let p_single = single_cell_power(params).ok();
    let p_parallel = p_single.map(|p| f64::from(params.n_b()) * p);
    Ok(ChargingReport {
        params: *params,
        t_charge_numeric: t_charge,
        delta_e_max,
        eta_max: delta_e_max / params.optimal_energy(),
        p_collective,
        p_single,
        p_parallel,
        gamma: p_parallel.map(|p| p_collective / p),
        t_deviation: prediction.t_charge.map(|ta| libm::fabs(t_charge - ta) / ta),
        prediction,
        bracket,
        window,
    })
}

/// Golden-section search for the maximum of the mean excitation number on
/// `[lo, hi]`. Once the two probes are equal to rounding, the sign of the
/// exact time derivative decides which side to keep.
fn refine_maximum(evolution: &SpectralEvolution, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let f = |t: f64| evolution.excitations(t);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= TIME_TOLERANCE * 0.5 * (lo.abs() + hi.abs()) {
            break;
        }
        let keep_left = if libm::fabs(f1 - f2) <= 8.0 * f64::EPSILON * f1.max(f2) {
            evolution.excitations_with_rate(0.5 * (x1 + x2)).1 < 0.0
        } else {
            f1 > f2
        };
        if keep_left {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}
