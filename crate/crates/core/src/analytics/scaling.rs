//! Power-law fits and collapse curves.

use alloc::vec::Vec;

use super::charging::find_charging_time;
use crate::error::{domain, Error, Result};
use crate::model::ModelParams;

/// `gamma ~ prefactor * n^exponent`, fitted in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln n, ln gamma)`.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Fit(alloc::format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, g)) = points
        .iter()
        .find(|(n, g)| !(*n > 0.0 && *g > 0.0 && n.is_finite() && g.is_finite()))
    {
        return Err(Error::Fit(alloc::format!(
            "points must be positive and finite, got ({n}, {g})"
        )));
    }
    let len = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(n, _)| libm::log(*n)).collect();
    let ys: Vec<f64> = points.iter().map(|(_, g)| libm::log(*g)).collect();
    let x_mean = xs.iter().sum::<f64>() / len;
    let y_mean = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let syy: f64 = ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum();
    if sxx <= 1e-12 * xs.iter().map(|x| x * x).sum::<f64>().max(1.0) {
        return Err(Error::Fit("abscissae are degenerate".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    // A perfectly constant response is a perfect fit.
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: libm::exp(intercept),
        r_squared,
    })
}

/// `eta(T)` at one charger-to-battery ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CollapsePoint {
    pub ratio: f64,
    pub n_c: u32,
    pub eta_max: f64,
}

/// `eta(T)` against `N_c / N_b` at fixed `N_b`, with `N_c = round(ratio * N_b)`.
///
/// `m_equals_n_b` selects the family: `m = N_b` when true, `m = N_c` otherwise.
pub fn collapse_curve(n_b: u32, m_equals_n_b: bool, ratios: &[f64]) -> Result<Vec<CollapsePoint>> {
    ratios
        .iter()
        .map(|&ratio| {
            if !(ratio >= 1.0 && ratio.is_finite()) {
                return Err(domain!("ratio must be finite and >= 1, got {ratio}"));
            }
            let n_c = libm::round(ratio * f64::from(n_b));
            if n_c > f64::from(u32::MAX) {
                return Err(domain!("charger size {n_c} overflows"));
            }
            let n_c = n_c as u32;
            let m = if m_equals_n_b { n_b } else { n_c };
            let report = find_charging_time(&ModelParams::new(n_b, n_c, m)?, None)?;
            Ok(CollapsePoint {
                ratio,
                n_c,
                eta_max: report.eta_max,
            })
        })
        .collect()
}
