//! Asymptotic regimes and their closed-form predictions.

use core::f64::consts::PI;
use core::fmt;

use crate::error::{domain, Result};
use crate::model::{coupling_element, ModelParams};

/// Ratio used for `x << y` when none is given.
pub const DEFAULT_THRESHOLD: f64 = 10.0;

/// Parameter regime of a battery instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Regime {
    /// `N_b << m << N_c`
    #[cfg_attr(feature = "serde", serde(rename = "TC1"))]
    Tc1,
    /// `m << N_b << N_c`
    #[cfg_attr(feature = "serde", serde(rename = "TC2"))]
    Tc2,
    /// `m << N_c << N_b`
    #[cfg_attr(feature = "serde", serde(rename = "TC3"))]
    Tc3,
    /// `m = N_c << N_b`
    #[cfg_attr(feature = "serde", serde(rename = "TC4"))]
    Tc4,
    /// `N_b << m = k N_c` with `0 < k < 1`
    #[cfg_attr(feature = "serde", serde(rename = "NONTC_K"))]
    NonTcK,
    /// `m = N_c = N_b`
    #[cfg_attr(feature = "serde", serde(rename = "EQUAL"))]
    Equal,
    #[cfg_attr(feature = "serde", serde(rename = "GENERIC"))]
    Generic,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::Tc1 => "TC1",
            Regime::Tc2 => "TC2",
            Regime::Tc3 => "TC3",
            Regime::Tc4 => "TC4",
            Regime::NonTcK => "NONTC_K",
            Regime::Equal => "EQUAL",
            Regime::Generic => "GENERIC",
        }
    }

    /// Whether the regime reaches `eta(T) = 1` (asymptotically for `Equal`).
    pub fn optimal_storage(&self) -> bool {
        matches!(
            self,
            Regime::Tc1 | Regime::Tc2 | Regime::Tc3 | Regime::NonTcK | Regime::Equal
        )
    }

    /// Whether an SU(2) generator emerges in the dynamics.
    pub fn su2_symmetry(&self) -> bool {
        matches!(
            self,
            Regime::Tc1 | Regime::Tc2 | Regime::Tc3 | Regime::NonTcK
        )
    }

    pub fn has_analytic_time(&self) -> bool {
        self.su2_symmetry()
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classification of one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegimeClass {
    pub label: Regime,
    /// Charger filling `m / N_c`.
    pub k: f64,
    pub ratio_threshold: f64,
}

/// Classifies `params`; `a << b` means `b / a >= threshold`.
pub fn classify_regime(params: &ModelParams, threshold: f64) -> Result<RegimeClass> {
    if !(threshold > 1.0 && threshold.is_finite()) {
        return Err(domain!(
            "ratio threshold must be finite and > 1, got {threshold}"
        ));
    }
    let n_b = f64::from(params.n_b());
    let n_c = f64::from(params.n_c());
    let m = f64::from(params.m());
    let much_less = |a: f64, b: f64| b >= threshold * a;

    let label = if params.m() == params.n_c() && params.n_c() == params.n_b() {
        Regime::Equal
    } else if params.m() == params.n_c() && much_less(m, n_b) {
        Regime::Tc4
    } else if much_less(n_b, m) && much_less(m, n_c) {
        Regime::Tc1
    } else if much_less(m, n_b) && much_less(n_b, n_c) {
        Regime::Tc2
    } else if much_less(m, n_c) && much_less(n_c, n_b) {
        Regime::Tc3
    } else if much_less(n_b, m) && params.m() < params.n_c() {
        Regime::NonTcK
    } else {
        Regime::Generic
    };
    Ok(RegimeClass {
        label,
        k: params.filling(),
        ratio_threshold: threshold,
    })
}

/// `Delta E(t) = amplitude * (1 - cos(frequency * t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DeltaELaw {
    pub amplitude: f64,
    pub frequency: f64,
}

impl DeltaELaw {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (1.0 - libm::cos(self.frequency * t))
    }
}

/// Closed-form expectations for a classified point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AnalyticPrediction {
    pub regime: RegimeClass,
    pub t_charge: Option<f64>,
    pub rabi_frequency: Option<f64>,
    pub delta_e_law: Option<DeltaELaw>,
    pub optimal_storage_expected: bool,
    pub su2_expected: bool,
}

impl AnalyticPrediction {
    pub fn new(regime: RegimeClass, params: &ModelParams) -> Result<Self> {
        let label = regime.label;
        let rabi = match label {
            Regime::Tc3 | Regime::Tc4 => Some(rabi_frequency(params)),
            _ => None,
        };
        Ok(AnalyticPrediction {
            regime,
            t_charge: analytic_charging_time(&regime, params)?,
            rabi_frequency: rabi,
            delta_e_law: delta_e_law(&regime, params),
            optimal_storage_expected: label.optimal_storage(),
            su2_expected: label.su2_symmetry(),
        })
    }
}

/// Generalized Rabi frequency `2 A sqrt(N_c - (m - 1) / 2)`.
pub fn rabi_frequency(params: &ModelParams) -> f64 {
    let n_c = f64::from(params.n_c());
    let m = f64::from(params.m());
    2.0 * params.coupling() * libm::sqrt(n_c - (m - 1.0) / 2.0)
}

fn sqrt_checked(radicand: f64, what: &str) -> Result<f64> {
    if radicand > 0.0 {
        Ok(libm::sqrt(radicand))
    } else {
        Err(domain!("{what} radicand must be positive, got {radicand}"))
    }
}

/// Charging time predicted for the regime, `None` where only numerics exist.
pub fn analytic_charging_time(regime: &RegimeClass, params: &ModelParams) -> Result<Option<f64>> {
    let a = params.coupling();
    let n_b = f64::from(params.n_b());
    let n_c = f64::from(params.n_c());
    let m = f64::from(params.m());
    let t = match regime.label {
        Regime::Tc1 => {
            PI / (2.0 * a * libm::sqrt(n_c) * sqrt_checked(m - (n_b - 1.0) / 2.0, "TC1")?)
        }
        Regime::Tc2 => {
            PI / (2.0 * a * libm::sqrt(n_c) * sqrt_checked(n_b - (m - 1.0) / 2.0, "TC2")?)
        }
        Regime::Tc3 => {
            PI / (2.0 * a * libm::sqrt(n_b) * sqrt_checked(n_c - (m - 1.0) / 2.0, "TC3")?)
        }
        Regime::NonTcK => {
            let k = regime.k;
            PI / (2.0 * a * n_c * sqrt_checked(k * (1.0 - k), "k(1-k)")?)
        }
        Regime::Tc4 | Regime::Equal | Regime::Generic => return Ok(None),
    };
    Ok(Some(t))
}

fn delta_e_law(regime: &RegimeClass, params: &ModelParams) -> Option<DeltaELaw> {
    let omega = params.omega();
    match regime.label {
        Regime::Tc3 => Some(DeltaELaw {
            amplitude: f64::from(params.m()) * omega / 2.0,
            frequency: rabi_frequency(params) * libm::sqrt(f64::from(params.n_b())),
        }),
        Regime::NonTcK => {
            let k = regime.k;
            Some(DeltaELaw {
                amplitude: f64::from(params.n_b()) * omega / 2.0,
                frequency: 2.0
                    * params.coupling()
                    * libm::sqrt(k * (1.0 - k))
                    * f64::from(params.n_c()),
            })
        }
        _ => None,
    }
}

/// Cosine law for `Delta E(t)` in the TC3 and NONTC_K regimes.
pub fn analytic_delta_e(regime: &RegimeClass, params: &ModelParams, t: f64) -> Option<f64> {
    delta_e_law(regime, params).map(|law| law.eval(t))
}

/// Largest relative deviation of the exact off-diagonals from the scaled
/// spin-`m/2` generator `sqrt(N_b) * Omega * L^x`.
pub fn su2_approximation_error(params: &ModelParams) -> f64 {
    let scale = libm::sqrt(f64::from(params.n_b())) * rabi_frequency(params) / 2.0;
    let m = f64::from(params.m());
    (1..=params.max_transfer())
        .map(|j| {
            let u = coupling_element(params, j).expect("j within 1..=d");
            let jf = f64::from(j);
            let approx = scale * libm::sqrt(jf * (m - jf + 1.0));
            libm::fabs(u - approx) / u
        })
        .fold(0.0, f64::max)
}
