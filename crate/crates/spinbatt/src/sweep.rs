//! Parameter sweeps described by a JSON spec.
//!
//! ```json
//! {
//!   "axes": { "n_b": [50, 100], "ratio": [1, 2, 4] },
//!   "constraints": [
//!     { "target": "m", "source": "n_b" },
//!     { "target": "n_c", "source": "n_b", "factor": "ratio" }
//!   ],
//!   "outputs": ["n_c", "eta_max", "gamma"]
//! }
//! ```
//!
//! Axes are expanded as a Cartesian product, first axis slowest. Constraints
//! then run in order, each setting `target = round(factor * source)`, where
//! `factor` is a number or the name of a free axis. Rows come out in input
//! order whatever the worker count.

use std::io::{self, Write};

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Deserialize;
use spinbatt_core::analytics::DEFAULT_THRESHOLD;
use spinbatt_core::{
    find_charging_time_with, su2_approximation_error, ChargingReport, ModelParams, SearchOptions,
};

use crate::error::CliError;
use crate::format::fmt_sig;

const PARAM_AXES: [&str; 5] = ["n_b", "n_c", "m", "coupling", "omega"];
const COUNT_PARAMS: [&str; 3] = ["n_b", "n_c", "m"];

/// Report fields a sweep can emit.
pub const OUTPUT_FIELDS: [&str; 18] = [
    "n_b",
    "n_c",
    "m",
    "coupling",
    "omega",
    "k",
    "regime",
    "t_charge",
    "delta_e_max",
    "eta_max",
    "p_collective",
    "p_single",
    "p_parallel",
    "gamma",
    "t_analytic",
    "t_deviation",
    "su2_error",
    "window",
];

const DEFAULT_OUTPUTS: [&str; 4] = ["regime", "t_charge", "eta_max", "gamma"];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Factor {
    Value(f64),
    Axis(String),
}

impl Default for Factor {
    fn default() -> Self {
        Factor::Value(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub target: String,
    pub source: String,
    #[serde(default)]
    pub factor: Factor,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: IndexMap<String, Vec<f64>>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    #[serde(default)]
    pub outputs: Vec<String>,
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub threshold: Option<f64>,
}

/// One expanded parameter point: its swept coordinates and the model, or the
/// reason the point is invalid.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub coords: Vec<f64>,
    pub params: Result<ModelParams, String>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: SweepSpec = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("invalid sweep spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn outputs(&self) -> Vec<&str> {
        if self.outputs.is_empty() {
            DEFAULT_OUTPUTS.to_vec()
        } else {
            self.outputs.iter().map(String::as_str).collect()
        }
    }

    fn is_free_axis(&self, name: &str) -> bool {
        self.axes.contains_key(name) && !PARAM_AXES.contains(&name)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.axes.is_empty() {
            return usage("sweep spec has no axes".into());
        }
        if let Some((name, _)) = self.axes.iter().find(|(_, v)| v.is_empty()) {
            return usage(format!("axis `{name}` is empty"));
        }
        if let Some((name, _)) = self
            .axes
            .iter()
            .find(|(_, v)| v.iter().any(|x| !x.is_finite()))
        {
            return usage(format!("axis `{name}` has non-finite values"));
        }
        for c in &self.constraints {
            if !COUNT_PARAMS.contains(&c.target.as_str()) {
                return usage(format!(
                    "constraint target `{}` must be n_b, n_c or m",
                    c.target
                ));
            }
            if !COUNT_PARAMS.contains(&c.source.as_str()) {
                return usage(format!(
                    "constraint source `{}` must be n_b, n_c or m",
                    c.source
                ));
            }
            if self.axes.contains_key(&c.target) {
                return usage(format!(
                    "`{}` is both an axis and a constraint target",
                    c.target
                ));
            }
            if let Factor::Axis(name) = &c.factor {
                if !self.is_free_axis(name) {
                    return usage(format!("constraint factor `{name}` is not a free axis"));
                }
            }
        }
        for name in COUNT_PARAMS {
            let set =
                self.axes.contains_key(name) || self.constraints.iter().any(|c| c.target == name);
            if !set {
                return usage(format!(
                    "`{name}` is neither an axis nor a constraint target"
                ));
            }
        }
        if let Some(bad) = self
            .outputs
            .iter()
            .find(|o| !OUTPUT_FIELDS.contains(&o.as_str()))
        {
            return usage(format!(
                "unknown output `{bad}`; expected one of {}",
                OUTPUT_FIELDS.join(", ")
            ));
        }
        if let Some(t) = self.threshold {
            if !(t > 1.0 && t.is_finite()) {
                return usage(format!("threshold must be > 1, got {t}"));
            }
        }
        Ok(())
    }

    /// Cartesian product of the axes, first axis slowest.
    pub fn expand(&self) -> Vec<SweepPoint> {
        let sizes: Vec<usize> = self.axes.values().map(Vec::len).collect();
        let total: usize = sizes.iter().product();
        (0..total)
            .map(|mut index| {
                let mut coords = vec![0.0; sizes.len()];
                for (slot, (values, &size)) in self.axes.values().zip(&sizes).enumerate().rev() {
                    coords[slot] = values[index % size];
                    index /= size;
                }
                let params = self.resolve(&coords);
                SweepPoint { coords, params }
            })
            .collect()
    }

    fn resolve(&self, coords: &[f64]) -> Result<ModelParams, String> {
        let mut values: IndexMap<&str, f64> = self
            .axes
            .keys()
            .map(String::as_str)
            .zip(coords.iter().copied())
            .collect();
        for c in &self.constraints {
            let source = *values
                .get(c.source.as_str())
                .ok_or_else(|| format!("constraint source `{}` is not yet defined", c.source))?;
            let factor = match &c.factor {
                Factor::Value(f) => *f,
                Factor::Axis(name) => values[name.as_str()],
            };
            values.insert(c.target.as_str(), (factor * source).round());
        }
        let count = |name: &str| -> Result<u32, String> {
            let v = values[name];
            if v.fract() != 0.0 || v < 0.0 || v > f64::from(u32::MAX) {
                return Err(format!("{name} = {v} is not a non-negative integer"));
            }
            Ok(v as u32)
        };
        let energy = |name: &str| values.get(name).copied().unwrap_or(1.0);
        ModelParams::with_energies(
            count("n_b")?,
            count("n_c")?,
            count("m")?,
            energy("coupling"),
            energy("omega"),
        )
        .map_err(|e| e.to_string())
    }
}

/// One evaluated row.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub coords: Vec<f64>,
    pub result: Result<ChargingReport, String>,
}

/// Evaluates every point on a pool of `jobs` workers.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRow>, CliError> {
    let opts = SearchOptions {
        window: spec.window,
        threshold: spec.threshold.unwrap_or(DEFAULT_THRESHOLD),
        ..SearchOptions::default()
    };
    let points = spec.expand();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Numeric(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|point| SweepRow {
                coords: point.coords.clone(),
                result: point.params.clone().and_then(|params| {
                    find_charging_time_with(&params, &opts).map_err(|e| e.to_string())
                }),
            })
            .collect()
    }))
}

/// Formats one report field; empty when undefined.
pub fn field_value(report: &ChargingReport, field: &str) -> String {
    let params = &report.params;
    let opt = |x: Option<f64>| x.map(fmt_sig).unwrap_or_default();
    match field {
        "n_b" => params.n_b().to_string(),
        "n_c" => params.n_c().to_string(),
        "m" => params.m().to_string(),
        "coupling" => fmt_sig(params.coupling()),
        "omega" => fmt_sig(params.omega()),
        "k" => fmt_sig(report.prediction.regime.k),
        "regime" => report.prediction.regime.label.label().to_string(),
        "t_charge" => fmt_sig(report.t_charge_numeric),
        "delta_e_max" => fmt_sig(report.delta_e_max),
        "eta_max" => fmt_sig(report.eta_max),
        "p_collective" => fmt_sig(report.p_collective),
        "p_single" => opt(report.p_single),
        "p_parallel" => opt(report.p_parallel),
        "gamma" => opt(report.gamma),
        "t_analytic" => opt(report.prediction.t_charge),
        "t_deviation" => opt(report.t_deviation),
        "su2_error" => fmt_sig(su2_approximation_error(params)),
        "window" => fmt_sig(report.window),
        other => unreachable!("unvalidated output field {other}"),
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes the sweep table: swept axes, requested outputs, then `error`.
pub fn write_sweep_csv<W: Write>(
    out: &mut W,
    spec: &SweepSpec,
    rows: &[SweepRow],
) -> io::Result<()> {
    let outputs = spec.outputs();
    let mut header: Vec<&str> = spec.axes.keys().map(String::as_str).collect();
    header.extend(&outputs);
    header.push("error");
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let mut cells: Vec<String> = row.coords.iter().map(|&x| fmt_sig(x)).collect();
        match &row.result {
            Ok(report) => {
                cells.extend(outputs.iter().map(|f| field_value(report, f)));
                cells.push(String::new());
            }
            Err(msg) => {
                cells.extend(outputs.iter().map(|_| String::new()));
                cells.push(csv_cell(msg));
            }
        }
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
