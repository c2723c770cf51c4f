//! Trajectory and report serialization.

use std::io::{self, Write};

use serde_json::{json, Map, Value};
use spinbatt_core::{su2_approximation_error, ChargingReport, ModelParams, Trajectory};

use crate::format::{fmt_sig, round_sig};

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn params_json(params: &ModelParams) -> Value {
    json!({
        "n_b": params.n_b(),
        "n_c": params.n_c(),
        "m": params.m(),
        "coupling": num(params.coupling()),
        "omega": num(params.omega()),
    })
}

/// CSV with columns `t,delta_e,eta[,p0..pd]`.
pub fn write_trajectory_csv<W: Write>(
    out: &mut W,
    trajectory: &Trajectory,
    populations: bool,
) -> io::Result<()> {
    let pops = trajectory.populations.as_ref().filter(|_| populations);
    let mut header = String::from("t,delta_e,eta");
    if pops.is_some() {
        for j in 0..trajectory.params.subspace_dim() {
            header.push_str(&format!(",p{j}"));
        }
    }
    writeln!(out, "{header}")?;
    for i in 0..trajectory.times.len() {
        let mut row = format!(
            "{},{},{}",
            fmt_sig(trajectory.times[i]),
            fmt_sig(trajectory.delta_e[i]),
            fmt_sig(trajectory.eta[i])
        );
        if let Some(pops) = pops {
            for p in &pops[i] {
                row.push(',');
                row.push_str(&fmt_sig(*p));
            }
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// JSON mirror of [`Trajectory`].
pub fn trajectory_json(trajectory: &Trajectory, populations: bool) -> Value {
    let list = |xs: &[f64]| Value::Array(xs.iter().map(|&x| num(x)).collect());
    let pops = match (&trajectory.populations, populations) {
        (Some(pops), true) => Value::Array(pops.iter().map(|row| list(row)).collect()),
        _ => Value::Null,
    };
    json!({
        "params": params_json(&trajectory.params),
        "times": list(&trajectory.times),
        "delta_e": list(&trajectory.delta_e),
        "eta": list(&trajectory.eta),
        "populations": pops,
    })
}

/// JSON form of a [`ChargingReport`]; undefined advantage fields are `null`.
pub fn report_json(report: &ChargingReport) -> Value {
    let pred = &report.prediction;
    let mut obj = Map::new();
    obj.insert("params".into(), params_json(&report.params));
    obj.insert("regime".into(), json!(pred.regime.label.label()));
    obj.insert("k".into(), num(pred.regime.k));
    obj.insert("ratio_threshold".into(), num(pred.regime.ratio_threshold));
    obj.insert("t_charge".into(), num(report.t_charge_numeric));
    obj.insert("delta_e_max".into(), num(report.delta_e_max));
    obj.insert("eta_max".into(), num(report.eta_max));
    obj.insert("p_collective".into(), num(report.p_collective));
    obj.insert("p_single".into(), opt(report.p_single));
    obj.insert("p_parallel".into(), opt(report.p_parallel));
    obj.insert("gamma".into(), opt(report.gamma));
    obj.insert("t_analytic".into(), opt(pred.t_charge));
    obj.insert("t_deviation".into(), opt(report.t_deviation));
    obj.insert("rabi_frequency".into(), opt(pred.rabi_frequency));
    obj.insert(
        "delta_e_law".into(),
        pred.delta_e_law.map_or(
            Value::Null,
            |law| json!({ "amplitude": num(law.amplitude), "frequency": num(law.frequency) }),
        ),
    );
    obj.insert(
        "optimal_storage_expected".into(),
        json!(pred.optimal_storage_expected),
    );
    obj.insert("su2_expected".into(), json!(pred.su2_expected));
    obj.insert(
        "su2_error".into(),
        num(su2_approximation_error(&report.params)),
    );
    obj.insert("window".into(), num(report.window));
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spinbatt_core::{find_charging_time, sample_trajectory};

    #[test]
    fn csv_layout() {
        let params = ModelParams::new(1, 1, 1).unwrap();
        let traj = sample_trajectory(&params, std::f64::consts::PI, 3, true).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,delta_e,eta,p0,p1");
        assert_eq!(lines.len(), 4);
        assert!(text.ends_with('\n'));
        assert!(lines[1].starts_with("0,0,0,1,0"));
        assert!(lines[2].starts_with("1.5707963267949,1,1,"));

        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj, false).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("t,delta_e,eta\n"));
    }

    #[test]
    fn json_report_has_nulls_for_undefined_advantage() {
        let report = find_charging_time(&ModelParams::new(400, 4, 4).unwrap(), None).unwrap();
        let v = report_json(&report);
        assert_eq!(v["regime"], "TC4");
        assert!(v["gamma"].is_null());
        assert!(v["t_analytic"].is_null());
        assert!(v["eta_max"].as_f64().unwrap() < 0.99);
    }
}
