//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
#![allow(clippy::needless_range_loop)]

#[allow(dead_code)]
#[path = "../../core/tests/support/jacobi.rs"]
mod jacobi;

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinbatt::verify::{run_verify, triples, TripleResult};
use spinbatt_core::eigen::decompose;
use spinbatt_core::{
    analytic_charging_time, collapse_curve, find_charging_time, scaling_fit, ChargingReport,
    ModelParams, Regime, SpectralEvolution, TridiagonalHamiltonian,
};

// Tolerances, frozen.
const ORACLE_TOL: f64 = 1e-8;
const BASELINE_TOL: f64 = 1e-9;
const ETA_OPTIMAL: f64 = 0.99;
const T_REL_TOL: f64 = 0.02;
const COSINE_LAW_TOL: f64 = 0.02;
const TC1_RUNTIME_S: f64 = 1.0;
const TC3_RUNTIME_S: f64 = 1.0;
const ADVANTAGE_BAND: (f64, f64) = (0.9, 1.1);
const EXPONENT_TARGET: f64 = 0.8264;
const EXPONENT_TOL: f64 = 0.05;
const SCALING_RUNTIME_S: f64 = 120.0;
const COLLAPSE_GAP_TOL: f64 = 0.05;
const COLLAPSE_ETA_AT_ONE: f64 = 0.95;
const EIGEN_INVARIANT_TOL: f64 = 1e-12;
const JACOBI_REL_TOL: f64 = 1e-9;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn params(n_b: u32, n_c: u32, m: u32) -> ModelParams {
    ModelParams::new(n_b, n_c, m).expect("valid acceptance parameters")
}

fn report(n_b: u32, n_c: u32, m: u32) -> ChargingReport {
    find_charging_time(&params(n_b, n_c, m), None).expect("charging time found")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn oracle_equivalence() -> Outcome {
    let jobs = std::thread::available_parallelism().map_or(1, usize::from);
    let results = run_verify(12, jobs).expect("verify runs");
    let worst = results
        .iter()
        .filter_map(|r| r.deviation.as_ref().ok().copied())
        .fold(0.0, f64::max);
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !TripleResult::passed(r))
        .map(|r| format!("({},{},{})", r.params.n_b(), r.params.n_c(), r.params.m()))
        .collect();
    outcome(
        failed.is_empty() && results.len() == triples(12).len() && worst <= ORACLE_TOL,
        format!(
            "{} triples, worst |dE| = {worst:.3e} (tol {ORACLE_TOL:e}){}",
            results.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!(", failing {}", failed.join(" "))
            }
        ),
    )
}

fn single_cell_baseline() -> Outcome {
    let r = report(1, 1, 1);
    let dt = (r.t_charge_numeric - PI / 2.0).abs();
    let dp = (r.p_collective - 2.0 / PI).abs();
    outcome(
        dt <= BASELINE_TOL && dp <= BASELINE_TOL,
        format!("|T - pi/2| = {dt:.2e}, |P - 2/pi| = {dp:.2e} (tol {BASELINE_TOL:e})"),
    )
}

fn analytic_check(r: &ChargingReport, expected_regime: Regime, t_expected: f64) -> (bool, String) {
    let dev = rel(r.t_charge_numeric, t_expected);
    let regime = r.prediction.regime.label;
    (
        regime == expected_regime && r.eta_max >= ETA_OPTIMAL && dev <= T_REL_TOL,
        format!(
            "regime {regime}, eta(T) = {:.5}, |T - T_an|/T_an = {dev:.2e}",
            r.eta_max
        ),
    )
}

fn tc1() -> Outcome {
    let start = Instant::now();
    let r = report(2, 2000, 50);
    let elapsed = start.elapsed().as_secs_f64();
    let t_an = PI / (2.0 * 2000f64.sqrt() * 49.5f64.sqrt());
    let (ok, detail) = analytic_check(&r, Regime::Tc1, t_an);
    outcome(
        ok && elapsed < TC1_RUNTIME_S,
        format!("{detail}, {elapsed:.3} s"),
    )
}

fn tc2() -> Outcome {
    let r = report(50, 2000, 2);
    let t_an = PI / (2.0 * 2000f64.sqrt() * 49.5f64.sqrt());
    let (ok, detail) = analytic_check(&r, Regime::Tc2, t_an);
    let tc1 = report(2, 2000, 50);
    let dual = analytic_charging_time(&tc1.prediction.regime, &tc1.params).unwrap();
    let own = analytic_charging_time(&r.prediction.regime, &r.params).unwrap();
    let exact = dual.is_some() && dual == own;
    outcome(
        ok && exact,
        format!("{detail}, analytic T equal to TC1 dual: {exact}"),
    )
}

fn tc3() -> Outcome {
    let start = Instant::now();
    let (n_b, n_c, m) = (5000u32, 50u32, 2u32);
    let r = report(n_b, n_c, m);
    let t_an = PI / (2.0 * f64::from(n_b).sqrt() * 49.5f64.sqrt());
    let (ok, detail) = analytic_check(&r, Regime::Tc3, t_an);

    // Delta E = (m omega / 2)(1 - cos(2 A sqrt(N_c - (m-1)/2) sqrt(N_b) t)).
    let freq = 2.0 * (f64::from(n_c) - (f64::from(m) - 1.0) / 2.0).sqrt() * f64::from(n_b).sqrt();
    let period = 2.0 * PI / freq;
    let evolution = SpectralEvolution::for_params(&r.params).unwrap();
    let samples = 2001;
    let worst = (0..samples)
        .map(|i| {
            let t = period * i as f64 / (samples - 1) as f64;
            let law = f64::from(m) / 2.0 * (1.0 - (freq * t).cos());
            (evolution.excitations(t) - law).abs()
        })
        .fold(0.0, f64::max)
        / f64::from(m);
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        ok && worst <= COSINE_LAW_TOL && elapsed < TC3_RUNTIME_S,
        format!("{detail}, cosine-law gap {worst:.2e} m*omega, {elapsed:.3} s"),
    )
}

fn tc4() -> Outcome {
    let r = report(400, 4, 4);
    outcome(
        r.prediction.regime.label == Regime::Tc4 && r.eta_max <= ETA_OPTIMAL,
        format!(
            "regime {}, eta(T) = {:.5} (must be <= {ETA_OPTIMAL})",
            r.prediction.regime.label, r.eta_max
        ),
    )
}

fn non_tc_sweep() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [0.2, 0.5, 0.8] {
        let n_c = 1000u32;
        let m = (k * f64::from(n_c)).round() as u32;
        let r = report(2, n_c, m);
        let t_an = PI / (2.0 * f64::from(n_c) * (k * (1.0 - k)).sqrt());
        let (ok, _) = analytic_check(&r, Regime::NonTcK, t_an);
        pass &= ok;
        parts.push(format!(
            "k={k}: eta {:.5}, dev {:.2e}",
            r.eta_max,
            rel(r.t_charge_numeric, t_an)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn advantage_scaling() -> Outcome {
    let mut ratios = Vec::new();
    for n_b in [2u32, 4, 8] {
        ratios.push((format!("TC1 N_b={n_b}"), report(n_b, 20000, 200)));
        ratios.push((format!("NONTC N_b={n_b}"), report(n_b, 4000, 2000)));
    }
    let mut pass = true;
    let parts: Vec<String> = ratios
        .iter()
        .map(|(name, r)| {
            let per = r.gamma.map(|g| g / f64::from(r.params.n_b()));
            pass &= matches!(per, Some(x) if (ADVANTAGE_BAND.0..=ADVANTAGE_BAND.1).contains(&x));
            format!(
                "{name}: {}",
                per.map_or("undefined".into(), |x| format!("{x:.4}"))
            )
        })
        .collect();
    outcome(pass, format!("Gamma/N_b {}", parts.join(", ")))
}

fn equal_scaling() -> Outcome {
    let start = Instant::now();
    let sizes = [10u32, 20, 40, 80, 160];
    let points: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| (f64::from(n), report(n, n, n).gamma.expect("defined")))
        .collect();
    let fit = scaling_fit(&points).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        (fit.exponent - EXPONENT_TARGET).abs() <= EXPONENT_TOL && elapsed < SCALING_RUNTIME_S,
        format!(
            "exponent {:.4} (target {EXPONENT_TARGET} +- {EXPONENT_TOL}), R^2 {:.5}, {elapsed:.1} s",
            fit.exponent, fit.r_squared
        ),
    )
}

fn collapse() -> Outcome {
    let ratios: Vec<f64> = (0..19).map(|i| 1.0 + 0.5 * f64::from(i)).collect();
    let small = collapse_curve(50, true, &ratios).unwrap();
    let large = collapse_curve(100, true, &ratios).unwrap();
    let gap = small
        .iter()
        .zip(&large)
        .map(|(a, b)| (a.eta_max - b.eta_max).abs())
        .fold(0.0, f64::max);
    let at_one = large[0].eta_max;
    outcome(
        gap <= COLLAPSE_GAP_TOL && at_one >= COLLAPSE_ETA_AT_ONE,
        format!("max gap {gap:.4} (tol {COLLAPSE_GAP_TOL}), eta(T) at ratio 1 for N_b=100 = {at_one:.5}"),
    )
}

fn eigensolver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let placeholder = params(1, 1, 1);
    let (mut worst_inv, mut worst_ref) = (0.0f64, 0.0f64);
    for dim in 2..=200usize {
        let offdiag: Vec<f64> = (1..dim).map(|_| rng.gen_range(0.05..10.0)).collect();
        let h = TridiagonalHamiltonian::from_offdiag(offdiag.clone(), placeholder).unwrap();
        let eig = decompose(&h).unwrap();
        let vals = eig.eigenvalues();
        let scale = h.max_abs();
        for k in 0..dim {
            for i in 0..dim {
                let lo = if i > 0 {
                    offdiag[i - 1] * eig.component(i - 1, k)
                } else {
                    0.0
                };
                let hi = if i + 1 < dim {
                    offdiag[i] * eig.component(i + 1, k)
                } else {
                    0.0
                };
                worst_inv = worst_inv
                    .max((lo + hi - vals[k] * eig.component(i, k)).abs() / scale / dim as f64);
            }
            for l in k..dim {
                let dot: f64 = (0..dim)
                    .map(|i| eig.component(i, k) * eig.component(i, l))
                    .sum();
                let expected = if k == l { 1.0 } else { 0.0 };
                worst_inv = worst_inv.max((dot - expected).abs() / dim as f64);
            }
            worst_inv = worst_inv.max((vals[k] + vals[dim - 1 - k]).abs() / scale / dim as f64);
        }
        let reference = jacobi::jacobi(&jacobi::tridiagonal_dense(&offdiag), dim);
        for k in 0..dim {
            worst_ref = worst_ref.max((vals[k] - reference.values[k]).abs() / scale);
        }
    }
    outcome(
        worst_inv <= EIGEN_INVARIANT_TOL && worst_ref <= JACOBI_REL_TOL,
        format!(
            "dims 2..200: invariant error/dim {worst_inv:.2e} (tol {EIGEN_INVARIANT_TOL:e}), Jacobi gap {worst_ref:.2e} (tol {JACOBI_REL_TOL:e})"
        ),
    )
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("spinbatt-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("spec.json");
    std::fs::write(
        &spec,
        r#"{
  "axes": {"n_b": [2, 4, 8, 16], "ratio": [1, 2.5, 5, 10]},
  "constraints": [
    {"target": "n_c", "source": "n_b", "factor": "ratio"},
    {"target": "m", "source": "n_c", "factor": 0.5}
  ],
  "outputs": ["n_c", "m", "regime", "t_charge", "delta_e_max", "eta_max", "gamma", "t_deviation"]
}
"#,
    )
    .unwrap();
    let run = |jobs: &str| {
        let out = dir.join(format!("jobs{jobs}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_spinbatt"))
            .args([
                "sweep",
                spec.to_str().unwrap(),
                "--jobs",
                jobs,
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .expect("binary runs");
        (status.success(), std::fs::read(&out).unwrap_or_default())
    };
    let (ok1, serial) = run("1");
    let (ok8, parallel) = run("8");
    let _ = std::fs::remove_dir_all(&dir);
    let rows = serial
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        .saturating_sub(1);
    outcome(
        ok1 && ok8 && rows == 16 && serial == parallel,
        format!(
            "{rows} rows, {} bytes, identical: {}",
            serial.len(),
            serial == parallel
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("oracle equivalence", oracle_equivalence),
        ("single-cell baseline", single_cell_baseline),
        ("TC1 regime", tc1),
        ("TC2 regime", tc2),
        ("TC3 regime", tc3),
        ("TC4 non-optimality", tc4),
        ("non-TC k sweep", non_tc_sweep),
        ("advantage scaling", advantage_scaling),
        ("equal-parameter scaling", equal_scaling),
        ("collapse", collapse),
        ("eigensolver", eigensolver),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        failures += usize::from(!result.pass);
        println!(
            "criterion {:>2} {:<24} {}  {}",
            i + 1,
            name,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
