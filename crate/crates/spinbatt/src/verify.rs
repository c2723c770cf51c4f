//! Subspace-versus-full-space equivalence check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use spinbatt_core::oracle::{subspace_deviation, MAX_SPINS};
use spinbatt_core::ModelParams;

use crate::error::CliError;

pub const VERIFY_SEED: u64 = 0x5eed_b477;
pub const VERIFY_TIMES: usize = 100;
/// Tolerance in units of `omega`.
pub const VERIFY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct TripleResult {
    pub params: ModelParams,
    pub deviation: Result<f64, String>,
}

impl TripleResult {
    pub fn passed(&self) -> bool {
        matches!(self.deviation, Ok(d) if d <= VERIFY_TOLERANCE * self.params.omega())
    }
}

/// Every valid `(n_b, n_c, m)` with `n_b + n_c <= max_spins`.
pub fn triples(max_spins: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for n_b in 1..max_spins {
        for n_c in 1..=max_spins - n_b {
            for m in 1..=n_c {
                out.push((n_b, n_c, m));
            }
        }
    }
    out
}

/// `count` sorted, distinct times drawn uniformly from `[0, 10 / coupling]`.
pub fn sample_times(seed: u64, count: usize, coupling: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times: Vec<f64> = (0..count)
        .map(|_| rng.gen_range(0.0..=10.0 / coupling))
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

pub fn run_verify(max_spins: u32, jobs: usize) -> Result<Vec<TripleResult>, CliError> {
    if max_spins > MAX_SPINS {
        return Err(CliError::Usage(format!(
            "--max-spins must be at most {MAX_SPINS}, got {max_spins}"
        )));
    }
    if max_spins < 2 {
        return Err(CliError::Usage(format!(
            "--max-spins must be at least 2, got {max_spins}"
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Numeric(format!("cannot start worker pool: {e}")))?;
    let times = sample_times(VERIFY_SEED, VERIFY_TIMES, 1.0);
    Ok(pool.install(|| {
        triples(max_spins)
            .into_par_iter()
            .map(|(n_b, n_c, m)| {
                let params = ModelParams::new(n_b, n_c, m).expect("enumerated triples are valid");
                TripleResult {
                    params,
                    deviation: subspace_deviation(&params, &times).map_err(|e| e.to_string()),
                }
            })
            .collect()
    }))
}
