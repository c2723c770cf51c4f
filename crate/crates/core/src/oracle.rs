//! Brute-force reference on the full `2^(N_b + N_c)` Hilbert space.
//!
//! The flip-flop Hamiltonian `A (S+ J- + S- J+)` is assembled from single-site
//! raising operators, the initial state is the product of the battery vacuum
//! and an explicitly enumerated Dicke state on the charger, and the state is
//! advanced with a step-split Taylor series of `exp(-i H t)`. Nothing here
//! uses the invariant subspace, so agreement with [`crate::dynamics`] checks
//! the subspace reduction itself.
//!
//! Basis states are bit strings: bits `0..N_b` are battery spins, bits
//! `N_b..N_b + N_c` charger spins, and a set bit means spin up.

use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{SpectralEvolution, Trajectory};
use crate::error::{domain, Error, Result};
use crate::model::ModelParams;

/// Largest `N_b + N_c` the oracle accepts.
pub const MAX_SPINS: u32 = 14;

// Taylor steps keep `|dt| * ||H||` at or below this.
const STEP_NORM: f64 = 4.0;
const MAX_TAYLOR_TERMS: usize = 200;

/// Real square matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    fn from_rows(dim: usize, rows: impl Iterator<Item = Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            for (c, v) in row {
                if cols.len() > *row_ptr.last().unwrap() && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        debug_assert_eq!(row_ptr.len(), dim + 1);
        SparseMatrix {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Non-zero entries of `row` as `(column, value)`.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.row(row)
            .find(|&(c, _)| c == col)
            .map_or(0.0, |(_, v)| v)
    }

    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::new(); self.dim];
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                rows[c].push((r, v));
            }
        }
        Self::from_rows(self.dim, rows.into_iter())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_rows(
            self.dim,
            (0..self.dim).map(|r| self.row(r).chain(other.row(r)).collect()),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_rows(
            self.dim,
            (0..self.dim).map(|r| {
                self.row(r)
                    .flat_map(|(k, a)| other.row(k).map(move |(c, b)| (c, a * b)))
                    .collect()
            }),
        )
    }

    pub fn scale(mut self, factor: f64) -> Self {
        self.vals.iter_mut().for_each(|v| *v *= factor);
        self
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            *out = self.cols[span.clone()]
                .iter()
                .zip(&self.vals[span])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| libm::fabs(v)).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim * self.dim];
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                dense[r * self.dim + c] += v;
            }
        }
        dense
    }
}

/// `sigma^+` on `site` of an `n_spins` register.
fn site_raising(n_spins: u32, site: u32) -> SparseMatrix {
    let dim = 1usize << n_spins;
    let bit = 1usize << site;
    // Row s has an entry iff s is up at `site`: <s| sigma+ |s ^ bit> = 1.
    SparseMatrix::from_rows(
        dim,
        (0..dim).map(|s| {
            if s & bit != 0 {
                vec![(s ^ bit, 1.0)]
            } else {
                Vec::new()
            }
        }),
    )
}

fn collective_raising(n_spins: u32, sites: core::ops::Range<u32>) -> SparseMatrix {
    let dim = 1usize << n_spins;
    sites.fold(
        SparseMatrix::from_rows(dim, (0..dim).map(|_| Vec::new())),
        |acc, site| acc.add(&site_raising(n_spins, site)),
    )
}

/// Full-space flip-flop Hamiltonian.
#[derive(Debug, Clone)]
pub struct FullSpaceHamiltonian {
    pub n_total: u32,
    pub params: ModelParams,
    pub matrix: SparseMatrix,
}

impl FullSpaceHamiltonian {
    fn battery_mask(&self) -> usize {
        (1usize << self.params.n_b()) - 1
    }

    /// `max |[H, S^z + J^z]|` over all entries.
    pub fn total_z_commutator_max(&self) -> f64 {
        let z = |s: usize| f64::from(s.count_ones()) - f64::from(self.n_total) / 2.0;
        (0..self.matrix.dim())
            .flat_map(|r| {
                self.matrix
                    .row(r)
                    .map(move |(c, v)| libm::fabs(v * (z(c) - z(r))))
            })
            .fold(0.0, f64::max)
    }
}

/// Builds `A (S+ J- + S- J+)` on `N_b + N_c <= 14` spins.
pub fn build_full(params: &ModelParams) -> Result<FullSpaceHamiltonian> {
    let n_total = params.n_b() + params.n_c();
    if n_total > MAX_SPINS {
        return Err(Error::Resource {
            spins: n_total,
            limit: MAX_SPINS,
        });
    }
    let s_plus = collective_raising(n_total, 0..params.n_b());
    let j_plus = collective_raising(n_total, params.n_b()..n_total);
    let s_minus = s_plus.transpose();
    let j_minus = j_plus.transpose();
    let matrix = s_plus
        .mul(&j_minus)
        .add(&s_minus.mul(&j_plus))
        .scale(params.coupling());
    Ok(FullSpaceHamiltonian {
        n_total,
        params: *params,
        matrix,
    })
}

/// `|0>_b (x) |Dicke m>_c` as a real vector on the full space.
pub fn dicke_initial_state(params: &ModelParams) -> Result<Vec<f64>> {
    let n_total = params.n_b() + params.n_c();
    if n_total > MAX_SPINS {
        return Err(Error::Resource {
            spins: n_total,
            limit: MAX_SPINS,
        });
    }
    let dim = 1usize << n_total;
    let mut state = vec![0.0; dim];
    let members: Vec<usize> = (0..(1usize << params.n_c()))
        .filter(|c| c.count_ones() == params.m())
        .map(|c| c << params.n_b())
        .collect();
    let amp = 1.0 / libm::sqrt(members.len() as f64);
    for s in members {
        state[s] = amp;
    }
    Ok(state)
}

/// Full-space state advanced by Taylor steps.
#[derive(Debug, Clone)]
pub struct FullSpaceEvolution {
    h: FullSpaceHamiltonian,
    norm_bound: f64,
    time: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl FullSpaceEvolution {
    pub fn new(h: FullSpaceHamiltonian) -> Result<Self> {
        let re = dicke_initial_state(&h.params)?;
        let im = vec![0.0; re.len()];
        let norm_bound = h.matrix.row_sum_norm();
        Ok(FullSpaceEvolution {
            h,
            norm_bound,
            time: 0.0,
            re,
            im,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(a, b)| a * a + b * b)
            .sum()
    }

    fn excitations(&self, mask: usize) -> f64 {
        self.re
            .iter()
            .zip(&self.im)
            .enumerate()
            .map(|(s, (a, b))| f64::from((s & mask).count_ones()) * (a * a + b * b))
            .sum()
    }

    /// `<S^z> + N_b / 2`.
    pub fn battery_excitations(&self) -> f64 {
        self.excitations(self.h.battery_mask())
    }

    /// `<J^z> + N_c / 2`.
    pub fn charger_excitations(&self) -> f64 {
        self.excitations(!self.h.battery_mask())
    }

    /// `<H_b + H_c> = omega (<S^z> + <J^z>)`.
    pub fn free_energy(&self) -> f64 {
        self.h.params.omega()
            * (self.battery_excitations() + self.charger_excitations()
                - f64::from(self.h.n_total) / 2.0)
    }

    /// `Delta E = omega (<S^z> + N_b / 2)`.
    pub fn delta_e(&self) -> f64 {
        self.h.params.omega() * self.battery_excitations()
    }

    /// Advances (or rewinds) the state to time `t`.
    pub fn advance_to(&mut self, t: f64) {
        let span = t - self.time;
        if span == 0.0 || self.norm_bound == 0.0 {
            self.time = t;
            return;
        }
        let steps = libm::ceil(libm::fabs(span) * self.norm_bound / STEP_NORM).max(1.0) as usize;
        let dt = span / steps as f64;
        for _ in 0..steps {
            self.taylor_step(dt);
        }
        self.time = t;
    }

    fn taylor_step(&mut self, dt: f64) {
        let dim = self.re.len();
        let mut term_re = self.re.clone();
        let mut term_im = self.im.clone();
        let mut h_re = vec![0.0; dim];
        let mut h_im = vec![0.0; dim];
        for k in 1..=MAX_TAYLOR_TERMS {
            // term <- (-i dt / k) H term
            self.h.matrix.apply(&term_re, &mut h_re);
            self.h.matrix.apply(&term_im, &mut h_im);
            let f = dt / k as f64;
            let mut size = 0.0f64;
            for i in 0..dim {
                term_re[i] = f * h_im[i];
                term_im[i] = -f * h_re[i];
                self.re[i] += term_re[i];
                self.im[i] += term_im[i];
                size = size.max(libm::fabs(term_re[i])).max(libm::fabs(term_im[i]));
            }
            if size < 1e-18 && (k as f64) > libm::fabs(dt) * self.norm_bound {
                break;
            }
        }
    }
}

/// `Delta E(t)` from the full-space evolution at strictly increasing `times`.
pub fn oracle_trajectory(params: &ModelParams, times: &[f64]) -> Result<Trajectory> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(domain!("times must be finite"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain!("times must be strictly increasing"));
    }
    let mut evolution = FullSpaceEvolution::new(build_full(params)?)?;
    let optimal = params.optimal_energy();
    let mut delta_e = Vec::with_capacity(times.len());
    for &t in times {
        evolution.advance_to(t);
        delta_e.push(evolution.delta_e());
    }
    Ok(Trajectory {
        params: *params,
        times: times.to_vec(),
        eta: delta_e.iter().map(|e| e / optimal).collect(),
        delta_e,
        populations: None,
    })
}

/// Largest `|Delta E_full(t) - Delta E_subspace(t)|` over `times`.
pub fn subspace_deviation(params: &ModelParams, times: &[f64]) -> Result<f64> {
    let full = oracle_trajectory(params, times)?;
    let reduced = SpectralEvolution::for_params(params)?;
    Ok(full
        .times
        .iter()
        .zip(&full.delta_e)
        .map(|(&t, &e)| libm::fabs(e - params.omega() * reduced.excitations(t)))
        .fold(0.0, f64::max))
}
