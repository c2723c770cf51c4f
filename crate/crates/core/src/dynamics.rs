//! Exact time evolution inside the invariant subspace.
//!
//! With `H = V diag(lambda) V^T` and `psi(0) = e_0`,
//!
//! ```text
//! psi_j(t) = sum_k V[j,k] V[0,k] exp(-i lambda_k t)
//! ```
//!
//! so every observable is available in closed form at any `t`, without time
//! stepping. The stored energy is `Delta E(t) = omega * sum_j j |psi_j(t)|^2`.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::{decompose, EigenSystem};
use crate::error::{domain, Result};
use crate::model::{build_hamiltonian, ModelParams};

/// A complex amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
}

impl Amplitude {
    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// State in the Dicke basis `|j>_b |m - j>_c`, `j = 0..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub time: f64,
    pub amplitudes: Vec<Amplitude>,
}

impl StateVector {
    /// `psi(0) = (1, 0, ..., 0)`.
    pub fn initial(dim: usize) -> Self {
        let mut amplitudes = vec![Amplitude::default(); dim];
        amplitudes[0].re = 1.0;
        StateVector {
            time: 0.0,
            amplitudes,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Amplitude::norm_sqr).sum()
    }

    /// `|psi_j|^2` for every basis state.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Amplitude::norm_sqr).collect()
    }
}

/// Sampled charging curve.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Trajectory {
    pub params: ModelParams,
    pub times: Vec<f64>,
    pub delta_e: Vec<f64>,
    pub eta: Vec<f64>,
    pub populations: Option<Vec<Vec<f64>>>,
}

/// Evolves the initial state to time `t`.
pub fn propagate(eig: &EigenSystem, t: f64) -> StateVector {
    SpectralEvolution::new(eig.clone()).state(t)
}

/// `omega * sum_j j |psi_j|^2`, the energy moved into the battery.
pub fn energy_stored(state: &StateVector, params: &ModelParams) -> f64 {
    params.omega() * weighted_excitations(state.amplitudes.iter().map(Amplitude::norm_sqr))
}

/// Stored energy relative to the optimal `omega * min(n_b, m)`.
pub fn efficiency(state: &StateVector, params: &ModelParams) -> f64 {
    energy_stored(state, params) / params.optimal_energy()
}

fn weighted_excitations(populations: impl Iterator<Item = f64>) -> f64 {
    populations.enumerate().map(|(j, p)| j as f64 * p).sum()
}

/// A diagonalized subspace Hamiltonian ready for closed-form evaluation.
///
/// Holds `w[j,k] = V[j,k] V[0,k]` so that `psi_j(t) = sum_k w[j,k] e^{-i lambda_k t}`.
#[derive(Debug, Clone)]
pub struct SpectralEvolution {
    eig: EigenSystem,
    weights: Vec<f64>,
}

impl SpectralEvolution {
    pub fn new(eig: EigenSystem) -> Self {
        let n = eig.dim();
        let mut weights = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                weights[j * n + k] = eig.component(j, k) * eig.component(0, k);
            }
        }
        SpectralEvolution { eig, weights }
    }

    /// Builds and diagonalizes the subspace Hamiltonian for `params`.
    pub fn for_params(params: &ModelParams) -> Result<Self> {
        Ok(Self::new(decompose(&build_hamiltonian(params))?))
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    fn phases(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let lambda = self.eig.eigenvalues();
        let mut cos = Vec::with_capacity(lambda.len());
        let mut sin = Vec::with_capacity(lambda.len());
        for &l in lambda {
            let (s, c) = libm::sincos(l * t);
            cos.push(c);
            sin.push(s);
        }
        (cos, sin)
    }

    fn row(&self, j: usize) -> &[f64] {
        let n = self.dim();
        &self.weights[j * n..(j + 1) * n]
    }

    pub fn state(&self, t: f64) -> StateVector {
        let (cos, sin) = self.phases(t);
        let amplitudes = (0..self.dim())
            .map(|j| {
                let (mut re, mut im) = (0.0, 0.0);
                for ((w, c), s) in self.row(j).iter().zip(&cos).zip(&sin) {
                    re += w * c;
                    im -= w * s;
                }
                Amplitude { re, im }
            })
            .collect();
        StateVector {
            time: t,
            amplitudes,
        }
    }

    /// `sum_j j |psi_j(t)|^2`, the mean number of battery excitations.
    pub fn excitations(&self, t: f64) -> f64 {
        let (cos, sin) = self.phases(t);
        (1..self.dim())
            .map(|j| {
                let (mut re, mut im) = (0.0, 0.0);
                for ((w, c), s) in self.row(j).iter().zip(&cos).zip(&sin) {
                    re += w * c;
                    im += w * s;
                }
                j as f64 * (re * re + im * im)
            })
            .sum()
    }

    /// Mean excitation number and its time derivative at `t`.
    pub fn excitations_with_rate(&self, t: f64) -> (f64, f64) {
        let (cos, sin) = self.phases(t);
        let lambda = self.eig.eigenvalues();
        let (mut value, mut rate) = (0.0, 0.0);
        for j in 1..self.dim() {
            // psi = sum w (c - i s); dpsi/dt = -sum w lambda (s + i c)
            let (mut re, mut im, mut dre, mut dim) = (0.0, 0.0, 0.0, 0.0);
            for (((w, c), s), l) in self.row(j).iter().zip(&cos).zip(&sin).zip(lambda) {
                re += w * c;
                im -= w * s;
                dre -= w * l * s;
                dim -= w * l * c;
            }
            let jf = j as f64;
            value += jf * (re * re + im * im);
            rate += jf * 2.0 * (re * dre + im * dim);
        }
        (value, rate)
    }
}

/// Samples `Delta E` and `eta` on `n_samples` uniform times in `[0, t_max]`.
pub fn sample_trajectory(
    params: &ModelParams,
    t_max: f64,
    n_samples: usize,
    keep_populations: bool,
) -> Result<Trajectory> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(domain!("t_max must be positive and finite, got {t_max}"));
    }
    if n_samples < 2 {
        return Err(domain!("need at least 2 samples, got {n_samples}"));
    }
    let evolution = SpectralEvolution::for_params(params)?;
    let optimal = params.optimal_energy();
    let last = (n_samples - 1) as f64;

    let mut times = Vec::with_capacity(n_samples);
    let mut delta_e = Vec::with_capacity(n_samples);
    let mut eta = Vec::with_capacity(n_samples);
    let mut populations = keep_populations.then(|| Vec::with_capacity(n_samples));
    for i in 0..n_samples {
        let t = t_max * (i as f64) / last;
        let state = evolution.state(t);
        let e = energy_stored(&state, params);
        times.push(t);
        delta_e.push(e);
        eta.push(e / optimal);
        if let Some(pops) = populations.as_mut() {
            pops.push(state.populations());
        }
    }
    Ok(Trajectory {
        params: *params,
        times,
        delta_e,
        eta,
        populations,
    })
}
