//! Physical parameters and the invariant-subspace Hamiltonian.
//!
//! In the Dicke basis `|j>_b |m - j>_c`, `j = 0..=d` with `d = min(N_b, m)`,
//! the flip-flop Hamiltonian is a zero-diagonal symmetric tridiagonal matrix
//! with off-diagonals
//!
//! ```text
//! u_j = A * sqrt(j * (N_b - j + 1) * (N_c - m + j) * (m - j + 1)),  j = 1..=d.
//! ```
//!
//! The free part `omega * (S^z + J^z)` is constant on the resonant shell and is
//! dropped, so `omega` only enters observables.

use alloc::vec::Vec;

use crate::error::{domain, Result};

/// One battery/charger configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ModelParams {
    n_b: u32,
    n_c: u32,
    m: u32,
    coupling: f64,
    omega: f64,
}

impl ModelParams {
    /// Battery size `n_b`, charger size `n_c` and `m` initially excited charger
    /// spins, with `A = 1` and `omega = 1`.
    pub fn new(n_b: u32, n_c: u32, m: u32) -> Result<Self> {
        Self::with_energies(n_b, n_c, m, 1.0, 1.0)
    }

    pub fn with_energies(n_b: u32, n_c: u32, m: u32, coupling: f64, omega: f64) -> Result<Self> {
        if n_b == 0 {
            return Err(domain!("n_b must be at least 1"));
        }
        if n_c == 0 {
            return Err(domain!("n_c must be at least 1"));
        }
        if m == 0 || m > n_c {
            return Err(domain!("m must lie in 1..={n_c}, got {m}"));
        }
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(domain!(
                "coupling must be positive and finite, got {coupling}"
            ));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(domain!("omega must be positive and finite, got {omega}"));
        }
        Ok(ModelParams {
            n_b,
            n_c,
            m,
            coupling,
            omega,
        })
    }

    pub fn n_b(&self) -> u32 {
        self.n_b
    }

    pub fn n_c(&self) -> u32 {
        self.n_c
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `d = min(n_b, m)`, the largest number of excitations the battery can hold.
    pub fn max_transfer(&self) -> u32 {
        self.n_b.min(self.m)
    }

    /// Dimension `d + 1` of the invariant subspace.
    pub fn subspace_dim(&self) -> usize {
        self.max_transfer() as usize + 1
    }

    /// Energy of the optimally charged state, `omega * min(n_b, m)`.
    pub fn optimal_energy(&self) -> f64 {
        self.omega * f64::from(self.max_transfer())
    }

    /// Charger filling `k = m / n_c`.
    pub fn filling(&self) -> f64 {
        f64::from(self.m) / f64::from(self.n_c)
    }
}

/// Off-diagonal element `u_j` of the invariant-subspace Hamiltonian.
pub fn coupling_element(params: &ModelParams, j: u32) -> Result<f64> {
    let d = params.max_transfer();
    if j == 0 || j > d {
        return Err(domain!("coupling index j must lie in 1..={d}, got {j}"));
    }
    let j_f = f64::from(j);
    let radicand = j_f
        * f64::from(params.n_b - j + 1)
        * f64::from(params.n_c - params.m + j)
        * f64::from(params.m - j + 1);
    Ok(params.coupling * libm::sqrt(radicand))
}

/// Zero-diagonal symmetric tridiagonal matrix on the invariant subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    offdiag: Vec<f64>,
    params: ModelParams,
}

impl TridiagonalHamiltonian {
    /// Builds a matrix directly from its off-diagonal, for solver tests and
    /// external tridiagonal inputs. `params` is attached as provenance only.
    pub fn from_offdiag(offdiag: Vec<f64>, params: ModelParams) -> Result<Self> {
        if let Some(bad) = offdiag.iter().find(|u| !u.is_finite()) {
            return Err(domain!("off-diagonal entries must be finite, got {bad}"));
        }
        Ok(TridiagonalHamiltonian { offdiag, params })
    }

    pub fn dim(&self) -> usize {
        self.offdiag.len() + 1
    }

    /// `u_1..u_d`.
    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.offdiag.iter().fold(0.0, |acc, u| acc.max(u.abs()))
    }

    /// Entry `(row, col)` of the full matrix.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        match row.abs_diff(col) {
            1 => self.offdiag[row.min(col)],
            _ => 0.0,
        }
    }
}

/// Builds the `(d + 1) x (d + 1)` invariant-subspace Hamiltonian.
pub fn build_hamiltonian(params: &ModelParams) -> TridiagonalHamiltonian {
    let offdiag = (1..=params.max_transfer())
        .map(|j| coupling_element(params, j).expect("j within 1..=d"))
        .collect();
    TridiagonalHamiltonian {
        offdiag,
        params: *params,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n_b: u32, n_c: u32, m: u32) -> ModelParams {
        ModelParams::new(n_b, n_c, m).unwrap()
    }

    #[test]
    fn coupling_element_examples() {
        assert_eq!(coupling_element(&p(1, 1, 1), 1).unwrap(), 1.0);
        assert_eq!(coupling_element(&p(2, 2, 2), 1).unwrap(), 2.0);
        assert_eq!(coupling_element(&p(2, 2, 2), 2).unwrap(), 2.0);
    }

    #[test]
    fn coupling_element_rejects_out_of_range_index() {
        let params = p(3, 5, 2);
        assert!(matches!(
            coupling_element(&params, 0),
            Err(crate::Error::Domain(_))
        ));
        let err = coupling_element(&params, 3).unwrap_err();
        assert!(alloc::format!("{err}").contains("1..=2"));
    }

    #[test]
    fn build_hamiltonian_examples() {
        let h = build_hamiltonian(&p(1, 1, 1));
        assert_eq!(h.dim(), 2);
        assert_eq!(h.offdiag(), &[1.0]);

        assert_eq!(build_hamiltonian(&p(3, 5, 2)).dim(), 3);

        let h = build_hamiltonian(&p(2, 4, 3));
        let s12 = libm::sqrt(12.0);
        assert_eq!(h.offdiag(), &[s12, s12]);
        assert_eq!(h.entry(0, 0), 0.0);
        assert_eq!(h.entry(1, 0), s12);
        assert_eq!(h.entry(0, 2), 0.0);
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(ModelParams::new(0, 1, 1).is_err());
        assert!(ModelParams::new(1, 0, 1).is_err());
        assert!(ModelParams::new(1, 2, 0).is_err());
        assert!(ModelParams::new(1, 2, 3).is_err());
        assert!(ModelParams::with_energies(1, 1, 1, 0.0, 1.0).is_err());
        assert!(ModelParams::with_energies(1, 1, 1, 1.0, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn palindromic_when_battery_matches_charger(n in 1u32..60, m_frac in 0.0f64..1.0) {
            let m = 1 + ((n - 1) as f64 * m_frac) as u32;
            let params = p(n, n, m);
            let h = build_hamiltonian(&params);
            let u = h.offdiag();
            for j in 0..u.len() {
                prop_assert_eq!(u[j], u[u.len() - 1 - j]);
            }
        }

        #[test]
        fn offdiag_strictly_positive(n_b in 1u32..300, n_c in 1u32..300, m_frac in 0.0f64..1.0) {
            let m = 1 + ((n_c - 1) as f64 * m_frac) as u32;
            let params = p(n_b, n_c, m);
            let h = build_hamiltonian(&params);
            prop_assert_eq!(h.dim(), n_b.min(m) as usize + 1);
            prop_assert!(h.offdiag().iter().all(|&u| u > 0.0));
        }

        #[test]
        fn coupling_scales_exactly(n_b in 1u32..100, n_c in 1u32..100, c in 0.01f64..100.0) {
            let m = n_c.div_ceil(2);
            let unit = p(n_b, n_c, m);
            let scaled = ModelParams::with_energies(n_b, n_c, m, c, 1.0).unwrap();
            for j in 1..=unit.max_transfer() {
                let a = coupling_element(&unit, j).unwrap();
                let b = coupling_element(&scaled, j).unwrap();
                prop_assert_eq!(b, c * a);
            }
        }
    }
}
