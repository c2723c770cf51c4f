//! Full eigendecomposition of a real symmetric tridiagonal matrix.
//!
//! Implicit QL with Wilkinson shifts, rotations accumulated into the
//! eigenvector matrix (the classic `tql2` scheme). Output is sorted ascending
//! and each eigenvector is signed so that its first non-negligible component
//! is positive, which makes the decomposition deterministic.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Error, Result};
use crate::model::TridiagonalHamiltonian;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_SWEEPS: usize = 50;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    dim: usize,
    eigenvalues: Vec<f64>,
    // Column-major: column k is the eigenvector paired with eigenvalues[k].
    vectors: Vec<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector `k` as a contiguous slice.
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// Component `row` of eigenvector `k`, i.e. `V[row, k]`.
    pub fn component(&self, row: usize, k: usize) -> f64 {
        self.vectors[k * self.dim + row]
    }
}

/// Diagonalizes the zero-diagonal tridiagonal Hamiltonian.
pub fn decompose(h: &TridiagonalHamiltonian) -> Result<EigenSystem> {
    let n = h.dim();
    let mut diag = vec![0.0; n];
    let mut sub = Vec::with_capacity(n);
    sub.extend_from_slice(h.offdiag());
    sub.push(0.0);
    decompose_tridiagonal(&mut diag, &mut sub)
}

/// Diagonalizes the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `sub[0..n-1]` (`sub[n-1]` is scratch). Both slices are
/// overwritten.
pub fn decompose_tridiagonal(diag: &mut [f64], sub: &mut [f64]) -> Result<EigenSystem> {
    let n = diag.len();
    if n == 0 {
        return Err(domain!("matrix dimension must be at least 1"));
    }
    if sub.len() != n {
        return Err(domain!(
            "expected {n} off-diagonal slots, got {}",
            sub.len()
        ));
    }
    if diag
        .iter()
        .chain(sub[..n - 1].iter())
        .any(|x| !x.is_finite())
    {
        return Err(domain!("matrix entries must be finite"));
    }
    sub[n - 1] = 0.0;

    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    ql_implicit(diag, sub, &mut z, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        eigenvalues.push(diag[k]);
        let col = &z[k * n..(k + 1) * n];
        let scale = col.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let lead = col
            .iter()
            .copied()
            .find(|x| x.abs() > 1e-8 * scale)
            .unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        vectors.extend(col.iter().map(|x| sign * x));
    }
    Ok(EigenSystem {
        dim: n,
        eigenvalues,
        vectors,
    })
}

// `z` is column-major; rotations act on columns i and i + 1.
fn ql_implicit(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() < f64::MIN_POSITIVE {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iterations == MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations,
                });
            }
            iterations += 1;

            // Wilkinson shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (left, right) = z.split_at_mut((i + 1) * n);
                let zi = &mut left[i * n..];
                let zi1 = &mut right[..n];
                for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                    let f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
