//! Dense cyclic Jacobi eigensolver, used only as an independent reference.

/// Eigenvalues ascending and eigenvectors as columns of a row-major matrix.
pub struct DenseEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub dim: usize,
}

impl DenseEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.vectors[i * self.dim + k])
            .collect()
    }
}

/// Diagonalizes the symmetric row-major matrix `a`.
pub fn jacobi(a: &[f64], dim: usize) -> DenseEigen {
    assert_eq!(a.len(), dim * dim);
    let mut a = a.to_vec();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    let scale: f64 = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..dim)
            .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * dim + j] * a[i * dim + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
                for k in 0..dim {
                    let vkp = v[k * dim + p];
                    let vkq = v[k * dim + q];
                    v[k * dim + p] = c * vkp - s * vkq;
                    v[k * dim + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| a[i * dim + i].total_cmp(&a[j * dim + j]));
    let values = order.iter().map(|&i| a[i * dim + i]).collect();
    let mut vectors = vec![0.0; dim * dim];
    for (new, &old) in order.iter().enumerate() {
        for i in 0..dim {
            vectors[i * dim + new] = v[i * dim + old];
        }
    }
    DenseEigen {
        values,
        vectors,
        dim,
    }
}

/// Dense row-major form of a zero-diagonal tridiagonal matrix.
pub fn tridiagonal_dense(offdiag: &[f64]) -> Vec<f64> {
    let dim = offdiag.len() + 1;
    let mut a = vec![0.0; dim * dim];
    for (i, &u) in offdiag.iter().enumerate() {
        a[i * dim + i + 1] = u;
        a[(i + 1) * dim + i] = u;
    }
    a
}
