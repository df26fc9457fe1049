use nalgebra::DMatrix;

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 100;

/// Sweeps until the off-diagonal Frobenius norm drops below
/// `tolerance * max(1, ‖A‖_F)`. Only the upper triangle of `a` is trusted to
/// be consistent with the lower one; the input is symmetrised first.
pub fn symmetric_eigen(a: &DMatrix<f64>, tolerance: f64) -> SymmetricEigen {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = m.norm().max(1.0);
    let threshold = (tolerance * scale).powi(2);

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && off_diagonal_sq(&m) > threshold {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymmetricEigen {
        values,
        vectors,
        sweeps,
    }
}

fn off_diagonal_sq(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s
}

impl SymmetricEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(λ)) Vᵀ`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            for r in 0..n {
                scaled[(r, k)] *= fk;
            }
        }
        &scaled * self.vectors.transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalises_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = symmetric_eigen(&a, 1e-11);
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reconstructs_random_symmetric() {
        let n = 7;
        let a = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let a = &a + a.transpose();
        let e = symmetric_eigen(&a, 1e-11);
        let back = e.reconstruct(|x| x);
        assert!((back - &a).norm() < 1e-9);
        let vtv = e.vectors.transpose() * &e.vectors;
        assert!((vtv - DMatrix::identity(n, n)).norm() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pentagon_adjacency_spectrum() {
        // C5 adjacency eigenvalues are 2cos(2πk/5)
        let mut a = DMatrix::zeros(5, 5);
        for i in 0..5 {
            a[(i, (i + 1) % 5)] = 1.0;
            a[((i + 1) % 5, i)] = 1.0;
        }
        let e = symmetric_eigen(&a, 1e-11);
        let mut expected: Vec<f64> = (0..5)
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 5.0).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (x, y) in e.values.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
