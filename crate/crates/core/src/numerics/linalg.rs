//! Just enough dense linear algebra for Gaussian fits: a symmetric matrix
//! type and a cyclic Jacobi eigensolver.

use crate::error::{Error, Result};

/// Largest dimension the Jacobi solver accepts.
pub const MAX_EIGEN_DIM: usize = 256;

/// Dense symmetric matrix, row-major. Symmetry is checked exactly on
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be >= 1"));
        }
        Error::check_len(dim * dim, entries.len())?;
        for i in 0..dim {
            for j in (i + 1)..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(SymmetricMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        SymmetricMatrix { dim, entries }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = Self::identity(dim);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * dim + i] = *v;
        }
        m
    }

    /// Builds from a possibly slightly asymmetric product by averaging the
    /// two triangles.
    pub fn symmetrize(dim: usize, mut entries: Vec<f64>) -> Result<Self> {
        Error::check_len(dim * dim, entries.len())?;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (entries[i * dim + j] + entries[j * dim + i]);
                entries[i * dim + j] = avg;
                entries[j * dim + i] = avg;
            }
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Square root of a positive semidefinite matrix; negative eigenvalues
    /// (numerical noise) are clamped to zero.
    pub fn psd_sqrt(&self) -> Result<SymmetricMatrix> {
        let eig = sym_eigen(self)?;
        let roots: Vec<f64> = eig.values.iter().map(|v| v.max(0.0).sqrt()).collect();
        Ok(eig.reconstruct_with(&roots))
    }
}

/// Result of [`sym_eigen`]: eigenvalues in descending order, eigenvectors as
/// the columns of a row-major `dim × dim` matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub dim: usize,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.vectors[i * self.dim + k])
            .collect()
    }

    /// V diag(values) Vᵀ for replacement eigenvalues.
    pub fn reconstruct_with(&self, values: &[f64]) -> SymmetricMatrix {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for (k, lambda) in values.iter().enumerate() {
                    acc += self.vectors[i * n + k] * lambda * self.vectors[j * n + k];
                }
                out[i * n + j] = acc;
                out[j * n + i] = acc;
            }
        }
        SymmetricMatrix {
            dim: n,
            entries: out,
        }
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.reconstruct_with(&self.values)
    }
}

/// Cyclic Jacobi eigendecomposition. Sweeps until every off-diagonal entry is
/// below `1e-12 · ‖M‖_F`.
pub fn sym_eigen(matrix: &SymmetricMatrix) -> Result<Eigen> {
    let n = matrix.dim;
    if n > MAX_EIGEN_DIM {
        return Err(Error::invalid(format!(
            "eigensolver limited to dim <= {MAX_EIGEN_DIM}, got {n}"
        )));
    }
    let mut a = matrix.entries.clone();
    let mut v = SymmetricMatrix::identity(n).entries;
    let tol = 1e-12 * matrix.frobenius_norm();

    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].abs())
            .fold(0.0, f64::max);
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + col] = v[row * n + src];
        }
    }
    Ok(Eigen {
        values,
        vectors,
        dim: n,
    })
}

/// Row-major product of two square matrices.
pub fn matmul_square(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn random_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
        let mut rng = RngStream::new(seed);
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rng.uniform_open() * 4.0;
                e[i * n + j] = v;
                e[j * n + i] = v;
            }
        }
        SymmetricMatrix::new(n, e).unwrap()
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = sym_eigen(&SymmetricMatrix::identity(3)).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_axis_aligned() {
        let eig = sym_eigen(&SymmetricMatrix::diagonal(&[1.0, 4.0])).unwrap();
        assert_eq!(eig.values, vec![4.0, 1.0]);
        assert_eq!(
            eig.vector(0).iter().map(|x| x.abs()).collect::<Vec<_>>(),
            vec![0.0, 1.0]
        );
        assert_eq!(
            eig.vector(1).iter().map(|x| x.abs()).collect::<Vec<_>>(),
            vec![1.0, 0.0]
        );
    }

    #[test]
    fn random_reconstruction_trace_orthonormality() {
        for seed in 0..5 {
            let m = random_symmetric(8, seed);
            let eig = sym_eigen(&m).unwrap();
            let rec = eig.reconstruct();
            let err: f64 = m
                .entries()
                .iter()
                .zip(rec.entries())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-9, "reconstruction error {err}");
            assert!((eig.values.iter().sum::<f64>() - m.trace()).abs() < 1e-9);
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
            for a in 0..8 {
                for b in 0..8 {
                    let dot: f64 = eig
                        .vector(a)
                        .iter()
                        .zip(eig.vector(b))
                        .map(|(x, y)| x * y)
                        .sum();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - expected).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let err = SymmetricMatrix::new(2, vec![1.0, 2.0, 2.0 + 1e-15, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { row: 0, col: 1 }));
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = SymmetricMatrix::new(2, vec![5.0, 2.0, 2.0, 2.0]).unwrap();
        let r = m.psd_sqrt().unwrap();
        let sq = matmul_square(r.entries(), r.entries(), 2);
        for (a, b) in sq.iter().zip(m.entries()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
