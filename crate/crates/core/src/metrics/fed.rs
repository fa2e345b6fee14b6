//! Fréchet embedding distance between two sets of identity embeddings.

use crate::error::{Error, Result};
use crate::numerics::{matmul_square, sym_eigen, SymmetricMatrix};

/// Most negative eigenvalue accepted as numerical noise in a covariance.
pub const PSD_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EmbeddingGaussian {
    pub mean: Vec<f64>,
    pub covariance: SymmetricMatrix,
}

impl EmbeddingGaussian {
    /// Sample mean and unbiased covariance.
    pub fn fit(vectors: &[Vec<f64>]) -> Result<Self> {
        if vectors.len() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 embeddings, got {}",
                vectors.len()
            )));
        }
        let d = vectors[0].len();
        for v in vectors {
            Error::check_len(d, v.len())?;
        }
        let n = vectors.len() as f64;
        let mut mean = vec![0.0; d];
        for v in vectors {
            for (m, x) in mean.iter_mut().zip(v) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut cov = vec![0.0; d * d];
        for v in vectors {
            for i in 0..d {
                let a = v[i] - mean[i];
                for j in i..d {
                    cov[i * d + j] += a * (v[j] - mean[j]);
                }
            }
        }
        for i in 0..d {
            for j in i..d {
                cov[i * d + j] /= n - 1.0;
                cov[j * d + i] = cov[i * d + j];
            }
        }
        let covariance = SymmetricMatrix::new(d, cov)?;
        Ok(EmbeddingGaussian { mean, covariance })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn is_psd(&self) -> Result<bool> {
        Ok(sym_eigen(&self.covariance)?
            .values
            .iter()
            .all(|&v| v >= -PSD_TOLERANCE))
    }
}

/// `‖μa − μb‖² + Tr(Σa + Σb − 2(Σa^½ Σb Σa^½)^½)`.
pub fn frechet_distance(a: &EmbeddingGaussian, b: &EmbeddingGaussian) -> Result<f64> {
    Error::check_len(a.dim(), b.dim())?;
    let d = a.dim();
    let mean_term: f64 = a
        .mean
        .iter()
        .zip(&b.mean)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    let root_a = a.covariance.psd_sqrt()?;
    let inner = matmul_square(
        &matmul_square(root_a.entries(), b.covariance.entries(), d),
        root_a.entries(),
        d,
    );
    let inner = SymmetricMatrix::symmetrize(d, inner)?;
    let cross: f64 = sym_eigen(&inner)?
        .values
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .sum();
    Ok(mean_term + a.covariance.trace() + b.covariance.trace() - 2.0 * cross)
}

pub fn fed(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    frechet_distance(&EmbeddingGaussian::fit(a)?, &EmbeddingGaussian::fit(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn sample(rng: &mut RngStream, n: usize, d: usize, shift: f64) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| {
                (0..d)
                    .map(|k| rng.gaussian(shift, 1.0 + k as f64 * 0.3).unwrap())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn identical_sets() {
        let mut rng = RngStream::new(4);
        let a = sample(&mut rng, 50, 6, 0.0);
        assert!(fed(&a, &a).unwrap().abs() < 1e-8);
    }

    #[test]
    fn one_dimensional_shift() {
        let a: Vec<Vec<f64>> = [0.0, 1.0, 2.0, 3.0].iter().map(|v| vec![*v]).collect();
        let b: Vec<Vec<f64>> = a.iter().map(|v| vec![v[0] + 2.5]).collect();
        assert!((fed(&a, &b).unwrap() - 6.25).abs() < 1e-10);
    }

    #[test]
    fn symmetric_and_nonnegative() {
        let mut rng = RngStream::new(5);
        let a = sample(&mut rng, 40, 4, 0.0);
        let b = sample(&mut rng, 30, 4, 0.7);
        let (ab, ba) = (fed(&a, &b).unwrap(), fed(&b, &a).unwrap());
        assert!(ab > 0.0);
        assert!((ab - ba).abs() < 1e-9 * ab.max(1.0));
    }

    #[test]
    fn covariance_is_unbiased_and_psd() {
        let g = EmbeddingGaussian::fit(&[vec![0.0, 1.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(g.covariance.get(0, 0), 2.0);
        assert_eq!(g.covariance.get(1, 1), 0.0);
        assert!(g.is_psd().unwrap());
        assert!(EmbeddingGaussian::fit(&[vec![1.0]]).is_err());
    }
}
