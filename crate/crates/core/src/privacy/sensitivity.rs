//! Empirical feature-space sensitivity: the largest pairwise l1 distance
//! between latents of a dataset.
//!
//! The value is relative to the images it was measured on. It is a usable
//! working number for the same encoder and similar data, but it does not
//! bound the distance for unseen images; use [`super::clip_latent`] with
//! `Δf = 2B` when a provable bound is needed.

use std::fmt::Write as _;

use crate::codec::LatentVector;
use crate::error::{Error, Result};
use crate::numerics::{descriptive_stats, DescriptiveStats};

/// Number of equal-width histogram bins in a [`SensitivityReport`].
pub const SENSITIVITY_BINS: usize = 20;

#[derive(Debug, Clone)]
pub struct SensitivityReport {
    pub delta_f: f64,
    /// Indices of a pair attaining `delta_f`.
    pub argmax: (usize, usize),
    pub count: usize,
    /// Full `count × count` l1 distance matrix, row-major.
    pub distances: Vec<f64>,
    /// Summary over the distinct pairs `i < j`.
    pub stats: DescriptiveStats,
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        sum += (x - y).abs();
    }
    sum
}

pub fn estimate_sensitivity(latents: &[LatentVector]) -> Result<SensitivityReport> {
    let n = latents.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "sensitivity needs at least 2 latents, got {n}"
        )));
    }
    let m = latents[0].len();
    for z in latents {
        Error::check_len(m, z.len())?;
    }
    let mut distances = vec![0.0; n * n];
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    let mut delta_f = 0.0;
    let mut argmax = (0, 1);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = l1_distance(&latents[i].values, &latents[j].values);
            distances[i * n + j] = d;
            distances[j * n + i] = d;
            pairs.push(d);
            if d > delta_f {
                delta_f = d;
                argmax = (i, j);
            }
        }
    }
    let top = if delta_f > 0.0 { delta_f } else { 1.0 };
    let edges: Vec<f64> = (0..=SENSITIVITY_BINS)
        .map(|k| top * k as f64 / SENSITIVITY_BINS as f64)
        .collect();
    let stats = descriptive_stats(&pairs, &edges)?;
    Ok(SensitivityReport {
        delta_f,
        argmax,
        count: n,
        distances,
        stats,
    })
}

impl SensitivityReport {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.count + j]
    }

    /// `bin_low,bin_high,count` rows for the pairwise distance histogram.
    pub fn histogram_csv(&self) -> String {
        let h = &self.stats.histogram;
        let mut out = String::from("bin_low,bin_high,count\n");
        for (k, c) in h.counts.iter().enumerate() {
            writeln!(out, "{},{},{}", h.edges[k], h.edges[k + 1], c).unwrap();
        }
        out
    }

    /// `i,j,distance` rows for the first `limit` latents, diagonal included.
    pub fn heatmap_csv(&self, limit: usize) -> String {
        let k = limit.min(self.count);
        let mut out = String::from("i,j,distance\n");
        for i in 0..k {
            for j in 0..k {
                writeln!(out, "{i},{j},{}", self.distance(i, j)).unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use crate::privacy::clip_latent;

    fn lv(v: &[f64]) -> LatentVector {
        LatentVector::new(v.to_vec(), 0).unwrap()
    }

    #[test]
    fn identical_latents_have_zero_sensitivity() {
        let r = estimate_sensitivity(&[lv(&[1.0, 2.0]), lv(&[1.0, 2.0])]).unwrap();
        assert_eq!(r.delta_f, 0.0);
    }

    #[test]
    fn hand_computed_triangle() {
        let r = estimate_sensitivity(&[lv(&[0.0, 0.0]), lv(&[1.0, 0.0]), lv(&[0.0, 2.0])]).unwrap();
        assert_eq!(r.delta_f, 3.0);
        assert_eq!(r.argmax, (1, 2));
        assert_eq!(r.distance(0, 0), 0.0);
        assert_eq!(r.stats.histogram.total(), 3);
    }

    #[test]
    fn errors() {
        assert!(estimate_sensitivity(&[lv(&[1.0])]).is_err());
        assert!(estimate_sensitivity(&[lv(&[1.0]), lv(&[1.0, 2.0])]).is_err());
    }

    #[test]
    fn clipped_latents_respect_two_b() {
        let mut rng = RngStream::new(6);
        let radius = 3.0;
        let latents: Vec<LatentVector> = (0..40)
            .map(|_| {
                lv(&(0..8)
                    .map(|_| 20.0 * rng.uniform_open())
                    .collect::<Vec<_>>())
            })
            .map(|z| clip_latent(&z, radius).unwrap())
            .collect();
        let r = estimate_sensitivity(&latents).unwrap();
        assert!(r.delta_f <= 2.0 * radius + 1e-9);
    }

    #[test]
    fn csv_exports() {
        let r = estimate_sensitivity(&[lv(&[0.0]), lv(&[1.0]), lv(&[3.0])]).unwrap();
        let hist = r.histogram_csv();
        assert!(hist.starts_with("bin_low,bin_high,count\n"));
        assert_eq!(hist.lines().count(), SENSITIVITY_BINS + 1);
        let heat = r.heatmap_csv(2);
        assert_eq!(heat, "i,j,distance\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n");
    }
}
