use crate::error::{Error, Result};

/// Counts per bin for caller-supplied edges, plus under/overflow.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// `counts[i]` covers `[edges[i], edges[i+1])`; the last bin is closed.
    pub counts: Vec<usize>,
    pub underflow: usize,
    pub overflow: usize,
}

impl Histogram {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::invalid("histogram needs at least two edges"));
        }
        if !edges.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid(
                "histogram edges must be strictly increasing",
            ));
        }
        let bins = edges.len() - 1;
        Ok(Histogram {
            edges,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        })
    }

    /// `bins` equal-width cells spanning `[low, high]`.
    pub fn uniform(low: f64, high: f64, bins: usize) -> Result<Self> {
        if bins == 0 || low.is_nan() || high.is_nan() || high <= low {
            return Err(Error::invalid(format!(
                "bad histogram range [{low}, {high}] with {bins} bins"
            )));
        }
        let width = (high - low) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| low + width * i as f64).collect();
        edges.push(high);
        Self::new(edges)
    }

    pub fn add(&mut self, value: f64) {
        let last = *self.edges.last().unwrap();
        if value < self.edges[0] {
            self.underflow += 1;
        } else if value > last || value.is_nan() {
            self.overflow += 1;
        } else if value == last {
            *self.counts.last_mut().unwrap() += 1;
        } else {
            // First edge strictly greater than value.
            let idx = self.edges.partition_point(|&e| e <= value);
            self.counts[idx - 1] += 1;
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.underflow + self.overflow
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescriptiveStats {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub histogram: Histogram,
}

pub fn descriptive_stats(values: &[f64], bin_edges: &[f64]) -> Result<DescriptiveStats> {
    if values.is_empty() {
        return Err(Error::invalid("descriptive statistics of an empty list"));
    }
    let mut histogram = Histogram::new(bin_edges.to_vec())?;
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
        sum += v;
        histogram.add(v);
    }
    Ok(DescriptiveStats {
        count: values.len(),
        min,
        max,
        mean: sum / values.len() as f64,
        histogram,
    })
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Nearest-rank percentile (`p` in (0, 100]) of unsorted values.
pub fn percentile_nearest_rank(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("percentile of an empty list"));
    }
    if !(p > 0.0 && p <= 100.0) {
        return Err(Error::invalid(format!(
            "percentile must be in (0, 100], got {p}"
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    #[test]
    fn basic_summary() {
        let s = descriptive_stats(&[1.0, 2.0, 3.0], &[0.0, 10.0]).unwrap();
        assert_eq!((s.min, s.max, s.mean), (1.0, 3.0, 2.0));
    }

    #[test]
    fn histogram_mass_in_single_bin() {
        let s = descriptive_stats(&[5.0; 4], &[0.0, 2.0, 4.0, 6.0, 8.0]).unwrap();
        assert_eq!(s.histogram.counts, vec![0, 0, 4, 0]);
        assert_eq!((s.histogram.underflow, s.histogram.overflow), (0, 0));
    }

    #[test]
    fn histogram_partitions_with_overflow() {
        let vals = [-1.0, 0.0, 0.5, 1.0, 2.0, 2.5];
        let s = descriptive_stats(&vals, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.histogram.counts, vec![2, 2]);
        assert_eq!(s.histogram.underflow, 1);
        assert_eq!(s.histogram.overflow, 1);
        assert_eq!(s.histogram.total(), vals.len());
    }

    #[test]
    fn rejects_empty_and_bad_edges() {
        assert!(descriptive_stats(&[], &[0.0, 1.0]).is_err());
        assert!(descriptive_stats(&[1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn laplace_draw_mean() {
        let mut rng = RngStream::new(21);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| crate::privacy::laplace_sample(&mut rng, 1.0).unwrap())
            .collect();
        let s = descriptive_stats(&draws, &[-50.0, 0.0, 50.0]).unwrap();
        assert!(s.mean.abs() < 0.05, "mean {}", s.mean);
    }

    #[test]
    fn nearest_rank_grid() {
        let grid: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        // ceil(0.95 * 100) = 95th order statistic = 0.94.
        assert_eq!(percentile_nearest_rank(&grid, 95.0).unwrap(), 0.94);
        assert_eq!(percentile_nearest_rank(&[0.2; 7], 95.0).unwrap(), 0.2);
    }
}
