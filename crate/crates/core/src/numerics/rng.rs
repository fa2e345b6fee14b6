//! Seeded splitmix64 streams and the samplers built on them.
//!
//! Not a cryptographically secure generator: noise drawn here is fine for
//! experiments and reproducible reports, but a deployment that relies on the
//! privacy guarantee against a real adversary needs an OS-backed CSPRNG.

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A splitmix64 generator. Copying the stream copies its position, so a
/// stream can be treated as a plain value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    state: u64,
    stream_id: u64,
}

impl RngStream {
    /// Stream 0 of `seed`; its state starts at `seed` itself.
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    /// Independent child stream `stream_id` of `seed`. Parallel tasks use one
    /// child per task index so results do not depend on scheduling.
    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        RngStream {
            state: seed ^ mix64(stream_id.wrapping_mul(GOLDEN_GAMMA)),
            stream_id,
        }
    }

    /// Derive a child of this stream's current position without advancing it.
    pub fn child(&self, index: u64) -> Self {
        Self::with_stream(self.state ^ mix64(self.stream_id.wrapping_add(1)), index)
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform on (-0.5, 0.5]. The 53-bit grid value that would land on -0.5
    /// is mapped to +0.5 instead.
    pub fn uniform_open(&mut self) -> f64 {
        let k = self.next_u64() >> 11;
        if k == 0 {
            0.5
        } else {
            k as f64 / (1u64 << 53) as f64 - 0.5
        }
    }

    /// Uniform on [0, 1).
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform integer in `0..n` (n > 0), by rejection to avoid modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Box–Muller normal draw. Two uniforms are always consumed, even when
    /// `std == 0`, so stream positions do not depend on the parameters.
    pub fn gaussian(&mut self, mean: f64, std: f64) -> Result<f64> {
        if std.is_nan() || std < 0.0 {
            return Err(Error::invalid(format!(
                "gaussian std must be >= 0, got {std}"
            )));
        }
        // (0, 1]: ln never sees zero.
        let u1 = self.uniform_open() + 0.5;
        let u2 = self.uniform_open() + 0.5;
        if std == 0.0 {
            return Ok(mean);
        }
        let radius = (-2.0 * u1.ln()).sqrt();
        Ok(mean + std * radius * (std::f64::consts::TAU * u2).cos())
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // Reference recurrence evaluated independently.
        let mut s = RngStream::new(0);
        assert_eq!(s.next_u64(), 0xe220_a839_7b1d_cdaf);
        assert_eq!(s.next_u64(), 0x6e78_9e6a_a1b9_65f4);
        assert_eq!(RngStream::new(1).next_u64(), 0x910a_2dec_8902_5cc1);
        assert_eq!(RngStream::new(2).next_u64(), 0x9758_35de_1c97_56ce);
    }

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RngStream::new(42);
        let mut b = RngStream::new(42);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn child_streams_differ() {
        let mut a = RngStream::with_stream(7, 1);
        let mut b = RngStream::with_stream(7, 2);
        let same = (0..100).filter(|_| a.next_u64() == b.next_u64()).count();
        assert_eq!(same, 0);
        assert_eq!(RngStream::with_stream(7, 0), RngStream::new(7));
    }

    #[test]
    fn uniform_open_range_and_moments() {
        let mut s = RngStream::new(3);
        let n = 1_000_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let v = s.uniform_open();
            assert!(v > -0.5 && v <= 0.5);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.002, "mean {mean}");
        assert!((var - 1.0 / 12.0).abs() < 0.02 / 12.0, "var {var}");
    }

    #[test]
    fn gaussian_moments() {
        let mut s = RngStream::new(11);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| s.gaussian(0.0, 1.0).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.004, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn gaussian_degenerate_and_invalid() {
        let mut s = RngStream::new(5);
        assert_eq!(s.gaussian(5.0, 0.0).unwrap(), 5.0);
        assert!(s.gaussian(0.0, -1.0).is_err());
        assert!(s.gaussian(0.0, f64::NAN).is_err());
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut s = RngStream::new(9);
        let mut v: Vec<usize> = (0..50).collect();
        s.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }
}
