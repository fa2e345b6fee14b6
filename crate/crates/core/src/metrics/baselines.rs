//! Classical obfuscation baselines: Gaussian blur and mosaic pixelation.

use crate::codec::Image;
use crate::error::{Error, Result};

fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let k: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = k.iter().sum();
    k.into_iter().map(|v| v / total).collect()
}

/// Separable Gaussian blur with clamp-to-edge padding. Radius 0 returns the
/// input unchanged.
pub fn blur_baseline(x: &Image, sigma: f64, radius: usize) -> Result<Image> {
    if radius == 0 {
        return Ok(x.clone());
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!(
            "blur sigma must be finite and > 0, got {sigma}"
        )));
    }
    let kernel = gaussian_kernel(sigma, radius);
    let (w, h) = (x.width(), x.height());
    let r = radius as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let src = x.pixels();
    let mut rows = vec![0.0; w * h];
    for y in 0..h {
        for xx in 0..w {
            rows[y * w + xx] = kernel
                .iter()
                .enumerate()
                .map(|(i, k)| k * src[y * w + clamp(xx as isize + i as isize - r, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for xx in 0..w {
            out[y * w + xx] = kernel
                .iter()
                .enumerate()
                .map(|(i, k)| k * rows[clamp(y as isize + i as isize - r, h) * w + xx])
                .sum();
        }
    }
    Image::from_clamped(w, h, out)
}

/// Replaces each `block × block` tile (smaller at the right and bottom
/// edges) by its mean.
pub fn mosaic_baseline(x: &Image, block: usize) -> Result<Image> {
    if block == 0 {
        return Err(Error::invalid("mosaic block must be >= 1"));
    }
    let (w, h) = (x.width(), x.height());
    let src = x.pixels();
    let mut out = vec![0.0; w * h];
    for ty in (0..h).step_by(block) {
        for tx in (0..w).step_by(block) {
            let (y1, x1) = ((ty + block).min(h), (tx + block).min(w));
            let mut sum = 0.0;
            for y in ty..y1 {
                sum += src[y * w + tx..y * w + x1].iter().sum::<f64>();
            }
            let avg = sum / ((y1 - ty) * (x1 - tx)) as f64;
            for y in ty..y1 {
                out[y * w + tx..y * w + x1].fill(avg);
            }
        }
    }
    Image::from_clamped(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn random_image(rng: &mut RngStream, w: usize, h: usize) -> Image {
        Image::new(w, h, (0..w * h).map(|_| rng.uniform01()).collect()).unwrap()
    }

    #[test]
    fn blur_constant_and_identity() {
        let c = Image::filled(12, 12, 0.37).unwrap();
        let b = blur_baseline(&c, 2.0, 4).unwrap();
        assert!(b.pixels().iter().all(|p| (p - 0.37).abs() < 1e-12));
        let mut rng = RngStream::new(1);
        let x = random_image(&mut rng, 9, 7);
        assert_eq!(blur_baseline(&x, 1.0, 0).unwrap(), x);
        assert!(blur_baseline(&x, 0.0, 2).is_err());
    }

    #[test]
    fn blur_spreads_and_keeps_mass() {
        let mut px = vec![0.0; 15 * 15];
        px[7 * 15 + 7] = 1.0;
        let x = Image::new(15, 15, px).unwrap();
        let b = blur_baseline(&x, 1.5, 3).unwrap();
        let total: f64 = b.pixels().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(b.get(7, 7) < 1.0 && b.get(8, 7) > 0.0);
        assert!((b.get(6, 7) - b.get(8, 7)).abs() < 1e-15);
    }

    #[test]
    fn blur_and_mosaic_keep_range() {
        let mut rng = RngStream::new(2);
        for _ in 0..5 {
            let x = random_image(&mut rng, 10, 13);
            for img in [
                blur_baseline(&x, 3.0, 5).unwrap(),
                mosaic_baseline(&x, 3).unwrap(),
            ] {
                assert!(img.pixels().iter().all(|p| (0.0..=1.0).contains(p)));
            }
        }
    }

    #[test]
    fn mosaic_examples() {
        let mut rng = RngStream::new(3);
        let x = random_image(&mut rng, 8, 8);
        assert_eq!(mosaic_baseline(&x, 1).unwrap(), x);
        let whole = mosaic_baseline(&x, 8).unwrap();
        let mean = x.pixels().iter().sum::<f64>() / 64.0;
        assert!(whole.pixels().iter().all(|p| (p - mean).abs() < 1e-12));
        let tiny = Image::new(2, 2, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(mosaic_baseline(&tiny, 2).unwrap().pixels(), &[0.5; 4]);
        assert!(mosaic_baseline(&x, 0).is_err());
    }

    #[test]
    fn mosaic_partial_tiles_use_own_mean() {
        let x = Image::new(3, 1, vec![0.2, 0.4, 0.9]).unwrap();
        let m = mosaic_baseline(&x, 2).unwrap();
        assert!((m.pixels()[0] - 0.3).abs() < 1e-15);
        assert_eq!(m.pixels()[2], 0.9);
    }
}
