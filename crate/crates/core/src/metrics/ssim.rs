//! Structural similarity over Gaussian-weighted windows.

use crate::codec::Image;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    /// Window side in pixels (odd).
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    /// Dynamic range of pixel values.
    pub range: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        SsimParams {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            range: 1.0,
        }
    }
}

fn gaussian_window(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let mut w = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            let (dx, dy) = (x as f64 - c, y as f64 - c);
            w.push((-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp());
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

pub fn ssim(x: &Image, y: &Image) -> Result<f64> {
    ssim_with(x, y, &SsimParams::default())
}

/// Mean SSIM over every window position that fits inside the image.
pub fn ssim_with(x: &Image, y: &Image, params: &SsimParams) -> Result<f64> {
    x.same_shape(y)?;
    let k = params.window;
    if k == 0 || params.sigma.is_nan() || params.sigma <= 0.0 {
        return Err(Error::invalid(
            "SSIM window must be non-empty with sigma > 0",
        ));
    }
    if x.width() < k || x.height() < k {
        return Err(Error::invalid(format!(
            "image {}x{} smaller than the {k}x{k} SSIM window",
            x.width(),
            x.height()
        )));
    }
    let c1 = (params.k1 * params.range).powi(2);
    let c2 = (params.k2 * params.range).powi(2);
    let w = gaussian_window(k, params.sigma);
    let (xs, ys) = (x.pixels(), y.pixels());
    let width = x.width();

    let mut total = 0.0;
    let mut windows = 0usize;
    for oy in 0..=(x.height() - k) {
        for ox in 0..=(width - k) {
            let at = |dx: usize, dy: usize| (oy + dy) * width + ox + dx;
            let (mut mx, mut my) = (0.0, 0.0);
            for dy in 0..k {
                for dx in 0..k {
                    let wt = w[dy * k + dx];
                    mx += wt * xs[at(dx, dy)];
                    my += wt * ys[at(dx, dy)];
                }
            }
            let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
            for dy in 0..k {
                for dx in 0..k {
                    let wt = w[dy * k + dx];
                    let a = xs[at(dx, dy)] - mx;
                    let b = ys[at(dx, dy)] - my;
                    vx += wt * a * a;
                    vy += wt * b * b;
                    cxy += wt * a * b;
                }
            }
            let num = (2.0 * mx * my + c1) * (2.0 * cxy + c2);
            let den = (mx * mx + my * my + c1) * (vx + vy + c2);
            total += num / den;
            windows += 1;
        }
    }
    Ok(total / windows as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn random_image(rng: &mut RngStream, side: usize) -> Image {
        Image::new(
            side,
            side,
            (0..side * side).map(|_| rng.uniform01()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identical_images_score_one() {
        let mut rng = RngStream::new(2);
        let x = random_image(&mut rng, 32);
        assert!((ssim(&x, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_images_closed_form() {
        let x = Image::filled(16, 16, 0.5).unwrap();
        let y = Image::filled(16, 16, 0.25).unwrap();
        let expected = (2.0 * 0.125 + 1e-4) / (0.3125 + 1e-4);
        assert!((ssim(&x, &y).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.80006).abs() < 1e-5);
    }

    #[test]
    fn symmetric_and_bounded() {
        let mut rng = RngStream::new(3);
        for _ in 0..10 {
            let (a, b) = (random_image(&mut rng, 20), random_image(&mut rng, 20));
            let s = ssim(&a, &b).unwrap();
            assert!((s - ssim(&b, &a).unwrap()).abs() < 1e-15);
            assert!((-1.0..=1.0).contains(&s));
        }
    }

    #[test]
    fn too_small_for_window() {
        let x = Image::filled(10, 10, 0.5).unwrap();
        assert!(ssim(&x, &x).is_err());
    }
}
