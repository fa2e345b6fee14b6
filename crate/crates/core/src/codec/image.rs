use crate::error::{Error, Result};

/// Grayscale raster, row-major, every pixel in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid("image dimensions must be positive"));
        }
        Error::check_len(width * height, pixels.len())?;
        if let Some(bad) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid(format!("pixel value {bad} outside [0, 1]")));
        }
        Ok(Image {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image from values that are clamped into `[0, 1]` first.
    /// Non-finite values are rejected.
    pub fn from_clamped(width: usize, height: usize, mut pixels: Vec<f64>) -> Result<Self> {
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("non-finite pixel value"));
        }
        for p in &mut pixels {
            *p = p.clamp(0.0, 1.0);
        }
        Self::new(width, height, pixels)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn same_shape(&self, other: &Image) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

/// Point in the encoder's feature space. The first `identity_len`
/// coordinates form the identity block.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentVector {
    pub values: Vec<f64>,
    pub identity_len: usize,
}

impl LatentVector {
    pub fn new(values: Vec<f64>, identity_len: usize) -> Result<Self> {
        if identity_len > values.len() {
            return Err(Error::invalid(format!(
                "identity block of {identity_len} exceeds latent length {}",
                values.len()
            )));
        }
        Ok(LatentVector {
            values,
            identity_len,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn identity_block(&self) -> &[f64] {
        &self.values[..self.identity_len]
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_pixels() {
        assert!(Image::new(2, 1, vec![0.0, 1.5]).is_err());
        assert!(Image::new(2, 1, vec![0.0, f64::NAN]).is_err());
        assert!(Image::new(2, 2, vec![0.0; 3]).is_err());
        assert!(Image::from_clamped(2, 1, vec![-0.2, 1.5]).unwrap().pixels() == [0.0, 1.0]);
    }

    #[test]
    fn identity_block_bounds() {
        assert!(LatentVector::new(vec![0.0; 3], 4).is_err());
        let z = LatentVector::new(vec![1.0, -2.0, 3.0], 2).unwrap();
        assert_eq!(z.identity_block(), &[1.0, -2.0]);
        assert_eq!(z.l1_norm(), 6.0);
    }
}
