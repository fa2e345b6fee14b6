//! Laplace noise in feature space and the encode → perturb → decode release.

use crate::codec::{AutoencoderModel, Image, LatentVector};
use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Inverse-CDF Laplace transform of a uniform draw `u ∈ (-0.5, 0.5]`.
///
/// `u = 0.5` would give `ln 0`; the log argument is floored at the smallest
/// positive normal so the result stays finite (about `708·b`).
pub fn laplace_from_uniform(u: f64, scale: f64) -> f64 {
    if scale == 0.0 || u == 0.0 {
        return 0.0;
    }
    let tail = (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE);
    -scale * u.signum() * tail.ln()
}

/// One draw from Laplace(0, `scale`). A uniform is consumed even when
/// `scale == 0`, which returns exactly 0.
pub fn laplace_sample(rng: &mut RngStream, scale: f64) -> Result<f64> {
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!(
            "laplace scale must be finite and >= 0, got {scale}"
        )));
    }
    let u = rng.uniform_open();
    Ok(laplace_from_uniform(u, scale))
}

/// Analytic Laplace(0, `scale`) CDF.
pub fn laplace_cdf(x: f64, scale: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / scale).exp()
    } else {
        1.0 - 0.5 * (-x / scale).exp()
    }
}

/// Budget, sensitivity and the coordinates that receive noise.
///
/// "No noise" is expressed as `sensitivity == 0`, which makes `scale == 0`;
/// an infinite epsilon is never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyParams {
    epsilon: f64,
    sensitivity: f64,
    scale: f64,
    mask: Vec<bool>,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, sensitivity: f64, mask: Vec<bool>) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(format!(
                "epsilon must be finite and > 0, got {epsilon}"
            )));
        }
        if !(sensitivity >= 0.0 && sensitivity.is_finite()) {
            return Err(Error::invalid(format!(
                "sensitivity must be finite and >= 0, got {sensitivity}"
            )));
        }
        Ok(PrivacyParams {
            epsilon,
            sensitivity,
            scale: sensitivity / epsilon,
            mask,
        })
    }

    /// Noise on every one of `latent_dim` coordinates.
    pub fn all_coordinates(epsilon: f64, sensitivity: f64, latent_dim: usize) -> Result<Self> {
        Self::new(epsilon, sensitivity, vec![true; latent_dim])
    }

    /// Noise on the first `identity_len` coordinates only.
    pub fn identity_only(
        epsilon: f64,
        sensitivity: f64,
        latent_dim: usize,
        identity_len: usize,
    ) -> Result<Self> {
        if identity_len > latent_dim {
            return Err(Error::invalid("identity_len exceeds latent_dim"));
        }
        Self::new(
            epsilon,
            sensitivity,
            (0..latent_dim).map(|i| i < identity_len).collect(),
        )
    }

    /// Parameters for a noise level `Δf/ε`. Level 0 means no noise; any other
    /// level spends `ε = Δf/level`.
    pub fn for_level(delta_f: f64, level: f64, mask: Vec<bool>) -> Result<Self> {
        if !(level >= 0.0 && level.is_finite()) {
            return Err(Error::invalid(format!(
                "noise level must be finite and >= 0, got {level}"
            )));
        }
        if level == 0.0 {
            return Self::new(1.0, 0.0, mask);
        }
        if delta_f.is_nan() || delta_f <= 0.0 {
            return Err(Error::invalid(format!(
                "a positive noise level needs delta_f > 0, got {delta_f}"
            )));
        }
        Self::new(delta_f / level, delta_f, mask)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    /// Laplace scale `b = Δf/ε`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_noiseless(&self) -> bool {
        self.scale == 0.0 || !self.mask.iter().any(|&m| m)
    }

    /// Whether some coordinates pass through unperturbed.
    pub fn is_partial(&self) -> bool {
        self.mask.iter().any(|&m| !m)
    }

    pub fn coverage(&self) -> Coverage {
        if self.is_noiseless() {
            Coverage::Noiseless
        } else if self.is_partial() {
            Coverage::PartialCoordinates
        } else {
            Coverage::Full
        }
    }
}

/// What guarantee a release carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// Every coordinate perturbed: the release is ε-DP with respect to Δf.
    Full,
    /// Only masked coordinates perturbed; the guarantee covers that subspace
    /// and the rest passes through unchanged.
    PartialCoordinates,
    /// No noise at all; no privacy guarantee and no budget charged.
    Noiseless,
}

impl Coverage {
    pub fn as_str(self) -> &'static str {
        match self {
            Coverage::Full => "full",
            Coverage::PartialCoordinates => "partial-coordinate",
            Coverage::Noiseless => "noiseless",
        }
    }
}

/// A released value with the budget it consumed. Transforming the value with
/// [`Release::map`] keeps the charge: decoding adds nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct Release<T> {
    pub value: T,
    pub epsilon: f64,
    pub coverage: Coverage,
}

impl<T> Release<T> {
    /// Post-processing that never looks at the original input.
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Release<U> {
        Release {
            value: f(self.value),
            epsilon: self.epsilon,
            coverage: self.coverage,
        }
    }

    pub fn try_map<U>(self, f: impl FnOnce(T) -> Result<U>) -> Result<Release<U>> {
        Ok(Release {
            value: f(self.value)?,
            epsilon: self.epsilon,
            coverage: self.coverage,
        })
    }
}

/// Scales `latent` down to l1 radius `radius` if it lies outside that ball.
/// Any two clipped latents are then at most `2·radius` apart in l1.
pub fn clip_latent(latent: &LatentVector, radius: f64) -> Result<LatentVector> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!(
            "clip radius must be finite and > 0, got {radius}"
        )));
    }
    let norm = latent.l1_norm();
    if norm <= radius {
        return Ok(latent.clone());
    }
    let factor = radius / norm;
    Ok(LatentVector {
        values: latent.values.iter().map(|v| v * factor).collect(),
        identity_len: latent.identity_len,
    })
}

/// Adds i.i.d. Laplace(b) noise to each masked coordinate, in coordinate
/// order. Unmasked coordinates are copied unchanged.
pub fn perturb_latent(
    latent: &LatentVector,
    params: &PrivacyParams,
    rng: &mut RngStream,
) -> Result<LatentVector> {
    Error::check_len(latent.len(), params.mask.len())?;
    let mut values = latent.values.clone();
    for (v, &masked) in values.iter_mut().zip(&params.mask) {
        if masked {
            *v += laplace_sample(rng, params.scale)?;
        }
    }
    LatentVector::new(values, latent.identity_len)
}

pub fn release_latent(
    latent: &LatentVector,
    params: &PrivacyParams,
    rng: &mut RngStream,
) -> Result<Release<LatentVector>> {
    Ok(Release {
        value: perturb_latent(latent, params, rng)?,
        epsilon: params.epsilon,
        coverage: params.coverage(),
    })
}

/// Encode, perturb the latent, decode. The privacy charge is that of the
/// latent release.
pub fn dp_image(
    model: &AutoencoderModel,
    image: &Image,
    params: &PrivacyParams,
    rng: &mut RngStream,
) -> Result<Release<Image>> {
    let latent = model.encode(image)?;
    release_latent(&latent, params, rng)?.try_map(|z| model.decode(&z))
}

/// [`dp_image`] with the latent clipped to l1 radius `radius` before noise,
/// for use with `sensitivity = 2·radius`.
pub fn dp_image_clipped(
    model: &AutoencoderModel,
    image: &Image,
    params: &PrivacyParams,
    radius: f64,
    rng: &mut RngStream,
) -> Result<Release<Image>> {
    let latent = clip_latent(&model.encode(image)?, radius)?;
    release_latent(&latent, params, rng)?.try_map(|z| model.decode(&z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inverse_cdf_closed_form() {
        assert!((laplace_from_uniform(0.25, 1.0) - 0.5f64.ln().abs()).abs() < 1e-15);
        assert!((laplace_from_uniform(-0.25, 2.0) + 2.0 * 2f64.ln()).abs() < 1e-15);
        assert_eq!(laplace_from_uniform(0.3, 0.0), 0.0);
        assert!(laplace_from_uniform(0.5, 1.0).is_finite());
    }

    #[test]
    fn sampler_rejects_negative_scale() {
        let mut rng = RngStream::new(0);
        assert!(laplace_sample(&mut rng, -1.0).is_err());
        assert!(laplace_sample(&mut rng, f64::NAN).is_err());
        assert_eq!(laplace_sample(&mut rng, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn laplace_variance() {
        let mut rng = RngStream::new(77);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n)
            .map(|_| laplace_sample(&mut rng, 1.0).unwrap())
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((var - 2.0).abs() < 0.04, "var {var}");
    }

    #[test]
    fn params_scale_and_validation() {
        let p = PrivacyParams::all_coordinates(0.5, 2.0, 4).unwrap();
        assert_eq!(p.scale(), 2.0 / 0.5);
        assert_eq!(p.coverage(), Coverage::Full);
        assert!(PrivacyParams::all_coordinates(0.0, 1.0, 4).is_err());
        assert!(PrivacyParams::all_coordinates(f64::INFINITY, 1.0, 4).is_err());
        assert!(PrivacyParams::all_coordinates(1.0, -1.0, 4).is_err());
        let id = PrivacyParams::identity_only(1.0, 1.0, 4, 2).unwrap();
        assert_eq!(id.mask(), &[true, true, false, false]);
        assert_eq!(id.coverage(), Coverage::PartialCoordinates);
        let zero = PrivacyParams::for_level(10.0, 0.0, vec![true; 4]).unwrap();
        assert_eq!(zero.scale(), 0.0);
        assert_eq!(zero.coverage(), Coverage::Noiseless);
        let lvl = PrivacyParams::for_level(8.0, 0.5, vec![true; 4]).unwrap();
        assert_eq!(lvl.epsilon(), 16.0);
        assert_eq!(lvl.scale(), 0.5);
    }

    #[test]
    fn clip_examples() {
        let z = LatentVector::new(vec![1.0, 1.0], 1).unwrap();
        assert_eq!(clip_latent(&z, 4.0).unwrap(), z);
        let z = LatentVector::new(vec![3.0, 1.0], 1).unwrap();
        assert_eq!(clip_latent(&z, 2.0).unwrap().values, vec![1.5, 0.5]);
        assert!(clip_latent(&z, 0.0).is_err());
    }

    #[test]
    fn noiseless_and_unmasked_pass_through() {
        let z = LatentVector::new(vec![0.3, -1.2, 4.0], 1).unwrap();
        let mut rng = RngStream::new(1);
        let none = PrivacyParams::all_coordinates(1.0, 0.0, 3).unwrap();
        assert_eq!(perturb_latent(&z, &none, &mut rng).unwrap(), z);
        let masked_off = PrivacyParams::new(1.0, 5.0, vec![false; 3]).unwrap();
        assert_eq!(perturb_latent(&z, &masked_off, &mut rng).unwrap(), z);
        assert!(perturb_latent(
            &z,
            &PrivacyParams::all_coordinates(1.0, 1.0, 2).unwrap(),
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn perturbation_is_unbiased() {
        let z = LatentVector::new(vec![1.0, -2.0, 0.5], 3).unwrap();
        let params = PrivacyParams::all_coordinates(1.0, 1.0, 3).unwrap();
        let mut rng = RngStream::new(19);
        let reps = 100_000;
        let mut sums = [0.0; 3];
        for _ in 0..reps {
            let out = perturb_latent(&z, &params, &mut rng).unwrap();
            for (s, v) in sums.iter_mut().zip(&out.values) {
                *s += v;
            }
        }
        for (s, v) in sums.iter().zip(&z.values) {
            assert!((s / reps as f64 - v).abs() < 0.02 * params.scale());
        }
    }

    proptest! {
        #[test]
        fn clip_bounds_norm(vals in proptest::collection::vec(-50.0f64..50.0, 1..16), radius in 0.01f64..20.0) {
            let z = LatentVector::new(vals, 0).unwrap();
            prop_assert!(clip_latent(&z, radius).unwrap().l1_norm() <= radius + 1e-12);
        }

        #[test]
        fn masked_perturbation_leaves_unmasked_bits(
            vals in proptest::collection::vec(-10.0f64..10.0, 8),
            mask in proptest::collection::vec(any::<bool>(), 8),
            seed in any::<u64>(),
        ) {
            let z = LatentVector::new(vals, 4).unwrap();
            let params = PrivacyParams::new(0.7, 3.0, mask.clone()).unwrap();
            let out = perturb_latent(&z, &params, &mut RngStream::new(seed)).unwrap();
            for ((o, v), &m) in out.values.iter().zip(&z.values).zip(&mask) {
                if !m {
                    prop_assert_eq!(o.to_bits(), v.to_bits());
                }
            }
        }
    }
}
