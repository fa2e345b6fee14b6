use super::image::Image;
use super::model::{AutoencoderModel, Gradients};
use crate::error::{Error, Result};
use crate::numerics::RngStream;

/// Architecture and optimizer settings for [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Encoder hidden widths between the pixel layer and the latent layer;
    /// the decoder mirrors them.
    pub hidden_dims: Vec<usize>,
    pub latent_dim: usize,
    pub identity_len: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
    /// Initial weights are uniform in `±weight_init_scale/√fan_in`.
    pub weight_init_scale: f64,
    /// Move the latent origin to the training-set mean after the last epoch.
    pub center_latent: bool,
    /// Rescale each latent coordinate to unit root-mean-square over the
    /// training set after the last epoch (applied after centering).
    pub standardize_latent: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden_dims: vec![256, 64],
            latent_dim: 32,
            identity_len: 12,
            epochs: 100,
            batch_size: 4,
            learning_rate: 1.0,
            momentum: 0.9,
            seed: 1,
            weight_init_scale: 1.0,
            center_latent: true,
            standardize_latent: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be >= 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be >= 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::invalid(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.identity_len > self.latent_dim {
            return Err(Error::invalid("identity_len exceeds latent_dim"));
        }
        Ok(())
    }

    pub fn layer_dims(&self, input_len: usize) -> Vec<usize> {
        let mut dims = vec![input_len];
        dims.extend(&self.hidden_dims);
        dims.push(self.latent_dim);
        dims.extend(self.hidden_dims.iter().rev());
        dims.push(input_len);
        dims
    }
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub model: AutoencoderModel,
    /// Mean minibatch loss of each epoch.
    pub loss_trace: Vec<f64>,
}

/// Minibatch gradient descent with momentum on the mean squared
/// reconstruction error. A pure function of `(corpus, config)`.
pub fn train(corpus: &[Image], config: &TrainConfig) -> Result<TrainedModel> {
    config.validate()?;
    let first = corpus
        .first()
        .ok_or_else(|| Error::invalid("empty training corpus"))?;
    if first.width() != first.height() {
        return Err(Error::invalid("training images must be square"));
    }
    for image in corpus {
        first.same_shape(image)?;
    }

    let mut rng = RngStream::new(config.seed);
    let mut init_rng = rng.child(0);
    let mut model = AutoencoderModel::random(
        &config.layer_dims(first.len()),
        config.identity_len,
        config.weight_init_scale,
        &mut init_rng,
    )?;
    let mut velocity = Gradients::zeros_like(&model);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut loss_trace = Vec::with_capacity(config.epochs);
    let mut batch = Vec::with_capacity(config.batch_size);

    for epoch in 0..config.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| corpus[i].clone()));
            let (loss, grads) = model.loss_and_gradients(&batch)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "loss {loss} at epoch {epoch}, batch {b}"
                )));
            }
            velocity.momentum_step(&grads, config.momentum, config.learning_rate);
            model.apply_update(&velocity);
            epoch_loss += loss;
            batches += 1;
        }
        if !model.is_finite() {
            return Err(Error::NonFinite(format!(
                "non-finite parameters after epoch {epoch}"
            )));
        }
        loss_trace.push(epoch_loss / batches as f64);
    }

    if config.center_latent || config.standardize_latent {
        let latents = corpus
            .iter()
            .map(|x| model.encode(x))
            .collect::<Result<Vec<_>>>()?;
        let m = model.latent_dim();
        let n = corpus.len() as f64;
        let mut center = vec![0.0; m];
        if config.center_latent {
            for z in &latents {
                for (c, v) in center.iter_mut().zip(&z.values) {
                    *c += v / n;
                }
            }
            model.recenter_latent(&center)?;
        }
        if config.standardize_latent {
            let mut scales = vec![0.0; m];
            for z in &latents {
                for ((s, v), c) in scales.iter_mut().zip(&z.values).zip(&center) {
                    *s += (v - c) * (v - c) / n;
                }
            }
            for s in &mut scales {
                *s = if *s > 0.0 { 1.0 / s.sqrt() } else { 1.0 };
            }
            model.rescale_latent(&scales)?;
        }
    }

    Ok(TrainedModel { model, loss_trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(side: usize, cx: f64) -> Image {
        let px = (0..side * side)
            .map(|i| {
                let (x, y) = ((i % side) as f64, (i / side) as f64);
                (-((x - cx).powi(2) + (y - 3.5).powi(2)) / 6.0).exp() * 0.9 + 0.05
            })
            .collect();
        Image::new(side, side, px).unwrap()
    }

    fn small_config() -> TrainConfig {
        TrainConfig {
            hidden_dims: vec![16],
            latent_dim: 4,
            identity_len: 2,
            epochs: 300,
            batch_size: 1,
            learning_rate: 0.5,
            momentum: 0.9,
            seed: 3,
            weight_init_scale: 1.0,
            center_latent: false,
            standardize_latent: false,
        }
    }

    #[test]
    fn overfits_a_single_image() {
        let corpus = vec![blob(8, 3.0)];
        let trained = train(&corpus, &small_config()).unwrap();
        assert!(
            *trained.loss_trace.last().unwrap() < 1e-3,
            "{:?}",
            trained.loss_trace.last()
        );
        assert!(trained.model.reconstruction_mse(&corpus).unwrap() < 1e-3);
    }

    #[test]
    fn training_is_deterministic() {
        let corpus: Vec<Image> = (0..6).map(|i| blob(8, 1.0 + i as f64)).collect();
        let cfg = TrainConfig {
            epochs: 5,
            batch_size: 4,
            center_latent: true,
            ..small_config()
        };
        let a = train(&corpus, &cfg).unwrap();
        let b = train(&corpus, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.loss_trace, b.loss_trace);
    }

    #[test]
    fn normalization_preserves_the_map() {
        let corpus: Vec<Image> = (0..6).map(|i| blob(8, 1.0 + i as f64)).collect();
        let raw = train(
            &corpus,
            &TrainConfig {
                epochs: 20,
                ..small_config()
            },
        )
        .unwrap()
        .model;
        let cfg = TrainConfig {
            epochs: 20,
            center_latent: true,
            standardize_latent: true,
            ..small_config()
        };
        let norm = train(&corpus, &cfg).unwrap().model;
        let zs: Vec<_> = corpus.iter().map(|x| norm.encode(x).unwrap()).collect();
        for k in 0..4 {
            let mean = zs.iter().map(|z| z.values[k]).sum::<f64>() / 6.0;
            let ms = zs.iter().map(|z| z.values[k] * z.values[k]).sum::<f64>() / 6.0;
            assert!(mean.abs() < 1e-9);
            assert!((ms - 1.0).abs() < 1e-9);
        }
        for x in &corpus {
            let (a, b) = (raw.reconstruct(x).unwrap(), norm.reconstruct(x).unwrap());
            for (p, q) in a.pixels().iter().zip(b.pixels()) {
                assert!((p - q).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_config_and_corpus() {
        let corpus = vec![blob(8, 3.0)];
        assert!(train(
            &corpus,
            &TrainConfig {
                epochs: 0,
                ..small_config()
            }
        )
        .is_err());
        assert!(train(
            &corpus,
            &TrainConfig {
                momentum: 1.0,
                ..small_config()
            }
        )
        .is_err());
        assert!(train(
            &corpus,
            &TrainConfig {
                learning_rate: 0.0,
                ..small_config()
            }
        )
        .is_err());
        assert!(train(&[], &small_config()).is_err());
        let mixed = vec![blob(8, 3.0), Image::filled(4, 4, 0.5).unwrap()];
        assert!(train(&mixed, &small_config()).is_err());
    }

    #[test]
    fn divergence_is_reported() {
        let corpus: Vec<Image> = (0..4).map(|i| blob(8, 2.0 + i as f64)).collect();
        let cfg = TrainConfig {
            learning_rate: 1e200,
            epochs: 3,
            ..small_config()
        };
        match train(&corpus, &cfg) {
            Err(Error::NonFinite(msg)) => assert!(msg.contains("epoch")),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
