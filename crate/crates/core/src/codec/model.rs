//! Fully connected autoencoder with a hand-written backward pass.

use super::image::{Image, LatentVector};
use crate::error::{Error, Result};
use crate::numerics::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Identity,
    Sigmoid,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative expressed through the activation's output.
    fn slope_at_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
            Activation::Sigmoid => y * (1.0 - y),
        }
    }
}

/// `outputs × inputs` weights, row-major: row `j` feeds output unit `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        DenseLayer {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
            activation,
        }
    }

    fn row(&self, j: usize) -> &[f64] {
        &self.weights[j * self.inputs..(j + 1) * self.inputs]
    }

    fn forward(&self, input: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|j| {
                self.activation
                    .apply(dot(self.row(j), input) + self.biases[j])
            })
            .collect()
    }

    fn parameter_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

/// Dot product with four independent accumulators. The summation order is
/// fixed, so results are reproducible bit for bit.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Encoder `pixels → … → latent` followed by the mirrored decoder.
/// Hidden layers use tanh, the latent layer is linear and the output layer
/// is a logistic sigmoid.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderModel {
    layer_dims: Vec<usize>,
    layers: Vec<DenseLayer>,
    identity_len: usize,
    side: usize,
}

impl AutoencoderModel {
    /// All weights and biases zero.
    pub fn zeros(layer_dims: &[usize], identity_len: usize) -> Result<Self> {
        if layer_dims.len() < 3 || layer_dims.len().is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "layer_dims must have odd length >= 3 (encoder and mirrored decoder), got {layer_dims:?}"
            )));
        }
        if layer_dims.contains(&0) {
            return Err(Error::invalid("layer widths must be positive"));
        }
        let n = layer_dims.len();
        if (0..n / 2).any(|i| layer_dims[i] != layer_dims[n - 1 - i]) {
            return Err(Error::invalid(format!(
                "decoder must mirror the encoder: {layer_dims:?}"
            )));
        }
        let side = (layer_dims[0] as f64).sqrt().round() as usize;
        if side * side != layer_dims[0] {
            return Err(Error::invalid(format!(
                "input width {} is not a square image",
                layer_dims[0]
            )));
        }
        let latent_dim = layer_dims[n / 2];
        if identity_len > latent_dim {
            return Err(Error::invalid(format!(
                "identity_len {identity_len} exceeds latent_dim {latent_dim}"
            )));
        }
        let count = n - 1;
        let layers = (0..count)
            .map(|l| {
                let activation = if l == count / 2 - 1 {
                    Activation::Identity
                } else if l == count - 1 {
                    Activation::Sigmoid
                } else {
                    Activation::Tanh
                };
                DenseLayer::zeros(layer_dims[l], layer_dims[l + 1], activation)
            })
            .collect();
        Ok(AutoencoderModel {
            layer_dims: layer_dims.to_vec(),
            layers,
            identity_len,
            side,
        })
    }

    /// Weights uniform in `±scale/√fan_in`, biases zero.
    pub fn random(
        layer_dims: &[usize],
        identity_len: usize,
        scale: f64,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!(
                "weight init scale must be positive, got {scale}"
            )));
        }
        let mut model = Self::zeros(layer_dims, identity_len)?;
        for layer in &mut model.layers {
            let bound = scale / (layer.inputs as f64).sqrt();
            for w in &mut layer.weights {
                *w = 2.0 * bound * rng.uniform_open();
            }
        }
        Ok(model)
    }

    pub(crate) fn from_parts(
        layer_dims: &[usize],
        identity_len: usize,
        params: &[f64],
    ) -> Result<Self> {
        let mut model = Self::zeros(layer_dims, identity_len)?;
        Error::check_len(model.parameter_count(), params.len())?;
        let mut offset = 0;
        for layer in &mut model.layers {
            let nw = layer.weights.len();
            layer.weights.copy_from_slice(&params[offset..offset + nw]);
            offset += nw;
            let nb = layer.biases.len();
            layer.biases.copy_from_slice(&params[offset..offset + nb]);
            offset += nb;
        }
        Ok(model)
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn identity_len(&self) -> usize {
        self.identity_len
    }

    pub fn latent_dim(&self) -> usize {
        self.layer_dims[self.layer_dims.len() / 2]
    }

    pub fn input_len(&self) -> usize {
        self.layer_dims[0]
    }

    /// Side length of the square images the model consumes and produces.
    pub fn image_side(&self) -> usize {
        self.side
    }

    fn encoder_layers(&self) -> &[DenseLayer] {
        &self.layers[..self.layers.len() / 2]
    }

    fn decoder_layers(&self) -> &[DenseLayer] {
        &self.layers[self.layers.len() / 2..]
    }

    fn check_image(&self, image: &Image) -> Result<()> {
        if image.width() != self.side || image.height() != self.side {
            return Err(Error::DimensionMismatch {
                expected: self.input_len(),
                found: image.len(),
            });
        }
        Ok(())
    }

    pub fn encode(&self, image: &Image) -> Result<LatentVector> {
        self.check_image(image)?;
        let values = self
            .encoder_layers()
            .iter()
            .fold(centered_input(image), |x, layer| layer.forward(&x));
        LatentVector::new(values, self.identity_len)
    }

    pub fn decode(&self, latent: &LatentVector) -> Result<Image> {
        Error::check_len(self.latent_dim(), latent.len())?;
        let pixels = self
            .decoder_layers()
            .iter()
            .fold(latent.values.clone(), |x, layer| layer.forward(&x));
        // A saturated sigmoid can round to exactly 0 or 1, which is still in range.
        Image::new(self.side, self.side, pixels)
    }

    pub fn reconstruct(&self, image: &Image) -> Result<Image> {
        self.decode(&self.encode(image)?)
    }

    /// Mean squared per-pixel reconstruction error over `images`.
    pub fn reconstruction_mse(&self, images: &[Image]) -> Result<f64> {
        if images.is_empty() {
            return Err(Error::invalid("reconstruction error of an empty set"));
        }
        let mut total = 0.0;
        for image in images {
            let out = self.reconstruct(image)?;
            total += squared_error(out.pixels(), image.pixels());
        }
        Ok(total / (images.len() * self.input_len()) as f64)
    }

    /// Mean squared reconstruction error of `batch` and its gradient with
    /// respect to every weight and bias.
    pub fn loss_and_gradients(&self, batch: &[Image]) -> Result<(f64, Gradients)> {
        if batch.is_empty() {
            return Err(Error::invalid("empty batch"));
        }
        let mut grads = Gradients::zeros_like(self);
        let norm = (batch.len() * self.input_len()) as f64;
        let mut loss = 0.0;
        for image in batch {
            self.check_image(image)?;
            let mut acts = Vec::with_capacity(self.layers.len() + 1);
            acts.push(centered_input(image));
            for layer in &self.layers {
                let next = layer.forward(acts.last().unwrap());
                acts.push(next);
            }
            let output = acts.last().unwrap();
            loss += squared_error(output, image.pixels());

            let last = self.layers.last().unwrap();
            let mut delta: Vec<f64> = output
                .iter()
                .zip(image.pixels())
                .map(|(y, x)| 2.0 * (y - x) / norm * last.activation.slope_at_output(*y))
                .collect();

            for l in (0..self.layers.len()).rev() {
                let layer = &self.layers[l];
                let input = &acts[l];
                let g = &mut grads.layers[l];
                for (j, d) in delta.iter().enumerate() {
                    if *d != 0.0 {
                        axpy(
                            *d,
                            input,
                            &mut g.weights[j * layer.inputs..(j + 1) * layer.inputs],
                        );
                    }
                    g.biases[j] += d;
                }
                if l == 0 {
                    break;
                }
                let mut upstream = vec![0.0; layer.inputs];
                for (j, d) in delta.iter().enumerate() {
                    if *d != 0.0 {
                        axpy(*d, layer.row(j), &mut upstream);
                    }
                }
                let below = self.layers[l - 1].activation;
                for (u, a) in upstream.iter_mut().zip(input) {
                    *u *= below.slope_at_output(*a);
                }
                delta = upstream;
            }
        }
        Ok((loss / norm, grads))
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::parameter_count).sum()
    }

    /// Parameters flattened layer by layer, weights before biases.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.biases);
        }
        out
    }

    fn locate(&self, mut index: usize) -> (usize, bool, usize) {
        for (l, layer) in self.layers.iter().enumerate() {
            if index < layer.weights.len() {
                return (l, true, index);
            }
            index -= layer.weights.len();
            if index < layer.biases.len() {
                return (l, false, index);
            }
            index -= layer.biases.len();
        }
        panic!("parameter index out of range");
    }

    pub fn parameter(&self, index: usize) -> f64 {
        match self.locate(index) {
            (l, true, i) => self.layers[l].weights[i],
            (l, false, i) => self.layers[l].biases[i],
        }
    }

    pub fn set_parameter(&mut self, index: usize, value: f64) {
        match self.locate(index) {
            (l, true, i) => self.layers[l].weights[i] = value,
            (l, false, i) => self.layers[l].biases[i] = value,
        }
    }

    /// `θ ← θ + velocity` for a momentum update.
    pub(crate) fn apply_update(&mut self, velocity: &Gradients) {
        for (layer, v) in self.layers.iter_mut().zip(&velocity.layers) {
            axpy(1.0, &v.weights, &mut layer.weights);
            axpy(1.0, &v.biases, &mut layer.biases);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()))
    }

    /// Shifts the latent origin to `center` without changing the composed
    /// map: the encoder's last bias subtracts it and the decoder's first
    /// bias adds back its image under the first decoder layer.
    pub fn recenter_latent(&mut self, center: &[f64]) -> Result<()> {
        Error::check_len(self.latent_dim(), center.len())?;
        let mid = self.layers.len() / 2;
        for (b, c) in self.layers[mid - 1].biases.iter_mut().zip(center) {
            *b -= c;
        }
        let dec = &mut self.layers[mid];
        for j in 0..dec.outputs {
            let shift = dot(&dec.weights[j * dec.inputs..(j + 1) * dec.inputs], center);
            dec.biases[j] += shift;
        }
        Ok(())
    }

    /// Multiplies latent coordinate `i` by `scales[i]` without changing the
    /// composed map: the decoder's first layer divides it back out.
    pub fn rescale_latent(&mut self, scales: &[f64]) -> Result<()> {
        Error::check_len(self.latent_dim(), scales.len())?;
        if scales.iter().any(|s| !(s.is_finite() && *s != 0.0)) {
            return Err(Error::invalid("latent scales must be finite and non-zero"));
        }
        let mid = self.layers.len() / 2;
        let enc = &mut self.layers[mid - 1];
        for (i, s) in scales.iter().enumerate() {
            for w in &mut enc.weights[i * enc.inputs..(i + 1) * enc.inputs] {
                *w *= s;
            }
            enc.biases[i] *= s;
        }
        let dec = &mut self.layers[mid];
        for j in 0..dec.outputs {
            for (w, s) in dec.weights[j * dec.inputs..(j + 1) * dec.inputs]
                .iter_mut()
                .zip(scales)
            {
                *w /= s;
            }
        }
        Ok(())
    }
}

/// Pixels shifted to be centred on zero before the first layer.
fn centered_input(image: &Image) -> Vec<f64> {
    image.pixels().iter().map(|p| p - 0.5).collect()
}

fn squared_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Gradient (or momentum buffer) shaped like a model's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    pub fn zeros_like(model: &AutoencoderModel) -> Self {
        Gradients {
            layers: model
                .layers
                .iter()
                .map(|l| LayerGradient {
                    weights: vec![0.0; l.weights.len()],
                    biases: vec![0.0; l.biases.len()],
                })
                .collect(),
        }
    }

    /// Same flat order as [`AutoencoderModel::parameters`].
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases))
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self ← momentum · self − lr · grad`.
    pub(crate) fn momentum_step(&mut self, grad: &Gradients, momentum: f64, lr: f64) {
        for (v, g) in self.layers.iter_mut().zip(&grad.layers) {
            for (vi, gi) in v
                .weights
                .iter_mut()
                .zip(&g.weights)
                .chain(v.biases.iter_mut().zip(&g.biases))
            {
                *vi = momentum * *vi - lr * gi;
            }
        }
    }
}
