//! The learned maps: encoder (image → latent) and decoder (latent → image),
//! trained together as an autoencoder.

mod file;
mod image;
mod model;
mod train;

pub(crate) use file::Reader;
pub use file::{
    load_model, model_from_bytes, model_to_bytes, save_model, MODEL_MAGIC, MODEL_VERSION,
};
pub use image::{Image, LatentVector};
pub use model::{Activation, AutoencoderModel, DenseLayer, Gradients, LayerGradient};
pub use train::{train, TrainConfig, TrainedModel};
