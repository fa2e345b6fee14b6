//! Train a small autoencoder, save it and encode an image.

use dp_image::codec::{load_model, save_model, train, TrainConfig};
use dp_image::data::{generate_corpus, Split};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_corpus(6, 5, 1, 16, 2)?;
    let train_set = corpus.split_images(Split::Train);
    let config = TrainConfig {
        hidden_dims: vec![64],
        latent_dim: 12,
        identity_len: 4,
        epochs: 30,
        ..TrainConfig::default()
    };
    let trained = train(&train_set, &config)?;
    println!(
        "loss {:.5} -> {:.5} over {} epochs",
        trained.loss_trace[0],
        trained.loss_trace.last().unwrap(),
        config.epochs
    );
    let eval = corpus.split_images(Split::Eval);
    println!(
        "eval reconstruction mse {:.5}",
        trained.model.reconstruction_mse(&eval)?
    );

    let dir = tempfile::tempdir()?;
    let path = dir.path().join("model.dpim");
    save_model(&trained.model, &path)?;
    let model = load_model(&path)?;
    assert_eq!(model, trained.model);

    let z = model.encode(&eval[0])?;
    println!(
        "latent of eval image 0, identity block {:?}",
        z.identity_block()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
