//! Distortion, SSIM and embedding-distance metrics, with the blur and
//! mosaic baselines.

use dp_image::data::generate_corpus;
use dp_image::metrics::{ald, blur_baseline, fed, l2_distance, mosaic_baseline, ssim, Norm};
use dp_image::numerics::RngStream;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = generate_corpus(2, 1, 0, 32, 5)?;
    let x = &corpus.images[0];
    for (name, y) in [
        ("blur sigma 1.5", blur_baseline(x, 1.5, 5)?),
        ("mosaic 4", mosaic_baseline(x, 4)?),
    ] {
        println!(
            "{name:>14}: l2 {:.3}  ald_inf {:.3}  ald_2 {:.3}  ssim {:.3}",
            l2_distance(x, &y)?,
            ald(x, &y, Norm::Inf)?,
            ald(x, &y, Norm::P(2))?,
            ssim(x, &y)?
        );
    }
    println!(
        "ssim of the other identity: {:.3}",
        ssim(x, &corpus.images[1])?
    );

    let mut rng = RngStream::new(1);
    let mut cloud = |shift: f64| -> Vec<Vec<f64>> {
        (0..200)
            .map(|_| (0..4).map(|_| rng.gaussian(shift, 1.0).unwrap()).collect())
            .collect()
    };
    let (a, b, c) = (cloud(0.0), cloud(0.0), cloud(1.0));
    println!(
        "FED same distribution {:.3}, shifted by 1 per axis {:.3}",
        fed(&a, &b)?,
        fed(&a, &c)?
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
