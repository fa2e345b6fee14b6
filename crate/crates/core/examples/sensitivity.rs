//! Empirical and clipped sensitivity of a set of latents.

use dp_image::codec::LatentVector;
use dp_image::numerics::RngStream;
use dp_image::privacy::{clip_latent, estimate_sensitivity};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = RngStream::new(11);
    let latents: Vec<LatentVector> = (0..40)
        .map(|_| {
            LatentVector::new(
                (0..16).map(|_| rng.gaussian(0.0, 1.0).unwrap()).collect(),
                6,
            )
        })
        .collect::<Result<_, _>>()?;

    let report = estimate_sensitivity(&latents)?;
    println!(
        "empirical delta_f {:.3} at pair {:?}; mean pair distance {:.3}",
        report.delta_f, report.argmax, report.stats.mean
    );
    print!("{}", report.histogram_csv());

    let radius = 5.0;
    let clipped: Vec<LatentVector> = latents
        .iter()
        .map(|z| clip_latent(z, radius))
        .collect::<Result<_, _>>()?;
    let bounded = estimate_sensitivity(&clipped)?;
    assert!(bounded.delta_f <= 2.0 * radius + 1e-9);
    println!(
        "clipped to l1 radius {radius}: delta_f {:.3} <= {}",
        bounded.delta_f,
        2.0 * radius
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
