//! Perturb a latent vector with Laplace noise and charge the budget.

use dp_image::codec::LatentVector;
use dp_image::numerics::RngStream;
use dp_image::privacy::{laplace_sample, release_latent, PrivacyBudgetLedger, PrivacyParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = RngStream::new(7);

    let draws: Vec<f64> = (0..100_000)
        .map(|_| laplace_sample(&mut rng, 2.0))
        .collect::<Result<_, _>>()?;
    let var = draws.iter().map(|x| x * x).sum::<f64>() / draws.len() as f64;
    println!("Laplace(2) sample variance {var:.3} (analytic 8)");

    let z = LatentVector::new(vec![0.4, -1.1, 0.8, 0.0, 2.3, -0.6], 3)?;
    let params = PrivacyParams::all_coordinates(1.0, 2.0, z.len())?;
    let noisy = release_latent(&z, &params, &mut rng)?;
    println!(
        "scale b = {}, released {:?}",
        params.scale(),
        noisy.value.values
    );

    let identity_only = PrivacyParams::identity_only(1.0, 2.0, z.len(), z.identity_len)?;
    let masked = release_latent(&z, &identity_only, &mut rng)?;
    assert_eq!(masked.value.values[3..], z.values[3..]);
    println!(
        "identity-only release keeps coordinates 3.. unchanged: {:?}",
        masked.coverage
    );

    let mut ledger = PrivacyBudgetLedger::new();
    ledger.record_release(&noisy, 0)?;
    ledger.record_release(&masked, 0)?;
    print!("{}", ledger.to_csv());
    println!("total epsilon {}", ledger.total());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
