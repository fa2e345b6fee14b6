//! Sequential and parallel composition, and decoding as post-processing.

use dp_image::codec::{AutoencoderModel, Image};
use dp_image::numerics::RngStream;
use dp_image::privacy::{dp_image, release_latent, PrivacyBudgetLedger, PrivacyParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut ledger = PrivacyBudgetLedger::new();
    ledger.record(0.5, 0)?;
    ledger.record(0.25, 0)?;
    ledger.record(1.0, 1)?;
    println!(
        "group 0 {} group 1 {} -> total {}",
        ledger.group_total(0),
        ledger.group_total(1),
        ledger.total()
    );

    let mut rng = RngStream::new(4);
    let model = AutoencoderModel::random(&[256, 32, 8, 32, 256], 3, 1.0, &mut rng)?;
    let x = Image::filled(16, 16, 0.4)?;
    let params = PrivacyParams::all_coordinates(0.8, 4.0, 8)?;

    let latent = release_latent(&model.encode(&x)?, &params, &mut rng.child(1))?;
    let image = dp_image(&model, &x, &params, &mut rng.child(1))?;
    let decoded = latent.try_map(|z| model.decode(&z))?;
    assert_eq!(decoded, image);

    let mut a = PrivacyBudgetLedger::new();
    let mut b = PrivacyBudgetLedger::new();
    a.record_release(&decoded, 0)?;
    b.record_release(&image, 0)?;
    println!(
        "decoded release charged {}, direct image release charged {}",
        a.total(),
        b.total()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
