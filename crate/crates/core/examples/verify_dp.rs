//! Compare the empirical output distributions of two neighbouring inputs.

use dp_image::numerics::RngStream;
use dp_image::privacy::verify_dp_empirical;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = RngStream::new(21);
    for epsilon in [0.5, 1.0, 2.0] {
        let check = verify_dp_empirical(1.0 / epsilon, 1.0, 200_000, 64, &mut rng)?;
        println!(
            "epsilon {epsilon}: max |log ratio| {:.3} (threshold {:.3}, worst cell {}) pass {}",
            check.max_log_ratio, check.threshold, check.worst_cell, check.pass
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
