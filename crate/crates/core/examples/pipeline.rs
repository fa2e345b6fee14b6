//! The full pipeline on a tiny corpus: generate, train, sensitivity,
//! perturb, evaluate with baselines, sweep.

use dp_image::cli::{
    cmd_evaluate, cmd_generate, cmd_perturb, cmd_sensitivity, cmd_sweep, cmd_train, sweep_csv,
    RunConfig,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let mut config = RunConfig::from_text(
        "n_identities = 8\nsamples_per_identity = 6\neval_per_identity = 2\nimage_side = 16\n\
         hidden_dims = 64\nlatent_dim = 12\nidentity_len = 4\nepochs = 150\n\
         ssim_window = 7\nsweep_repetitions = 3\nbaselines = true\n",
    )?;
    config.output_dir = dir.path().to_path_buf();

    cmd_generate(&config)?;
    let trained = cmd_train(&config)?;
    println!("train mse {:.5}", trained.train_mse);
    let sensitivity = cmd_sensitivity(&config)?;
    println!("delta_f {:.3}", sensitivity.delta_f);

    config.epsilon = 2.0 * sensitivity.delta_f;
    let perturbed = cmd_perturb(&config)?;
    println!(
        "{} releases, ledger total {}",
        perturbed.outputs.len(),
        perturbed.ledger.total()
    );

    let eval = cmd_evaluate(&config)?;
    print!("{}", eval.report.aggregate_csv());
    if let Some(c) = &eval.comparison {
        print!("{}", c.to_csv());
    }
    print!("{}", sweep_csv(&cmd_sweep(&config)?.rows));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
