#[path = "../examples/laplace_mechanism.rs"]
mod laplace_mechanism;

#[path = "../examples/sensitivity.rs"]
mod sensitivity;

#[path = "../examples/synthetic_faces.rs"]
mod synthetic_faces;

#[path = "../examples/train_autoencoder.rs"]
mod train_autoencoder;

#[path = "../examples/image_metrics.rs"]
mod image_metrics;

#[path = "../examples/verify_dp.rs"]
mod verify_dp;

#[path = "../examples/budget_ledger.rs"]
mod budget_ledger;

#[path = "../examples/pipeline.rs"]
mod pipeline;

#[test]
fn laplace_mechanism_example_runs() {
    laplace_mechanism::run_example().expect("laplace_mechanism example should run");
}

#[test]
fn sensitivity_example_runs() {
    sensitivity::run_example().expect("sensitivity example should run");
}

#[test]
fn synthetic_faces_example_runs() {
    synthetic_faces::run_example().expect("synthetic_faces example should run");
}

#[test]
fn train_autoencoder_example_runs() {
    train_autoencoder::run_example().expect("train_autoencoder example should run");
}

#[test]
fn image_metrics_example_runs() {
    image_metrics::run_example().expect("image_metrics example should run");
}

#[test]
fn verify_dp_example_runs() {
    verify_dp::run_example().expect("verify_dp example should run");
}

#[test]
fn budget_ledger_example_runs() {
    budget_ledger::run_example().expect("budget_ledger example should run");
}

#[test]
fn pipeline_example_runs() {
    pipeline::run_example().expect("pipeline example should run");
}
