//! The feature-space Laplace mechanism, sensitivity estimation, budget
//! accounting and an empirical log-ratio check.
//!
//! Outputs must never be filtered or selected by comparing them with the
//! original image: any such selection depends on the private input and voids
//! the guarantee.

mod latent_io;
mod ledger;
mod mechanism;
mod sensitivity;
mod verify;

pub use latent_io::{
    latents_from_bytes, latents_to_bytes, latents_to_csv, read_latents, write_latents,
    LATENT_MAGIC, LATENT_VERSION,
};
pub use ledger::{LedgerEntry, PrivacyBudgetLedger};
pub use mechanism::{
    clip_latent, dp_image, dp_image_clipped, laplace_cdf, laplace_from_uniform, laplace_sample,
    perturb_latent, release_latent, Coverage, PrivacyParams, Release,
};
pub use sensitivity::{estimate_sensitivity, l1_distance, SensitivityReport, SENSITIVITY_BINS};
pub use verify::{verify_dp_empirical, DpRatioCheck, DP_RATIO_SLACK, MIN_DP_SAMPLES};
