//! Distortion, perceptual and identity metrics, and the blur/mosaic
//! baselines used for comparison.

mod baselines;
mod distortion;
mod fed;
mod identity;
mod report;
mod ssim;

pub use baselines::{blur_baseline, mosaic_baseline};
pub use distortion::{ald, l2_distance, Norm};
pub use fed::{fed, frechet_distance, EmbeddingGaussian, PSD_TOLERANCE};
pub use identity::{
    calibrate_threshold, fppsr, fppsr_from_scores, identity_embedding, iss, similarity_score,
    ThresholdCalibration, SCORE_BINS,
};
pub use report::{MetricsReport, MetricsRow};
pub use ssim::{ssim, ssim_with, SsimParams};
