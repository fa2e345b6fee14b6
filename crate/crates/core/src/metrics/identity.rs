//! Identity similarity from the model's own identity block.

use crate::codec::{AutoencoderModel, Image};
use crate::error::{Error, Result};
use crate::numerics::{percentile_nearest_rank, Histogram};

/// Bins used for the genuine/impostor score histograms.
pub const SCORE_BINS: usize = 20;

pub fn identity_embedding(model: &AutoencoderModel, image: &Image) -> Result<Vec<f64>> {
    Ok(model.encode(image)?.identity_block().to_vec())
}

/// `(cos(a, b) + 1) / 2`, or 0.5 when either vector is zero.
pub fn similarity_score(a: &[f64], b: &[f64]) -> Result<f64> {
    Error::check_len(a.len(), b.len())?;
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.5);
    }
    let cos = (dot / (na * nb)).clamp(-1.0, 1.0);
    Ok((cos + 1.0) / 2.0)
}

/// Identity similarity score of `y` against `x`.
pub fn iss(model: &AutoencoderModel, x: &Image, y: &Image) -> Result<f64> {
    similarity_score(
        &identity_embedding(model, x)?,
        &identity_embedding(model, y)?,
    )
}

/// Fraction of scores below `threshold`.
pub fn fppsr_from_scores(scores: &[f64], threshold: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::invalid("FPPSR needs at least one pair"));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(format!(
            "threshold must be in [0, 1], got {threshold}"
        )));
    }
    Ok(scores.iter().filter(|&&s| s < threshold).count() as f64 / scores.len() as f64)
}

/// Fraction of `(original, perturbed)` pairs whose similarity falls below
/// `threshold`.
pub fn fppsr(model: &AutoencoderModel, pairs: &[(&Image, &Image)], threshold: f64) -> Result<f64> {
    let scores = pairs
        .iter()
        .map(|(x, y)| iss(model, x, y))
        .collect::<Result<Vec<_>>>()?;
    fppsr_from_scores(&scores, threshold)
}

#[derive(Debug, Clone)]
pub struct ThresholdCalibration {
    pub threshold: f64,
    pub percentile: f64,
    pub genuine_scores: Vec<f64>,
    pub impostor_scores: Vec<f64>,
    pub genuine_histogram: Histogram,
    pub impostor_histogram: Histogram,
}

impl ThresholdCalibration {
    pub fn from_scores(genuine: Vec<f64>, impostor: Vec<f64>, percentile: f64) -> Result<Self> {
        if genuine.is_empty() || impostor.is_empty() {
            return Err(Error::invalid(
                "calibration needs genuine and impostor pairs",
            ));
        }
        let threshold = percentile_nearest_rank(&impostor, percentile)?;
        let mut genuine_histogram = Histogram::uniform(0.0, 1.0, SCORE_BINS)?;
        let mut impostor_histogram = genuine_histogram.clone();
        genuine.iter().for_each(|&s| genuine_histogram.add(s));
        impostor.iter().for_each(|&s| impostor_histogram.add(s));
        Ok(ThresholdCalibration {
            threshold,
            percentile,
            genuine_scores: genuine,
            impostor_scores: impostor,
            genuine_histogram,
            impostor_histogram,
        })
    }

    /// `bin_low,bin_high,genuine,impostor` rows.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,genuine,impostor\n");
        let edges = &self.genuine_histogram.edges;
        for i in 0..self.genuine_histogram.counts.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                edges[i],
                edges[i + 1],
                self.genuine_histogram.counts[i],
                self.impostor_histogram.counts[i]
            ));
        }
        out
    }
}

/// Threshold at the given percentile of impostor similarity.
pub fn calibrate_threshold(
    model: &AutoencoderModel,
    genuine: &[(&Image, &Image)],
    impostor: &[(&Image, &Image)],
    percentile: f64,
) -> Result<ThresholdCalibration> {
    if genuine.is_empty() || impostor.is_empty() {
        return Err(Error::invalid(
            "calibration needs genuine and impostor pairs",
        ));
    }
    let score = |pairs: &[(&Image, &Image)]| {
        pairs
            .iter()
            .map(|(x, y)| iss(model, x, y))
            .collect::<Result<Vec<_>>>()
    };
    ThresholdCalibration::from_scores(score(genuine)?, score(impostor)?, percentile)
}
