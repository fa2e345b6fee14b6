use std::fmt::Write as _;

use super::distortion::{ald, l2_distance, Norm};
use super::fed::fed;
use super::identity::{fppsr_from_scores, identity_embedding, similarity_score};
use super::ssim::{ssim_with, SsimParams};
use crate::codec::{AutoencoderModel, Image};
use crate::error::{Error, Result};
use crate::numerics::{mean, par_map};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub image_id: usize,
    pub l2: f64,
    pub ald_inf: f64,
    pub ssim: f64,
    pub iss: f64,
}

/// Per-image metrics of `(original, perturbed)` pairs plus aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub rows: Vec<MetricsRow>,
    pub mean_l2: f64,
    pub mean_ald_inf: f64,
    pub mean_ssim: f64,
    pub mean_iss: f64,
    /// Between the identity embeddings of the originals and of the outputs.
    pub fed: f64,
    pub fppsr: f64,
    pub threshold: f64,
}

struct Scored {
    row: MetricsRow,
    original: Vec<f64>,
    perturbed: Vec<f64>,
}

impl MetricsReport {
    /// Pairs are `(image_id, original, perturbed)`; rows keep the given order
    /// and aggregates are summed in that order.
    pub fn evaluate(
        model: &AutoencoderModel,
        pairs: &[(usize, &Image, &Image)],
        threshold: f64,
        ssim_params: &SsimParams,
    ) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::invalid("a metrics report needs at least 2 pairs"));
        }
        let scored = par_map(pairs, |&(image_id, x, y)| -> Result<Scored> {
            let original = identity_embedding(model, x)?;
            let perturbed = identity_embedding(model, y)?;
            let row = MetricsRow {
                image_id,
                l2: l2_distance(x, y)?,
                ald_inf: ald(x, y, Norm::Inf)?,
                ssim: ssim_with(x, y, ssim_params)?,
                iss: similarity_score(&original, &perturbed)?,
            };
            Ok(Scored {
                row,
                original,
                perturbed,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

        let column =
            |f: fn(&MetricsRow) -> f64| scored.iter().map(|s| f(&s.row)).collect::<Vec<_>>();
        let iss = column(|r| r.iss);
        let originals: Vec<Vec<f64>> = scored.iter().map(|s| s.original.clone()).collect();
        let perturbed: Vec<Vec<f64>> = scored.iter().map(|s| s.perturbed.clone()).collect();
        Ok(MetricsReport {
            mean_l2: mean(&column(|r| r.l2)),
            mean_ald_inf: mean(&column(|r| r.ald_inf)),
            mean_ssim: mean(&column(|r| r.ssim)),
            mean_iss: mean(&iss),
            fed: fed(&originals, &perturbed)?,
            fppsr: fppsr_from_scores(&iss, threshold)?,
            threshold,
            rows: scored.into_iter().map(|s| s.row).collect(),
        })
    }

    /// `image_id,l2,ald_inf,ssim,iss` rows.
    pub fn rows_csv(&self) -> String {
        let mut out = String::from("image_id,l2,ald_inf,ssim,iss\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.image_id, r.l2, r.ald_inf, r.ssim, r.iss
            )
            .unwrap();
        }
        out
    }

    /// `metric,value` rows.
    pub fn aggregate_csv(&self) -> String {
        let mut out = String::from("metric,value\n");
        for (name, value) in [
            ("mean_l2", self.mean_l2),
            ("mean_ald_inf", self.mean_ald_inf),
            ("mean_ssim", self.mean_ssim),
            ("mean_iss", self.mean_iss),
            ("fed", self.fed),
            ("fppsr", self.fppsr),
            ("threshold", self.threshold),
        ] {
            writeln!(out, "{name},{value}").unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    #[test]
    fn identical_pairs_report() {
        let mut rng = RngStream::new(9);
        let model = AutoencoderModel::random(&[256, 8, 4, 8, 256], 2, 1.0, &mut rng).unwrap();
        let images: Vec<Image> = (0..4)
            .map(|_| Image::new(16, 16, (0..256).map(|_| rng.uniform01()).collect()).unwrap())
            .collect();
        let pairs: Vec<(usize, &Image, &Image)> =
            images.iter().enumerate().map(|(i, x)| (i, x, x)).collect();
        let r = MetricsReport::evaluate(&model, &pairs, 0.9, &SsimParams::default()).unwrap();
        assert_eq!(r.mean_l2, 0.0);
        assert!((r.mean_ssim - 1.0).abs() < 1e-12);
        assert!((r.mean_iss - 1.0).abs() < 1e-12);
        assert_eq!(r.fppsr, 0.0);
        assert!(r.fed.abs() < 1e-8);
        assert!(r
            .rows_csv()
            .starts_with("image_id,l2,ald_inf,ssim,iss\n0,0,0,"));
        assert_eq!(r.aggregate_csv().lines().count(), 8);
        assert!(MetricsReport::evaluate(&model, &pairs[..1], 0.9, &SsimParams::default()).is_err());
    }
}
