//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::codec::TrainConfig;
use crate::data::Split;
use crate::error::{Error, Result};
use crate::metrics::SsimParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityMode {
    /// Maximum pairwise l1 distance over the eval latents.
    Empirical,
    /// Latents are clipped to l1 radius `clip_radius`, so `Δf = 2·clip_radius`.
    Clip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskMode {
    All,
    IdentityOnly,
}

impl FromStr for SensitivityMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "empirical" => Ok(SensitivityMode::Empirical),
            "clip" => Ok(SensitivityMode::Clip),
            _ => Err(Error::Config(format!(
                "sensitivity_mode must be empirical or clip, got {s:?}"
            ))),
        }
    }
}

impl FromStr for MaskMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(MaskMode::All),
            "identity_only" => Ok(MaskMode::IdentityOnly),
            _ => Err(Error::Config(format!(
                "mask_mode must be all or identity_only, got {s:?}"
            ))),
        }
    }
}

impl SensitivityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SensitivityMode::Empirical => "empirical",
            SensitivityMode::Clip => "clip",
        }
    }
}

impl MaskMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MaskMode::All => "all",
            MaskMode::IdentityOnly => "identity_only",
        }
    }
}

/// Every setting a command reads. See [`RunConfig::KEYS`] for the documented
/// defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub image_side: usize,
    pub n_identities: usize,
    pub samples_per_identity: usize,
    pub eval_per_identity: usize,
    pub hidden_dims: Vec<usize>,
    pub latent_dim: usize,
    pub identity_len: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_init_scale: f64,
    pub normalize_latent: bool,
    pub epsilon: f64,
    pub sensitivity_mode: SensitivityMode,
    pub clip_radius: Option<f64>,
    pub delta_f: Option<f64>,
    pub mask_mode: MaskMode,
    pub perturb_split: Split,
    pub heatmap_size: usize,
    pub ssim_window: usize,
    pub ssim_sigma: f64,
    pub ssim_k1: f64,
    pub ssim_k2: f64,
    pub fppsr_percentile: f64,
    pub baselines: bool,
    pub mosaic_block: usize,
    pub match_tolerance: f64,
    pub sweep_levels: Vec<f64>,
    pub sweep_repetitions: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let train = TrainConfig::default();
        let ssim = SsimParams::default();
        RunConfig {
            seed: 1,
            output_dir: PathBuf::from("dp-image-out"),
            image_side: 32,
            n_identities: 50,
            samples_per_identity: 10,
            eval_per_identity: 2,
            hidden_dims: train.hidden_dims,
            latent_dim: train.latent_dim,
            identity_len: train.identity_len,
            epochs: train.epochs,
            batch_size: train.batch_size,
            learning_rate: train.learning_rate,
            momentum: train.momentum,
            weight_init_scale: train.weight_init_scale,
            normalize_latent: train.center_latent && train.standardize_latent,
            epsilon: 64.0,
            sensitivity_mode: SensitivityMode::Empirical,
            clip_radius: None,
            delta_f: None,
            mask_mode: MaskMode::All,
            perturb_split: Split::Eval,
            heatmap_size: 20,
            ssim_window: ssim.window,
            ssim_sigma: ssim.sigma,
            ssim_k1: ssim.k1,
            ssim_k2: ssim.k2,
            fppsr_percentile: 95.0,
            baselines: false,
            mosaic_block: 4,
            match_tolerance: 0.05,
            sweep_levels: vec![0.0, 0.25, 0.5, 1.0],
            sweep_repetitions: 100,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {key} = {value:?}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

fn parse_optional(key: &str, value: &str) -> Result<Option<f64>> {
    if value.is_empty() || value == "none" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// `(key, description)` for every accepted key.
    pub const KEYS: &'static [(&'static str, &'static str)] = &[
        ("seed", "root seed for every random stream (1)"),
        (
            "output_dir",
            "directory all commands read from and write to (dp-image-out)",
        ),
        (
            "image_side",
            "side of the square synthetic faces in pixels (32)",
        ),
        ("n_identities", "identities in the generated corpus (50)"),
        ("samples_per_identity", "images per identity (10)"),
        (
            "eval_per_identity",
            "images per identity held out for evaluation (2)",
        ),
        (
            "hidden_dims",
            "encoder hidden widths, mirrored by the decoder (256,64)",
        ),
        ("latent_dim", "latent vector length m (32)"),
        (
            "identity_len",
            "leading latent coordinates forming the identity block (12)",
        ),
        ("epochs", "training epochs (100)"),
        ("batch_size", "minibatch size (4)"),
        ("learning_rate", "SGD step size (1.0)"),
        ("momentum", "SGD momentum in [0, 1) (0.9)"),
        (
            "weight_init_scale",
            "initial weights uniform in ±scale/sqrt(fan_in) (1.0)",
        ),
        (
            "normalize_latent",
            "centre and unit-scale latent coordinates after training (true)",
        ),
        (
            "epsilon",
            "privacy budget per released image; noise scale is delta_f/epsilon (64)",
        ),
        ("sensitivity_mode", "empirical | clip (empirical)"),
        (
            "clip_radius",
            "l1 clipping radius B for clip mode; delta_f = 2B (none)",
        ),
        (
            "delta_f",
            "sensitivity override; otherwise read from the sensitivity command's output (none)",
        ),
        (
            "mask_mode",
            "all | identity_only coordinates receive noise (all)",
        ),
        (
            "perturb_split",
            "manifest split the perturb command releases (eval)",
        ),
        (
            "heatmap_size",
            "latents in the pairwise distance heatmap (20)",
        ),
        ("ssim_window", "SSIM Gaussian window side (11)"),
        ("ssim_sigma", "SSIM Gaussian window sigma (1.5)"),
        ("ssim_k1", "SSIM luminance constant factor (0.01)"),
        ("ssim_k2", "SSIM contrast constant factor (0.03)"),
        (
            "fppsr_percentile",
            "impostor-similarity percentile used as the threshold (95)",
        ),
        (
            "baselines",
            "evaluate also emits the blur/mosaic/DP-Image comparison (false)",
        ),
        (
            "mosaic_block",
            "mosaic tile side that sets the comparison's target similarity (4)",
        ),
        (
            "match_tolerance",
            "allowed mean similarity gap between comparison rows (0.05)",
        ),
        (
            "sweep_levels",
            "ascending noise levels delta_f/epsilon (0,0.25,0.5,1)",
        ),
        (
            "sweep_repetitions",
            "perturbations per eval image and level (100)",
        ),
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "seed" => self.seed = parse(key, v)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            "image_side" => self.image_side = parse(key, v)?,
            "n_identities" => self.n_identities = parse(key, v)?,
            "samples_per_identity" => self.samples_per_identity = parse(key, v)?,
            "eval_per_identity" => self.eval_per_identity = parse(key, v)?,
            "hidden_dims" => {
                self.hidden_dims = if v.is_empty() {
                    Vec::new()
                } else {
                    parse_list(key, v)?
                }
            }
            "latent_dim" => self.latent_dim = parse(key, v)?,
            "identity_len" => self.identity_len = parse(key, v)?,
            "epochs" => self.epochs = parse(key, v)?,
            "batch_size" => self.batch_size = parse(key, v)?,
            "learning_rate" => self.learning_rate = parse(key, v)?,
            "momentum" => self.momentum = parse(key, v)?,
            "weight_init_scale" => self.weight_init_scale = parse(key, v)?,
            "normalize_latent" => self.normalize_latent = parse(key, v)?,
            "epsilon" => self.epsilon = parse(key, v)?,
            "sensitivity_mode" => self.sensitivity_mode = v.parse()?,
            "clip_radius" => self.clip_radius = parse_optional(key, v)?,
            "delta_f" => self.delta_f = parse_optional(key, v)?,
            "mask_mode" => self.mask_mode = v.parse()?,
            "perturb_split" => {
                self.perturb_split = v
                    .parse()
                    .map_err(|_| Error::Config(format!("bad split {v:?}")))?
            }
            "heatmap_size" => self.heatmap_size = parse(key, v)?,
            "ssim_window" => self.ssim_window = parse(key, v)?,
            "ssim_sigma" => self.ssim_sigma = parse(key, v)?,
            "ssim_k1" => self.ssim_k1 = parse(key, v)?,
            "ssim_k2" => self.ssim_k2 = parse(key, v)?,
            "fppsr_percentile" => self.fppsr_percentile = parse(key, v)?,
            "baselines" => self.baselines = parse(key, v)?,
            "mosaic_block" => self.mosaic_block = parse(key, v)?,
            "match_tolerance" => self.match_tolerance = parse(key, v)?,
            "sweep_levels" => self.sweep_levels = parse_list(key, v)?,
            "sweep_repetitions" => self.sweep_repetitions = parse(key, v)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| x.to_string());
        Some(match key {
            "seed" => self.seed.to_string(),
            "output_dir" => self.output_dir.display().to_string(),
            "image_side" => self.image_side.to_string(),
            "n_identities" => self.n_identities.to_string(),
            "samples_per_identity" => self.samples_per_identity.to_string(),
            "eval_per_identity" => self.eval_per_identity.to_string(),
            "hidden_dims" => join(&self.hidden_dims),
            "latent_dim" => self.latent_dim.to_string(),
            "identity_len" => self.identity_len.to_string(),
            "epochs" => self.epochs.to_string(),
            "batch_size" => self.batch_size.to_string(),
            "learning_rate" => self.learning_rate.to_string(),
            "momentum" => self.momentum.to_string(),
            "weight_init_scale" => self.weight_init_scale.to_string(),
            "normalize_latent" => self.normalize_latent.to_string(),
            "epsilon" => self.epsilon.to_string(),
            "sensitivity_mode" => self.sensitivity_mode.as_str().to_string(),
            "clip_radius" => opt(self.clip_radius),
            "delta_f" => opt(self.delta_f),
            "mask_mode" => self.mask_mode.as_str().to_string(),
            "perturb_split" => self.perturb_split.to_string(),
            "heatmap_size" => self.heatmap_size.to_string(),
            "ssim_window" => self.ssim_window.to_string(),
            "ssim_sigma" => self.ssim_sigma.to_string(),
            "ssim_k1" => self.ssim_k1.to_string(),
            "ssim_k2" => self.ssim_k2.to_string(),
            "fppsr_percentile" => self.fppsr_percentile.to_string(),
            "baselines" => self.baselines.to_string(),
            "mosaic_block" => self.mosaic_block.to_string(),
            "match_tolerance" => self.match_tolerance.to_string(),
            "sweep_levels" => join(&self.sweep_levels),
            "sweep_repetitions" => self.sweep_repetitions.to_string(),
            _ => return None,
        })
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value, got {raw:?}", n + 1))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_text(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    /// Applies `--key value` pairs on top of the current values.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, args: &[S]) -> Result<()> {
        let mut it = args.iter().map(AsRef::as_ref);
        while let Some(flag) = it.next() {
            let key = flag
                .strip_prefix("--")
                .ok_or_else(|| Error::Config(format!("expected --key, got {flag:?}")))?;
            let value = it
                .next()
                .ok_or_else(|| Error::Config(format!("--{key} needs a value")))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.train_config()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.image_side < 16 {
            return Err(Error::Config("image_side must be >= 16".into()));
        }
        if self.n_identities < 2 {
            return Err(Error::Config("n_identities must be >= 2".into()));
        }
        if self.eval_per_identity > self.samples_per_identity {
            return Err(Error::Config(
                "eval_per_identity exceeds samples_per_identity".into(),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "epsilon must be finite and > 0, got {}",
                self.epsilon
            )));
        }
        if let Some(b) = self.clip_radius {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::Config(format!(
                    "clip_radius must be finite and > 0, got {b}"
                )));
            }
        }
        if let Some(d) = self.delta_f {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::Config(format!(
                    "delta_f must be finite and >= 0, got {d}"
                )));
            }
        }
        if !(0.0..=100.0).contains(&self.fppsr_percentile) || self.fppsr_percentile == 0.0 {
            return Err(Error::Config("fppsr_percentile must be in (0, 100]".into()));
        }
        if self.sweep_levels.is_empty()
            || self
                .sweep_levels
                .iter()
                .any(|l| !(*l >= 0.0 && l.is_finite()))
            || !self.sweep_levels.windows(2).all(|w| w[0] < w[1])
        {
            return Err(Error::Config(
                "sweep_levels must be non-negative and strictly ascending".into(),
            ));
        }
        if self.sweep_repetitions == 0 || self.mosaic_block == 0 {
            return Err(Error::Config(
                "sweep_repetitions and mosaic_block must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            hidden_dims: self.hidden_dims.clone(),
            latent_dim: self.latent_dim,
            identity_len: self.identity_len,
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            momentum: self.momentum,
            seed: self.seed,
            weight_init_scale: self.weight_init_scale,
            center_latent: self.normalize_latent,
            standardize_latent: self.normalize_latent,
        }
    }

    pub fn ssim_params(&self) -> SsimParams {
        SsimParams {
            window: self.ssim_window,
            sigma: self.ssim_sigma,
            k1: self.ssim_k1,
            k2: self.ssim_k2,
            range: 1.0,
        }
    }

    /// Every key with its current value, in documentation order. Parsing the
    /// result reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, _) in Self::KEYS {
            writeln!(out, "{key} = {}", self.get(key).expect("documented key")).unwrap();
        }
        out
    }
}
