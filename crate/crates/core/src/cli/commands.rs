//! The pipeline verbs. Each reads and writes files under `output_dir` and
//! leaves a `provenance_<verb>.cfg` that replays the run.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::{MaskMode, RunConfig, SensitivityMode};
use crate::codec::{load_model, save_model, train, AutoencoderModel, Image};
use crate::data::{generate_corpus, read_pgm, write_pgm, DatasetManifest, Split};
use crate::error::{Error, Result};
use crate::metrics::{
    blur_baseline, identity_embedding, l2_distance, mosaic_baseline, similarity_score, ssim_with,
    MetricsReport, ThresholdCalibration,
};
use crate::numerics::{mean, par_map, RngStream};
use crate::privacy::{
    dp_image, dp_image_clipped, estimate_sensitivity, latents_to_csv, write_latents,
    PrivacyBudgetLedger, PrivacyParams, Release, SensitivityReport,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const MODEL_FILE: &str = "model.dpim";
pub const LOSS_TRACE_FILE: &str = "loss_trace.csv";
pub const LATENTS_FILE: &str = "latents.dplz";
pub const SENSITIVITY_FILE: &str = "sensitivity.cfg";
pub const PERTURBED_DIR: &str = "perturbed";
pub const PAIRS_FILE: &str = "perturbed/pairs.csv";
pub const LEDGER_FILE: &str = "ledger.csv";
pub const METRICS_ROWS_FILE: &str = "metrics_rows.csv";
pub const METRICS_SUMMARY_FILE: &str = "metrics_summary.csv";
pub const ISS_HISTOGRAM_FILE: &str = "iss_histogram.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_LEDGER_FILE: &str = "sweep_ledger.csv";

const PERTURB_STREAM: u64 = 1;
const SWEEP_STREAM: u64 = 2;
const COMPARISON_STREAM: u64 = 3;

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(parent) => fs::create_dir_all(parent).map_err(|e| Error::io(parent, e)),
        None => Ok(()),
    }
}

/// Writes `provenance_<verb>.cfg`: the full config plus commented results.
/// Passing it back with `--config` repeats the run.
fn write_provenance(config: &RunConfig, verb: &str, results: &[(&str, String)]) -> Result<PathBuf> {
    let mut text = format!("# dp-image {VERSION}\n# command: {verb}\n");
    for (k, v) in results {
        writeln!(text, "# {k}: {v}").unwrap();
    }
    text.push_str(&config.to_text());
    let path = config.output_dir.join(format!("provenance_{verb}.cfg"));
    write_file(&path, text)?;
    Ok(path)
}

fn read_manifest(config: &RunConfig) -> Result<DatasetManifest> {
    DatasetManifest::read(config.output_dir.join(MANIFEST_FILE))
}

fn read_model(config: &RunConfig) -> Result<AutoencoderModel> {
    load_model(config.output_dir.join(MODEL_FILE))
}

/// An image from the manifest: its row index, identity and pixels.
#[derive(Debug, Clone)]
pub struct LabeledImage {
    pub image_id: usize,
    pub identity_id: usize,
    pub image: Image,
}

pub fn load_split(config: &RunConfig, split: Split) -> Result<Vec<LabeledImage>> {
    let manifest = read_manifest(config)?;
    Ok(manifest
        .load_split(&config.output_dir, split)?
        .into_iter()
        .map(|(image_id, e, image)| LabeledImage {
            image_id,
            identity_id: e.identity_id,
            image,
        })
        .collect())
}

/// Sensitivity for the configured mode: `2·clip_radius` in clip mode, else
/// the `delta_f` key or the value the sensitivity command recorded.
pub fn resolve_delta_f(config: &RunConfig) -> Result<f64> {
    match config.sensitivity_mode {
        SensitivityMode::Clip => config
            .clip_radius
            .map(|b| 2.0 * b)
            .ok_or(Error::MissingSensitivity),
        SensitivityMode::Empirical => {
            if let Some(d) = config.delta_f {
                return Ok(d);
            }
            let path = config.output_dir.join(SENSITIVITY_FILE);
            if !path.exists() {
                return Err(Error::MissingSensitivity);
            }
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let mut recorded = config.clone();
            recorded.apply_text(&text)?;
            recorded.delta_f.ok_or(Error::MissingSensitivity)
        }
    }
}

pub fn noise_mask(config: &RunConfig, model: &AutoencoderModel) -> Vec<bool> {
    let k = model.identity_len();
    (0..model.latent_dim())
        .map(|i| config.mask_mode == MaskMode::All || i < k)
        .collect()
}

fn release(
    config: &RunConfig,
    model: &AutoencoderModel,
    image: &Image,
    params: &PrivacyParams,
    rng: &mut RngStream,
) -> Result<Release<Image>> {
    match (config.sensitivity_mode, config.clip_radius) {
        (SensitivityMode::Clip, Some(radius)) => {
            dp_image_clipped(model, image, params, radius, rng)
        }
        (SensitivityMode::Clip, None) => Err(Error::MissingSensitivity),
        (SensitivityMode::Empirical, _) => dp_image(model, image, params, rng),
    }
}

/// Genuine pairs share an identity; impostor pairs do not.
pub fn calibrate_on(
    model: &AutoencoderModel,
    images: &[LabeledImage],
    percentile: f64,
) -> Result<ThresholdCalibration> {
    let embeddings = par_map(images, |x| identity_embedding(model, &x.image))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (mut genuine, mut impostor) = (Vec::new(), Vec::new());
    for i in 0..images.len() {
        for j in (i + 1)..images.len() {
            let s = similarity_score(&embeddings[i], &embeddings[j])?;
            if images[i].identity_id == images[j].identity_id {
                genuine.push(s);
            } else {
                impostor.push(s);
            }
        }
    }
    ThresholdCalibration::from_scores(genuine, impostor, percentile)
}

#[derive(Debug, Clone)]
pub struct GenerateSummary {
    pub images: usize,
    pub manifest: PathBuf,
}

pub fn cmd_generate(config: &RunConfig) -> Result<GenerateSummary> {
    config.validate()?;
    let corpus = generate_corpus(
        config.n_identities,
        config.samples_per_identity,
        config.eval_per_identity,
        config.image_side,
        config.seed,
    )?;
    for (entry, image) in corpus.manifest.entries.iter().zip(&corpus.images) {
        let path = config.output_dir.join(&entry.path);
        create_parent(&path)?;
        write_pgm(image, &path)?;
    }
    let manifest = config.output_dir.join(MANIFEST_FILE);
    corpus.manifest.write(&manifest)?;
    write_provenance(
        config,
        "generate",
        &[("images", corpus.images.len().to_string())],
    )?;
    Ok(GenerateSummary {
        images: corpus.images.len(),
        manifest,
    })
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub model: AutoencoderModel,
    pub loss_trace: Vec<f64>,
    pub train_mse: f64,
    pub eval_mse: Option<f64>,
}

pub fn cmd_train(config: &RunConfig) -> Result<TrainSummary> {
    config.validate()?;
    let train_set: Vec<Image> = load_split(config, Split::Train)?
        .into_iter()
        .map(|x| x.image)
        .collect();
    if train_set.is_empty() {
        return Err(Error::invalid("the manifest has no training images"));
    }
    let trained = train(&train_set, &config.train_config())?;
    save_model(&trained.model, config.output_dir.join(MODEL_FILE))?;
    let mut trace = String::from("epoch,loss\n");
    for (e, l) in trained.loss_trace.iter().enumerate() {
        writeln!(trace, "{e},{l}").unwrap();
    }
    write_file(&config.output_dir.join(LOSS_TRACE_FILE), trace)?;

    let train_mse = trained.model.reconstruction_mse(&train_set)?;
    let eval_set: Vec<Image> = load_split(config, Split::Eval)?
        .into_iter()
        .map(|x| x.image)
        .collect();
    let eval_mse = if eval_set.is_empty() {
        None
    } else {
        Some(trained.model.reconstruction_mse(&eval_set)?)
    };
    write_provenance(
        config,
        "train",
        &[
            (
                "final_epoch_loss",
                trained
                    .loss_trace
                    .last()
                    .copied()
                    .unwrap_or(f64::NAN)
                    .to_string(),
            ),
            ("train_mse", train_mse.to_string()),
            (
                "eval_mse",
                eval_mse.map_or_else(|| "none".into(), |v| v.to_string()),
            ),
        ],
    )?;
    Ok(TrainSummary {
        model: trained.model,
        loss_trace: trained.loss_trace,
        train_mse,
        eval_mse,
    })
}

/// Pairwise l1 distances of the eval latents. Records `delta_f` (or `2B` in
/// clip mode, where the latents are clipped first) for later commands.
pub fn cmd_sensitivity(config: &RunConfig) -> Result<SensitivityReport> {
    config.validate()?;
    let model = read_model(config)?;
    let eval = load_split(config, Split::Eval)?;
    let latents = eval
        .iter()
        .map(|x| {
            let z = model.encode(&x.image)?;
            match (config.sensitivity_mode, config.clip_radius) {
                (SensitivityMode::Clip, Some(b)) => crate::privacy::clip_latent(&z, b),
                (SensitivityMode::Clip, None) => Err(Error::MissingSensitivity),
                (SensitivityMode::Empirical, _) => Ok(z),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let report = estimate_sensitivity(&latents)?;
    let out = &config.output_dir;
    write_latents(&latents, out.join(LATENTS_FILE))?;
    write_file(&out.join("latents.csv"), latents_to_csv(&latents))?;
    write_file(
        &out.join("sensitivity_histogram.csv"),
        report.histogram_csv(),
    )?;
    write_file(
        &out.join("sensitivity_heatmap.csv"),
        report.heatmap_csv(config.heatmap_size),
    )?;
    let recorded = match config.sensitivity_mode {
        SensitivityMode::Empirical => report.delta_f,
        SensitivityMode::Clip => 2.0 * config.clip_radius.unwrap_or(0.0),
    };
    write_file(
        &out.join(SENSITIVITY_FILE),
        format!(
            "# {} sensitivity over {} eval latents\ndelta_f = {recorded}\n",
            config.sensitivity_mode.as_str(),
            latents.len()
        ),
    )?;
    write_provenance(
        config,
        "sensitivity",
        &[
            ("delta_f", recorded.to_string()),
            ("empirical_max_l1", report.delta_f.to_string()),
        ],
    )?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct PerturbSummary {
    pub outputs: Vec<(usize, PathBuf)>,
    pub delta_f: f64,
    pub scale: f64,
    pub ledger: PrivacyBudgetLedger,
}

/// Releases every image of `perturb_split` at the configured epsilon. Each
/// image uses its own child stream, so results do not depend on threading.
pub fn cmd_perturb(config: &RunConfig) -> Result<PerturbSummary> {
    config.validate()?;
    let model = read_model(config)?;
    let delta_f = resolve_delta_f(config)?;
    let params = PrivacyParams::new(config.epsilon, delta_f, noise_mask(config, &model))?;
    let manifest = read_manifest(config)?;
    let inputs = load_split(config, config.perturb_split)?;
    let root = RngStream::with_stream(config.seed, PERTURB_STREAM);
    let releases = par_map(&inputs, |x| {
        release(
            config,
            &model,
            &x.image,
            &params,
            &mut root.child(x.image_id as u64),
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut ledger = PrivacyBudgetLedger::new();
    let mut pairs = String::from("image_id,original,perturbed\n");
    let mut outputs = Vec::with_capacity(inputs.len());
    for (x, r) in inputs.iter().zip(&releases) {
        ledger.record_release(r, 0)?;
        let original = &manifest.entries[x.image_id].path;
        let name = original
            .file_name()
            .ok_or_else(|| Error::invalid(format!("bad path {original:?}")))?;
        let rel = Path::new(PERTURBED_DIR).join(name);
        let path = config.output_dir.join(&rel);
        create_parent(&path)?;
        write_pgm(&r.value, &path)?;
        writeln!(
            pairs,
            "{},{},{}",
            x.image_id,
            original.display(),
            rel.display()
        )
        .unwrap();
        outputs.push((x.image_id, path));
    }
    write_file(&config.output_dir.join(PAIRS_FILE), pairs)?;
    write_file(&config.output_dir.join(LEDGER_FILE), ledger.to_csv())?;
    write_provenance(
        config,
        "perturb",
        &[
            ("delta_f", delta_f.to_string()),
            ("scale", params.scale().to_string()),
            ("coverage", params.coverage().as_str().to_string()),
            ("ledger_total", ledger.total().to_string()),
        ],
    )?;
    Ok(PerturbSummary {
        outputs,
        delta_f,
        scale: params.scale(),
        ledger,
    })
}

/// One method's row in the baseline comparison.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub method: &'static str,
    /// Mosaic block, blur sigma or noise level `Δf/ε`.
    pub parameter: f64,
    pub epsilon: Option<f64>,
    pub report: MetricsReport,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub target_iss: f64,
    pub tolerance: f64,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    /// Whether every row's mean similarity is within tolerance of the target.
    pub fn matched(&self) -> bool {
        self.rows
            .iter()
            .all(|r| (r.report.mean_iss - self.target_iss).abs() <= self.tolerance)
    }

    pub fn row(&self, method: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    /// Whether the DP-Image row has the lowest embedding distance.
    pub fn dp_has_lowest_fed(&self) -> bool {
        let dp = self.row("dp-image").map_or(f64::INFINITY, |r| r.report.fed);
        self.rows.iter().all(|r| r.report.fed >= dp)
    }

    /// `method,parameter,epsilon,mean_iss,mean_l2,mean_ald_inf,mean_ssim,fed,fppsr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "method,parameter,epsilon,mean_iss,mean_l2,mean_ald_inf,mean_ssim,fed,fppsr\n",
        );
        for r in &self.rows {
            let m = &r.report;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.method,
                r.parameter,
                r.epsilon.map_or_else(String::new, |e| e.to_string()),
                m.mean_iss,
                m.mean_l2,
                m.mean_ald_inf,
                m.mean_ssim,
                m.fed,
                m.fppsr
            )
            .unwrap();
        }
        out
    }
}

fn blur_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil().max(1.0) as usize
}

/// Largest `x` in `[lo, hi]` (to bisection precision) with `f(x) >= target`,
/// for `f` decreasing. Returns `hi` when `f(hi)` is still above the target.
fn bisect_decreasing(
    mut lo: f64,
    mut hi: f64,
    target: f64,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    if f(hi)? >= target {
        return Ok(hi);
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (flo, fhi) = (f(lo)?, f(hi)?);
    Ok(if (flo - target).abs() <= (fhi - target).abs() {
        lo
    } else {
        hi
    })
}

/// Blur, mosaic and DP-Image outputs of `originals` at matched mean
/// similarity. The mosaic block fixes the target; blur sigma and the noise
/// level are then searched to hit it.
pub fn compare_baselines(
    config: &RunConfig,
    model: &AutoencoderModel,
    originals: &[LabeledImage],
    threshold: f64,
    delta_f: f64,
) -> Result<Comparison> {
    let reference = par_map(originals, |x| identity_embedding(model, &x.image))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mean_iss = |outputs: &[Image]| -> Result<f64> {
        let scores = par_map(
            &outputs.iter().zip(&reference).collect::<Vec<_>>(),
            |(y, e)| similarity_score(e, &identity_embedding(model, y)?),
        )
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        Ok(mean(&scores))
    };
    let apply = |f: &(dyn Fn(&LabeledImage) -> Result<Image> + Sync)| -> Result<Vec<Image>> {
        par_map(originals, f).into_iter().collect()
    };
    let report = |outputs: &[Image]| {
        let pairs: Vec<(usize, &Image, &Image)> = originals
            .iter()
            .zip(outputs)
            .map(|(x, y)| (x.image_id, &x.image, y))
            .collect();
        MetricsReport::evaluate(model, &pairs, threshold, &config.ssim_params())
    };

    let block = config.mosaic_block;
    let mosaic = apply(&|x| mosaic_baseline(&x.image, block))?;
    let target_iss = mean_iss(&mosaic)?;

    let blur_at = |sigma: f64| apply(&|x| blur_baseline(&x.image, sigma, blur_radius(sigma)));
    let max_sigma = config.image_side as f64;
    let sigma = bisect_decreasing(0.0, max_sigma, target_iss, |s| {
        if s == 0.0 {
            return Ok(1.0);
        }
        mean_iss(&blur_at(s)?)
    })?
    .max(1e-3);
    let blurred = blur_at(sigma)?;

    let mask = noise_mask(config, model);
    let root = RngStream::with_stream(config.seed, COMPARISON_STREAM);
    let dp_at = |level: f64| -> Result<Vec<Image>> {
        let params = PrivacyParams::for_level(delta_f, level, mask.clone())?;
        apply(&|x| {
            Ok(release(
                config,
                model,
                &x.image,
                &params,
                &mut root.child(x.image_id as u64),
            )?
            .value)
        })
    };
    let mut hi = 1.0;
    while mean_iss(&dp_at(hi)?)? > target_iss && hi < 1024.0 {
        hi *= 2.0;
    }
    let level = bisect_decreasing(0.0, hi, target_iss, |l| mean_iss(&dp_at(l)?))?;
    let dp = dp_at(level)?;

    let rows = vec![
        ComparisonRow {
            method: "blur",
            parameter: sigma,
            epsilon: None,
            report: report(&blurred)?,
        },
        ComparisonRow {
            method: "mosaic",
            parameter: block as f64,
            epsilon: None,
            report: report(&mosaic)?,
        },
        ComparisonRow {
            method: "dp-image",
            parameter: level,
            epsilon: (level > 0.0).then(|| delta_f / level),
            report: report(&dp)?,
        },
    ];
    Ok(Comparison {
        target_iss,
        tolerance: config.match_tolerance,
        rows,
    })
}

#[derive(Debug, Clone)]
pub struct EvaluateSummary {
    pub report: MetricsReport,
    pub calibration: ThresholdCalibration,
    pub comparison: Option<Comparison>,
}

fn read_pairs(
    config: &RunConfig,
    manifest: &DatasetManifest,
) -> Result<Vec<(usize, Image, Image)>> {
    let path = config.output_dir.join(PAIRS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some("image_id,original,perturbed") {
        return Err(Error::invalid(format!("{}: bad header", path.display())));
    }
    let mut seen = BTreeSet::new();
    let mut pairs = Vec::new();
    for line in lines.filter(|l| !l.is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        let [id, original, perturbed] = fields[..] else {
            return Err(Error::invalid(format!(
                "{}: bad row {line:?}",
                path.display()
            )));
        };
        let id: usize = id
            .parse()
            .map_err(|_| Error::invalid(format!("bad image_id {id:?}")))?;
        let entry = manifest
            .entries
            .get(id)
            .ok_or_else(|| Error::invalid(format!("image_id {id} is not in the manifest")))?;
        if entry.path != Path::new(original) || !seen.insert(id) {
            return Err(Error::invalid(format!(
                "pair for image_id {id} is misaligned with the manifest"
            )));
        }
        let x = read_pgm(config.output_dir.join(original))?;
        let y = read_pgm(config.output_dir.join(perturbed))?;
        x.same_shape(&y)?;
        pairs.push((id, x, y));
    }
    Ok(pairs)
}

/// Metrics of the perturb command's outputs against their originals, with
/// the threshold calibrated on the eval split.
pub fn cmd_evaluate(config: &RunConfig) -> Result<EvaluateSummary> {
    config.validate()?;
    let model = read_model(config)?;
    let manifest = read_manifest(config)?;
    let eval = load_split(config, Split::Eval)?;
    let calibration = calibrate_on(&model, &eval, config.fppsr_percentile)?;
    let pairs = read_pairs(config, &manifest)?;
    let refs: Vec<(usize, &Image, &Image)> = pairs.iter().map(|(i, x, y)| (*i, x, y)).collect();
    let report =
        MetricsReport::evaluate(&model, &refs, calibration.threshold, &config.ssim_params())?;
    let out = &config.output_dir;
    write_file(&out.join(METRICS_ROWS_FILE), report.rows_csv())?;
    write_file(&out.join(METRICS_SUMMARY_FILE), report.aggregate_csv())?;
    write_file(&out.join(ISS_HISTOGRAM_FILE), calibration.histogram_csv())?;

    let mut results = vec![
        ("threshold", calibration.threshold.to_string()),
        ("mean_iss", report.mean_iss.to_string()),
        ("fppsr", report.fppsr.to_string()),
    ];
    let comparison = if config.baselines {
        let delta_f = resolve_delta_f(config)?;
        let c = compare_baselines(config, &model, &eval, calibration.threshold, delta_f)?;
        write_file(&out.join(COMPARISON_FILE), c.to_csv())?;
        results.push(("comparison_target_iss", c.target_iss.to_string()));
        results.push(("comparison_matched", c.matched().to_string()));
        results.push(("dp_image_lowest_fed", c.dp_has_lowest_fed().to_string()));
        Some(c)
    } else {
        None
    };
    write_provenance(config, "evaluate", &results)?;
    Ok(EvaluateSummary {
        report,
        calibration,
        comparison,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub level: f64,
    pub mean_iss: f64,
    pub mean_fppsr: f64,
    pub mean_l2: f64,
    pub mean_ssim: f64,
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    pub threshold: f64,
    pub delta_f: f64,
    pub ledger: PrivacyBudgetLedger,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("level,mean_iss,mean_fppsr,mean_l2,mean_ssim\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.level, r.mean_iss, r.mean_fppsr, r.mean_l2, r.mean_ssim
        )
        .unwrap();
    }
    out
}

struct SweepSample {
    iss: f64,
    l2: f64,
    ssim: f64,
    epsilon: f64,
    coverage: crate::privacy::Coverage,
}

/// `sweep_repetitions` independent releases of every eval image at each
/// noise level. Task `t` draws from child stream `t` of the sweep stream.
pub fn cmd_sweep(config: &RunConfig) -> Result<SweepSummary> {
    config.validate()?;
    let model = read_model(config)?;
    let eval = load_split(config, Split::Eval)?;
    let calibration = calibrate_on(&model, &eval, config.fppsr_percentile)?;
    let threshold = calibration.threshold;
    let delta_f = if config.sweep_levels.iter().all(|&l| l == 0.0) {
        0.0
    } else {
        resolve_delta_f(config)?
    };
    let mask = noise_mask(config, &model);
    let reference = par_map(&eval, |x| identity_embedding(&model, &x.image))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let root = RngStream::with_stream(config.seed, SWEEP_STREAM);
    let (n, reps) = (eval.len(), config.sweep_repetitions);
    let ssim_params = config.ssim_params();

    let mut rows = Vec::with_capacity(config.sweep_levels.len());
    let mut ledger = PrivacyBudgetLedger::new();
    for (li, &level) in config.sweep_levels.iter().enumerate() {
        let params = PrivacyParams::for_level(delta_f, level, mask.clone())?;
        let tasks: Vec<usize> = (0..reps * n).collect();
        let samples = par_map(&tasks, |&t| -> Result<SweepSample> {
            let i = t % n;
            let mut rng = root.child((li * reps * n + t) as u64);
            let r = release(config, &model, &eval[i].image, &params, &mut rng)?;
            Ok(SweepSample {
                iss: similarity_score(&reference[i], &identity_embedding(&model, &r.value)?)?,
                l2: l2_distance(&eval[i].image, &r.value)?,
                ssim: ssim_with(&eval[i].image, &r.value, &ssim_params)?,
                epsilon: r.epsilon,
                coverage: r.coverage,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

        for (t, s) in samples.iter().enumerate() {
            let r = Release {
                value: (),
                epsilon: s.epsilon,
                coverage: s.coverage,
            };
            ledger.record_release(&r, eval[t % n].image_id as u64)?;
        }
        let column =
            |f: &dyn Fn(&SweepSample) -> f64| mean(&samples.iter().map(f).collect::<Vec<_>>());
        rows.push(SweepRow {
            level,
            mean_iss: column(&|s| s.iss),
            mean_fppsr: column(&|s| if s.iss < threshold { 1.0 } else { 0.0 }),
            mean_l2: column(&|s| s.l2),
            mean_ssim: column(&|s| s.ssim),
        });
    }

    let out = &config.output_dir;
    write_file(&out.join(SWEEP_FILE), sweep_csv(&rows))?;
    write_file(&out.join(SWEEP_LEDGER_FILE), ledger.to_csv())?;
    write_provenance(
        config,
        "sweep",
        &[
            ("threshold", threshold.to_string()),
            ("delta_f", delta_f.to_string()),
            ("ledger_total", ledger.total().to_string()),
        ],
    )?;
    Ok(SweepSummary {
        rows,
        threshold,
        delta_f,
        ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_crossing() {
        let x = bisect_decreasing(0.0, 10.0, 0.25, |v| Ok(1.0 / (1.0 + v))).unwrap();
        assert!((x - 3.0).abs() < 1e-9);
        assert_eq!(bisect_decreasing(0.0, 1.0, 0.1, |_| Ok(0.5)).unwrap(), 1.0);
    }

    #[test]
    fn clip_mode_needs_radius() {
        let config = RunConfig {
            sensitivity_mode: SensitivityMode::Clip,
            ..RunConfig::default()
        };
        assert!(matches!(
            resolve_delta_f(&config),
            Err(Error::MissingSensitivity)
        ));
        let config = RunConfig {
            clip_radius: Some(1.5),
            ..config
        };
        assert_eq!(resolve_delta_f(&config).unwrap(), 3.0);
    }

    #[test]
    fn empirical_mode_without_record_is_missing() {
        let dir = tempfile::tempdir().unwrap();
        let config = RunConfig {
            output_dir: dir.path().to_path_buf(),
            ..RunConfig::default()
        };
        assert!(matches!(
            resolve_delta_f(&config),
            Err(Error::MissingSensitivity)
        ));
        fs::write(dir.path().join(SENSITIVITY_FILE), "delta_f = 4.5\n").unwrap();
        assert_eq!(resolve_delta_f(&config).unwrap(), 4.5);
        let config = RunConfig {
            delta_f: Some(2.0),
            ..config
        };
        assert_eq!(resolve_delta_f(&config).unwrap(), 2.0);
    }
}
