//! Pipeline commands behind the `dp-image` binary, usable directly as
//! library calls.

mod commands;
mod config;

pub use commands::*;
pub use config::{MaskMode, RunConfig, SensitivityMode};

use crate::error::{Error, Result};

pub const VERBS: &[&str] = &[
    "generate",
    "train",
    "sensitivity",
    "perturb",
    "evaluate",
    "sweep",
];

pub fn usage() -> String {
    let mut out = String::from(
        "usage: dp-image <verb> [--config FILE] [--key value]...\n\nverbs: generate train sensitivity perturb evaluate sweep\n\nkeys:\n",
    );
    for (key, doc) in RunConfig::KEYS {
        out.push_str(&format!("  {key:<22} {doc}\n"));
    }
    out
}

/// Builds the config from an optional `--config FILE` followed by
/// `--key value` overrides, which win over the file.
pub fn parse_args<S: AsRef<str>>(args: &[S]) -> Result<RunConfig> {
    let args: Vec<&str> = args.iter().map(AsRef::as_ref).collect();
    let mut config = RunConfig::default();
    let mut rest = Vec::new();
    let mut i = 0;
    while i < args.len() {
        if args[i] == "--config" {
            let path = args
                .get(i + 1)
                .ok_or_else(|| Error::Config("--config needs a path".into()))?;
            config.apply_text(&std::fs::read_to_string(path).map_err(|e| Error::io(*path, e))?)?;
            i += 2;
        } else {
            rest.push(args[i]);
            i += 1;
        }
    }
    config.apply_overrides(&rest)?;
    config.validate()?;
    Ok(config)
}

/// Runs one verb and returns a one-line summary.
pub fn run<S: AsRef<str>>(args: &[S]) -> Result<String> {
    let (verb, rest) = args
        .split_first()
        .ok_or_else(|| Error::Config(format!("missing verb\n{}", usage())))?;
    let config = parse_args(rest)?;
    Ok(match verb.as_ref() {
        "generate" => {
            let s = cmd_generate(&config)?;
            format!("wrote {} images and {}", s.images, s.manifest.display())
        }
        "train" => {
            let s = cmd_train(&config)?;
            format!(
                "trained: train mse {:.6}, eval mse {:?}",
                s.train_mse, s.eval_mse
            )
        }
        "sensitivity" => {
            let r = cmd_sensitivity(&config)?;
            format!(
                "delta_f {} over {} latents (mean pair distance {})",
                r.delta_f, r.count, r.stats.mean
            )
        }
        "perturb" => {
            let s = cmd_perturb(&config)?;
            format!(
                "released {} images at scale {}; ledger total {}",
                s.outputs.len(),
                s.scale,
                s.ledger.total()
            )
        }
        "evaluate" => {
            let s = cmd_evaluate(&config)?;
            let mut line = format!(
                "mean iss {:.4}, fppsr {:.3} at threshold {:.4}",
                s.report.mean_iss, s.report.fppsr, s.report.threshold
            );
            if let Some(c) = &s.comparison {
                line.push_str(&format!(
                    "; comparison at iss {:.4}: matched {}, dp-image lowest fed {}",
                    c.target_iss,
                    c.matched(),
                    c.dp_has_lowest_fed()
                ));
            }
            line
        }
        "sweep" => {
            let s = cmd_sweep(&config)?;
            sweep_csv(&s.rows)
        }
        other => {
            return Err(Error::Config(format!(
                "unknown verb {other:?}; expected one of {}",
                VERBS.join(", ")
            )))
        }
    })
}
