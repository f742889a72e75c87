//! Layered configuration: defaults, then a flat `key = value` file, then
//! command-line flags, then `FLOWSUM_*` environment variables.

use std::path::Path;

use crate::error::{Error, Result};
use crate::summarize::SummarizeConfig;

pub const ENV_PREFIX: &str = "FLOWSUM_";

/// Keys understood by [`apply_setting`].
pub const KEYS: &[&str] = &[
    "k",
    "l",
    "similarity",
    "augment",
    "augment_time",
    "lambda_aug",
    "lambda_decay",
    "simrank_decay",
    "simrank_max_hops",
    "simrank_iterations",
    "simrank_links",
    "seed",
    "max_iter",
    "rel_tol",
    "restarts",
    "prune",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Argument(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::Argument(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

/// Sets one key on `cfg`. An empty `augment` value disables attribute
/// augmentation.
pub fn apply_setting(cfg: &mut SummarizeConfig, key: &str, value: &str) -> Result<()> {
    let value = value.trim();
    match key {
        "k" => cfg.k = parse(key, value)?,
        "l" => cfg.l = parse(key, value)?,
        "similarity" => cfg.similarity = value.parse()?,
        "augment" => {
            cfg.augment.attribute = if value.is_empty() || value == "none" {
                None
            } else {
                Some(value.parse()?)
            }
        }
        "augment_time" => cfg.augment.time = parse_bool(key, value)?,
        "lambda_aug" => cfg.params.lambda_aug = parse(key, value)?,
        "lambda_decay" => cfg.params.lambda_decay = parse(key, value)?,
        "simrank_decay" => cfg.simrank.decay = parse(key, value)?,
        "simrank_max_hops" => cfg.simrank.max_hops = parse(key, value)?,
        "simrank_iterations" => cfg.simrank.iterations = parse(key, value)?,
        "simrank_links" => {
            cfg.simrank.links = serde_json::from_value(serde_json::Value::String(value.into()))
                .map_err(|_| Error::Argument(format!("invalid value `{value}` for `{key}`")))?
        }
        "seed" => cfg.seed = parse(key, value)?,
        "max_iter" => cfg.max_iter = parse(key, value)?,
        "rel_tol" => cfg.rel_tol = parse(key, value)?,
        "restarts" => cfg.restarts = parse(key, value)?,
        "prune" => cfg.prune = value.parse()?,
        other => return Err(Error::Argument(format!("unknown setting `{other}`"))),
    }
    Ok(())
}

/// Parses a settings file. Blank lines and lines starting with `#` are
/// skipped; keys may use `-` or `_`.
pub fn parse_settings(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "expected `key = value`".into(),
            });
        };
        let key = key.trim().replace('-', "_").to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("unknown setting `{key}`"),
            });
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

pub fn load_settings_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_settings(&text, path)
}

/// Known `FLOWSUM_<KEY>` variables as settings; other variables are ignored.
pub fn env_settings(vars: impl IntoIterator<Item = (String, String)>) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = vars
        .into_iter()
        .filter_map(|(name, value)| {
            let key = name.strip_prefix(ENV_PREFIX)?.to_ascii_lowercase();
            KEYS.contains(&key.as_str()).then_some((key, value))
        })
        .collect();
    out.sort();
    out
}

/// Applies the layers in order. When no layer sets `l`, it follows `2k`.
pub fn resolve(layers: &[Vec<(String, String)>]) -> Result<SummarizeConfig> {
    let mut cfg = SummarizeConfig::default();
    let mut l_set = false;
    for (key, value) in layers.iter().flatten() {
        apply_setting(&mut cfg, key, value)?;
        l_set |= key == "l";
    }
    if !l_set {
        cfg.l = 2 * cfg.k;
    }
    Ok(cfg)
}
