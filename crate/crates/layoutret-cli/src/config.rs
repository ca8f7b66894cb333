//! Runtime settings assembled from three layers, weakest first: built-in
//! defaults, an optional TOML file named by the `LAYOUTRET_CONFIG`
//! environment variable, then command-line flags (applied by each
//! subcommand).

use std::fs;
use std::path::Path;

use layoutret::matcher::{MatcherConfig, ThresholdTable};
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    lambda: Option<f64>,
    decay_scale: Option<f64>,
    workers: Option<usize>,
    log: Option<String>,
    #[serde(default)]
    thresholds: Vec<ThresholdRow>,
}

/// One auto-threshold override: queries with `n` items use threshold `s`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdRow {
    n: usize,
    s: f64,
}

pub struct Settings {
    pub matcher: MatcherConfig,
    /// Worker count from the config file; flags may still override it.
    pub workers: Option<usize>,
    /// Log filter for stderr, e.g. `info` or `layoutret=debug`.
    pub log: String,
}

pub fn load() -> Result<Settings, Failure> {
    let mut file = FileConfig::default();
    if let Some(raw) = std::env::var_os("LAYOUTRET_CONFIG") {
        let path = Path::new(&raw);
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("reading config {}: {e}", path.display())))?;
        file = toml::from_str(&text)
            .map_err(|e| Failure::Validation(format!("config {}: {e}", path.display())))?;
    }

    let mut matcher = MatcherConfig::default();
    if let Some(lambda) = file.lambda {
        matcher.lambda = lambda;
    }
    if let Some(scale) = file.decay_scale {
        matcher.decay_scale = scale;
    }
    if !file.thresholds.is_empty() {
        matcher.thresholds =
            ThresholdTable::with_overrides(file.thresholds.iter().map(|r| (r.n, r.s)));
    }
    matcher
        .validate()
        .map_err(|e| Failure::Validation(format!("config: {e}")))?;
    if file.workers == Some(0) {
        return Err(Failure::Validation(
            "config: workers must be at least 1".into(),
        ));
    }

    Ok(Settings {
        matcher,
        workers: file.workers,
        log: file.log.unwrap_or_else(|| "info".into()),
    })
}
