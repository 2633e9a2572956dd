use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lookup;
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: String,
    #[serde(default)]
    seed: u64,
    #[serde(default = "empty_object")]
    params: serde_json::Value,
}

fn empty_object() -> serde_json::Value {
    serde_json::json!({})
}

/// A validated config; `params` has every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub params: serde_json::Value,
}

impl ExperimentConfig {
    pub fn new(experiment: &str, seed: u64, params: serde_json::Value) -> Result<Self> {
        let entry = lookup(experiment)?;
        let params = (entry.resolve)(&params)
            .map_err(|e| Error::Config(format!("params of `{experiment}`: {}", strip(&e))))?;
        Ok(ExperimentConfig {
            experiment: entry.name.to_string(),
            seed,
            params,
        })
    }
}

fn strip(e: &Error) -> String {
    match e {
        Error::Config(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text)?;
    ExperimentConfig::new(&raw.experiment, raw.seed, raw.params)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config_str(r#"{"experiment": "ap-char"}"#).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.params["p"], 2.0);
        assert_eq!(c.params["intervals"], 100000);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse_config_str(r#"{"experiment": "ap-char", "params": {"weigth": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("weigth"), "{e}");
        let e = parse_config_str(r#"{"experiment": "ap-char", "weigth": 1}"#).unwrap_err();
        assert!(e.to_string().contains("weigth"), "{e}");
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(parse_config_str(""), Err(Error::Config(_))));
        let e = parse_config_str(r#"{"experiment": "nope"}"#).unwrap_err();
        assert!(e.to_string().contains("unknown experiment"));
        let e = parse_config_str(r#"{"seed": 3}"#).unwrap_err();
        assert!(e.to_string().contains("experiment"));
    }
}
