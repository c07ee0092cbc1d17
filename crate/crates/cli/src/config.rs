use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{de::DeserializeOwned, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

/// Overlays the flags given on the command line onto the JSON config file.
/// Flags win. Unset flags are `None` and are dropped before the overlay.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut base: Map<String, Value> = match serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?
    {
        Value::Object(m) => m,
        _ => bail!("config {} is not a JSON object", path.display()),
    };
    if let Value::Object(over) = serde_json::to_value(flags)? {
        base.extend(over.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(base))
        .with_context(|| format!("invalid config {}", path.display()))
}

/// SHA-256 of the canonical JSON of the effective parameters.
pub fn digest(command: &str, params: &Value) -> String {
    let canonical = serde_json::json!({ "command": command, "params": params });
    let bytes = serde_json::to_vec(&canonical).expect("JSON value serializes");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Comma-separated numbers on the command line, a JSON array in a config.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct List(pub Vec<f64>);

impl std::str::FromStr for List {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<_, _>>()
            .map(List)
    }
}
