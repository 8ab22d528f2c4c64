//! Flags-over-file configuration.
//!
//! Every command's argument struct is also a serde type whose fields are all
//! optional. The JSON config file is read as an object, flags given on the
//! command line are laid over it, and the result is deserialised back into
//! the argument struct. Keys the command does not know are ignored, so one
//! file can carry settings for several commands.

use anyhow::{bail, Context, Result};
use ostrovsky_core::Power;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use std::path::Path;

/// A config or flag problem: reported as a usage error (exit 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn load_file(path: Option<&Path>) -> Result<Map<String, Value>> {
    let Some(path) = path else { return Ok(Map::new()) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(usage(format!("config {} must hold a JSON object", path.display()))),
        Err(e) => Err(usage(format!("config {} is not valid JSON: {e}", path.display()))),
    }
}

/// Lay the flags that were given over the file values.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: &Map<String, Value>) -> Result<T> {
    let mut out = file.clone();
    if let Value::Object(given) = serde_json::to_value(flags)? {
        for (k, v) in given {
            if !v.is_null() {
                out.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(out)).map_err(|e| usage(format!("bad configuration value: {e}")))
}

pub fn power(p: Option<u32>) -> Result<Power> {
    let p = p.unwrap_or(1);
    Power::try_from(p).map_err(|_| usage(format!("--p must be 1 or 2, got {p}")))
}

pub fn window(w: Option<&[f64]>) -> Result<(f64, f64, f64, f64)> {
    match w {
        None => Ok((-0.8, 0.8, -2.0, 2.0)),
        Some([a, b, c, d]) if a < b && c < d => Ok((*a, *b, *c, *d)),
        Some(other) => bail!(usage(format!("--window needs re_min re_max im_min im_max with min < max, got {other:?}"))),
    }
}

pub fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be positive, got {v}")))
    }
}
