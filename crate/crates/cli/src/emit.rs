//! Artifact writers. Data files carry no timestamps; run metadata goes to a
//! `<stem>.meta.json` sidecar next to them.

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[f64]) {
        let line: Vec<String> = cells.iter().map(|v| fmt_num(*v)).collect();
        let _ = writeln!(self.text, "{}", line.join(","));
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_text(path, &self.text)
    }
}

/// Shortest round-trip representation; fixed across runs and platforms.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn sidecar_path(data: &Path) -> PathBuf {
    let stem = data.file_stem().and_then(|s| s.to_str()).unwrap_or("artifact");
    data.with_file_name(format!("{stem}.meta.json"))
}

/// Config, tool version and wall time for a data file.
pub fn write_sidecar(data: &Path, command: &str, config: &Value, elapsed: f64, extra: Value) -> Result<()> {
    let meta = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "data_file": data.file_name().and_then(|s| s.to_str()),
        "config": config,
        "elapsed_seconds": elapsed,
        "threads": ostrovsky_core::spectra::thread_cap(),
        "summary": extra,
    });
    write_json(&sidecar_path(data), &meta)
}
