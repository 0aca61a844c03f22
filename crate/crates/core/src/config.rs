//! TOML configuration with `[graph]`, `[synth]`, `[model]` and `[bench]`
//! sections. Every key is optional and falls back to its default.

use std::path::Path;

use crate::bench::BenchConfig;
use crate::error::{Error, Result};

pub fn parse_config(text: &str, source: &str) -> Result<BenchConfig> {
    let cfg: BenchConfig = toml::from_str(text)
        .map_err(|e| Error::InvalidConfig(format!("{source}: {}", one_line(&e, text))))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Collapses a TOML diagnostic onto one line, quoting the offending line.
fn one_line(e: &toml::de::Error, text: &str) -> String {
    let msg = e.message().trim().replace('\n', " ");
    match e.span() {
        Some(span) => {
            let start = span.start.min(text.len());
            let line = text[..start].matches('\n').count() + 1;
            let content = text.lines().nth(line - 1).unwrap_or("").trim();
            format!("line {line} `{content}`: {msg}")
        }
        None => msg,
    }
}

pub fn load_config(path: &Path) -> Result<BenchConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

/// Renders a configuration as TOML.
pub fn render_config(cfg: &BenchConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::InvalidConfig(e.to_string()))
}
