//! Flat `key = value` configuration files with `#` comments.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {reason}: `{text}`")]
pub struct ConfigError {
    pub line: usize,
    pub reason: &'static str,
    pub text: String,
}

/// Entries in file order. Keys are trimmed and `-` is read as `_`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason| ConfigError { line: i + 1, reason, text: raw.trim().to_owned() };
        let (k, v) = line.split_once('=').ok_or_else(|| err("expected `key = value`"))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.contains(char::is_whitespace) {
            return Err(err("malformed key"));
        }
        if v.is_empty() {
            return Err(err("missing value"));
        }
        out.push((k.replace('-', "_"), v.to_owned()));
    }
    Ok(out)
}
