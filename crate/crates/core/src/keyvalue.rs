//! Flat `key = value` text files: one pair per line, `#` starts a comment.

use crate::error::{Error, Result};

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidParams(format!("line {}: expected key=value, got {raw:?}", lineno + 1))
        })?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(Error::InvalidParams(format!("line {}: empty key", lineno + 1)));
        }
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(Error::InvalidParams(format!(
                "line {}: duplicate key {key:?}",
                lineno + 1
            )));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

pub fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidParams(format!("{key}: cannot parse {value:?}")))
}
