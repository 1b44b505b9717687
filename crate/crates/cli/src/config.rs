//! Flat `key = value` configuration and the resolved parameter map.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::{CliError, Result};

/// Resolved parameters, keyed by canonical name; echoed into the manifest.
pub type ParamMap = BTreeMap<String, String>;

/// Keys one subcommand accepts, plus config-file spellings that map onto them.
#[derive(Debug, Clone, Copy)]
pub struct KeySet {
    pub keys: &'static [&'static str],
    pub aliases: &'static [(&'static str, &'static str)],
}

impl KeySet {
    fn canonical(&self, key: &str) -> Result<&'static str> {
        if let Some(k) = self.keys.iter().find(|k| **k == key) {
            return Ok(k);
        }
        if let Some((_, k)) = self.aliases.iter().find(|(a, _)| *a == key) {
            return Ok(k);
        }
        Err(CliError::Usage(format!(
            "unknown key '{key}' (accepted: {})",
            self.keys.join(", ")
        )))
    }
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_text(text: &str, keys: &KeySet) -> Result<ParamMap> {
    let mut map = ParamMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key = value", n + 1))
        })?;
        let key = keys.canonical(k.trim())?;
        if map.insert(key.to_string(), v.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!(
                "config line {}: key '{key}' given twice",
                n + 1
            )));
        }
    }
    Ok(map)
}

pub fn read_config(path: &Path, keys: &KeySet) -> Result<ParamMap> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_text(&text, keys)
}

/// Config file, then `--set key=value` overrides, then explicit flags.
pub fn resolve(
    config: Option<&Path>,
    sets: &[String],
    flags: Vec<(&str, Option<String>)>,
    keys: &KeySet,
) -> Result<ParamMap> {
    let mut map = match config {
        Some(p) => read_config(p, keys)?,
        None => ParamMap::new(),
    };
    for s in sets {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got '{s}'")))?;
        map.insert(keys.canonical(k.trim())?.to_string(), v.trim().to_string());
    }
    for (k, v) in flags {
        if let Some(v) = v {
            map.insert(keys.canonical(k)?.to_string(), v);
        }
    }
    Ok(map)
}

pub fn get<T: FromStr>(map: &ParamMap, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|e| CliError::Usage(format!("bad value '{v}' for {key}: {e}"))),
    }
}

pub fn require<T: FromStr>(map: &ParamMap, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    get(map, key)?.ok_or_else(|| CliError::Usage(format!("missing required key '{key}'")))
}

/// Reads `key`, storing `default` in the map when absent so the echo is complete.
pub fn get_or<T: FromStr + ToString>(map: &mut ParamMap, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    match get(map, key)? {
        Some(v) => Ok(v),
        None => {
            map.insert(key.to_string(), default.to_string());
            Ok(default)
        }
    }
}
