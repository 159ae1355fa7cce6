//! key=value config files, overridable by explicit flags.

use std::collections::HashMap;
use std::path::Path;

use crate::{CliError, CliResult};

pub type Config = HashMap<String, String>;

/// Parses `key=value` lines; `#` starts a comment, blank lines are fine.
pub fn load(path: &Path) -> CliResult<Config> {
    let body = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Input(format!(
                "config {} line {}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Flag value, else config value, else default.
pub fn resolve<T: std::str::FromStr>(
    flag: Option<T>,
    config: &Config,
    key: &str,
    default: T,
) -> CliResult<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match config.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|_| CliError::Input(format!("config key {key}: cannot parse {raw:?}"))),
        None => Ok(default),
    }
}

/// Flag value, else config value, else an input error naming the flag.
pub fn resolve_required<T: std::str::FromStr>(
    flag: Option<T>,
    config: &Config,
    key: &str,
) -> CliResult<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match config.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|_| CliError::Input(format!("config key {key}: cannot parse {raw:?}"))),
        None => Err(CliError::Input(format!("missing required --{key} (flag or config)"))),
    }
}
