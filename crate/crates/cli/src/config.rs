//! Layered configuration: command-line flags override config-file values,
//! which override defaults. The `SAWLAB_SEED` environment variable slots in
//! between flags and the file, and affects only the seed.
//!
//! Config files are either flat `key = value` lines (`#` comments) or a JSON
//! object; keys match the long flag names.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::errors::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        if text.trim_start().starts_with('{') {
            Self::from_json(&text)
        } else {
            Self::from_key_values(&text)
        }
    }

    fn from_json(text: &str) -> CliResult<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("config is not valid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::Config("config JSON must be an object".into()))?;
        let mut values = BTreeMap::new();
        for (k, v) in obj {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|i| match i {
                        serde_json::Value::String(s) => Ok(s.clone()),
                        serde_json::Value::Number(n) => Ok(n.to_string()),
                        other => Err(CliError::Config(format!(
                            "config key `{k}` has an unsupported array entry {other}"
                        ))),
                    })
                    .collect::<CliResult<Vec<_>>>()?
                    .join(","),
                other => {
                    return Err(CliError::Config(format!(
                        "config key `{k}` has unsupported value {other}"
                    )))
                }
            };
            values.insert(k.clone(), s);
        }
        Ok(FileConfig { values })
    }

    fn from_key_values(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("config line {}: expected key = value", lineno + 1))
            })?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Config(format!("config key `{key}`: cannot parse `{s}`"))),
        }
    }

    /// Flag value, else config-file value, else nothing.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.parsed(key),
        }
    }

    /// Like [`resolve`](Self::resolve) but the parameter is mandatory.
    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.resolve(flag, key)?
            .ok_or_else(|| CliError::Config(format!("missing required parameter `{key}`")))
    }

    /// Seed resolution: flag, then the SAWLAB_SEED environment variable,
    /// then the config file, then 0.
    pub fn resolve_seed(&self, flag: Option<u64>) -> CliResult<u64> {
        if let Some(s) = flag {
            return Ok(s);
        }
        if let Ok(env) = std::env::var("SAWLAB_SEED") {
            return env.parse::<u64>().map_err(|_| {
                CliError::Config(format!("SAWLAB_SEED: cannot parse `{env}` as an integer"))
            });
        }
        Ok(self.parsed::<u64>("seed")?.unwrap_or(0))
    }
}

/// Comma-separated float list (for beta grids).
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse `{t}` as a number"))
        })
        .collect()
}
