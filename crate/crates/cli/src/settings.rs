//! Flat `key = value` configuration merged with command-line flags.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment
//! key = value
//! ```
//!
//! Keys are lowercase words joined by `_` (a `-` is read as `_`). Values run to
//! the end of the line and are trimmed. Blank lines and lines starting with `#`
//! are skipped. A key may appear once per file. Flags win over file values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Command};
use serde::Serialize;

use crate::CliError;

/// Parses config text. Errors carry the 1-based line number.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, (usize, String)> {
    let mut values = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err((idx + 1, format!("expected `key = value`, got `{line}`")));
        };
        let key = normalize(key.trim());
        if key.is_empty()
            || !key
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        {
            return Err((idx + 1, format!("bad key `{}`", key)));
        }
        if values
            .insert(key.clone(), value.trim().to_string())
            .is_some()
        {
            return Err((idx + 1, format!("duplicate key `{key}`")));
        }
    }
    Ok(values)
}

fn normalize(key: &str) -> String {
    key.replace('-', "_")
}

/// Keys accepted by an argument struct: its long flags, minus `config`.
pub fn keys_of<A: Args>() -> BTreeSet<String> {
    A::augment_args(Command::new("keys"))
        .get_arguments()
        .filter_map(|a| a.get_long())
        .filter(|l| *l != "config")
        .map(normalize)
        .collect()
}

/// Flag values given on the command line, stringified.
pub fn flag_values<A: Serialize>(args: &A) -> BTreeMap<String, String> {
    let value = serde_json::to_value(args).expect("flags serialize");
    let mut out = BTreeMap::new();
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            let text = match v {
                serde_json::Value::Null => continue,
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            out.insert(normalize(&k), text);
        }
    }
    out
}

/// Merged settings with typed lookups. Every lookup records the value it
/// resolved to, so the full configuration can be logged and replayed.
#[derive(Debug)]
pub struct Settings {
    values: BTreeMap<String, String>,
    consumed: BTreeSet<String>,
    resolved: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(
        config: Option<&Path>,
        flags: BTreeMap<String, String>,
        allowed: &BTreeSet<String>,
    ) -> Result<Self, CliError> {
        let mut values = match config {
            Some(path) => read_config(path, allowed)?,
            None => BTreeMap::new(),
        };
        values.extend(flags);
        Ok(Settings {
            values,
            consumed: BTreeSet::new(),
            resolved: BTreeMap::new(),
        })
    }

    #[cfg(test)]
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Settings {
            values: pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            consumed: BTreeSet::new(),
            resolved: BTreeMap::new(),
        }
    }

    pub fn is_set(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn opt<T>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.consumed.insert(key.to_string());
        let Some(raw) = self.values.get(key) else {
            return Ok(None);
        };
        let value = raw
            .parse::<T>()
            .map_err(|e| CliError::Config(format!("{key} = {raw}: {e}")))?;
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(Some(value))
    }

    pub fn get<T>(&mut self, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.opt(key)? {
            Some(v) => Ok(v),
            None => {
                self.resolved.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    pub fn required<T>(&mut self, key: &str) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.opt(key)?
            .ok_or_else(|| CliError::Config(format!("missing required setting `{key}`")))
    }

    /// Records a value that was derived rather than looked up.
    pub fn record(&mut self, key: &str, value: impl Display) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    /// Keys that were given but never read under the resolved settings.
    pub fn unused(&self) -> Vec<&str> {
        self.values
            .keys()
            .filter(|k| !self.consumed.contains(*k))
            .map(String::as_str)
            .collect()
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }

    /// The resolved settings in config-file grammar.
    pub fn to_config_text(&self) -> String {
        self.resolved
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

fn read_config(
    path: &Path,
    allowed: &BTreeSet<String>,
) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let values = parse_config(&text).map_err(|(line, message)| CliError::ConfigFile {
        path: path.to_path_buf(),
        line,
        message,
    })?;
    let unknown: Vec<&str> = values
        .keys()
        .filter(|k| !allowed.contains(*k))
        .map(String::as_str)
        .collect();
    if !unknown.is_empty() {
        return Err(CliError::ConfigFile {
            path: PathBuf::from(path),
            line: 0,
            message: format!("unknown keys: {}", unknown.join(", ")),
        });
    }
    Ok(values)
}

/// Comma-separated list value, e.g. `1,2,5`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|p| p.trim().parse::<T>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

impl<T: Display> Display for List<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(T::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        let text = "# sweep\n\nn = 50\nk=5\np-c = 0.01  \n";
        let v = parse_config(text).unwrap();
        assert_eq!(v["n"], "50");
        assert_eq!(v["k"], "5");
        assert_eq!(v["p_c"], "0.01");
        assert_eq!(parse_config("n = 1\nn = 2").unwrap_err().0, 2);
        assert_eq!(parse_config("just words").unwrap_err().0, 1);
        assert!(parse_config("N = 3").is_err());
    }

    #[test]
    fn typed_lookup_records_defaults() {
        let mut s = Settings::from_pairs(&[("n", "20"), ("chi", "x")]);
        assert_eq!(s.required::<usize>("n").unwrap(), 20);
        assert_eq!(s.get("mu", 4usize).unwrap(), 4);
        assert!(s.get("chi", 1.0f64).is_err());
        assert!(s.required::<usize>("k").is_err());
        assert_eq!(s.to_config_text(), "mu = 4\nn = 20\n");
    }

    #[test]
    fn list_round_trip() {
        let l: List<usize> = "1, 2,5".parse().unwrap();
        assert_eq!(l.0, vec![1, 2, 5]);
        assert_eq!(l.to_string(), "1,2,5");
        assert!("1,x".parse::<List<usize>>().is_err());
    }
}
