//! Flat `key = value` run configuration. Command-line flags take
//! precedence over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

pub const KEYS: &[&str] = &[
    "tol",
    "seed",
    "samples",
    "format",
    "out",
    "c",
    "family",
    "charge",
    "kind",
    "d",
    "m",
    "l",
    "relation",
    "sector",
    "operand",
    "in",
    "u",
    "t",
    "position",
    "sites",
    "state",
    "criterion",
];

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key = value", no + 1))?;
            let key = key.trim().replace('_', "-");
            let key = key.trim_start_matches("--").to_string();
            if !KEYS.contains(&key.as_str()) {
                bail!("config line {}: unknown key {key:?}", no + 1);
            }
            let value = value.trim().trim_matches('"').to_string();
            if values.insert(key.clone(), value).is_some() {
                bail!("config line {}: duplicate key {key:?}", no + 1);
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// The flag value if given, else the parsed file value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key {key}: {e}")))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let cfg = FileConfig::parse("# run\nseed = 7\nsamples=4\nfamily = \"qghz\"\n").unwrap();
        assert_eq!(cfg.pick::<u64>(None, "seed").unwrap(), Some(7));
        assert_eq!(cfg.pick(Some(9u64), "seed").unwrap(), Some(9));
        assert_eq!(
            cfg.pick::<String>(None, "family").unwrap().as_deref(),
            Some("qghz")
        );
        assert_eq!(cfg.pick::<f64>(None, "tol").unwrap(), None);
        assert!(cfg.pick::<u8>(None, "samples").is_ok());
        assert!(FileConfig::parse("bogus = 1").is_err());
        assert!(FileConfig::parse("seed 1").is_err());
        assert!(FileConfig::parse("seed = x")
            .unwrap()
            .pick::<u64>(None, "seed")
            .is_err());
    }
}
