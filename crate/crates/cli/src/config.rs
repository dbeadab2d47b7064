//! Plain-text `key = value` parameter files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys use the long flag
//! names without dashes (`symbol-rate` and `symbol_rate` are equivalent). A
//! flag given on the command line always wins over the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

pub const KEYS: &[&str] = &[
    "domain",
    "eta",
    "r0",
    "nu",
    "symbol-rate",
    "nodes",
    "seed",
    "out",
    "variable",
    "points",
    "min",
    "max",
    "values",
    "steps",
    "trials",
    "init",
    "block-steps",
    "level",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key = value, got {line:?}", i + 1);
            };
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key {key:?}", i + 1);
            }
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                bail!("line {}: duplicate key {key:?}", i + 1);
            }
        }
        Ok(Self { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// `flag` if given, else the parsed file value, else `None`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key {key}: {e}")),
        }
    }

    pub fn pick_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_overrides() {
        let c = ConfigFile::parse("# sweep\nr0 = 0.5\nsymbol_rate=1e6\n\n nu =  20 \n").unwrap();
        assert_eq!(c.pick::<f64>(None, "r0").unwrap(), Some(0.5));
        assert_eq!(c.pick(Some(0.9), "r0").unwrap(), Some(0.9));
        assert_eq!(c.pick::<f64>(None, "symbol-rate").unwrap(), Some(1e6));
        assert_eq!(c.pick_or::<f64>(None, "eta", 2.0).unwrap(), 2.0);
        assert_eq!(c.raw("nu"), Some("20"));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(ConfigFile::parse("r0 0.5").is_err());
        assert!(ConfigFile::parse("radius = 1").is_err());
        assert!(ConfigFile::parse("r0 = 1\nr0 = 2").is_err());
        let c = ConfigFile::parse("r0 = abc").unwrap();
        assert!(c.pick::<f64>(None, "r0").is_err());
    }
}
