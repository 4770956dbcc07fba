//! Flat `key = value` text used by config files and run manifests.
//! Lines are written in a fixed order so re-serialization is byte-stable;
//! parsing preserves order and rejects duplicate keys.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{io_at, CliError, Result};

#[derive(Debug, Clone, Default)]
pub struct KvDoc {
    entries: Vec<(String, String)>,
}

impl KvDoc {
    pub fn new() -> Self {
        KvDoc::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| CliError::usage(format!("missing key `{key}`")))
    }

    pub fn parse_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::usage(format!("key `{key}`: `{v}` is not a number")))
            })
            .transpose()
    }

    pub fn parse_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| CliError::usage(format!("key `{key}`: `{v}` is not a count")))
            })
            .transpose()
    }

    pub fn parse_u64(&self, key: &str) -> Result<Option<u64>> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| CliError::usage(format!("key `{key}`: `{v}` is not an integer")))
            })
            .transpose()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<KvDoc> {
        let mut doc = KvDoc::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if doc.get(key).is_some() {
                return Err(CliError::usage(format!("duplicate key `{key}`")));
            }
            doc.push(key, value);
        }
        Ok(doc)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        io_at(path, std::fs::write(path, self.to_text()))
    }

    pub fn read_file(path: &Path) -> Result<KvDoc> {
        let text = io_at(path, std::fs::read_to_string(path))?;
        KvDoc::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_order() {
        let mut doc = KvDoc::new();
        doc.push("zeta", 1);
        doc.push("alpha", "x");
        let text = doc.to_text();
        assert_eq!(text, "zeta = 1\nalpha = x\n");
        let back = KvDoc::parse(&text).unwrap();
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        assert!(KvDoc::parse("a = 1\na = 2").is_err());
        assert!(KvDoc::parse("nonsense line").is_err());
        assert!(KvDoc::parse("# comment\n\na = 1").is_ok());
    }
}
