//! Sidecar manifests: `key=value` lines next to each CSV, enough to rerun
//! the command that produced it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const TOOL_NAME: &str = "sc-rates";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `results.csv` -> `results.manifest`.
pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("manifest")
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    /// Starts a manifest with the tool, version, command and argument list.
    pub fn new(command: &str, args: &[String]) -> Self {
        let mut m = Manifest::default();
        m.push("tool", TOOL_NAME);
        m.push("version", TOOL_VERSION);
        m.push("command", command);
        m.push("args", args.join(" "));
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string().replace('\n', " ");
        self.entries.push((key.to_owned(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut m = Manifest::default();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("manifest line {} has no `=`", lineno + 1))
            })?;
            m.entries.push((k.to_owned(), v.to_owned()));
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render()).map_err(CliError::io(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        let mut m = Manifest::new("sweep", &["sweep".into(), "--seed".into(), "7".into()]);
        m.push("master_seed", 7u64);
        let text = m.render();
        assert!(text.starts_with("tool=sc-rates\nversion="));
        assert!(text.contains("args=sweep --seed 7\n"));
        let back = Manifest::parse(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.get("master_seed"), Some("7"));
        assert!(Manifest::parse("nonsense").is_err());
    }

    #[test]
    fn sidecar_path() {
        assert_eq!(
            manifest_path(Path::new("out/r.csv")),
            PathBuf::from("out/r.manifest")
        );
        assert_eq!(manifest_path(Path::new("r")), PathBuf::from("r.manifest"));
    }
}
