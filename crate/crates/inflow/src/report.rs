//! Run directories: every subcommand writes a self-describing directory with
//! the echoed configuration, a key=value summary, CSV iteration logs and any
//! exported artifacts. Summaries are sorted and use shortest round-trip
//! float formatting, so a re-run from the echoed configuration reproduces
//! them byte for byte.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;

pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(path: impl AsRef<Path>) -> Result<Self> {
        let root = path.as_ref().to_path_buf();
        std::fs::create_dir_all(&root)?;
        Ok(RunDir { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&self, name: &str, content: &str) -> Result<()> {
        let mut f = std::fs::File::create(self.file(name))?;
        f.write_all(content.as_bytes())?;
        Ok(())
    }

    /// Writes `summary.txt` as sorted `key = value` lines.
    pub fn write_summary(&self, entries: &BTreeMap<String, String>) -> Result<()> {
        let mut out = String::new();
        for (k, v) in entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        self.write_text("summary.txt", &out)
    }

    /// Writes a CSV file with a fixed header; rows are emitted in order.
    pub fn write_csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut out = String::new();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        self.write_text(name, &out)
    }
}

/// Formats a float with shortest round-trip representation.
pub fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Formats an optional float; empty cell when absent.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_and_csv_are_deterministic() {
        let dir = std::env::temp_dir().join("inflow-rundir");
        let run = RunDir::create(&dir).unwrap();
        let mut entries = BTreeMap::new();
        entries.insert("b_key".to_string(), fmt(0.1 + 0.2));
        entries.insert("a_key".to_string(), "hello".to_string());
        run.write_summary(&entries).unwrap();
        let text = std::fs::read_to_string(run.file("summary.txt")).unwrap();
        assert_eq!(text, "a_key = hello\nb_key = 0.30000000000000004\n");

        run.write_csv(
            "it.csv",
            &["iteration", "value"],
            &[
                vec!["1".into(), fmt(1.5)],
                vec!["2".into(), fmt_opt(None)],
            ],
        )
        .unwrap();
        let text = std::fs::read_to_string(run.file("it.csv")).unwrap();
        assert_eq!(text, "iteration,value\n1,1.5\n2,\n");
    }
}
