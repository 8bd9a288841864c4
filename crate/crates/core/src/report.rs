//! Report emission: CSV tables (RFC 4180 via the csv crate), JSON
//! summaries, and plain two-column data files for plotting. Every CSV row
//! carries the config hash; float formatting is the shortest round-trip
//! form, so identical runs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct ReportSink {
    dir: PathBuf,
    config_hash: String,
    csv_enabled: bool,
    json_enabled: bool,
    written: Vec<PathBuf>,
}

impl ReportSink {
    pub fn new(dir: &Path, config_hash: &str, formats: &[String]) -> Result<ReportSink> {
        fs::create_dir_all(dir)?;
        Ok(ReportSink {
            dir: dir.to_path_buf(),
            config_hash: config_hash.to_string(),
            csv_enabled: formats.iter().any(|f| f == "csv"),
            json_enabled: formats.iter().any(|f| f == "json"),
            written: Vec::new(),
        })
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.written
    }

    /// CSV table with a leading `config_hash` column on every row.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if !self.csv_enabled {
            return Ok(());
        }
        let path = self.dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        let mut head = vec!["config_hash"];
        head.extend_from_slice(header);
        w.write_record(&head)?;
        for row in rows {
            let mut rec = vec![self.config_hash.clone()];
            rec.extend(row.iter().cloned());
            w.write_record(&rec)?;
        }
        w.flush()?;
        self.written.push(path);
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &serde_json::Value) -> Result<()> {
        if !self.json_enabled {
            return Ok(());
        }
        let path = self.dir.join(format!("{name}.json"));
        let mut wrapped = serde_json::Map::new();
        wrapped.insert("config_hash".into(), self.config_hash.clone().into());
        wrapped.insert("data".into(), value.clone());
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(wrapped))
            .map_err(|e| Error::Config(format!("json encode: {e}")))?;
        fs::write(&path, text + "\n")?;
        self.written.push(path);
        Ok(())
    }

    /// Plain two-column whitespace-separated data file for plotting.
    pub fn data2(&mut self, name: &str, pairs: &[(f64, f64)]) -> Result<()> {
        let path = self.dir.join(format!("{name}.dat"));
        let mut text = String::new();
        for (a, b) in pairs {
            text.push_str(&format!("{a} {b}\n"));
        }
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }

    /// Remove everything written so far (partial outputs on failure).
    pub fn cleanup(&mut self) {
        for path in self.written.drain(..) {
            let _ = fs::remove_file(path);
        }
    }
}

/// Shortest round-trip formatting for a float cell.
pub fn cell(v: f64) -> String {
    format!("{v}")
}
