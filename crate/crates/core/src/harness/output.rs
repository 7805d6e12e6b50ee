//! Versioned tabular output.
//!
//! A CSV file starts with `#` comment lines
//!
//! ```text
//! # schema=stagmix.<name> version=1
//! # code_version=<crate version>
//! # seed=<master seed>
//! # config=<config as JSON>
//! # <key>=<JSON value>      (zero or more run-specific fields)
//! ```
//!
//! followed by a header row and the data. The NDJSON form carries the same
//! fields in a leading header object, then one object per row.

use super::config::{ExperimentConfig, OutputFormat};
use super::HarnessError;
use serde::Serialize;
use serde_json::{Map, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct FileHeader {
    pub schema: String,
    pub seed: u64,
    pub config: Value,
    pub extra: Vec<(String, Value)>,
}

impl FileHeader {
    pub fn new(name: &str, config: &ExperimentConfig) -> Self {
        FileHeader {
            schema: format!("stagmix.{name}"),
            seed: config.master_seed,
            config: serde_json::to_value(config).expect("config serializes"),
            extra: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.push((key.to_owned(), serde_json::to_value(value).expect("header value serializes")));
        self
    }

    fn write_comments(&self, out: &mut Vec<u8>) {
        let mut line = |s: String| {
            out.extend_from_slice(s.as_bytes());
            out.push(b'\n');
        };
        line(format!("# schema={} version={SCHEMA_VERSION}", self.schema));
        line(format!("# code_version={CODE_VERSION}"));
        line(format!("# seed={}", self.seed));
        line(format!("# config={}", self.config));
        for (k, v) in &self.extra {
            line(format!("# {k}={v}"));
        }
    }

    fn to_record(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema".into(), self.schema.clone().into());
        m.insert("version".into(), SCHEMA_VERSION.into());
        m.insert("code_version".into(), CODE_VERSION.into());
        m.insert("seed".into(), self.seed.into());
        m.insert("config".into(), self.config.clone());
        for (k, v) in &self.extra {
            m.insert(k.clone(), v.clone());
        }
        Value::Object(m)
    }
}

/// Renders a table in memory.
pub fn render_table<R: Serialize>(
    format: OutputFormat,
    header: &FileHeader,
    rows: &[R],
) -> Result<Vec<u8>, HarnessError> {
    let mut out = Vec::new();
    match format {
        OutputFormat::Csv => {
            header.write_comments(&mut out);
            let mut w = csv::Writer::from_writer(&mut out);
            for r in rows {
                w.serialize(r).map_err(|e| HarnessError::Output(e.to_string()))?;
            }
            w.flush().map_err(|e| HarnessError::Output(e.to_string()))?;
        }
        OutputFormat::Ndjson => {
            serde_json::to_writer(&mut out, &header.to_record()).map_err(|e| HarnessError::Output(e.to_string()))?;
            out.push(b'\n');
            for r in rows {
                serde_json::to_writer(&mut out, r).map_err(|e| HarnessError::Output(e.to_string()))?;
                out.push(b'\n');
            }
        }
    }
    Ok(out)
}

/// Writes `<dir>/<stem>.<ext>` and returns its path.
pub fn write_table<R: Serialize>(
    dir: &Path,
    stem: &str,
    format: OutputFormat,
    header: &FileHeader,
    rows: &[R],
) -> Result<PathBuf, HarnessError> {
    let bytes = render_table(format, header, rows)?;
    let path = dir.join(format!("{stem}.{}", format.extension()));
    write_file(&path, &bytes)?;
    Ok(path)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io { path: path.to_owned(), source };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}

/// The data part of an output file: everything after the `#` comment lines
/// of a CSV, or after the header record of an NDJSON file.
pub fn data_body(text: &str) -> String {
    let mut lines = text.lines().peekable();
    if lines.peek().is_some_and(|l| l.starts_with('{')) {
        lines.next();
    }
    lines.filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}
