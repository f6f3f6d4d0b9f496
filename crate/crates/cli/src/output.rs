//! Deterministic CSV and JSON writers.
//!
//! CSV values carry 9 significant digits, JSON floats 17 (enough to round
//! trip). Both start with the same metadata: tool version, resolved config
//! and grid signature.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const TOOL: &str = "anmap";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: String,
    pub grid: String,
    pub config: BTreeMap<String, String>,
}

/// Pretty-printed JSON with 17 significant digits per float.
pub fn to_json<T: Serialize>(value: &T) -> io::Result<String> {
    let tree = serde_json::to_value(value).map_err(io::Error::other)?;
    let mut out = Vec::new();
    write_pretty(&tree, 0, &mut out)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("utf-8"))
}

fn write_pretty(v: &serde_json::Value, depth: usize, out: &mut Vec<u8>) -> io::Result<()> {
    use serde_json::Value;
    let pad = "  ".repeat(depth + 1);
    let close = "  ".repeat(depth);
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !(n.is_i64() || n.is_u64()) => write!(out, "{x:.16e}"),
            _ => write!(out, "{n}"),
        },
        Value::Array(items) if items.is_empty() => write!(out, "[]"),
        Value::Array(items) => {
            writeln!(out, "[")?;
            for (k, item) in items.iter().enumerate() {
                write!(out, "{pad}")?;
                write_pretty(item, depth + 1, out)?;
                writeln!(out, "{}", if k + 1 < items.len() { "," } else { "" })?;
            }
            write!(out, "{close}]")
        }
        Value::Object(map) if map.is_empty() => write!(out, "{{}}"),
        Value::Object(map) => {
            writeln!(out, "{{")?;
            for (k, (key, item)) in map.iter().enumerate() {
                write!(out, "{pad}{}: ", serde_json::to_string(key).map_err(io::Error::other)?)?;
                write_pretty(item, depth + 1, out)?;
                writeln!(out, "{}", if k + 1 < map.len() { "," } else { "" })?;
            }
            write!(out, "{close}}}")
        }
        other => write!(out, "{other}"),
    }
}

/// Collects the files of one run; writes are sequential and in call order.
pub struct Sink {
    dir: PathBuf,
    meta: Meta,
    csv: bool,
    json: bool,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, meta: Meta, csv: bool, json: bool) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), meta, csv, json, written: Vec::new() })
    }

    pub fn set_grid(&mut self, grid: impl Into<String>) {
        self.meta.grid = grid.into();
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// `{"meta": ..., "data": body}`.
    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> io::Result<()> {
        if !self.json {
            return Ok(());
        }
        #[derive(Serialize)]
        struct Doc<'a, T> {
            meta: &'a Meta,
            data: &'a T,
        }
        let text = to_json(&Doc { meta: &self.meta, data: body })?;
        self.write(name, text.as_bytes())
    }

    /// Report files are written even when JSON output is switched off.
    pub fn report<T: Serialize>(&mut self, body: &T) -> io::Result<()> {
        let saved = self.json;
        self.json = true;
        let r = self.json("report.json", body);
        self.json = saved;
        r
    }

    /// A `#`-prefixed metadata block, one header row, then the rows.
    pub fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
        if !self.csv {
            return Ok(());
        }
        let mut text = String::new();
        text.push_str(&format!("# {} {}\n# scenario: {}\n# grid: {}\n", self.meta.tool, self.meta.version, self.meta.scenario, self.meta.grid));
        for (k, v) in &self.meta.config {
            text.push_str(&format!("# {k} = {v}\n"));
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|x| csv_number(*x)).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> io::Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }
}

/// 9 significant digits.
pub fn csv_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        format!("{x}")
    }
}
