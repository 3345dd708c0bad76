//! Serialization shared by the CLI subcommands.
//!
//! Every float is written with 17 significant digits so that it parses back to
//! the same `f64`. Exact zeros are written as `0`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value};
use tempfile::NamedTempFile;

use crate::error::{Error, Result};

pub const SCHEMA: &str = "riesz-eig/1";

pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// A float as a JSON number with the same digits as [`fmt_f64`]. Non-finite
/// values become `null`.
pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt_f64(x)).expect("formatted float is valid JSON"))
}

pub fn json_f64s(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_f64(x)).collect())
}

/// JSON object starting with the schema tag, keys kept in insertion order.
pub fn json_object() -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), Value::String(SCHEMA.into()));
    m
}

pub fn json_text(obj: Map<String, Value>) -> String {
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Comma-separated table with a header row.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut c = Csv::default();
        c.push_raw(header.iter().map(|h| h.as_ref().to_string()));
        c
    }

    pub fn push_raw(&mut self, cells: impl IntoIterator<Item = String>) {
        let line: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn push_floats(&mut self, cells: &[f64]) {
        self.push_raw(cells.iter().map(|&x| fmt_f64(x)));
    }

    /// Appends a `# ` comment line.
    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.text, "# {text}");
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, or to stdout when `path` is `None` or `-`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        None => write_stdout(contents),
        Some(p) if p.as_os_str() == "-" => write_stdout(contents),
        Some(p) => write_atomic(p, contents),
    }
}

fn write_stdout(contents: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(contents.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        })
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [1.728_295_957_096_405, -0.1, 1e-300, 6.02e23, f64::MIN_POSITIVE, 1.0 / 3.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(2.5), "2.5000000000000000e0");
    }

    #[test]
    fn json_keeps_digits() {
        let mut o = json_object();
        o.insert("x".into(), json_f64(0.1));
        o.insert("bad".into(), json_f64(f64::NAN));
        let text = json_text(o);
        assert!(text.contains("\"schema\": \"riesz-eig/1\""));
        assert!(text.contains("1.0000000000000001e-1"));
        assert!(text.contains("\"bad\": null"));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["a", "b"]);
        c.push_floats(&[1.0, 0.0]);
        c.comment("{}");
        assert_eq!(c.into_string(), "a,b\n1.0000000000000000e0,0\n# {}\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, "first").unwrap();
        write_atomic(&p, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert!(write_atomic(&dir.path().join("missing/out.csv"), "x").is_err());
    }
}
