//! Report envelopes, CSV emission and atomic file writes.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Overrides the directory reports are written to when no path is given.
pub const OUTPUT_DIR_ENV: &str = "CLM_OUTPUT_DIR";

/// Every JSON report: the command, its fully resolved config, and the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub command: String,
    pub config: Value,
    pub result: Value,
}

pub fn output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// `explicit` wins; otherwise `<output dir>/<default_name>`.
pub fn resolve_path(explicit: Option<&Path>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => output_dir().join(default_name),
    }
}

/// Sibling path with the extension replaced, e.g. `run.json` → `run.series.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

/// Writes through a temp file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// A CSV table with a fixed header; rows are formatted with shortest round-trip floats.
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            text,
            width: header.len(),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        debug_assert_eq!(values.len(), self.width);
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            let _ = write!(self.text, "{v:?}");
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        write_atomic(path, self.as_str().as_bytes())
    }
}

pub fn pairs_csv(header: [&str; 2], rows: &[(f64, f64)]) -> Csv {
    let mut csv = Csv::new(&header);
    for &(a, b) in rows {
        csv.row(&[a, b]);
    }
    csv
}

/// JSON pointer of the first place `a` and `b` differ.
pub fn first_difference(a: &Value, b: &Value) -> Option<String> {
    fn walk(a: &Value, b: &Value, path: &mut String) -> bool {
        match (a, b) {
            (Value::Object(x), Value::Object(y)) => {
                for (k, va) in x {
                    let len = path.len();
                    path.push('/');
                    path.push_str(k);
                    match y.get(k) {
                        Some(vb) if !walk(va, vb, path) => return false,
                        None => return false,
                        _ => {}
                    }
                    path.truncate(len);
                }
                if let Some(k) = y.keys().find(|k| !x.contains_key(*k)) {
                    path.push('/');
                    path.push_str(k);
                    return false;
                }
                true
            }
            (Value::Array(x), Value::Array(y)) => {
                for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                    let len = path.len();
                    let _ = write!(path, "/{i}");
                    if !walk(va, vb, path) {
                        return false;
                    }
                    path.truncate(len);
                }
                if x.len() != y.len() {
                    let _ = write!(path, "/{}", x.len().min(y.len()));
                    return false;
                }
                true
            }
            _ => a == b,
        }
    }
    let mut path = String::new();
    if walk(a, b, &mut path) {
        None
    } else if path.is_empty() {
        Some("/".into())
    } else {
        Some(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sibling_names() {
        assert_eq!(
            sibling(Path::new("out/run.json"), "series.csv"),
            PathBuf::from("out/run.series.csv")
        );
        assert_eq!(
            sibling(Path::new("run"), "samples.csv"),
            PathBuf::from("run.samples.csv")
        );
    }

    #[test]
    fn csv_layout() {
        let csv = pairs_csv(["t", "delta_f"], &[(0.5, 1e-7), (1.0, 2.0)]);
        assert_eq!(csv.as_str(), "t,delta_f\n0.5,1e-7\n1.0,2.0\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nested/a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn difference_pointer() {
        let a = json!({"x": [1, 2, {"y": 3.0}], "z": true});
        assert_eq!(first_difference(&a, &a.clone()), None);
        let mut b = a.clone();
        b["x"][2]["y"] = json!(3.5);
        assert_eq!(first_difference(&a, &b).unwrap(), "/x/2/y");
        let mut c = a.clone();
        c["x"].as_array_mut().unwrap().pop();
        assert_eq!(first_difference(&a, &c).unwrap(), "/x/2");
        assert_eq!(first_difference(&json!(1), &json!(2)).unwrap(), "/");
    }
}
