//! Flat-file persistence: CSV tables, run metadata sidecars, TOML records.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::{self, DeserializeOwned, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {message}")]
    Toml { path: PathBuf, message: String },
    #[error("{path}: header {found:?} does not match {expected:?}")]
    Header { path: PathBuf, expected: Vec<String>, found: Vec<String> },
}

/// A value that only exists for a stable queue. Written as the number or
/// the literal `unstable`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stable {
    Value(f64),
    Unstable,
}

impl Stable {
    pub const MARKER: &'static str = "unstable";

    pub fn value(self) -> Option<f64> {
        match self {
            Stable::Value(v) => Some(v),
            Stable::Unstable => None,
        }
    }
}

impl From<Option<f64>> for Stable {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Stable::Unstable, Stable::Value)
    }
}

impl Serialize for Stable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Stable::Value(v) => s.serialize_f64(*v),
            Stable::Unstable => s.serialize_str(Self::MARKER),
        }
    }
}

impl<'de> Deserialize<'de> for Stable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Stable;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a number or `{}`", Stable::MARKER)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Stable, E> {
                Ok(Stable::Value(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Stable, E> {
                Ok(Stable::Value(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Stable, E> {
                Ok(Stable::Value(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Stable, E> {
                if v == Stable::MARKER {
                    return Ok(Stable::Unstable);
                }
                v.parse().map(Stable::Value).map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }
        d.deserialize_any(V)
    }
}

/// Provenance written next to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    /// Seconds since the Unix epoch; the only non-reproducible field.
    pub timestamp_unix: u64,
}

impl RunMeta {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            config_hash: cfg.hash(),
            seed: cfg.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }
}

/// Rows of one sweep with their metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<R> {
    pub rows: Vec<R>,
    pub meta: RunMeta,
}

/// Row types with a fixed, documented header.
pub trait CsvRow: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> OutputError + '_ {
    move |source| OutputError::Csv { path: path.to_path_buf(), source }
}

pub fn write_csv<R: CsvRow>(path: &Path, rows: &[R]) -> Result<(), OutputError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(R::HEADER).map_err(csv_err(path))?;
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_csv<R: CsvRow>(path: &Path) -> Result<Vec<R>, OutputError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let found: Vec<String> = r.headers().map_err(csv_err(path))?.iter().map(String::from).collect();
    if found != R::HEADER {
        return Err(OutputError::Header {
            path: path.to_path_buf(),
            expected: R::HEADER.iter().map(|s| s.to_string()).collect(),
            found,
        });
    }
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err(path))
}

pub fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<(), OutputError> {
    let text = toml::to_string(value)
        .map_err(|e| OutputError::Toml { path: path.to_path_buf(), message: e.to_string() })?;
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T, OutputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    toml::from_str(&text).map_err(|e| OutputError::Toml { path: path.to_path_buf(), message: e.to_string() })
}

/// `dir/stem.meta.toml`.
pub fn meta_path(dir: &Path, stem: &str) -> PathBuf {
    dir.join(format!("{stem}.meta.toml"))
}

/// Writes `dir/stem.csv` and its metadata sidecar.
pub fn write_sweep<R: CsvRow>(dir: &Path, stem: &str, result: &SweepResult<R>) -> Result<PathBuf, OutputError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(format!("{stem}.csv"));
    write_csv(&path, &result.rows)?;
    write_toml(&meta_path(dir, stem), &result.meta)?;
    Ok(path)
}

pub fn read_sweep<R: CsvRow>(dir: &Path, stem: &str) -> Result<SweepResult<R>, OutputError> {
    Ok(SweepResult {
        rows: read_csv(&dir.join(format!("{stem}.csv")))?,
        meta: read_toml(&meta_path(dir, stem))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        x: u32,
        delay_s: Stable,
        growth: Option<f64>,
    }

    impl CsvRow for Row {
        const HEADER: &'static [&'static str] = &["x", "delay_s", "growth"];
    }

    #[test]
    fn marker_and_empty_cells_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let rows = vec![
            Row { x: 1, delay_s: Stable::Value(6.51e-4), growth: None },
            Row { x: 2, delay_s: Stable::Unstable, growth: Some(0.1 + 0.2) },
            Row { x: 3, delay_s: Stable::Value(f64::MIN_POSITIVE), growth: Some(-1e300) },
        ];
        write_csv(&path, &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,delay_s,growth\n1,0.000651,\n2,unstable,0.30000000000000004\n"));
        assert_eq!(read_csv::<Row>(&path).unwrap(), rows);
    }

    #[test]
    fn header_mismatch_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        fs::write(&path, "x,delay,growth\n1,2,3\n").unwrap();
        assert!(matches!(read_csv::<Row>(&path), Err(OutputError::Header { .. })));
    }
}
