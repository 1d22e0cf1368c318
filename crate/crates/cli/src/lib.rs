//! Library side of the `cuspbend` command-line tool.
//!
//! Every subcommand is a plain function of a [`RunConfig`] returning the
//! text it would print, so the binary stays a thin clap wrapper and the test
//! suites can drive the same code paths.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cuspbend::bending::BendError;
use cuspbend::cusp_classify::ClassifyError;
use cuspbend::cusp_models::ModelError;
use cuspbend::hilbert::HilbertError;
use cuspbend::projlin::ProjError;
use serde::de::DeserializeOwned;

pub mod commands;
pub mod sweep;
pub mod verify;

pub use sweep::{run_sweep, SweepOutput};
pub use verify::{run_verify, VerifyReport};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "CUSPBEND_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid input {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Bend(#[from] BendError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Proj(#[from] ProjError),
}

impl CliError {
    /// 2 for usage and I/O problems, 1 for failed computations.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Read { .. } | CliError::Write { .. } | CliError::Json { .. } => 2,
            _ => 1,
        }
    }
}

/// Inclusive linear grid `start:stop:steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| if i + 1 == self.steps { self.stop } else { self.start + h * i as f64 }).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, k] = parts[..] else {
            return Err(format!("grid must look like start:stop:steps, got {s:?}"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad grid bound {x:?}: {e}"));
        let (start, stop) = (num(a)?, num(b)?);
        let steps: usize = k.trim().parse().map_err(|e| format!("bad grid step count {k:?}: {e}"))?;
        if steps == 0 || !start.is_finite() || !stop.is_finite() || start < 0.0 || stop < start {
            return Err(format!("grid {s:?} must satisfy 0 <= start <= stop and steps >= 1"));
        }
        Ok(Grid { start, stop, steps })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

/// Options shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    /// Read JSON numbers as exact decimals instead of floats.
    pub exact: bool,
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub suite: Option<String>,
    pub grid: Grid,
    pub b: f64,
    pub svg: Option<PathBuf>,
    /// Test hook: add noise to cusp group elements in the leaf suites.
    pub perturb: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: None,
            tol: cuspbend::DEFAULT_TOL,
            seed: 1,
            exact: false,
            out: None,
            input: None,
            suite: None,
            grid: Grid { start: 0.0, stop: 2.0, steps: 21 },
            b: 1.0,
            svg: None,
            perturb: false,
        }
    }
}

/// Applies [`THREADS_ENV`] to the global rayon pool. Ignored when unset,
/// unparsable or when the pool already exists.
pub fn init_threads() {
    if let Some(k) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if k > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
}

/// Turns every JSON number into a decimal string so that it parses as an
/// exact rational.
fn exactify(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => *v = serde_json::Value::String(n.to_string()),
        serde_json::Value::Array(items) => items.iter_mut().for_each(exactify),
        serde_json::Value::Object(map) => {
            for (key, item) in map.iter_mut() {
                // counts and seeds stay numeric
                if key != "n" && !key.ends_with("seed") {
                    exactify(item);
                }
            }
        }
        _ => {}
    }
}

pub fn read_value(path: &Path, exact: bool) -> Result<serde_json::Value, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    let mut v: serde_json::Value =
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    if exact {
        exactify(&mut v);
    }
    Ok(v)
}

pub fn from_value<T: DeserializeOwned>(path: &Path, v: serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

pub fn read_json<T: DeserializeOwned>(path: &Path, exact: bool) -> Result<T, CliError> {
    from_value(path, read_value(path, exact)?)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

/// Float with 17 significant digits, which round-trips through parsing.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0:2:5".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!("0.5:0.5:1".parse::<Grid>().unwrap().points(), vec![0.5]);
        assert!("1:0:3".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
        assert!("-1:1:3".parse::<Grid>().is_err());
    }

    #[test]
    fn float_format_round_trips() {
        let x = std::f64::consts::LN_2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn exactify_keeps_counts() {
        let mut v = serde_json::json!({"n": 3, "b": [0.5, 1], "seed": 4});
        exactify(&mut v);
        assert_eq!(v, serde_json::json!({"n": 3, "b": ["0.5", "1"], "seed": 4}));
    }
}
