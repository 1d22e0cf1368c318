//! The file-driven subcommands: `bend`, `classify` and `hilbert`.

use std::path::Path;

use cuspbend::bending::{iterated_bend_with, BendingMove, IterateOptions, MarkedRep};
use cuspbend::cusp_classify::{conjugate_and_match_with_tol, recognize_rectangular, RectangularCuspData};
use cuspbend::cusp_models::{CuspParameter, ModelDomain};
use cuspbend::hilbert::{hilbert_distance, ConvexDomain, UnitBall};
use cuspbend::projlin::{ProjMap, ProjPoint};
use cuspbend::scalar::Scalar;
use rayon::prelude::*;
use serde::Deserialize;

use crate::{fmt_f64, from_value, read_value, CliError, RunConfig};

#[derive(Deserialize)]
struct BendInput {
    rep: MarkedRep,
    moves: Vec<BendingMove>,
    #[serde(default)]
    verify_order_seed: Option<u64>,
}

/// Applies the moves in order and returns the bent representation as JSON.
pub fn run_bend(config: &RunConfig) -> Result<String, CliError> {
    let path = input_path(config)?;
    let input: BendInput = from_value(path, read_value(path, config.exact)?)?;
    let opts = IterateOptions { tol: config.tol, verify_order_seed: input.verify_order_seed };
    let bent = iterated_bend_with(&input.rep, &input.moves, &opts)?;
    Ok(pretty(&bent))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ClassifyInput {
    Data(RectangularCuspData),
    Generators { generators: Vec<ProjMap> },
    Bare(Vec<ProjMap>),
}

/// Accepts cusp data `{n, b, s, mu?}`, `{"generators": [...]}` or a bare
/// array of matrices, and prints the classified cusp.
pub fn run_classify(config: &RunConfig) -> Result<String, CliError> {
    let path = input_path(config)?;
    let value = read_value(path, config.exact)?;
    let input =
        if value.get("b").is_some() { ClassifyInput::Data(from_value(path, value)?) } else { from_value(path, value)? };
    let data = match input {
        ClassifyInput::Data(d) => d,
        ClassifyInput::Generators { generators: g } | ClassifyInput::Bare(g) => recognize_rectangular(&g, config.tol)?,
    };
    if let Some(n) = config.n {
        if n != data.n() {
            return Err(CliError::Usage(format!("--n {n} disagrees with input dimension {}", data.n())));
        }
    }
    let classified = conjugate_and_match_with_tol(&data, config.tol)?;
    Ok(pretty(&classified))
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum DomainSpec {
    Ball { n: usize },
    Cusp { psi: Vec<Scalar> },
}

#[derive(Deserialize)]
struct HilbertInput {
    domain: DomainSpec,
    pairs: Vec<(ProjPoint, ProjPoint)>,
}

/// One CSV row `x,y,d` per pair, coordinates joined by `;`.
pub fn run_hilbert(config: &RunConfig) -> Result<String, CliError> {
    let path = input_path(config)?;
    // the metric is float-only, so --exact has nothing to preserve here
    let input: HilbertInput = from_value(path, read_value(path, false)?)?;
    let domain: Box<dyn ConvexDomain> = match input.domain {
        DomainSpec::Ball { n } => Box::new(UnitBall { n }),
        DomainSpec::Cusp { psi } => Box::new(ModelDomain::new(CuspParameter::from_unsorted(psi)?)?),
    };
    let rows = input
        .pairs
        .par_iter()
        .map(|(x, y)| {
            let d = hilbert_distance(&domain, x, y)?;
            Ok(format!("{},{},{}", join(x), join(y), fmt_f64(d.value())))
        })
        .collect::<Result<Vec<String>, CliError>>()?;
    let mut out = String::from("x,y,d\n");
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

fn input_path(config: &RunConfig) -> Result<&Path, CliError> {
    config.input.as_deref().ok_or_else(|| CliError::Usage("missing input file".into()))
}

fn join(p: &ProjPoint) -> String {
    p.to_f64().iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(";")
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn config_for(json: &str) -> (tempfile::NamedTempFile, RunConfig) {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(json.as_bytes()).unwrap();
        let cfg = RunConfig { input: Some(f.path().to_path_buf()), ..RunConfig::default() };
        (f, cfg)
    }

    #[test]
    fn hilbert_in_the_ball() {
        let (_f, cfg) = config_for(r#"{"domain": {"kind": "ball", "n": 2}, "pairs": [[[0, 0, 1], [0.5, 0, 1]]]}"#);
        let csv = run_hilbert(&cfg).unwrap();
        let d: f64 = csv.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
        assert!((d - 3f64.ln() / 2.0).abs() < 1e-9);
    }

    #[test]
    fn classify_exact_data() {
        let (_f, mut cfg) = config_for(r#"{"n": 3, "b": [1, 1], "s": [0, 0]}"#);
        cfg.exact = true;
        let v: serde_json::Value = serde_json::from_str(&run_classify(&cfg).unwrap()).unwrap();
        assert_eq!(v["type"], 0);
    }

    #[test]
    fn bad_json_exits_two() {
        let (_f, cfg) = config_for("{not json");
        assert_eq!(run_bend(&cfg).unwrap_err().exit_code(), 2);
    }
}
