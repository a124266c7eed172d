//! Model files: a cq source as JSON.
//!
//! ```json
//! {
//!   "alphabet": ["a", "b"],
//!   "prior": ["1/2", "1/2"],
//!   "states": [
//!     [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
//!     [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]
//!   ],
//!   "metadata": {"name": "example"}
//! }
//! ```
//!
//! Prior entries are numbers or strings (`"1/3"`, `"0.25"`). A prior made only
//! of fractions is kept exact; otherwise it is read as floats.

use std::path::Path;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Deserialize;
use serde_json::{Map, Value};
use softcover_core::info::models;
use softcover_core::matrix::CMatrix;
use softcover_core::{CqSource, DensityOperator};

use crate::CliError;

/// Tolerance on the prior sum in model files. Floats within it are renormalized.
pub const PRIOR_FILE_TOL: f64 = 1e-9;

/// Names accepted as `--model builtin:<name>`.
pub const BUILTINS: [&str; 2] = ["orthogonal_binary", "model_a"];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub alphabet: Vec<Value>,
    pub prior: Vec<PriorEntry>,
    pub states: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub metadata: Map<String, Value>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum PriorEntry {
    Number(f64),
    Text(String),
}

/// A loaded model with the labels and metadata echoed in reports.
#[derive(Debug)]
pub struct Model {
    pub source: CqSource,
    pub labels: Vec<String>,
    pub metadata: Map<String, Value>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn exact_fraction(s: &str) -> Option<Ratio<u64>> {
    let s = s.trim();
    if s.contains('/') {
        s.parse().ok()
    } else {
        s.parse::<u64>().ok().map(Ratio::from_integer)
    }
}

fn float_entry(x: usize, e: &PriorEntry) -> Result<f64, CliError> {
    match e {
        PriorEntry::Number(v) => Ok(*v),
        PriorEntry::Text(s) => match exact_fraction(s) {
            Some(r) if *r.denom() != 0 => Ok(*r.numer() as f64 / *r.denom() as f64),
            _ => s
                .trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("prior entry {x}: cannot parse {s:?}"))),
        },
    }
}

fn state(x: usize, rows: &[Vec<[f64; 2]>]) -> Result<DensityOperator, CliError> {
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    let m = CMatrix::from_rows(&rows).map_err(|e| invalid(format!("state {x}: {e}")))?;
    DensityOperator::from_matrix(m).map_err(|e| invalid(format!("state {x}: {e}")))
}

impl ModelFile {
    pub fn into_model(self) -> Result<Model, CliError> {
        let k = self.prior.len();
        if k == 0 {
            return Err(invalid("empty prior"));
        }
        if self.alphabet.len() != k || self.states.len() != k {
            return Err(invalid(format!(
                "alphabet, prior and states must have equal length, got {}, {k} and {}",
                self.alphabet.len(),
                self.states.len()
            )));
        }
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(x, s)| state(x, s))
            .collect::<Result<Vec<_>, _>>()?;
        let exact: Option<Vec<Ratio<u64>>> = self
            .prior
            .iter()
            .map(|e| match e {
                PriorEntry::Text(s) => exact_fraction(s).filter(|r| *r.denom() != 0),
                PriorEntry::Number(_) => None,
            })
            .collect();
        let source = match exact {
            Some(p) => CqSource::with_rational_prior(p, states),
            None => {
                let mut p = self
                    .prior
                    .iter()
                    .enumerate()
                    .map(|(x, e)| float_entry(x, e))
                    .collect::<Result<Vec<_>, _>>()?;
                let total: f64 = p.iter().sum();
                if !((total - 1.0).abs() <= PRIOR_FILE_TOL) {
                    return Err(invalid(format!(
                        "prior sums to {total}, expected 1 within {PRIOR_FILE_TOL:e}"
                    )));
                }
                p.iter_mut().for_each(|v| *v /= total);
                CqSource::new(p, states)
            }
        }
        .map_err(|e| invalid(e.to_string()))?;
        Ok(Model {
            source,
            labels: self.alphabet.iter().map(label).collect(),
            metadata: self.metadata,
        })
    }
}

pub fn parse_model(text: &str) -> Result<Model, CliError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| invalid(format!("model file: {e}")))?;
    file.into_model()
}

fn builtin(name: &str) -> Result<Model, CliError> {
    let source = match name {
        "orthogonal_binary" => models::orthogonal_binary(),
        "model_a" => models::model_a(),
        _ => {
            return Err(invalid(format!(
                "unknown built-in model {name:?}; known: {}",
                BUILTINS.join(", ")
            )))
        }
    };
    let mut metadata = Map::new();
    metadata.insert("builtin".into(), Value::String(name.into()));
    Ok(Model {
        source,
        labels: vec!["0".into(), "1".into()],
        metadata,
    })
}

/// Reads `path`, or a built-in model when `path` is `builtin:<name>`.
pub fn load_model(path: &str) -> Result<Model, CliError> {
    if let Some(name) = path.strip_prefix("builtin:") {
        return builtin(name);
    }
    let text = std::fs::read_to_string(Path::new(path)).map_err(|e| invalid(format!("cannot read {path}: {e}")))?;
    parse_model(&text)
}
