use thiserror::Error;

use crate::region::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("elliptic parameter m = {0} is outside (-inf, 1)")]
    ParameterOutOfRange(f64),

    #[error("non-finite argument {0}")]
    NonFinite(f64),

    #[error("invalid region: {}", format_violations(.0))]
    InvalidRegion(Vec<Violation>),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: i64, len: usize },

    #[error("{0} is not a tau-descent")]
    NotADescent(usize),

    #[error("region has {0} crossings but no tau-descent")]
    NoDescent(usize),

    #[error("transfer matrix undefined at j = {0}: tau(j) = j + 1")]
    AdjacentPair(usize),

    #[error("region has repeated boundary directions; use the alternating (derivative) basis")]
    RepeatedDirections,

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("arrangement is not generic after {attempts} jitter attempts (seed {seed})")]
    NotGeneric { seed: u64, attempts: usize },

    #[error("matrix AK_n is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("basis has rank below {expected}; singular values {singular_values:?}")]
    RankDeficient {
        expected: usize,
        singular_values: Vec<f64>,
    },

    #[error("graph has {vertices} vertices; exhaustive enumeration is limited to {limit}, use the curve formula instead")]
    OracleTooLarge { vertices: usize, limit: usize },

    #[error("divided differences need distinct nodes; {0} repeats")]
    CoincidentAnchors(f64),

    #[error("no tau-shape found: {0}")]
    InfeasibleShape(String),

    #[error("malformed region file: {0}")]
    Parse(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
