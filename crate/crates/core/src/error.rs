use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice parameters: {0}")]
    InvalidParams(String),

    #[error("alpha = {0} lies outside [0, pi]")]
    AlphaOutOfRange(f64),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("state index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("superposition requires two distinct states (got {0} twice)")]
    SameState(usize),

    #[error("no midgap pair: combined end-site weight {edge_weight:.4} < 0.5")]
    NoMidgapPair { edge_weight: f64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("time step {dt} does not divide {what} = {value}")]
    IncommensurateStep { dt: f64, what: &'static str, value: f64 },

    #[error("unknown initial condition '{0}' (expected vacuum, both_edges, first_edge or last_edge)")]
    UnknownInitialCondition(String),

    #[error("entanglement analysis requires gamma = 0 (got {0})")]
    DissipativeModel(f64),

    #[error("correlation evolution requires an undriven lattice")]
    DrivenModel,

    #[error("site {site} out of range for a chain of {len} sites")]
    SiteOutOfRange { site: usize, len: usize },

    #[error("correlation matrix covers {got} sites, expected the full chain of {expected}")]
    NotFullChain { got: usize, expected: usize },

    #[error("correlation eigenvalue {0:e} outside [0, 1] beyond tolerance")]
    UnphysicalCorrelation(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("empty trajectory")]
    EmptyTrajectory,

    #[error("{origin}: unknown key '{key}'")]
    UnknownKey { origin: String, key: String },

    #[error("{origin}: cannot parse '{value}' as a number for '{key}'")]
    BadNumber { origin: String, key: String, value: String },

    #[error("{origin}: invalid value '{value}' for '{key}': {reason}")]
    BadValue {
        origin: String,
        key: String,
        value: String,
        reason: String,
    },

    #[error("{origin}: expected 'key = value', found '{text}'")]
    ConfigSyntax { origin: String, text: String },

    #[error("no command given: pass one on the command line or set 'command' in the config")]
    MissingCommand,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
