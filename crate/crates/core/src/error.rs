use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate node {index}: r = 0 on the axis")]
    DegenerateNode { index: usize },

    #[error("irregular parameterization at node {index}: |gamma'| = {speed:e}")]
    IrregularParameterization { index: usize, speed: f64 },

    #[error("node index {index} out of range for {len} samples")]
    IndexOutOfRange { index: usize, len: usize },

    #[error(
        "grid too coarse: max|kappa|*spacing = {product:.3} > 0.5; use at least {required_nodes} nodes"
    )]
    GridTooCoarse { product: f64, required_nodes: usize },

    #[error("graph regime violated at node {node}: {what} = {value:e} exceeds {limit:e}")]
    GraphRegime {
        node: usize,
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("offset t = {t} beyond focal distance at node {node} (kappa = {kappa})")]
    FocalDistance { node: usize, t: f64, kappa: f64 },

    #[error(
        "Newton diverged after {iterations} iterations (last residual {residual:e}); try a smaller kappa2h"
    )]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("continuation stalled at kappa2h = {reached} (target {target}); last residual {residual:e}")]
    ContinuationFailure {
        reached: f64,
        target: f64,
        residual: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("empty test-field dictionary after boundary exclusion; try smaller bump scales")]
    EmptyDictionary,

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
