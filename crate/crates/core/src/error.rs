use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("log_gamma is undefined for x = {0} (requires x > 0)")]
    GammaDomain(f64),

    #[error("fractional order 2*alpha must be positive and finite, got {0}")]
    InvalidOrder(f64),

    #[error("Jacobi weight exponents must both exceed -1, got a = {a}, b = {b}")]
    InvalidJacobiParams { a: f64, b: f64 },

    #[error("derivative shift nu = {nu} outside 0..={max}")]
    ShiftOutOfRange { nu: usize, max: usize },

    #[error("quadrature rule needs at least one node")]
    EmptyRule,

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {deviation:e}")]
    NotSymmetric { row: usize, col: usize, deviation: f64 },

    #[error("matrix data has length {len}, expected {dim}x{dim}")]
    BadShape { len: usize, dim: usize },

    #[error(
        "symmetric eigensolver failed to converge: dim = {dim}, block starting at {index}, \
         {iterations} iterations, residual subdiagonal {residual:e}"
    )]
    NoConvergence { dim: usize, index: usize, iterations: usize, residual: f64 },

    #[error("mass matrix eigenvalue {value:e} in {parity} block is not positive")]
    NonPositiveMass { value: f64, parity: &'static str },

    #[error("eigenfunction index {index} outside 1..={max}")]
    EigenIndex { index: usize, max: usize },

    #[error("evaluation point {0} outside [-1, 1]")]
    OutsideInterval(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
