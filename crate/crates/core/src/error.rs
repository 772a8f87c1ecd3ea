use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("singular matrix: pivot {pivot:e} in column {column} below threshold")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("quadrature did not converge: partial value {value}, error estimate {estimate:e}")]
    NonConvergence { value: f64, estimate: f64 },

    #[error("polygon has empty interior")]
    EmptyInterior,

    #[error("polygon is unbounded")]
    Unbounded,

    #[error("point ({x}, {y}) is on or too close to the boundary")]
    BoundaryPoint { x: f64, y: f64 },

    #[error("argument outside domain: {0}")]
    DomainError(String),

    #[error("degenerate polytope: {0}")]
    DegeneratePolytope(String),

    #[error("negative Einstein-constant discriminant: Λ² = {0}")]
    NegativeDiscriminant(f64),

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
