//! Scalar kernels shared by the geometry pipelines.

mod linalg;
mod optimize;
mod poly;
mod quadrature;
mod roots;

pub use linalg::{solve_linear_3, tridiagonal_min_eigenvalue, LinearSolution, PIVOT_THRESHOLD};
pub use optimize::{maximize_1d, maximize_1d_with, Maximum, DEFAULT_SAMPLES};
pub use poly::{exact, rational, to_f64, Polynomial, RationalFunction};
pub use quadrature::{gauss_legendre, integrate_1d, integrate_1d_with_estimate, QuadratureRule};
pub use roots::{bisect, find_root};

use crate::error::{Error, Result};

/// Open interval `(lo, hi)` with `lo < hi`; closed where an operation says so.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo < hi && lo.is_finite() && hi.is_finite() {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}
