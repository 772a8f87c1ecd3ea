//! Numerical checks for the stability of Ricci-flat cones: radial Hardy
//! thresholds, the CP² coefficient estimate, and the toric analysis of the
//! Page and Chen-LeBrun-Weber metrics.

pub mod cli;
pub mod clw;
pub mod conformal;
pub mod cp2proof;
pub mod error;
pub mod numerics;
pub mod page;
pub mod polytope;
pub mod radial;
pub mod toric;

pub use error::{Error, Result};
