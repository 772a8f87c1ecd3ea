//! Conformal bookkeeping for Einstein metrics `g = s⁻² k` conformal to an
//! extremal Kähler metric `k` in real dimension four.

use num_rational::BigRational;

use crate::error::{Error, Result};

/// `Δs² < 15/4` everywhere makes the Ricci-flat cone unstable.
pub const CONE_THRESHOLD: f64 = 15.0 / 4.0;

/// `Δs² < 6` somewhere makes the integrand `6 − Δs²` of the shrinker
/// second variation positive there.
pub const SHRINKER_THRESHOLD: f64 = 6.0;

/// Einstein constant of the normalized metric.
pub const NORMALIZED_EINSTEIN_CONSTANT: f64 = 3.0;

/// Scalar curvature of `g = s⁻² k`: `s³ + 6 s Δs − 12 |∇s|²`.
pub fn conformal_scal_identity(s: f64, laplacian_s: f64, grad_s_sq: f64) -> f64 {
    s.powi(3) + 6.0 * s * laplacian_s - 12.0 * grad_s_sq
}

/// `Δ(s²) = κ/3 + 6|∇s|² − s³/3` when `s⁻² k` has constant scalar curvature `κ`.
pub fn delta_s2_identity(kappa: f64, grad_s_sq: f64, s: f64) -> f64 {
    kappa / 3.0 + 6.0 * grad_s_sq - s.powi(3) / 3.0
}

/// Exact-arithmetic versions of the two identities.
pub fn conformal_scal_identity_exact(
    s: &BigRational,
    laplacian_s: &BigRational,
    grad_s_sq: &BigRational,
) -> BigRational {
    let six = BigRational::from_integer(6.into());
    let twelve = BigRational::from_integer(12.into());
    s * s * s + six * s * laplacian_s - twelve * grad_s_sq
}

pub fn delta_s2_identity_exact(
    kappa: &BigRational,
    grad_s_sq: &BigRational,
    s: &BigRational,
) -> BigRational {
    let three = BigRational::from_integer(3.into());
    let six = BigRational::from_integer(6.into());
    kappa / &three + six * grad_s_sq - s * s * s / three
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedSup {
    /// `12 K / κ`: the supremum of `Δs²` once the Einstein constant is 3.
    pub ratio: f64,
    pub cone_unstable: bool,
    pub shrinker_unstable: bool,
}

pub fn normalized_sup(kappa: f64, k_sup: f64) -> Result<NormalizedSup> {
    if !(kappa > 0.0) {
        return Err(Error::DomainError(format!("κ must be positive, got {kappa}")));
    }
    let ratio = 12.0 * k_sup / kappa;
    Ok(NormalizedSup {
        ratio,
        cone_unstable: ratio < CONE_THRESHOLD,
        shrinker_unstable: ratio < SHRINKER_THRESHOLD,
    })
}

/// Rescaling `k → c² k` of the Kähler metric, which sends `s → c⁻² s` and
/// `g → c⁶ g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingState {
    pub c: f64,
    pub kappa: f64,
}

impl ScalingState {
    /// The scale making the Einstein constant equal to 3.
    pub fn normalizing(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::DomainError(format!("κ must be positive, got {kappa}")));
        }
        Ok(Self {
            c: (kappa / 12.0).powf(1.0 / 6.0),
            kappa,
        })
    }

    /// Scalar curvature of `c⁶ g`.
    pub fn scaled_kappa(&self) -> f64 {
        self.kappa / self.c.powi(6)
    }

    pub fn scaled_einstein_constant(&self) -> f64 {
        self.scaled_kappa() / 4.0
    }

    /// `Δs²` transforms with `c⁻⁶`.
    pub fn scaled_delta_s2(&self, value: f64) -> f64 {
        value / self.c.powi(6)
    }
}
