//! The final quadratic-form step of the stability proof for the cone over
//! CP²: after Kato, Hardy and Young the second variation is bounded below by
//!
//! ```text
//! (10α − 39 − |4−α|/ε) A² + (−38 − α² + 14β)|B|² + (9 − β²/2)|C|² + (2 − 4ε|4−α|) tr(C)²
//! ```
//!
//! and the proof needs parameters making all four coefficients non-negative.

use num_rational::BigRational;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::numerics::{exact, rational, to_f64};
use crate::radial::hardy_constant;

/// The parameters used in the proof.
pub const PAPER_WITNESS: (f64, f64, f64) = (4.2, 4.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProofParameters {
    alpha: f64,
    beta: f64,
    epsilon: f64,
}

impl ProofParameters {
    pub fn new(alpha: f64, beta: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !alpha.is_finite() || !beta.is_finite() || !epsilon.is_finite() {
            return Err(Error::DomainError(format!(
                "need finite parameters with ε > 0, got ({alpha}, {beta}, {epsilon})"
            )));
        }
        Ok(Self { alpha, beta, epsilon })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// `(c_A, c_B, c_C, c_trC)`.
pub type Coefficients = [f64; 4];

pub fn cp2_coefficients(p: ProofParameters) -> Coefficients {
    let (a, b, e) = (p.alpha, p.beta, p.epsilon);
    let gap = (4.0 - a).abs();
    [
        10.0 * a - 39.0 - gap / e,
        -38.0 - a * a + 14.0 * b,
        9.0 - b * b / 2.0,
        2.0 - 4.0 * e * gap,
    ]
}

/// Exact coefficients at rational parameters.
pub fn cp2_coefficients_exact(
    alpha: &BigRational,
    beta: &BigRational,
    epsilon: &BigRational,
) -> Result<[BigRational; 4]> {
    if !epsilon.is_positive() {
        return Err(Error::DomainError(format!("ε must be positive, got {epsilon}")));
    }
    let int = |n: i64| rational(n, 1);
    let gap = (int(4) - alpha).abs();
    Ok([
        int(10) * alpha - int(39) - &gap / epsilon,
        int(-38) - alpha * alpha + int(14) * beta,
        int(9) - beta * beta / int(2),
        int(2) - int(4) * epsilon * &gap,
    ])
}

pub fn cp2_feasible(p: ProofParameters) -> bool {
    cp2_coefficients(p).iter().all(|&c| c >= 0.0)
}

/// Feasibility decided in exact arithmetic on the binary values of the parameters.
pub fn cp2_feasible_exact(p: ProofParameters) -> bool {
    cp2_coefficients_exact(&exact(p.alpha), &exact(p.beta), &exact(p.epsilon))
        .map(|c| c.iter().all(|x| !x.is_negative()))
        .unwrap_or(false)
}

/// `1/C_H` for the `A` and `C` parts and twice that for `B`.
pub fn kato_hardy_constants(n: u32) -> Result<(f64, f64, f64)> {
    let inv = 1.0 / hardy_constant(n)?;
    Ok((inv, 2.0 * inv, inv))
}

/// Young's inequality used to absorb the cross term:
/// `(4−α) A tr C ≥ −ε|4−α| tr(C)² − |4−α| A²/(4ε)`. Returns the slack.
pub fn young_slack(p: ProofParameters, a: f64, tr_c: f64) -> f64 {
    let gap = (4.0 - p.alpha).abs();
    (4.0 - p.alpha) * a * tr_c + p.epsilon * gap * tr_c * tr_c + gap * a * a / (4.0 * p.epsilon)
}

/// Closed range `lo..=hi` split into `steps` equal steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi, steps: if hi > lo { steps.max(1) } else { 0 } })
    }

    pub fn single(x: f64) -> Self {
        Self { lo: x, hi: x, steps: 0 }
    }

    /// Axis with spacing close to `step`.
    pub fn with_step(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::DomainError(format!("step must be positive, got {step}")));
        }
        Self::new(lo, hi, ((hi - lo) / step).round() as usize)
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |i| {
            if self.steps == 0 {
                self.lo
            } else {
                self.lo + (self.hi - self.lo) * i as f64 / self.steps as f64
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub alpha: Axis,
    pub beta: Axis,
    pub epsilon: Axis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibleRegion {
    pub scanned: usize,
    pub feasible: Vec<ProofParameters>,
    /// `[(α_min, α_max), (β_min, β_max), (ε_min, ε_max)]` over feasible points.
    pub hull: Option<[(f64, f64); 3]>,
    /// The feasible point maximizing the smallest coefficient.
    pub max_margin: Option<(ProofParameters, f64)>,
    /// Every feasible grid point also passes the exact re-check.
    pub exact_recheck: bool,
}

impl FeasibleRegion {
    pub fn contains(&self, alpha: f64, beta: f64, epsilon: f64, tol: f64) -> bool {
        self.feasible.iter().any(|p| {
            (p.alpha - alpha).abs() <= tol && (p.beta - beta).abs() <= tol && (p.epsilon - epsilon).abs() <= tol
        })
    }
}

pub fn cp2_feasible_region(grid: GridSpec) -> Result<FeasibleRegion> {
    let mut scanned = 0;
    let mut feasible = Vec::new();
    let mut best: Option<(ProofParameters, f64)> = None;
    for e in grid.epsilon.points() {
        for a in grid.alpha.points() {
            for b in grid.beta.points() {
                scanned += 1;
                let p = ProofParameters::new(a, b, e)?;
                let c = cp2_coefficients(p);
                let margin = c.iter().copied().fold(f64::INFINITY, f64::min);
                if margin >= 0.0 {
                    if best.is_none_or(|(_, m)| margin > m) {
                        best = Some((p, margin));
                    }
                    feasible.push(p);
                }
            }
        }
    }
    let hull = feasible.first().map(|first| {
        feasible.iter().fold(
            [(first.alpha, first.alpha), (first.beta, first.beta), (first.epsilon, first.epsilon)],
            |[a, b, e], p| {
                [
                    (a.0.min(p.alpha), a.1.max(p.alpha)),
                    (b.0.min(p.beta), b.1.max(p.beta)),
                    (e.0.min(p.epsilon), e.1.max(p.epsilon)),
                ]
            },
        )
    });
    let exact_recheck = feasible.iter().all(|&p| cp2_feasible_exact(p));
    Ok(FeasibleRegion { scanned, feasible, hull, max_margin: best, exact_recheck })
}

/// `c_C` at `β² = 18`, which is exactly zero.
pub fn beta_boundary_coefficient() -> BigRational {
    let beta_sq = rational(18, 1);
    rational(9, 1) - beta_sq / rational(2, 1)
}

/// Largest `β` with `c_C ≥ 0`.
pub fn beta_upper_bound() -> f64 {
    18f64.sqrt()
}

/// Smallest `β` with `c_B ≥ 0` at the given `α`.
pub fn beta_lower_bound(alpha: f64) -> f64 {
    (38.0 + alpha * alpha) / 14.0
}

/// Smallest coefficient, in floating point.
pub fn min_coefficient(p: ProofParameters) -> f64 {
    cp2_coefficients(p).iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn coefficients_to_f64(c: &[BigRational; 4]) -> Coefficients {
    [to_f64(&c[0]), to_f64(&c[1]), to_f64(&c[2]), to_f64(&c[3])]
}
