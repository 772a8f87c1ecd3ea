//! The Page metric on CP²#CP̄² through its conformally related extremal
//! Kähler metric on the moment trapezium `T(a)`.
//!
//! Everything that depends only on the class parameter `a` is built as an
//! exact rational (the double `a` is itself a dyadic rational); the
//! dependence on `t = x1 + x2` is then evaluated in floating point.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::One;

use crate::conformal::{self, NormalizedSup};
use crate::error::{Error, Result};
use crate::numerics::{
    exact, find_root, maximize_1d_with, to_f64, Interval, Polynomial, RationalFunction,
    DEFAULT_SAMPLES,
};
use crate::polytope::{page_trapezium, AffineFunction, DelzantPolygon, Point};
use crate::toric::{extremal_affine_coefficients, ExtremalSolution, SymplecticPotential};

/// Coefficient in Page's volume formula `V = 150.862 Λ⁻²`.
pub const PAGE_VOLUME_COEFFICIENT: f64 = 150.862;

/// `|quartic(a)|` below which the class counts as the Einstein class.
pub const CRITICAL_TOL: f64 = 1e-9;

/// `1 − 6a² − 16a³ + 9a⁴`; its root in `(0, 1/2)` is the Einstein class.
pub fn critical_quartic() -> Polynomial {
    Polynomial::from_integers(&[1, 0, -6, -16, 9])
}

/// `3a⁶ − 24a⁵ + 53a⁴ + 32a³ − 15a² − 8a − 1`, the `t`-coefficient in the
/// numerator of the conformal scalar curvature.
fn kappa_linear_factor() -> Polynomial {
    Polynomial::from_integers(&[-1, -8, -15, 32, 53, -24, 3])
}

/// `(a − 1)³ (1 + 4a + a²)³`.
fn common_denominator() -> Polynomial {
    let lin = Polynomial::from_integers(&[-1, 1]);
    let quad = Polynomial::from_integers(&[1, 4, 1]);
    &lin.pow(3) * &quad.pow(3)
}

/// Numerator coefficients `α_0 … α_4` of `6|∇s|² − s³/3` over
/// `(a − 1)³(1 + 4a + a²)³ t`, as polynomials in `a`.
///
/// `α_3 = 6912a² − 20736a⁴`, as obtained by expanding `6|∇s|² − s³/3`
/// from `f″`, `c1` and `c2`.
pub fn delta_s2_alphas() -> [Polynomial; 5] {
    [
        Polynomial::from_integers(&[0, 0, 0, 0, 0, 6912]),
        Polynomial::from_integers(&[72, 0, -648, 3456, 1944, -10368, -1944]),
        Polynomial::from_integers(&[0, 864, -3456, -15552, 10368, 11232]),
        Polynomial::from_integers(&[0, 0, 6912, 0, -20736]),
        Polynomial::from_integers(&[0, 0, 0, 11520]),
    ]
}

fn check_class(a: f64) -> Result<()> {
    if a > 0.0 && a < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("class parameter must satisfy 0 < a < 1, got {a}")))
    }
}

/// Exact `(c1, c2)` for `s = c1 (x1 + x2) + c2`.
pub fn page_scal_coeffs_exact(a: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let den = (&one - a) * (&one + BigRational::from_integer(4.into()) * a + a * a);
    let c1 = BigRational::from_integer(24.into()) * a / &den;
    let c2 = BigRational::from_integer(6.into()) * (&one - BigRational::from_integer(3.into()) * a * a) / &den;
    (c1, c2)
}

pub fn page_scal_coeffs(a: f64) -> Result<(f64, f64)> {
    check_class(a)?;
    let (c1, c2) = page_scal_coeffs_exact(&exact(a));
    Ok((to_f64(&c1), to_f64(&c2)))
}

/// `f″(t) = 2a(1 − a)/(2at² + (1 + 2a − a²)t + 2a²) − 1/t` as an exact
/// rational function of `t`.
pub fn page_fpp_function(a: f64) -> Result<RationalFunction> {
    check_class(a)?;
    let a = exact(a);
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    let quadratic = Polynomial::new(vec![
        &two * &a * &a,
        &one + &two * &a - &a * &a,
        &two * &a,
    ]);
    let first = RationalFunction::new(
        Polynomial::constant(&two * &a * (&one - &a)),
        quadratic,
    )?;
    let inv_t = RationalFunction::new(Polynomial::constant(one), Polynomial::x())?;
    Ok(&first - &inv_t)
}

/// `f″(t)` on the open slab `a < t < 1`.
pub fn page_fpp(a: f64, t: f64) -> Result<f64> {
    check_class(a)?;
    if !(t > a && t < 1.0) {
        return Err(Error::DomainError(format!("t = {t} outside the slab ({a}, 1)")));
    }
    Ok(page_fpp_function(a)?.eval(t))
}

/// Exact conformal scalar curvature `κ(a, t)` of `s⁻² k`.
pub fn page_conformal_scal_exact(a: &BigRational, t: &BigRational) -> BigRational {
    let n0 = BigRational::from_integer(864.into()) * a * a * critical_quartic().eval_exact(a);
    let n1 = BigRational::from_integer(216.into()) * kappa_linear_factor().eval_exact(a);
    (n0 + n1 * t) / (common_denominator().eval_exact(a) * t)
}

pub fn page_conformal_scal(a: f64, t: f64) -> Result<f64> {
    check_class(a)?;
    if !(t > 0.0) {
        return Err(Error::DomainError(format!("t must be positive, got {t}")));
    }
    Ok(to_f64(&page_conformal_scal_exact(&exact(a), &exact(t))))
}

/// `∂κ/∂t`, which vanishes identically exactly at roots of the quartic.
pub fn page_kappa_t_derivative(a: f64, t: f64) -> Result<f64> {
    check_class(a)?;
    let (ae, te) = (exact(a), exact(t));
    let n0 = BigRational::from_integer(864.into()) * &ae * &ae * critical_quartic().eval_exact(&ae);
    Ok(to_f64(&(-n0 / (common_denominator().eval_exact(&ae) * &te * &te))))
}

/// Root of the critical quartic in `(0, 1/2)`.
pub fn page_critical_a(tol: f64) -> Result<f64> {
    find_root(&critical_quartic(), Interval::new(0.0, 0.5)?, tol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaS2 {
    pub value: f64,
    /// Set when `a` is not the Einstein class: `κ` then depends on `t` and
    /// its average over `[a, 1]` is used.
    pub advisory_only: bool,
}

/// All `a`-dependent data of the Page family, precomputed exactly.
#[derive(Clone, Debug)]
pub struct PageClass {
    a: f64,
    critical: bool,
    c1: f64,
    c2: f64,
    kappa: f64,
    /// `Σ α_i(a)/D(a) · t^i`; divide by `t` for `6|∇s|² − s³/3`.
    delta_numerator: Polynomial,
    fpp: RationalFunction,
}

impl PageClass {
    pub fn new(a: f64) -> Result<Self> {
        check_class(a)?;
        let ae = exact(a);
        let den = common_denominator().eval_exact(&ae);
        let q = critical_quartic().eval_exact(&ae);
        let critical = to_f64(&q).abs() <= CRITICAL_TOL;

        // Average of κ(a, t) = n0/(D t) + n1/D over t ∈ [a, 1].
        let n0 = to_f64(&(BigRational::from_integer(864.into()) * &ae * &ae * &q / &den));
        let n1 = to_f64(&(BigRational::from_integer(216.into()) * kappa_linear_factor().eval_exact(&ae) / &den));
        let kappa = n1 + n0 * (1.0 / a).ln() / (1.0 - a);

        let delta_numerator = Polynomial::new(
            delta_s2_alphas()
                .iter()
                .map(|alpha| alpha.eval_exact(&ae) / &den)
                .collect(),
        );
        let (c1, c2) = page_scal_coeffs_exact(&ae);
        Ok(Self {
            a,
            critical,
            c1: to_f64(&c1),
            c2: to_f64(&c2),
            kappa,
            delta_numerator,
            fpp: page_fpp_function(a)?,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn is_critical(&self) -> bool {
        self.critical
    }

    pub fn scal(&self) -> AffineFunction {
        AffineFunction::new(self.c1, self.c1, self.c2)
    }

    /// `κ` used for the `κ/3` term: the constant value in the Einstein
    /// class, the `t`-average otherwise.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn trapezium(&self) -> DelzantPolygon {
        page_trapezium(self.a).expect("class checked at construction")
    }

    pub fn potential(&self) -> SymplecticPotential {
        SymplecticPotential::with_auxiliary(self.trapezium(), self.fpp.clone())
    }

    /// Closed-form `Δs² = κ/3 + Σ α_i t^i / ((a − 1)³(1 + 4a + a²)³ t)` on `[a, 1]`.
    pub fn delta_s2(&self, t: f64) -> Result<DeltaS2> {
        if !(t >= self.a && t <= 1.0) {
            return Err(Error::DomainError(format!("t = {t} outside [{}, 1]", self.a)));
        }
        Ok(DeltaS2 {
            value: self.delta_s2_unchecked(t),
            advisory_only: !self.critical,
        })
    }

    fn delta_s2_unchecked(&self, t: f64) -> f64 {
        self.kappa / 3.0 + self.delta_numerator.eval(t) / t
    }

    /// `sup_{t ∈ [a, 1]} Δs²` with its location.
    pub fn delta_s2_sup(&self, samples: usize, tol: f64) -> (f64, f64) {
        let domain = Interval::new(self.a, 1.0).expect("a < 1");
        let m = maximize_1d_with(|t| self.delta_s2_unchecked(t), domain, tol, samples);
        (m.max, m.argmax)
    }

    /// `(4π)² ∫_T s⁻⁴ dx`.
    pub fn volume(&self, tol: f64) -> Result<f64> {
        let s = self.scal();
        let integral = self
            .trapezium()
            .integrate_function(|x| s.eval(x).powi(-4), tol / (16.0 * PI * PI))?;
        Ok(16.0 * PI * PI * integral)
    }
}

pub fn page_delta_s2(a: f64, t: f64) -> Result<DeltaS2> {
    PageClass::new(a)?.delta_s2(t)
}

pub fn page_volume(a: f64, tol: f64) -> Result<f64> {
    PageClass::new(a)?.volume(tol)
}

/// Deterministic interior sample points of `T(a)`, kept `margin` away from
/// the boundary.
pub fn interior_points(a: f64, count: usize, margin: f64) -> Vec<Point> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    (0..count)
        .map(|k| {
            let t = a + margin * 2.0 + (1.0 - a - margin * 4.0) * (k as f64 + 0.5) / count as f64;
            let frac = 0.1 + 0.8 * ((k as f64 + 1.0) * golden).fract();
            [t * frac, t * (1.0 - frac)]
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct PageConfig {
    pub root_tol: f64,
    pub samples: usize,
    pub max_tol: f64,
    pub quad_tol: f64,
    pub fd_step: f64,
    pub identity_points: usize,
}

impl Default for PageConfig {
    fn default() -> Self {
        Self {
            root_tol: 1e-13,
            samples: DEFAULT_SAMPLES,
            max_tol: 1e-12,
            quad_tol: 1e-12,
            fd_step: 1e-3,
            identity_points: 10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PageAnalysis {
    pub a_star: f64,
    pub quartic_residual: f64,
    pub c1: f64,
    pub c2: f64,
    /// Donaldson integration-by-parts solve on the trapezium.
    pub solver: ExtremalSolution,
    /// Closed-form conformal scalar curvature at `a*`.
    pub kappa: f64,
    pub kappa_t_derivative: f64,
    /// Mean of `s³ + 6sΔs − 12|∇s|²` over interior points, with
    /// finite-difference `Δs`.
    pub kappa_identity: f64,
    pub kappa_identity_spread: f64,
    pub volume: f64,
    /// `Λ` from `V = 150.862 Λ⁻²`.
    pub lambda_einstein: f64,
    pub kappa_from_volume: f64,
    /// `sup Δs²` in the working normalization.
    pub k_sup: f64,
    pub k_argmax: f64,
    /// `|K(2N samples) − K(N samples)|`.
    pub k_sensitivity: f64,
    /// Max deviation between closed-form `Δs²` and `κ/3 + 6|∇s|² − s³/3`.
    pub delta_s2_identity_deviation: f64,
    pub normalized: NormalizedSup,
}

impl PageAnalysis {
    pub fn ratio(&self) -> f64 {
        self.normalized.ratio
    }
}

pub fn page_full_analysis(config: &PageConfig) -> Result<PageAnalysis> {
    let a_star = page_critical_a(config.root_tol)?;
    let quartic_residual = critical_quartic().eval(a_star).abs();
    let class = PageClass::new(a_star)?;
    if !class.is_critical() {
        return Err(Error::DomainError(format!(
            "quartic residual {quartic_residual:e} at a* exceeds {CRITICAL_TOL:e}"
        )));
    }
    let (c1, c2) = page_scal_coeffs(a_star)?;
    let solver = extremal_affine_coefficients(&class.trapezium())?;

    let kappa = page_conformal_scal(a_star, 0.5 * (a_star + 1.0))?;
    let kappa_t_derivative = page_kappa_t_derivative(a_star, 0.5 * (a_star + 1.0))?;

    let potential = class.potential();
    let s = class.scal();
    let h = config.fd_step;
    let mut kappas = Vec::with_capacity(config.identity_points);
    let mut delta_dev: f64 = 0.0;
    for x in interior_points(a_star, config.identity_points, 4.0 * h) {
        let sv = s.eval(x);
        let lap = potential.laplacian_affine(&s, x, h)?;
        let grad = potential.gradient_norm_squared(&s, x)?;
        kappas.push(conformal::conformal_scal_identity(sv, lap, grad));
        let identity = conformal::delta_s2_identity(kappa, grad, sv);
        let closed = class.delta_s2(x[0] + x[1])?.value;
        delta_dev = delta_dev.max((identity - closed).abs());
    }
    let kappa_identity = kappas.iter().sum::<f64>() / kappas.len().max(1) as f64;
    let kappa_identity_spread = kappas
        .iter()
        .map(|k| (k - kappa_identity).abs())
        .fold(0.0, f64::max);

    let volume = class.volume(config.quad_tol)?;
    let lambda_einstein = (PAGE_VOLUME_COEFFICIENT / volume).sqrt();

    let (k_sup, k_argmax) = class.delta_s2_sup(config.samples, config.max_tol);
    let (k_fine, _) = class.delta_s2_sup(2 * config.samples, config.max_tol);
    let normalized = conformal::normalized_sup(kappa, k_sup)?;

    Ok(PageAnalysis {
        a_star,
        quartic_residual,
        c1,
        c2,
        solver,
        kappa,
        kappa_t_derivative,
        kappa_identity,
        kappa_identity_spread,
        volume,
        lambda_einstein,
        kappa_from_volume: 4.0 * lambda_einstein,
        k_sup,
        k_argmax,
        k_sensitivity: (k_fine - k_sup).abs(),
        delta_s2_identity_deviation: delta_dev,
        normalized,
    })
}
