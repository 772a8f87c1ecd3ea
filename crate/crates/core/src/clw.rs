//! The Chen-LeBrun-Weber metric on CP²#2CP̄², conformal to an extremal
//! Kähler metric on the pentagon with vertices (0,0), (a,0), (a,1), (1,a), (0,a).

use std::f64::consts::PI;

use crate::conformal::{self, NormalizedSup};
use crate::error::{Error, Result};
use crate::numerics::{solve_linear_3, Interval};
use crate::polytope::{clw_pentagon, AffineFunction, BivariatePolynomial, DelzantPolygon};
use crate::toric::AffineScalarCurvature;

/// Class parameter of the extremal metric found by Chen, LeBrun and Weber.
pub const CLW_DEFAULT_A: f64 = 1.958;

/// External bound `sup Δs² < 1.363` from balanced-metric approximations.
pub const CLW_DEFAULT_K: f64 = 1.363;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopologyData {
    pub euler: i64,
    pub signature: i64,
}

impl TopologyData {
    /// CP² blown up twice: χ = 3 + 2, σ = 1 − 2.
    pub const CP2_TWO_BLOWUPS: Self = Self { euler: 5, signature: -1 };
}

/// `A = ∫x1²`, `B = ∫x1x2`, `C = ∫x1`, `D = ∫1`, `E0 = ∫dσ`, `E1 = ∫x1 dσ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PentagonIntegrals {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e0: f64,
    pub e1: f64,
}

impl PentagonIntegrals {
    pub fn closed_form(a: f64) -> Self {
        let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
        Self {
            a: (a4 + 4.0 * a3 - 1.0) / 12.0,
            b: (a4 + 4.0 * a3 + 6.0 * a2 - 4.0 * a - 1.0) / 24.0,
            c: (a3 + 3.0 * a2 - 1.0) / 6.0,
            d: (a2 + 2.0 * a - 1.0) / 2.0,
            e0: 1.0 + 3.0 * a,
            e1: a2 + a,
        }
    }

    pub fn of_polygon(p: &DelzantPolygon) -> Self {
        Self {
            a: p.integrate_monomial(2, 0),
            b: p.integrate_monomial(1, 1),
            c: p.integrate_monomial(1, 0),
            d: p.integrate_monomial(0, 0),
            e0: p.boundary_measure_integral(&AffineFunction::ONE),
            e1: p.boundary_measure_integral(&AffineFunction::X1),
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e0, self.e1]
    }

    /// Largest relative deviation between two sets of integrals.
    pub fn max_relative_deviation(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    pub fn system(&self) -> ([[f64; 3]; 3], [f64; 3]) {
        (
            [[self.a, self.b, self.c], [self.b, self.a, self.c], [self.c, self.c, self.d]],
            [self.e1, self.e1, self.e0],
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClwIntegrals {
    pub closed_form: PentagonIntegrals,
    pub triangulated: PentagonIntegrals,
    pub max_relative_deviation: f64,
}

pub fn clw_integrals(a: f64) -> Result<ClwIntegrals> {
    let pentagon = clw_pentagon(a)?;
    let closed_form = PentagonIntegrals::closed_form(a);
    let triangulated = PentagonIntegrals::of_polygon(&pentagon);
    Ok(ClwIntegrals {
        closed_form,
        triangulated,
        max_relative_deviation: closed_form.max_relative_deviation(&triangulated),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClwScal {
    pub scal: AffineScalarCurvature,
    pub residual: f64,
}

pub fn clw_scal(a: f64) -> Result<ClwScal> {
    let integrals = clw_integrals(a)?;
    let (m, rhs) = integrals.closed_form.system();
    let sol = solve_linear_3(m, rhs)?;
    Ok(ClwScal {
        scal: AffineFunction::new(sol.x[0], sol.x[1], sol.x[2]),
        residual: sol.residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EinsteinConstant {
    pub lambda: f64,
    pub kappa: f64,
    /// `16π² ∫_P s⁻⁴`.
    pub volume: f64,
    /// `16π² ∫_P s²`.
    pub scal_l2: f64,
}

/// Einstein constant of `s⁻² k` from Gauss-Bonnet and the signature formula.
pub fn einstein_constant(
    polygon: &DelzantPolygon,
    scal: &AffineFunction,
    topology: TopologyData,
    tol: f64,
) -> Result<EinsteinConstant> {
    let min_s = polygon
        .vertices()
        .iter()
        .map(|&v| scal.eval(v))
        .fold(f64::INFINITY, f64::min);
    if !(min_s > 0.0) {
        return Err(Error::DomainError(format!(
            "scalar curvature must be positive on the polygon, minimum over vertices is {min_s}"
        )));
    }
    let torus = 16.0 * PI * PI;
    let volume = torus * polygon.integrate_function(|x| scal.eval(x).powi(-4), tol / torus)?;
    let scal_l2 = torus * polygon.integrate_polynomial(&BivariatePolynomial::affine_squared(scal));
    let numerator = 96.0 * PI * PI * topology.euler as f64
        + 144.0 * PI * PI * topology.signature as f64
        - scal_l2;
    if !(numerator > 0.0) {
        return Err(Error::NegativeDiscriminant(numerator));
    }
    let lambda = (numerator / (8.0 * volume)).sqrt();
    Ok(EinsteinConstant {
        lambda,
        kappa: 4.0 * lambda,
        volume,
        scal_l2,
    })
}

pub fn clw_einstein_constant(a: f64, tol: f64) -> Result<EinsteinConstant> {
    let s = clw_scal(a)?;
    einstein_constant(&clw_pentagon(a)?, &s.scal, TopologyData::CP2_TWO_BLOWUPS, tol)
}

pub fn clw_instability_ratio(k_input: f64, kappa: f64) -> Result<NormalizedSup> {
    conformal::normalized_sup(kappa, k_input)
}

#[derive(Clone, Debug)]
pub struct ClwAnalysis {
    pub a: f64,
    pub integrals: ClwIntegrals,
    pub scal: AffineScalarCurvature,
    pub solve_residual: f64,
    /// `∫_∂P f dσ − ∫_P s f` for `f = 1, x1, x2`.
    pub closure: [f64; 3],
    pub min_vertex_scal: f64,
    pub einstein: EinsteinConstant,
    pub k_input: f64,
    pub normalized: NormalizedSup,
    /// `(a ± 5e-4)` sensitivity of `Λ`.
    pub lambda_sensitivity: f64,
}

impl ClwAnalysis {
    pub fn ratio(&self) -> f64 {
        self.normalized.ratio
    }
}

pub fn clw_full_analysis(a: f64, k_input: f64, tol: f64) -> Result<ClwAnalysis> {
    let integrals = clw_integrals(a)?;
    let solved = clw_scal(a)?;
    let pentagon = clw_pentagon(a)?;
    let s = solved.scal;
    let closure = [AffineFunction::ONE, AffineFunction::X1, AffineFunction::X2].map(|f| {
        let product = BivariatePolynomial::new(vec![
            (0, 0, s.b * f.b),
            (1, 0, s.a1 * f.b + s.b * f.a1),
            (0, 1, s.a2 * f.b + s.b * f.a2),
            (2, 0, s.a1 * f.a1),
            (1, 1, s.a1 * f.a2 + s.a2 * f.a1),
            (0, 2, s.a2 * f.a2),
        ]);
        pentagon.boundary_measure_integral(&f) - pentagon.integrate_polynomial(&product)
    });
    let min_vertex_scal = pentagon
        .vertices()
        .iter()
        .map(|&v| s.eval(v))
        .fold(f64::INFINITY, f64::min);
    let einstein = einstein_constant(&pentagon, &s, TopologyData::CP2_TWO_BLOWUPS, tol)?;
    let lo = clw_einstein_constant(a - 5e-4, tol)?.lambda;
    let hi = clw_einstein_constant(a + 5e-4, tol)?.lambda;
    Ok(ClwAnalysis {
        a,
        integrals,
        scal: s,
        solve_residual: solved.residual,
        closure,
        min_vertex_scal,
        einstein,
        k_input,
        normalized: clw_instability_ratio(k_input, einstein.kappa)?,
        lambda_sensitivity: (hi - lo).abs() / 2.0,
    })
}

/// `(a, Λ)` at `samples` evenly spaced class parameters.
pub fn lambda_sweep(range: Interval, samples: usize, tol: f64) -> Result<Vec<(f64, f64)>> {
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let a = range.lo() + range.width() * i as f64 / (n - 1) as f64;
            Ok((a, clw_einstein_constant(a, tol)?.lambda))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::ScalingState;

    #[test]
    fn closed_forms_at_two() {
        let c = PentagonIntegrals::closed_form(2.0);
        assert!((c.a - 47.0 / 12.0).abs() < 1e-15);
        assert!((c.d - 3.5).abs() < 1e-15);
        assert_eq!((c.e0, c.e1), (7.0, 6.0));
    }

    #[test]
    fn closed_forms_match_triangulation() {
        for a in [1.5, CLW_DEFAULT_A, 2.0, 3.0] {
            let i = clw_integrals(a).unwrap();
            assert!(i.max_relative_deviation < 1e-12, "a = {a}: {}", i.max_relative_deviation);
        }
        assert!(clw_integrals(1.0).is_err());
    }

    #[test]
    fn scal_coefficients() {
        let s = clw_scal(CLW_DEFAULT_A).unwrap().scal;
        assert!((s.a1 + 0.423).abs() < 1e-3 && (s.a2 + 0.423).abs() < 1e-3);
        assert!((s.b - 2.790).abs() < 1e-3);
        assert!((s.a1 - s.a2).abs() < 1e-10);
        let t = clw_scal(2.0).unwrap().scal;
        assert!((t.a1 - s.a1).abs() < 0.05 && (t.b - s.b).abs() < 0.05);
    }

    #[test]
    fn einstein_constant_values() {
        let e = clw_einstein_constant(CLW_DEFAULT_A, 1e-12).unwrap();
        assert!((e.lambda - 1.886).abs() < 1e-2);
        assert!((e.kappa - 7.54).abs() < 4e-2);
        let st = ScalingState::normalizing(e.kappa).unwrap();
        assert!((st.scaled_einstein_constant() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn negative_discriminant_is_reported() {
        let p = clw_pentagon(2.0).unwrap();
        let s = AffineFunction::new(0.0, 0.0, 1.0);
        let err = einstein_constant(&p, &s, TopologyData { euler: 0, signature: -1 }, 1e-10);
        assert!(matches!(err, Err(Error::NegativeDiscriminant(_))));
        let neg = AffineFunction::new(-1.0, -1.0, 1.0);
        assert!(einstein_constant(&p, &neg, TopologyData::CP2_TWO_BLOWUPS, 1e-10).is_err());
    }

    #[test]
    fn ratio_values() {
        let r = clw_instability_ratio(CLW_DEFAULT_K, 7.54).unwrap();
        assert!(r.ratio < 2.17 && r.cone_unstable);
        assert_eq!(clw_instability_ratio(0.0, 7.54).unwrap().ratio, 0.0);
    }

    #[test]
    fn full_analysis_closure_and_positivity() {
        let an = clw_full_analysis(CLW_DEFAULT_A, CLW_DEFAULT_K, 1e-12).unwrap();
        assert!(an.closure.iter().all(|c| c.abs() < 1e-10), "{:?}", an.closure);
        assert!(an.min_vertex_scal > 0.0);
        assert!(an.solve_residual < 1e-12);
        assert!(an.lambda_sensitivity < 0.2);
    }

    #[test]
    fn lambda_is_continuous_near_default() {
        let sweep = lambda_sweep(Interval::new(1.9, 2.0).unwrap(), 11, 1e-10).unwrap();
        assert_eq!(sweep.len(), 11);
        for w in sweep.windows(2) {
            assert!(w[0].1 > 0.0 && (w[1].1 - w[0].1).abs() < 0.5);
        }
    }
}
