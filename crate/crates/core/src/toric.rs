//! Toric Kähler metrics in symplectic coordinates.
//!
//! A potential `u(x) = Σ_i l_i(x) log l_i(x) + f(x1 + x2)` on a Delzant
//! polygon defines the metric `u_ij dx^i dx^j + u^ij dθ^i dθ^j`. Its
//! Hessian is available in closed form, `Σ_i ν_i ν_iᵀ / l_i + f″(t)·[[1,1],[1,1]]`,
//! so the inverse `u^ij` is exact pointwise and curvature quantities are
//! taken by finite differences of `u^ij`.

use crate::error::{Error, Result};
use crate::numerics::{solve_linear_3, RationalFunction};
use crate::polytope::{AffineFunction, DelzantPolygon, Point};

/// `l_i(x)` at or below this value counts as the boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Affine scalar curvature `s(x) = a1·x1 + a2·x2 + b`.
pub type AffineScalarCurvature = AffineFunction;

pub type Sym2 = [[f64; 2]; 2];

fn invert(m: &Sym2) -> Sym2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

#[derive(Clone, Debug)]
pub struct SymplecticPotential {
    polygon: DelzantPolygon,
    aux_fpp: RationalFunction,
}

impl SymplecticPotential {
    /// Guillemin potential `Σ l_i log l_i` (no auxiliary term).
    pub fn guillemin(polygon: DelzantPolygon) -> Self {
        Self {
            polygon,
            aux_fpp: RationalFunction::zero(),
        }
    }

    /// Guillemin part plus `f(x1 + x2)` with `f″ = aux_fpp`.
    pub fn with_auxiliary(polygon: DelzantPolygon, aux_fpp: RationalFunction) -> Self {
        Self { polygon, aux_fpp }
    }

    pub fn polygon(&self) -> &DelzantPolygon {
        &self.polygon
    }

    pub fn aux_fpp(&self) -> &RationalFunction {
        &self.aux_fpp
    }

    /// The auxiliary function depends on `⟨(1, 1), x⟩` only.
    pub fn aux_direction(&self) -> [f64; 2] {
        [1.0, 1.0]
    }

    fn check_interior(&self, x: Point) -> Result<()> {
        if self.polygon.min_facet_value(x) <= BOUNDARY_TOL {
            Err(Error::BoundaryPoint { x: x[0], y: x[1] })
        } else {
            Ok(())
        }
    }

    /// Euclidean Hessian `u_ij(x)`.
    pub fn metric_hessian(&self, x: Point) -> Result<Sym2> {
        self.check_interior(x)?;
        Ok(self.hessian_unchecked(x))
    }

    fn hessian_unchecked(&self, x: Point) -> Sym2 {
        let mut h = [[0.0; 2]; 2];
        for facet in self.polygon.facets() {
            let l = facet.eval(x);
            let n = facet.normal_f64();
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] += n[i] * n[j] / l;
                }
            }
        }
        if !self.aux_fpp.is_zero() {
            let fpp = self.aux_fpp.eval(x[0] + x[1]);
            for row in &mut h {
                for v in row.iter_mut() {
                    *v += fpp;
                }
            }
        }
        h
    }

    /// Inverse Hessian `u^ij(x)`.
    pub fn inverse_hessian(&self, x: Point) -> Result<Sym2> {
        self.check_interior(x)?;
        Ok(invert(&self.hessian_unchecked(x)))
    }

    fn check_stencil(&self, x: Point, h: f64) -> Result<()> {
        if self.polygon.boundary_distance(x) <= 2.0 * h {
            Err(Error::BoundaryPoint { x: x[0], y: x[1] })
        } else {
            Ok(())
        }
    }

    /// Scalar curvature `S = −Σ_ij ∂²u^ij/∂x_i∂x_j` by central second
    /// differences of step `h`; `x` must be further than `2h` from every
    /// facet.
    pub fn abreu_scalar_curvature(&self, x: Point, h: f64) -> Result<f64> {
        self.check_stencil(x, h)?;
        let inv = |dx: f64, dy: f64| invert(&self.hessian_unchecked([x[0] + dx, x[1] + dy]));
        let centre = inv(0.0, 0.0);
        let d11 = (inv(h, 0.0)[0][0] - 2.0 * centre[0][0] + inv(-h, 0.0)[0][0]) / (h * h);
        let d22 = (inv(0.0, h)[1][1] - 2.0 * centre[1][1] + inv(0.0, -h)[1][1]) / (h * h);
        let d12 = (inv(h, h)[0][1] - inv(h, -h)[0][1] - inv(-h, h)[0][1] + inv(-h, -h)[0][1])
            / (4.0 * h * h);
        Ok(-(d11 + 2.0 * d12 + d22))
    }

    /// Laplacian `Δs = Σ_ij ∂_i(u^ij ∂_j s)` of a torus-invariant affine
    /// function, by central differences of step `h`.
    pub fn laplacian_affine(&self, s: &AffineFunction, x: Point, h: f64) -> Result<f64> {
        self.check_stencil(x, h)?;
        let grad = [s.a1, s.a2];
        let flux = |dx: f64, dy: f64, i: usize| {
            let m = invert(&self.hessian_unchecked([x[0] + dx, x[1] + dy]));
            m[i][0] * grad[0] + m[i][1] * grad[1]
        };
        let d1 = (flux(h, 0.0, 0) - flux(-h, 0.0, 0)) / (2.0 * h);
        let d2 = (flux(0.0, h, 1) - flux(0.0, -h, 1)) / (2.0 * h);
        Ok(d1 + d2)
    }

    /// `|∇s|² = u^ij ∂_i s ∂_j s`.
    pub fn gradient_norm_squared(&self, s: &AffineFunction, x: Point) -> Result<f64> {
        let m = self.inverse_hessian(x)?;
        let g = [s.a1, s.a2];
        Ok((0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| g[i] * m[i][j] * g[j])
            .sum())
    }
}

/// Moment and boundary integrals entering the extremal system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentData {
    pub x1x1: f64,
    pub x1x2: f64,
    pub x2x2: f64,
    pub x1: f64,
    pub x2: f64,
    pub area: f64,
    /// `∫_∂P dσ`
    pub e0: f64,
    /// `∫_∂P x1 dσ`
    pub e1: f64,
    /// `∫_∂P x2 dσ`
    pub e2: f64,
}

impl MomentData {
    pub fn of(p: &DelzantPolygon) -> Self {
        Self {
            x1x1: p.integrate_monomial(2, 0),
            x1x2: p.integrate_monomial(1, 1),
            x2x2: p.integrate_monomial(0, 2),
            x1: p.integrate_monomial(1, 0),
            x2: p.integrate_monomial(0, 1),
            area: p.integrate_monomial(0, 0),
            e0: p.boundary_measure_integral(&AffineFunction::ONE),
            e1: p.boundary_measure_integral(&AffineFunction::X1),
            e2: p.boundary_measure_integral(&AffineFunction::X2),
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.x1x1, self.x1x2, self.x1],
            [self.x1x2, self.x2x2, self.x2],
            [self.x1, self.x2, self.area],
        ]
    }

    pub fn rhs(&self) -> [f64; 3] {
        [self.e1, self.e2, self.e0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtremalSolution {
    pub scal: AffineScalarCurvature,
    pub moments: MomentData,
    /// `‖Mx − b‖∞` of the linear solve.
    pub residual: f64,
    /// `∫_∂P f dσ − ∫_P s f dx` for `f = 1, x1, x2`.
    pub closure: [f64; 3],
}

impl ExtremalSolution {
    pub fn max_closure(&self) -> f64 {
        self.closure.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Affine scalar curvature of the extremal metric on `p`: the unique
/// affine `s` with `∫_∂P f dσ = ∫_P s f dx` for every affine `f`.
pub fn extremal_affine_coefficients(p: &DelzantPolygon) -> Result<ExtremalSolution> {
    let moments = MomentData::of(p);
    let sol = solve_linear_3(moments.matrix(), moments.rhs())?;
    let [a1, a2, b] = sol.x;
    let scal = AffineFunction::new(a1, a2, b);

    let weighted = |f: &AffineFunction| {
        // ∫ s·f over P from the monomial moments.
        let s = &scal;
        s.a1 * f.a1 * moments.x1x1
            + (s.a1 * f.a2 + s.a2 * f.a1) * moments.x1x2
            + s.a2 * f.a2 * moments.x2x2
            + (s.a1 * f.b + s.b * f.a1) * moments.x1
            + (s.a2 * f.b + s.b * f.a2) * moments.x2
            + s.b * f.b * moments.area
    };
    let closure = [AffineFunction::ONE, AffineFunction::X1, AffineFunction::X2]
        .map(|f| p.boundary_measure_integral(&f) - weighted(&f));

    Ok(ExtremalSolution {
        scal,
        moments,
        residual: sol.residual,
        closure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{clw_pentagon, unit_square};

    fn square() -> SymplecticPotential {
        SymplecticPotential::guillemin(unit_square())
    }

    #[test]
    fn square_hessian_at_centre() {
        let h = square().metric_hessian([0.5, 0.5]).unwrap();
        assert_eq!(h, [[4.0, 0.0], [0.0, 4.0]]);
    }

    #[test]
    fn boundary_points_are_rejected() {
        let u = square();
        assert!(matches!(u.metric_hessian([0.0, 0.5]), Err(Error::BoundaryPoint { .. })));
        assert!(matches!(u.inverse_hessian([1.0, 1.0]), Err(Error::BoundaryPoint { .. })));
        assert!(matches!(
            u.abreu_scalar_curvature([0.0015, 0.5], 1e-3),
            Err(Error::BoundaryPoint { .. })
        ));
    }

    #[test]
    fn square_abreu_is_four() {
        let u = square();
        for x in [[0.5, 0.5], [0.2, 0.7], [0.9, 0.1]] {
            let s = u.abreu_scalar_curvature(x, DEFAULT_STEP).unwrap();
            assert!((s - 4.0).abs() < 1e-5, "{x:?}: {s}");
        }
    }

    #[test]
    fn square_gradient_norm() {
        let u = square();
        let g = u.gradient_norm_squared(&AffineFunction::X1, [0.5, 0.5]).unwrap();
        assert!((g - 0.25).abs() < 1e-15);
        let constant = AffineFunction::new(0.0, 0.0, 3.0);
        assert_eq!(u.gradient_norm_squared(&constant, [0.3, 0.6]).unwrap(), 0.0);
    }

    #[test]
    fn square_extremal_is_constant_four() {
        let sol = extremal_affine_coefficients(&unit_square()).unwrap();
        let m = sol.moments;
        assert!((m.x1x1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.x1x2 - 0.25).abs() < 1e-15);
        assert!((m.e0 - 4.0).abs() < 1e-15 && (m.e1 - 2.0).abs() < 1e-15);
        assert!(sol.scal.a1.abs() < 1e-12 && sol.scal.a2.abs() < 1e-12);
        assert!((sol.scal.b - 4.0).abs() < 1e-12);
        assert!(sol.max_closure() < 1e-12);
    }

    #[test]
    fn square_laplacian_of_coordinate() {
        // Δx1 = ∂1(u^11) = ∂1(x1(1 − x1)) = 1 − 2x1.
        let u = square();
        let got = u.laplacian_affine(&AffineFunction::X1, [0.3, 0.4], DEFAULT_STEP).unwrap();
        assert!((got - 0.4).abs() < 1e-9);
    }

    #[test]
    fn pentagon_solution_is_symmetric() {
        let sol = extremal_affine_coefficients(&clw_pentagon(1.958).unwrap()).unwrap();
        assert!((sol.scal.a1 - sol.scal.a2).abs() < 1e-10);
        assert!(sol.max_closure() < 1e-9);
    }
}
