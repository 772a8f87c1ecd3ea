//! Delzant polygons in the plane.
//!
//! A polygon is the set `{x : l_i(x) = ⟨ν_i, x⟩ + c_i ≥ 0}` for a list of
//! facets with integer normals `ν_i`. Offsets are kept exactly as given so
//! that `l_i` matches the affine functions used by the symplectic
//! potentials in [`crate::toric`].
//!
//! Integrals of polynomials are computed exactly (up to rounding) by a fan
//! triangulation from the vertex average and the barycentric moment formula
//! `∫_T λ0^a λ1^b λ2^c = 2|T| a! b! c! / (a+b+c+2)!`. General integrands use
//! collapsed Gauss-Legendre rules on the same triangles with adaptive
//! midpoint subdivision.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, QuadratureRule};

/// Feasibility tolerance for vertices, relative to the polygon's scale.
pub const VERTEX_TOL: f64 = 1e-12;

const TRIANGLE_RULE_ORDER: usize = 8;
const MAX_TRIANGLE_DEPTH: u32 = 12;

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Facet {
    pub normal: [i64; 2],
    pub offset: f64,
}

impl Facet {
    pub fn new(normal: [i64; 2], offset: f64) -> Self {
        Self { normal, offset }
    }

    /// `l(x) = ⟨ν, x⟩ + c`.
    pub fn eval(&self, x: Point) -> f64 {
        self.normal[0] as f64 * x[0] + self.normal[1] as f64 * x[1] + self.offset
    }

    pub fn normal_f64(&self) -> [f64; 2] {
        [self.normal[0] as f64, self.normal[1] as f64]
    }

    /// Euclidean length of the normal.
    pub fn normal_norm(&self) -> f64 {
        let [a, b] = self.normal_f64();
        a.hypot(b)
    }

    pub fn is_primitive(&self) -> bool {
        gcd(self.normal[0], self.normal[1]) == 1
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Affine function `a1·x1 + a2·x2 + b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineFunction {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

impl AffineFunction {
    pub const ONE: Self = Self::new(0.0, 0.0, 1.0);
    pub const X1: Self = Self::new(1.0, 0.0, 0.0);
    pub const X2: Self = Self::new(0.0, 1.0, 0.0);

    pub const fn new(a1: f64, a2: f64, b: f64) -> Self {
        Self { a1, a2, b }
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.a1 * x[0] + self.a2 * x[1] + self.b
    }
}

/// Sum of monomials `coeff · x1^i · x2^j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BivariatePolynomial {
    pub terms: Vec<(u32, u32, f64)>,
}

impl BivariatePolynomial {
    pub fn new(terms: Vec<(u32, u32, f64)>) -> Self {
        Self { terms }
    }

    pub fn monomial(i: u32, j: u32) -> Self {
        Self::new(vec![(i, j, 1.0)])
    }

    /// Square of an affine function, expanded.
    pub fn affine_squared(f: &AffineFunction) -> Self {
        let AffineFunction { a1, a2, b } = *f;
        Self::new(vec![
            (2, 0, a1 * a1),
            (1, 1, 2.0 * a1 * a2),
            (0, 2, a2 * a2),
            (1, 0, 2.0 * a1 * b),
            (0, 1, 2.0 * a2 * b),
            (0, 0, b * b),
        ])
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * x[0].powi(i as i32) * x[1].powi(j as i32))
            .sum()
    }
}

/// Edge of a polygon between consecutive vertices, lying on `facet`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub facet: usize,
    pub start: Point,
    pub end: Point,
}

impl Edge {
    pub fn length(&self) -> f64 {
        (self.end[0] - self.start[0]).hypot(self.end[1] - self.start[1])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelzantPolygon {
    facets: Vec<Facet>,
    vertices: Vec<Point>,
    edges: Vec<Edge>,
    delzant: bool,
}

impl DelzantPolygon {
    /// Build the polygon cut out by `facets`: vertices are the pairwise
    /// facet intersections satisfying every inequality, ordered
    /// counterclockwise from the lowest (then leftmost) vertex.
    pub fn from_facets(facets: Vec<Facet>) -> Result<Self> {
        if facets.iter().any(|f| f.normal == [0, 0]) {
            return Err(Error::DegeneratePolytope("zero facet normal".into()));
        }
        if facets.len() < 3 || !normals_surround_origin(&facets) {
            return Err(Error::Unbounded);
        }

        let scale = facets
            .iter()
            .map(|f| f.offset.abs() / f.normal_norm())
            .fold(1.0, f64::max);
        let tol = VERTEX_TOL * scale;

        let mut vertices: Vec<Point> = Vec::new();
        for i in 0..facets.len() {
            for j in i + 1..facets.len() {
                let Some(v) = intersect(&facets[i], &facets[j]) else {
                    continue;
                };
                let feasible = facets.iter().all(|f| f.eval(v) >= -tol * f.normal_norm());
                let seen = vertices
                    .iter()
                    .any(|w| (w[0] - v[0]).abs() <= 1e3 * tol && (w[1] - v[1]).abs() <= 1e3 * tol);
                if feasible && !seen {
                    vertices.push(v);
                }
            }
        }
        if vertices.len() < 3 {
            return Err(Error::EmptyInterior);
        }

        let n = vertices.len() as f64;
        let center = [
            vertices.iter().map(|v| v[0]).sum::<f64>() / n,
            vertices.iter().map(|v| v[1]).sum::<f64>() / n,
        ];
        vertices.sort_by(|p, q| {
            let ap = (p[1] - center[1]).atan2(p[0] - center[0]);
            let aq = (q[1] - center[1]).atan2(q[0] - center[0]);
            ap.total_cmp(&aq)
        });
        let start = (0..vertices.len())
            .min_by(|&i, &j| {
                let (p, q) = (vertices[i], vertices[j]);
                if (p[1] - q[1]).abs() > 1e3 * tol {
                    p[1].total_cmp(&q[1])
                } else {
                    p[0].total_cmp(&q[0])
                }
            })
            .unwrap_or(0);
        vertices.rotate_left(start);

        if shoelace_area(&vertices) <= tol * scale {
            return Err(Error::EmptyInterior);
        }

        let mut edges = Vec::with_capacity(vertices.len());
        for k in 0..vertices.len() {
            let (p, q) = (vertices[k], vertices[(k + 1) % vertices.len()]);
            let on = |f: &Facet| f.eval(p).abs() <= 1e3 * tol * f.normal_norm()
                && f.eval(q).abs() <= 1e3 * tol * f.normal_norm();
            let facet = facets.iter().position(on).ok_or_else(|| {
                Error::DegeneratePolytope(format!("no facet supports edge {p:?} -> {q:?}"))
            })?;
            edges.push(Edge {
                facet,
                start: p,
                end: q,
            });
        }

        let delzant = edges.len() == facets.len()
            && facets.iter().all(Facet::is_primitive)
            && (0..edges.len()).all(|k| {
                let a = facets[edges[k].facet].normal;
                let b = facets[edges[(k + 1) % edges.len()].facet].normal;
                (a[0] * b[1] - a[1] * b[0]).abs() == 1
            });

        Ok(Self {
            facets,
            vertices,
            edges,
            delzant,
        })
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Primitive normals with unimodular pairs at every vertex and one edge
    /// per facet.
    pub fn is_delzant(&self) -> bool {
        self.delzant
    }

    pub fn area(&self) -> f64 {
        shoelace_area(&self.vertices)
    }

    /// Average of the vertices; interior for a convex polygon.
    pub fn vertex_center(&self) -> Point {
        let n = self.vertices.len() as f64;
        [
            self.vertices.iter().map(|v| v[0]).sum::<f64>() / n,
            self.vertices.iter().map(|v| v[1]).sum::<f64>() / n,
        ]
    }

    /// Smallest `l_i(x)` over the facets.
    pub fn min_facet_value(&self, x: Point) -> f64 {
        self.facets.iter().map(|f| f.eval(x)).fold(f64::INFINITY, f64::min)
    }

    /// Smallest Euclidean distance from `x` to a facet line.
    pub fn boundary_distance(&self, x: Point) -> f64 {
        self.facets
            .iter()
            .map(|f| f.eval(x) / f.normal_norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: Point) -> bool {
        self.min_facet_value(x) >= 0.0
    }

    /// Same facet normals, offsets multiplied by `k > 0`: the image of the
    /// polygon under `x ↦ k·x`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::from_facets(
            self.facets
                .iter()
                .map(|f| Facet::new(f.normal, f.offset * k))
                .collect(),
        )
    }

    fn fan(&self) -> impl Iterator<Item = [Point; 3]> + '_ {
        let c = self.vertex_center();
        self.edges.iter().map(move |e| [c, e.start, e.end])
    }

    /// `∫_P x1^i x2^j dx`, exact up to rounding.
    pub fn integrate_monomial(&self, i: u32, j: u32) -> f64 {
        self.fan().map(|t| triangle_monomial(&t, i, j)).sum()
    }

    pub fn integrate_polynomial(&self, p: &BivariatePolynomial) -> f64 {
        p.terms
            .iter()
            .map(|&(i, j, c)| c * self.integrate_monomial(i, j))
            .sum()
    }

    /// `∫_∂P f dσ`, where on the facet of `l = ⟨ν, x⟩ + c` the measure `dσ`
    /// is arclength divided by `|ν|` (so that `dl ∧ dσ = ±dx`). Exact for
    /// affine `f`.
    pub fn boundary_measure_integral(&self, f: &AffineFunction) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let norm = self.facets[e.facet].normal_norm();
                e.length() / norm * 0.5 * (f.eval(e.start) + f.eval(e.end))
            })
            .sum()
    }

    /// Adaptive quadrature of a general integrand; the absolute error
    /// estimate is at most `tol`.
    pub fn integrate_function(&self, f: impl Fn(Point) -> f64, tol: f64) -> Result<f64> {
        let rule = gauss_legendre(TRIANGLE_RULE_ORDER);
        let area = self.area();
        let mut value = 0.0;
        let mut estimate = 0.0;
        let mut converged = true;
        for tri in self.fan() {
            let share = tol * triangle_area(&tri) / area;
            let (v, e, ok) = adaptive_triangle(&f, &rule, tri, share, 0);
            value += v;
            estimate += e;
            converged &= ok;
        }
        if converged && value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonConvergence { value, estimate })
        }
    }
}

impl fmt::Display for DelzantPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| format!("({}, {})", v[0], v[1]))
            .collect();
        write!(f, "polygon[{}]", verts.join(", "))
    }
}

/// Closed under `x ↦ λx` only if no nonzero direction has `⟨ν_i, d⟩ ≥ 0`
/// for every facet: the normals' angular gaps must all be below π.
fn normals_surround_origin(facets: &[Facet]) -> bool {
    let mut angles: Vec<f64> = facets
        .iter()
        .map(|f| (f.normal[1] as f64).atan2(f.normal[0] as f64))
        .collect();
    angles.sort_by(f64::total_cmp);
    let wrap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    let max_gap = angles
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(wrap, f64::max);
    max_gap < PI - 1e-12
}

fn intersect(f: &Facet, g: &Facet) -> Option<Point> {
    let [a, b] = f.normal_f64();
    let [c, d] = g.normal_f64();
    let det = a * d - b * c;
    if det == 0.0 {
        return None;
    }
    // a x + b y = -f.c, c x + d y = -g.c
    let x = (-f.offset * d + b * g.offset) / det;
    let y = (-a * g.offset + c * f.offset) / det;
    Some([x, y])
}

fn shoelace_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|k| {
            let (p, q) = (v[k], v[(k + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

fn triangle_area(t: &[Point; 3]) -> f64 {
    0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]))
        .abs()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Exact `∫_T x^i y^j` via expansion in barycentric coordinates.
fn triangle_monomial(t: &[Point; 3], i: u32, j: u32) -> f64 {
    // Coefficients of a polynomial in (λ0, λ1, λ2), keyed by exponents.
    let mut poly: BTreeMap<[u32; 3], f64> = BTreeMap::from([([0, 0, 0], 1.0)]);
    let mut multiply = |coord: usize| {
        let mut next = BTreeMap::new();
        for (exp, c) in &poly {
            for (k, vertex) in t.iter().enumerate() {
                let mut e = *exp;
                e[k] += 1;
                *next.entry(e).or_insert(0.0) += c * vertex[coord];
            }
        }
        poly = next;
    };
    for _ in 0..i {
        multiply(0);
    }
    for _ in 0..j {
        multiply(1);
    }
    let twice_area = 2.0 * triangle_area(t);
    poly.iter()
        .map(|(e, c)| {
            c * factorial(e[0]) * factorial(e[1]) * factorial(e[2]) / factorial(e[0] + e[1] + e[2] + 2)
        })
        .sum::<f64>()
        * twice_area
}

/// Collapsed (Duffy) tensor Gauss rule on a triangle.
fn triangle_rule(f: &impl Fn(Point) -> f64, rule: &QuadratureRule, t: &[Point; 3]) -> f64 {
    let [p0, p1, p2] = *t;
    let e1 = [p1[0] - p0[0], p1[1] - p0[1]];
    let e2 = [p2[0] - p0[0], p2[1] - p0[1]];
    let twice_area = 2.0 * triangle_area(t);
    let mut sum = 0.0;
    for (&xu, &wu) in rule.nodes.iter().zip(&rule.weights) {
        let u = 0.5 * (xu + 1.0);
        let mut inner = 0.0;
        for (&xv, &wv) in rule.nodes.iter().zip(&rule.weights) {
            let v = 0.5 * (xv + 1.0) * (1.0 - u);
            inner += wv * f([p0[0] + u * e1[0] + v * e2[0], p0[1] + u * e1[1] + v * e2[1]]);
        }
        sum += wu * 0.5 * (1.0 - u) * inner * 0.5;
    }
    sum * twice_area
}

fn subdivide(t: &[Point; 3]) -> [[Point; 3]; 4] {
    let mid = |a: Point, b: Point| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let [a, b, c] = *t;
    let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
    [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
}

fn adaptive_triangle(
    f: &impl Fn(Point) -> f64,
    rule: &QuadratureRule,
    t: [Point; 3],
    tol: f64,
    depth: u32,
) -> (f64, f64, bool) {
    let coarse = triangle_rule(f, rule, &t);
    let children = subdivide(&t);
    let fine: f64 = children.iter().map(|c| triangle_rule(f, rule, c)).sum();
    let err = (fine - coarse).abs();
    if err <= tol.max(f64::EPSILON * fine.abs()) {
        return (fine, err, true);
    }
    if depth >= MAX_TRIANGLE_DEPTH {
        return (fine, err, false);
    }
    children.iter().fold((0.0, 0.0, true), |(v, e, ok), c| {
        let (cv, ce, cok) = adaptive_triangle(f, rule, *c, tol / 4.0, depth + 1);
        (v + cv, e + ce, ok && cok)
    })
}

/// Parse facets from text, one per line as `nu1 nu2 offset`. Blank lines
/// and `#` comments are skipped.
pub fn parse_facets(text: &str) -> Result<Vec<Facet>> {
    let mut facets = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected 3 fields, found {}", fields.len())));
        }
        let n1 = fields[0]
            .parse::<i64>()
            .map_err(|e| parse_err(format!("normal component {:?}: {e}", fields[0])))?;
        let n2 = fields[1]
            .parse::<i64>()
            .map_err(|e| parse_err(format!("normal component {:?}: {e}", fields[1])))?;
        let c = fields[2]
            .parse::<f64>()
            .map_err(|e| parse_err(format!("offset {:?}: {e}", fields[2])))?;
        facets.push(Facet::new([n1, n2], c));
    }
    Ok(facets)
}

/// `[0, 1]²`.
pub fn unit_square() -> DelzantPolygon {
    DelzantPolygon::from_facets(vec![
        Facet::new([1, 0], 0.0),
        Facet::new([0, 1], 0.0),
        Facet::new([-1, 0], 1.0),
        Facet::new([0, -1], 1.0),
    ])
    .expect("unit square is a valid polygon")
}

/// Moment trapezium of CP²#CP̄²: `x1, x2, 1 − x1 − x2, x1 + x2 − a ≥ 0`.
pub fn page_trapezium(a: f64) -> Result<DelzantPolygon> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::DomainError(format!("trapezium needs 0 < a < 1, got {a}")));
    }
    DelzantPolygon::from_facets(vec![
        Facet::new([1, 0], 0.0),
        Facet::new([0, 1], 0.0),
        Facet::new([-1, -1], 1.0),
        Facet::new([1, 1], -a),
    ])
}

/// Moment pentagon of CP²#2CP̄² with vertices (0,0), (a,0), (a,1), (1,a),
/// (0,a); the slanted facet is `a + 1 − x1 − x2 ≥ 0`.
pub fn clw_pentagon(a: f64) -> Result<DelzantPolygon> {
    if !(a > 1.0) {
        return Err(Error::DegeneratePolytope(format!("pentagon needs a > 1, got {a}")));
    }
    DelzantPolygon::from_facets(vec![
        Facet::new([1, 0], 0.0),
        Facet::new([0, 1], 0.0),
        Facet::new([-1, 0], a),
        Facet::new([0, -1], a),
        Facet::new([-1, -1], a + 1.0),
    ])
}
