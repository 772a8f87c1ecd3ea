//! Radial reduction of the stability inequality on a Ricci-flat cone of
//! dimension `n`: the quadratic form
//!
//! ```text
//! Q(f) = ∫ (f′² − λ f²/r²) r^{n−1} dr
//! ```
//!
//! With `s = ln r` and `f = r^{−m} g(s)`, `m = (n−2)/2`, it becomes
//! `∫ g′² + (m² − λ) g² ds`, so negative values exist iff `λ > m²`.

use std::f64::consts::PI;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, rational, tridiagonal_min_eigenvalue, QuadratureRule};

/// Smallest excess `λ − (n−2)²/4` for which a witness is attempted.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// Discrete eigenvalues above `−EIGEN_TOL · scale` count as non-negative.
pub const EIGEN_TOL: f64 = 1e-10;

/// Ramp cells per witness ramp.
const RAMP_CELLS: usize = 2000;

/// Zero nodes padded at each end of a witness.
const PAD_NODES: usize = 2;

/// Dimension above which cones pass the radial test for `λ = 2(n − 2)`.
pub const PRODUCT_DIMENSION_BOUND: u32 = 10;

pub fn hardy_constant(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::DomainError(format!("cone dimension must be at least 3, got {n}")));
    }
    let m = f64::from(n - 2);
    Ok(4.0 / (m * m))
}

/// `(n − 2)²/4`, the reciprocal of the Hardy constant.
pub fn hardy_threshold(n: u32) -> f64 {
    let m = f64::from(n) - 2.0;
    m * m / 4.0
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeSpec {
    n: u32,
    lambda: f64,
}

impl ConeSpec {
    pub fn new(n: u32, lambda: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::DomainError(format!("cone dimension must be at least 3, got {n}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::DomainError(format!("λ must be finite and non-negative, got {lambda}")));
        }
        Ok(Self { n, lambda })
    }

    /// `λ = 2(n − 2)`, the coefficient for product and Kähler-Einstein links.
    pub fn einstein_link(n: u32) -> Result<Self> {
        Self::new(n, 2.0 * (f64::from(n) - 2.0))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `m = (n − 2)/2`.
    pub fn decay(&self) -> f64 {
        (f64::from(self.n) - 2.0) / 2.0
    }

    /// `λ − (n − 2)²/4`.
    pub fn excess(&self) -> f64 {
        self.lambda - hardy_threshold(self.n)
    }
}

/// `f(r) = r^{−decay} · v(ln r)` with `v` piecewise linear in `ln r`.
///
/// Storing the log-radius and factoring out the power keeps witnesses that
/// span hundreds of e-folds inside f64 range.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    log_r: Vec<f64>,
    values: Vec<f64>,
    decay: f64,
}

impl RadialProfile {
    pub fn new(log_r: Vec<f64>, values: Vec<f64>, decay: f64) -> Result<Self> {
        if log_r.len() != values.len() || log_r.len() < 3 {
            return Err(Error::DomainError("profile needs matching grids of at least 3 nodes".into()));
        }
        if log_r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::DomainError("log-radius grid must be strictly increasing".into()));
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(Error::DomainError("profile must vanish at both grid ends".into()));
        }
        Ok(Self { log_r, values, decay })
    }

    /// Samples `f` on a logarithmic grid over `[r_min, r_max]` and zeroes
    /// the outer two nodes on each side.
    pub fn sample(grid: LogGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let log_r = grid.nodes()?;
        let k = log_r.len();
        let values = log_r
            .iter()
            .enumerate()
            .map(|(i, &s)| if i < PAD_NODES || i + PAD_NODES >= k { 0.0 } else { f(s.exp()) })
            .collect();
        Self::new(log_r, values, 0.0)
    }

    pub fn log_r(&self) -> &[f64] {
        &self.log_r
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn len(&self) -> usize {
        self.log_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_r.is_empty()
    }

    /// `(r, f(r))` pairs; may under- or overflow for very long witnesses.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.log_r
            .iter()
            .zip(&self.values)
            .map(move |(&s, &v)| (s.exp(), (-self.decay * s).exp() * v))
    }

    /// Decades of radius covered by the grid.
    pub fn decades(&self) -> f64 {
        (self.log_r[self.len() - 1] - self.log_r[0]) / std::f64::consts::LN_10
    }

    /// The profile `r ↦ f(c r)`.
    pub fn rescaled(&self, c: f64) -> Self {
        let shift = c.ln();
        let factor = c.powf(-self.decay);
        Self {
            log_r: self.log_r.iter().map(|s| s - shift).collect(),
            values: self.values.iter().map(|v| v * factor).collect(),
            decay: self.decay,
        }
    }

    /// Same profile with every cell split in two (exact, since `v` is
    /// linear on each cell).
    pub fn bisected(&self) -> Self {
        let mut log_r = Vec::with_capacity(2 * self.len() - 1);
        let mut values = Vec::with_capacity(2 * self.len() - 1);
        for i in 0..self.len() - 1 {
            log_r.push(self.log_r[i]);
            values.push(self.values[i]);
            log_r.push(0.5 * (self.log_r[i] + self.log_r[i + 1]));
            values.push(0.5 * (self.values[i] + self.values[i + 1]));
        }
        log_r.push(self.log_r[self.len() - 1]);
        values.push(self.values[self.len() - 1]);
        Self { log_r, values, decay: self.decay }
    }
}

/// Logarithmically spaced radii.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        Self { r_min: 1e-3, r_max: 1e3, nodes: 4096 }
    }
}

impl LogGrid {
    pub fn nodes(&self) -> Result<Vec<f64>> {
        if !(self.r_min > 0.0 && self.r_max > self.r_min) || self.nodes < 2 * PAD_NODES + 1 {
            return Err(Error::InvalidInterval { lo: self.r_min, hi: self.r_max });
        }
        let (lo, hi) = (self.r_min.ln(), self.r_max.ln());
        let k = self.nodes - 1;
        Ok((0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect())
    }
}

fn cell_rule() -> QuadratureRule {
    gauss_legendre(4)
}

/// `Q(f)` for the piecewise profile, integrated cell by cell in `s = ln r`.
///
/// In `s` the integrand is `e^{(n−2−2d)s} ((v′ − d v)² − λ v²)`; for
/// `d = (n−2)/2` the weight is 1 and four-point Gauss is exact.
pub fn radial_form(spec: ConeSpec, f: &RadialProfile) -> f64 {
    let d = f.decay;
    let k = f64::from(spec.n) - 2.0 - 2.0 * d;
    let rule = cell_rule();
    let mut total = 0.0;
    for i in 0..f.len() - 1 {
        let (s0, s1) = (f.log_r[i], f.log_r[i + 1]);
        let (v0, v1) = (f.values[i], f.values[i + 1]);
        if v0 == 0.0 && v1 == 0.0 {
            continue;
        }
        let slope = (v1 - v0) / (s1 - s0);
        let integrand = |s: f64| {
            let v = v0 + slope * (s - s0);
            let w = if k == 0.0 { 1.0 } else { (k * s).exp() };
            w * ((slope - d * v).powi(2) - spec.lambda * v * v)
        };
        total += rule.apply(&integrand, s0, s1);
    }
    total
}

/// `∫ g′² + (m² − λ) g² ds` for `g = r^m f`, which must be piecewise linear
/// in `ln r`, i.e. the profile must carry decay `m`.
pub fn reduced_form(spec: ConeSpec, f: &RadialProfile) -> Result<f64> {
    let m = spec.decay();
    if (f.decay - m).abs() > 1e-15 {
        return Err(Error::DomainError(format!(
            "reduced form needs decay {m}, profile has {}",
            f.decay
        )));
    }
    let c = m * m - spec.lambda;
    Ok(f
        .log_r
        .windows(2)
        .zip(f.values.windows(2))
        .map(|(s, g)| {
            let h = s[1] - s[0];
            (g[1] - g[0]).powi(2) / h + c * h * (g[0] * g[0] + g[0] * g[1] + g[1] * g[1]) / 3.0
        })
        .sum())
}

/// Smallest eigenvalue of the reduced form restricted to piecewise-linear
/// `g` on `log_r` vanishing at the ends, i.e. of stiffness plus
/// `(m² − λ)` times the consistent mass matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscreteCertificate {
    pub min_eigenvalue: f64,
    /// Largest diagonal entry, the natural scale of the matrix.
    pub scale: f64,
    pub nonnegative: bool,
}

pub fn discrete_min_eigenvalue(spec: ConeSpec, log_r: &[f64]) -> Result<DiscreteCertificate> {
    if log_r.len() < 3 || log_r.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DomainError("need a strictly increasing grid of at least 3 nodes".into()));
    }
    let c = spec.decay().powi(2) - spec.lambda;
    let h: Vec<f64> = log_r.windows(2).map(|w| w[1] - w[0]).collect();
    // Interior nodes 1..len−1.
    let diag: Vec<f64> = (1..log_r.len() - 1)
        .map(|i| 1.0 / h[i - 1] + 1.0 / h[i] + c * (h[i - 1] + h[i]) / 3.0)
        .collect();
    let off: Vec<f64> = (1..log_r.len() - 2)
        .map(|i| -1.0 / h[i] + c * h[i] / 6.0)
        .collect();
    let min_eigenvalue = tridiagonal_min_eigenvalue(&diag, &off);
    let scale = diag.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
    Ok(DiscreteCertificate {
        min_eigenvalue,
        scale,
        nonnegative: min_eigenvalue >= -EIGEN_TOL * scale,
    })
}

/// Plateau length of a witness with excess `delta`: twice the length at
/// which a cosine-ramped plateau breaks even.
pub fn witness_plateau(delta: f64) -> f64 {
    (2.0 * PI / (7.0 * delta).sqrt()).max(3.0)
}

fn ramp(x: f64) -> f64 {
    0.5 * (1.0 - (PI * x).cos())
}

/// A profile with `Q < 0` when `λ > (n−2)²/4 + margin`.
///
/// `g` rises over a cosine ramp of length `L`, stays at 1 for `L`, and
/// falls back; with both ramps `Q = π²/(4L) − 7δL/4`, negative once
/// `L > π/√(7δ)`.
pub fn instability_witness_with_margin(spec: ConeSpec, margin: f64) -> Option<RadialProfile> {
    let delta = spec.excess();
    if !(delta > margin) {
        return None;
    }
    let l = witness_plateau(delta);
    let h = l / RAMP_CELLS as f64;
    let cells = 3 * RAMP_CELLS;
    let start = -1.5 * l;
    let mut log_r = Vec::with_capacity(cells + 1 + 2 * PAD_NODES);
    let mut values = Vec::with_capacity(cells + 1 + 2 * PAD_NODES);
    for p in (1..=PAD_NODES).rev() {
        log_r.push(start - p as f64 * h);
        values.push(0.0);
    }
    for i in 0..=cells {
        let x = i as f64 / RAMP_CELLS as f64;
        let g = if x <= 1.0 {
            ramp(x)
        } else if x <= 2.0 {
            1.0
        } else {
            ramp(3.0 - x)
        };
        log_r.push(start + i as f64 * h);
        values.push(g);
    }
    let end = start + cells as f64 * h;
    for p in 1..=PAD_NODES {
        log_r.push(end + p as f64 * h);
        values.push(0.0);
    }
    // The endpoints of the ramps are zero up to rounding of cos.
    values[PAD_NODES] = 0.0;
    values[PAD_NODES + cells] = 0.0;
    let profile = RadialProfile::new(log_r, values, spec.decay()).ok()?;
    (radial_form(spec, &profile) < 0.0).then_some(profile)
}

pub fn instability_witness(spec: ConeSpec) -> Option<RadialProfile> {
    instability_witness_with_margin(spec, DEFAULT_MARGIN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialVerdict {
    Unstable,
    Undecided,
}

#[derive(Clone, Debug)]
pub struct RadialTest {
    pub spec: ConeSpec,
    pub verdict: RadialVerdict,
    pub witness: Option<RadialProfile>,
    /// `Q` of the witness, when one exists.
    pub form_value: Option<f64>,
}

impl RadialTest {
    /// Looks for a witness at `spec`.
    pub fn from_spec(spec: ConeSpec) -> Self {
        Self::run(spec, true)
    }

    fn run(spec: ConeSpec, hypothesis: bool) -> Self {
        let witness = if hypothesis { instability_witness(spec) } else { None };
        let form_value = witness.as_ref().map(|w| radial_form(spec, w));
        Self {
            spec,
            verdict: if witness.is_some() { RadialVerdict::Unstable } else { RadialVerdict::Undecided },
            witness,
            form_value,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProductConeTest {
    pub n1: u32,
    pub n2: u32,
    /// `1/n1 + 1/n2`.
    pub prefactor: BigRational,
    /// `2(n2/n1 + 2 + n1/n2) − 2(1/n1 + 1/n2)` against `2(n − 2)(1/n1 + 1/n2)`.
    pub reduction_holds: bool,
    pub test: RadialTest,
}

/// Cone over a product of Einstein manifolds of dimensions `n1`, `n2`, so
/// that the cone has dimension `n1 + n2 + 1`.
pub fn product_cone_test(n1: u32, n2: u32) -> Result<ProductConeTest> {
    if n1 < 1 || n2 < 1 {
        return Err(Error::DomainError(format!("factor dimensions must be positive, got ({n1}, {n2})")));
    }
    let n = n1 + n2 + 1;
    let (a, b) = (i64::from(n1), i64::from(n2));
    let prefactor = rational(1, a) + rational(1, b);
    let curvature = rational(2, 1) * (rational(b, a) + rational(2, 1) + rational(a, b));
    let gradient = rational(2, 1) * &prefactor;
    let reduced = rational(2 * (i64::from(n) - 2), 1) * &prefactor;
    let reduction_holds = curvature - gradient == reduced;
    Ok(ProductConeTest {
        n1,
        n2,
        prefactor,
        reduction_holds,
        test: RadialTest::run(ConeSpec::einstein_link(n)?, true),
    })
}

/// Kähler-Einstein link with `h^{1,1} = h11`. When `h11 > 1` an eigen-tensor
/// with eigenvalue `2(n − 2)` is assumed to exist.
pub fn ke_cone_test(n: u32, h11: u32) -> Result<RadialTest> {
    if h11 < 1 {
        return Err(Error::DomainError(format!("h11 must be at least 1, got {h11}")));
    }
    Ok(RadialTest::run(ConeSpec::einstein_link(n)?, h11 > 1))
}

/// Gap left below the cone threshold by a normalized `sup Δs²`:
/// `∫(6 − Δs²)|h|² − (9/4)∫|h|² ≥ (15/4 − ratio)∫|h|²`.
pub fn gap_from_ratio(ratio: f64) -> f64 {
    crate::conformal::CONE_THRESHOLD - ratio
}

/// Four-dimensional links: a positive normalized gap in
/// `∫ −|∇h|² + 2Rm(h, h) − (9/4)|h|² > 0` gives a radial coefficient
/// `λ = 9/4 + gap` on the five-dimensional cone.
pub fn gap_lemma_test(gap: f64) -> Result<RadialTest> {
    if gap > 0.0 && gap.is_finite() {
        Ok(RadialTest::run(ConeSpec::new(5, hardy_threshold(5) + gap)?, true))
    } else {
        let spec = ConeSpec::new(5, hardy_threshold(5))?;
        Ok(RadialTest { spec, verdict: RadialVerdict::Undecided, witness: None, form_value: None })
    }
}
