use std::f64::consts::PI;

use super::Interval;
use crate::error::{Error, Result};

const GL_ORDER: usize = 10;
const MAX_DEPTH: u32 = 40;
const MAX_SEGMENTS: usize = 100_000;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Apply the rule on `[a, b]`.
    pub fn apply(&self, f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        half * sum
    }
}

/// `n`-point Gauss-Legendre rule, nodes from Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> QuadratureRule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    QuadratureRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Adaptive composite Gauss-Legendre integral of `f` over `domain` with
/// absolute error estimate at most `tol`.
pub fn integrate_1d(f: impl Fn(f64) -> f64, domain: Interval, tol: f64) -> Result<f64> {
    integrate_1d_with_estimate(f, domain, tol).map(|(v, _)| v)
}

/// As [`integrate_1d`], also returning the accumulated error estimate.
pub fn integrate_1d_with_estimate(
    f: impl Fn(f64) -> f64,
    domain: Interval,
    tol: f64,
) -> Result<(f64, f64)> {
    let rule = gauss_legendre(GL_ORDER);
    let total = domain.width();
    let mut value = 0.0;
    let mut estimate = 0.0;
    let mut converged = true;
    let mut segments = 0usize;

    // Depth-first, left to right, so the summation order is deterministic.
    let mut stack = vec![(domain.lo(), domain.hi(), rule.apply(&f, domain.lo(), domain.hi()), 0u32)];
    while let Some((a, b, coarse, depth)) = stack.pop() {
        segments += 1;
        let m = 0.5 * (a + b);
        let left = rule.apply(&f, a, m);
        let right = rule.apply(&f, m, b);
        let fine = left + right;
        let err = (fine - coarse).abs();
        let local_tol = (tol * (b - a) / total).max(f64::EPSILON * fine.abs());
        if err <= local_tol || m <= a || m >= b {
            value += fine;
            estimate += err;
        } else if depth >= MAX_DEPTH || segments + stack.len() >= MAX_SEGMENTS {
            value += fine;
            estimate += err;
            converged = false;
        } else {
            stack.push((m, b, right, depth + 1));
            stack.push((a, m, left, depth + 1));
        }
    }

    if converged && value.is_finite() {
        Ok((value, estimate))
    } else {
        Err(Error::NonConvergence { value, estimate })
    }
}
