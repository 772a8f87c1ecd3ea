use super::Interval;

pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub max: f64,
}

/// Supremum of `f` over the closed `domain` with the default sample count.
pub fn maximize_1d(f: impl Fn(f64) -> f64, domain: Interval, tol: f64) -> Maximum {
    maximize_1d_with(f, domain, tol, DEFAULT_SAMPLES)
}

/// Dense scan of `samples + 1` equispaced points (endpoints included),
/// then golden-section refinement on the two cells around the best sample.
/// Ties go to the smallest abscissa.
pub fn maximize_1d_with(
    f: impl Fn(f64) -> f64,
    domain: Interval,
    tol: f64,
    samples: usize,
) -> Maximum {
    let samples = samples.max(2);
    let (lo, hi) = (domain.lo(), domain.hi());
    let step = domain.width() / samples as f64;
    let node = |i: usize| if i == samples { hi } else { lo + step * i as f64 };

    let mut best_i = 0;
    let mut best = f(lo);
    for i in 1..=samples {
        let v = f(node(i));
        if v > best {
            best = v;
            best_i = i;
        }
    }

    let a = node(best_i.saturating_sub(1));
    let b = node((best_i + 1).min(samples));
    let refined = golden_section(&f, a, b, tol);
    if refined.max > best {
        refined
    } else {
        Maximum {
            argmax: node(best_i),
            max: best,
        }
    }
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Maximum {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let tol = tol.max(f64::EPSILON * a.abs().max(b.abs()));
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        Maximum { argmax: c, max: fc }
    } else {
        Maximum { argmax: d, max: fd }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vertex() {
        let m = maximize_1d(|t| -(t - 0.5) * (t - 0.5), Interval::new(0.0, 1.0).unwrap(), 1e-10);
        assert!((m.argmax - 0.5).abs() < 1e-8);
        assert!(m.max.abs() < 1e-15);
    }

    #[test]
    fn monotone_function_peaks_at_right_endpoint() {
        let a = 0.31408;
        let m = maximize_1d(|t| t, Interval::new(a, 1.0).unwrap(), 1e-10);
        assert_eq!(m, Maximum { argmax: 1.0, max: 1.0 });
    }

    #[test]
    fn left_endpoint_is_scanned() {
        let m = maximize_1d(|t| -t, Interval::new(-2.0, 3.0).unwrap(), 1e-10);
        assert_eq!(m, Maximum { argmax: -2.0, max: 2.0 });
    }

    #[test]
    fn ties_resolve_to_smallest_argmax() {
        let m = maximize_1d_with(|_| 1.0, Interval::new(0.0, 1.0).unwrap(), 1e-10, 100);
        assert_eq!(m.argmax, 0.0);
        // Two equal peaks at 0.25 and 0.75.
        let f = |t: f64| -((t - 0.25) * (t - 0.75)).powi(2);
        let m = maximize_1d_with(f, Interval::new(0.0, 1.0).unwrap(), 1e-12, 100);
        assert!((m.argmax - 0.25).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn doubling_samples_is_stable() {
        let f = |t: f64| (7.0 * t).sin() * (-t).exp();
        let d = Interval::new(0.0, 3.0).unwrap();
        let m1 = maximize_1d_with(f, d, 1e-12, 10_000);
        let m2 = maximize_1d_with(f, d, 1e-12, 20_000);
        assert!((m1.max - m2.max).abs() < 1e-12);
    }
}
