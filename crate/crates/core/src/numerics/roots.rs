use super::{Interval, Polynomial};
use crate::error::{Error, Result};

/// Bisection on a bracketing interval. Stops once the bracket is no wider
/// than `tol` and returns its midpoint; an exact zero is returned as soon as
/// it is hit.
pub fn bisect(f: impl Fn(f64) -> f64, bracket: Interval, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (bracket.lo(), bracket.hi());
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    let tol = tol.max(f64::EPSILON * lo.abs().max(hi.abs()));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of `p` inside `bracket` to width `tol`, by bisection.
pub fn find_root(p: &Polynomial, bracket: Interval, tol: f64) -> Result<f64> {
    bisect(|x| p.eval(x), bracket, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quartic() -> Polynomial {
        Polynomial::from_integers(&[1, 0, -6, -16, 9])
    }

    #[test]
    fn critical_quartic_root() {
        let r = find_root(&quartic(), Interval::new(0.0, 0.5).unwrap(), 1e-10).unwrap();
        assert!((r - 0.31408).abs() < 5e-6, "{r}");
        assert!(quartic().eval(r).abs() < 1e-9);
    }

    #[test]
    fn exact_root_of_x_squared_minus_one() {
        let p = Polynomial::from_integers(&[-1, 0, 1]);
        let r = find_root(&p, Interval::new(0.0, 2.0).unwrap(), 1e-12).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn same_sign_bracket_is_rejected() {
        // p(0.4) and p(0.5) are both negative.
        let p = quartic();
        assert!(p.eval(0.4) < 0.0 && p.eval(0.5) < 0.0);
        let err = find_root(&p, Interval::new(0.4, 0.5).unwrap(), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    proptest! {
        #[test]
        fn returned_point_brackets_a_sign_change(
            root in -3.0f64..3.0,
            slope in prop_oneof![0.5f64..4.0, -4.0f64..-0.5],
        ) {
            // Linear polynomial with an exactly representable coefficient set.
            let p = Polynomial::from_f64s(&[-slope * root, slope]);
            let tol = 1e-9;
            let x = find_root(&p, Interval::new(-5.0, 5.0).unwrap(), tol).unwrap();
            prop_assert!(p.eval(x - tol) * p.eval(x + tol) <= 0.0);
        }
    }
}
