//! Univariate polynomials and rational functions with exact rational
//! coefficients.
//!
//! Coefficients are stored as `BigRational` in ascending order (constant
//! term first) with trailing zeros removed. A parallel `f64` copy of the
//! coefficients is kept so that floating-point evaluation inside sampling
//! loops does not pay for big-integer conversions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational from an `f64`. Every finite double is a dyadic rational,
/// so this conversion is lossless.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[derive(Clone)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
    approx: Vec<f64>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        let approx = coeffs.iter().map(to_f64).collect();
        Self { coeffs, approx }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// Polynomial whose coefficients are the exact rational values of the
    /// given doubles.
    pub fn from_f64s(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().copied().map(exact).collect())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::from_integers(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Horner evaluation in exact arithmetic.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Horner evaluation in floating point.
    pub fn eval(&self, x: f64) -> f64 {
        self.approx.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(BigRational::one()), |acc, _| &acc * self)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter().map(|c| c.to_string())).finish()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let mag = c.abs();
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}x")?,
                _ => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Quotient of two exact polynomials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    numerator: Polynomial,
    denominator: Polynomial,
}

impl RationalFunction {
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::DomainError("zero denominator polynomial".into()));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Self {
            numerator: p,
            denominator: Polynomial::constant(BigRational::one()),
        }
    }

    pub fn zero() -> Self {
        Self::from_polynomial(Polynomial::zero())
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.numerator.eval(x) / self.denominator.eval(x)
    }

    /// `None` at a root of the denominator.
    pub fn eval_exact(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.denominator.eval_exact(x);
        if d.is_zero() {
            None
        } else {
            Some(self.numerator.eval_exact(x) / d)
        }
    }

    pub fn derivative(&self) -> Self {
        let (p, q) = (&self.numerator, &self.denominator);
        Self {
            numerator: &(&p.derivative() * q) - &(p * &q.derivative()),
            denominator: q * q,
        }
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction {
            numerator: &(&self.numerator * &rhs.denominator)
                + &(&rhs.numerator * &self.denominator),
            denominator: &self.denominator * &rhs.denominator,
        }
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction {
            numerator: &(&self.numerator * &rhs.denominator)
                - &(&rhs.numerator * &self.denominator),
            denominator: &self.denominator * &rhs.denominator,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quartic() -> Polynomial {
        Polynomial::from_integers(&[1, 0, -6, -16, 9])
    }

    #[test]
    fn trailing_zeros_are_dropped() {
        let p = Polynomial::from_integers(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Polynomial::from_integers(&[0, 0]).degree(), None);
        assert_eq!(Polynomial::from_integers(&[0, 0]), Polynomial::zero());
    }

    #[test]
    fn quartic_values() {
        let p = quartic();
        assert_eq!(p.eval_exact(&rational(0, 1)), rational(1, 1));
        assert_eq!(p.eval_exact(&rational(1, 1)), rational(-12, 1));
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(1.0), -12.0);
    }

    #[test]
    fn identity_polynomial() {
        assert_eq!(Polynomial::x().eval(0.31408), 0.31408);
    }

    #[test]
    fn derivative_of_quartic() {
        assert_eq!(
            quartic().derivative(),
            Polynomial::from_integers(&[0, -12, -48, 36])
        );
    }

    #[test]
    fn products_and_powers() {
        let p = Polynomial::from_integers(&[1, 1]);
        assert_eq!(p.pow(3), Polynomial::from_integers(&[1, 3, 3, 1]));
        assert_eq!(&p - &p, Polynomial::zero());
    }

    #[test]
    fn rational_function_rejects_zero_denominator() {
        assert!(RationalFunction::new(Polynomial::x(), Polynomial::zero()).is_err());
    }

    #[test]
    fn rational_function_pole_and_derivative() {
        // 1/x
        let r = RationalFunction::new(
            Polynomial::from_integers(&[1]),
            Polynomial::x(),
        )
        .unwrap();
        assert_eq!(r.eval_exact(&rational(0, 1)), None);
        assert_eq!(r.eval_exact(&rational(1, 4)), Some(rational(4, 1)));
        // d/dx 1/x = -1/x^2
        assert_eq!(r.derivative().eval_exact(&rational(1, 2)), Some(rational(-4, 1)));
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(quartic().to_string(), "1 - 6x^2 - 16x^3 + 9x^4");
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| rational(n, d))
    }

    proptest! {
        #[test]
        fn horner_matches_monomial_sum(
            coeffs in proptest::collection::vec(small_rational(), 0..8),
            x in small_rational(),
        ) {
            let p = Polynomial::new(coeffs.clone());
            let mut direct = BigRational::zero();
            let mut power = BigRational::one();
            for c in &coeffs {
                direct += c * &power;
                power *= &x;
            }
            prop_assert_eq!(p.eval_exact(&x), direct);
        }

        #[test]
        fn product_evaluates_to_product(
            a in proptest::collection::vec(small_rational(), 0..5),
            b in proptest::collection::vec(small_rational(), 0..5),
            x in small_rational(),
        ) {
            let (p, q) = (Polynomial::new(a), Polynomial::new(b));
            prop_assert_eq!((&p * &q).eval_exact(&x), p.eval_exact(&x) * q.eval_exact(&x));
        }
    }
}
