//! Exact Gaussian rationals and the small algebraic traits shared by the
//! exact and floating-point code paths.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Commutative ring with unit. Implemented by exact scalars, complex floats
/// and [`crate::laurent::LaurentElement`].
pub trait Ring:
    Clone + PartialEq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
}

/// A ring in which every nonzero element is invertible.
pub trait Field: Ring + Div<Output = Self> {
    /// Integer power; negative exponents invert. Panics on `0^e`, `e < 0`.
    fn powi(&self, e: i32) -> Self {
        let mut base = if e < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base.clone();
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

impl Field for Complex64 {
    fn powi(&self, e: i32) -> Self {
        Complex64::powi(self, e)
    }
}

/// `re + i·im` with arbitrary precision rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigRational::from_integer(v.into()), BigRational::zero())
    }

    /// `num/den + i·0`. Panics if `den == 0`.
    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::new(BigRational::new(num.into(), den.into()), BigRational::zero())
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::new(BigRational::new(re.0.into(), re.1.into()), BigRational::new(im.0.into(), im.1.into()))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(BigRational::from_integer(v), BigRational::zero())
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        let d = self.norm_sqr();
        if d.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &d, -&self.im / &d))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// Canonical `"num/den"` text for one rational component.
    pub fn format_rational(r: &BigRational) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    /// Accepts `"num/den"` or a bare integer.
    pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
        let bad = || ParseError::Rational(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(n, d))
            }
            None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "({}-{}i)", self.re, -self.im.clone())
        } else {
            write!(f, "({}+{}i)", self.re, self.im)
        }
    }
}

impl From<i64> for GaussianRational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(v: BigRational) -> Self {
        Self::new(v, BigRational::zero())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$m(rhs)
            }
        }
    };
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::new(&self.re * &rhs.re, BigRational::zero());
        }
        GaussianRational::new(&self.re * &rhs.re - &self.im * &rhs.im, &self.re * &rhs.im + &self.im * &rhs.re)
    }
}

impl Div<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        let inv = rhs.inv().expect("division by zero Gaussian rational");
        self * &inv
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Ring for GaussianRational {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::from_int(1)
    }
    fn from_i64(v: i64) -> Self {
        Self::from_int(v)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Field for GaussianRational {}

/// Binomial coefficient `u choose j` for any integer `u`, computed as
/// `u(u-1)...(u-j+1)/j!`. Always an integer.
pub fn generalized_binomial(u: i64, j: u32) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..j as i64 {
        num *= BigInt::from(u - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Same as [`generalized_binomial`] in double precision.
pub fn generalized_binomial_f64(u: i64, j: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..j as i64 {
        acc *= (u - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_operations_are_exact() {
        let a = GaussianRational::from_parts((1, 2), (1, 3));
        let b = GaussianRational::from_parts((-2, 5), (3, 1));
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(&(&a - &b) + &b, a);
        assert!(GaussianRational::zero().inv().is_none());
        assert_eq!(&GaussianRational::i() * &GaussianRational::i(), GaussianRational::from_int(-1));
    }

    #[test]
    fn powi_handles_negative_exponents() {
        let two = GaussianRational::from_int(2);
        assert_eq!(two.powi(-3), GaussianRational::from_frac(1, 8));
        assert_eq!(two.powi(0), GaussianRational::one());
        let z = Complex64::new(0.0, 2.0);
        assert!((Field::powi(&z, -2) - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn generalized_binomial_negative_upper() {
        // (1+x)^{-2} = 1 - 2x + 3x^2 - 4x^3
        let c: Vec<i64> = (0..4).map(|j| generalized_binomial(-2, j).to_i64().unwrap()).collect();
        assert_eq!(c, vec![1, -2, 3, -4]);
        assert_eq!(generalized_binomial(5, 2), BigInt::from(10));
        assert_eq!(generalized_binomial(3, 5), BigInt::from(0));
        assert!((generalized_binomial_f64(-3, 4) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn rational_text_round_trip() {
        let r = GaussianRational::parse_rational("-6/4").unwrap();
        assert_eq!(GaussianRational::format_rational(&r), "-3/2");
        assert_eq!(GaussianRational::format_rational(&GaussianRational::parse_rational("7").unwrap()), "7/1");
        assert!(GaussianRational::parse_rational("1/0").is_err());
        assert!(GaussianRational::parse_rational("x").is_err());
    }
}
