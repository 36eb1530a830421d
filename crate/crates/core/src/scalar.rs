//! Exact scalars: Gaussian rationals (the coefficient field) and symbolic
//! principal-root gauges.
//!
//! `GaussianRational` is a complex number with rational real and imaginary
//! parts, stored in lowest terms. It is the coefficient domain of every
//! exact object in the crate. `RootScalar` is a symbolic descriptor of the
//! principal m-th root of the *inverse* of a nonzero Gaussian rational; it
//! is never eagerly evaluated, so the exact verifier can cancel gauges
//! algebraically through the defining relation `beta^m * base = 1`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub mod float;

pub use float::{ComplexF, Precision};

/// Exact element of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// `a/b + (c/d)i` from integer parts. Panics if a denominator is zero.
    pub fn from_parts(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(a), BigInt::from(b)),
            im: BigRational::new(BigInt::from(c), BigInt::from(d)),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |z|^2 = re^2 + im^2, an exact nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn add(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    pub fn neg(&self) -> Self {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(GaussianRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Render in the input grammar: `5`, `-1/2`, `i`, `2/3*i`, `(1+2*i)`.
    fn write_text(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn write_rat(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
            if r.is_integer() {
                write!(f, "{}", r.numer())
            } else {
                write!(f, "{}/{}", r.numer(), r.denom())
            }
        }
        fn write_imag(f: &mut fmt::Formatter<'_>, r: &BigRational) -> fmt::Result {
            if r.is_one() {
                write!(f, "i")
            } else if (-r).is_one() {
                write!(f, "-i")
            } else {
                write_rat(f, r)?;
                write!(f, "*i")
            }
        }
        if self.im.is_zero() {
            write_rat(f, &self.re)
        } else if self.re.is_zero() {
            write_imag(f, &self.im)
        } else {
            write!(f, "(")?;
            write_rat(f, &self.re)?;
            if self.im.is_positive() {
                write!(f, "+")?;
            }
            write_imag(f, &self.im)?;
            write!(f, ")")
        }
    }
}

impl GaussianRational {
    /// LaTeX rendering: `\frac{1}{2}`, `-\frac{2}{3} i`, `\left(1+2 i\right)`.
    pub fn latex(&self) -> String {
        fn rat_tex(r: &BigRational) -> String {
            if r.is_integer() {
                format!("{}", r.numer())
            } else if r.is_negative() {
                let p = -r;
                format!("-\\frac{{{}}}{{{}}}", p.numer(), p.denom())
            } else {
                format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
            }
        }
        fn imag_tex(r: &BigRational) -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r).is_one() {
                "-i".to_string()
            } else {
                format!("{} i", rat_tex(r))
            }
        }
        if self.im.is_zero() {
            rat_tex(&self.re)
        } else if self.re.is_zero() {
            imag_tex(&self.im)
        } else {
            let sign = if self.im.is_positive() { "+" } else { "" };
            format!(
                "\\left({}{}{}\\right)",
                rat_tex(&self.re),
                sign,
                imag_tex(&self.im)
            )
        }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_text(f)
    }
}

impl serde::Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        crate::parser::parse_scalar(&text).map_err(serde::de::Error::custom)
    }
}

/// Symbolic principal root: the unique `beta` with `beta^m * base = 1`,
/// `beta = exp(-(1/m) Log(base))` on the principal branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootScalar {
    base: GaussianRational,
    degree: u32,
}

impl RootScalar {
    pub fn new(base: GaussianRational, degree: u32) -> Result<Self> {
        if base.is_zero() {
            return Err(Error::ZeroBase);
        }
        if degree == 0 {
            return Err(Error::PreconditionViolation(
                "root degree must be positive".into(),
            ));
        }
        Ok(RootScalar { base, degree })
    }

    /// The exact scalar 1, as the principal first root of 1.
    pub fn one() -> Self {
        RootScalar {
            base: GaussianRational::one(),
            degree: 1,
        }
    }

    pub fn base(&self) -> &GaussianRational {
        &self.base
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// True when the descriptor denotes exactly 1 (principal root of base 1).
    pub fn is_one(&self) -> bool {
        self.base.is_one()
    }
}

impl RootScalar {
    pub fn latex(&self) -> String {
        if self.is_one() {
            "1".to_string()
        } else {
            format!("{{{}}}^{{-1/{}}}", self.base.latex(), self.degree)
        }
    }
}

impl fmt::Display for RootScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            write!(f, "1")
        } else {
            write!(f, "({})^(-1/{})", self.base, self.degree)
        }
    }
}

impl serde::Serialize for RootScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RootScalar", 2)?;
        st.serialize_field("base", &self.base)?;
        st.serialize_field("m", &self.degree)?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for RootScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            base: GaussianRational,
            m: u32,
        }
        let raw = Raw::deserialize(d)?;
        RootScalar::new(raw.base, raw.m).map_err(serde::de::Error::custom)
    }
}
