//! Arbitrary-precision complex evaluation carrier.
//!
//! `ComplexF` is a pair of binary floats at a fixed working precision
//! (53 or 256 bits), backed by `astro-float`. Each primitive operation is
//! correctly rounded at the working precision, so composite evaluations
//! stay within a couple of ulp per step.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, RootScalar};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Working precision of a numeric evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    P53,
    P256,
}

impl Precision {
    pub fn bits(self) -> usize {
        match self {
            Precision::P53 => 53,
            Precision::P256 => 256,
        }
    }

    pub fn from_bits(bits: usize) -> Result<Self> {
        match bits {
            53 => Ok(Precision::P53),
            256 => Ok(Precision::P256),
            other => Err(Error::InvalidInput(format!(
                "precision must be 53 or 256, got {other}"
            ))),
        }
    }
}

/// Zero constant; `from_i64(0, _)` does not normalize to a true zero.
fn bf_zero(p: usize) -> BigFloat {
    BigFloat::from_f64(0.0, p)
}

/// Drop the backend's inexact flag: each operation is correctly rounded and
/// treated as exact afterwards (ordinary floating-point semantics). With the
/// flag kept, sin/cos of inexact values near their zeros refuse to round and
/// return NaN.
fn ex(mut x: BigFloat) -> BigFloat {
    x.set_inexact(false);
    x
}

fn bf_from_bigint(n: &BigInt) -> BigFloat {
    let (sign, words) = n.to_u64_digits();
    if words.is_empty() {
        return bf_zero(64);
    }
    let bits = 64 * words.len();
    let s = if sign == num_bigint::Sign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    BigFloat::from_words(&words, s, bits as astro_float::Exponent)
}

fn bf_from_rational(r: &BigRational, p: usize) -> BigFloat {
    if r.is_zero() {
        return bf_zero(p);
    }
    let num = bf_from_bigint(r.numer());
    let den = bf_from_bigint(r.denom());
    ex(num.div(&den, p, RM))
}

/// Best-effort conversion to `f64` (used at report boundaries only).
fn bf_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (words, _, sign, exp, _) = x.as_raw_parts().expect("finite float has raw parts");
    let len = words.len();
    let hi = words[len - 1] as f64;
    let lo = if len >= 2 { words[len - 2] as f64 } else { 0.0 };
    let frac = hi * 2f64.powi(-64) + lo * 2f64.powi(-128);
    let mag = frac * 2f64.powi(exp);
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// atan2 with principal value in (-pi, pi].
fn bf_atan2(y: &BigFloat, x: &BigFloat, p: usize, cc: &mut Consts) -> BigFloat {
    if x.is_zero() {
        let half_pi = {
            let pi = ex(cc.pi(p, RM));
            ex(pi.div(&BigFloat::from_f64(2.0, p), p, RM))
        };
        if y.is_zero() {
            return bf_zero(p);
        }
        return if y.is_positive() {
            half_pi
        } else {
            half_pi.neg()
        };
    }
    let t = ex(ex(y.div(x, p, RM)).atan(p, RM, cc));
    if x.is_positive() {
        t
    } else {
        let pi = ex(cc.pi(p, RM));
        // x < 0: shift into the principal branch; y = 0 lands on +pi.
        if y.is_negative() {
            ex(t.sub(&pi, p, RM))
        } else {
            ex(t.add(&pi, p, RM))
        }
    }
}

/// Complex floating value at a fixed working precision.
#[derive(Clone, Debug)]
pub struct ComplexF {
    re: BigFloat,
    im: BigFloat,
    prec: Precision,
}

impl ComplexF {
    pub fn new(re: BigFloat, im: BigFloat, prec: Precision) -> Self {
        ComplexF { re, im, prec }
    }

    pub fn zero(prec: Precision) -> Self {
        Self::from_f64(0.0, 0.0, prec)
    }

    pub fn one(prec: Precision) -> Self {
        Self::from_f64(1.0, 0.0, prec)
    }

    pub fn from_f64(re: f64, im: f64, prec: Precision) -> Self {
        let p = prec.bits();
        ComplexF {
            re: BigFloat::from_f64(re, p),
            im: BigFloat::from_f64(im, p),
            prec,
        }
    }

    /// Exact-input conversion of a Gaussian rational, correctly rounded.
    pub fn from_rational(x: &GaussianRational, prec: Precision) -> Self {
        let p = prec.bits();
        ComplexF {
            re: bf_from_rational(x.re(), p),
            im: bf_from_rational(x.im(), p),
            prec,
        }
    }

    /// Numeric value of a root gauge: `|b|^(-1/m) * exp(-i Arg(b)/m)`.
    pub fn eval_root(r: &RootScalar, prec: Precision) -> Self {
        let p = prec.bits();
        let m = BigFloat::from_f64(f64::from(r.degree()), p);
        let norm_sqr = bf_from_rational(&r.base().norm_sqr(), p);
        let re = bf_from_rational(r.base().re(), p);
        let im = bf_from_rational(r.base().im(), p);
        CONSTS.with(|cc| {
            let cc = &mut *cc.borrow_mut();
            // |b|^(-1/m) = exp(-ln(|b|^2) / (2m))
            let ln_ns = ex(norm_sqr.ln(p, RM, cc));
            let two_m = ex(m.mul(&BigFloat::from_f64(2.0, p), p, RM));
            let mag = ex(ex(ln_ns.div(&two_m, p, RM)).neg().exp(p, RM, cc));
            let theta = bf_atan2(&im, &re, p, cc);
            let phi = ex(theta.div(&m, p, RM)).neg();
            let c = ex(phi.cos(p, RM, cc));
            let s = ex(phi.sin(p, RM, cc));
            ComplexF {
                re: ex(mag.mul(&c, p, RM)),
                im: ex(mag.mul(&s, p, RM)),
                prec,
            }
        })
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn re_f64(&self) -> f64 {
        bf_to_f64(&self.re)
    }

    pub fn im_f64(&self) -> f64 {
        bf_to_f64(&self.im)
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.re.is_inf() || self.im.is_nan() || self.im.is_inf())
    }

    /// Error out on non-finite values so callers honor the finiteness invariant.
    pub fn finite_or_overflow(self) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::Overflow)
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let p = self.prec.bits();
        ComplexF {
            re: ex(self.re.add(&rhs.re, p, RM)),
            im: ex(self.im.add(&rhs.im, p, RM)),
            prec: self.prec,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let p = self.prec.bits();
        ComplexF {
            re: ex(self.re.sub(&rhs.re, p, RM)),
            im: ex(self.im.sub(&rhs.im, p, RM)),
            prec: self.prec,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let p = self.prec.bits();
        let ac = ex(self.re.mul(&rhs.re, p, RM));
        let bd = ex(self.im.mul(&rhs.im, p, RM));
        let ad = ex(self.re.mul(&rhs.im, p, RM));
        let bc = ex(self.im.mul(&rhs.re, p, RM));
        ComplexF {
            re: ex(ac.sub(&bd, p, RM)),
            im: ex(ad.add(&bc, p, RM)),
            prec: self.prec,
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let p = self.prec.bits();
        let d = rhs.norm_sqr_bf();
        let ac = ex(self.re.mul(&rhs.re, p, RM));
        let bd = ex(self.im.mul(&rhs.im, p, RM));
        let bc = ex(self.im.mul(&rhs.re, p, RM));
        let ad = ex(self.re.mul(&rhs.im, p, RM));
        ComplexF {
            re: ex(ex(ac.add(&bd, p, RM)).div(&d, p, RM)),
            im: ex(ex(bc.sub(&ad, p, RM)).div(&d, p, RM)),
            prec: self.prec,
        }
    }

    pub fn neg(&self) -> Self {
        ComplexF {
            re: self.re.neg(),
            im: self.im.neg(),
            prec: self.prec,
        }
    }

    pub fn scale_f64(&self, k: f64) -> Self {
        let p = self.prec.bits();
        let kf = BigFloat::from_f64(k, p);
        ComplexF {
            re: ex(self.re.mul(&kf, p, RM)),
            im: ex(self.im.mul(&kf, p, RM)),
            prec: self.prec,
        }
    }

    pub fn powi(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.prec);
        let mut base = self.clone();
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

    /// Complex exponential: `exp(a+bi) = e^a (cos b + i sin b)`.
    pub fn exp(&self) -> Self {
        let p = self.prec.bits();
        CONSTS.with(|cc| {
            let cc = &mut *cc.borrow_mut();
            let ea = ex(self.re.exp(p, RM, cc));
            let c = ex(self.im.cos(p, RM, cc));
            let s = ex(self.im.sin(p, RM, cc));
            ComplexF {
                re: ex(ea.mul(&c, p, RM)),
                im: ex(ea.mul(&s, p, RM)),
                prec: self.prec,
            }
        })
    }

    fn norm_sqr_bf(&self) -> BigFloat {
        let p = self.prec.bits();
        let rr = ex(self.re.mul(&self.re, p, RM));
        let ii = ex(self.im.mul(&self.im, p, RM));
        ex(rr.add(&ii, p, RM))
    }

    /// Magnitude |z| as f64 (report/threshold use).
    pub fn norm_f64(&self) -> f64 {
        let p = self.prec.bits();
        bf_to_f64(&ex(self.norm_sqr_bf().sqrt(p, RM)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_to_float_one_third() {
        let x = GaussianRational::from_ratio(1, 3);
        let v = ComplexF::from_rational(&x, Precision::P53);
        assert!((v.re_f64() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(v.im_f64(), 0.0);
    }

    #[test]
    fn root_eval_inverse_sqrt_two() {
        // Independent oracle: 1/sqrt(2) computed directly at 256 bits.
        let r = RootScalar::new(GaussianRational::from_int(2), 2).unwrap();
        let v = ComplexF::eval_root(&r, Precision::P256);
        let two = BigFloat::from_i64(2, 256);
        let oracle = BigFloat::from_i64(1, 256).div(&two.sqrt(256, RM), 256, RM);
        let diff = v.re_f64() - bf_to_f64(&oracle);
        assert!(diff.abs() < 1e-30);
        assert!((v.re_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(v.im_f64().abs() < 1e-70);
    }

    #[test]
    fn exp_of_zero() {
        let z = ComplexF::zero(Precision::P256);
        let e = z.exp();
        assert_eq!(e.re_f64(), 1.0);
        assert_eq!(e.im_f64(), 0.0);
    }

    #[test]
    fn exp_of_i_pi_like() {
        // exp(i * pi) ~ -1 using a 53-bit approximation of pi as input.
        let z = ComplexF::from_f64(0.0, std::f64::consts::PI, Precision::P256);
        let e = z.exp();
        assert!((e.re_f64() + 1.0).abs() < 1e-15);
        assert!(e.im_f64().abs() < 1e-15);
    }

    #[test]
    fn non_finite_values_surface_as_overflow() {
        let z = ComplexF::one(Precision::P53);
        let w = ComplexF::zero(Precision::P53);
        let q = z.div(&w);
        assert!(q.finite_or_overflow().is_err());
    }

    #[test]
    fn agreement_across_precisions() {
        let x = GaussianRational::from_parts(22, 7, -3, 11);
        let lo = ComplexF::from_rational(&x, Precision::P53);
        let hi = ComplexF::from_rational(&x, Precision::P256);
        let dre = (lo.re_f64() - hi.re_f64()).abs();
        let dim = (lo.im_f64() - hi.im_f64()).abs();
        assert!(dre < 1e-14 * lo.re_f64().abs());
        assert!(dim < 1e-14 * lo.im_f64().abs());
    }
}
