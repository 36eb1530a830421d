//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Terms are kept in a canonical graded-lexicographic order, coefficients
//! are always nonzero, and every operation is exact. Degree and term-count
//! caps guard the combinatorial blowup of composition and substitution.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{ComplexF, GaussianRational, Precision};

/// Maximum total degree any operation may produce.
pub const DEGREE_CAP: usize = 64;
/// Maximum number of stored terms.
pub const TERM_CAP: usize = 100_000;
/// Maximum ambient variable count.
pub const MAX_VARS: usize = 64;

/// Dense exponent vector, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    fn mul(&self, rhs: &Self) -> Self {
        Monomial(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }

    /// Variables with positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Sparse multivariate polynomial with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(nvars), c);
        }
        p
    }

    pub fn variable(nvars: usize, index: usize) -> Result<Self> {
        if index >= nvars {
            return Err(Error::PreconditionViolation(format!(
                "variable index {index} out of range for nvars = {nvars}"
            )));
        }
        let mut exps = vec![0u32; nvars];
        exps[index] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial(exps), GaussianRational::one());
        Ok(p)
    }

    pub fn from_terms<I>(nvars: usize, iter: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, GaussianRational)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, coeff) in iter {
            if exps.len() != nvars {
                return Err(Error::PreconditionViolation(
                    "exponent vector length must equal nvars".into(),
                ));
            }
            p.add_term(Monomial(exps), coeff);
        }
        p.check_caps()?;
        Ok(p)
    }

    fn add_term(&mut self, mono: Monomial, coeff: GaussianRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_caps(&self) -> Result<()> {
        let deg = self.degree();
        if deg > DEGREE_CAP {
            return Err(Error::DegreeCapExceeded {
                degree: deg,
                cap: DEGREE_CAP,
            });
        }
        if self.terms.len() > TERM_CAP {
            return Err(Error::TermCapExceeded {
                terms: self.terms.len(),
                cap: TERM_CAP,
            });
        }
        Ok(())
    }

    fn require_same_vars(&self, rhs: &Self) -> Result<()> {
        if self.nvars != rhs.nvars {
            return Err(Error::PreconditionViolation(format!(
                "variable counts differ: {} vs {}",
                self.nvars, rhs.nvars
            )));
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Max total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .get(&Monomial::unit(self.nvars))
            .cloned()
            .unwrap_or_else(GaussianRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.require_same_vars(rhs)?;
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out.check_caps()?;
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, k: &GaussianRational) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.mul(k)))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.require_same_vars(rhs)?;
        if !self.is_zero() && !rhs.is_zero() {
            let deg = self.degree() + rhs.degree();
            if deg > DEGREE_CAP {
                return Err(Error::DegreeCapExceeded {
                    degree: deg,
                    cap: DEGREE_CAP,
                });
            }
        }
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out.check_caps()?;
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        if e as usize > DEGREE_CAP {
            return Err(Error::DegreeCapExceeded {
                degree: e as usize,
                cap: DEGREE_CAP,
            });
        }
        let mut acc = Self::constant(self.nvars, GaussianRational::one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Exact formal partial derivative with respect to variable `index`.
    pub fn partial_derivative(&self, index: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[index] = e - 1;
            out.add_term(Monomial(exps), c.mul(&GaussianRational::from_int(e as i64)));
        }
        out
    }

    pub fn mixed_partial(&self, i: usize, j: usize) -> Self {
        self.partial_derivative(i).partial_derivative(j)
    }

    /// Power-table evaluation; error follows standard floating analysis
    /// at the chosen precision.
    pub fn evaluate(&self, point: &[ComplexF], prec: Precision) -> Result<ComplexF> {
        if point.len() != self.nvars {
            return Err(Error::PreconditionViolation(format!(
                "point length {} does not match nvars {}",
                point.len(),
                self.nvars
            )));
        }
        // Per-variable power tables up to the max exponent used.
        let mut max_exp = vec![0u32; self.nvars];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let mut powers: Vec<Vec<ComplexF>> = Vec::with_capacity(self.nvars);
        for (i, &me) in max_exp.iter().enumerate() {
            let mut tab = Vec::with_capacity(me as usize + 1);
            tab.push(ComplexF::one(prec));
            for k in 1..=me as usize {
                let next = tab[k - 1].mul(&point[i]);
                tab.push(next);
            }
            powers.push(tab);
        }
        let mut acc = ComplexF::zero(prec);
        for (m, c) in &self.terms {
            let mut t = ComplexF::from_rational(c, prec);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize]);
                }
            }
            acc = acc.add(&t);
        }
        acc.finite_or_overflow()
    }

    /// Dense univariate coefficient vector `[c0, c1, ...]`; requires nvars == 1.
    pub fn univariate_coeffs(&self) -> Result<Vec<GaussianRational>> {
        if self.nvars != 1 {
            return Err(Error::PreconditionViolation(
                "univariate view requires nvars == 1".into(),
            ));
        }
        let deg = self.degree();
        let mut out = vec![GaussianRational::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m.0[0] as usize] = c.clone();
        }
        Ok(out)
    }

    /// Horner evaluation of a univariate polynomial at a complex point.
    pub fn evaluate_univariate(&self, t: &ComplexF, prec: Precision) -> Result<ComplexF> {
        let coeffs = self.univariate_coeffs()?;
        let mut acc = ComplexF::zero(prec);
        for c in coeffs.iter().rev() {
            acc = acc.mul(t).add(&ComplexF::from_rational(c, prec));
        }
        acc.finite_or_overflow()
    }

    /// `G(l(z))` expanded exactly in the ambient variables of `ell`.
    pub fn compose_linear(profile: &MultiPoly, ell: &LinearForm) -> Result<MultiPoly> {
        if profile.nvars != 1 {
            return Err(Error::PreconditionViolation(
                "profile must be univariate".into(),
            ));
        }
        let coeffs = profile.univariate_coeffs()?;
        let lin = ell.to_poly();
        let mut out = MultiPoly::zero(ell.nvars);
        let mut power = MultiPoly::constant(ell.nvars, GaussianRational::one());
        for (k, c) in coeffs.iter().enumerate() {
            if k > 0 {
                power = power.mul(&lin)?;
            }
            if !c.is_zero() {
                out = out.add(&power.scale(c))?;
            }
        }
        Ok(out)
    }

    /// `g(M w)` expanded exactly, with `M` given as rows of a square matrix.
    pub fn substitute_linear_map(&self, rows: &[Vec<GaussianRational>]) -> Result<MultiPoly> {
        let n = self.nvars;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::PreconditionViolation(format!(
                "substitution matrix must be {n} x {n}"
            )));
        }
        // Image of each variable as a linear polynomial in the new variables.
        let mut images: Vec<MultiPoly> = Vec::with_capacity(n);
        for row in rows {
            let mut img = MultiPoly::zero(n);
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    img = img.add(&MultiPoly::variable(n, j)?.scale(c))?;
                }
            }
            images.push(img);
        }
        // Power cache per variable.
        let mut max_exp = vec![0u32; n];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let one = MultiPoly::constant(n, GaussianRational::one());
        let mut pow_cache: Vec<Vec<MultiPoly>> = Vec::with_capacity(n);
        for (i, &me) in max_exp.iter().enumerate() {
            let mut tab = vec![one.clone()];
            for k in 1..=me as usize {
                let next = tab[k - 1].mul(&images[i])?;
                tab.push(next);
            }
            pow_cache.push(tab);
        }
        let mut out = MultiPoly::zero(n);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(n, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&pow_cache[i][e as usize])?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Exact constant `c` with `p = c q`, if one exists (`c = 0` for `p = 0`).
    pub fn const_ratio(p: &MultiPoly, q: &MultiPoly) -> Result<Option<GaussianRational>> {
        if q.is_zero() {
            return Err(Error::ZeroDivisorPolynomial);
        }
        if p.is_zero() {
            return Ok(Some(GaussianRational::zero()));
        }
        p.require_same_vars(q)?;
        let (pm, pc) = p.leading().expect("nonzero");
        let (qm, qc) = q.leading().expect("nonzero");
        if pm != qm {
            return Ok(None);
        }
        let c = pc.div(qc).expect("leading coefficients are nonzero");
        let diff = p.sub(&q.scale(&c))?;
        if diff.is_zero() {
            Ok(Some(c))
        } else {
            Ok(None)
        }
    }

    /// Sorted list of variables appearing in some term.
    pub fn vars_used(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars];
        for m in self.terms.keys() {
            for i in m.support() {
                used[i] = true;
            }
        }
        used.iter()
            .enumerate()
            .filter(|(_, &u)| u)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn depends_on(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m.0[index] > 0)
    }

    /// Drop the constant term.
    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&Monomial::unit(self.nvars));
        out
    }

    /// Add a constant.
    pub fn plus_constant(&self, c: &GaussianRational) -> Self {
        let mut out = self.clone();
        out.add_term(Monomial::unit(self.nvars), c.clone());
        out
    }

    /// Re-index a polynomial that uses only variable `anchor` as univariate in t.
    pub fn to_univariate_in(&self, anchor: usize) -> Result<MultiPoly> {
        let mut out = MultiPoly::zero(1);
        for (m, c) in &self.terms {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 && i != anchor {
                    return Err(Error::PreconditionViolation(format!(
                        "polynomial depends on z{} besides the anchor",
                        i + 1
                    )));
                }
            }
            out.add_term(Monomial(vec![m.0[anchor]]), c.clone());
        }
        Ok(out)
    }

    /// Coefficient map of a pure linear polynomial (no constant, degree <= 1).
    pub fn as_linear_coeffs(&self) -> Option<BTreeMap<usize, GaussianRational>> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.degree() != 1 {
                return None;
            }
            let var = m.support().next().expect("degree-1 monomial");
            out.insert(var, c.clone());
        }
        if out.is_empty() {
            None
        } else {
            Some(out)
        }
    }
}

fn coeff_is_negative(c: &GaussianRational) -> bool {
    if !c.re().is_zero() {
        c.re().is_negative()
    } else {
        c.im().is_negative()
    }
}

fn coeff_factor_text(c: &GaussianRational) -> String {
    if c.is_real() {
        if c.re().is_integer() {
            format!("{}", c.re().numer())
        } else {
            format!("({})", c)
        }
    } else if c.re().is_zero() {
        let im = c.im();
        if im.is_integer() {
            if im.numer() == &num_bigint::BigInt::from(1) {
                "i".to_string()
            } else {
                format!("{}*i", im.numer())
            }
        } else {
            format!("({}/{})*i", im.numer(), im.denom())
        }
    } else {
        // Mixed real/imaginary parts render parenthesized already.
        format!("{}", c)
    }
}

impl MultiPoly {
    /// Canonical rendering (descending graded-lex) with caller-chosen
    /// variable names; `Display` uses `z1, z2, ...`.
    pub fn render_with_vars(&self, namer: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let (neg, mag) = if coeff_is_negative(c) {
                (true, c.neg())
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    out.push('-');
                }
                first = false;
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            namer(i)
                        } else {
                            format!("{}^{}", namer(i), e)
                        }
                    })
                    .collect();
            if vars.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&vars.join("*"));
            } else {
                out.push_str(&coeff_factor_text(&mag));
                out.push('*');
                out.push_str(&vars.join("*"));
            }
        }
        out
    }

    /// LaTeX rendering in the same order: braced exponents, `\frac` for
    /// rationals, implicit multiplication.
    pub fn render_latex(&self, namer: &dyn Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let (neg, mag) = if coeff_is_negative(c) {
                (true, c.neg())
            } else {
                (false, c.clone())
            };
            if first {
                if neg {
                    out.push('-');
                }
                first = false;
            } else if neg {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        if e == 1 {
                            namer(i)
                        } else {
                            format!("{}^{{{}}}", namer(i), e)
                        }
                    })
                    .collect();
            if vars.is_empty() {
                out.push_str(&mag.latex());
            } else if mag.is_one() {
                out.push_str(&vars.join(" "));
            } else {
                out.push_str(&mag.latex());
                out.push(' ');
                out.push_str(&vars.join(" "));
            }
        }
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_with_vars(&|i| format!("z{}", i + 1)))
    }
}

/// Constant-coefficient linear form `A_1 z_{k_1} + ... + A_m z_{k_m}` with
/// every coefficient nonzero and nonempty support.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearForm {
    nvars: usize,
    coeffs: BTreeMap<usize, GaussianRational>,
}

impl LinearForm {
    pub fn new<I>(nvars: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, GaussianRational)>,
    {
        let mut map = BTreeMap::new();
        for (i, c) in coeffs {
            if i >= nvars {
                return Err(Error::PreconditionViolation(format!(
                    "variable index {i} out of range for nvars = {nvars}"
                )));
            }
            if c.is_zero() {
                return Err(Error::PreconditionViolation(
                    "linear form coefficients must be nonzero".into(),
                ));
            }
            if map.insert(i, c).is_some() {
                return Err(Error::PreconditionViolation(format!(
                    "duplicate variable index {i} in linear form"
                )));
            }
        }
        if map.is_empty() {
            return Err(Error::PreconditionViolation(
                "linear form must have nonempty support".into(),
            ));
        }
        Ok(LinearForm { nvars, coeffs: map })
    }

    /// The single-variable form `z_index`.
    pub fn single(nvars: usize, index: usize) -> Result<Self> {
        Self::new(nvars, [(index, GaussianRational::one())])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Least support index; its coefficient is 1 on detector output.
    pub fn anchor(&self) -> usize {
        *self.coeffs.keys().next().expect("nonempty support")
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn support_vec(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, index: usize) -> Option<&GaussianRational> {
        self.coeffs.get(&index)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &GaussianRational)> {
        self.coeffs.iter().map(|(&i, c)| (i, c))
    }

    /// Product of all coefficients (nonzero by the invariants).
    pub fn coeff_product(&self) -> GaussianRational {
        self.coeffs
            .values()
            .fold(GaussianRational::one(), |acc, c| acc.mul(c))
    }

    pub fn to_poly(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (&i, c) in &self.coeffs {
            let mut exps = vec![0u32; self.nvars];
            exps[i] = 1;
            out.add_term(Monomial(exps), c.clone());
        }
        out
    }

    /// Rebuild from a pure linear polynomial, if it is one.
    pub fn from_poly(p: &MultiPoly) -> Option<Self> {
        let coeffs = p.as_linear_coeffs()?;
        Some(LinearForm {
            nvars: p.nvars(),
            coeffs,
        })
    }

    pub fn evaluate(&self, point: &[ComplexF], prec: Precision) -> Result<ComplexF> {
        if point.len() != self.nvars {
            return Err(Error::PreconditionViolation(
                "point length does not match nvars".into(),
            ));
        }
        let mut acc = ComplexF::zero(prec);
        for (&i, c) in &self.coeffs {
            acc = acc.add(&ComplexF::from_rational(c, prec).mul(&point[i]));
        }
        acc.finite_or_overflow()
    }

    /// The form `l(M w)` for a square matrix `M` given by rows.
    pub fn compose_matrix(&self, rows: &[Vec<GaussianRational>]) -> Result<LinearForm> {
        let n = self.nvars;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::PreconditionViolation(format!(
                "composition matrix must be {n} x {n}"
            )));
        }
        let mut out: BTreeMap<usize, GaussianRational> = BTreeMap::new();
        for (&j, c) in &self.coeffs {
            for (k, m) in rows[j].iter().enumerate() {
                if m.is_zero() {
                    continue;
                }
                let cur = out.remove(&k).unwrap_or_else(GaussianRational::zero);
                let sum = cur.add(&c.mul(m));
                if !sum.is_zero() {
                    out.insert(k, sum);
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidInput(
                "linear form vanished under substitution".into(),
            ));
        }
        Ok(LinearForm {
            nvars: n,
            coeffs: out,
        })
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

impl serde::Serialize for LinearForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for (&i, c) in &self.coeffs {
            seq.serialize_element(&(i + 1, c.to_string()))?;
        }
        seq.end()
    }
}

impl<'de> serde::Deserialize<'de> for LinearForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<(usize, String)> = Vec::deserialize(d)?;
        let mut coeffs = Vec::with_capacity(pairs.len());
        let mut max_var = 0usize;
        for (var, text) in pairs {
            if var == 0 {
                return Err(serde::de::Error::custom("variable indices are 1-based"));
            }
            max_var = max_var.max(var);
            let c = crate::parser::parse_scalar(&text).map_err(serde::de::Error::custom)?;
            coeffs.push((var - 1, c));
        }
        LinearForm::new(max_var, coeffs).map_err(serde::de::Error::custom)
    }
}
