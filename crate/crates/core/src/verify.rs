//! Exact symbolic verification and independent numeric verification.
//!
//! The symbolic route multiplies the closed-form gradient components as
//! sums of exponentials `sum c_k e^{q_k(z)}`: the product collapses when
//! every factor is a single exponential, the exponent sum minus `g` must be
//! identically zero, and the scalar product must cancel to exactly 1
//! through the root-gauge relation `beta^m * base = 1`. No tolerances.
//!
//! The numeric route samples seeded points in a polydisk and measures
//! relative residuals of the gradient product against `e^g`, evaluates
//! antiderivative terms by Gauss-Legendre quadrature, and cross-checks the
//! closed-form gradient against complex central differences.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::ExprNode;
use crate::multipoly::MultiPoly;
use crate::reduce::MatrixA;
use crate::scalar::{ComplexF, GaussianRational, Precision, RootScalar};
use crate::synthesize::SolutionForm;

/// Product of a Gaussian rational and symbolic root factors, reduced by the
/// defining relation `beta^m * base = 1` whenever an exponent reaches `m`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScalarProduct {
    rational: GaussianRational,
    roots: BTreeMap<RootScalar, u32>,
}

impl ScalarProduct {
    pub fn one() -> Self {
        ScalarProduct {
            rational: GaussianRational::one(),
            roots: BTreeMap::new(),
        }
    }

    pub fn from_rational(c: GaussianRational) -> Self {
        ScalarProduct {
            rational: c,
            roots: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    /// Exactly the rational 1 with no leftover root factors.
    pub fn is_one(&self) -> bool {
        self.rational.is_one() && self.roots.is_empty()
    }

    pub fn mul_rational(&mut self, c: &GaussianRational) {
        self.rational = self.rational.mul(c);
        if self.rational.is_zero() {
            self.roots.clear();
        }
    }

    /// Multiply by `root^k`, reducing the exponent modulo the degree:
    /// every complete power `beta^m` cancels against a factor `base^{-1}`.
    pub fn mul_root_pow(&mut self, root: &RootScalar, k: u32) {
        if self.rational.is_zero() || k == 0 || root.is_one() {
            return;
        }
        let e = self.roots.get(root).copied().unwrap_or(0) + k;
        let m = root.degree();
        let whole = e / m;
        let rem = e % m;
        if whole > 0 {
            let inv = root.base().inv().expect("root base is nonzero");
            self.rational = self.rational.mul(&inv.pow(whole));
        }
        if rem == 0 {
            self.roots.remove(root);
        } else {
            self.roots.insert(root.clone(), rem);
        }
    }

    pub fn mul(&mut self, other: &ScalarProduct) {
        self.mul_rational(&other.rational);
        for (root, &e) in &other.roots {
            self.mul_root_pow(root, e);
        }
    }

    /// Root factors, used as the merge key for sums of exponentials.
    fn roots_key(&self) -> &BTreeMap<RootScalar, u32> {
        &self.roots
    }

    fn try_add(&self, other: &ScalarProduct) -> Option<ScalarProduct> {
        if self.roots != other.roots {
            return None;
        }
        let rational = self.rational.add(&other.rational);
        if rational.is_zero() {
            Some(ScalarProduct::from_rational(GaussianRational::zero()))
        } else {
            Some(ScalarProduct {
                rational,
                roots: self.roots.clone(),
            })
        }
    }

    pub fn eval(&self, prec: Precision) -> ComplexF {
        let mut acc = ComplexF::from_rational(&self.rational, prec);
        for (root, &e) in &self.roots {
            acc = acc.mul(&ComplexF::eval_root(root, prec).powi(e));
        }
        acc
    }
}

impl std::fmt::Display for ScalarProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if !self.rational.is_one() || self.roots.is_empty() {
            parts.push(self.rational.to_string());
        }
        for (root, &e) in &self.roots {
            if e == 1 {
                parts.push(root.to_string());
            } else {
                parts.push(format!("({root})^{e}"));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Canonicalized sum `sum_k c_k e^{q_k(z)}`: terms sorted by exponent
/// polynomial and root factors, like terms merged, zero scalars dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpPolySum {
    nvars: usize,
    terms: Vec<(ScalarProduct, MultiPoly)>,
}

impl ExpPolySum {
    pub fn zero(nvars: usize) -> Self {
        ExpPolySum {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn single(scalar: ScalarProduct, exponent: MultiPoly) -> Self {
        let nvars = exponent.nvars();
        let mut s = ExpPolySum {
            nvars,
            terms: vec![(scalar, exponent)],
        };
        s.canonicalize();
        s
    }

    pub fn push(&mut self, scalar: ScalarProduct, exponent: MultiPoly) {
        self.terms.push((scalar, exponent));
        self.canonicalize();
    }

    pub fn add(&self, other: &ExpPolySum) -> ExpPolySum {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.canonicalize();
        out
    }

    pub fn scale_rational(&self, c: &GaussianRational) -> ExpPolySum {
        let mut out = self.clone();
        for (s, _) in &mut out.terms {
            s.mul_rational(c);
        }
        out.canonicalize();
        out
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = &(ScalarProduct, MultiPoly)> {
        self.terms.iter()
    }

    /// The sole term of a collapsed sum, when it has exactly one.
    pub fn single_term(&self) -> Option<(&ScalarProduct, &MultiPoly)> {
        if self.terms.len() == 1 {
            Some((&self.terms[0].0, &self.terms[0].1))
        } else {
            None
        }
    }

    fn canonicalize(&mut self) {
        self.terms.retain(|(s, _)| !s.is_zero());
        self.terms.sort_by(|(sa, pa), (sb, pb)| {
            pa.cmp(pb).then_with(|| sa.roots_key().cmp(sb.roots_key()))
        });
        let mut merged: Vec<(ScalarProduct, MultiPoly)> = Vec::with_capacity(self.terms.len());
        for (scalar, poly) in self.terms.drain(..) {
            if let Some((last_s, last_p)) = merged.last_mut() {
                if *last_p == poly {
                    if let Some(sum) = last_s.try_add(&scalar) {
                        if sum.is_zero() {
                            merged.pop();
                        } else {
                            *last_s = sum;
                        }
                        continue;
                    }
                }
            }
            merged.push((scalar, poly));
        }
        self.terms = merged;
    }

    pub fn eval(&self, point: &[ComplexF], prec: Precision) -> Result<ComplexF> {
        let mut acc = ComplexF::zero(prec);
        for (scalar, poly) in &self.terms {
            let e = poly.evaluate(point, prec)?.exp().finite_or_overflow()?;
            acc = acc.add(&scalar.eval(prec).mul(&e));
        }
        acc.finite_or_overflow()
    }
}

/// Closed-form gradient: component `j` is the sum over terms containing `j`
/// of `A_j * beta * e^{p(l(z))}`, with the composition expanded exactly.
pub fn gradient_closed_form(s: &SolutionForm) -> Result<Vec<ExpPolySum>> {
    let mut components = vec![ExpPolySum::zero(s.nvars); s.nvars];
    for term in &s.terms {
        let expanded = MultiPoly::compose_linear(&term.exponent, &term.ell)?;
        for (var, coeff) in term.ell.coeffs() {
            let mut scalar = ScalarProduct::from_rational(coeff.clone());
            scalar.mul_root_pow(&term.gauge, 1);
            components[var].push(scalar, expanded.clone());
        }
    }
    Ok(components)
}

/// Verification mode: plain product of gradient components, or the matrix
/// form where each row `row_i A . grad u` must collapse first.
#[derive(Clone, Copy)]
pub enum VerifyMode<'a> {
    Plain,
    Matrix(&'a MatrixA),
}

/// Outcome of the exact check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolicVerdict {
    pub pass: bool,
    /// Exponent identity `sum of exponents = g` held exactly.
    pub exponent_ok: bool,
    /// Scalar product collapsed to exactly 1 via the root relations.
    pub scalar_ok: bool,
    /// Rendered exponent-difference polynomial on failure.
    pub witness: Option<String>,
    /// Leftover scalar product on failure.
    pub scalar_leftover: Option<String>,
    /// 1-based row that failed to collapse to a single exponential.
    pub failed_row: Option<usize>,
}

/// Numeric residual statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericStats {
    pub pass: bool,
    pub max_rel_residual: f64,
    pub mean_rel_residual: f64,
    pub samples: usize,
    pub excluded: usize,
    pub seed: u64,
    pub tol: f64,
    pub precision_bits: usize,
}

/// Quadrature node-doubling convergence statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadStats {
    pub max_doubling_diff: f64,
    pub nodes_low: usize,
    pub nodes_high: usize,
    pub points: usize,
}

/// Finite-difference cross-check statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdStats {
    pub max_deviation: f64,
    pub step: f64,
    pub points: usize,
}

/// Combined verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Default)]
pub struct VerifyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<SymbolicVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd: Option<FdStats>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.symbolic.as_ref().is_none_or(|s| s.pass)
            && self.numeric.as_ref().is_none_or(|n| n.pass)
    }
}

fn matrix_rows(s: &SolutionForm, a: &MatrixA) -> Result<Vec<ExpPolySum>> {
    if a.n() != s.nvars {
        return Err(Error::PreconditionViolation(format!(
            "matrix size {} does not match solution nvars {}",
            a.n(),
            s.nvars
        )));
    }
    if a.is_singular() {
        return Err(Error::SingularMatrix);
    }
    let components = gradient_closed_form(s)?;
    let mut rows = Vec::with_capacity(s.nvars);
    for i in 0..s.nvars {
        let mut row = ExpPolySum::zero(s.nvars);
        for (k, comp) in components.iter().enumerate() {
            let a_ik = a.entry(i, k);
            if a_ik.is_zero() {
                continue;
            }
            row = row.add(&comp.scale_rational(a_ik));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Exact verification that the solution satisfies its equation.
pub fn symbolic_verify(
    s: &SolutionForm,
    g: &MultiPoly,
    mode: VerifyMode<'_>,
) -> Result<VerifyReport> {
    if g.nvars() != s.nvars {
        return Err(Error::PreconditionViolation(format!(
            "g has {} variables but the solution has {}",
            g.nvars(),
            s.nvars
        )));
    }
    let rows = match mode {
        VerifyMode::Plain => gradient_closed_form(s)?,
        VerifyMode::Matrix(a) => matrix_rows(s, a)?,
    };
    let mut exponent_sum = MultiPoly::zero(s.nvars);
    let mut scalar = ScalarProduct::one();
    let mut failed_row = None;
    for (i, row) in rows.iter().enumerate() {
        match row.single_term() {
            Some((row_scalar, exponent)) => {
                exponent_sum = exponent_sum.add(exponent)?;
                scalar.mul(row_scalar);
            }
            None => {
                failed_row = Some(i + 1);
                break;
            }
        }
    }
    if let Some(row) = failed_row {
        return Ok(VerifyReport {
            symbolic: Some(SymbolicVerdict {
                pass: false,
                exponent_ok: false,
                scalar_ok: false,
                witness: None,
                scalar_leftover: None,
                failed_row: Some(row),
            }),
            ..VerifyReport::default()
        });
    }
    let diff = exponent_sum.sub(g)?;
    let exponent_ok = diff.is_zero();
    let scalar_ok = scalar.is_one();
    Ok(VerifyReport {
        symbolic: Some(SymbolicVerdict {
            pass: exponent_ok && scalar_ok,
            exponent_ok,
            scalar_ok,
            witness: if exponent_ok {
                None
            } else {
                Some(diff.to_string())
            },
            scalar_leftover: if scalar_ok {
                None
            } else {
                Some(scalar.to_string())
            },
            failed_row: None,
        }),
        ..VerifyReport::default()
    })
}

/// What supplies the gradient for numeric verification.
#[derive(Clone, Copy)]
pub enum GradientSource<'a> {
    Form(&'a SolutionForm),
    FormMatrix(&'a SolutionForm, &'a MatrixA),
    Expr(&'a ExprNode),
}

/// What supplies the right-hand side exponent.
#[derive(Clone, Copy)]
pub enum RhsSource<'a> {
    Poly(&'a MultiPoly),
    Expr(&'a ExprNode),
}

/// Sampling configuration for numeric verification.
#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub samples: usize,
    pub radius: f64,
    pub tol: f64,
    pub seed: u64,
    pub precision: Precision,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            samples: 100,
            radius: 1.0,
            tol: 1e-9,
            seed: 42,
            precision: Precision::P256,
        }
    }
}

/// Deterministic points, uniform in the polydisk of the given radius.
pub fn sample_polydisk(nvars: usize, cfg: &SampleConfig) -> Vec<Vec<ComplexF>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.samples)
        .map(|_| {
            (0..nvars)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let v: f64 = rng.gen();
                    let r = cfg.radius * u.sqrt();
                    let theta = 2.0 * std::f64::consts::PI * v;
                    ComplexF::from_f64(r * theta.cos(), r * theta.sin(), cfg.precision)
                })
                .collect()
        })
        .collect()
}

/// Sampled residual check `|prod_i d_i u - e^g| / |e^g| < tol` at every
/// point. Overflowing points are excluded and reported; the run continues.
pub fn numeric_verify(
    u: GradientSource<'_>,
    rhs: RhsSource<'_>,
    nvars: usize,
    cfg: &SampleConfig,
) -> Result<VerifyReport> {
    if cfg.samples == 0 {
        return Err(Error::PreconditionViolation(
            "at least one sample is required".into(),
        ));
    }
    let radius_ok = cfg.radius.is_finite() && cfg.radius > 0.0;
    let tol_ok = cfg.tol.is_finite() && cfg.tol > 0.0;
    if !radius_ok || !tol_ok {
        return Err(Error::PreconditionViolation(
            "radius and tolerance must be positive".into(),
        ));
    }
    match u {
        GradientSource::Form(s) | GradientSource::FormMatrix(s, _) => {
            if s.nvars != nvars {
                return Err(Error::PreconditionViolation(
                    "solution nvars does not match".into(),
                ));
            }
        }
        GradientSource::Expr(e) => {
            if let Some(max) = e.max_var() {
                if max >= nvars {
                    return Err(Error::PreconditionViolation(format!(
                        "expression uses z{} but nvars is {nvars}",
                        max + 1
                    )));
                }
            }
        }
    }
    let prec = cfg.precision;

    // Closed-form sources against a polynomial rhs.
    if let (GradientSource::Form(s) | GradientSource::FormMatrix(s, _), RhsSource::Poly(g)) =
        (u, rhs)
    {
        let rows = match u {
            GradientSource::Form(s2) => gradient_closed_form(s2)?,
            GradientSource::FormMatrix(s2, a) => matrix_rows(s2, a)?,
            GradientSource::Expr(_) => unreachable!(),
        };
        if rows.iter().all(|r| r.single_term().is_some()) {
            // Stable path: each row is one exponential, so the relative
            // residual is exp(sum of exponents - g) * scalars - 1.
            let mut diff = MultiPoly::zero(s.nvars);
            let mut scalar = ScalarProduct::one();
            for row in &rows {
                let (row_scalar, exponent) = row.single_term().expect("checked");
                diff = diff.add(exponent)?;
                scalar.mul(row_scalar);
            }
            diff = diff.sub(g)?;
            if diff.is_zero() && scalar.is_one() {
                // Residual is exactly zero; no floating evaluation needed.
                return Ok(stats_report(vec![0.0; cfg.samples], 0, cfg));
            }
            let scalar_val = scalar.eval(prec);
            return sample_residuals(nvars, cfg, |point| {
                residual_stable(&diff, &scalar_val, point, prec)
            });
        }
        // Multi-term rows (overlapping supports): raw product.
        return sample_residuals(nvars, cfg, |point| {
            residual_rows_vs_poly(&rows, g, point, prec)
        });
    }

    // Black-box path: exact derivative trees (or closed-form rows) against
    // exp(rhs) evaluated directly.
    let grads: Vec<ExprNode> = match u {
        GradientSource::Expr(e) => (0..nvars).map(|v| e.diff(v)).collect(),
        GradientSource::Form(_) | GradientSource::FormMatrix(_, _) => Vec::new(),
    };
    let rows = match u {
        GradientSource::Form(s) => Some(gradient_closed_form(s)?),
        GradientSource::FormMatrix(s, a) => Some(matrix_rows(s, a)?),
        GradientSource::Expr(_) => None,
    };
    sample_residuals(nvars, cfg, |point| {
        let prod = if let Some(rows) = &rows {
            rows.iter().try_fold(ComplexF::one(prec), |acc, r| {
                Ok::<_, Error>(acc.mul(&r.eval(point, prec)?))
            })?
        } else {
            grads.iter().try_fold(ComplexF::one(prec), |acc, d| {
                Ok::<_, Error>(acc.mul(&d.eval(point, prec)?))
            })?
        };
        let rhs_val = match rhs {
            RhsSource::Poly(g) => g.evaluate(point, prec)?.exp().finite_or_overflow()?,
            RhsSource::Expr(e) => e.eval(point, prec)?.exp().finite_or_overflow()?,
        };
        let denom = rhs_val.norm_f64();
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Overflow);
        }
        Ok(prod.finite_or_overflow()?.sub(&rhs_val).norm_f64() / denom)
    })
}

/// Run a residual function over the sampled polydisk, excluding (and
/// counting) points that overflow.
fn sample_residuals<F>(nvars: usize, cfg: &SampleConfig, residual: F) -> Result<VerifyReport>
where
    F: Fn(&[ComplexF]) -> Result<f64>,
{
    let points = sample_polydisk(nvars, cfg);
    let mut residuals = Vec::with_capacity(points.len());
    let mut excluded = 0usize;
    for point in &points {
        match residual(point) {
            Ok(r) => residuals.push(r),
            Err(Error::Overflow) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(stats_report(residuals, excluded, cfg))
}

fn residual_stable(
    diff: &MultiPoly,
    scalar_val: &ComplexF,
    point: &[ComplexF],
    prec: Precision,
) -> Result<f64> {
    let e = diff.evaluate(point, prec)?.exp().finite_or_overflow()?;
    let v = e.mul(scalar_val).sub(&ComplexF::one(prec));
    Ok(v.norm_f64())
}

fn residual_rows_vs_poly(
    rows: &[ExpPolySum],
    g: &MultiPoly,
    point: &[ComplexF],
    prec: Precision,
) -> Result<f64> {
    let mut prod = ComplexF::one(prec);
    for row in rows {
        prod = prod.mul(&row.eval(point, prec)?);
    }
    prod = prod.finite_or_overflow()?;
    let rhs = g.evaluate(point, prec)?.exp().finite_or_overflow()?;
    let denom = rhs.norm_f64();
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(prod.sub(&rhs).norm_f64() / denom)
}

fn stats_report(residuals: Vec<f64>, excluded: usize, cfg: &SampleConfig) -> VerifyReport {
    let included = residuals.len();
    let max = residuals.iter().copied().fold(0.0f64, f64::max);
    let mean = if included == 0 {
        0.0
    } else {
        residuals.iter().sum::<f64>() / included as f64
    };
    let pass = included > 0 && max < cfg.tol;
    VerifyReport {
        numeric: Some(NumericStats {
            pass,
            max_rel_residual: max,
            mean_rel_residual: mean,
            samples: cfg.samples,
            excluded,
            seed: cfg.seed,
            tol: cfg.tol,
            precision_bits: cfg.precision.bits(),
        }),
        ..VerifyReport::default()
    }
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature of antiderivative terms.
// ---------------------------------------------------------------------------

const QUAD_NODE_CHOICES: [usize; 4] = [16, 32, 64, 128];

fn legendre_rule_f64(n: usize) -> Vec<(f64, f64)> {
    // Newton iteration on P_n from Chebyshev-like seeds; standard recurrence.
    let mut rule = vec![(0.0f64, 0.0f64); n];
    let m = n.div_ceil(2);
    for k in 0..m {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[k] = (-x, w);
        rule[n - 1 - k] = (x, w);
    }
    rule
}

fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for j in 2..=n {
        let pj = (((2 * j - 1) as f64) * x * p1 - ((j - 1) as f64) * p0) / j as f64;
        p0 = p1;
        p1 = pj;
    }
    let d = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

type LegendreRule = &'static Vec<(f64, f64)>;

fn legendre_rule(n: usize) -> LegendreRule {
    static RULES: OnceLock<Mutex<BTreeMap<usize, LegendreRule>>> = OnceLock::new();
    let cache = RULES.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut guard = cache.lock().expect("rule cache lock");
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(Box::new(legendre_rule_f64(n))))
}

/// Evaluate the antiderivative term `f(l(z)) = int_0^{l(z)} beta e^{p(t)} dt`
/// by Gauss-Legendre quadrature on the straight segment from 0. The
/// integrand is entire, so the path choice does not affect the value.
pub fn quadrature_eval(
    term: &crate::synthesize::SolutionTerm,
    point: &[ComplexF],
    nodes: usize,
    prec: Precision,
) -> Result<ComplexF> {
    if !QUAD_NODE_CHOICES.contains(&nodes) {
        return Err(Error::PreconditionViolation(format!(
            "node count must be one of {QUAD_NODE_CHOICES:?}"
        )));
    }
    let w = term.ell.evaluate(point, prec)?;
    let gauge = ComplexF::eval_root(&term.gauge, prec);
    let rule = legendre_rule(nodes);
    let half = w.scale_f64(0.5);
    let mut acc = ComplexF::zero(prec);
    for &(x, wt) in rule {
        // t = w (x + 1) / 2
        let t = half.scale_f64(x + 1.0);
        let f = term
            .exponent
            .evaluate_univariate(&t, prec)?
            .exp()
            .finite_or_overflow()?;
        acc = acc.add(&f.scale_f64(wt));
    }
    acc.mul(&half).mul(&gauge).finite_or_overflow()
}

/// Evaluate the whole solution `u(z)` by summing quadrature over its terms.
pub fn quadrature_eval_solution(
    s: &SolutionForm,
    point: &[ComplexF],
    nodes: usize,
    prec: Precision,
) -> Result<ComplexF> {
    let mut acc = ComplexF::zero(prec);
    for term in &s.terms {
        acc = acc.add(&quadrature_eval(term, point, nodes, prec)?);
    }
    acc.finite_or_overflow()
}

/// Radius that keeps every `|l(z)| <= 1` over the polydisk.
pub fn safe_quadrature_radius(s: &SolutionForm) -> f64 {
    let mut worst = 1.0f64;
    for t in &s.terms {
        let sum: f64 = t
            .ell
            .coeffs()
            .map(|(_, c)| ComplexF::from_rational(c, Precision::P53).norm_f64())
            .sum();
        worst = worst.max(sum);
    }
    (1.0 / worst).min(1.0)
}

/// Node-doubling convergence of quadrature over sampled points.
pub fn quadrature_convergence(
    s: &SolutionForm,
    points: usize,
    nodes_low: usize,
    nodes_high: usize,
    seed: u64,
    prec: Precision,
) -> Result<QuadStats> {
    let cfg = SampleConfig {
        samples: points,
        radius: safe_quadrature_radius(s),
        tol: 1.0,
        seed,
        precision: prec,
    };
    let samples = sample_polydisk(s.nvars, &cfg);
    let mut max_diff = 0.0f64;
    for point in &samples {
        for term in &s.terms {
            let lo = quadrature_eval(term, point, nodes_low, prec)?;
            let hi = quadrature_eval(term, point, nodes_high, prec)?;
            max_diff = max_diff.max(lo.sub(&hi).norm_f64());
        }
    }
    Ok(QuadStats {
        max_doubling_diff: max_diff,
        nodes_low,
        nodes_high,
        points,
    })
}

/// Compare the closed-form gradient against complex central differences of
/// the quadrature-evaluated solution; returns the max relative deviation.
pub fn fd_crosscheck(s: &SolutionForm, point: &[ComplexF], h: f64, prec: Precision) -> Result<f64> {
    if !(1e-8..=1e-4).contains(&h) {
        return Err(Error::PreconditionViolation(
            "finite-difference step must lie in [1e-8, 1e-4]".into(),
        ));
    }
    for c in point {
        if c.norm_f64() > 1.0 + 1e-12 {
            return Err(Error::PreconditionViolation(
                "finite-difference points must lie in the unit polydisk".into(),
            ));
        }
    }
    let components = gradient_closed_form(s)?;
    let step = ComplexF::from_f64(h, 0.0, prec);
    let mut max_dev = 0.0f64;
    for j in 0..s.nvars {
        let cf = components[j].eval(point, prec)?;
        let mut hi = point.to_vec();
        hi[j] = hi[j].add(&step);
        let mut lo = point.to_vec();
        lo[j] = lo[j].sub(&step);
        let u_hi = quadrature_eval_solution(s, &hi, 128, prec)?;
        let u_lo = quadrature_eval_solution(s, &lo, 128, prec)?;
        let fd = u_hi.sub(&u_lo).scale_f64(0.5 / h);
        let dev = cf.sub(&fd).norm_f64() / cf.norm_f64().max(1.0);
        max_dev = max_dev.max(dev);
    }
    Ok(max_dev)
}

/// Max finite-difference deviation over sampled points in a safe polydisk.
pub fn fd_stats(
    s: &SolutionForm,
    points: usize,
    h: f64,
    seed: u64,
    prec: Precision,
) -> Result<FdStats> {
    let cfg = SampleConfig {
        samples: points,
        radius: safe_quadrature_radius(s),
        tol: 1.0,
        seed,
        precision: prec,
    };
    let samples = sample_polydisk(s.nvars, &cfg);
    let mut max_dev = 0.0f64;
    for point in &samples {
        max_dev = max_dev.max(fd_crosscheck(s, point, h, prec)?);
    }
    Ok(FdStats {
        max_deviation: max_dev,
        step: h,
        points,
    })
}
