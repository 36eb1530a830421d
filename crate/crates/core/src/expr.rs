//! Black-box expression trees with `exp` nodes.
//!
//! Polynomials embed losslessly; the extra `Exp` constructor carries the
//! non-polynomial fixtures that the symbolic pipeline deliberately refuses.
//! Differentiation is exact (chain rule on `Exp`), so numeric verification
//! of expression pairs needs no finite differences.

use crate::error::{Error, Result};
use crate::scalar::{ComplexF, GaussianRational, Precision};

pub const MAX_EXPR_DEPTH: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprNode {
    Const(GaussianRational),
    Var(usize),
    Sum(Vec<ExprNode>),
    Product(Vec<ExprNode>),
    IntPow(Box<ExprNode>, u32),
    Exp(Box<ExprNode>),
}

impl ExprNode {
    pub fn constant(c: GaussianRational) -> Self {
        ExprNode::Const(c)
    }

    pub fn int(n: i64) -> Self {
        ExprNode::Const(GaussianRational::from_int(n))
    }

    fn is_zero_const(&self) -> bool {
        matches!(self, ExprNode::Const(c) if c.is_zero())
    }

    fn is_one_const(&self) -> bool {
        matches!(self, ExprNode::Const(c) if c.is_one())
    }

    /// Sum with trivial zero terms dropped.
    pub fn sum(children: Vec<ExprNode>) -> Self {
        let mut kept: Vec<ExprNode> = children
            .into_iter()
            .filter(|c| !c.is_zero_const())
            .collect();
        match kept.len() {
            0 => ExprNode::int(0),
            1 => kept.pop().expect("one element"),
            _ => ExprNode::Sum(kept),
        }
    }

    /// Product with trivial one factors dropped and zero annihilation.
    pub fn product(children: Vec<ExprNode>) -> Self {
        if children.iter().any(ExprNode::is_zero_const) {
            return ExprNode::int(0);
        }
        let mut kept: Vec<ExprNode> = children.into_iter().filter(|c| !c.is_one_const()).collect();
        match kept.len() {
            0 => ExprNode::int(1),
            1 => kept.pop().expect("one element"),
            _ => ExprNode::Product(kept),
        }
    }

    pub fn exp(inner: ExprNode) -> Self {
        ExprNode::Exp(Box::new(inner))
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprNode::Const(_) | ExprNode::Var(_) => 1,
            ExprNode::Sum(cs) | ExprNode::Product(cs) => {
                1 + cs.iter().map(ExprNode::depth).max().unwrap_or(0)
            }
            ExprNode::IntPow(c, _) | ExprNode::Exp(c) => 1 + c.depth(),
        }
    }

    /// Exact symbolic partial derivative.
    pub fn diff(&self, var: usize) -> ExprNode {
        match self {
            ExprNode::Const(_) => ExprNode::int(0),
            ExprNode::Var(v) => ExprNode::int(if *v == var { 1 } else { 0 }),
            ExprNode::Sum(cs) => ExprNode::sum(cs.iter().map(|c| c.diff(var)).collect()),
            ExprNode::Product(cs) => {
                let mut summands = Vec::with_capacity(cs.len());
                for k in 0..cs.len() {
                    let mut factors = Vec::with_capacity(cs.len());
                    for (j, c) in cs.iter().enumerate() {
                        if j == k {
                            factors.push(c.diff(var));
                        } else {
                            factors.push(c.clone());
                        }
                    }
                    summands.push(ExprNode::product(factors));
                }
                ExprNode::sum(summands)
            }
            ExprNode::IntPow(c, k) => {
                if *k == 0 {
                    return ExprNode::int(0);
                }
                ExprNode::product(vec![
                    ExprNode::int(i64::from(*k)),
                    if *k == 1 {
                        ExprNode::int(1)
                    } else {
                        ExprNode::IntPow(c.clone(), *k - 1)
                    },
                    c.diff(var),
                ])
            }
            ExprNode::Exp(c) => ExprNode::product(vec![c.diff(var), ExprNode::Exp(c.clone())]),
        }
    }

    /// Recursive evaluation; `Exp` uses the precision-matched complex
    /// exponential. Non-finite intermediates raise `Overflow`.
    pub fn eval(&self, point: &[ComplexF], prec: Precision) -> Result<ComplexF> {
        match self {
            ExprNode::Const(c) => Ok(ComplexF::from_rational(c, prec)),
            ExprNode::Var(v) => point.get(*v).cloned().ok_or_else(|| {
                Error::PreconditionViolation(format!("point is missing a value for z{}", v + 1))
            }),
            ExprNode::Sum(cs) => {
                let mut acc = ComplexF::zero(prec);
                for c in cs {
                    acc = acc.add(&c.eval(point, prec)?);
                }
                acc.finite_or_overflow()
            }
            ExprNode::Product(cs) => {
                let mut acc = ComplexF::one(prec);
                for c in cs {
                    acc = acc.mul(&c.eval(point, prec)?);
                }
                acc.finite_or_overflow()
            }
            ExprNode::IntPow(c, k) => c.eval(point, prec)?.powi(*k).finite_or_overflow(),
            ExprNode::Exp(c) => c.eval(point, prec)?.exp().finite_or_overflow(),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            ExprNode::Const(_) => None,
            ExprNode::Var(v) => Some(*v),
            ExprNode::Sum(cs) | ExprNode::Product(cs) => {
                cs.iter().filter_map(ExprNode::max_var).max()
            }
            ExprNode::IntPow(c, _) | ExprNode::Exp(c) => c.max_var(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c64(re: f64, im: f64) -> ComplexF {
        ComplexF::from_f64(re, im, Precision::P256)
    }

    #[test]
    fn diff_exp_chain_rule() {
        // d/dz1 exp(2 i z1) = 2i exp(2 i z1)
        let e = parse_expr("exp(2*i*z1)", 1).unwrap();
        let d = e.diff(0);
        let pt = [c64(0.3, -0.2)];
        let expect = e.eval(&pt, Precision::P256).unwrap().mul(&c64(0.0, 2.0));
        let got = d.eval(&pt, Precision::P256).unwrap();
        assert!(got.sub(&expect).norm_f64() < 1e-60);
    }

    #[test]
    fn diff_other_variable_is_zero() {
        let e = ExprNode::Var(1);
        assert_eq!(e.diff(0), ExprNode::int(0));
    }

    #[test]
    fn exp_zero_evaluates_to_one() {
        let e = parse_expr("exp(0)", 1).unwrap();
        let v = e.eval(&[c64(5.0, 5.0)], Precision::P256).unwrap();
        assert_eq!(v.re_f64(), 1.0);
        assert_eq!(v.im_f64(), 0.0);
    }

    #[test]
    fn sum_of_vars() {
        let e = parse_expr("z1 + z2", 2).unwrap();
        let v = e
            .eval(&[c64(1.0, 0.0), c64(0.0, 2.0)], Precision::P256)
            .unwrap();
        assert!((v.re_f64() - 1.0).abs() < 1e-15 && (v.im_f64() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn diff_matches_central_difference_on_random_trees() {
        // Finite-difference oracle for the exact derivative, |z| <= 1.
        let cases = [
            ("exp(z1^2 + z2)", 2),
            ("(1+2*i)*z1^3 + exp(z2)*z1", 2),
            ("exp(exp(z1))", 1),
            ("z1*z2 + exp((1/2)*z1)", 2),
            ("i*exp((1/2)*(2*i*z2 + exp(2*i*z1)))", 2),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (text, n) in cases {
            let e = parse_expr(text, n).unwrap();
            for _ in 0..5 {
                let pt: Vec<ComplexF> = (0..n)
                    .map(|_| c64(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
                    .collect();
                for v in 0..n {
                    let d = e.diff(v).eval(&pt, Precision::P256).unwrap();
                    let h = 1e-6;
                    let mut hi = pt.clone();
                    hi[v] = hi[v].add(&c64(h, 0.0));
                    let mut lo = pt.clone();
                    lo[v] = lo[v].sub(&c64(h, 0.0));
                    let fd = e
                        .eval(&hi, Precision::P256)
                        .unwrap()
                        .sub(&e.eval(&lo, Precision::P256).unwrap())
                        .scale_f64(0.5 / h);
                    let scale = d.norm_f64().max(1.0);
                    assert!(
                        d.sub(&fd).norm_f64() / scale < 1e-6,
                        "fd mismatch for {text} wrt z{}",
                        v + 1
                    );
                }
            }
        }
    }
}
