//! Recursive-descent parser for polynomial and expression input.
//!
//! Grammar (whitespace-insensitive, `#` starts a line comment):
//!
//! ```text
//! expr     := ['-'] term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' exponent)?
//! exponent := nonneg-int | '(' ['+'|'-'] nonneg-int ')'
//! base     := number | 'i' | var | '(' expr ')' | 'exp' '(' expr ')'
//! var      := 'z' positive-int
//! number   := int ('/' posint)?
//! ```
//!
//! Implicit multiplication is not allowed. `parse_poly` uses the same
//! grammar but classifies `exp(...)` and negative exponents as
//! `NonPolynomial`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::expr::{ExprNode, MAX_EXPR_DEPTH};
use crate::multipoly::{MultiPoly, MAX_VARS};
use crate::scalar::GaussianRational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'+' => {
                out.push(Token {
                    tok: Tok::Plus,
                    pos: i,
                });
                i += 1;
            }
            b'-' => {
                out.push(Token {
                    tok: Tok::Minus,
                    pos: i,
                });
                i += 1;
            }
            b'*' => {
                out.push(Token {
                    tok: Tok::Star,
                    pos: i,
                });
                i += 1;
            }
            b'/' => {
                out.push(Token {
                    tok: Tok::Slash,
                    pos: i,
                });
                i += 1;
            }
            b'^' => {
                out.push(Token {
                    tok: Tok::Caret,
                    pos: i,
                });
                i += 1;
            }
            b'(' => {
                out.push(Token {
                    tok: Tok::LParen,
                    pos: i,
                });
                i += 1;
            }
            b')' => {
                out.push(Token {
                    tok: Tok::RParen,
                    pos: i,
                });
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let value: BigInt = text.parse().expect("digit run parses");
                out.push(Token {
                    tok: Tok::Int(value),
                    pos: start,
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    pos: start,
                });
            }
            _ => {
                return Err(Error::SyntaxError {
                    position: i,
                    expected: format!("a token, found byte {:?}", b as char),
                });
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: bytes.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    nvars: usize,
    allow_exp: bool,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.idx]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx + 1 < self.tokens.len() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(Error::SyntaxError {
                position: self.peek().pos,
                expected: what.to_string(),
            })
        }
    }

    fn check_depth(&self, depth: usize, pos: usize) -> Result<()> {
        if depth > MAX_EXPR_DEPTH {
            return Err(Error::SyntaxError {
                position: pos,
                expected: format!("expression nesting no deeper than {MAX_EXPR_DEPTH}"),
            });
        }
        Ok(())
    }

    fn parse_expr(&mut self, depth: usize) -> Result<ExprNode> {
        self.check_depth(depth, self.peek().pos)?;
        let mut terms = Vec::new();
        let negate_first = if self.peek().tok == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let first = self.parse_term(depth + 1)?;
        terms.push(if negate_first {
            ExprNode::product(vec![ExprNode::int(-1), first])
        } else {
            first
        });
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.parse_term(depth + 1)?);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.parse_term(depth + 1)?;
                    terms.push(ExprNode::product(vec![ExprNode::int(-1), t]));
                }
                _ => break,
            }
        }
        Ok(ExprNode::sum(terms))
    }

    fn parse_term(&mut self, depth: usize) -> Result<ExprNode> {
        self.check_depth(depth, self.peek().pos)?;
        let mut factors = vec![self.parse_factor(depth + 1)?];
        while self.peek().tok == Tok::Star {
            self.bump();
            factors.push(self.parse_factor(depth + 1)?);
        }
        Ok(ExprNode::product(factors))
    }

    fn parse_factor(&mut self, depth: usize) -> Result<ExprNode> {
        self.check_depth(depth, self.peek().pos)?;
        let base = self.parse_base(depth + 1)?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let (value, pos, negative) = self.parse_exponent()?;
        if negative {
            return Err(Error::NonPolynomial {
                position: pos,
                reason: "negative exponent".into(),
            });
        }
        let k = value.to_u32().ok_or(Error::DegreeCapExceeded {
            degree: usize::MAX,
            cap: crate::multipoly::DEGREE_CAP,
        })?;
        Ok(ExprNode::IntPow(Box::new(base), k))
    }

    /// Integer exponent, optionally parenthesized and signed.
    fn parse_exponent(&mut self) -> Result<(BigInt, usize, bool)> {
        let t = self.bump();
        match t.tok {
            Tok::Int(v) => Ok((v, t.pos, false)),
            Tok::LParen => {
                let mut negative = false;
                let mut t2 = self.bump();
                if t2.tok == Tok::Minus {
                    negative = true;
                    t2 = self.bump();
                } else if t2.tok == Tok::Plus {
                    t2 = self.bump();
                }
                let value = match t2.tok {
                    Tok::Int(v) => v,
                    _ => {
                        return Err(Error::SyntaxError {
                            position: t2.pos,
                            expected: "an integer exponent".into(),
                        })
                    }
                };
                self.expect(Tok::RParen, "`)` after exponent")?;
                Ok((value, t.pos, negative))
            }
            _ => Err(Error::SyntaxError {
                position: t.pos,
                expected: "a nonnegative integer exponent".into(),
            }),
        }
    }

    fn parse_base(&mut self, depth: usize) -> Result<ExprNode> {
        self.check_depth(depth, self.peek().pos)?;
        let t = self.bump();
        match t.tok {
            Tok::Int(num) => {
                // number := int ('/' posint)?
                if self.peek().tok == Tok::Slash {
                    self.bump();
                    let dt = self.bump();
                    let den = match dt.tok {
                        Tok::Int(v) => v,
                        _ => {
                            return Err(Error::SyntaxError {
                                position: dt.pos,
                                expected: "a positive denominator".into(),
                            })
                        }
                    };
                    if den.is_zero() {
                        return Err(Error::SyntaxError {
                            position: dt.pos,
                            expected: "a nonzero denominator".into(),
                        });
                    }
                    Ok(ExprNode::Const(GaussianRational::new(
                        BigRational::new(num, den),
                        BigRational::zero(),
                    )))
                } else {
                    Ok(ExprNode::Const(GaussianRational::new(
                        BigRational::from_integer(num),
                        BigRational::zero(),
                    )))
                }
            }
            Tok::Ident(name) => self.parse_ident(name, t.pos, depth),
            Tok::LParen => {
                let inner = self.parse_expr(depth + 1)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(Error::SyntaxError {
                position: t.pos,
                expected: "a number, `i`, a variable, or `(`".into(),
            }),
        }
    }

    fn parse_ident(&mut self, name: String, pos: usize, depth: usize) -> Result<ExprNode> {
        if name == "i" {
            return Ok(ExprNode::Const(GaussianRational::i()));
        }
        if name == "exp" {
            if !self.allow_exp {
                return Err(Error::NonPolynomial {
                    position: pos,
                    reason: "exp(...) is not allowed in a polynomial".into(),
                });
            }
            self.expect(Tok::LParen, "`(` after exp")?;
            let inner = self.parse_expr(depth + 1)?;
            self.expect(Tok::RParen, "`)` after exp argument")?;
            return Ok(ExprNode::exp(inner));
        }
        if let Some(digits) = name.strip_prefix('z') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits.parse().map_err(|_| Error::SyntaxError {
                    position: pos,
                    expected: "a variable index that fits in usize".into(),
                })?;
                if index == 0 {
                    return Err(Error::SyntaxError {
                        position: pos,
                        expected: "variable indices start at z1".into(),
                    });
                }
                if index > self.nvars {
                    return Err(Error::UnknownVariable {
                        name,
                        position: pos,
                        nvars: self.nvars,
                    });
                }
                return Ok(ExprNode::Var(index - 1));
            }
        }
        Err(Error::SyntaxError {
            position: pos,
            expected: format!("`i`, `exp`, or a variable like z1 (found `{name}`)"),
        })
    }
}

fn parse(text: &str, nvars: usize, allow_exp: bool) -> Result<ExprNode> {
    if nvars > MAX_VARS {
        return Err(Error::InvalidInput(format!(
            "nvars {nvars} exceeds the supported maximum {MAX_VARS}"
        )));
    }
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        idx: 0,
        nvars,
        allow_exp,
    };
    let node = parser.parse_expr(0)?;
    if parser.peek().tok != Tok::Eof {
        return Err(Error::SyntaxError {
            position: parser.peek().pos,
            expected: "end of input".into(),
        });
    }
    Ok(node)
}

/// Parse an expression that may contain `exp(...)`.
pub fn parse_expr(text: &str, nvars: usize) -> Result<ExprNode> {
    parse(text, nvars, true)
}

/// Parse a polynomial; `exp(...)` and negative exponents are `NonPolynomial`.
pub fn parse_poly(text: &str, nvars: usize) -> Result<MultiPoly> {
    let ast = parse(text, nvars, false)?;
    lower_poly(&ast, nvars)
}

/// Parse a constant scalar in the same grammar (no variables allowed).
pub fn parse_scalar(text: &str) -> Result<GaussianRational> {
    let p = parse_poly(text, 0)?;
    Ok(p.constant_term())
}

fn lower_poly(node: &ExprNode, nvars: usize) -> Result<MultiPoly> {
    match node {
        ExprNode::Const(c) => Ok(MultiPoly::constant(nvars, c.clone())),
        ExprNode::Var(v) => MultiPoly::variable(nvars, *v),
        ExprNode::Sum(cs) => {
            let mut acc = MultiPoly::zero(nvars);
            for c in cs {
                acc = acc.add(&lower_poly(c, nvars)?)?;
            }
            Ok(acc)
        }
        ExprNode::Product(cs) => {
            let mut acc = MultiPoly::constant(nvars, GaussianRational::one());
            for c in cs {
                acc = acc.mul(&lower_poly(c, nvars)?)?;
            }
            Ok(acc)
        }
        ExprNode::IntPow(c, k) => lower_poly(c, nvars)?.pow(*k),
        ExprNode::Exp(_) => Err(Error::NonPolynomial {
            position: 0,
            reason: "exp(...) is not allowed in a polynomial".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ComplexF, Precision};

    #[test]
    fn three_term_poly() {
        let g = parse_poly("z1*z2 + z3^2 + 5", 3).unwrap();
        assert_eq!(g.num_terms(), 3);
        assert_eq!(g.degree(), 2);
    }

    #[test]
    fn complex_coefficient() {
        let g = parse_poly("(1+2*i)*z1^3", 1).unwrap();
        assert_eq!(g.num_terms(), 1);
        let (_, c) = g.leading().unwrap();
        assert_eq!(*c, GaussianRational::from_parts(1, 1, 2, 1));
    }

    #[test]
    fn negative_exponent_is_nonpolynomial() {
        match parse_poly("z1^(-1)", 1) {
            Err(Error::NonPolynomial { reason, .. }) => {
                assert!(reason.contains("negative exponent"))
            }
            other => panic!("expected NonPolynomial, got {other:?}"),
        }
    }

    #[test]
    fn exp_rejected_in_poly_mode() {
        match parse_poly("exp(z1)", 1) {
            Err(Error::NonPolynomial { reason, .. }) => assert!(reason.contains("exp")),
            other => panic!("expected NonPolynomial, got {other:?}"),
        }
    }

    #[test]
    fn unknown_variable() {
        match parse_poly("z1 + z3", 2) {
            Err(Error::UnknownVariable { name, nvars, .. }) => {
                assert_eq!(name, "z3");
                assert_eq!(nvars, 2);
            }
            other => panic!("expected UnknownVariable, got {other:?}"),
        }
    }

    #[test]
    fn example_counterexample_expression_parses() {
        let u = parse_expr("i*exp((1/2)*(2*i*z2 + exp(2*i*z1)))", 2).unwrap();
        // u(0,0) = i * e^(1/2); oracle: exp evaluated independently.
        let z = ComplexF::zero(Precision::P256);
        let v = u.eval(&[z.clone(), z], Precision::P256).unwrap();
        let half = ComplexF::from_f64(0.5, 0.0, Precision::P256);
        let oracle = half.exp();
        assert!(v.re_f64().abs() < 1e-70);
        assert!((v.im_f64() - oracle.re_f64()).abs() < 1e-15);
        assert!((v.im_f64() - 1.6487212707001282).abs() < 1e-15);
    }

    #[test]
    fn comments_and_whitespace() {
        let g = parse_poly("# leading comment\n z1 \t+ 2 # trailing\n", 1).unwrap();
        assert_eq!(g.to_string(), "z1 + 2");
    }

    #[test]
    fn implicit_multiplication_rejected() {
        assert!(matches!(
            parse_poly("2z1", 1),
            Err(Error::SyntaxError { .. })
        ));
    }

    #[test]
    fn division_only_in_numbers() {
        assert!(parse_poly("1/2", 1).is_ok());
        assert!(matches!(
            parse_poly("z1/2", 1),
            Err(Error::SyntaxError { .. })
        ));
        assert!(matches!(
            parse_poly("1/0", 1),
            Err(Error::SyntaxError { .. })
        ));
    }

    #[test]
    fn scalar_grammar() {
        assert_eq!(parse_scalar("-1").unwrap(), GaussianRational::from_int(-1));
        assert_eq!(parse_scalar("-i").unwrap(), GaussianRational::i().neg());
        assert_eq!(
            parse_scalar("(1/2+2/3*i)").unwrap(),
            GaussianRational::from_parts(1, 2, 2, 3)
        );
        assert!(matches!(
            parse_scalar("z1"),
            Err(Error::UnknownVariable { .. })
        ));
    }
}
