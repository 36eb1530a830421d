//! Construction of explicit entire solutions from a classified partition.
//!
//! Every singleton block with exponent `g_i` contributes an antiderivative
//! term `Int e^{g_i(z_i)} dz_i`; every ridge block contributes `f(l(z))`
//! with `f'(t) = beta e^{G(t)/m}` where the exact root gauge `beta` makes
//! the block's gradient product collapse to `e^{G(l(z))}`. The additive
//! constant of `g` is folded into the first term's exponent, divided by the
//! group size so everything stays Gaussian-rational.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multipoly::{LinearForm, MultiPoly};
use crate::scalar::{GaussianRational, RootScalar};
use crate::structure::{classify, Block, BlockKind, Classification, VariablePartition};

/// One summand `f(l(z))` of a solution, with `f'(t) = gauge * e^{p(t)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionTerm {
    pub ell: LinearForm,
    /// Univariate exponent polynomial `p`.
    pub exponent: MultiPoly,
    pub gauge: RootScalar,
    /// Block size the gauge was built for (`gauge^m * prod A_j = 1`).
    pub group_size: u32,
}

impl SolutionTerm {
    /// Partial derivative coefficient in `z_j`: `A_j * gauge * e^{p(l(z))}`
    /// for `j` in the support, zero otherwise. Returns the rational factor.
    pub fn gradient_coeff(&self, var: usize) -> Option<&GaussianRational> {
        self.ell.coeff(var)
    }

    fn is_linear_representative(&self) -> bool {
        self.exponent.degree() == 0
    }
}

/// A full solution `u = sum of terms`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionForm {
    pub nvars: usize,
    pub terms: Vec<SolutionTerm>,
    /// Index of the term whose exponent absorbed the constant of `g`.
    pub kappa_term: usize,
    /// Canonical solutions have pairwise disjoint supports covering all
    /// variables; matrix-reduced solutions generally do not.
    pub canonical: bool,
}

impl SolutionForm {
    /// Total degree of `u` as a polynomial, when it is one: every exponent
    /// constant means every `f` is linear, so `u` has degree exactly 1.
    pub fn total_degree(&self) -> Option<usize> {
        if self
            .terms
            .iter()
            .all(SolutionTerm::is_linear_representative)
        {
            Some(1)
        } else {
            None
        }
    }

    /// Check the canonical support invariant: disjoint cover of `{1..n}`.
    pub fn supports_partition_vars(&self) -> bool {
        let mut seen = vec![false; self.nvars];
        for t in &self.terms {
            for v in t.ell.support() {
                if seen[v] {
                    return false;
                }
                seen[v] = true;
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Result of running the full forward pipeline on `g`.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub partition: VariablePartition,
    pub classification: Classification,
    /// Present exactly when the classification is solvable.
    pub solution: Option<SolutionForm>,
}

/// Classify `g` and construct the canonical solution when one exists.
pub fn synthesize(g: &MultiPoly) -> Result<Synthesis> {
    let (partition, classification) = classify(g)?;
    let solution = if classification.is_solvable() {
        Some(solution_for_partition(&partition)?)
    } else {
        None
    };
    Ok(Synthesis {
        partition,
        classification,
        solution,
    })
}

/// Build the canonical solution for a fully resolved partition.
pub fn solution_for_partition(part: &VariablePartition) -> Result<SolutionForm> {
    let mut terms = Vec::with_capacity(part.blocks.len());
    for (idx, block) in part.blocks.iter().enumerate() {
        let first = idx == 0;
        let term = match &block.kind {
            BlockKind::Singleton => {
                let var = block.vars[0];
                let mut exponent = block.poly.to_univariate_in(var)?;
                if first && !part.kappa.is_zero() {
                    exponent = exponent.plus_constant(&part.kappa);
                }
                SolutionTerm {
                    ell: LinearForm::single(part.nvars, var)?,
                    exponent,
                    gauge: RootScalar::one(),
                    group_size: 1,
                }
            }
            BlockKind::Group { ell, profile } => {
                let m = block.vars.len() as u32;
                let inv_m = GaussianRational::from_ratio(1, i64::from(m));
                let mut exponent = profile.scale(&inv_m);
                if first && !part.kappa.is_zero() {
                    exponent = exponent.plus_constant(&part.kappa.mul(&inv_m));
                }
                let gauge = RootScalar::new(ell.coeff_product(), m)?;
                SolutionTerm {
                    ell: ell.clone(),
                    exponent,
                    gauge,
                    group_size: m,
                }
            }
            BlockKind::Pending | BlockKind::NotRidge => {
                return Err(Error::PreconditionViolation(format!(
                    "cannot synthesize from a partition with a {} block",
                    block.kind.label()
                )));
            }
        };
        terms.push(term);
    }
    let form = SolutionForm {
        nvars: part.nvars,
        terms,
        kappa_term: 0,
        canonical: true,
    };
    debug_assert!(form.supports_partition_vars());
    Ok(form)
}

/// Alternative partitions obtained by merging two or more affine singleton
/// blocks (each a single nonzero linear monomial) into one ridge group.
/// Results come in deterministic (size, lexicographic) order, at most `cap`
/// of them; the second component reports truncation.
pub fn enumerate_affine_merges(
    part: &VariablePartition,
    cap: usize,
) -> Result<(Vec<VariablePartition>, bool)> {
    if cap == 0 || cap > 32 {
        return Err(Error::PreconditionViolation(
            "affine merge cap must be between 1 and 32".into(),
        ));
    }
    let candidates: Vec<usize> = part
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| {
            matches!(b.kind, BlockKind::Singleton)
                && b.poly.degree() == 1
                && b.poly.num_terms() == 1
        })
        .map(|(i, _)| i)
        .collect();
    let k = candidates.len();
    let total = subsets_of_size_at_least_two(k);
    let truncated = total > cap as u128;
    let mut results = Vec::new();
    'outer: for size in 2..=k {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            if results.len() == cap {
                break 'outer;
            }
            let merged_blocks: Vec<usize> = combo.iter().map(|&c| candidates[c]).collect();
            results.push(merge_blocks(part, &merged_blocks)?);
            if !next_combination(&mut combo, k) {
                break;
            }
        }
    }
    Ok((results, truncated))
}

fn subsets_of_size_at_least_two(k: usize) -> u128 {
    if k < 2 {
        return 0;
    }
    (1u128 << k) - 1 - k as u128
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let size = combo.len();
    let mut i = size;
    while i > 0 {
        i -= 1;
        if combo[i] < n - (size - i) {
            combo[i] += 1;
            for j in (i + 1)..size {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn merge_blocks(part: &VariablePartition, block_indices: &[usize]) -> Result<VariablePartition> {
    let mut vars = Vec::new();
    let mut poly = MultiPoly::zero(part.nvars);
    for &bi in block_indices {
        vars.extend(part.blocks[bi].vars.iter().copied());
        poly = poly.add(&part.blocks[bi].poly)?;
    }
    vars.sort_unstable();
    let (ell, profile) = crate::structure::ridge_detect(&poly, &vars)?.ok_or_else(|| {
        Error::PreconditionViolation("merged affine blocks must form a ridge".into())
    })?;
    let merged = Block {
        vars,
        poly,
        kind: BlockKind::Group { ell, profile },
    };
    let mut blocks: Vec<Block> = part
        .blocks
        .iter()
        .enumerate()
        .filter(|(i, _)| !block_indices.contains(i))
        .map(|(_, b)| b.clone())
        .collect();
    blocks.push(merged);
    blocks.sort_by_key(|b| b.vars[0]);
    Ok(VariablePartition {
        nvars: part.nvars,
        blocks,
        kappa: part.kappa.clone(),
    })
}

/// Structured description of a continuous solution family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyNote {
    pub parameters: Vec<String>,
    pub constraint: String,
    pub description: String,
}

/// Continuous gauge freedom: terms whose exponent is constant are linear
/// representatives `e^{c} z_i` of the family `A_i z_i` constrained only by
/// the product of the `A_i`.
pub fn family_note(s: &SolutionForm) -> Option<FamilyNote> {
    let mut linear_vars = Vec::new();
    let mut constant_sum = GaussianRational::zero();
    for t in &s.terms {
        if t.group_size == 1 && t.is_linear_representative() {
            linear_vars.push(t.ell.anchor());
            constant_sum = constant_sum.add(&t.exponent.constant_term());
        }
    }
    if linear_vars.len() < 2 {
        return None;
    }
    let parameters: Vec<String> = linear_vars.iter().map(|v| format!("A{}", v + 1)).collect();
    let product = parameters.join("*");
    let constraint = if constant_sum.is_zero() {
        format!("{product} = 1")
    } else {
        format!("{product} = exp({constant_sum})")
    };
    let vars_text: Vec<String> = linear_vars.iter().map(|v| format!("z{}", v + 1)).collect();
    let description = format!(
        "the linear terms in {} may be replaced by {} for any nonzero constants \
         satisfying the constraint (plus a free additive constant)",
        vars_text.join(", "),
        linear_vars
            .iter()
            .map(|v| format!("A{0}*z{0}", v + 1))
            .collect::<Vec<_>>()
            .join(" + "),
    );
    Some(FamilyNote {
        parameters,
        constraint,
        description,
    })
}

/// Output style for rendered solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Latex,
}

/// Deterministic human-readable rendering.
///
/// Antiderivative terms print as `Int(exp(p(t)) dt, t = l(z))`; ridge terms
/// print as `f(l(z))` with the side condition `f'(t) = beta*exp(p(t))`.
pub fn render_solution(s: &SolutionForm, format: RenderFormat) -> String {
    match format {
        RenderFormat::Text => render_text(s),
        RenderFormat::Latex => render_latex(s),
    }
}

fn exponent_text(p: &MultiPoly) -> String {
    p.render_with_vars(&|_| "t".to_string())
}

fn linear_term_text(t: &SolutionTerm) -> String {
    // Linear representative exp(c) * l(z).
    let c = t.exponent.constant_term();
    let bare_var = t.ell.len() == 1
        && t.ell
            .coeff(t.ell.anchor())
            .is_some_and(GaussianRational::is_one);
    let ell_text = if bare_var {
        format!("z{}", t.ell.anchor() + 1)
    } else {
        format!("({})", t.ell)
    };
    if c.is_zero() {
        ell_text
    } else {
        format!("exp({c})*{ell_text}")
    }
}

fn render_text(s: &SolutionForm) -> String {
    let group_total = s.terms.iter().filter(|t| t.group_size > 1).count();
    let mut parts = Vec::new();
    let mut conditions = Vec::new();
    let mut group_index = 0usize;
    for t in &s.terms {
        if t.group_size == 1 && t.exponent.degree() == 0 {
            parts.push(linear_term_text(t));
        } else if t.group_size == 1 {
            parts.push(format!(
                "Int(exp({}) dt, t = {})",
                exponent_text(&t.exponent),
                t.ell
            ));
        } else {
            group_index += 1;
            let name = if group_total == 1 {
                "f".to_string()
            } else {
                format!("f_{group_index}")
            };
            parts.push(format!("{name}({})", t.ell));
            let gauge = if t.gauge.is_one() {
                String::new()
            } else {
                format!("{}*", t.gauge)
            };
            conditions.push(format!(
                "{name}'(t) = {gauge}exp({})",
                exponent_text(&t.exponent)
            ));
        }
    }
    let mut out = format!("u = {}", parts.join(" + "));
    for c in conditions {
        out.push_str(", ");
        out.push_str(&c);
    }
    out
}

fn latex_vars(i: usize) -> String {
    format!("z_{{{}}}", i + 1)
}

fn exponent_latex(p: &MultiPoly) -> String {
    p.render_latex(&|_| "t".to_string())
}

fn render_latex(s: &SolutionForm) -> String {
    let group_total = s.terms.iter().filter(|t| t.group_size > 1).count();
    let mut parts = Vec::new();
    let mut conditions = Vec::new();
    let mut group_index = 0usize;
    for t in &s.terms {
        let ell_tex = t.ell.to_poly().render_latex(&latex_vars);
        if t.group_size == 1 && t.exponent.degree() == 0 {
            let c = t.exponent.constant_term();
            let wrapped = if t.ell.len() == 1 {
                ell_tex.clone()
            } else {
                format!("\\left({ell_tex}\\right)")
            };
            if c.is_zero() {
                parts.push(wrapped);
            } else {
                parts.push(format!("e^{{{}}} {wrapped}", c.latex()));
            }
        } else if t.group_size == 1 {
            parts.push(format!(
                "\\int_{{0}}^{{{ell_tex}}} e^{{{}}} \\, dt",
                exponent_latex(&t.exponent)
            ));
        } else {
            group_index += 1;
            let name = if group_total == 1 {
                "f".to_string()
            } else {
                format!("f_{{{group_index}}}")
            };
            parts.push(format!("{name}\\left({ell_tex}\\right)"));
            let gauge = if t.gauge.is_one() {
                String::new()
            } else {
                format!("{} \\cdot ", t.gauge.latex())
            };
            conditions.push(format!(
                "{name}'(t) = {gauge}e^{{{}}}",
                exponent_latex(&t.exponent)
            ));
        }
    }
    let mut out = format!("u = {}", parts.join(" + "));
    for c in conditions {
        out.push_str(", \\quad ");
        out.push_str(&c);
    }
    out
}

impl Serialize for SolutionTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SolutionTerm", 5)?;
        let support: Vec<usize> = self.ell.support().map(|v| v + 1).collect();
        st.serialize_field("support", &support)?;
        st.serialize_field("ell", &self.ell)?;
        let p: Vec<String> = self
            .exponent
            .univariate_coeffs()
            .map_err(serde::ser::Error::custom)?
            .iter()
            .map(|c| c.to_string())
            .collect();
        st.serialize_field("p", &p)?;
        st.serialize_field("beta", &self.gauge)?;
        st.serialize_field("m", &self.group_size)?;
        st.end()
    }
}

impl Serialize for SolutionForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SolutionForm", 4)?;
        st.serialize_field("nvars", &self.nvars)?;
        st.serialize_field("canonical", &self.canonical)?;
        st.serialize_field("kappa_term", &self.kappa_term)?;
        st.serialize_field("terms", &self.terms)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct TermWire {
    #[allow(dead_code)]
    support: Option<Vec<usize>>,
    ell: Vec<(usize, String)>,
    p: Vec<String>,
    beta: RootScalar,
    m: u32,
}

#[derive(Deserialize)]
struct FormWire {
    nvars: usize,
    canonical: Option<bool>,
    kappa_term: Option<usize>,
    terms: Vec<TermWire>,
}

impl<'de> Deserialize<'de> for SolutionForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let wire = FormWire::deserialize(d)?;
        let mut terms = Vec::with_capacity(wire.terms.len());
        for tw in wire.terms {
            let mut coeffs = Vec::with_capacity(tw.ell.len());
            for (var, text) in tw.ell {
                if var == 0 || var > wire.nvars {
                    return Err(D::Error::custom(format!(
                        "term variable index {var} out of range for nvars {}",
                        wire.nvars
                    )));
                }
                let c = crate::parser::parse_scalar(&text).map_err(D::Error::custom)?;
                coeffs.push((var - 1, c));
            }
            let ell = LinearForm::new(wire.nvars, coeffs).map_err(D::Error::custom)?;
            let mut exp_terms = Vec::new();
            for (k, text) in tw.p.iter().enumerate() {
                let c = crate::parser::parse_scalar(text).map_err(D::Error::custom)?;
                exp_terms.push((vec![k as u32], c));
            }
            let exponent = MultiPoly::from_terms(1, exp_terms).map_err(D::Error::custom)?;
            terms.push(SolutionTerm {
                ell,
                exponent,
                gauge: tw.beta,
                group_size: tw.m,
            });
        }
        Ok(SolutionForm {
            nvars: wire.nvars,
            terms,
            kappa_term: wire.kappa_term.unwrap_or(0),
            canonical: wire.canonical.unwrap_or(true),
        })
    }
}
