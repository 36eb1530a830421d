//! Variable-interaction analysis: the finest additive decomposition of `g`
//! and ridge detection for each multi-variable block.
//!
//! Two variables interact when the mixed partial of `g` is not identically
//! zero; connected components of that relation are the blocks. A block on
//! two or more variables admits entire solutions exactly when its polynomial
//! is a ridge `G(A_1 z_{k_1} + ... + A_m z_{k_m})`, which is detected through
//! exact constant-proportionality of first partials.
//!
//! The interaction structure is computed on `g`, not on a solution `u`: in
//! every synthesized solution the gradient components are exponentials of
//! the block exponents, so the mixed partials of `u` vanish exactly where
//! those of `g` do, except in affine-degenerate blocks (a constant
//! derivative `f'` makes `u`'s mixed partials vanish inside a group). Those
//! degenerate configurations are surfaced as alternative representations by
//! the affine-merge enumeration instead of being folded into one canonical
//! partition.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::multipoly::{LinearForm, MultiPoly};
use crate::scalar::GaussianRational;

/// Graph on variable indices with an edge where the mixed partial is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionGraph {
    nvars: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl InteractionGraph {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Edges as ordered pairs `(i, j)` with `i < j`, zero-based.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges.contains(&key)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Edge `{i, j}` present iff the exact mixed partial of `g` is nonzero.
pub fn interaction_graph(g: &MultiPoly) -> InteractionGraph {
    let n = g.nvars();
    let mut edges = BTreeSet::new();
    for i in 0..n {
        let di = g.partial_derivative(i);
        if di.is_zero() {
            continue;
        }
        for j in (i + 1)..n {
            if !di.partial_derivative(j).is_zero() {
                edges.insert((i, j));
            }
        }
    }
    InteractionGraph { nvars: n, edges }
}

/// Independent route to the same relation: two variables are related iff
/// some monomial of `g` contains both.
pub fn monomial_cooccurrence(g: &MultiPoly) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for (mono, _) in g.terms() {
        let support: Vec<usize> = mono.support().collect();
        for a in 0..support.len() {
            for b in (a + 1)..support.len() {
                edges.insert((support[a], support[b]));
            }
        }
    }
    edges
}

/// How a block participates in the solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// Not yet resolved (state after `additive_split`).
    Pending,
    /// One variable; solution term is an antiderivative of `e^{g_i}`.
    Singleton,
    /// Ridge block `G(l(z))` with anchored linear form and univariate profile.
    Group { ell: LinearForm, profile: MultiPoly },
    /// Multi-variable block that is not a ridge; witnesses nonexistence.
    NotRidge,
}

impl BlockKind {
    pub fn label(&self) -> &'static str {
        match self {
            BlockKind::Pending => "pending",
            BlockKind::Singleton => "singleton",
            BlockKind::Group { .. } => "group",
            BlockKind::NotRidge => "not_ridge",
        }
    }
}

/// One block of the additive decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Zero-based variable indices, sorted ascending.
    pub vars: Vec<usize>,
    /// Sum of the monomials of `g` supported on this block (zero constant).
    pub poly: MultiPoly,
    pub kind: BlockKind,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self.vars.iter().map(|v| format!("z{}", v + 1)).collect();
        write!(f, "{{{}}}: {}", vars.join(", "), self.poly)
    }
}

/// The additive decomposition `g = sum(blocks) + kappa`, blocks pairwise
/// disjoint with union `{1..n}`, ordered by least variable index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariablePartition {
    pub nvars: usize,
    pub blocks: Vec<Block>,
    /// Leftover additive constant of `g`.
    pub kappa: GaussianRational,
}

impl VariablePartition {
    /// Indices of singleton blocks' variables (the set J), zero-based.
    pub fn singleton_vars(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| b.vars.len() == 1)
            .map(|b| b.vars[0])
            .collect()
    }

    /// Complement of J (the set chi), zero-based.
    pub fn interacting_vars(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| b.vars.len() > 1)
            .flat_map(|b| b.vars.iter().copied())
            .collect()
    }

    /// Exact reconstruction `sum(block polys) + kappa`.
    pub fn reconstruct(&self) -> Result<MultiPoly> {
        let mut acc = MultiPoly::constant(self.nvars, self.kappa.clone());
        for b in &self.blocks {
            acc = acc.add(&b.poly)?;
        }
        Ok(acc)
    }

    pub fn group_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.vars.len() > 1).count()
    }

    pub fn singleton_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.vars.len() == 1).count()
    }
}

/// Case tag for a solvable input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// Every block is a singleton.
    A,
    /// No block is a singleton; `groups` ridge groups.
    B { groups: usize },
    /// Mixed: `singletons` singleton blocks and `groups` ridge groups.
    C { singletons: usize, groups: usize },
}

impl CaseTag {
    pub fn label(&self) -> &'static str {
        match self {
            CaseTag::A => "a",
            CaseTag::B { .. } => "b",
            CaseTag::C { .. } => "c",
        }
    }
}

/// Outcome of classification: either a case tag or a nonexistence witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Solvable(CaseTag),
    NoEntireSolution { witness: Block, detail: String },
}

impl Classification {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Classification::Solvable(_))
    }
}

/// Finest additive decomposition: connected components of the interaction
/// graph, with variables absent from `g` as zero singleton blocks and the
/// constant term carried as `kappa`. Block kinds are left `Pending`.
pub fn additive_split(g: &MultiPoly) -> VariablePartition {
    let n = g.nvars();
    let graph = interaction_graph(g);
    let mut dsu = Dsu::new(n);
    for (i, j) in graph.edges() {
        dsu.union(i, j);
    }
    // Component id -> sorted members, ordered by least member.
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut comp_of_root = vec![usize::MAX; n];
    for v in 0..n {
        let r = dsu.find(v);
        if comp_of_root[r] == usize::MAX {
            comp_of_root[r] = components.len();
            components.push(Vec::new());
        }
        components[comp_of_root[r]].push(v);
    }
    // Assign every non-constant monomial to the component of its first var.
    let mut polys: Vec<MultiPoly> = components.iter().map(|_| MultiPoly::zero(n)).collect();
    for (mono, coeff) in g.terms() {
        let Some(first) = mono.support().next() else {
            continue; // constant term -> kappa
        };
        let c = comp_of_root[dsu.find(first)];
        let single = MultiPoly::from_terms(n, [(mono.exponents().to_vec(), coeff.clone())])
            .expect("existing term respects caps");
        polys[c] = polys[c].add(&single).expect("subset of g respects caps");
    }
    let blocks: Vec<Block> = components
        .into_iter()
        .zip(polys)
        .map(|(vars, poly)| Block {
            vars,
            poly,
            kind: BlockKind::Pending,
        })
        .collect();
    VariablePartition {
        nvars: n,
        blocks,
        kappa: g.constant_term(),
    }
}

/// Detect ridge structure `h = G(l(z))` on the given block.
///
/// The linear form is anchored (coefficient 1 at the least variable), the
/// profile is recovered by restricting `h` to the anchor axis, and the
/// composition is re-verified exactly before returning.
pub fn ridge_detect(h: &MultiPoly, vars: &[usize]) -> Result<Option<(LinearForm, MultiPoly)>> {
    if vars.len() < 2 {
        return Err(Error::PreconditionViolation(
            "ridge detection requires a block of at least two variables".into(),
        ));
    }
    let used = h.vars_used();
    if used != vars {
        return Err(Error::PreconditionViolation(format!(
            "block polynomial must depend on exactly the block variables (uses {:?}, block {:?})",
            used.iter().map(|v| v + 1).collect::<Vec<_>>(),
            vars.iter().map(|v| v + 1).collect::<Vec<_>>(),
        )));
    }
    let anchor = vars[0];
    let d_anchor = h.partial_derivative(anchor);
    let mut coeffs: Vec<(usize, GaussianRational)> = Vec::with_capacity(vars.len());
    for &j in vars {
        if j == anchor {
            coeffs.push((j, GaussianRational::one()));
            continue;
        }
        match MultiPoly::const_ratio(&h.partial_derivative(j), &d_anchor)? {
            Some(c) => {
                debug_assert!(!c.is_zero(), "block depends on every variable");
                coeffs.push((j, c));
            }
            None => return Ok(None),
        }
    }
    let ell = LinearForm::new(h.nvars(), coeffs)?;
    // Profile = restriction of h to the anchor axis (other variables at 0).
    let mut axis = MultiPoly::zero(h.nvars());
    for (mono, coeff) in h.terms() {
        if mono.support().all(|v| v == anchor) {
            axis = axis.add(&MultiPoly::from_terms(
                h.nvars(),
                [(mono.exponents().to_vec(), coeff.clone())],
            )?)?;
        }
    }
    let profile = axis.to_univariate_in(anchor)?;
    if MultiPoly::compose_linear(&profile, &ell)? == *h {
        Ok(Some((ell, profile)))
    } else {
        Ok(None)
    }
}

/// Run the full classification: additive split, ridge detection per block,
/// and the case tag (or a nonexistence witness).
pub fn classify(g: &MultiPoly) -> Result<(VariablePartition, Classification)> {
    let mut part = additive_split(g);
    let mut witness: Option<Block> = None;
    for block in &mut part.blocks {
        if block.vars.len() == 1 {
            block.kind = BlockKind::Singleton;
            continue;
        }
        match ridge_detect(&block.poly, &block.vars)? {
            Some((ell, profile)) => {
                block.kind = BlockKind::Group { ell, profile };
            }
            None => {
                block.kind = BlockKind::NotRidge;
                if witness.is_none() {
                    witness = Some(block.clone());
                }
            }
        }
    }
    let classification = match witness {
        Some(block) => {
            let detail = format!(
                "variables {{{}}} interact but their polynomial {} is not a function of a \
                 single linear form, so the gradient components cannot be proportional \
                 exponentials",
                block
                    .vars
                    .iter()
                    .map(|v| format!("z{}", v + 1))
                    .collect::<Vec<_>>()
                    .join(", "),
                block.poly
            );
            Classification::NoEntireSolution {
                witness: block,
                detail,
            }
        }
        None => {
            let singletons = part.singleton_count();
            let groups = part.group_count();
            let tag = if groups == 0 {
                CaseTag::A
            } else if singletons == 0 {
                CaseTag::B { groups }
            } else {
                CaseTag::C { singletons, groups }
            };
            Classification::Solvable(tag)
        }
    };
    Ok((part, classification))
}

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let mut a = self.find(a);
        let mut b = self.find(b);
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}
