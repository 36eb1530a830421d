//! Shared generators and independent oracles for the integration suites.

// Each test target compiles this module separately; not every target uses
// every helper.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use holo_eikonal::multipoly::{LinearForm, MultiPoly};
use holo_eikonal::reduce::MatrixA;
use holo_eikonal::scalar::GaussianRational;

pub fn random_rational(rng: &mut ChaCha8Rng) -> GaussianRational {
    GaussianRational::from_parts(
        rng.gen_range(-3i64..=3),
        rng.gen_range(1i64..=2),
        rng.gen_range(-2i64..=2),
        1,
    )
}

pub fn random_nonzero_rational(rng: &mut ChaCha8Rng) -> GaussianRational {
    loop {
        let c = random_rational(rng);
        if !c.is_zero() {
            return c;
        }
    }
}

/// One generated block of a solvable instance.
pub struct GenBlock {
    pub vars: Vec<usize>,
    pub poly: MultiPoly,
    pub is_group: bool,
}

/// A generated solvable instance with its expected finest partition.
pub struct GenInstance {
    pub nvars: usize,
    pub g: MultiPoly,
    pub kappa: GaussianRational,
    pub blocks: Vec<GenBlock>,
}

/// Random univariate polynomial in `t` with terms of degree `lo..=hi` and a
/// nonzero leading coefficient of degree exactly `hi`.
fn random_profile(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> MultiPoly {
    let mut terms = Vec::new();
    for k in lo..hi {
        let c = random_rational(rng);
        if !c.is_zero() {
            terms.push((vec![k], c));
        }
    }
    terms.push((vec![hi], random_nonzero_rational(rng)));
    MultiPoly::from_terms(1, terms).unwrap()
}

/// Instance built as a sum of univariate singleton polynomials (degree <= 4,
/// zero constant term) and ridge groups `G(l)` with profile degree 2..=4,
/// nonzero coefficients, and group size 2..=4, plus a global constant.
pub fn random_solvable(rng: &mut ChaCha8Rng) -> GenInstance {
    let n = rng.gen_range(2usize..=6);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut blocks = Vec::new();
    let mut rest = order.as_slice();
    while !rest.is_empty() {
        let group_possible = rest.len() >= 2;
        if group_possible && rng.gen_bool(0.5) {
            let size = rng.gen_range(2..=rest.len().min(4));
            let mut vars: Vec<usize> = rest[..size].to_vec();
            rest = &rest[size..];
            vars.sort_unstable();
            let deg = rng.gen_range(2..=4);
            let profile = random_profile(rng, 1, deg);
            let coeffs: Vec<(usize, GaussianRational)> = vars
                .iter()
                .map(|&v| (v, random_nonzero_rational(rng)))
                .collect();
            let ell = LinearForm::new(n, coeffs).unwrap();
            let poly = MultiPoly::compose_linear(&profile, &ell).unwrap();
            blocks.push(GenBlock {
                vars,
                poly,
                is_group: true,
            });
        } else {
            let var = rest[0];
            rest = &rest[1..];
            let deg = rng.gen_range(0u32..=4);
            let poly = if deg == 0 {
                MultiPoly::zero(n)
            } else {
                let mut terms = Vec::new();
                for k in 1..deg {
                    let c = random_rational(rng);
                    if !c.is_zero() {
                        let mut exps = vec![0u32; n];
                        exps[var] = k;
                        terms.push((exps, c));
                    }
                }
                let mut exps = vec![0u32; n];
                exps[var] = deg;
                terms.push((exps, random_nonzero_rational(rng)));
                MultiPoly::from_terms(n, terms).unwrap()
            };
            blocks.push(GenBlock {
                vars: vec![var],
                poly,
                is_group: false,
            });
        }
    }
    blocks.sort_by_key(|b| b.vars[0]);
    let kappa = if rng.gen_bool(0.5) {
        random_rational(rng)
    } else {
        GaussianRational::zero()
    };
    let mut g = MultiPoly::constant(n, kappa.clone());
    for b in &blocks {
        g = g.add(&b.poly).unwrap();
    }
    GenInstance {
        nvars: n,
        g,
        kappa,
        blocks,
    }
}

/// Independent coefficient-matching oracle: a ridge polynomial has a rank-1
/// Hessian, so any nonzero 2x2 Hessian minor certifies that the block is
/// not a ridge.
pub fn hessian_minor_certifies_nonridge(h: &MultiPoly, vars: &[usize]) -> bool {
    for (ai, &i) in vars.iter().enumerate() {
        for &j in &vars[ai + 1..] {
            let hii = h.mixed_partial(i, i);
            let hjj = h.mixed_partial(j, j);
            let hij = h.mixed_partial(i, j);
            let minor = hii.mul(&hjj).unwrap().sub(&hij.mul(&hij).unwrap()).unwrap();
            if !minor.is_zero() {
                return true;
            }
        }
    }
    false
}

/// Test-local union-find over monomial co-occurrence, independent of the
/// engine's interaction-graph route.
pub fn cooccurrence_component(g: &MultiPoly, start: usize) -> Vec<usize> {
    let n = g.nvars();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for (mono, _) in g.terms() {
        let support: Vec<usize> = mono.support().collect();
        for w in support.windows(2) {
            let a = find(&mut parent, w[0]);
            let b = find(&mut parent, w[1]);
            if a != b {
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, start);
    (0..n).filter(|&v| find(&mut parent, v) == root).collect()
}

/// `g` with a multi-variable block certified (by the Hessian oracle) not to
/// be a ridge; returns the expected witness variables, sorted.
pub fn random_nonridge(rng: &mut ChaCha8Rng) -> (MultiPoly, Vec<usize>) {
    loop {
        let inst = random_solvable(rng);
        let n = inst.nvars;
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n);
        while v == u {
            v = rng.gen_range(0..n);
        }
        let a = rng.gen_range(1u32..=3);
        let b = rng.gen_range(1u32..=3);
        let mut exps = vec![0u32; n];
        exps[u] = a;
        exps[v] = b;
        let cross = MultiPoly::from_terms(n, [(exps, random_nonzero_rational(rng))]).unwrap();
        let g = match inst.g.add(&cross) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let comp = cooccurrence_component(&g, u);
        if comp.len() < 2 {
            continue;
        }
        let mut block = MultiPoly::zero(n);
        for (mono, coeff) in g.terms() {
            let support: Vec<usize> = mono.support().collect();
            if !support.is_empty() && support.iter().all(|s| comp.contains(s)) {
                block = block
                    .add(
                        &MultiPoly::from_terms(n, [(mono.exponents().to_vec(), coeff.clone())])
                            .unwrap(),
                    )
                    .unwrap();
            }
        }
        if hessian_minor_certifies_nonridge(&block, &comp) {
            return (g, comp);
        }
    }
}

/// Random matrix with entries in {-2..2} + {-1..1} i, resampled until
/// invertible.
pub fn random_invertible_matrix(rng: &mut ChaCha8Rng, n: usize) -> MatrixA {
    loop {
        let rows: Vec<Vec<GaussianRational>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        GaussianRational::from_parts(
                            rng.gen_range(-2i64..=2),
                            1,
                            rng.gen_range(-1i64..=1),
                            1,
                        )
                    })
                    .collect()
            })
            .collect();
        let a = MatrixA::new(rows).unwrap();
        if !a.is_singular() {
            return a;
        }
    }
}

/// A parsed Table 1 fixture.
pub struct Fixture {
    pub name: String,
    pub nvars: usize,
    pub g_text: String,
    pub case: String,
    /// (1-based variable list, kind) per block, in file order.
    pub blocks: Vec<(Vec<usize>, String)>,
}

pub fn parse_fixture(text: &str) -> Fixture {
    let mut name = String::new();
    let mut nvars = 0usize;
    let mut g_text = String::new();
    let mut case = String::new();
    let mut blocks = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').expect("fixture line is key = value");
        let key = key.trim();
        let value = value.trim();
        match key {
            "name" => name = value.to_string(),
            "nvars" => nvars = value.parse().expect("nvars"),
            "g" => g_text = value.to_string(),
            "case" => case = value.to_string(),
            "blocks" => {
                for entry in value.split(';') {
                    let (vars, kind) = entry.trim().split_once(':').expect("vars:kind");
                    let vars: Vec<usize> = vars
                        .split(',')
                        .map(|v| v.trim().parse().expect("variable index"))
                        .collect();
                    blocks.push((vars, kind.trim().to_string()));
                }
            }
            other => panic!("unknown fixture key `{other}`"),
        }
    }
    Fixture {
        name,
        nvars,
        g_text,
        case,
        blocks,
    }
}

pub fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures/table1")
        .canonicalize()
        .expect("fixtures/table1 exists")
}

pub fn load_table1_fixtures() -> Vec<Fixture> {
    let mut out = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(fixture_dir())
        .expect("fixture dir")
        .map(|e| e.expect("dir entry").path())
        .collect();
    entries.sort();
    for path in entries {
        if path.extension().is_some_and(|e| e == "txt") {
            out.push(parse_fixture(
                &std::fs::read_to_string(&path).expect("fixture readable"),
            ));
        }
    }
    assert_eq!(out.len(), 5, "five fixtures expected");
    out
}
