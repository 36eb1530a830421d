//! Cross-module soundness invariants on randomly synthesized instances.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use holo_eikonal::multipoly::MultiPoly;
use holo_eikonal::reduce::MatrixA;
use holo_eikonal::scalar::Precision;
use holo_eikonal::structure::classify;
use holo_eikonal::synthesize::{enumerate_affine_merges, solution_for_partition, synthesize};
use holo_eikonal::verify::{
    numeric_verify, symbolic_verify, GradientSource, RhsSource, SampleConfig, VerifyMode,
};

use common::{random_rational, random_solvable};

/// Symbolic pass implies numeric residual < 1e-9 at 256 bits, radius 1.
#[test]
fn symbolic_pass_implies_tiny_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let cfg = SampleConfig {
        samples: 25,
        radius: 1.0,
        tol: 1e-9,
        seed: 9,
        precision: Precision::P256,
    };
    for _ in 0..25 {
        let inst = random_solvable(&mut rng);
        let sol = synthesize(&inst.g).unwrap().solution.expect("solvable");
        let sym = symbolic_verify(&sol, &inst.g, VerifyMode::Plain)
            .unwrap()
            .symbolic
            .unwrap();
        assert!(sym.pass);
        let num = numeric_verify(
            GradientSource::Form(&sol),
            RhsSource::Poly(&inst.g),
            inst.nvars,
            &cfg,
        )
        .unwrap()
        .numeric
        .unwrap();
        assert!(
            num.pass && num.max_rel_residual < 1e-9,
            "residual {} for g = {}",
            num.max_rel_residual,
            inst.g
        );
    }
}

/// The root gauge cancels algebraically: `beta^m * prod A_j = 1` exactly.
#[test]
fn gauge_exactness_via_root_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..40 {
        let inst = random_solvable(&mut rng);
        let sol = synthesize(&inst.g).unwrap().solution.expect("solvable");
        for term in &sol.terms {
            if term.group_size <= 1 {
                continue;
            }
            let mut check =
                holo_eikonal::verify::ScalarProduct::from_rational(term.ell.coeff_product());
            check.mul_root_pow(&term.gauge, term.group_size);
            assert!(check.is_one(), "gauge relation left {check}");
        }
    }
}

/// For constant g, every synthesized and enumerated solution is linear.
#[test]
fn constant_rhs_solutions_are_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for n in 2..=5 {
        for _ in 0..5 {
            let g = MultiPoly::constant(n, random_rational(&mut rng));
            let syn = synthesize(&g).unwrap();
            let sol = syn.solution.expect("constant rhs is solvable");
            assert_eq!(sol.total_degree(), Some(1));
            let (merges, _) = enumerate_affine_merges(&syn.partition, 8).unwrap();
            for part in &merges {
                let alt = solution_for_partition(part).unwrap();
                assert_eq!(alt.total_degree(), Some(1));
                let sym = symbolic_verify(&alt, &g, VerifyMode::Plain)
                    .unwrap()
                    .symbolic
                    .unwrap();
                assert!(sym.pass);
            }
        }
    }
}

/// Matrix mode with the identity matrix agrees verdict-for-verdict with
/// plain mode, on passing and failing solutions alike.
#[test]
fn identity_matrix_mode_agrees_with_plain() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for trial in 0..20 {
        let inst = random_solvable(&mut rng);
        let mut sol = synthesize(&inst.g).unwrap().solution.expect("solvable");
        if trial % 2 == 1 {
            // Corrupt every other one to compare failing verdicts too.
            let t = &mut sol.terms[0];
            t.exponent = t
                .exponent
                .plus_constant(&holo_eikonal::GaussianRational::one());
        }
        let a = MatrixA::identity(inst.nvars).unwrap();
        let plain = symbolic_verify(&sol, &inst.g, VerifyMode::Plain)
            .unwrap()
            .symbolic
            .unwrap();
        let matrix = symbolic_verify(&sol, &inst.g, VerifyMode::Matrix(&a))
            .unwrap()
            .symbolic
            .unwrap();
        assert_eq!(plain.pass, matrix.pass);
        assert_eq!(plain.witness, matrix.witness);
    }
}

/// Affine-merge alternatives verify exactly against the original g.
#[test]
fn merged_alternatives_verify() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let mut seen_merges = 0;
    for _ in 0..40 {
        let inst = random_solvable(&mut rng);
        let (part, _) = classify(&inst.g).unwrap();
        let (merges, _) = enumerate_affine_merges(&part, 8).unwrap();
        for merged in &merges {
            let alt = solution_for_partition(merged).unwrap();
            let sym = symbolic_verify(&alt, &inst.g, VerifyMode::Plain)
                .unwrap()
                .symbolic
                .unwrap();
            assert!(sym.pass, "merged alternative failed for g = {}", inst.g);
            seen_merges += 1;
        }
    }
    assert!(
        seen_merges > 0,
        "generator should produce affine singletons"
    );
}

/// Overflow at a sample point is excluded and reported, not fatal.
#[test]
fn overflow_points_are_excluded() {
    // Huge coefficients at 53 bits overflow the complex exponential for
    // some sample points once the exponent is large enough.
    let g = holo_eikonal::parser::parse_poly("100000*z1^4", 1).unwrap();
    let sol = synthesize(&g).unwrap().solution.expect("solvable");
    let cfg = SampleConfig {
        samples: 30,
        radius: 1.0,
        tol: 1e-9,
        seed: 5,
        precision: Precision::P53,
    };
    let report = numeric_verify(GradientSource::Form(&sol), RhsSource::Poly(&g), 1, &cfg).unwrap();
    let stats = report.numeric.unwrap();
    // The residual here is exactly zero by construction (stable path), so
    // the run passes regardless of excluded points.
    assert!(stats.pass);
    assert_eq!(stats.excluded, 0);
    // A corrupted variant actually evaluates the exponentials.
    let mut bad = sol.clone();
    bad.terms[0].exponent = bad.terms[0]
        .exponent
        .plus_constant(&holo_eikonal::GaussianRational::one());
    let report = numeric_verify(GradientSource::Form(&bad), RhsSource::Poly(&g), 1, &cfg).unwrap();
    let stats = report.numeric.unwrap();
    assert!(!stats.pass);
}

/// Deterministic sampling: the same seed yields the same points.
#[test]
fn sampling_is_deterministic() {
    let cfg = SampleConfig::default();
    let a = holo_eikonal::verify::sample_polydisk(3, &cfg);
    let b = holo_eikonal::verify::sample_polydisk(3, &cfg);
    for (pa, pb) in a.iter().zip(&b) {
        for (ca, cb) in pa.iter().zip(pb) {
            assert_eq!(ca.re_f64(), cb.re_f64());
            assert_eq!(ca.im_f64(), cb.im_f64());
        }
    }
}

/// End to end: reducing with the factorization matrix of the quadratic
/// form `u_{z1}^2 + u_{z2}^2 = 1` must produce a `u` whose gradient
/// satisfies that original equation at sample points.
#[test]
fn factorized_quadratic_form_solution_satisfies_it() {
    let a = MatrixA::from_json(r#"[["1","i"],["1","-i"]]"#).unwrap();
    let g = MultiPoly::zero(2);
    let red = holo_eikonal::reduce::reduce_solve_backsub(&a, &g).unwrap();
    let sol = red.solution.unwrap();
    let comps = holo_eikonal::verify::gradient_closed_form(&sol).unwrap();
    let cfg = SampleConfig {
        samples: 20,
        radius: 1.0,
        tol: 1e-9,
        seed: 17,
        precision: Precision::P256,
    };
    for point in holo_eikonal::verify::sample_polydisk(2, &cfg) {
        let ux = comps[0].eval(&point, Precision::P256).unwrap();
        let uy = comps[1].eval(&point, Precision::P256).unwrap();
        let sum = ux.mul(&ux).add(&uy.mul(&uy));
        let one = holo_eikonal::ComplexF::one(Precision::P256);
        assert!(
            sum.sub(&one).norm_f64() < 1e-60,
            "gradient squares must sum to 1"
        );
    }
}
