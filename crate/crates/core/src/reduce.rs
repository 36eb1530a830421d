//! Matrix-form reduction: solve `prod_i (row_i A . grad u) = e^g` for an
//! invertible coefficient matrix `A` by the exact change of variables
//! `z = A^T w`, delegation to the product-form solver, and exact
//! back-substitution of every solution term.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::multipoly::MultiPoly;
use crate::scalar::GaussianRational;
use crate::structure::{Classification, VariablePartition};
use crate::synthesize::{synthesize, SolutionForm, SolutionTerm};

/// Square coefficient matrix over the Gaussian rationals with a cached
/// exact determinant.
#[derive(Debug)]
pub struct MatrixA {
    n: usize,
    rows: Vec<Vec<GaussianRational>>,
    det: OnceLock<GaussianRational>,
}

impl Clone for MatrixA {
    fn clone(&self) -> Self {
        let det = OnceLock::new();
        if let Some(d) = self.det.get() {
            let _ = det.set(d.clone());
        }
        MatrixA {
            n: self.n,
            rows: self.rows.clone(),
            det,
        }
    }
}

impl PartialEq for MatrixA {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.rows == other.rows
    }
}

impl MatrixA {
    pub fn new(rows: Vec<Vec<GaussianRational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("matrix must be nonempty".into()));
        }
        if n > crate::multipoly::MAX_VARS {
            return Err(Error::InvalidInput(format!(
                "matrix size {n} exceeds the supported maximum {}",
                crate::multipoly::MAX_VARS
            )));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        Ok(MatrixA {
            n,
            rows,
            det: OnceLock::new(),
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            GaussianRational::one()
                        } else {
                            GaussianRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    /// Parse from a JSON array of arrays of scalar strings.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<Vec<String>> = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("matrix JSON: {e}")))?;
        let mut rows = Vec::with_capacity(raw.len());
        for row in raw {
            let mut out = Vec::with_capacity(row.len());
            for cell in row {
                out.push(crate::parser::parse_scalar(&cell)?);
            }
            rows.push(out);
        }
        Self::new(rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<GaussianRational>] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &GaussianRational {
        &self.rows[i][j]
    }

    pub fn transpose(&self) -> MatrixA {
        let rows = (0..self.n)
            .map(|j| (0..self.n).map(|i| self.rows[i][j].clone()).collect())
            .collect();
        MatrixA {
            n: self.n,
            rows,
            det: OnceLock::new(),
        }
    }

    pub fn matmul(&self, other: &MatrixA) -> Result<MatrixA> {
        if self.n != other.n {
            return Err(Error::PreconditionViolation(
                "matrix sizes must match".into(),
            ));
        }
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let mut acc = GaussianRational::zero();
                        for k in 0..self.n {
                            acc = acc.add(&self.rows[i][k].mul(&other.rows[k][j]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        MatrixA::new(rows)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination, cached.
    pub fn determinant(&self) -> &GaussianRational {
        self.det.get_or_init(|| bareiss_determinant(&self.rows))
    }

    pub fn is_singular(&self) -> bool {
        self.determinant().is_zero()
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<MatrixA> {
        let n = self.n;
        let mut aug: Vec<Vec<GaussianRational>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                for j in 0..n {
                    r.push(if i == j {
                        GaussianRational::one()
                    } else {
                        GaussianRational::zero()
                    });
                }
                r
            })
            .collect();
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !aug[r][col].is_zero())
                .ok_or(Error::SingularMatrix)?;
            aug.swap(col, pivot_row);
            let inv = aug[col][col].inv().expect("pivot is nonzero");
            for cell in aug[col].iter_mut() {
                *cell = cell.mul(&inv);
            }
            let pivot_row = aug[col].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (cell, p) in row.iter_mut().zip(&pivot_row) {
                    let delta = factor.mul(p);
                    *cell = cell.sub(&delta);
                }
            }
        }
        let rows = aug.into_iter().map(|r| r[n..].to_vec()).collect();
        MatrixA::new(rows)
    }
}

fn bareiss_determinant(rows: &[Vec<GaussianRational>]) -> GaussianRational {
    let n = rows.len();
    let mut m: Vec<Vec<GaussianRational>> = rows.to_vec();
    let mut negate = false;
    let mut prev = GaussianRational::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(r) = ((k + 1)..n).find(|&r| !m[r][k].is_zero()) else {
                return GaussianRational::zero();
            };
            m.swap(k, r);
            negate = !negate;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.div(&prev).expect("Bareiss pivot divides exactly");
            }
            m[i][k] = GaussianRational::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

/// `g~(w) = g(A^T w)`; requires `|A| != 0`.
pub fn transform_g(g: &MultiPoly, a: &MatrixA) -> Result<MultiPoly> {
    if a.n() != g.nvars() {
        return Err(Error::PreconditionViolation(format!(
            "matrix size {} does not match nvars {}",
            a.n(),
            g.nvars()
        )));
    }
    if a.is_singular() {
        return Err(Error::SingularMatrix);
    }
    g.substitute_linear_map(a.transpose().rows())
}

/// Everything the reduction pipeline produced. The partition and
/// classification live in the transformed `w` coordinates; the solution is
/// back-substituted to `z` and flagged non-canonical.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub transformed: MultiPoly,
    pub partition: VariablePartition,
    pub classification: Classification,
    pub solution: Option<SolutionForm>,
}

/// Full pipeline: determinant gate, change of variables, solve, exact
/// back-substitution `w = (A^T)^{-1} z` into every term's linear form.
pub fn reduce_solve_backsub(a: &MatrixA, g: &MultiPoly) -> Result<Reduction> {
    let transformed = transform_g(g, a)?;
    let syn = synthesize(&transformed)?;
    let solution = match syn.solution {
        None => None,
        Some(v_form) => {
            let back = a.transpose().inverse()?;
            let mut terms = Vec::with_capacity(v_form.terms.len());
            for t in &v_form.terms {
                terms.push(SolutionTerm {
                    ell: t.ell.compose_matrix(back.rows())?,
                    exponent: t.exponent.clone(),
                    gauge: t.gauge.clone(),
                    group_size: t.group_size,
                });
            }
            Some(SolutionForm {
                nvars: v_form.nvars,
                terms,
                kappa_term: v_form.kappa_term,
                canonical: false,
            })
        }
    };
    Ok(Reduction {
        transformed,
        partition: syn.partition,
        classification: syn.classification,
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_poly, parse_scalar};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mat(entries: &[&[&str]]) -> MatrixA {
        let rows = entries
            .iter()
            .map(|row| row.iter().map(|s| parse_scalar(s).unwrap()).collect())
            .collect();
        MatrixA::new(rows).unwrap()
    }

    #[test]
    fn determinant_identity() {
        let a = MatrixA::identity(3).unwrap();
        assert_eq!(*a.determinant(), GaussianRational::one());
    }

    #[test]
    fn determinant_khavinson_factorization() {
        // Hand cofactor expansion: 1*(-i) - i*1 = -2i.
        let a = mat(&[&["1", "i"], &["1", "-i"]]);
        assert_eq!(*a.determinant(), parse_scalar("-2*i").unwrap());
    }

    #[test]
    fn determinant_equal_rows_is_zero() {
        let a = mat(&[&["1", "2", "3"], &["4", "5", "6"], &["1", "2", "3"]]);
        assert!(a.is_singular());
    }

    #[test]
    fn transform_examples() {
        let g = parse_poly("5", 2).unwrap();
        let a = mat(&[&["1", "1"], &["0", "1"]]);
        assert_eq!(transform_g(&g, &a).unwrap(), g);

        let g = parse_poly("z1", 2).unwrap();
        let swap = mat(&[&["0", "1"], &["1", "0"]]);
        assert_eq!(
            transform_g(&g, &swap).unwrap(),
            parse_poly("z2", 2).unwrap()
        );

        // g = z1 z2 under [[1,1],[1,-1]]: z1 <- w1+w2, z2 <- w1-w2.
        let g = parse_poly("z1*z2", 2).unwrap();
        let a = mat(&[&["1", "1"], &["1", "-1"]]);
        let expect = parse_poly("(z1 + z2)*(z1 - z2)", 2).unwrap();
        assert_eq!(transform_g(&g, &a).unwrap(), expect);
        assert_eq!(expect, parse_poly("z1^2 - z2^2", 2).unwrap());
    }

    #[test]
    fn singular_matrix_gates_pipeline() {
        let a = mat(&[&["1", "2"], &["2", "4"]]);
        let g = MultiPoly::zero(2);
        assert_eq!(transform_g(&g, &a), Err(Error::SingularMatrix));
        assert!(matches!(
            reduce_solve_backsub(&a, &g),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn identity_reduction_of_constant_rhs() {
        let a = MatrixA::identity(3).unwrap();
        let red = reduce_solve_backsub(&a, &MultiPoly::zero(3)).unwrap();
        let sol = red.solution.unwrap();
        assert_eq!(sol.total_degree(), Some(1));
        assert_eq!(sol.terms.len(), 3);
        assert!(!sol.canonical);
    }

    #[test]
    fn khavinson_reduction_is_linear() {
        let a = mat(&[&["1", "i"], &["1", "-i"]]);
        let red = reduce_solve_backsub(&a, &MultiPoly::zero(2)).unwrap();
        let sol = red.solution.unwrap();
        assert_eq!(sol.total_degree(), Some(1));
    }

    #[test]
    fn inverse_round_trip() {
        let a = mat(&[&["1", "i", "0"], &["1", "-i", "2"], &["0", "1/2", "1"]]);
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv).unwrap();
        assert_eq!(prod, MatrixA::identity(3).unwrap());
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> MatrixA {
        let rows = (0..n)
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
        MatrixA::new(rows).unwrap()
    }

    #[test]
    fn determinant_multiplicative_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let n = rng.gen_range(2..=4);
            let a = random_matrix(&mut rng, n);
            let b = random_matrix(&mut rng, n);
            let ab = a.matmul(&b).unwrap();
            assert_eq!(
                *ab.determinant(),
                a.determinant().mul(b.determinant()),
                "det(AB) = det(A) det(B)"
            );
        }
    }

    #[test]
    fn transform_round_trip_on_random_invertible() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut done = 0;
        while done < 20 {
            let n = rng.gen_range(2..=5);
            let a = random_matrix(&mut rng, n);
            if a.is_singular() {
                continue;
            }
            let mut g = MultiPoly::zero(n);
            for _ in 0..4 {
                let mut exps = vec![0u32; n];
                exps[rng.gen_range(0..n)] = rng.gen_range(0..=2);
                exps[rng.gen_range(0..n)] += rng.gen_range(0..=1);
                let c = GaussianRational::from_parts(rng.gen_range(-3i64..=3), 1, 0, 1);
                g = g
                    .add(&MultiPoly::from_terms(n, [(exps, c)]).unwrap())
                    .unwrap();
            }
            let forward = transform_g(&g, &a).unwrap();
            let back = forward
                .substitute_linear_map(a.transpose().inverse().unwrap().rows())
                .unwrap();
            assert_eq!(back, g);
            done += 1;
        }
    }
}
