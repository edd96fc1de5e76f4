//! Closed forms `x^T M^n y = sum_i d_i^n p_i(n)` for p-triangular `M`.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use super::linalg::solve;
use super::matrix::{RatMatrix, RatVector};
use super::rational::Rational;
use super::triangular::{p_triangular, Triangularity};
use crate::error::{Error, Result};

/// One summand `base^n * p(n)` with `p(n) = sum_j coefficients[j] * n^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpPolyTerm {
    pub base: BigUint,
    pub coefficients: Vec<Rational>,
}

impl ExpPolyTerm {
    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn eval_polynomial(&self, n: u64) -> Rational {
        let x = Rational::from_integer(BigInt::from(n));
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * &x + c)
    }
}

/// The decomposition holds for every `n >= threshold`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpPolyDecomposition {
    pub terms: Vec<ExpPolyTerm>,
    pub threshold: usize,
}

impl ExpPolyDecomposition {
    pub fn evaluate(&self, n: u64) -> Rational {
        self.terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| {
                let power = Rational::from_integer(BigInt::from(t.base.pow(n as u32)));
                power * t.eval_polynomial(n)
            })
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn term(&self, base: u64) -> Option<&ExpPolyTerm> {
        self.terms.iter().find(|t| t.base == BigUint::from(base))
    }
}

fn natural_diagonal(m: &RatMatrix) -> Result<Vec<BigUint>> {
    m.diagonal()
        .into_iter()
        .map(|d| {
            if d.is_integer() && !d.is_negative() {
                Ok(d.to_integer().to_biguint().unwrap())
            } else {
                Err(Error::NonNaturalDiagonal(d.to_string()))
            }
        })
        .collect()
}

/// Solves for the polynomial coefficients from `k' * m` consecutive samples
/// `n = m, m+1, ...`, where `k'` counts the nonzero distinct diagonal entries.
/// The base `0` contributes nothing from `n = m` on, since the corresponding
/// block is nilpotent of index at most `m`.
pub fn exp_poly_decompose(m: &RatMatrix, x: &RatVector, y: &RatVector) -> Result<ExpPolyDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let size = m.nrows();
    if x.dim() != size || y.dim() != size {
        return Err(Error::DimensionMismatch(format!(
            "vectors of size {} and {} for a {size}x{size} matrix",
            x.dim(),
            y.dim()
        )));
    }
    if let Triangularity::Cycle { cycle } = p_triangular(m)? {
        return Err(Error::NotPTriangular { cycle });
    }
    let mut bases = natural_diagonal(m)?;
    bases.sort();
    bases.dedup();

    let nonzero: Vec<&BigUint> = bases.iter().filter(|b| !b.is_zero()).collect();
    let unknowns = nonzero.len() * size;

    let mut solution = Vec::new();
    if unknowns > 0 {
        let mut row = x.mul_matrix(&m.pow(size as u64)?)?;
        let mut samples = Vec::with_capacity(unknowns);
        let mut system = Vec::with_capacity(unknowns);
        for offset in 0..unknowns {
            let n = (size + offset) as u64;
            samples.push(row.dot(y)?);
            row = row.mul_matrix(m)?;
            let n_big = BigInt::from(n);
            let mut eq = Vec::with_capacity(unknowns);
            for base in &nonzero {
                let power = BigInt::from(base.pow(n as u32));
                let mut monomial = BigInt::from(1);
                for _ in 0..size {
                    eq.push(Rational::from_integer(&power * &monomial));
                    monomial *= &n_big;
                }
            }
            system.push(eq);
        }
        solution = solve(&RatMatrix::from_dense(system), &samples)?;
    }

    let mut chunks = solution.chunks(size.max(1));
    let terms = bases
        .iter()
        .map(|base| {
            let mut coefficients = if base.is_zero() {
                Vec::new()
            } else {
                chunks.next().unwrap().to_vec()
            };
            while coefficients.last().is_some_and(Zero::is_zero) {
                coefficients.pop();
            }
            ExpPolyTerm {
                base: base.clone(),
                coefficients,
            }
        })
        .collect();
    Ok(ExpPolyDecomposition {
        terms,
        threshold: size,
    })
}

/// `x^T M^n y` by direct powering.
pub fn bilinear_power(m: &RatMatrix, x: &RatVector, y: &RatVector, n: u64) -> Result<Rational> {
    x.mul_matrix(&m.pow(n)?)?.dot(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_dense(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    fn v(xs: &[i64]) -> RatVector {
        RatVector::from_dense(xs.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn difference_of_powers() {
        let a = m(&[&[2, 1], &[0, 3]]);
        let d = exp_poly_decompose(&a, &v(&[1, 0]), &v(&[0, 1])).unwrap();
        assert_eq!(d.term(3).unwrap().coefficients, vec![int(1)]);
        assert_eq!(d.term(2).unwrap().coefficients, vec![int(-1)]);
        for n in 2..=22 {
            assert_eq!(d.evaluate(n), bilinear_power(&a, &v(&[1, 0]), &v(&[0, 1]), n).unwrap());
        }
    }

    #[test]
    fn single_term() {
        let a = m(&[&[5]]);
        let d = exp_poly_decompose(&a, &v(&[1]), &v(&[1])).unwrap();
        assert_eq!(d.terms.len(), 1);
        assert_eq!(d.terms[0].base, BigUint::from(5u32));
        assert_eq!(d.terms[0].coefficients, vec![int(1)]);
    }

    #[test]
    fn nilpotent_is_zero() {
        let a = m(&[&[0, 1], &[0, 0]]);
        let d = exp_poly_decompose(&a, &v(&[3, -1]), &v(&[2, 7])).unwrap();
        assert!(d.terms.iter().all(ExpPolyTerm::is_zero));
        for n in 2..10 {
            assert_eq!(d.evaluate(n), int(0));
            assert_eq!(bilinear_power(&a, &v(&[3, -1]), &v(&[2, 7]), n).unwrap(), int(0));
        }
    }

    #[test]
    fn jordan_block_gives_linear_polynomial() {
        // [[2,1],[0,2]]^n = [[2^n, n 2^(n-1)], [0, 2^n]]
        let a = m(&[&[2, 1], &[0, 2]]);
        let d = exp_poly_decompose(&a, &v(&[1, 0]), &v(&[0, 1])).unwrap();
        let t = d.term(2).unwrap();
        assert_eq!(t.degree(), Some(1));
        for n in 2..=22 {
            assert_eq!(d.evaluate(n), bilinear_power(&a, &v(&[1, 0]), &v(&[0, 1]), n).unwrap());
        }
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            exp_poly_decompose(&m(&[&[0, 1], &[1, 0]]), &v(&[1, 0]), &v(&[0, 1])),
            Err(Error::NotPTriangular { .. })
        ));
        assert!(matches!(
            exp_poly_decompose(&m(&[&[-2]]), &v(&[1]), &v(&[1])),
            Err(Error::NonNaturalDiagonal(_))
        ));
        let half = RatMatrix::from_dense(vec![vec![crate::algebra::rational::rat(1, 2)]]);
        assert!(matches!(
            exp_poly_decompose(&half, &v(&[1]), &v(&[1])),
            Err(Error::NonNaturalDiagonal(_))
        ));
    }
}
