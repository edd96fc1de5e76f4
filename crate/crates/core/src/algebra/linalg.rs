//! Exact Gaussian elimination and derived operations.

use num_traits::{One, Zero};

use super::matrix::{RatMatrix, RatVector};
use super::rational::Rational;
use crate::error::{Error, Result};

/// Reduces `rows` in place to reduced row-echelon form, choosing pivots among
/// the first `cols` columns only, and returns the pivot columns in order.
fn rref(rows: &mut Vec<Vec<Rational>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..rows[r].len() {
                    let delta = &f * &rows[r][k];
                    rows[i][k] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(m: &RatMatrix) -> usize {
    let mut rows = m.to_dense();
    rref(&mut rows, m.ncols()).len()
}

pub fn determinant(m: &RatMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    let mut a = m.to_dense();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for k in c..n {
                let delta = &f * &a[c][k];
                a[i][k] -= delta;
            }
        }
    }
    Ok(det)
}

/// Solves `m x = b` for square nonsingular `m`.
pub fn solve(m: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of size {} for {n}x{n} system",
            b.len()
        )));
    }
    let mut rows: Vec<Vec<Rational>> = m
        .to_dense()
        .into_iter()
        .zip(b.iter())
        .map(|(mut row, rhs)| {
            row.push(rhs.clone());
            row
        })
        .collect();
    let pivots = rref(&mut rows, n);
    if pivots.len() < n {
        return Err(Error::InvalidArgument("singular system".into()));
    }
    Ok(rows.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

pub fn inverse(m: &RatMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    let mut rows: Vec<Vec<Rational>> = m
        .to_dense()
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut rows, n);
    if pivots.len() < n {
        return Err(Error::InvalidArgument("matrix is singular".into()));
    }
    Ok(RatMatrix::from_dense(
        rows.into_iter().map(|r| r[n..].to_vec()).collect(),
    ))
}

/// Incremental independence test for row vectors.
pub(crate) struct RowSpan {
    cols: usize,
    basis: Vec<(usize, Vec<Rational>)>,
}

impl RowSpan {
    pub(crate) fn new(cols: usize) -> Self {
        RowSpan {
            cols,
            basis: Vec::new(),
        }
    }

    /// Adds `row` if it is independent of the rows seen so far.
    pub(crate) fn insert(&mut self, row: &[Rational]) -> bool {
        let mut v = row.to_vec();
        for (p, b) in &self.basis {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for k in 0..self.cols {
                    let delta = &f * &b[k];
                    v[k] -= delta;
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for (_, b) in self.basis.iter_mut() {
            if !b[p].is_zero() {
                let f = b[p].clone();
                for k in 0..self.cols {
                    let delta = &f * &v[k];
                    b[k] -= delta;
                }
            }
        }
        self.basis.push((p, v));
        true
    }
}

/// Returns an invertible `C` with `A (BA)^n = A C^n` for every `n >= 0`.
///
/// Requires `rank(ABA) = rank(A)`. Acting on row vectors, `BA` maps the row
/// space `R` of `A` bijectively onto itself; `C` agrees with `BA` on a basis
/// of `R` taken from the rows of `A` and is the identity on unit vectors
/// completing that basis.
pub fn invertible_completion(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    for m in [a, b] {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
    }
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let n = a.nrows();
    let ba = b.mul(a)?;
    let aba = a.mul(&ba)?;
    let (rank_a, rank_aba) = (rank(a), rank(&aba));
    if rank_a != rank_aba {
        return Err(Error::RankPrecondition { rank_a, rank_aba });
    }

    let mut span = RowSpan::new(n);
    let mut domain: Vec<RatVector> = Vec::new();
    let mut image: Vec<RatVector> = Vec::new();
    for i in 0..n {
        let row = RatVector::from_dense((0..n).map(|j| a.get(i, j)).collect());
        if span.insert(&row.to_dense()) {
            image.push(row.mul_matrix(&ba)?);
            domain.push(row);
        }
    }
    for j in 0..n {
        let e = RatVector::unit(n, j);
        if span.insert(&e.to_dense()) {
            image.push(e.clone());
            domain.push(e);
        }
    }
    let to_matrix = |vs: &[RatVector]| RatMatrix::from_dense(vs.iter().map(RatVector::to_dense).collect());
    let basis = to_matrix(&domain);
    let images = to_matrix(&image);
    // basis · C = images
    inverse(&basis)?.mul(&images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_dense(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_det() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&RatMatrix::zeros(3, 3)), 0);
        assert_eq!(determinant(&m(&[&[1, 2], &[3, 4]])).unwrap(), int(-2));
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])).unwrap(), int(-1));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])).unwrap(), int(0));
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RatMatrix::identity(2));
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[int(1), int(1)]).is_err());
    }

    fn check_completion(a: &RatMatrix, b: &RatMatrix, c: &RatMatrix) {
        assert!(!determinant(c).unwrap().is_zero());
        let ba = b.mul(a).unwrap();
        for n in 0..=6 {
            let lhs = a.mul(&ba.pow(n).unwrap()).unwrap();
            let rhs = a.mul(&c.pow(n).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn completion_examples() {
        let a = m(&[&[1, 0], &[0, 0]]);
        let b = m(&[&[2, 0], &[0, 5]]);
        let c = invertible_completion(&a, &b).unwrap();
        assert_eq!(c, m(&[&[2, 0], &[0, 1]]));
        check_completion(&a, &b, &c);

        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 1]]);
        let c = invertible_completion(&a, &b).unwrap();
        assert_eq!(c, b.mul(&a).unwrap());

        let z = RatMatrix::zeros(2, 2);
        let c = invertible_completion(&z, &b).unwrap();
        assert_eq!(c, RatMatrix::identity(2));
    }

    #[test]
    fn completion_rejects_rank_drop() {
        // ABA = 0 while A has rank 1.
        let a = m(&[&[0, 1], &[0, 0]]);
        let b = RatMatrix::identity(2);
        assert_eq!(
            invertible_completion(&a, &b),
            Err(Error::RankPrecondition { rank_a: 1, rank_aba: 0 })
        );
    }

    #[test]
    fn completion_non_diagonal() {
        let a = m(&[&[1, 1, 0], &[2, 2, 0], &[0, 0, 0]]);
        let b = m(&[&[1, 0, 2], &[1, 3, 0], &[0, 1, 1]]);
        let c = invertible_completion(&a, &b).unwrap();
        check_completion(&a, &b, &c);
    }
}
