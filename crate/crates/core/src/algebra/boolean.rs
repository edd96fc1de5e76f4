//! Square zero-one matrices over the Boolean semiring.

use std::fmt;

use crate::error::{Error, Result};

/// A square Boolean matrix stored as one bitset per row.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolMatrix {
    dim: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BoolMatrix {
    pub fn zeros(dim: usize) -> Self {
        let words = dim.div_ceil(64);
        BoolMatrix {
            dim,
            words,
            bits: vec![0; dim * words],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut b = BoolMatrix::zeros(dim);
        for i in 0..dim {
            b.set(i, i, true);
        }
        b
    }

    pub fn from_pairs(dim: usize, pairs: &[(usize, usize)]) -> Self {
        let mut b = BoolMatrix::zeros(dim);
        for &(i, j) in pairs {
            b.set(i, j, true);
        }
        b
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.dim && j < self.dim);
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.dim && j < self.dim, "index ({i},{j}) out of range");
        let w = &mut self.bits[i * self.words + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    /// Pairs `(i, j)` with a one, in row-major order.
    pub fn ones(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row_bits(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Product in the Boolean semiring.
    pub fn mul(&self, other: &BoolMatrix) -> Result<BoolMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "boolean product of sizes {} and {}",
                self.dim, other.dim
            )));
        }
        let mut out = BoolMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                if self.get(i, k) {
                    let src = other.row_bits(k).to_vec();
                    let dst = &mut out.bits[i * self.words..(i + 1) * self.words];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d |= s;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self).map(|sq| &sq == self).unwrap_or(false)
    }
}

pub fn bool_mul(a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix> {
    a.mul(b)
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| if self.get(i, j) { '1' } else { '0' })
                    .collect()
            })
            .collect();
        write!(f, "B[{}]", rows.join("|"))
    }
}
