//! Permutation-triangularity of square matrices.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::boolean::BoolMatrix;
use super::matrix::RatMatrix;
use crate::error::{Error, Result};

/// Outcome of a p-triangularity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Triangularity {
    /// `order[k]` is the original index placed at position `k`; permuting
    /// rows and columns by `order` yields an upper-triangular matrix.
    Triangular { order: Vec<usize> },
    /// Distinct indices `i0 -> i1 -> ... -> i0` along off-diagonal nonzeros.
    Cycle { cycle: Vec<usize> },
}

impl Triangularity {
    pub fn is_triangular(&self) -> bool {
        matches!(self, Triangularity::Triangular { .. })
    }
}

/// Topological order of the off-diagonal pattern, smallest index first.
pub fn triangular_order(pattern: &BoolMatrix) -> Triangularity {
    let n = pattern.dim();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for (i, j) in pattern.ones() {
        if i != j {
            indeg[j] += 1;
            succ[i].push(j);
            pred[j].push(i);
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        placed[i] = true;
        for &j in &succ[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(Reverse(j));
            }
        }
    }
    if order.len() == n {
        return Triangularity::Triangular { order };
    }

    // Every unplaced node has an unplaced predecessor: walk backwards until a
    // node repeats.
    let start = (0..n).find(|&i| !placed[i]).unwrap();
    let mut seen = vec![usize::MAX; n];
    let mut walk = Vec::new();
    let mut cur = start;
    while seen[cur] == usize::MAX {
        seen[cur] = walk.len();
        walk.push(cur);
        cur = *pred[cur].iter().filter(|&&p| !placed[p]).min().unwrap();
    }
    let mut cycle: Vec<usize> = walk[seen[cur]..].to_vec();
    cycle.reverse();
    let min_pos = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| v)
        .map(|(k, _)| k)
        .unwrap();
    cycle.rotate_left(min_pos);
    Triangularity::Cycle { cycle }
}

pub fn p_triangular(m: &RatMatrix) -> Result<Triangularity> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(triangular_order(&m.structure()))
}
