//! Structural analyses: structures, ambiguity, and the combinatorial bounds.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::algebra::{linalg, p_triangular, BoolMatrix, RatMatrix, Triangularity};
use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};

/// Ambiguity classes, from the most to the least restrictive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AmbiguityClass {
    Deterministic,
    Unambiguous,
    FinitelyAmbiguous,
    PolynomiallyAmbiguous,
    ExponentiallyAmbiguous,
}

impl fmt::Display for AmbiguityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AmbiguityClass::Deterministic => "deterministic",
            AmbiguityClass::Unambiguous => "unambiguous",
            AmbiguityClass::FinitelyAmbiguous => "finitely-ambiguous",
            AmbiguityClass::PolynomiallyAmbiguous => "polynomially-ambiguous",
            AmbiguityClass::ExponentiallyAmbiguous => "exponentially-ambiguous",
        };
        f.write_str(s)
    }
}

/// Structure of a single letter, regardless of signs.
pub fn letter_structure(a: &WeightedAutomaton, letter: usize) -> BoolMatrix {
    a.matrix(letter).structure()
}

/// Boolean product of letter structures along `w`, without the sign check.
pub fn structure_pattern(a: &WeightedAutomaton, w: &[usize]) -> Result<BoolMatrix> {
    let mut s = BoolMatrix::identity(a.num_states());
    for &x in w {
        if x >= a.alphabet().len() {
            return Err(Error::UnknownSymbol(format!("#{x}")));
        }
        s = s.mul(&letter_structure(a, x))?;
    }
    Ok(s)
}

/// Structure of `M(w)`. Fails with [`Error::NegativeTransitions`] when signs
/// could cancel, since the product pattern then need not be the structure
/// of the product.
pub fn structure_of(a: &WeightedAutomaton, w: &[usize]) -> Result<BoolMatrix> {
    if !a.has_nonnegative_transitions() {
        return Err(Error::NegativeTransitions);
    }
    structure_pattern(a, w)
}

pub fn is_idempotent_structure(b: &BoolMatrix) -> bool {
    b.is_idempotent()
}

pub fn is_p_triangular(m: &RatMatrix) -> Result<Triangularity> {
    p_triangular(m)
}

/// Successors of each state under each letter in the structure graph.
fn letter_successors(a: &WeightedAutomaton) -> Vec<Vec<Vec<usize>>> {
    a.matrices()
        .iter()
        .map(|m| (0..m.nrows()).map(|p| m.row(p).keys().copied().collect()).collect())
        .collect()
}

/// Nodes of the self-product reachable from pairs of initial states and
/// coreachable to pairs of final states.
fn useful_pairs(a: &WeightedAutomaton, succ: &[Vec<Vec<usize>>]) -> Vec<bool> {
    let n = a.num_states();
    let id = |p: usize, q: usize| p * n + q;
    let mut fwd = vec![Vec::new(); n * n];
    let mut bwd = vec![Vec::new(); n * n];
    for letter in succ {
        for p in 0..n {
            for q in 0..n {
                for &p2 in &letter[p] {
                    for &q2 in &letter[q] {
                        fwd[id(p, q)].push(id(p2, q2));
                        bwd[id(p2, q2)].push(id(p, q));
                    }
                }
            }
        }
    }
    let inits: Vec<usize> = a.initial().iter().map(|(q, _)| q).collect();
    let finals: Vec<usize> = a.final_weights().iter().map(|(q, _)| q).collect();
    let seeds = |xs: &[usize]| xs.iter().flat_map(|&p| xs.iter().map(move |&q| id(p, q))).collect();
    let reach = search(seeds(&inits), &fwd);
    let coreach = search(seeds(&finals), &bwd);
    (0..n * n).map(|x| reach[x] && coreach[x]).collect()
}

fn search(seeds: Vec<usize>, edges: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; edges.len()];
    let mut stack = Vec::new();
    for s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(x) = stack.pop() {
        for &y in &edges[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Some state has two distinct cycles labelled by the same word: `(q,q)` and
/// some `(p1,p2)` with `p1 != p2` share a strongly connected component of the
/// self-product.
fn has_eda(n: usize, succ: &[Vec<Vec<usize>>]) -> bool {
    let mut g = DiGraph::<(), ()>::with_capacity(n * n, 0);
    let nodes: Vec<_> = (0..n * n).map(|_| g.add_node(())).collect();
    let mut seen = HashSet::new();
    for letter in succ {
        for p in 0..n {
            for q in 0..n {
                for &p2 in &letter[p] {
                    for &q2 in &letter[q] {
                        if seen.insert((p * n + q, p2 * n + q2)) {
                            g.add_edge(nodes[p * n + q], nodes[p2 * n + q2], ());
                        }
                    }
                }
            }
        }
    }
    tarjan_scc(&g).iter().any(|scc| {
        if scc.len() < 2 {
            return false;
        }
        let diag = scc.iter().any(|x| x.index() / n == x.index() % n);
        let off = scc.iter().any(|x| x.index() / n != x.index() % n);
        diag && off
    })
}

/// States `p != q` and a word `v` with `p -v-> p`, `p -v-> q`, `q -v-> q`:
/// a path from `(p,p,q)` to `(p,q,q)` in the triple product.
fn has_ida(n: usize, succ: &[Vec<Vec<usize>>]) -> bool {
    let id = |x: usize, y: usize, z: usize| (x * n + y) * n + z;
    for p in 0..n {
        for q in 0..n {
            if p == q {
                continue;
            }
            let target = id(p, q, q);
            let mut seen = vec![false; n * n * n];
            let mut queue = VecDeque::from([(p, p, q)]);
            seen[id(p, p, q)] = true;
            while let Some((x, y, z)) = queue.pop_front() {
                for letter in succ {
                    for &x2 in &letter[x] {
                        for &y2 in &letter[y] {
                            for &z2 in &letter[z] {
                                let k = id(x2, y2, z2);
                                if k == target {
                                    return true;
                                }
                                if !seen[k] {
                                    seen[k] = true;
                                    queue.push_back((x2, y2, z2));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    false
}

/// The tightest ambiguity class of `trim(a)`.
pub fn classify_ambiguity(a: &WeightedAutomaton) -> AmbiguityClass {
    let t = a.trim();
    if t.is_deterministic() {
        return AmbiguityClass::Deterministic;
    }
    let n = t.num_states();
    let succ = letter_successors(&t);
    let useful = useful_pairs(&t, &succ);
    if (0..n * n).all(|x| !useful[x] || x / n == x % n) {
        return AmbiguityClass::Unambiguous;
    }
    if has_eda(n, &succ) {
        return AmbiguityClass::ExponentiallyAmbiguous;
    }
    if has_ida(n, &succ) {
        return AmbiguityClass::PolynomiallyAmbiguous;
    }
    AmbiguityClass::FinitelyAmbiguous
}

/// First window `1 <= i <= j <= factors.len()`, in increasing `(j - i, i)`
/// order, such that `M(u_i ... u_j)` has idempotent structure.
pub fn find_idempotent_factor(a: &WeightedAutomaton, factors: &[Vec<usize>]) -> Result<Option<(usize, usize)>> {
    if !a.has_nonnegative_transitions() {
        return Err(Error::NegativeTransitions);
    }
    if let Some(k) = factors.iter().position(Vec::is_empty) {
        return Err(Error::EmptyFactor(k + 1));
    }
    let single: Vec<BoolMatrix> = factors
        .iter()
        .map(|u| structure_pattern(a, u))
        .collect::<Result<_>>()?;
    let mut windows = single.clone();
    for len in 0..single.len() {
        for i in 0..single.len() - len {
            if len > 0 {
                windows[i] = windows[i].mul(&single[i + len])?;
            }
            if windows[i].is_idempotent() {
                return Ok(Some((i + 1, i + len + 1)));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamseyBound {
    pub big_l: u64,
    pub ell: BigUint,
}

/// `L = (m^2 + m + 2) / 2` and `ell = (3 * 2^(4 m^2))^L`.
pub fn ramsey_bound(m: u64) -> Result<RamseyBound> {
    if m == 0 {
        return Err(Error::InvalidArgument("ramsey bound needs m >= 1".into()));
    }
    let big_l = (m * m + m + 2) / 2;
    let base = BigUint::from(3u32) << (4 * m * m) as usize;
    let exp = u32::try_from(big_l).map_err(|_| Error::InvalidArgument(format!("m = {m} is too large")))?;
    Ok(RamseyBound {
        big_l,
        ell: base.pow(exp),
    })
}

/// Values beyond this many bits are reported as [`TowerValue::TooLarge`].
pub const TOWER_BIT_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerValue {
    Exact(BigUint),
    /// The value has more than [`TOWER_BIT_CAP`] bits.
    TooLarge,
}

/// `tower_0(x) = x`, `tower_{r+1}(x) = x * tower_r(x^x)`.
pub fn tower(r: usize, x: &BigUint) -> TowerValue {
    if r == 0 {
        return TowerValue::Exact(x.clone());
    }
    let bits = x.bits();
    // x^x has about x * log2(x) bits.
    let Some(xu) = x.to_u64() else {
        return TowerValue::TooLarge;
    };
    if bits > 1 && xu.saturating_mul(bits - 1) > TOWER_BIT_CAP {
        return TowerValue::TooLarge;
    }
    let Ok(e) = u32::try_from(xu) else {
        return TowerValue::TooLarge;
    };
    match tower(r - 1, &x.pow(e)) {
        TowerValue::Exact(t) if t.bits() + bits <= TOWER_BIT_CAP => TowerValue::Exact(x * t),
        _ => TowerValue::TooLarge,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerBound {
    /// Largest rank of a letter matrix.
    pub r: usize,
    pub ramsey: RamseyBound,
    /// `2 * ell * |Sigma|`.
    pub argument: BigUint,
    pub value: TowerValue,
}

pub fn tower_bound(a: &WeightedAutomaton) -> Result<TowerBound> {
    let ramsey = ramsey_bound(a.num_states().max(1) as u64)?;
    let r = a.matrices().iter().map(linalg::rank).max().unwrap_or(0);
    let argument = BigUint::from(2u32) * &ramsey.ell * BigUint::from(a.alphabet().len());
    let value = tower(r, &argument);
    Ok(TowerBound {
        r,
        ramsey,
        argument,
        value,
    })
}

impl TowerValue {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            TowerValue::Exact(v) => Some(v),
            TowerValue::TooLarge => None,
        }
    }
}

/// Permutes `m` into upper-triangular form when it is p-triangular.
pub fn triangularize(m: &RatMatrix) -> Result<Option<RatMatrix>> {
    Ok(match p_triangular(m)? {
        Triangularity::Triangular { order } => Some(m.permute(&order)),
        Triangularity::Cycle { .. } => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_recurrence() {
        assert_eq!(tower(0, &BigUint::from(7u32)), TowerValue::Exact(BigUint::from(7u32)));
        assert_eq!(tower(1, &BigUint::from(2u32)), TowerValue::Exact(BigUint::from(8u32)));
        // tower_2(2) = 2 * tower_1(4) = 2 * 4 * 4^4
        assert_eq!(tower(2, &BigUint::from(2u32)), TowerValue::Exact(BigUint::from(2048u32)));
        assert_eq!(tower(3, &BigUint::from(4608u32)), TowerValue::TooLarge);
    }

    #[test]
    fn ramsey_small() {
        let b = ramsey_bound(1).unwrap();
        assert_eq!(b.big_l, 2);
        assert_eq!(b.ell, BigUint::from(2304u32));
        assert!(ramsey_bound(0).is_err());
    }

    #[test]
    fn idempotency() {
        assert!(is_idempotent_structure(&BoolMatrix::identity(3)));
        assert!(is_idempotent_structure(&BoolMatrix::from_pairs(2, &[(0, 0), (0, 1), (1, 1)])));
        assert!(!is_idempotent_structure(&BoolMatrix::from_pairs(2, &[(0, 1)])));
    }
}
