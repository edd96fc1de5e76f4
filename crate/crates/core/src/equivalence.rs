//! Exact zeroness and equivalence via a forward reachability basis.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::Zero;

use crate::algebra::Rational;
use crate::automaton::{difference, WeightedAutomaton, Word};
use crate::error::{Error, Result};
use crate::lazy::LazyAutomaton;

pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

/// Sparse vector over discovered states, keyed by discovery index.
type Sparse = BTreeMap<usize, Rational>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeronessVerdict {
    pub is_zero: bool,
    /// A shortest word with nonzero value, and that value.
    pub witness: Option<(Word, Rational)>,
    pub states_explored: usize,
    pub basis_size: usize,
}

/// Span of the vectors `I^T M(w)` discovered so far.
///
/// `raw` keeps each vector as reached, alongside its word; `echelon` holds a
/// fully reduced copy of the same span, with pivot `p` of vector `k` stored
/// in `pivots[p] = k`.
pub struct ReachBasis {
    raw: Vec<(Sparse, Word)>,
    echelon: Vec<Sparse>,
    pivots: HashMap<usize, usize>,
}

impl ReachBasis {
    fn new() -> Self {
        ReachBasis {
            raw: Vec::new(),
            echelon: Vec::new(),
            pivots: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = (&Sparse, &Word)> {
        self.raw.iter().map(|(v, w)| (v, w))
    }

    /// Inserts `v` if it is independent of the basis.
    fn insert(&mut self, v: &Sparse, word: &Word) -> bool {
        let mut r = v.clone();
        let hits: Vec<(usize, Rational)> = r
            .iter()
            .filter_map(|(c, x)| self.pivots.get(c).map(|&k| (k, x.clone())))
            .collect();
        for (k, f) in hits {
            for (c, y) in &self.echelon[k] {
                let e = r.entry(*c).or_insert_with(Rational::zero);
                *e -= &f * y;
                if e.is_zero() {
                    r.remove(c);
                }
            }
        }
        let Some((&p, lead)) = r.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        for x in r.values_mut() {
            *x *= &inv;
        }
        for e in self.echelon.iter_mut() {
            if let Some(f) = e.get(&p).cloned() {
                for (c, y) in &r {
                    let slot = e.entry(*c).or_insert_with(Rational::zero);
                    *slot -= &f * y;
                    if slot.is_zero() {
                        e.remove(c);
                    }
                }
            }
        }
        self.pivots.insert(p, self.echelon.len());
        self.echelon.push(r);
        self.raw.push((v.clone(), word.clone()));
        true
    }
}

struct Explorer<'a, L: LazyAutomaton> {
    lazy: &'a L,
    budget: usize,
    ids: HashMap<L::State, usize>,
    states: Vec<L::State>,
    finals: Vec<Rational>,
    memo: HashMap<(usize, usize), Vec<(usize, Rational)>>,
}

impl<'a, L: LazyAutomaton> Explorer<'a, L> {
    fn intern(&mut self, s: L::State) -> Result<usize> {
        if let Some(&i) = self.ids.get(&s) {
            return Ok(i);
        }
        let i = self.states.len();
        if i >= self.budget {
            return Err(Error::BudgetExceeded {
                reached: i + 1,
                budget: self.budget,
            });
        }
        self.finals.push(self.lazy.final_weight(&s));
        self.ids.insert(s.clone(), i);
        self.states.push(s);
        Ok(i)
    }

    fn step(&mut self, v: &Sparse, letter: usize) -> Result<Sparse> {
        let mut out = Sparse::new();
        for (&i, x) in v {
            if !self.memo.contains_key(&(i, letter)) {
                let succ = self.lazy.successors(&self.states[i].clone(), letter);
                let mut ids = Vec::with_capacity(succ.len());
                for (t, y) in succ {
                    ids.push((self.intern(t)?, y));
                }
                self.memo.insert((i, letter), ids);
            }
            for (j, y) in &self.memo[&(i, letter)] {
                let e = out.entry(*j).or_insert_with(Rational::zero);
                *e += x * y;
            }
        }
        out.retain(|_, x| !x.is_zero());
        Ok(out)
    }

    fn value(&self, v: &Sparse) -> Rational {
        v.iter()
            .map(|(&i, x)| x * &self.finals[i])
            .fold(Rational::zero(), |acc, y| acc + y)
    }
}

/// Decides whether `lazy` maps every word to zero.
///
/// Explores vectors `I^T M(w)` breadth-first in word length, keeping only
/// those independent of the ones already seen. The first kept vector with a
/// nonzero value yields a shortest witness; every other vector of the span
/// has value zero if none does.
pub fn zeroness<L: LazyAutomaton>(lazy: &L, budget: usize) -> Result<ZeronessVerdict> {
    let k = lazy.alphabet().len();
    let mut ex = Explorer {
        lazy,
        budget,
        ids: HashMap::new(),
        states: Vec::new(),
        finals: Vec::new(),
        memo: HashMap::new(),
    };
    let mut start = Sparse::new();
    for (s, x) in lazy.initial() {
        let i = ex.intern(s)?;
        *start.entry(i).or_insert_with(Rational::zero) += x;
    }
    start.retain(|_, x| !x.is_zero());

    let mut basis = ReachBasis::new();
    let mut queue = VecDeque::new();
    let consider = |v: Sparse, w: Word, ex: &Explorer<L>, basis: &mut ReachBasis, queue: &mut VecDeque<usize>| {
        if basis.insert(&v, &w) {
            let value = ex.value(&v);
            if !value.is_zero() {
                return Some((w, value));
            }
            queue.push_back(basis.len() - 1);
        }
        None
    };

    let verdict = |witness: Option<(Word, Rational)>, ex: &Explorer<L>, basis: &ReachBasis| ZeronessVerdict {
        is_zero: witness.is_none(),
        witness,
        states_explored: ex.states.len(),
        basis_size: basis.len(),
    };

    if let Some(w) = consider(start, Vec::new(), &ex, &mut basis, &mut queue) {
        return Ok(verdict(Some(w), &ex, &basis));
    }
    while let Some(b) = queue.pop_front() {
        let (v, w) = basis.raw[b].clone();
        for a in 0..k {
            let next = ex.step(&v, a)?;
            let mut word = w.clone();
            word.push(a);
            if let Some(found) = consider(next, word, &ex, &mut basis, &mut queue) {
                return Ok(verdict(Some(found), &ex, &basis));
            }
        }
    }
    Ok(verdict(None, &ex, &basis))
}

/// Zeroness of `a1 - a2`; the witness value is `a1(w) - a2(w)`.
pub fn equivalent(a1: &WeightedAutomaton, a2: &WeightedAutomaton) -> Result<ZeronessVerdict> {
    zeroness(&difference(a1, a2)?, DEFAULT_STATE_BUDGET)
}
