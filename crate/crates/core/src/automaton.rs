//! Weighted automata over the rationals.

use std::collections::HashSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{RatMatrix, RatVector, Rational};
use crate::error::{Error, Result};

/// A word, as indices into an alphabet.
pub type Word = Vec<usize>;

/// `(Q, Sigma, M, I, F)` with one transition matrix per letter.
#[derive(Clone, PartialEq, Eq)]
pub struct WeightedAutomaton {
    states: Vec<String>,
    alphabet: Vec<String>,
    trans: Vec<RatMatrix>,
    initial: RatVector,
    final_: RatVector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonSize {
    pub num_states: usize,
    pub norm: BigUint,
}

fn check_distinct(names: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::InvalidAutomaton(format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

impl WeightedAutomaton {
    /// An automaton with all weights zero.
    pub fn new(states: Vec<String>, alphabet: Vec<String>) -> Result<Self> {
        check_distinct(&states, "state")?;
        check_distinct(&alphabet, "symbol")?;
        if alphabet.iter().any(String::is_empty) {
            return Err(Error::InvalidAutomaton("empty symbol".into()));
        }
        let n = states.len();
        Ok(WeightedAutomaton {
            trans: vec![RatMatrix::zeros(n, n); alphabet.len()],
            initial: RatVector::zeros(n),
            final_: RatVector::zeros(n),
            states,
            alphabet,
        })
    }

    pub fn from_parts(
        states: Vec<String>,
        alphabet: Vec<String>,
        trans: Vec<RatMatrix>,
        initial: RatVector,
        final_: RatVector,
    ) -> Result<Self> {
        let mut a = WeightedAutomaton::new(states, alphabet)?;
        let n = a.num_states();
        if trans.len() != a.alphabet.len() {
            return Err(Error::InvalidAutomaton(format!(
                "{} transition matrices for {} symbols",
                trans.len(),
                a.alphabet.len()
            )));
        }
        if trans.iter().any(|m| m.nrows() != n || m.ncols() != n) || initial.dim() != n || final_.dim() != n {
            return Err(Error::InvalidAutomaton(format!("weights do not match {n} states")));
        }
        a.trans = trans;
        a.initial = initial;
        a.final_ = final_;
        Ok(a)
    }

    /// Same as [`WeightedAutomaton::new`] with states and symbols given as strs.
    pub fn with_names(states: &[&str], alphabet: &[&str]) -> Result<Self> {
        WeightedAutomaton::new(
            states.iter().map(|s| s.to_string()).collect(),
            alphabet.iter().map(|s| s.to_string()).collect(),
        )
    }

    /// The automaton with no states, denoting the constant zero function.
    pub fn empty(alphabet: Vec<String>) -> Result<Self> {
        WeightedAutomaton::new(Vec::new(), alphabet)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::InvalidAutomaton(format!("unknown state `{name}`")))
    }

    pub fn symbol_index(&self, symbol: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn matrix(&self, letter: usize) -> &RatMatrix {
        &self.trans[letter]
    }

    pub fn matrices(&self) -> &[RatMatrix] {
        &self.trans
    }

    pub fn initial(&self) -> &RatVector {
        &self.initial
    }

    pub fn final_weights(&self) -> &RatVector {
        &self.final_
    }

    fn check_state(&self, q: usize) -> Result<()> {
        if q >= self.num_states() {
            return Err(Error::IndexOutOfRange {
                index: q,
                size: self.num_states(),
            });
        }
        Ok(())
    }

    fn check_letter(&self, a: usize) -> Result<()> {
        if a >= self.alphabet.len() {
            return Err(Error::UnknownSymbol(format!("#{a}")));
        }
        Ok(())
    }

    pub fn set_initial(&mut self, q: usize, w: Rational) -> Result<()> {
        self.check_state(q)?;
        self.initial.set(q, w);
        Ok(())
    }

    pub fn set_final(&mut self, q: usize, w: Rational) -> Result<()> {
        self.check_state(q)?;
        self.final_.set(q, w);
        Ok(())
    }

    pub fn set_transition(&mut self, from: usize, letter: usize, to: usize, w: Rational) -> Result<()> {
        self.check_state(from)?;
        self.check_state(to)?;
        self.check_letter(letter)?;
        self.trans[letter].set(from, to, w);
        Ok(())
    }

    /// Splits `text` into symbols by greedy longest match against the alphabet.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .alphabet
                .iter()
                .enumerate()
                .filter(|(_, s)| rest.starts_with(s.as_str()))
                .max_by_key(|(_, s)| s.len());
            match best {
                Some((i, s)) => {
                    out.push(i);
                    rest = &rest[s.len()..];
                }
                None => {
                    let c = rest.chars().next().unwrap();
                    return Err(Error::UnknownSymbol(c.to_string()));
                }
            }
        }
        Ok(out)
    }

    pub fn word_from_symbols<S: AsRef<str>>(&self, symbols: &[S]) -> Result<Word> {
        symbols.iter().map(|s| self.symbol_index(s.as_ref())).collect()
    }

    pub fn format_word(&self, w: &[usize]) -> String {
        format_word(&self.alphabet, w)
    }

    /// `I^T M(w)`.
    pub fn forward(&self, w: &[usize]) -> Result<RatVector> {
        let mut v = self.initial.clone();
        for &a in w {
            self.check_letter(a)?;
            v = v.mul_matrix(&self.trans[a])?;
        }
        Ok(v)
    }

    /// `M(w) F`.
    pub fn backward(&self, w: &[usize]) -> Result<RatVector> {
        let mut v = self.final_.clone();
        for &a in w.iter().rev() {
            self.check_letter(a)?;
            v = self.trans[a].mul_vector(&v)?;
        }
        Ok(v)
    }

    pub fn evaluate(&self, w: &[usize]) -> Result<Rational> {
        self.forward(w)?.dot(&self.final_)
    }

    pub fn evaluate_str(&self, text: &str) -> Result<Rational> {
        self.evaluate(&self.parse_word(text)?)
    }

    /// `M(w)`, the identity for the empty word.
    pub fn word_matrix(&self, w: &[usize]) -> Result<RatMatrix> {
        let mut m = RatMatrix::identity(self.num_states());
        for &a in w {
            self.check_letter(a)?;
            m = m.mul(&self.trans[a])?;
        }
        Ok(m)
    }

    /// Number of accepting runs on `w`, counted over the naturals.
    pub fn count_runs(&self, w: &[usize]) -> Result<BigUint> {
        let n = self.num_states();
        let mut v: Vec<BigUint> = (0..n)
            .map(|q| if self.initial.get_ref(q).is_some() { BigUint::one() } else { BigUint::zero() })
            .collect();
        for &a in w {
            self.check_letter(a)?;
            let mut next = vec![BigUint::zero(); n];
            for (p, q, _) in self.trans[a].iter() {
                if !v[p].is_zero() {
                    next[q] += &v[p];
                }
            }
            v = next;
        }
        Ok((0..n)
            .filter(|&q| self.final_.get_ref(q).is_some())
            .map(|q| v[q].clone())
            .sum())
    }

    pub fn has_nonnegative_transitions(&self) -> bool {
        self.trans.iter().all(RatMatrix::is_nonnegative)
    }

    /// At most one initial state and at most one successor per state and letter.
    pub fn is_deterministic(&self) -> bool {
        self.initial.nnz() <= 1 && self.trans.iter().all(|m| (0..m.nrows()).all(|i| m.row(i).len() <= 1))
    }

    pub fn is_integer_weighted(&self) -> bool {
        self.all_weights().all(Rational::is_integer)
    }

    fn all_weights(&self) -> impl Iterator<Item = &Rational> {
        self.trans
            .iter()
            .flat_map(|m| m.iter().map(|(_, _, x)| x))
            .chain(self.initial.iter().map(|(_, x)| x))
            .chain(self.final_.iter().map(|(_, x)| x))
    }

    /// Number of states and the largest absolute numerator or denominator.
    pub fn size(&self) -> AutomatonSize {
        // Every entry, zero included, has a denominator of at least 1.
        let mut norm = if self.num_states() > 0 { BigUint::one() } else { BigUint::zero() };
        for x in self.all_weights() {
            for part in [x.numer(), x.denom()] {
                let m = part.abs().to_biguint().unwrap();
                if m > norm {
                    norm = m;
                }
            }
        }
        AutomatonSize {
            num_states: self.num_states(),
            norm,
        }
    }

    /// Successor sets of the structure graph.
    pub(crate) fn structure_successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.num_states()];
        for m in &self.trans {
            for (p, q, _) in m.iter() {
                succ[p].push(q);
            }
        }
        for s in succ.iter_mut() {
            s.sort_unstable();
            s.dedup();
        }
        succ
    }

    /// States both reachable from an initial state and coreachable to a final one.
    pub fn useful_states(&self) -> Vec<bool> {
        let n = self.num_states();
        let succ = self.structure_successors();
        let mut pred = vec![Vec::new(); n];
        for (p, qs) in succ.iter().enumerate() {
            for &q in qs {
                pred[q].push(p);
            }
        }
        let search = |seeds: Vec<usize>, edges: &[Vec<usize>]| {
            let mut seen = vec![false; n];
            let mut stack = seeds;
            for &s in &stack {
                seen[s] = true;
            }
            while let Some(p) = stack.pop() {
                for &q in &edges[p] {
                    if !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
            seen
        };
        let reach = search(self.initial.iter().map(|(q, _)| q).collect(), &succ);
        let coreach = search(self.final_.iter().map(|(q, _)| q).collect(), &pred);
        (0..n).map(|q| reach[q] && coreach[q]).collect()
    }

    /// Sub-automaton on `keep` (original indices, kept in the given order).
    pub fn restrict(&self, keep: &[usize]) -> WeightedAutomaton {
        let mut index = vec![usize::MAX; self.num_states()];
        for (k, &q) in keep.iter().enumerate() {
            index[q] = k;
        }
        let n = keep.len();
        let trans = self
            .trans
            .iter()
            .map(|m| {
                let mut r = RatMatrix::zeros(n, n);
                for (p, q, x) in m.iter() {
                    if index[p] != usize::MAX && index[q] != usize::MAX {
                        r.set(index[p], index[q], x.clone());
                    }
                }
                r
            })
            .collect();
        let pick = |v: &RatVector| RatVector::from_dense(keep.iter().map(|&q| v.get(q)).collect());
        WeightedAutomaton {
            states: keep.iter().map(|&q| self.states[q].clone()).collect(),
            alphabet: self.alphabet.clone(),
            trans,
            initial: pick(&self.initial),
            final_: pick(&self.final_),
        }
    }

    /// Drops useless states; the value of every word is unchanged.
    pub fn trim(&self) -> WeightedAutomaton {
        let useful = self.useful_states();
        let keep: Vec<usize> = (0..self.num_states()).filter(|&q| useful[q]).collect();
        self.restrict(&keep)
    }

    pub fn is_trim(&self) -> bool {
        self.useful_states().into_iter().all(|u| u)
    }

    pub fn negate(&self) -> WeightedAutomaton {
        let mut a = self.clone();
        a.final_ = a.final_.map(|x| -x);
        a
    }

    /// Doubles every state into `q+` and `q-`, moving all signs to the final
    /// vector. Transitions and initial weights of the result are nonnegative.
    pub fn make_nonnegative(&self) -> WeightedAutomaton {
        let n = self.num_states();
        let plus = |q: usize| 2 * q;
        let minus = |q: usize| 2 * q + 1;
        let states = self
            .states
            .iter()
            .flat_map(|q| [format!("{q}+"), format!("{q}-")])
            .collect();
        let trans = self
            .trans
            .iter()
            .map(|m| {
                let mut r = RatMatrix::zeros(2 * n, 2 * n);
                for (p, q, x) in m.iter() {
                    if x.is_negative() {
                        r.set(plus(p), minus(q), -x);
                        r.set(minus(p), plus(q), -x);
                    } else {
                        r.set(plus(p), plus(q), x.clone());
                        r.set(minus(p), minus(q), x.clone());
                    }
                }
                r
            })
            .collect();
        let mut initial = RatVector::zeros(2 * n);
        for (q, x) in self.initial.iter() {
            if x.is_negative() {
                initial.set(minus(q), -x);
            } else {
                initial.set(plus(q), x.clone());
            }
        }
        let mut final_ = RatVector::zeros(2 * n);
        for (q, x) in self.final_.iter() {
            final_.set(plus(q), x.clone());
            final_.set(minus(q), -x);
        }
        WeightedAutomaton {
            states,
            alphabet: self.alphabet.clone(),
            trans,
            initial,
            final_,
        }
    }

    /// Multiplies every weight by `x`, the lcm of all denominators, so that
    /// the result `A'` satisfies `A'(w) = x^(|w|+2) A(w)`.
    pub fn scale_to_integers(&self) -> (WeightedAutomaton, BigUint) {
        let x = self
            .all_weights()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let factor = Rational::from_integer(x.clone());
        let a = WeightedAutomaton {
            states: self.states.clone(),
            alphabet: self.alphabet.clone(),
            trans: self.trans.iter().map(|m| m.scale(&factor)).collect(),
            initial: self.initial.scale(&factor),
            final_: self.final_.scale(&factor),
        };
        (a, x.to_biguint().unwrap())
    }

    /// The same automaton over a larger alphabet containing the current one;
    /// new symbols get zero matrices.
    pub fn extend_alphabet(&self, alphabet: &[String]) -> Result<WeightedAutomaton> {
        let mut a = WeightedAutomaton::new(self.states.clone(), alphabet.to_vec())?;
        for (i, s) in self.alphabet.iter().enumerate() {
            let j = a.symbol_index(s)?;
            a.trans[j] = self.trans[i].clone();
        }
        a.initial = self.initial.clone();
        a.final_ = self.final_.clone();
        Ok(a)
    }
}

pub fn format_word(alphabet: &[String], w: &[usize]) -> String {
    w.iter().map(|&a| alphabet[a].as_str()).collect()
}

fn check_same_alphabet(a: &WeightedAutomaton, b: &WeightedAutomaton) -> Result<()> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch {
            left: a.alphabet.clone(),
            right: b.alphabet.clone(),
        });
    }
    Ok(())
}

fn block_diagonal(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (n, m) = (a.nrows(), b.nrows());
    let mut r = RatMatrix::zeros(n + m, n + m);
    for (p, q, x) in a.iter() {
        r.set(p, q, x.clone());
    }
    for (p, q, x) in b.iter() {
        r.set(n + p, n + q, x.clone());
    }
    r
}

fn concat(a: &RatVector, b: &RatVector) -> RatVector {
    let mut v = a.to_dense();
    v.extend(b.to_dense());
    RatVector::from_dense(v)
}

/// Disjoint union with states `1.q` and `2.q`.
pub fn sum(a: &WeightedAutomaton, b: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    check_same_alphabet(a, b)?;
    let states = a
        .states
        .iter()
        .map(|q| format!("1.{q}"))
        .chain(b.states.iter().map(|q| format!("2.{q}")))
        .collect();
    WeightedAutomaton::from_parts(
        states,
        a.alphabet.clone(),
        a.trans.iter().zip(&b.trans).map(|(x, y)| block_diagonal(x, y)).collect(),
        concat(&a.initial, &b.initial),
        concat(&a.final_, &b.final_),
    )
}

pub fn negate(a: &WeightedAutomaton) -> WeightedAutomaton {
    a.negate()
}

/// `A1 - A2`: the disjoint union with the initial weights of the second copy
/// negated, so the size is |A1| + |A2| and the norm is the larger norm.
pub fn difference(a: &WeightedAutomaton, b: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    let mut d = sum(a, b)?;
    let n = a.num_states();
    for q in 0..b.num_states() {
        let x = b.initial.get(q);
        if !x.is_zero() {
            d.initial.set(n + q, -x);
        }
    }
    Ok(d)
}

/// Pointwise product on pair states `(p,q)`, ordered lexicographically.
pub fn hadamard(a: &WeightedAutomaton, b: &WeightedAutomaton) -> Result<WeightedAutomaton> {
    check_same_alphabet(a, b)?;
    let (n, m) = (a.num_states(), b.num_states());
    let pair = |p: usize, q: usize| p * m + q;
    let states = a
        .states
        .iter()
        .flat_map(|p| b.states.iter().map(move |q| format!("({p},{q})")))
        .collect();
    let trans = a
        .trans
        .iter()
        .zip(&b.trans)
        .map(|(x, y)| {
            let mut r = RatMatrix::zeros(n * m, n * m);
            for (p1, p2, u) in x.iter() {
                for (q1, q2, v) in y.iter() {
                    r.set(pair(p1, q1), pair(p2, q2), u * v);
                }
            }
            r
        })
        .collect();
    let tensor = |u: &RatVector, v: &RatVector| {
        let mut r = RatVector::zeros(n * m);
        for (p, x) in u.iter() {
            for (q, y) in v.iter() {
                r.set(pair(p, q), x * y);
            }
        }
        r
    };
    WeightedAutomaton::from_parts(
        states,
        a.alphabet.clone(),
        trans,
        tensor(&a.initial, &b.initial),
        tensor(&a.final_, &b.final_),
    )
}

/// All words over `k` letters of length at most `max_len`, in shortlex order.
pub fn words_up_to(k: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * k);
        for w in &layer {
            for a in 0..k {
                let mut x = w.clone();
                x.push(a);
                next.push(x);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

impl fmt::Debug for WeightedAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "WeightedAutomaton {:?} over {:?}", self.states, self.alphabet)?;
        writeln!(f, "  I = {:?}", self.initial)?;
        writeln!(f, "  F = {:?}", self.final_)?;
        for (s, m) in self.alphabet.iter().zip(&self.trans) {
            writeln!(f, "  M({s}) = {m:?}")?;
        }
        Ok(())
    }
}
