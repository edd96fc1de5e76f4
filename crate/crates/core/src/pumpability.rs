//! Pumpability: the separator constructions, exact deciders by zeroness, and
//! a bounded falsifier.
//!
//! Inputs to the constructions are words `u$v$w` (or `u$v$w$w'`) over the
//! alphabet extended by the separator `$`, which always gets the last index.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::algebra::{p_triangular, BoolMatrix, RatMatrix, Rational, Triangularity};
use crate::automaton::{words_up_to, WeightedAutomaton, Word};
use crate::equivalence::{zeroness, DEFAULT_STATE_BUDGET};
use crate::error::{Error, Result};
use crate::lazy::{LazyAutomaton, Product, ProductMany, Union};

pub const SEPARATOR: &str = "$";

/// The automaton being pumped, shared by all constructions built from it.
struct Base {
    a: WeightedAutomaton,
    alphabet: Vec<String>,
    structures: Vec<BoolMatrix>,
}

impl Base {
    fn new(a: &WeightedAutomaton) -> Result<Arc<Base>> {
        if a.alphabet().iter().any(|s| s == SEPARATOR) {
            return Err(Error::SeparatorCollision);
        }
        let mut alphabet = a.alphabet().to_vec();
        alphabet.push(SEPARATOR.to_string());
        Ok(Arc::new(Base {
            structures: a.matrices().iter().map(RatMatrix::structure).collect(),
            a: a.clone(),
            alphabet,
        }))
    }

    fn dollar(&self) -> usize {
        self.alphabet.len() - 1
    }

    fn moves(&self, q: usize, letter: usize) -> Vec<(usize, Rational)> {
        self.a
            .matrix(letter)
            .row(q)
            .iter()
            .map(|(&p, x)| (p, x.clone()))
            .collect()
    }
}

/// Joins blocks with the separator of an automaton over `sigma` letters.
pub fn separated(sigma: usize, blocks: &[&[usize]]) -> Word {
    let mut out = Vec::new();
    for (k, b) in blocks.iter().enumerate() {
        if k > 0 {
            out.push(sigma);
        }
        out.extend_from_slice(b);
    }
    out
}

/// Splits a word at separators `sigma`.
pub fn split_separated(sigma: usize, word: &[usize]) -> Vec<Word> {
    word.split(|&x| x == sigma).map(<[usize]>::to_vec).collect()
}

// ---------------------------------------------------------------------------
// T and T'

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TState {
    Prefix,
    Structure(BoolMatrix),
    /// `k`-th block after the structure block.
    Suffix(u8),
}

/// Accepts with weight 1 exactly the words `u$v$w` (or `u$v$w$w'`) with
/// `M(v)` p-triangular. The structure of `M(v)` is tracked as a product of
/// letter structures, which requires nonnegative transitions.
pub struct TAutomaton {
    base: Arc<Base>,
    suffixes: u8,
}

pub fn build_t(a: &WeightedAutomaton) -> Result<TAutomaton> {
    Ok(TAutomaton {
        base: Base::new(a)?,
        suffixes: 1,
    })
}

/// `T'`, reading `u$v$w$w'`.
pub fn build_t_prime(a: &WeightedAutomaton) -> Result<TAutomaton> {
    Ok(TAutomaton {
        base: Base::new(a)?,
        suffixes: 2,
    })
}

impl LazyAutomaton for TAutomaton {
    type State = TState;

    fn alphabet(&self) -> &[String] {
        &self.base.alphabet
    }

    fn initial(&self) -> Vec<(TState, Rational)> {
        vec![(TState::Prefix, Rational::one())]
    }

    fn successors(&self, state: &TState, letter: usize) -> Vec<(TState, Rational)> {
        let one = Rational::one();
        let dollar = letter == self.base.dollar();
        let next = match (state, dollar) {
            (TState::Prefix, false) => Some(TState::Prefix),
            (TState::Prefix, true) => Some(TState::Structure(BoolMatrix::identity(self.base.a.num_states()))),
            (TState::Structure(s), false) => Some(TState::Structure(
                s.mul(&self.base.structures[letter]).expect("square structures"),
            )),
            (TState::Structure(s), true) => {
                crate::algebra::triangular::triangular_order(s).is_triangular().then_some(TState::Suffix(0))
            }
            (TState::Suffix(k), false) => Some(TState::Suffix(*k)),
            (TState::Suffix(k), true) => (k + 1 < self.suffixes).then(|| TState::Suffix(k + 1)),
        };
        next.map(|s| vec![(s, one)]).unwrap_or_default()
    }

    fn final_weight(&self, state: &TState) -> Rational {
        match state {
            TState::Suffix(k) if k + 1 == self.suffixes => Rational::one(),
            _ => Rational::zero(),
        }
    }

    fn state_name(&self, state: &TState) -> String {
        match state {
            TState::Prefix => "q0".into(),
            TState::Structure(s) => format!("{s:?}"),
            TState::Suffix(0) => "qa".into(),
            TState::Suffix(k) => format!("qa{k}"),
        }
    }
}

// ---------------------------------------------------------------------------
// B_n and its two-suffix variants

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BState {
    Prefix(usize),
    /// Guesses `g_1..g_{n-1}` followed by the current states `q_1..q_n` of
    /// the `n` simultaneous runs on `v`.
    Middle(Vec<usize>),
    /// Second-suffix variant: waiting through `w` with the run parked at `q`.
    Skip(usize),
    Suffix(usize),
    /// First-suffix variant: the run ended, `w'` is ignored.
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BMode {
    Single,
    FirstSuffix,
    SecondSuffix,
}

/// Maps `u$v$w` to `A(u v^n w)`.
pub struct BAutomaton {
    base: Arc<Base>,
    n: usize,
    mode: BMode,
}

fn new_b(a: &WeightedAutomaton, n: usize, mode: BMode) -> Result<BAutomaton> {
    if n == 0 {
        return Err(Error::InvalidArgument("B_n needs n >= 1".into()));
    }
    Ok(BAutomaton {
        base: Base::new(a)?,
        n,
        mode,
    })
}

pub fn build_b(a: &WeightedAutomaton, n: usize) -> Result<BAutomaton> {
    new_b(a, n, BMode::Single)
}

/// `B_{1,n}(u$v$w$w') = A(u v^n w)`.
pub fn build_b1(a: &WeightedAutomaton, n: usize) -> Result<BAutomaton> {
    new_b(a, n, BMode::FirstSuffix)
}

/// `B_{2,n}(u$v$w$w') = A(u v^n w')`.
pub fn build_b2(a: &WeightedAutomaton, n: usize) -> Result<BAutomaton> {
    new_b(a, n, BMode::SecondSuffix)
}

/// All tuples `(g_1..g_{len})` over `m` states, lexicographically.
fn all_tuples(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |q| {
                    let mut t = t.clone();
                    t.push(q);
                    t
                })
            })
            .collect();
    }
    out
}

impl BAutomaton {
    fn middle_step(&self, tuple: &[usize], letter: usize) -> Vec<(BState, Rational)> {
        let guesses = self.n - 1;
        let mut acc: Vec<(Vec<usize>, Rational)> = vec![(tuple[..guesses].to_vec(), Rational::one())];
        for &q in &tuple[guesses..] {
            let moves = self.base.moves(q, letter);
            if moves.is_empty() {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(acc.len() * moves.len());
            for (prefix, x) in &acc {
                for (p, y) in &moves {
                    let mut t = prefix.clone();
                    t.push(*p);
                    next.push((t, x * y));
                }
            }
            acc = next;
        }
        acc.into_iter().map(|(t, x)| (BState::Middle(t), x)).collect()
    }

    /// The run state handed over to the suffix, if the guesses check out.
    fn exit(&self, tuple: &[usize]) -> Option<usize> {
        let guesses = self.n - 1;
        let (g, runs) = tuple.split_at(guesses);
        (g == &runs[..guesses]).then(|| runs[guesses])
    }
}

impl LazyAutomaton for BAutomaton {
    type State = BState;

    fn alphabet(&self) -> &[String] {
        &self.base.alphabet
    }

    fn initial(&self) -> Vec<(BState, Rational)> {
        self.base
            .a
            .initial()
            .iter()
            .map(|(q, x)| (BState::Prefix(q), x.clone()))
            .collect()
    }

    fn successors(&self, state: &BState, letter: usize) -> Vec<(BState, Rational)> {
        let one = || Rational::one();
        if letter != self.base.dollar() {
            return match state {
                BState::Prefix(q) => self
                    .base
                    .moves(*q, letter)
                    .into_iter()
                    .map(|(p, x)| (BState::Prefix(p), x))
                    .collect(),
                BState::Middle(t) => self.middle_step(t, letter),
                BState::Skip(q) => vec![(BState::Skip(*q), one())],
                BState::Suffix(q) => self
                    .base
                    .moves(*q, letter)
                    .into_iter()
                    .map(|(p, x)| (BState::Suffix(p), x))
                    .collect(),
                BState::Done => vec![(BState::Done, one())],
            };
        }
        match state {
            BState::Prefix(q) => {
                let m = self.base.a.num_states();
                all_tuples(m, self.n - 1)
                    .into_iter()
                    .map(|g| {
                        let mut t = g.clone();
                        t.push(*q);
                        t.extend_from_slice(&g);
                        (BState::Middle(t), one())
                    })
                    .collect()
            }
            BState::Middle(t) => match (self.exit(t), self.mode) {
                (Some(q), BMode::SecondSuffix) => vec![(BState::Skip(q), one())],
                (Some(q), _) => vec![(BState::Suffix(q), one())],
                (None, _) => Vec::new(),
            },
            BState::Skip(q) => vec![(BState::Suffix(*q), one())],
            BState::Suffix(q) if self.mode == BMode::FirstSuffix => {
                let f = self.base.a.final_weights().get(*q);
                if f.is_zero() {
                    Vec::new()
                } else {
                    vec![(BState::Done, f)]
                }
            }
            BState::Suffix(_) | BState::Done => Vec::new(),
        }
    }

    fn final_weight(&self, state: &BState) -> Rational {
        match (state, self.mode) {
            (BState::Suffix(q), BMode::Single | BMode::SecondSuffix) => self.base.a.final_weights().get(*q),
            (BState::Done, BMode::FirstSuffix) => Rational::one(),
            _ => Rational::zero(),
        }
    }

    fn state_name(&self, state: &BState) -> String {
        let names = self.base.a.states();
        match state {
            BState::Prefix(q) => format!("{}^1", names[*q]),
            BState::Middle(t) => {
                let parts: Vec<&str> = t.iter().map(|&q| names[q].as_str()).collect();
                format!("({})", parts.join(","))
            }
            BState::Skip(q) => format!("{}^s", names[*q]),
            BState::Suffix(q) => format!("{}^3", names[*q]),
            BState::Done => "done".into(),
        }
    }
}

// ---------------------------------------------------------------------------
// C_i

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CState {
    Start,
    Copy(usize),
    End,
}

/// Maps `u$v$w` to `M(v)_{ii}`.
pub struct CAutomaton {
    base: Arc<Base>,
    i: usize,
}

/// `i` is a 0-based state index.
pub fn build_c(a: &WeightedAutomaton, i: usize) -> Result<CAutomaton> {
    if i >= a.num_states() {
        return Err(Error::IndexOutOfRange {
            index: i,
            size: a.num_states(),
        });
    }
    Ok(CAutomaton { base: Base::new(a)?, i })
}

impl LazyAutomaton for CAutomaton {
    type State = CState;

    fn alphabet(&self) -> &[String] {
        &self.base.alphabet
    }

    fn initial(&self) -> Vec<(CState, Rational)> {
        vec![(CState::Start, Rational::one())]
    }

    fn successors(&self, state: &CState, letter: usize) -> Vec<(CState, Rational)> {
        let one = Rational::one();
        let dollar = letter == self.base.dollar();
        match (state, dollar) {
            (CState::Start, false) => vec![(CState::Start, one)],
            (CState::Start, true) => vec![(CState::Copy(self.i), one)],
            (CState::Copy(q), false) => self
                .base
                .moves(*q, letter)
                .into_iter()
                .map(|(p, x)| (CState::Copy(p), x))
                .collect(),
            (CState::Copy(q), true) if *q == self.i => vec![(CState::End, one)],
            (CState::Copy(_), true) => Vec::new(),
            (CState::End, false) => vec![(CState::End, one)],
            (CState::End, true) => Vec::new(),
        }
    }

    fn final_weight(&self, state: &CState) -> Rational {
        if *state == CState::End {
            Rational::one()
        } else {
            Rational::zero()
        }
    }

    fn state_name(&self, state: &CState) -> String {
        match state {
            CState::Start => "q0".into(),
            CState::Copy(q) => self.base.a.states()[*q].clone(),
            CState::End => "qf".into(),
        }
    }
}

// ---------------------------------------------------------------------------
// P_A and Q_A

pub type PFactor = Union<BAutomaton, Product<BAutomaton, CAutomaton>>;
pub type PAutomaton = Product<TAutomaton, ProductMany<PFactor>>;
pub type QAutomaton = Product<TAutomaton, Union<Product<BAutomaton, BAutomaton>, Product<BAutomaton, BAutomaton>>>;

/// `P_A = T * prod_i (B_{m+1} - B_m C_i)`, zero iff `a` is weakly pumpable.
pub fn build_p(a: &WeightedAutomaton) -> Result<PAutomaton> {
    let m = a.num_states();
    let t = build_t(a)?;
    let factors = (0..m)
        .map(|i| Union::difference(build_b(a, m + 1)?, Product::new(build_b(a, m)?, build_c(a, i)?)?))
        .collect::<Result<Vec<_>>>()?;
    let alphabet = t.alphabet().to_vec();
    Product::new(t, ProductMany::new(alphabet, factors)?)
}

/// `Q_A = T' * (B_{1,m+1} B_{2,m} - B_{1,m} B_{2,m+1})`.
pub fn build_q(a: &WeightedAutomaton) -> Result<QAutomaton> {
    let m = a.num_states();
    let left = Product::new(build_b1(a, m + 1)?, build_b2(a, m)?)?;
    let right = Product::new(build_b1(a, m)?, build_b2(a, m + 1)?)?;
    Product::new(build_t_prime(a)?, Union::difference(left, right)?)
}

// ---------------------------------------------------------------------------
// Verdicts

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PumpMethod {
    ExactZeroness,
    BoundedFalsifier,
}

impl PumpMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            PumpMethod::ExactZeroness => "exact-zeroness",
            PumpMethod::BoundedFalsifier => "bounded-falsifier",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PumpWitness {
    pub u: Word,
    pub v: Word,
    pub w: Word,
    /// Present for blind violations: no single `d` serves both suffixes.
    pub w2: Option<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PumpVerdict {
    pub pumpable: bool,
    pub method: PumpMethod,
    pub witness: Option<PumpWitness>,
    /// States discovered by zeroness, or triples examined by the falsifier.
    pub states_explored: usize,
    /// Size of the automaton the pumping constant refers to.
    pub m: usize,
}

/// Trims, moves signs to the final vector, trims again, and scales to integer
/// weights. Values change by the factor `x^(|w|+2)` recorded as `scale`.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub automaton: WeightedAutomaton,
    pub scale: BigUint,
}

pub fn preprocess(a: &WeightedAutomaton) -> Preprocessed {
    let nonneg = a.trim().make_nonnegative().trim();
    let (automaton, scale) = nonneg.scale_to_integers();
    Preprocessed { automaton, scale }
}

fn diagonal_candidates(m: &RatMatrix) -> Vec<Rational> {
    let set: BTreeSet<Rational> = m.diagonal().into_iter().collect();
    set.into_iter().collect()
}

/// Values `A(u v^(m+k) w)` for `k = 0..=max_n`.
fn pumped_values(a: &WeightedAutomaton, m: usize, u: &[usize], v: &[usize], w: &[usize], max_n: usize) -> Result<Vec<Rational>> {
    let mv = a.word_matrix(v)?;
    let mut x = a.forward(u)?.mul_matrix(&mv.pow(m as u64)?)?;
    let back = a.backward(w)?;
    let mut out = Vec::with_capacity(max_n + 1);
    for _ in 0..=max_n {
        out.push(x.dot(&back)?);
        x = x.mul_matrix(&mv)?;
    }
    Ok(out)
}

/// Whether `values[n] = d^n values[0]` for every `n`.
fn pumps_with(values: &[Rational], d: &Rational) -> bool {
    let mut p = Rational::one();
    values.iter().skip(1).all(|x| {
        p *= d;
        *x == &p * &values[0]
    })
}

/// Diagonal entries of `M(v)` that pump `u v^m w`, or `None` when `M(v)` is
/// not p-triangular.
pub fn admissible_factors(
    a: &WeightedAutomaton,
    m: usize,
    u: &[usize],
    v: &[usize],
    w: &[usize],
    max_n: usize,
) -> Result<Option<Vec<Rational>>> {
    let mv = a.word_matrix(v)?;
    if !p_triangular(&mv)?.is_triangular() {
        return Ok(None);
    }
    let values = pumped_values(a, m, u, v, w, max_n.max(1))?;
    Ok(Some(
        diagonal_candidates(&mv)
            .into_iter()
            .filter(|d| pumps_with(&values, d))
            .collect(),
    ))
}

/// Re-checks a violation by direct evaluation on `a` with constant `m`.
pub fn witness_is_violation(a: &WeightedAutomaton, m: usize, wit: &PumpWitness) -> Result<bool> {
    let Some(d1) = admissible_factors(a, m, &wit.u, &wit.v, &wit.w, 1)? else {
        return Ok(false);
    };
    match &wit.w2 {
        None => Ok(d1.is_empty()),
        Some(w2) => {
            let d2 = admissible_factors(a, m, &wit.u, &wit.v, w2, 1)?.unwrap_or_default();
            Ok(d1.iter().all(|d| !d2.contains(d)))
        }
    }
}

// ---------------------------------------------------------------------------
// Exact deciders

/// Successor count of the initial state of `P_A` (resp. `Q_A`) on the first
/// separator: the guess fan-out that dominates exploration.
pub fn separator_fanout(m: usize, blind: bool) -> BigUint {
    let m_big = BigUint::from(m);
    if m == 0 {
        return BigUint::zero();
    }
    if blind {
        BigUint::from(2u32) * m_big.pow((2 * m - 1) as u32)
    } else {
        (m_big.pow(m as u32) + m_big.pow((m - 1) as u32)).pow(m as u32)
    }
}

fn check_fanout(m: usize, blind: bool, budget: usize) -> Result<()> {
    let f = separator_fanout(m, blind);
    if f > BigUint::from(budget) {
        let reached = usize::try_from(&f).unwrap_or(usize::MAX);
        return Err(Error::BudgetExceeded { reached, budget });
    }
    Ok(())
}

fn parse_witness(sigma: usize, word: &[usize], blind: bool) -> PumpWitness {
    let mut parts = split_separated(sigma, word).into_iter();
    let mut next = || parts.next().unwrap_or_default();
    let (u, v, w) = (next(), next(), next());
    let w2 = blind.then(next);
    PumpWitness { u, v, w, w2 }
}

/// Weak pumpability of an automaton already in preprocessed form.
fn weak_exact(a: &WeightedAutomaton, budget: usize) -> Result<PumpVerdict> {
    let m = a.num_states();
    let mut verdict = PumpVerdict {
        pumpable: true,
        method: PumpMethod::ExactZeroness,
        witness: None,
        states_explored: 0,
        m,
    };
    if m == 0 {
        return Ok(verdict);
    }
    check_fanout(m, false, budget)?;
    let z = zeroness(&build_p(a)?, budget)?;
    verdict.states_explored = z.states_explored;
    if let Some((word, _)) = z.witness {
        verdict.pumpable = false;
        verdict.witness = Some(parse_witness(a.alphabet().len(), &word, false));
    }
    Ok(verdict)
}

fn blind_exact(a: &WeightedAutomaton, budget: usize) -> Result<PumpVerdict> {
    let mut verdict = weak_exact(a, budget)?;
    if !verdict.pumpable || verdict.m == 0 {
        return Ok(verdict);
    }
    check_fanout(verdict.m, true, budget)?;
    let z = zeroness(&build_q(a)?, budget)?;
    verdict.states_explored += z.states_explored;
    if let Some((word, _)) = z.witness {
        verdict.pumpable = false;
        verdict.witness = Some(parse_witness(a.alphabet().len(), &word, true));
    }
    Ok(verdict)
}

/// Exact weak pumpability: zeroness of `P_A` on the preprocessed automaton.
/// By the equivalence of weak and full pumpability this decides pumpability.
pub fn is_weakly_pumpable(a: &WeightedAutomaton, budget: usize) -> Result<PumpVerdict> {
    weak_exact(&preprocess(a).automaton, budget)
}

/// Exact blind pumpability: weak pumpability and zeroness of `Q_A`.
pub fn is_blindly_pumpable(a: &WeightedAutomaton, budget: usize) -> Result<PumpVerdict> {
    blind_exact(&preprocess(a).automaton, budget)
}

// ---------------------------------------------------------------------------
// Bounded falsifier

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FalsifierBounds {
    pub max_u: usize,
    pub max_v: usize,
    pub max_w: usize,
    /// Checks `A(u v^(m+n) w) = d^n A(u v^m w)` for `n = 1..=max_n`.
    pub max_n: usize,
}

impl Default for FalsifierBounds {
    fn default() -> Self {
        FalsifierBounds {
            max_u: 3,
            max_v: 3,
            max_w: 3,
            max_n: 1,
        }
    }
}

impl FalsifierBounds {
    pub fn new(max_u: usize, max_v: usize, max_w: usize) -> Self {
        FalsifierBounds {
            max_u,
            max_v,
            max_w,
            max_n: 1,
        }
    }
}

fn shortlex(w: &Word) -> (usize, &Word) {
    (w.len(), w)
}

/// Searches for a violation among all `u, v, w` within `bounds`, `v` nonempty.
///
/// Triples are visited by total length, then `u`, `v`, `w` in shortlex
/// order; in blind mode pairs `(u, v)` are ordered the same way and every
/// suffix is tried for each. A `true` verdict only means no violation exists
/// within the bounds. `m` is the size of `a` as given.
pub fn falsify_pumpability(a: &WeightedAutomaton, bounds: FalsifierBounds, blind: bool) -> Result<PumpVerdict> {
    let m = a.num_states();
    let k = a.alphabet().len();
    let us = words_up_to(k, bounds.max_u);
    let vs: Vec<Word> = words_up_to(k, bounds.max_v).into_iter().filter(|v| !v.is_empty()).collect();
    let ws = words_up_to(k, bounds.max_w);
    let max_n = bounds.max_n.max(1);
    let mut verdict = PumpVerdict {
        pumpable: true,
        method: PumpMethod::BoundedFalsifier,
        witness: None,
        states_explored: 0,
        m,
    };
    // No states: the zero function, and no diagonal to draw d from.
    if m == 0 {
        return Ok(verdict);
    }

    let mut pairs: Vec<(&Word, &Word)> = us.iter().flat_map(|u| vs.iter().map(move |v| (u, v))).collect();
    pairs.sort_by(|x, y| {
        (x.0.len() + x.1.len(), shortlex(x.0), shortlex(x.1)).cmp(&(y.0.len() + y.1.len(), shortlex(y.0), shortlex(y.1)))
    });

    // Per pair: diagonal candidates and the forward vectors I M(u) M(v)^(m+j).
    struct Pumped {
        candidates: Vec<Rational>,
        forwards: Vec<crate::algebra::RatVector>,
    }
    let prepare = |u: &Word, v: &Word| -> Result<Option<Pumped>> {
        let mv = a.word_matrix(v)?;
        if let Triangularity::Cycle { .. } = p_triangular(&mv)? {
            return Ok(None);
        }
        let mut x = a.forward(u)?.mul_matrix(&mv.pow(m as u64)?)?;
        let mut forwards = Vec::with_capacity(max_n + 1);
        for _ in 0..=max_n {
            forwards.push(x.clone());
            x = x.mul_matrix(&mv)?;
        }
        Ok(Some(Pumped {
            candidates: diagonal_candidates(&mv),
            forwards,
        }))
    };
    let backs: Vec<crate::algebra::RatVector> = ws.iter().map(|w| a.backward(w)).collect::<Result<_>>()?;
    let admissible = |p: &Pumped, wi: usize| -> Result<Vec<Rational>> {
        let values: Vec<Rational> = p.forwards.iter().map(|x| x.dot(&backs[wi])).collect::<Result<_>>()?;
        Ok(p.candidates.iter().filter(|d| pumps_with(&values, d)).cloned().collect())
    };

    if !blind {
        let mut triples: Vec<(usize, usize)> = (0..pairs.len()).flat_map(|p| (0..ws.len()).map(move |w| (p, w))).collect();
        let total = |(p, w): &(usize, usize)| pairs[*p].0.len() + pairs[*p].1.len() + ws[*w].len();
        triples.sort_by(|x, y| {
            (total(x), shortlex(pairs[x.0].0), shortlex(pairs[x.0].1), shortlex(&ws[x.1])).cmp(&(
                total(y),
                shortlex(pairs[y.0].0),
                shortlex(pairs[y.0].1),
                shortlex(&ws[y.1]),
            ))
        });
        let mut cache: Vec<Option<Option<Pumped>>> = (0..pairs.len()).map(|_| None).collect();
        for (p, wi) in triples {
            if cache[p].is_none() {
                cache[p] = Some(prepare(pairs[p].0, pairs[p].1)?);
            }
            let Some(pumped) = cache[p].as_ref().unwrap() else {
                continue;
            };
            verdict.states_explored += 1;
            if admissible(pumped, wi)?.is_empty() {
                verdict.pumpable = false;
                verdict.witness = Some(PumpWitness {
                    u: pairs[p].0.clone(),
                    v: pairs[p].1.clone(),
                    w: ws[wi].clone(),
                    w2: None,
                });
                return Ok(verdict);
            }
        }
        return Ok(verdict);
    }

    for (u, v) in pairs {
        let Some(pumped) = prepare(u, v)? else {
            continue;
        };
        // Admissible sets are either everything (when A(u v^m w) = 0) or a
        // singleton, so an empty running intersection always comes from two
        // suffixes with distinct singletons.
        let mut common: Option<(usize, Vec<Rational>)> = None;
        for wi in 0..ws.len() {
            verdict.states_explored += 1;
            let ds = admissible(&pumped, wi)?;
            let witness = |w2: Option<Word>, w: &Word| PumpWitness {
                u: u.clone(),
                v: v.clone(),
                w: w.clone(),
                w2,
            };
            if ds.is_empty() {
                verdict.pumpable = false;
                verdict.witness = Some(witness(None, &ws[wi]));
                return Ok(verdict);
            }
            if ds.len() == pumped.candidates.len() {
                continue;
            }
            match &common {
                None => common = Some((wi, ds)),
                Some((first, c)) => {
                    if !c.iter().any(|d| ds.contains(d)) {
                        verdict.pumpable = false;
                        verdict.witness = Some(witness(Some(ws[wi].clone()), &ws[*first]));
                        return Ok(verdict);
                    }
                }
            }
        }
    }
    Ok(verdict)
}

// ---------------------------------------------------------------------------
// Method selection

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecideMethod {
    Exact,
    Falsify,
    /// Exact where feasible, falsifier otherwise.
    Auto,
}

/// Where the exact deciders are expected to finish: `m <= 2`, or a unary
/// alphabet with `m <= 3`.
pub fn exact_is_feasible(m: usize, alphabet_size: usize) -> bool {
    m <= 2 || (alphabet_size == 1 && m <= 3)
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    pub method: DecideMethod,
    pub bounds: FalsifierBounds,
    pub budget: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            method: DecideMethod::Auto,
            bounds: FalsifierBounds::default(),
            budget: DEFAULT_STATE_BUDGET,
        }
    }
}

/// Preprocesses `a` and decides (blind) pumpability with the chosen method.
/// Witnesses refer to the returned preprocessed automaton, whose values
/// differ from those of `a` by the factor `scale^(|w|+2)`.
pub fn decide_pumpability(a: &WeightedAutomaton, blind: bool, opts: &DecideOptions) -> Result<(PumpVerdict, Preprocessed)> {
    let pre = preprocess(a);
    let p = &pre.automaton;
    let exact = |p: &WeightedAutomaton| if blind { blind_exact(p, opts.budget) } else { weak_exact(p, opts.budget) };
    let verdict = match opts.method {
        DecideMethod::Exact => exact(p)?,
        DecideMethod::Falsify => falsify_pumpability(p, opts.bounds, blind)?,
        DecideMethod::Auto => {
            if exact_is_feasible(p.num_states(), p.alphabet().len()) {
                match exact(p) {
                    Err(e) if e.is_resource() => falsify_pumpability(p, opts.bounds, blind)?,
                    r => r?,
                }
            } else {
                falsify_pumpability(p, opts.bounds, blind)?
            }
        }
    };
    Ok((verdict, pre))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use crate::lazy::evaluate_lazy;

    fn diag23() -> WeightedAutomaton {
        let mut a = WeightedAutomaton::with_names(&["p", "q"], &["a"]).unwrap();
        for q in 0..2 {
            a.set_initial(q, int(1)).unwrap();
            a.set_final(q, int(1)).unwrap();
        }
        a.set_transition(0, 0, 0, int(2)).unwrap();
        a.set_transition(1, 0, 1, int(3)).unwrap();
        a
    }

    #[test]
    fn constructions_on_diag() {
        let a = diag23();
        let word = separated(1, &[&[], &[0], &[]]);
        assert_eq!(evaluate_lazy(&build_c(&a, 1).unwrap(), &word).unwrap(), int(3));
        assert_eq!(evaluate_lazy(&build_b(&a, 2).unwrap(), &word).unwrap(), int(13));
        assert_eq!(evaluate_lazy(&build_t(&a).unwrap(), &word).unwrap(), int(1));
        assert_eq!(evaluate_lazy(&build_t(&a).unwrap(), &[0, 0]).unwrap(), int(0));
        let p = build_p(&a).unwrap();
        // T * (35 - 13*2) * (35 - 13*3)
        assert_eq!(evaluate_lazy(&p, &word).unwrap(), int(9 * -4));
    }

    #[test]
    fn diag_is_not_pumpable() {
        let v = is_weakly_pumpable(&diag23(), DEFAULT_STATE_BUDGET).unwrap();
        assert!(!v.pumpable);
        let w = v.witness.unwrap();
        assert_eq!((w.u, w.v, w.w), (vec![], vec![0], vec![]));
        let f = falsify_pumpability(&diag23(), FalsifierBounds::new(0, 1, 0), false).unwrap();
        assert!(!f.pumpable);
    }

    #[test]
    fn separator_collision() {
        let a = WeightedAutomaton::with_names(&["q"], &["$"]).unwrap();
        assert!(matches!(build_t(&a), Err(Error::SeparatorCollision)));
    }

    #[test]
    fn fanout() {
        assert_eq!(separator_fanout(2, false), BigUint::from(36u32));
        assert_eq!(separator_fanout(2, true), BigUint::from(16u32));
    }
}
