//! Determinisability and unambiguisability: the twin property, the combined
//! deciders, and diagnostics around depumping.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_prime::buffer::{NaiveBuffer, PrimeBufferExt};
use num_prime::PrimeBuffer;
use num_prime::FactorizationConfig;
use num_traits::{One, Signed, Zero};

use crate::algebra::linalg::RowSpan;
use crate::algebra::Rational;
use crate::analysis::{classify_ambiguity, AmbiguityClass};
use crate::automaton::{words_up_to, WeightedAutomaton, Word};
use crate::equivalence::{zeroness, DEFAULT_STATE_BUDGET};
use crate::error::{Error, Result};
use crate::lazy::{LazyAutomaton, Union};
use crate::pumpability::{decide_pumpability, DecideOptions, PumpVerdict};

// ---------------------------------------------------------------------------
// Twin property

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinWitness {
    pub u: Word,
    pub v: Word,
    pub p: usize,
    pub q: usize,
    /// `|M(v)_{pp}|` and `|M(v)_{qq}|`.
    pub weight_p: Rational,
    pub weight_q: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinVerdict {
    pub holds: bool,
    pub witness: Option<TwinWitness>,
    /// The automaton the witness refers to.
    pub trimmed: WeightedAutomaton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Transition {
    from: usize,
    letter: usize,
    to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum PairState {
    /// Both runs on `u`.
    Prefix(usize, usize),
    /// Cycle block: the runs started at `p` and `q` and are now at `c1`, `c2`.
    Cycle { p: usize, q: usize, c1: usize, c2: usize },
}

/// Reads `w1 $ w2` over pairs of same-letter transitions. Outputs
/// `|M(v)_{pp}|` (first run) or `|M(v)_{qq}|` (second run) when `w1` is a
/// pair of runs on `u` ending in `p`, `q` and `w2` a pair of cycles on `v`.
struct PairRuns<'a> {
    a: &'a WeightedAutomaton,
    transitions: Vec<Transition>,
    letters: Vec<(usize, usize)>,
    alphabet: Vec<String>,
    second: bool,
}

impl<'a> PairRuns<'a> {
    fn new(a: &'a WeightedAutomaton, second: bool) -> Self {
        let mut transitions = Vec::new();
        for letter in 0..a.alphabet().len() {
            for (from, to, _) in a.matrix(letter).iter() {
                transitions.push(Transition { from, letter, to });
            }
        }
        let mut letters = Vec::new();
        for (i, s) in transitions.iter().enumerate() {
            for (j, t) in transitions.iter().enumerate() {
                if s.letter == t.letter {
                    letters.push((i, j));
                }
            }
        }
        let name = |t: &Transition| format!("{}-{}->{}", a.states()[t.from], a.alphabet()[t.letter], a.states()[t.to]);
        let mut alphabet: Vec<String> = letters
            .iter()
            .map(|&(i, j)| format!("[{}|{}]", name(&transitions[i]), name(&transitions[j])))
            .collect();
        alphabet.push("$".into());
        PairRuns {
            a,
            transitions,
            letters,
            alphabet,
            second,
        }
    }

    fn dollar(&self) -> usize {
        self.letters.len()
    }
}

impl LazyAutomaton for PairRuns<'_> {
    type State = PairState;

    fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    fn initial(&self) -> Vec<(PairState, Rational)> {
        let inits: Vec<usize> = self.a.initial().iter().map(|(q, _)| q).collect();
        inits
            .iter()
            .flat_map(|&p| inits.iter().map(move |&q| (PairState::Prefix(p, q), Rational::one())))
            .collect()
    }

    fn successors(&self, state: &PairState, letter: usize) -> Vec<(PairState, Rational)> {
        if letter == self.dollar() {
            return match *state {
                PairState::Prefix(p, q) => vec![(PairState::Cycle { p, q, c1: p, c2: q }, Rational::one())],
                PairState::Cycle { .. } => Vec::new(),
            };
        }
        let (i, j) = self.letters[letter];
        let (s, t) = (self.transitions[i], self.transitions[j]);
        match *state {
            PairState::Prefix(x, y) if s.from == x && t.from == y => {
                vec![(PairState::Prefix(s.to, t.to), Rational::one())]
            }
            PairState::Cycle { p, q, c1, c2 } if s.from == c1 && t.from == c2 => {
                let used = if self.second { t } else { s };
                let w = self.a.matrix(used.letter).get(used.from, used.to).abs();
                vec![(PairState::Cycle { p, q, c1: s.to, c2: t.to }, w)]
            }
            _ => Vec::new(),
        }
    }

    fn final_weight(&self, state: &PairState) -> Rational {
        match *state {
            PairState::Cycle { p, q, c1, c2 } if c1 == p && c2 == q => Rational::one(),
            _ => Rational::zero(),
        }
    }
}

fn require_unambiguous(a: &WeightedAutomaton) -> Result<AmbiguityClass> {
    let class = classify_ambiguity(a);
    if class > AmbiguityClass::Unambiguous {
        return Err(Error::NotUnambiguous(class.to_string()));
    }
    Ok(class)
}

/// Decides the twin property of an unambiguous automaton, after trimming,
/// by comparing the two cycle-weight automata for equality.
pub fn twin_property(a: &WeightedAutomaton) -> Result<TwinVerdict> {
    require_unambiguous(a)?;
    let t = a.trim();
    let first = PairRuns::new(&t, false);
    let second = PairRuns::new(&t, true);
    let z = zeroness(&Union::difference(&first, &second)?, DEFAULT_STATE_BUDGET)?;
    let Some((word, _)) = z.witness else {
        return Ok(TwinVerdict {
            holds: true,
            witness: None,
            trimmed: t,
        });
    };
    let cut = word.iter().position(|&x| x == first.dollar()).expect("witness has a separator");
    let (w1, w2) = (&word[..cut], &word[cut + 1..]);
    let pair = |k: usize| {
        let (i, j) = first.letters[k];
        (first.transitions[i], first.transitions[j])
    };
    let u: Word = w1.iter().map(|&k| pair(k).0.letter).collect();
    let v: Word = w2.iter().map(|&k| pair(k).0.letter).collect();
    // A nonzero difference needs a nonempty cycle block, whose first letter
    // fixes both cycle states.
    let (s, r) = pair(w2[0]);
    let (p, q) = (s.from, r.from);
    let mv = t.word_matrix(&v)?;
    let witness = TwinWitness {
        weight_p: mv.get(p, p).abs(),
        weight_q: mv.get(q, q).abs(),
        u,
        v,
        p,
        q,
    };
    Ok(TwinVerdict {
        holds: false,
        witness: Some(witness),
        trimmed: t,
    })
}

/// A trimmed unambiguous automaton is determinisable iff it has the twin
/// property.
pub fn decide_determinisable_unambiguous(a: &WeightedAutomaton) -> Result<TwinVerdict> {
    twin_property(a)
}

// ---------------------------------------------------------------------------
// Combined deciders

#[derive(Debug, Clone)]
pub enum DecisionBasis {
    /// Settled by the ambiguity class alone.
    Class,
    Twin(TwinVerdict),
    Pump(PumpVerdict),
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub holds: bool,
    pub class: AmbiguityClass,
    pub basis: DecisionBasis,
}

fn pump_decision(a: &WeightedAutomaton, class: AmbiguityClass, blind: bool, opts: &DecideOptions) -> Result<Decision> {
    let (verdict, _) = decide_pumpability(a, blind, opts)?;
    Ok(Decision {
        holds: verdict.pumpable,
        class,
        basis: DecisionBasis::Pump(verdict),
    })
}

fn supported_class(a: &WeightedAutomaton) -> Result<AmbiguityClass> {
    let class = classify_ambiguity(a);
    if class == AmbiguityClass::ExponentiallyAmbiguous {
        return Err(Error::ExponentiallyAmbiguous);
    }
    Ok(class)
}

/// Whether some unambiguous automaton computes the same function. Pumpable
/// automata are unambiguisable, and conversely for polynomial ambiguity.
pub fn decide_unambiguisable(a: &WeightedAutomaton, opts: &DecideOptions) -> Result<Decision> {
    match supported_class(a)? {
        class @ (AmbiguityClass::Deterministic | AmbiguityClass::Unambiguous) => Ok(Decision {
            holds: true,
            class,
            basis: DecisionBasis::Class,
        }),
        class => pump_decision(a, class, false, opts),
    }
}

/// Whether some deterministic automaton computes the same function: the
/// twin property for unambiguous inputs, blind pumpability otherwise.
pub fn decide_determinisable(a: &WeightedAutomaton, opts: &DecideOptions) -> Result<Decision> {
    match supported_class(a)? {
        AmbiguityClass::Deterministic => Ok(Decision {
            holds: true,
            class: AmbiguityClass::Deterministic,
            basis: DecisionBasis::Class,
        }),
        AmbiguityClass::Unambiguous => {
            let twin = twin_property(a)?;
            Ok(Decision {
                holds: twin.holds,
                class: AmbiguityClass::Unambiguous,
                basis: DecisionBasis::Twin(twin),
            })
        }
        class => pump_decision(a, class, true, opts),
    }
}

// ---------------------------------------------------------------------------
// Prime divisors

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeProbe {
    pub primes: BTreeSet<BigUint>,
    /// Cofactors that resisted factorization.
    pub composites: BTreeSet<BigUint>,
    /// New prime (or opaque) divisors appeared among words of maximal length.
    pub growth: bool,
    pub values_checked: usize,
}

/// Trial division bound used before probabilistic factoring.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Collects prime divisors of the values on all words of length at most
/// `max_len`. A set that keeps growing is evidence, never proof, against
/// unambiguisability.
pub fn prime_divisor_probe(a: &WeightedAutomaton, max_len: usize) -> Result<PrimeProbe> {
    if !a.is_integer_weighted() {
        return Err(Error::NotInteger);
    }
    let mut buffer = NaiveBuffer::new();
    buffer.reserve(TRIAL_DIVISION_LIMIT);
    let mut config = FactorizationConfig::default();
    config.td_limit = Some(TRIAL_DIVISION_LIMIT);
    let mut probe = PrimeProbe {
        primes: BTreeSet::new(),
        composites: BTreeSet::new(),
        growth: false,
        values_checked: 0,
    };
    for w in words_up_to(a.alphabet().len(), max_len) {
        let value = a.evaluate(&w)?;
        probe.values_checked += 1;
        if value.is_zero() {
            continue;
        }
        let n = value.to_integer().abs().to_biguint().unwrap();
        if n.is_one() {
            continue;
        }
        let (found, rest) = buffer.factors(n, Some(config));
        let last = w.len() == max_len;
        for p in found.into_keys() {
            if probe.primes.insert(p) && last {
                probe.growth = true;
            }
        }
        for c in rest.unwrap_or_default() {
            if probe.composites.insert(c) && last {
                probe.growth = true;
            }
        }
    }
    Ok(probe)
}

// ---------------------------------------------------------------------------
// Cuts and depumping

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    pub u1: Word,
    pub u2: Word,
    pub u3: Word,
    /// One factor per suffix sample; all equal in blind mode.
    pub d: Vec<Rational>,
}

impl CutResult {
    /// The shared factor, when every sample uses the same one.
    pub fn common_factor(&self) -> Option<&Rational> {
        let first = self.d.first()?;
        self.d.iter().all(|x| x == first).then_some(first)
    }
}

/// Searches `u = u1 u2 u3` with `0 < |u2| <= window`, `M(u2)` of idempotent
/// structure, and factors `d` on the diagonal of `M(u2)` such that
/// `A(u v) = d A(u1 u3 v)` for each sample `v`. In blind mode one `d` must
/// serve all samples.
///
/// Candidates are ordered by `u1 u3` in shortlex order, then by longer
/// `u1`, then by smaller `d`; the first that validates is returned.
pub fn cut_search(a: &WeightedAutomaton, u: &[usize], samples: &[Word], window: usize, blind: bool) -> Result<Option<CutResult>> {
    let n = u.len();
    let backs = samples.iter().map(|v| a.backward(v)).collect::<Result<Vec<_>>>()?;
    let whole = a.forward(u)?;
    let lhs = backs.iter().map(|b| whole.dot(b)).collect::<Result<Vec<_>>>()?;

    let mut cuts: Vec<(Word, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..=(i + window).min(n) {
            let mut rest = u[..i].to_vec();
            rest.extend_from_slice(&u[j..]);
            cuts.push((rest, i, j));
        }
    }
    cuts.sort_by(|x, y| (x.0.len(), &x.0, std::cmp::Reverse(x.1)).cmp(&(y.0.len(), &y.0, std::cmp::Reverse(y.1))));

    for (rest, i, j) in cuts {
        let m2 = a.word_matrix(&u[i..j])?;
        if !m2.structure().is_idempotent() {
            continue;
        }
        let candidates: BTreeSet<Rational> = m2.diagonal().into_iter().filter(|d| !d.is_zero()).collect();
        let short = a.forward(&rest)?;
        let rhs = backs.iter().map(|b| short.dot(b)).collect::<Result<Vec<_>>>()?;
        let fits = |d: &Rational, k: usize| lhs[k] == d * &rhs[k];
        let found = if blind {
            candidates
                .iter()
                .find(|d| (0..samples.len()).all(|k| fits(d, k)))
                .map(|d| vec![d.clone(); samples.len()])
        } else {
            (0..samples.len())
                .map(|k| candidates.iter().find(|d| fits(d, k)).cloned())
                .collect::<Option<Vec<_>>>()
        };
        if let Some(d) = found {
            return Ok(Some(CutResult {
                u1: u[..i].to_vec(),
                u2: u[i..j].to_vec(),
                u3: u[j..].to_vec(),
                d,
            }));
        }
    }
    Ok(None)
}

/// Words `v` whose vectors `M(v) F` span all such vectors, found
/// breadth-first. Checking a relation on these suffixes checks it on all.
pub fn suffix_basis(a: &WeightedAutomaton) -> Result<Vec<Word>> {
    let n = a.num_states();
    let mut span = RowSpan::new(n);
    let mut out = Vec::new();
    let mut frontier = vec![(Vec::new(), a.final_weights().clone())];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, v) in frontier {
            if !span.insert(&v.to_dense()) {
                continue;
            }
            for x in 0..a.alphabet().len() {
                let mut w2 = vec![x];
                w2.extend_from_slice(&w);
                next.push((w2, a.matrix(x).mul_vector(&v)?));
            }
            out.push(w);
        }
        frontier = next;
    }
    Ok(out)
}

/// Evaluates `w` by streaming it through a buffer of at most `window`
/// letters, depumping a blind cut whenever the buffer fills. The cut is
/// validated against a spanning set of suffixes, so a successful result
/// equals `A(w)` exactly.
pub fn depump_evaluate(a: &WeightedAutomaton, w: &[usize], window: usize) -> Result<Rational> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let samples = suffix_basis(a)?;
    let mut factor = Rational::one();
    let mut buffer: Word = Vec::with_capacity(window);
    for &x in w {
        buffer.push(x);
        if buffer.len() < window {
            continue;
        }
        let Some(cut) = cut_search(a, &buffer, &samples, window, true)? else {
            return Err(Error::DepumpFailed {
                buffer: a.format_word(&buffer),
            });
        };
        // With no samples every cut passes vacuously and the value is 0.
        let d = cut.common_factor().cloned().unwrap_or_else(Rational::zero);
        factor *= d;
        buffer = cut.u1;
        buffer.extend(cut.u3);
    }
    Ok(factor * a.evaluate(&buffer)?)
}

// ---------------------------------------------------------------------------
// Pumping constants of deterministic automata

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PumpProfile {
    pub m: usize,
    pub lambda: usize,
    pub d: Rational,
}

/// Follows the unique run on `u v v ...` until a state repeats at a
/// `v`-boundary, giving `A(u v^(m + lambda n) w) = d^n A(u v^m w)`.
pub fn det_pump_constants(a: &WeightedAutomaton, u: &[usize], v: &[usize]) -> Result<PumpProfile> {
    if !a.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    if v.is_empty() {
        return Err(Error::InvalidArgument("v must be nonempty".into()));
    }
    let dead = |m: usize| PumpProfile {
        m,
        lambda: 1,
        d: Rational::zero(),
    };
    let step = |q: usize, x: usize| -> Option<(usize, Rational)> {
        a.matrix(x).row(q).iter().next().map(|(&p, w)| (p, w.clone()))
    };
    let run = |q: usize, word: &[usize]| -> Option<(usize, Rational)> {
        word.iter().try_fold((q, Rational::one()), |(q, acc), &x| {
            step(q, x).map(|(p, w)| (p, acc * w))
        })
    };
    let Some((start, _)) = a.initial().iter().next() else {
        return Ok(dead(0));
    };
    let Some((mut q, _)) = run(start, u) else {
        return Ok(dead(0));
    };
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut weights: Vec<Rational> = Vec::new();
    loop {
        let k = weights.len();
        if let Some(&j) = seen.get(&q) {
            let d = weights[j..].iter().fold(Rational::one(), |acc, w| acc * w);
            return Ok(PumpProfile { m: j, lambda: k - j, d });
        }
        seen.insert(q, k);
        match run(q, v) {
            Some((p, w)) => {
                weights.push(w);
                q = p;
            }
            None => return Ok(dead(k)),
        }
    }
}
