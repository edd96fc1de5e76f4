//! Implicitly represented automata, explored on demand.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{One, Zero};

use crate::algebra::{RatMatrix, RatVector, Rational};
use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};

/// An automaton given by its initial configurations and a successor function.
///
/// Successor functions must be pure; callers are free to memoize them.
/// Weights returned by `initial` and `successors` should be nonzero.
pub trait LazyAutomaton {
    type State: Clone + Eq + Hash + Debug;

    fn alphabet(&self) -> &[String];

    fn initial(&self) -> Vec<(Self::State, Rational)>;

    fn successors(&self, state: &Self::State, letter: usize) -> Vec<(Self::State, Rational)>;

    fn final_weight(&self, state: &Self::State) -> Rational;

    fn state_name(&self, state: &Self::State) -> String {
        format!("{state:?}")
    }
}

impl LazyAutomaton for WeightedAutomaton {
    type State = usize;

    fn alphabet(&self) -> &[String] {
        WeightedAutomaton::alphabet(self)
    }

    fn initial(&self) -> Vec<(usize, Rational)> {
        WeightedAutomaton::initial(self)
            .iter()
            .map(|(q, x)| (q, x.clone()))
            .collect()
    }

    fn successors(&self, state: &usize, letter: usize) -> Vec<(usize, Rational)> {
        self.matrix(letter)
            .row(*state)
            .iter()
            .map(|(&q, x)| (q, x.clone()))
            .collect()
    }

    fn final_weight(&self, state: &usize) -> Rational {
        self.final_weights().get(*state)
    }

    fn state_name(&self, state: &usize) -> String {
        self.states()[*state].clone()
    }
}

impl<L: LazyAutomaton + ?Sized> LazyAutomaton for &L {
    type State = L::State;

    fn alphabet(&self) -> &[String] {
        (**self).alphabet()
    }

    fn initial(&self) -> Vec<(L::State, Rational)> {
        (**self).initial()
    }

    fn successors(&self, state: &L::State, letter: usize) -> Vec<(L::State, Rational)> {
        (**self).successors(state, letter)
    }

    fn final_weight(&self, state: &L::State) -> Rational {
        (**self).final_weight(state)
    }

    fn state_name(&self, state: &L::State) -> String {
        (**self).state_name(state)
    }
}

fn check_alphabets(a: &[String], b: &[String]) -> Result<()> {
    if a != b {
        return Err(Error::AlphabetMismatch {
            left: a.to_vec(),
            right: b.to_vec(),
        });
    }
    Ok(())
}

/// State of a disjoint union.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Side<L, R> {
    Left(L),
    Right(R),
}

/// `A1 + A2`, or `A1 - A2` when built with [`Union::difference`].
pub struct Union<A, B> {
    left: A,
    right: B,
    right_sign: Rational,
}

impl<A: LazyAutomaton, B: LazyAutomaton> Union<A, B> {
    pub fn sum(left: A, right: B) -> Result<Self> {
        check_alphabets(left.alphabet(), right.alphabet())?;
        Ok(Union {
            left,
            right,
            right_sign: Rational::one(),
        })
    }

    pub fn difference(left: A, right: B) -> Result<Self> {
        check_alphabets(left.alphabet(), right.alphabet())?;
        Ok(Union {
            left,
            right,
            right_sign: -Rational::one(),
        })
    }
}

impl<A: LazyAutomaton, B: LazyAutomaton> LazyAutomaton for Union<A, B> {
    type State = Side<A::State, B::State>;

    fn alphabet(&self) -> &[String] {
        self.left.alphabet()
    }

    fn initial(&self) -> Vec<(Self::State, Rational)> {
        let mut out: Vec<_> = self
            .left
            .initial()
            .into_iter()
            .map(|(s, x)| (Side::Left(s), x))
            .collect();
        out.extend(
            self.right
                .initial()
                .into_iter()
                .map(|(s, x)| (Side::Right(s), x * &self.right_sign)),
        );
        out
    }

    fn successors(&self, state: &Self::State, letter: usize) -> Vec<(Self::State, Rational)> {
        match state {
            Side::Left(s) => self
                .left
                .successors(s, letter)
                .into_iter()
                .map(|(t, x)| (Side::Left(t), x))
                .collect(),
            Side::Right(s) => self
                .right
                .successors(s, letter)
                .into_iter()
                .map(|(t, x)| (Side::Right(t), x))
                .collect(),
        }
    }

    fn final_weight(&self, state: &Self::State) -> Rational {
        match state {
            Side::Left(s) => self.left.final_weight(s),
            Side::Right(s) => self.right.final_weight(s),
        }
    }

    fn state_name(&self, state: &Self::State) -> String {
        match state {
            Side::Left(s) => format!("1.{}", self.left.state_name(s)),
            Side::Right(s) => format!("2.{}", self.right.state_name(s)),
        }
    }
}

/// `A1 * A2`, pointwise.
pub struct Product<A, B> {
    left: A,
    right: B,
}

impl<A: LazyAutomaton, B: LazyAutomaton> Product<A, B> {
    pub fn new(left: A, right: B) -> Result<Self> {
        check_alphabets(left.alphabet(), right.alphabet())?;
        Ok(Product { left, right })
    }
}

fn pairs<S: Clone, T: Clone>(xs: Vec<(S, Rational)>, ys: &[(T, Rational)]) -> Vec<((S, T), Rational)> {
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for (s, x) in xs {
        for (t, y) in ys {
            out.push(((s.clone(), t.clone()), &x * y));
        }
    }
    out
}

impl<A: LazyAutomaton, B: LazyAutomaton> LazyAutomaton for Product<A, B> {
    type State = (A::State, B::State);

    fn alphabet(&self) -> &[String] {
        self.left.alphabet()
    }

    fn initial(&self) -> Vec<(Self::State, Rational)> {
        let right = self.right.initial();
        if right.is_empty() {
            return Vec::new();
        }
        pairs(self.left.initial(), &right)
    }

    fn successors(&self, state: &Self::State, letter: usize) -> Vec<(Self::State, Rational)> {
        let left = self.left.successors(&state.0, letter);
        if left.is_empty() {
            return Vec::new();
        }
        pairs(left, &self.right.successors(&state.1, letter))
    }

    fn final_weight(&self, state: &Self::State) -> Rational {
        let x = self.left.final_weight(&state.0);
        if x.is_zero() {
            return x;
        }
        x * self.right.final_weight(&state.1)
    }

    fn state_name(&self, state: &Self::State) -> String {
        format!("({},{})", self.left.state_name(&state.0), self.right.state_name(&state.1))
    }
}

/// Pointwise product of a list of automata of one type. The empty product is
/// the constant-one function.
pub struct ProductMany<A> {
    factors: Vec<A>,
    alphabet: Vec<String>,
}

impl<A: LazyAutomaton> ProductMany<A> {
    pub fn new(alphabet: Vec<String>, factors: Vec<A>) -> Result<Self> {
        for f in &factors {
            check_alphabets(&alphabet, f.alphabet())?;
        }
        Ok(ProductMany { factors, alphabet })
    }
}

fn tuples<S: Clone>(lists: Vec<Vec<(S, Rational)>>) -> Vec<(Vec<S>, Rational)> {
    let mut acc = vec![(Vec::with_capacity(lists.len()), Rational::one())];
    for list in lists {
        if list.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(acc.len() * list.len());
        for (prefix, x) in &acc {
            for (s, y) in &list {
                let mut p = prefix.clone();
                p.push(s.clone());
                next.push((p, x * y));
            }
        }
        acc = next;
    }
    acc
}

impl<A: LazyAutomaton> LazyAutomaton for ProductMany<A> {
    type State = Vec<A::State>;

    fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    fn initial(&self) -> Vec<(Self::State, Rational)> {
        tuples(self.factors.iter().map(|f| f.initial()).collect())
    }

    fn successors(&self, state: &Self::State, letter: usize) -> Vec<(Self::State, Rational)> {
        let mut lists = Vec::with_capacity(self.factors.len());
        for (f, s) in self.factors.iter().zip(state) {
            let l = f.successors(s, letter);
            if l.is_empty() {
                return Vec::new();
            }
            lists.push(l);
        }
        tuples(lists)
    }

    fn final_weight(&self, state: &Self::State) -> Rational {
        let mut x = Rational::one();
        for (f, s) in self.factors.iter().zip(state) {
            x *= f.final_weight(s);
            if x.is_zero() {
                break;
            }
        }
        x
    }

    fn state_name(&self, state: &Self::State) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .zip(state)
            .map(|(f, s)| f.state_name(s))
            .collect();
        format!("({})", parts.join(","))
    }
}

/// Explicit automaton with the states reachable in `lazy`, numbered in
/// breadth-first discovery order.
pub fn materialize<L: LazyAutomaton>(lazy: &L, budget: usize) -> Result<WeightedAutomaton> {
    let k = lazy.alphabet().len();
    let mut index: HashMap<L::State, usize> = HashMap::new();
    let mut order: Vec<L::State> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: L::State, order: &mut Vec<L::State>, queue: &mut VecDeque<usize>| -> Result<usize> {
        if let Some(&i) = index.get(&s) {
            return Ok(i);
        }
        let i = order.len();
        if i >= budget {
            return Err(Error::BudgetExceeded {
                reached: i + 1,
                budget,
            });
        }
        index.insert(s.clone(), i);
        order.push(s);
        queue.push_back(i);
        Ok(i)
    };

    let mut initial = Vec::new();
    for (s, x) in lazy.initial() {
        initial.push((intern(s, &mut order, &mut queue)?, x));
    }
    let mut edges = Vec::new();
    while let Some(p) = queue.pop_front() {
        let state = order[p].clone();
        for a in 0..k {
            for (t, x) in lazy.successors(&state, a) {
                let q = intern(t, &mut order, &mut queue)?;
                edges.push((p, a, q, x));
            }
        }
    }

    let n = order.len();
    let mut trans = vec![RatMatrix::zeros(n, n); k];
    for (p, a, q, x) in edges {
        let cur = trans[a].get(p, q);
        trans[a].set(p, q, cur + x);
    }
    let mut init = RatVector::zeros(n);
    for (q, x) in initial {
        let cur = init.get(q);
        init.set(q, cur + x);
    }
    let fin = RatVector::from_dense(order.iter().map(|s| lazy.final_weight(s)).collect());

    let mut names: Vec<String> = order.iter().map(|s| lazy.state_name(s)).collect();
    let mut used = std::collections::HashSet::new();
    for (i, name) in names.iter_mut().enumerate() {
        // Distinct states may render alike; disambiguate by index.
        if !used.insert(name.clone()) {
            *name = format!("{name}#{i}");
            used.insert(name.clone());
        }
    }
    WeightedAutomaton::from_parts(names, lazy.alphabet().to_vec(), trans, init, fin)
}

/// Forward evaluation of a word without materializing.
pub fn evaluate_lazy<L: LazyAutomaton>(lazy: &L, word: &[usize]) -> Result<Rational> {
    let k = lazy.alphabet().len();
    let mut current: HashMap<L::State, Rational> = HashMap::new();
    for (s, x) in lazy.initial() {
        *current.entry(s).or_insert_with(Rational::zero) += x;
    }
    for &a in word {
        if a >= k {
            return Err(Error::UnknownSymbol(format!("#{a}")));
        }
        let mut next: HashMap<L::State, Rational> = HashMap::new();
        for (s, x) in &current {
            if x.is_zero() {
                continue;
            }
            for (t, y) in lazy.successors(s, a) {
                *next.entry(t).or_insert_with(Rational::zero) += x * y;
            }
        }
        current = next;
    }
    Ok(current
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(s, x)| x * lazy.final_weight(s))
        .fold(Rational::zero(), |acc, y| acc + y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn powers(base: i64) -> WeightedAutomaton {
        let mut a = WeightedAutomaton::with_names(&["q"], &["a"]).unwrap();
        a.set_initial(0, int(1)).unwrap();
        a.set_final(0, int(1)).unwrap();
        a.set_transition(0, 0, 0, int(base)).unwrap();
        a
    }

    #[test]
    fn combinators_evaluate() {
        let (two, three) = (powers(2), powers(3));
        let d = Union::difference(&three, &two).unwrap();
        assert_eq!(evaluate_lazy(&d, &[0, 0]).unwrap(), int(5));
        let p = Product::new(&three, &two).unwrap();
        assert_eq!(evaluate_lazy(&p, &[0, 0, 0]).unwrap(), int(216));
        let many = ProductMany::new(vec!["a".into()], vec![&two, &two, &three]).unwrap();
        assert_eq!(evaluate_lazy(&many, &[0, 0]).unwrap(), int(144));
        let one: ProductMany<&WeightedAutomaton> = ProductMany::new(vec!["a".into()], vec![]).unwrap();
        assert_eq!(evaluate_lazy(&one, &[0, 0]).unwrap(), int(1));
    }

    #[test]
    fn materialize_products() {
        let p = Product::new(powers(2), powers(3)).unwrap();
        let m = materialize(&p, 10).unwrap();
        assert_eq!(m.states(), &["(q,q)".to_string()]);
        assert_eq!(m.evaluate(&[0, 0]).unwrap(), int(36));
    }

    #[test]
    fn budget_and_empty() {
        let mut a = WeightedAutomaton::with_names(&["p", "q"], &["a"]).unwrap();
        a.set_initial(0, int(1)).unwrap();
        a.set_transition(0, 0, 1, int(1)).unwrap();
        assert_eq!(
            materialize(&a, 1),
            Err(Error::BudgetExceeded { reached: 2, budget: 1 })
        );
        let e = WeightedAutomaton::with_names(&["p"], &["a"]).unwrap();
        let m = materialize(&e, 1).unwrap();
        assert_eq!(m.num_states(), 0);
        assert_eq!(m.evaluate(&[0]).unwrap(), int(0));
    }
}
