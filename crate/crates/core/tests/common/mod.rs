#![allow(dead_code)]

use std::path::PathBuf;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use wa_lab::algebra::{RatMatrix, RatVector, Rational};
use wa_lab::{parse_automaton, WeightedAutomaton};

pub fn fixture(name: &str) -> WeightedAutomaton {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_automaton(&text).unwrap()
}

pub fn fixture_names() -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    names
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// A rational in `[-3, 3]` with denominator at most 3.
pub fn small_rational(rng: &mut StdRng) -> Rational {
    let d: i64 = rng.gen_range(1..=3);
    let n: i64 = rng.gen_range(-3 * d..=3 * d);
    Rational::new(n.into(), d.into())
}

pub fn nonneg_integer(rng: &mut StdRng, max: i64) -> Rational {
    int(rng.gen_range(0..=max))
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

pub fn letters(k: usize) -> Vec<String> {
    ["a", "b", "c"][..k].iter().map(|s| s.to_string()).collect()
}

/// Every entry independently nonzero with probability `density`.
pub fn random_automaton_with(
    rng: &mut StdRng,
    states: usize,
    k: usize,
    density: f64,
    weight: &mut dyn FnMut(&mut StdRng) -> Rational,
) -> WeightedAutomaton {
    let mut a = WeightedAutomaton::new(names("q", states), letters(k)).unwrap();
    for q in 0..states {
        if rng.gen_bool(density) {
            a.set_initial(q, weight(rng)).unwrap();
        }
        if rng.gen_bool(density) {
            a.set_final(q, weight(rng)).unwrap();
        }
        for x in 0..k {
            for p in 0..states {
                if rng.gen_bool(density) {
                    a.set_transition(q, x, p, weight(rng)).unwrap();
                }
            }
        }
    }
    a
}

pub fn random_signed(rng: &mut StdRng, max_states: usize, k: usize) -> WeightedAutomaton {
    let n = rng.gen_range(1..=max_states);
    random_automaton_with(rng, n, k, 0.4, &mut small_rational)
}

pub fn random_nonneg(rng: &mut StdRng, max_states: usize, k: usize) -> WeightedAutomaton {
    let n = rng.gen_range(1..=max_states);
    random_automaton_with(rng, n, k, 0.4, &mut |r| {
        let d: i64 = r.gen_range(1..=2);
        Rational::new(r.gen_range(1..=3 * d).into(), d.into())
    })
}

pub fn random_deterministic(rng: &mut StdRng, max_states: usize, k: usize) -> WeightedAutomaton {
    let n = rng.gen_range(1..=max_states);
    let mut a = WeightedAutomaton::new(names("q", n), letters(k)).unwrap();
    a.set_initial(0, nonzero_small(rng)).unwrap();
    for q in 0..n {
        if rng.gen_bool(0.6) {
            a.set_final(q, small_rational(rng)).unwrap();
        }
        for x in 0..k {
            if rng.gen_bool(0.8) {
                let p = rng.gen_range(0..n);
                a.set_transition(q, x, p, nonzero_small(rng)).unwrap();
            }
        }
    }
    a
}

fn nonzero_small(rng: &mut StdRng) -> Rational {
    loop {
        let x = small_rational(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Reverses all transitions and swaps initial and final weights.
pub fn reverse(a: &WeightedAutomaton) -> WeightedAutomaton {
    WeightedAutomaton::from_parts(
        a.states().to_vec(),
        a.alphabet().to_vec(),
        a.matrices().iter().map(RatMatrix::transpose).collect(),
        a.final_weights().clone(),
        a.initial().clone(),
    )
    .unwrap()
}

/// Deterministic or co-deterministic with one initial (resp. final) state,
/// hence unambiguous.
pub fn random_unambiguous(rng: &mut StdRng, max_states: usize, k: usize) -> WeightedAutomaton {
    let d = random_deterministic(rng, max_states, k);
    if rng.gen_bool(0.5) {
        d
    } else {
        reverse(&d)
    }
}

/// Upper triangular with natural diagonal, conjugated by a permutation.
pub fn random_p_triangular(rng: &mut StdRng, n: usize, max_diag: i64) -> RatMatrix {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut m = RatMatrix::zeros(n, n);
    for i in 0..n {
        m.set(order[i], order[i], nonneg_integer(rng, max_diag));
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                m.set(order[i], order[j], small_rational(rng));
            }
        }
    }
    m
}

pub fn random_vector(rng: &mut StdRng, n: usize) -> RatVector {
    RatVector::from_dense((0..n).map(|_| small_rational(rng)).collect())
}

pub fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> RatMatrix {
    RatMatrix::from_dense(
        (0..rows)
            .map(|_| (0..cols).map(|_| if rng.gen_bool(0.6) { small_rational(rng) } else { Rational::zero() }).collect())
            .collect(),
    )
}

/// Sum over all runs of the product of their weights, by depth-first search.
pub fn brute_force_value(a: &WeightedAutomaton, w: &[usize]) -> Rational {
    fn go(a: &WeightedAutomaton, q: usize, w: &[usize], acc: Rational) -> Rational {
        match w.split_first() {
            None => acc * a.final_weights().get(q),
            Some((&x, rest)) => {
                let mut total = Rational::zero();
                for p in 0..a.num_states() {
                    let t = a.matrix(x).get(q, p);
                    if !t.is_zero() {
                        total += go(a, p, rest, &acc * t);
                    }
                }
                total
            }
        }
    }
    (0..a.num_states())
        .filter(|&q| !a.initial().get(q).is_zero())
        .map(|q| go(a, q, w, a.initial().get(q)))
        .fold(Rational::zero(), |s, x| s + x)
}

/// `M^n` by repeated multiplication.
pub fn naive_power(m: &RatMatrix, n: usize) -> RatMatrix {
    let mut p = RatMatrix::identity(m.nrows());
    for _ in 0..n {
        p = p.mul(m).unwrap();
    }
    p
}

/// Whether a simultaneous permutation makes `m` upper triangular, tested by
/// repeatedly removing a row with no nonzero entry off the diagonal among
/// the remaining indices.
pub fn brute_force_p_triangular(m: &RatMatrix) -> bool {
    let mut left: Vec<usize> = (0..m.nrows()).collect();
    while !left.is_empty() {
        let sink = left
            .iter()
            .position(|&i| left.iter().all(|&j| j == i || m.get(i, j).is_zero()));
        match sink {
            Some(k) => {
                left.remove(k);
            }
            None => return false,
        }
    }
    true
}
