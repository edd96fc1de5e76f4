mod common;

use common::*;
use num_bigint::BigUint;
use num_traits::{Pow, Signed};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wa_lab::analysis::{classify_ambiguity, AmbiguityClass};
use wa_lab::automaton::words_up_to;
use wa_lab::determinisability::*;
use wa_lab::pumpability::{falsify_pumpability, DecideMethod, DecideOptions, FalsifierBounds};
use wa_lab::{Error, WeightedAutomaton};

#[test]
fn twin_on_right_example() {
    let v = twin_property(&fixture("fig1-right.json")).unwrap();
    assert!(!v.holds);
    let w = v.witness.unwrap();
    assert_eq!((w.u.clone(), w.v.clone()), (vec![], vec![0, 0]));
    assert_eq!((v.trimmed.states()[w.p].as_str(), v.trimmed.states()[w.q].as_str()), ("c1", "d1"));
    assert_eq!((w.weight_p.clone(), w.weight_q.clone()), (int(2), int(1)));
    // Both states are reached on u and loop on v.
    let fwd = v.trimmed.forward(&w.u).unwrap();
    assert!(fwd.get(w.p) != int(0) && fwd.get(w.q) != int(0));
    let mv = v.trimmed.word_matrix(&w.v).unwrap();
    assert_ne!(mv.get(w.p, w.p).abs(), mv.get(w.q, w.q).abs());
}

#[test]
fn twin_holds() {
    assert!(twin_property(&fixture("doubling.json")).unwrap().holds);
    assert!(twin_property(&fixture("last-letter.json")).unwrap().holds);
    let mut signs = WeightedAutomaton::with_names(&["p", "q", "r"], &["a"]).unwrap();
    signs.set_initial(0, int(1)).unwrap();
    signs.set_initial(1, int(1)).unwrap();
    signs.set_final(2, int(1)).unwrap();
    signs.set_transition(0, 0, 0, int(-1)).unwrap();
    signs.set_transition(1, 0, 1, int(1)).unwrap();
    signs.set_transition(1, 0, 2, int(1)).unwrap();
    assert_eq!(classify_ambiguity(&signs), AmbiguityClass::Unambiguous);
    assert!(twin_property(&signs).unwrap().holds);
    assert!(matches!(twin_property(&fixture("powers-sum.json")), Err(Error::NotUnambiguous(_))));
}

#[test]
fn determinisable_unambiguous_examples() {
    assert!(!decide_determinisable_unambiguous(&fixture("fig1-right.json")).unwrap().holds);
    let mut three = fixture("doubling.json");
    three.set_transition(0, 0, 0, int(3)).unwrap();
    assert!(decide_determinisable_unambiguous(&three).unwrap().holds);
}

#[test]
fn combined_deciders() {
    let opts = DecideOptions::default();
    let left = fixture("fig1-left.json");
    assert!(decide_unambiguisable(&left, &opts).unwrap().holds);
    assert!(!decide_determinisable(&left, &opts).unwrap().holds);

    let exact = DecideOptions {
        method: DecideMethod::Exact,
        ..DecideOptions::default()
    };
    let doubling = fixture("doubling.json");
    assert!(decide_unambiguisable(&doubling, &exact).unwrap().holds);
    assert!(decide_determinisable(&doubling, &exact).unwrap().holds);
    let sum = fixture("powers-sum.json");
    assert!(!decide_unambiguisable(&sum, &exact).unwrap().holds);
    assert!(!decide_determinisable(&sum, &exact).unwrap().holds);

    assert!(matches!(decide_determinisable(&fixture("exponential.json"), &opts), Err(Error::ExponentiallyAmbiguous)));
}

#[test]
fn determinisable_implies_unambiguisable_on_fixtures() {
    let opts = DecideOptions::default();
    for name in fixture_names() {
        let a = fixture(&name);
        let (Ok(det), Ok(unamb)) = (decide_determinisable(&a, &opts), decide_unambiguisable(&a, &opts)) else {
            continue;
        };
        assert!(!det.holds || unamb.holds, "{name}");
    }
}

#[test]
fn fixtures_pass_matching_falsifier() {
    for name in fixture_names() {
        let a = fixture(&name);
        let class = classify_ambiguity(&a);
        if class <= AmbiguityClass::Unambiguous {
            let blind = class == AmbiguityClass::Deterministic;
            let v = falsify_pumpability(&a, FalsifierBounds::new(2, 2, 2), blind).unwrap();
            assert!(v.pumpable, "{name}: {:?}", v.witness);
        }
    }
}

#[test]
fn probe_examples() {
    let left = prime_divisor_probe(&fixture("fig1-left.json"), 10).unwrap();
    assert_eq!(left.primes.into_iter().collect::<Vec<_>>(), vec![BigUint::from(2u32)]);
    assert!(!left.growth);
    let sum = prime_divisor_probe(&fixture("powers-sum.json"), 8).unwrap();
    assert!(sum.growth);
    for p in [5u32, 13, 7, 97] {
        assert!(sum.primes.contains(&BigUint::from(p)), "{p}");
    }
    let zero = WeightedAutomaton::with_names(&["q"], &["a"]).unwrap();
    assert!(prime_divisor_probe(&zero, 5).unwrap().primes.is_empty());
    let mut frac = fixture("doubling.json");
    frac.set_final(0, wa_lab::algebra::rational::rat(1, 2)).unwrap();
    assert!(matches!(prime_divisor_probe(&frac, 3), Err(Error::NotInteger)));
}

#[test]
fn cut_examples() {
    let right = fixture("fig1-right.json");
    let samples = vec![vec![], vec![0], vec![0, 0]];
    let c = cut_search(&right, &[0; 4], &samples, 2, false).unwrap().unwrap();
    assert_eq!(c.u2, vec![0, 0]);
    assert_eq!(c.d, vec![int(2), int(1), int(2)]);
    assert!(cut_search(&right, &[0; 4], &samples, 2, true).unwrap().is_none());
    assert!(cut_search(&right, &[0], &samples, 2, true).unwrap().is_none());
}

#[test]
fn depump_examples() {
    let doubling = fixture("doubling.json");
    assert_eq!(depump_evaluate(&doubling, &[0; 10], 3).unwrap(), int(1024));
    assert_eq!(depump_evaluate(&doubling, &[0; 2], 3).unwrap(), int(4));
    let right = fixture("fig1-right.json");
    assert!(matches!(depump_evaluate(&right, &[0; 8], 4), Err(Error::DepumpFailed { .. })));
}

#[test]
fn pump_constant_examples() {
    let p = det_pump_constants(&fixture("doubling.json"), &[], &[0]).unwrap();
    assert_eq!(p, PumpProfile { m: 0, lambda: 1, d: int(2) });
    let mut a = WeightedAutomaton::with_names(&["p", "q"], &["a", "b"]).unwrap();
    a.set_initial(0, int(1)).unwrap();
    a.set_final(0, int(1)).unwrap();
    a.set_transition(0, 0, 1, int(1)).unwrap();
    a.set_transition(1, 0, 0, int(3)).unwrap();
    let p = det_pump_constants(&a, &[], &[0]).unwrap();
    assert_eq!((p.lambda, p.d.clone()), (2, int(3)));
    assert_eq!(det_pump_constants(&a, &[1], &[0]).unwrap().d, int(0));
    assert!(matches!(det_pump_constants(&fixture("powers-sum.json"), &[], &[0]), Err(Error::NotDeterministic)));
}

fn random_word(rng: &mut StdRng, k: usize, max: usize) -> Vec<usize> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| rng.gen_range(0..k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pump_profile_validates(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let k = rng.gen_range(1..=2);
        let a = random_deterministic(&mut rng, 4, k);
        let u = random_word(&mut rng, k, 3);
        let mut v = random_word(&mut rng, k, 3);
        if v.is_empty() {
            v.push(0);
        }
        let p = det_pump_constants(&a, &u, &v).unwrap();
        for w in words_up_to(k, 2) {
            let with = |reps: usize| {
                let mut x = u.clone();
                for _ in 0..reps {
                    x.extend_from_slice(&v);
                }
                x.extend_from_slice(&w);
                a.evaluate(&x).unwrap()
            };
            let base = with(p.m);
            for n in 1..=3 {
                prop_assert_eq!(with(p.m + p.lambda * n), Pow::pow(&p.d, n) * &base);
            }
        }
    }

    #[test]
    fn twin_witness_revalidates(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let k = rng.gen_range(1..=2);
        let a = random_unambiguous(&mut rng, 3, k);
        let v = twin_property(&a).unwrap();
        if let Some(w) = v.witness {
            let t = &v.trimmed;
            let fwd = t.forward(&w.u).unwrap();
            prop_assert!(fwd.get(w.p) != int(0) && fwd.get(w.q) != int(0));
            let mv = t.word_matrix(&w.v).unwrap();
            prop_assert_eq!(mv.get(w.p, w.p).abs(), w.weight_p.clone());
            prop_assert_eq!(mv.get(w.q, w.q).abs(), w.weight_q.clone());
            prop_assert!(w.weight_p != w.weight_q);
        } else if a.is_deterministic() {
            prop_assert!(v.holds);
        }
    }

    #[test]
    fn depumping_is_exact(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = if rng.gen_bool(0.5) {
            random_deterministic(&mut rng, 3, 2)
        } else {
            random_signed(&mut rng, 3, 1)
        };
        let w = random_word(&mut rng, a.alphabet().len(), 12);
        if let Ok(x) = depump_evaluate(&a, &w, 4) {
            prop_assert_eq!(x, a.evaluate(&w).unwrap());
        }
    }
}
