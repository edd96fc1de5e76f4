mod common;

use common::*;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wa_lab::algebra::linalg::{determinant, invertible_completion, rank};
use wa_lab::algebra::{bool_mul, exp_poly_decompose, mat_mul, mat_pow, p_triangular, RatMatrix, RatVector, Triangularity};
use wa_lab::analysis::triangularize;

fn m(rows: &[&[i64]]) -> RatMatrix {
    RatMatrix::from_dense(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
}

#[test]
fn completion_examples() {
    let a = m(&[&[1, 0], &[0, 0]]);
    let b = m(&[&[2, 0], &[0, 5]]);
    let c = invertible_completion(&a, &b).unwrap();
    assert!(!determinant(&c).unwrap().is_zero());
    let ba = b.mul(&a).unwrap();
    for n in 0..=6 {
        assert_eq!(a.mul(&naive_power(&ba, n)).unwrap(), a.mul(&naive_power(&c, n)).unwrap());
    }

    let full = m(&[&[1, 2], &[3, 4]]);
    assert_eq!(invertible_completion(&full, &b).unwrap(), b.mul(&full).unwrap());

    let zero = RatMatrix::zeros(3, 3);
    assert_eq!(invertible_completion(&zero, &m(&[&[1, 1, 1], &[0, 0, 0], &[2, 0, 1]])).unwrap(), RatMatrix::identity(3));
}

#[test]
fn completion_rejects_rank_drop() {
    let a = m(&[&[1, 0], &[0, 0]]);
    let b = m(&[&[0, 1], &[1, 0]]);
    assert!(invertible_completion(&a, &b).is_err());
}

#[test]
fn p_triangular_examples() {
    assert_eq!(p_triangular(&m(&[&[1, 2], &[0, 3]])).unwrap(), Triangularity::Triangular { order: vec![0, 1] });
    assert!(matches!(p_triangular(&m(&[&[0, 1], &[1, 0]])).unwrap(), Triangularity::Cycle { cycle } if cycle.len() == 2));
    assert_eq!(p_triangular(&m(&[&[3, 0], &[5, 7]])).unwrap(), Triangularity::Triangular { order: vec![1, 0] });
}

#[test]
fn decomposition_rejects_negative_diagonal() {
    let x = RatVector::from_dense(vec![int(1)]);
    assert!(exp_poly_decompose(&m(&[&[-2]]), &x, &x).is_err());
}

#[test]
fn decomposition_of_powers_difference() {
    let mm = m(&[&[2, 0], &[0, 3]]);
    let x = RatVector::from_dense(vec![int(-1), int(1)]);
    let y = RatVector::from_dense(vec![int(1), int(1)]);
    let d = exp_poly_decompose(&mm, &x, &y).unwrap();
    assert_eq!(d.term(3).unwrap().coefficients, vec![int(1)]);
    assert_eq!(d.term(2).unwrap().coefficients, vec![int(-1)]);
    assert_eq!(d.evaluate(5), int(243 - 32));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_laws(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (a, b) = (small_rational(&mut rng), small_rational(&mut rng));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!(&(&a * &b) / &b, a);
        }
    }

    #[test]
    fn powers_add(seed in any::<u64>(), p in 0u64..=6, q in 0u64..=6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let a = random_matrix(&mut rng, n, n);
        prop_assert_eq!(mat_pow(&a, p + q).unwrap(), mat_mul(&mat_pow(&a, p).unwrap(), &mat_pow(&a, q).unwrap()).unwrap());
    }

    #[test]
    fn structure_is_a_homomorphism_on_nonnegative(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let a = random_matrix(&mut rng, n, n).map(|x| x.abs());
        let b = random_matrix(&mut rng, n, n).map(|x| x.abs());
        prop_assert_eq!(a.mul(&b).unwrap().structure(), bool_mul(&a.structure(), &b.structure()).unwrap());
    }

    #[test]
    fn triangular_order_is_valid(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=5);
        let mat = if rng.gen_bool(0.5) { random_p_triangular(&mut rng, n, 5) } else { random_matrix(&mut rng, n, n) };
        match p_triangular(&mat).unwrap() {
            Triangularity::Triangular { order } => {
                prop_assert!(brute_force_p_triangular(&mat));
                let t = mat.permute(&order);
                prop_assert!(t.is_upper_triangular());
                let mut before = mat.diagonal();
                let mut after = t.diagonal();
                before.sort();
                after.sort();
                prop_assert_eq!(before, after);
                prop_assert_eq!(triangularize(&mat).unwrap(), Some(t));
            }
            Triangularity::Cycle { cycle } => {
                prop_assert!(!brute_force_p_triangular(&mat));
                for (k, &i) in cycle.iter().enumerate() {
                    let j = cycle[(k + 1) % cycle.len()];
                    prop_assert!(i != j && !mat.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn decomposition_matches_powers(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let mat = random_p_triangular(&mut rng, n, 5);
        let (x, y) = (random_vector(&mut rng, n), random_vector(&mut rng, n));
        let d = exp_poly_decompose(&mat, &x, &y).unwrap();
        let mut p = naive_power(&mat, n);
        for e in n..=n + 20 {
            prop_assert_eq!(d.evaluate(e as u64), x.dot(&p.mul_vector(&y).unwrap()).unwrap());
            p = p.mul(&mat).unwrap();
        }
    }

    #[test]
    fn completion_property(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4);
        let a = random_matrix(&mut rng, n, n);
        let b = random_matrix(&mut rng, n, n);
        let ba = b.mul(&a).unwrap();
        prop_assume!(rank(&a.mul(&ba).unwrap()) == rank(&a));
        let c = invertible_completion(&a, &b).unwrap();
        prop_assert!(!determinant(&c).unwrap().is_zero());
        let (mut l, mut r) = (a.clone(), a.clone());
        for _ in 0..=10 {
            prop_assert_eq!(&l, &r);
            l = l.mul(&ba).unwrap();
            r = r.mul(&c).unwrap();
        }
    }

    #[test]
    fn identity_determinant(n in 0usize..5) {
        prop_assert!(determinant(&RatMatrix::identity(n)).unwrap().is_one());
    }
}
