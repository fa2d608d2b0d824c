mod common;

use fourier_fss::cyclotomic::{
    evaluate_reference, fourier_terms, fourier_transform, CycScaled, RootPower, TruthTable,
};
use fourier_fss::field::PrimeField;
use num_complex::Complex64;
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn check_table(t: &TruthTable) {
    let field = t.field();
    let q = field.modulus();
    let exact = fourier_transform(t);
    let float = common::dft_float(&t.values().iter().map(|&v| v as f64).collect::<Vec<_>>());
    for (e, f) in exact.iter().zip(&float) {
        assert!((e.to_complex() - f).norm() <= TOL);
    }
    // inversion, exactly and in floating point
    let terms = fourier_terms(t);
    for x in field.elements() {
        let v = evaluate_reference(field, &terms, x).unwrap();
        assert!(v.exact_eq(&CycScaled::integer(field, t.get(x) as i64)), "q={q} x={x}");
        let back: Complex64 = (0..q).map(|a| float[a as usize] * common::omega(q, a * x.value())).sum();
        assert!((back - t.get(x) as f64).norm() <= TOL);
    }
    let parseval: f64 = exact.iter().map(|c| c.to_complex().norm_sqr()).sum();
    assert!((parseval - 1.0).abs() <= TOL, "Parseval {parseval}");
}

#[test]
fn inversion_and_parseval_exhaustive_small_q() {
    for q in [3, 5, 7] {
        let field = PrimeField::new(q).unwrap();
        let mut n = 0;
        for t in TruthTable::enumerate(field) {
            check_table(&t);
            n += 1;
        }
        assert_eq!(n, 1 << q);
    }
}

#[test]
fn inversion_and_parseval_random_tables() {
    let mut rng = common::seeded(13);
    for q in [11, 13] {
        let field = PrimeField::new(q).unwrap();
        for _ in 0..100 {
            let values: Vec<i64> = (0..q).map(|_| if rand::Rng::gen_bool(&mut rng, 0.5) { 1 } else { -1 }).collect();
            check_table(&TruthTable::new(field, &values).unwrap());
        }
    }
}

/// `(1/q) Σ_x χ_a(x) conj(χ_b(x)) = [a = b]`, the conjugated inner product.
#[test]
fn characters_are_orthonormal() {
    for q in [3u64, 5, 7, 11, 13] {
        let field = PrimeField::new(q).unwrap();
        for a in 0..q {
            for b in 0..q {
                let mut exact = CycScaled::zero(field);
                let mut float = Complex64::new(0.0, 0.0);
                for x in 0..q {
                    let e = (a + q - b) * x % q;
                    exact = exact.checked_add(&CycScaled::root(RootPower::new(field, e))).unwrap();
                    float += common::omega(q, a * x) * common::omega(q, b * x).conj();
                }
                let expected = if a == b { q as i64 } else { 0 };
                assert!(exact.exact_eq(&CycScaled::integer(field, expected)));
                assert!((float / q as f64 - expected as f64 / q as f64).norm() <= TOL);
            }
        }
    }
}

/// Without the conjugate the sum is `[a + b ≡ 0]` instead.
#[test]
fn unconjugated_product_pairs_negatives() {
    for q in [3u64, 5, 7] {
        for a in 0..q {
            for b in 0..q {
                let s: Complex64 = (0..q).map(|x| common::omega(q, a * x) * common::omega(q, b * x)).sum::<Complex64>() / q as f64;
                let expected = if (a + b) % q == 0 { 1.0 } else { 0.0 };
                assert!((s - expected).norm() <= TOL);
            }
        }
    }
}

/// A `±1` table never has exactly two nonzero Fourier terms over these fields.
#[test]
fn no_table_has_exactly_two_terms() {
    for q in [3, 5, 7, 11, 13] {
        let field = PrimeField::new(q).unwrap();
        let mut counts = std::collections::BTreeSet::new();
        for t in TruthTable::enumerate(field) {
            let n = fourier_terms(&t).len();
            assert_ne!(n, 2, "q={q} table {:?}", t.values());
            counts.insert(n);
        }
        assert!(counts.contains(&1));
    }
}

#[test]
fn root_sum_vanishes_and_normal_forms_agree() {
    for q in [3u64, 5, 7] {
        let field = PrimeField::new(q).unwrap();
        let all = CycScaled::from_coords(field, vec![1; q as usize]).unwrap();
        assert!(all.is_zero());
        let shifted = CycScaled::from_coords(field, (0..q as i64).map(|j| 2 + (j == 1) as i64).collect()).unwrap();
        assert!(shifted.exact_eq(&CycScaled::from_coords(field, {
            let mut v = vec![0; q as usize];
            v[1] = 1;
            v
        })
        .unwrap()));
    }
}

proptest! {
    #[test]
    fn exact_and_float_arithmetic_agree(
        a in prop::collection::vec(-20i64..=20, 7),
        b in prop::collection::vec(-20i64..=20, 7),
        e in 0u64..7,
    ) {
        let f7 = PrimeField::new(7).unwrap();
        let x = CycScaled::from_coords(f7, a).unwrap();
        let y = CycScaled::from_coords(f7, b).unwrap();
        let r = RootPower::new(f7, e);
        let sum = x.checked_add(&y).unwrap();
        prop_assert!((sum.to_complex() - (x.to_complex() + y.to_complex())).norm() <= TOL);
        let rot = x.rotate(r).unwrap();
        prop_assert!((rot.to_complex() - x.to_complex() * r.to_complex()).norm() <= TOL);
        prop_assert_eq!(sum.exact_eq(&x), y.is_zero());
        prop_assert_eq!(x.exact_eq(&y), (x.to_complex() - y.to_complex()).norm() <= TOL);
    }

    #[test]
    fn random_sparse_functions_match_float_oracle(seed in any::<u64>(), terms in 1usize..=5) {
        let f11 = PrimeField::new(11).unwrap();
        let f = common::random_function(&mut common::seeded(seed), f11, terms, 9);
        for x in 0..11 {
            let v = f.evaluate(f11.elem(x)).unwrap();
            prop_assert!((v.to_complex() - common::evaluate_float(&f, x)).norm() <= TOL);
        }
    }
}
