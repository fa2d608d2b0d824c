mod common;

use fourier_fss::access::{Formula, PartySet};
use fourier_fss::cyclotomic::{FourierTerm, TruthTable};
use fourier_fss::field::PrimeField;
use fourier_fss::fss::{dec1, eval1, eval_succinct, gen1, FourierFss, SuccinctFunction};
use fourier_fss::harness::audit::{audit_security, joint_tape_count, joint_view_distance};
use fourier_fss::msp::Msp;
use fourier_fss::Error;
use proptest::prelude::*;

fn set(xs: &[usize]) -> PartySet {
    xs.iter().copied().collect()
}

fn chi(field: PrimeField, a: u64) -> SuccinctFunction {
    SuccinctFunction::from_terms(field, vec![FourierTerm::basis(field.elem(a))]).unwrap()
}

/// Decodes `f` at every `x` from every qualified set and compares with the
/// reference evaluation, exactly and as complex numbers.
fn check_correct(scheme: &FourierFss, f: &SuccinctFunction, seed: u64) -> Result<(), String> {
    let field = scheme.field();
    let keys = scheme.gen(f, &mut common::seeded(seed)).map_err(|e| e.to_string())?;
    let p = scheme.msp().parties();
    for x in field.elements() {
        let shares: Vec<_> = keys.iter().map(|k| eval_succinct(k, x).unwrap()).collect();
        let want = f.evaluate(x).unwrap();
        for a in PartySet::all_subsets(p) {
            let chosen: Vec<_> = shares.iter().filter(|s| a.contains(s.party)).cloned().collect();
            match scheme.decode(&chosen) {
                Ok(d) => {
                    if !d.value.exact_eq(&want) {
                        return Err(format!("x={x} A={a}: {} != {want}", d.value));
                    }
                    if (d.complex - want.to_complex()).norm() > 1e-9 {
                        return Err(format!("x={x} A={a}: float drift"));
                    }
                }
                Err(Error::NotQualified(_)) if !scheme.msp().accepts(a) => {}
                Err(e) => return Err(format!("x={x} A={a}: {e}")),
            }
        }
    }
    Ok(())
}

#[test]
fn homomorphic_exponent_and_set_independence() {
    for q in [3u64, 5, 7] {
        let field = PrimeField::new(q).unwrap();
        let msp = Msp::vandermonde_threshold(2, 3.min(q as usize), field).unwrap();
        let mut rng = common::seeded(q);
        for a in field.elements() {
            let keys = gen1(a, &msp, &mut rng).unwrap();
            for x in field.elements() {
                let shares: Vec<_> = keys.iter().map(|k| eval1(k, x).unwrap()).collect();
                for sub in PartySet::all_subsets(msp.parties()).filter(|s| s.len() >= 2) {
                    let chosen: Vec<_> = shares.iter().filter(|s| sub.contains(s.party)).cloned().collect();
                    assert_eq!(dec1(&msp, &chosen).unwrap().exponent(), (a * x).value());
                }
            }
        }
    }
}

#[test]
fn every_table_over_f3_decodes_under_non_threshold_formulas() {
    let f3 = PrimeField::new(3).unwrap();
    for text in common::non_threshold(3) {
        let scheme = FourierFss::from_formula(text, 3, f3, None, 3, true).unwrap();
        for (i, t) in TruthTable::enumerate(f3).enumerate() {
            let f = SuccinctFunction::from_truth_table(&t);
            check_correct(&scheme, &f, i as u64).unwrap();
        }
    }
}

#[test]
fn padding_shapes() {
    let f5 = PrimeField::new(5).unwrap();
    let one = chi(f5, 2);
    let two = SuccinctFunction::from_terms(f5, vec![FourierTerm::basis(f5.elem(1)), FourierTerm::basis(f5.elem(3))]).unwrap();
    let padded = FourierFss::from_formula("THRESH(2; P1, P2, P3)", 3, f5, None, 2, true).unwrap();
    let bare = FourierFss::from_formula("THRESH(2; P1, P2, P3)", 3, f5, None, 2, false).unwrap();
    let mut rng = common::seeded(1);
    let shape = |keys: Vec<fourier_fss::fss::KeyBundle>| keys.iter().map(|k| k.terms.len()).collect::<Vec<_>>();
    assert_eq!(shape(padded.gen(&one, &mut rng).unwrap()), vec![2, 2, 2]);
    assert_eq!(shape(padded.gen(&two, &mut rng).unwrap()), vec![2, 2, 2]);
    assert_eq!(shape(bare.gen(&one, &mut rng).unwrap()), vec![1, 1, 1]);
    assert_eq!(shape(bare.gen(&two, &mut rng).unwrap()), vec![2, 2, 2]);
}

#[test]
fn joint_enumeration_agrees_with_block_audit() {
    let f3 = PrimeField::new(3).unwrap();
    let scheme = FourierFss::from_formula("THRESH(2; P1, P2, P3)", 3, f3, None, 1, true).unwrap();
    assert_eq!(joint_tape_count(&scheme, 1), 3 * 7 * 7 * 7);
    let pairs = [(chi(f3, 1), chi(f3, 2)), (chi(f3, 0), chi(f3, 1))];
    let report = audit_security(&scheme, &pairs, None).unwrap();
    assert!(report.all_zero());
    for (f0, f1) in &pairs {
        for b in [set(&[1]), set(&[2]), set(&[3])] {
            assert!(joint_view_distance(&scheme, f0, f1, b, false).unwrap().is_zero());
            assert!(joint_view_distance(&scheme, f0, f1, b, true).unwrap().is_zero());
        }
    }
    assert!(matches!(
        joint_view_distance(&scheme, &pairs[0].0, &pairs[0].1, set(&[1, 3]), false),
        Err(Error::Qualified(_))
    ));
}

#[test]
fn joint_enumeration_on_a_non_threshold_formula() {
    let f3 = PrimeField::new(3).unwrap();
    let scheme = FourierFss::from_formula("(P1 AND P2) OR P3", 3, f3, None, 1, true).unwrap();
    assert_eq!(joint_tape_count(&scheme, 1), 3 * 7 * 7 * 7);
    let pairs = [(chi(f3, 1), chi(f3, 2)), (SuccinctFunction::constant(f3, 1), SuccinctFunction::constant(f3, -1))];
    for (f0, f1) in &pairs {
        for b in [set(&[1]), set(&[2])] {
            assert!(joint_view_distance(&scheme, f0, f1, b, true).unwrap().is_zero());
        }
    }
}

#[test]
fn unpadded_term_counts_are_visible() {
    let f3 = PrimeField::new(3).unwrap();
    let scheme = FourierFss::from_formula("THRESH(2; P1, P2, P3)", 3, f3, None, 2, false).unwrap();
    let one = chi(f3, 1);
    let two = SuccinctFunction::from_terms(f3, vec![FourierTerm::basis(f3.elem(1)), FourierTerm::basis(f3.elem(2))]).unwrap();
    assert_eq!(joint_view_distance(&scheme, &one, &two, set(&[1]), false).unwrap().value(), 1.0);
    let report = audit_security(&scheme, &[(one, two)], None).unwrap();
    assert!(!report.all_zero());
}

#[test]
fn decode_rejects_inconsistent_inputs() {
    let f5 = PrimeField::new(5).unwrap();
    let scheme = FourierFss::from_formula("THRESH(2; P1, P2, P3)", 3, f5, None, 1, true).unwrap();
    let keys = scheme.gen(&chi(f5, 2), &mut common::seeded(2)).unwrap();
    let a = eval_succinct(&keys[0], f5.elem(1)).unwrap();
    let b = eval_succinct(&keys[1], f5.elem(2)).unwrap();
    assert!(matches!(scheme.decode(&[a.clone(), b]), Err(Error::InconsistentShares(_))));
    assert!(scheme.decode(&[a.clone(), a.clone()]).is_err());
    let other = FourierFss::from_formula("THRESH(3; P1, P2, P3)", 3, f5, None, 1, true).unwrap();
    let c = eval_succinct(&keys[2], f5.elem(1)).unwrap();
    assert!(matches!(other.decode(&[a, c]), Err(Error::Integrity(_))));
    assert!(matches!(scheme.decode(&[]), Err(Error::NotQualified(_))));
}

#[test]
fn evaluation_is_deterministic() {
    let f7 = PrimeField::new(7).unwrap();
    let scheme = FourierFss::from_formula("(P1 AND P2) OR P3", 3, f7, None, 2, true).unwrap();
    let keys = scheme.gen(&chi(f7, 3), &mut common::seeded(4)).unwrap();
    for k in &keys {
        for x in f7.elements() {
            assert_eq!(eval_succinct(k, x).unwrap(), eval_succinct(k, x).unwrap());
            if x.is_zero() {
                assert!(eval_succinct(k, x).unwrap().terms.iter().all(|t| t.basis.iter().all(|r| r.exponent() == 0)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_instances_decode_correctly(
        f in common::formula_strategy(4),
        qi in 0usize..3,
        terms in 0usize..=5,
        seed in any::<u64>(),
        pad in any::<bool>(),
    ) {
        let q = [5u64, 7, 11][qi];
        let field = PrimeField::new(q).unwrap();
        let scheme = FourierFss::from_formula(&f.to_string(), 4, field, None, 5, pad).unwrap();
        let bound = scheme.coeff_field().signed_bound();
        let func = common::random_function(&mut common::seeded(seed), field, terms, bound);
        prop_assert!(check_correct(&scheme, &func, seed ^ 1).is_ok());
    }

    #[test]
    fn threshold_instances_decode_correctly(n in 1usize..=4, seed in any::<u64>()) {
        let f7 = PrimeField::new(7).unwrap();
        let text = Formula::threshold_of(n, 4).to_string();
        let scheme = FourierFss::from_formula(&text, 4, f7, None, 3, true).unwrap();
        let func = common::random_function(&mut common::seeded(seed), f7, 3, scheme.coeff_field().signed_bound());
        prop_assert!(check_correct(&scheme, &func, seed).is_ok());
    }
}
