//! Shared corpus, generators and independent oracles for the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use fourier_fss::access::{self, Formula, PartySet};
use fourier_fss::cyclotomic::{CycScaled, FourierTerm};
use fourier_fss::field::PrimeField;
use fourier_fss::fss::SuccinctFunction;

/// Five formulas per party count that are not a single threshold gate. Every
/// gate with `t ≥ 2` has fan-in at most 3, so they work over `F_3` too.
pub fn non_threshold(parties: usize) -> &'static [&'static str] {
    match parties {
        2 => &[
            "P1 AND (P1 OR P2)",
            "(P1 AND P2) OR (P2 AND P1)",
            "P2 OR (P1 AND P2)",
            "THRESH(2; P1, P2, P1 AND P2)",
            "(P1 OR P2) AND (P2 OR P1) AND P2",
        ],
        3 => &[
            "(P1 AND P2) OR (P2 AND P3)",
            "P1 AND (P2 OR P3)",
            "(P1 OR P2) AND (P2 OR P3)",
            "THRESH(2; P1 AND P2, P3, P1 OR P2)",
            "P1 OR (P2 AND P3)",
        ],
        4 => &[
            "(P1 AND P2) OR (P3 AND P4)",
            "(P1 OR P2) AND (P3 OR P4)",
            "THRESH(2; P1, P2 AND P3, P4)",
            "P1 AND THRESH(2; P2, P3, P4)",
            "(P1 AND P2) OR (P2 AND P3) OR (P3 AND P4)",
        ],
        5 => &[
            "(P1 AND P2) OR (P3 AND P4 AND P5)",
            "THRESH(2; P1 AND P2, P3 OR P4, P5)",
            "P1 AND (P2 OR P3) AND (P4 OR P5)",
            "THRESH(3; P1, P2, THRESH(2; P3, P4, P5))",
            "(P1 OR P2 OR P3) AND (P3 OR P4 OR P5)",
        ],
        _ => &[],
    }
}

const EXTRA: &[(&str, usize)] = &[
    ("P1", 1),
    ("P1 AND P2", 2),
    ("P1 OR P2 OR P3 OR P4 OR P5 OR P6", 6),
    ("THRESH(4; P1, P2, P3, P4, P5, P6)", 6),
    ("(P1 AND P2) OR (P3 AND P4) OR (P5 AND P6)", 6),
    ("THRESH(2; P1 AND P2, P3 AND P4, P5 AND P6, P1 OR P6)", 6),
    ("THRESH(2; THRESH(2; P1, P2, P3), THRESH(2; P4, P5, P6), P1 AND P6)", 6),
    ("(P1 OR (P2 AND (P3 OR (P4 AND (P5 OR P6)))))", 6),
    ("THRESH(1; P1, P2 AND P3) AND THRESH(3; P3, P4, P5, P6)", 6),
];

/// The fixed formulas, all thresholds for `p ≤ 6`, and seeded random formulas
/// with gate fan-in at most 5.
pub fn corpus() -> Vec<(Formula, usize)> {
    let mut out = Vec::new();
    for p in 2..=5 {
        for text in non_threshold(p) {
            out.push((access::parse(text, p).unwrap(), p));
        }
    }
    for &(text, p) in EXTRA {
        out.push((access::parse(text, p).unwrap(), p));
    }
    for p in 1..=6 {
        for n in 1..=p {
            out.push((Formula::threshold_of(n, p), p));
        }
    }
    let mut rng = seeded(0xC0FFEE);
    for i in 0..60 {
        let p = 2 + i % 5;
        out.push((random_formula(&mut rng, p, 5), p));
    }
    out
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha20Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn random_tree<R: Rng>(rng: &mut R, parties: usize, depth: usize, max_fan_in: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return Formula::Party(rng.gen_range(1..=parties));
    }
    let k = rng.gen_range(2..=max_fan_in.max(2));
    let children: Vec<Formula> = (0..k).map(|_| random_tree(rng, parties, depth - 1, max_fan_in)).collect();
    match rng.gen_range(0..3) {
        0 => Formula::And(children),
        1 => Formula::Or(children),
        _ => Formula::Threshold {
            threshold: rng.gen_range(1..=k),
            children,
        },
    }
}

/// Adds a clause for every party the formula does not mention.
pub fn cover(f: Formula, parties: usize) -> Formula {
    let missing: Vec<usize> = (1..=parties).filter(|&i| !f.mentioned().contains(i)).collect();
    if missing.is_empty() {
        return f;
    }
    let mut leaves: Vec<Formula> = missing.into_iter().map(Formula::Party).collect();
    if leaves.len() == 1 {
        leaves.push(Formula::Party(1));
    }
    Formula::Or(vec![f, Formula::And(leaves)])
}

pub fn random_formula<R: Rng>(rng: &mut R, parties: usize, max_fan_in: usize) -> Formula {
    cover(random_tree(rng, parties, 3, max_fan_in), parties)
}

/// Formulas over `p` parties, every party mentioned, arbitrary nesting.
pub fn formula_strategy(parties: usize) -> impl Strategy<Value = Formula> {
    let leaf = (1..=parties).prop_map(Formula::Party);
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            prop::collection::vec(inner, 2..5).prop_flat_map(|children| {
                (1..=children.len()).prop_map(move |threshold| Formula::Threshold {
                    threshold,
                    children: children.clone(),
                })
            }),
        ]
    })
    .prop_map(move |f| cover(f, parties))
}

/// Truth-table oracle for monotone evaluation, independent of `qualifies`:
/// the minimal qualified sets of a formula, computed bottom-up.
pub fn minimal_sets(f: &Formula) -> Vec<PartySet> {
    fn reduce(mut sets: Vec<PartySet>) -> Vec<PartySet> {
        sets.sort_by_key(|s| (s.len(), s.bits()));
        sets.dedup();
        let mut out: Vec<PartySet> = Vec::new();
        for s in sets {
            if !out.iter().any(|m| m.is_subset(s)) {
                out.push(s);
            }
        }
        out
    }
    fn at_least(children: &[Vec<PartySet>], t: usize) -> Vec<PartySet> {
        // every way of choosing t children and one minimal set from each
        let mut acc = Vec::new();
        let k = children.len();
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize != t {
                continue;
            }
            let mut partial = vec![PartySet::empty()];
            for (i, c) in children.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    partial = partial.iter().flat_map(|p| c.iter().map(move |s| p.union(*s))).collect();
                    partial = reduce(partial);
                }
            }
            acc.extend(partial);
        }
        reduce(acc)
    }
    match f {
        Formula::Party(i) => vec![[*i].into_iter().collect()],
        Formula::And(ch) => at_least(&ch.iter().map(minimal_sets).collect::<Vec<_>>(), ch.len()),
        Formula::Or(ch) => at_least(&ch.iter().map(minimal_sets).collect::<Vec<_>>(), 1),
        Formula::Threshold { threshold, children } => {
            at_least(&children.iter().map(minimal_sets).collect::<Vec<_>>(), *threshold)
        }
    }
}

pub fn oracle_qualifies(minimal: &[PartySet], s: PartySet) -> bool {
    minimal.iter().any(|m| m.is_subset(s))
}

fn pow_mod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1u64;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    r
}

/// Shamir shares `g(i)` for `g(z) = s + Σ_k coeffs[k]·z^{k+1}`.
pub fn shamir_shares(q: u64, s: u64, coeffs: &[u64], points: &[u64]) -> Vec<u64> {
    points
        .iter()
        .map(|&x| {
            coeffs
                .iter()
                .rev()
                .fold(0u64, |acc, &c| (acc + c) * x % q)
                .wrapping_add(s)
                % q
        })
        .collect()
}

/// `g(0)` by Lagrange interpolation through `(points[i], values[i])`.
pub fn lagrange_at_zero(q: u64, points: &[u64], values: &[u64]) -> u64 {
    let mut total = 0u64;
    for (i, (&xi, &yi)) in points.iter().zip(values).enumerate() {
        let (mut num, mut den) = (1u64, 1u64);
        for (j, &xj) in points.iter().enumerate() {
            if i != j {
                num = num * ((q - xj % q) % q) % q;
                den = den * ((xi + q - xj % q) % q) % q;
            }
        }
        total = (total + yi * num % q * pow_mod(den, q - 2, q)) % q;
    }
    total
}

/// Floating-point DFT `f̂(a) = (1/q) Σ_x f(x) e^{-2πi a x / q}`.
pub fn dft_float(values: &[f64]) -> Vec<Complex64> {
    let q = values.len();
    (0..q)
        .map(|a| {
            values
                .iter()
                .enumerate()
                .map(|(x, &v)| Complex64::from_polar(v, -2.0 * std::f64::consts::PI * (a * x % q) as f64 / q as f64))
                .sum::<Complex64>()
                / q as f64
        })
        .collect()
}

/// `ω^{e}` in floating point.
pub fn omega(q: u64, e: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (e % q) as f64 / q as f64)
}

/// Random sparse function with `terms` terms whose coordinates fit `bound`.
pub fn random_function<R: Rng>(rng: &mut R, field: PrimeField, terms: usize, bound: i64) -> SuccinctFunction {
    let q = field.modulus();
    let terms = (0..terms)
        .map(|_| {
            let coords = (0..q).map(|_| rng.gen_range(-bound..=bound)).collect();
            FourierTerm::new(
                field.elem(rng.gen_range(0..q)),
                CycScaled::from_coords(field, coords).unwrap(),
            )
            .unwrap()
        })
        .collect();
    SuccinctFunction::from_terms(field, terms).unwrap()
}

/// Independent float evaluation of `Σ β_i ω^{a_i x}`.
pub fn evaluate_float(f: &SuccinctFunction, x: u64) -> Complex64 {
    let q = f.field().modulus();
    f.terms()
        .iter()
        .map(|t| {
            let beta: Complex64 = t
                .coeff
                .coords()
                .iter()
                .enumerate()
                .map(|(j, &c)| omega(q, j as u64) * c as f64)
                .sum::<Complex64>()
                / q as f64;
            beta * omega(q, t.freq.value() * x % q)
        })
        .sum()
}
