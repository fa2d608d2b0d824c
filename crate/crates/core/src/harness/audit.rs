//! Exhaustive audits: MSP versus formula semantics, and forbidden-set view
//! distributions over all dealer randomness.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::access::{self, Formula, PartySet};
use crate::error::{Error, Result};
use crate::field::{unit_e1, FieldElement, PrimeField};
use crate::fss::{eval_succinct, FourierFss, SuccinctFunction, TermKey};
use crate::lss;
use crate::msp::Msp;

use super::config::{build_scheme, read_json, FunctionDecl};

/// Largest subset enumeration the structure audit attempts (`2^20`).
pub const MAX_AUDIT_PARTIES: usize = 20;

/// Cap on the randomness enumerated for one block (or one joint tape).
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub formula: String,
    pub q: u64,
    pub rows: usize,
    pub cols: usize,
    pub subsets: usize,
    pub consistent: usize,
    pub qualified: Vec<PartySet>,
    pub violations: Vec<String>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.consistent == self.subsets
    }
}

impl fmt::Display for StructureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "formula: {}", self.formula)?;
        writeln!(f, "field: F_{}", self.q)?;
        writeln!(f, "msp: {} rows x {} cols", self.rows, self.cols)?;
        writeln!(f, "subsets: {}/{} consistent", self.consistent, self.subsets)?;
        let q: Vec<String> = self.qualified.iter().map(|s| s.to_string()).collect();
        writeln!(f, "qualified: {}", q.join(" "))?;
        if self.violations.is_empty() {
            writeln!(f, "violations: none")
        } else {
            writeln!(f, "violations: {}", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

fn is_zero(v: &[FieldElement]) -> bool {
    v.iter().all(|e| e.is_zero())
}

/// Checks `msp` against `formula` on every subset: acceptance must match
/// qualification, `λ` must satisfy `M_Aᵀλ = e₁` and `ξ` must satisfy
/// `M_Bξ = 0, ξ₁ = 1`, each verified by substitution.
pub fn audit_msp(formula: &Formula, msp: &Msp) -> Result<StructureReport> {
    let p = msp.parties();
    if p > MAX_AUDIT_PARTIES {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << p,
            limit: 1u128 << MAX_AUDIT_PARTIES,
        });
    }
    let mut report = StructureReport {
        formula: formula.to_string(),
        q: msp.field().modulus(),
        rows: msp.rows(),
        cols: msp.cols(),
        subsets: 0,
        consistent: 0,
        qualified: Vec::new(),
        violations: Vec::new(),
    };
    let e1 = unit_e1(msp.field(), msp.cols());
    for s in PartySet::all_subsets(p) {
        report.subsets += 1;
        let expected = formula.qualifies(s);
        let accepted = msp.accepts(s);
        let before = report.violations.len();
        if expected != accepted {
            report
                .violations
                .push(format!("{s}: formula says {expected}, MSP says {accepted}"));
        }
        if expected {
            report.qualified.push(s);
            match msp.recombination(s) {
                Ok(rec) => {
                    let check = msp.matrix().select_rows(&rec.rows).transpose().mul_vec(&rec.lambda)?;
                    if check != e1 {
                        report.violations.push(format!("{s}: recombination vector fails M_A^T λ = e1"));
                    }
                }
                Err(e) => report.violations.push(format!("{s}: no recombination vector ({e})")),
            }
        } else {
            match msp.forbidden_witness(s) {
                Ok(xi) => {
                    let image = msp.sub_matrix(s).mul_vec(&xi)?;
                    if !is_zero(&image) || xi[0] != msp.field().one() {
                        report.violations.push(format!("{s}: witness fails M_B ξ = 0, ξ1 = 1"));
                    }
                }
                Err(e) => report.violations.push(format!("{s}: no forbidden witness ({e})")),
            }
        }
        if report.violations.len() == before {
            report.consistent += 1;
        }
    }
    Ok(report)
}

pub fn audit_structure(access_text: &str, parties: usize, q: u64) -> Result<StructureReport> {
    if parties > MAX_AUDIT_PARTIES {
        return Err(Error::BudgetExceeded {
            needed: 1u128 << parties,
            limit: 1u128 << MAX_AUDIT_PARTIES,
        });
    }
    let field = PrimeField::new(q)?;
    let formula = access::parse(access_text, parties)?;
    let msp = Msp::from_formula(&formula, parties, field)?;
    audit_msp(&formula, &msp)
}

/// Multiset of views, keyed by the viewed values.
type ViewCounts<V> = HashMap<V, u64>;

/// Total variation distance between two view multisets of equal total `n`,
/// as the exact fraction `numerator / (2n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Distance {
    pub numerator: u128,
    pub denominator: u128,
}

impl Distance {
    pub const ZERO: Distance = Distance {
        numerator: 0,
        denominator: 1,
    };
    pub const ONE: Distance = Distance {
        numerator: 1,
        denominator: 1,
    };

    pub fn is_zero(self) -> bool {
        self.numerator == 0
    }

    pub fn value(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

fn tv_distance<V: std::hash::Hash + Eq>(a: &ViewCounts<V>, b: &ViewCounts<V>) -> Distance {
    let total_a: u64 = a.values().sum();
    let total_b: u64 = b.values().sum();
    assert_eq!(total_a, total_b, "view multisets over the same randomness space");
    let mut diff: u128 = 0;
    for (k, &ca) in a {
        diff += (ca as i128 - *b.get(k).unwrap_or(&0) as i128).unsigned_abs();
    }
    for (k, &cb) in b {
        if !a.contains_key(k) {
            diff += cb as u128;
        }
    }
    Distance {
        numerator: diff,
        denominator: 2 * total_a as u128,
    }
}

/// Every vector of `F^len`, in lexicographic order.
fn enumerate_vectors(field: PrimeField, len: usize) -> impl Iterator<Item = Vec<FieldElement>> {
    let q = field.modulus();
    let total = q.pow(len as u32);
    (0..total).map(move |mut idx| {
        (0..len)
            .map(|_| {
                let d = idx % q;
                idx /= q;
                field.elem(d)
            })
            .collect()
    })
}

fn count_space(field: PrimeField, len: usize) -> u128 {
    (field.modulus() as u128).saturating_pow(len as u32)
}

/// Exact view distribution of `B`'s shares of `secret`, over all `r`.
pub fn share_view_distribution(msp: &Msp, secret: FieldElement, b: PartySet) -> Result<ViewCounts<Vec<u64>>> {
    let mut counts = HashMap::new();
    for r in enumerate_vectors(msp.field(), msp.cols() - 1) {
        let shares = lss::share_with_randomness(secret, msp, &r)?;
        let view: Vec<u64> = shares.restrict(msp, b).iter().map(|v| v.value()).collect();
        *counts.entry(view).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Distance between `B`'s views of sharings of `s0` and `s1`.
pub fn share_distance(msp: &Msp, s0: FieldElement, s1: FieldElement, b: PartySet) -> Result<Distance> {
    Ok(tv_distance(
        &share_view_distribution(msp, s0, b)?,
        &share_view_distribution(msp, s1, b)?,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairFinding {
    pub forbidden: PartySet,
    pub pair: usize,
    /// Upper bound on the statistical distance of the two key-view distributions.
    pub distance: f64,
    pub exact_zero: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecurityReport {
    pub access: String,
    pub q: u64,
    pub coeff_q: u64,
    pub budget: usize,
    pub padded: bool,
    pub randomness_per_block: (u128, u128),
    pub findings: Vec<PairFinding>,
}

impl SecurityReport {
    pub fn max_distance(&self) -> f64 {
        self.findings.iter().map(|f| f.distance).fold(0.0, f64::max)
    }

    pub fn all_zero(&self) -> bool {
        self.findings.iter().all(|f| f.exact_zero)
    }
}

impl fmt::Display for SecurityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "access: {}", self.access)?;
        writeln!(
            f,
            "fields: F_{} (basis), F_{} (coefficients); budget {} ({})",
            self.q,
            self.coeff_q,
            self.budget,
            if self.padded { "padded" } else { "unpadded" }
        )?;
        writeln!(
            f,
            "randomness enumerated per block: {} basis, {} coefficient",
            self.randomness_per_block.0, self.randomness_per_block.1
        )?;
        for finding in &self.findings {
            write!(
                f,
                "B={} pair {}: distance {}",
                finding.forbidden,
                finding.pair + 1,
                if finding.exact_zero { "0".to_string() } else { format!("{:.6}", finding.distance) }
            )?;
            match &finding.note {
                Some(n) => writeln!(f, " ({n})")?,
                None => writeln!(f)?,
            }
        }
        writeln!(f, "max distance: {}", if self.all_zero() { "0".into() } else { format!("{:.6}", self.max_distance()) })
    }
}

/// The forbidden sets to audit: `requested`, or every nonempty forbidden set.
fn forbidden_sets(scheme: &FourierFss, requested: Option<&[PartySet]>) -> Result<Vec<PartySet>> {
    let msp = scheme.msp();
    match requested {
        Some(sets) => {
            for &b in sets {
                if msp.accepts(b) || scheme.coeff_msp().accepts(b) {
                    return Err(Error::Qualified(b));
                }
            }
            Ok(sets.to_vec())
        }
        None => Ok(PartySet::all_subsets(msp.parties())
            .filter(|&s| !s.is_empty() && !msp.accepts(s))
            .collect()),
    }
}

struct BlockCache<'a> {
    msp: &'a Msp,
    b: PartySet,
    dists: HashMap<u64, ViewCounts<Vec<u64>>>,
}

impl<'a> BlockCache<'a> {
    fn new(msp: &'a Msp, b: PartySet) -> Self {
        BlockCache {
            msp,
            b,
            dists: HashMap::new(),
        }
    }

    fn distance(&mut self, s0: FieldElement, s1: FieldElement) -> Result<Distance> {
        for s in [s0, s1] {
            if !self.dists.contains_key(&s.value()) {
                let d = share_view_distribution(self.msp, s, self.b)?;
                self.dists.insert(s.value(), d);
            }
        }
        Ok(tv_distance(&self.dists[&s0.value()], &self.dists[&s1.value()]))
    }
}

/// For each forbidden set `B` and each pair `(f₀, f₁)`, compares `B`'s key
/// views over every value of the dealer's randomness.
///
/// Each basis key and each coefficient coordinate is shared with its own
/// independent randomness, so `B`'s view is a product of independent blocks.
/// Every block is enumerated exhaustively; the pair distance is bounded by
/// the sum of block distances and is exactly zero when they all are.
pub fn audit_security(
    scheme: &FourierFss,
    pairs: &[(SuccinctFunction, SuccinctFunction)],
    requested: Option<&[PartySet]>,
) -> Result<SecurityReport> {
    let (field, coeff_field) = (scheme.field(), scheme.coeff_field());
    let basis_space = count_space(field, scheme.msp().cols() - 1);
    let coeff_space = count_space(coeff_field, scheme.coeff_msp().cols() - 1);
    let needed = basis_space.saturating_mul(coeff_space);
    if needed > ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded {
            needed,
            limit: ENUMERATION_LIMIT,
        });
    }
    let sets = forbidden_sets(scheme, requested)?;
    let padded: Vec<_> = pairs
        .iter()
        .map(|(f0, f1)| Ok((scheme.padded_terms(f0)?, scheme.padded_terms(f1)?)))
        .collect::<Result<_>>()?;

    let mut findings = Vec::new();
    for &b in &sets {
        let mut basis = BlockCache::new(scheme.msp(), b);
        let mut coeff = BlockCache::new(scheme.coeff_msp(), b);
        for (idx, ((f0, f1), (t0, t1))) in pairs.iter().zip(&padded).enumerate() {
            if f0.is_boolean() != f1.is_boolean() {
                findings.push(PairFinding {
                    forbidden: b,
                    pair: idx,
                    distance: 1.0,
                    exact_zero: false,
                    note: Some("public headers differ".into()),
                });
                continue;
            }
            if t0.len() != t1.len() {
                findings.push(PairFinding {
                    forbidden: b,
                    pair: idx,
                    distance: 1.0,
                    exact_zero: false,
                    note: Some(format!("term counts differ: {} vs {}", t0.len(), t1.len())),
                });
                continue;
            }
            let mut total = 0.0;
            let mut exact_zero = true;
            for (x, y) in t0.iter().zip(t1) {
                let mut blocks = vec![basis.distance(x.freq, y.freq)?];
                let cx = lss::lift_coords(&x.coeff, coeff_field)?;
                let cy = lss::lift_coords(&y.coeff, coeff_field)?;
                for (&u, &v) in cx.iter().zip(&cy) {
                    blocks.push(coeff.distance(u, v)?);
                }
                for d in blocks {
                    exact_zero &= d.is_zero();
                    total += d.value();
                }
            }
            findings.push(PairFinding {
                forbidden: b,
                pair: idx,
                distance: total.min(1.0),
                exact_zero,
                note: None,
            });
        }
    }
    Ok(SecurityReport {
        access: scheme.header(false).access,
        q: field.modulus(),
        coeff_q: coeff_field.modulus(),
        budget: scheme.budget(),
        padded: scheme.header(false).padded,
        randomness_per_block: (basis_space, coeff_space),
        findings,
    })
}

/// Number of dealer tapes for one key generation.
pub fn joint_tape_count(scheme: &FourierFss, terms: usize) -> u128 {
    let q = scheme.field().modulus();
    let per_term = count_space(scheme.field(), scheme.msp().cols() - 1)
        .saturating_mul(count_space(scheme.coeff_field(), scheme.coeff_msp().cols() - 1).saturating_pow(q as u32));
    per_term.saturating_pow(terms as u32)
}

/// Distance between `B`'s complete views under `f₀` and `f₁`, enumerating
/// every full dealer tape jointly. With `with_shares`, the view also holds
/// `B`'s evaluation shares at every input.
pub fn joint_view_distance(
    scheme: &FourierFss,
    f0: &SuccinctFunction,
    f1: &SuccinctFunction,
    b: PartySet,
    with_shares: bool,
) -> Result<Distance> {
    if scheme.msp().accepts(b) {
        return Err(Error::Qualified(b));
    }
    let (n0, n1) = (scheme.padded_terms(f0)?.len(), scheme.padded_terms(f1)?.len());
    if n0 != n1 || f0.is_boolean() != f1.is_boolean() {
        return Ok(Distance::ONE);
    }
    let total = joint_tape_count(scheme, n0);
    if total > ENUMERATION_LIMIT {
        return Err(Error::BudgetExceeded {
            needed: total,
            limit: ENUMERATION_LIMIT,
        });
    }

    type View = (Vec<(usize, Vec<TermKey>)>, Vec<Vec<Vec<u64>>>);
    let distribution = |f: &SuccinctFunction| -> Result<ViewCounts<View>> {
        let mut counts = HashMap::new();
        for tape in 0..total as u64 {
            let mut rest = tape;
            let bundles = scheme.gen_with(f, |field| {
                let m = field.modulus();
                let d = rest % m;
                rest /= m;
                field.elem(d)
            })?;
            let mine: Vec<_> = bundles.into_iter().filter(|k| b.contains(k.party)).collect();
            let mut shares = Vec::new();
            if with_shares {
                for x in scheme.field().elements() {
                    for k in &mine {
                        let s = eval_succinct(k, x)?;
                        shares.push(s.terms.iter().flat_map(|t| t.basis.iter().map(|r| r.exponent())).collect());
                    }
                }
            }
            let keys = mine.into_iter().map(|k| (k.party, k.terms)).collect();
            *counts.entry((keys, vec![shares])).or_insert(0) += 1;
        }
        Ok(counts)
    };
    Ok(tv_distance(&distribution(f0)?, &distribution(f1)?))
}

/// The standard pair list used when a security config names none: basis
/// functions against each other, scaled and multi-term sums, constants, and
/// `±1` tables. Pairs the scheme cannot share (term budget, coefficient
/// range) are dropped.
pub fn default_pairs(scheme: &FourierFss) -> Vec<(SuccinctFunction, SuccinctFunction)> {
    use super::config::TermSpec;
    let field = scheme.field();
    let q = field.modulus();
    let term = |a: u64, c: i64| TermSpec {
        a,
        coords: vec![c],
        denominator: 1,
    };
    let table = |flip: &[u64]| FunctionDecl::table((0..q).map(|x| if flip.contains(&x) { -1 } else { 1 }).collect());
    let boolean = |d: FunctionDecl| FunctionDecl { boolean: true, ..d };
    let decls: Vec<(FunctionDecl, FunctionDecl)> = vec![
        (FunctionDecl::basis_sum(&[1]), FunctionDecl::basis_sum(&[q - 1])),
        (FunctionDecl::basis_sum(&[0]), FunctionDecl::basis_sum(&[1])),
        (FunctionDecl::basis_sum(&[0]), FunctionDecl::basis_sum(&[q - 1])),
        (FunctionDecl::terms(vec![term(1, -1)]), FunctionDecl::terms(vec![term(q - 1, 1)])),
        (FunctionDecl::basis_sum(&[1, q - 1]), FunctionDecl::terms(vec![term(0, 1), term(1, -1)])),
        (boolean(FunctionDecl::terms(vec![term(0, 1)])), boolean(FunctionDecl::terms(vec![term(0, -1)]))),
        (table(&[1, 2]), table(&[0])),
        (table(&[1]), table(&[2])),
        (table(&[0]), boolean(FunctionDecl::terms(vec![term(0, 1)]))),
        (table(&[1, 2]), table(&[0, q - 1])),
    ];
    decls
        .into_iter()
        .filter_map(|(a, b)| Some((a.build(field).ok()?, b.build(field).ok()?)))
        .filter(|(a, b)| scheme.padded_terms(a).is_ok() && scheme.padded_terms(b).is_ok())
        .collect()
}

fn default_pad() -> bool {
    true
}

/// Input file for `audit-security`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecurityConfig {
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff_q: Option<u64>,
    pub parties: usize,
    pub access: String,
    pub budget: usize,
    #[serde(default = "default_pad")]
    pub pad: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(FunctionDecl, FunctionDecl)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<Vec<usize>>>,
}

impl SecurityConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn run(&self) -> Result<SecurityReport> {
        let scheme = build_scheme(self.q, self.coeff_q, self.parties, &self.access, self.budget, self.pad)?;
        let pairs = match &self.pairs {
            Some(decls) => decls
                .iter()
                .map(|(a, b)| Ok((a.build(scheme.field())?, b.build(scheme.field())?)))
                .collect::<Result<Vec<_>>>()?,
            None => default_pairs(&scheme),
        };
        if pairs.is_empty() {
            return Err(Error::Config("no function pairs fit the term budget".into()));
        }
        let forbidden: Option<Vec<PartySet>> = self.forbidden.as_ref().map(|sets| {
            sets.iter()
                .map(|s| s.iter().copied().filter(|&i| (1..=PartySet::MAX_PARTIES).contains(&i)).collect())
                .collect()
        });
        audit_security(&scheme, &pairs, forbidden.as_deref())
    }
}
