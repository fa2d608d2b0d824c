//! Fourier-basis function secret sharing under an arbitrary MSP.
//!
//! A basis function `χ_a(x) = ω^{ax}` is shared by secret-sharing `a`: party
//! `i` evaluates `ω^{k_i x}` on each of its rows and a qualified set combines
//! the results as `Π (ω^{k_j x})^{λ_j} = ω^{ax}`. A function
//! `f = Σ β_i χ_{a_i}` shares every `a_i` this way and every `β_i` with the
//! coefficient scheme over `F_Q`, using fresh randomness per term.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::access::{self, PartySet};
use crate::cyclotomic::{evaluate_reference, fourier_terms, CycScaled, FourierTerm, RootPower, TruthTable};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::lss::{self, default_coefficient_field};
use crate::msp::Msp;

/// Allowed distance between a decoded `±1` function value and the nearest sign.
pub const ROUNDING_TOLERANCE: f64 = 1e-6;

/// Party `i`'s key for one basis function: one value per owned MSP row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisKey {
    pub party: usize,
    pub values: Vec<FieldElement>,
}

/// `ω^{k x}` for every owned row, stored as exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisShare {
    pub party: usize,
    pub point: FieldElement,
    pub roots: Vec<RootPower>,
}

fn group_by_party(msp: &Msp, values: &[FieldElement]) -> Vec<BasisKey> {
    (1..=msp.parties())
        .map(|party| BasisKey {
            party,
            values: msp.rows_of_party(party).into_iter().map(|j| values[j]).collect(),
        })
        .collect()
}

/// Key generation for `χ_a` with explicit randomness `r ∈ F_q^{d-1}`.
pub fn gen1_with_randomness(a: FieldElement, msp: &Msp, r: &[FieldElement]) -> Result<Vec<BasisKey>> {
    let shares = lss::share_with_randomness(a, msp, r)?;
    Ok(group_by_party(msp, shares.values()))
}

pub fn gen1<R: Rng + ?Sized>(a: FieldElement, msp: &Msp, rng: &mut R) -> Result<Vec<BasisKey>> {
    let shares = lss::share(a, msp, rng)?;
    Ok(group_by_party(msp, shares.values()))
}

pub fn eval1(key: &BasisKey, x: FieldElement) -> Result<BasisShare> {
    let roots = key
        .values
        .iter()
        .map(|&k| Ok(RootPower::from_exponent(k.checked_mul(x)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BasisShare {
        party: key.party,
        point: x,
        roots,
    })
}

/// Lays per-party row values out in `msp.rows_of(a)` order, where `a` is the
/// set of parties present in `per_party`.
fn gather<T: Clone>(msp: &Msp, per_party: &BTreeMap<usize, &[T]>) -> Result<(PartySet, Vec<T>)> {
    let a: PartySet = per_party.keys().copied().collect();
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (&party, vals) in per_party {
        if party == 0 || party > msp.parties() {
            return Err(Error::InconsistentShares(format!("unknown party {party}")));
        }
        let owned = msp.rows_of_party(party).len();
        if vals.len() != owned {
            return Err(Error::InconsistentShares(format!(
                "party {party} supplied {} values for {owned} rows",
                vals.len()
            )));
        }
    }
    let mut out = Vec::new();
    for j in msp.rows_of(a) {
        let party = msp.labels()[j];
        let k = seen.entry(party).or_insert(0);
        out.push(per_party[&party][*k].clone());
        *k += 1;
    }
    Ok((a, out))
}

fn collect_parties<'a, T, V: ?Sized>(
    items: &'a [T],
    party: impl Fn(&T) -> usize,
    values: impl Fn(&'a T) -> &'a V,
) -> Result<BTreeMap<usize, &'a V>> {
    let mut map = BTreeMap::new();
    for item in items {
        if map.insert(party(item), values(item)).is_some() {
            return Err(Error::InconsistentShares(format!(
                "party {} appears twice",
                party(item)
            )));
        }
    }
    Ok(map)
}

/// `w = Π_j (v_j)^{λ_j}` over the rows of the parties present.
pub fn dec1(msp: &Msp, shares: &[BasisShare]) -> Result<RootPower> {
    let Some(first) = shares.first() else {
        return Err(Error::NotQualified(PartySet::empty()));
    };
    if shares.iter().any(|s| s.point != first.point) {
        return Err(Error::InconsistentShares("shares evaluated at different points".into()));
    }
    let per_party = collect_parties(shares, |s| s.party, |s| s.roots.as_slice())?;
    let (a, roots) = gather(msp, &per_party)?;
    let rec = msp.recombination(a)?;
    roots
        .iter()
        .zip(&rec.lambda)
        .try_fold(RootPower::one(msp.field()), |w, (v, &lambda)| {
            w.checked_mul(v.checked_pow(lambda)?)
        })
}

/// `f = Σ β_i χ_{a_i}` over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccinctFunction {
    field: PrimeField,
    terms: Vec<FourierTerm>,
    boolean: bool,
}

impl SuccinctFunction {
    pub fn from_terms(field: PrimeField, terms: Vec<FourierTerm>) -> Result<Self> {
        for t in &terms {
            if t.freq.modulus() != field.modulus() || t.coeff.denominator() != field.modulus() {
                return Err(Error::ModulusMismatch {
                    left: field.modulus(),
                    right: t.freq.modulus(),
                });
            }
        }
        Ok(SuccinctFunction {
            field,
            terms,
            boolean: false,
        })
    }

    /// The nonzero Fourier terms of a `±1` table; decoding will round to a sign.
    pub fn from_truth_table(table: &TruthTable) -> Self {
        SuccinctFunction {
            field: table.field(),
            terms: fourier_terms(table),
            boolean: true,
        }
    }

    /// The constant `n · χ_0`.
    pub fn constant(field: PrimeField, n: i64) -> Self {
        SuccinctFunction {
            field,
            terms: vec![FourierTerm::new(field.zero(), CycScaled::integer(field, n)).expect("same field")],
            boolean: n == 1 || n == -1,
        }
    }

    /// Declares the function `±1`-valued (checked against every input).
    pub fn declare_boolean(mut self) -> Result<Self> {
        for x in self.field.elements() {
            let v = self.evaluate(x)?;
            let plus = CycScaled::integer(self.field, 1);
            let minus = CycScaled::integer(self.field, -1);
            if !v.exact_eq(&plus) && !v.exact_eq(&minus) {
                return Err(Error::InvalidFunction(format!("f({x}) = {v} is not ±1")));
            }
        }
        self.boolean = true;
        Ok(self)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn is_boolean(&self) -> bool {
        self.boolean
    }

    pub fn evaluate(&self, x: FieldElement) -> Result<CycScaled> {
        evaluate_reference(self.field, &self.terms, x)
    }
}

/// Public parameters shared by every party's bundle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PublicHeader {
    pub q: u64,
    pub coeff_q: u64,
    pub parties: usize,
    pub access: String,
    pub budget: usize,
    pub padded: bool,
    pub boolean: bool,
    pub msp_digest: String,
    pub coeff_msp_digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermKey {
    /// `k` per owned row, in `F_q`.
    pub basis: Vec<FieldElement>,
    /// For each of the `q` coefficient coordinates, one share per owned row in `F_Q`.
    pub coeff: Vec<Vec<FieldElement>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KeyBundle {
    pub header: PublicHeader,
    pub party: usize,
    pub terms: Vec<TermKey>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TermShare {
    pub basis: Vec<RootPower>,
    pub coeff: Vec<Vec<FieldElement>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShareBundle {
    pub header: PublicHeader,
    pub party: usize,
    pub point: FieldElement,
    pub terms: Vec<TermShare>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub value: CycScaled,
    pub complex: Complex64,
    /// The sign, for functions declared `±1`-valued.
    pub rounded: Option<i8>,
}

/// A configured instance: access structure over `F_q` and `F_Q`, term budget
/// `ℓ`, and whether to pad with `0·χ_0` terms up to `ℓ`.
#[derive(Clone, Debug)]
pub struct FourierFss {
    msp: Msp,
    coeff_msp: Msp,
    access: String,
    budget: usize,
    pad: bool,
    digests: (String, String),
}

impl FourierFss {
    /// `coeff_msp` must have the same row labelling as `msp`, over a field
    /// large enough for coefficient coordinates.
    pub fn new(msp: Msp, coeff_msp: Msp, access: impl Into<String>, budget: usize, pad: bool) -> Result<Self> {
        if msp.labels() != coeff_msp.labels() || msp.parties() != coeff_msp.parties() {
            return Err(Error::InvalidAccess(
                "coefficient MSP must share the row labelling of the main MSP".into(),
            ));
        }
        let digests = (msp.digest(), coeff_msp.digest());
        Ok(FourierFss {
            msp,
            coeff_msp,
            access: access.into(),
            budget,
            pad,
            digests,
        })
    }

    /// Builds both MSPs from a formula; `coeff_field` defaults to the smallest
    /// prime above `max(2q, p)`.
    pub fn from_formula(
        access: &str,
        parties: usize,
        field: PrimeField,
        coeff_field: Option<PrimeField>,
        budget: usize,
        pad: bool,
    ) -> Result<Self> {
        let formula = access::parse(access, parties)?;
        let coeff_field = coeff_field.unwrap_or_else(|| default_coefficient_field(field, parties));
        let msp = Msp::from_formula(&formula, parties, field)?;
        let coeff_msp = Msp::from_formula(&formula, parties, coeff_field)?;
        FourierFss::new(msp, coeff_msp, formula.to_string(), budget, pad)
    }

    /// Rebuilds the instance a header describes and checks both MSP digests.
    pub fn from_header(header: &PublicHeader) -> Result<Self> {
        let scheme = FourierFss::from_formula(
            &header.access,
            header.parties,
            PrimeField::new(header.q)?,
            Some(PrimeField::new(header.coeff_q)?),
            header.budget,
            header.padded,
        )?;
        if scheme.digests.0 != header.msp_digest || scheme.digests.1 != header.coeff_msp_digest {
            return Err(Error::Integrity("MSP digest does not match the access structure".into()));
        }
        Ok(scheme)
    }

    pub fn msp(&self) -> &Msp {
        &self.msp
    }

    pub fn coeff_msp(&self) -> &Msp {
        &self.coeff_msp
    }

    pub fn field(&self) -> PrimeField {
        self.msp.field()
    }

    pub fn coeff_field(&self) -> PrimeField {
        self.coeff_msp.field()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn header(&self, boolean: bool) -> PublicHeader {
        PublicHeader {
            q: self.field().modulus(),
            coeff_q: self.coeff_field().modulus(),
            parties: self.msp.parties(),
            access: self.access.clone(),
            budget: self.budget,
            padded: self.pad,
            boolean,
            msp_digest: self.digests.0.clone(),
            coeff_msp_digest: self.digests.1.clone(),
        }
    }

    /// The terms actually shared: input order, then `0·χ_0` up to `ℓ` if padding.
    pub fn padded_terms(&self, f: &SuccinctFunction) -> Result<Vec<FourierTerm>> {
        if f.field() != self.field() {
            return Err(Error::ModulusMismatch {
                left: self.field().modulus(),
                right: f.field().modulus(),
            });
        }
        if f.terms().len() > self.budget {
            return Err(Error::TermOverflow {
                terms: f.terms().len(),
                budget: self.budget,
            });
        }
        let mut terms = f.terms().to_vec();
        if self.pad {
            terms.resize(self.budget, FourierTerm::padding(self.field()));
        }
        for t in &terms {
            lss::lift_coords(&t.coeff, self.coeff_field())?;
        }
        Ok(terms)
    }

    /// Key generation drawing every random field element from `draw`.
    ///
    /// Per term, in order: `d - 1` elements of `F_q` for the basis key, then
    /// for each coefficient coordinate `0..q`, `d_Q - 1` elements of `F_Q`.
    pub fn gen_with<D>(&self, f: &SuccinctFunction, mut draw: D) -> Result<Vec<KeyBundle>>
    where
        D: FnMut(PrimeField) -> FieldElement,
    {
        let terms = self.padded_terms(f)?;
        let header = self.header(f.is_boolean());
        let parties = self.msp.parties();
        let mut bundles: Vec<KeyBundle> = (1..=parties)
            .map(|party| KeyBundle {
                header: header.clone(),
                party,
                terms: Vec::with_capacity(terms.len()),
            })
            .collect();
        let (field, coeff_field) = (self.field(), self.coeff_field());
        for term in &terms {
            let r: Vec<FieldElement> = (1..self.msp.cols()).map(|_| draw(field)).collect();
            let keys = gen1_with_randomness(term.freq, &self.msp, &r)?;
            let coeff_r: Vec<Vec<FieldElement>> = (0..field.modulus())
                .map(|_| (1..self.coeff_msp.cols()).map(|_| draw(coeff_field)).collect())
                .collect();
            let shares = lss::share_coefficient_with_randomness(&term.coeff, &self.coeff_msp, &coeff_r)?;
            for (bundle, key) in bundles.iter_mut().zip(keys) {
                bundle.terms.push(TermKey {
                    basis: key.values,
                    coeff: shares.for_party(&self.coeff_msp, bundle.party),
                });
            }
        }
        Ok(bundles)
    }

    pub fn gen<R: Rng + ?Sized>(&self, f: &SuccinctFunction, rng: &mut R) -> Result<Vec<KeyBundle>> {
        self.gen_with(f, |field| field.elem(rng.gen_range(0..field.modulus())))
    }

    /// Decodes bundles from a set `A` of parties, all evaluated at one point.
    pub fn decode(&self, bundles: &[ShareBundle]) -> Result<Decoded> {
        let Some(first) = bundles.first() else {
            return Err(Error::NotQualified(PartySet::empty()));
        };
        if bundles.iter().any(|b| b.header != first.header) {
            return Err(Error::Integrity("share bundles carry different headers".into()));
        }
        if first.header.msp_digest != self.digests.0 || first.header.coeff_msp_digest != self.digests.1 {
            return Err(Error::Integrity("share bundles belong to a different instance".into()));
        }
        if bundles.iter().any(|b| b.point != first.point) {
            return Err(Error::InconsistentShares("bundles evaluated at different points".into()));
        }
        let n_terms = first.terms.len();
        if bundles.iter().any(|b| b.terms.len() != n_terms) {
            return Err(Error::InconsistentShares("bundles carry different term counts".into()));
        }
        let a: PartySet = bundles.iter().map(|b| b.party).filter(|p| (1..=PartySet::MAX_PARTIES).contains(p)).collect();
        if !self.msp.accepts(a) || !self.coeff_msp.accepts(a) {
            return Err(Error::NotQualified(a));
        }

        let field = self.field();
        let mut value = CycScaled::zero(field);
        for t in 0..n_terms {
            let basis: Vec<BasisShare> = bundles
                .iter()
                .map(|b| BasisShare {
                    party: b.party,
                    point: b.point,
                    roots: b.terms[t].basis.clone(),
                })
                .collect();
            let g = dec1(&self.msp, &basis)?;

            let coord_count = field.modulus() as usize;
            if bundles.iter().any(|b| b.terms[t].coeff.len() != coord_count) {
                return Err(Error::InconsistentShares(format!("term {t} has a malformed coefficient share")));
            }
            let coords: Vec<Vec<FieldElement>> = (0..coord_count)
                .map(|c| {
                    let per_party = collect_parties(bundles, |b| b.party, |b| b.terms[t].coeff[c].as_slice())?;
                    Ok(gather(&self.coeff_msp, &per_party)?.1)
                })
                .collect::<Result<_>>()?;
            let beta = lss::reconstruct_coefficient(&self.coeff_msp, a, &coords)?;
            value = value.checked_add(&beta.rotate(g)?)?;
        }

        let complex = value.to_complex();
        let rounded = if first.header.boolean {
            let sign = if complex.re >= 0.0 { 1 } else { -1 };
            if (complex - Complex64::new(sign as f64, 0.0)).norm() >= ROUNDING_TOLERANCE {
                return Err(Error::RoundingFailure {
                    re: complex.re,
                    im: complex.im,
                });
            }
            Some(sign)
        } else {
            None
        };
        Ok(Decoded {
            value,
            complex,
            rounded,
        })
    }
}

/// Per-term basis evaluation; coefficient shares pass through unchanged.
pub fn eval_succinct(bundle: &KeyBundle, x: FieldElement) -> Result<ShareBundle> {
    if x.modulus() != bundle.header.q {
        return Err(Error::ModulusMismatch {
            left: bundle.header.q,
            right: x.modulus(),
        });
    }
    let terms = bundle
        .terms
        .iter()
        .map(|t| {
            let share = eval1(
                &BasisKey {
                    party: bundle.party,
                    values: t.basis.clone(),
                },
                x,
            )?;
            Ok(TermShare {
                basis: share.roots,
                coeff: t.coeff.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShareBundle {
        header: bundle.header.clone(),
        party: bundle.party,
        point: x,
        terms,
    })
}
