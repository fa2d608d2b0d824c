//! Linear secret sharing driven by a monotone span program.
//!
//! A secret `s` is shared as `M·(s, r)ᵀ` with `r` uniform in `F^{d-1}`; any
//! accepted set recombines its rows with `λ`. Cyclotomic coefficients are
//! shared coordinate by coordinate over a second field `F_Q` via a signed lift.

use rand::Rng;

use crate::access::PartySet;
use crate::cyclotomic::CycScaled;
use crate::error::{Error, Result};
use crate::field::{dot, FieldElement, PrimeField};
use crate::msp::Msp;

/// One share per MSP row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScalarShareSet {
    values: Vec<FieldElement>,
}

impl ScalarShareSet {
    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    /// Shares of the rows owned by `a`, in ascending row order.
    pub fn restrict(&self, msp: &Msp, a: PartySet) -> Vec<FieldElement> {
        msp.rows_of(a).into_iter().map(|j| self.values[j]).collect()
    }

    pub fn for_party(&self, msp: &Msp, party: usize) -> Vec<FieldElement> {
        msp.rows_of_party(party).into_iter().map(|j| self.values[j]).collect()
    }
}

/// Smallest prime above `max(2q, p)`: large enough for a signed lift of
/// coordinates in `[-q, q]` and for gate points up to `p`.
pub fn default_coefficient_field(q: PrimeField, parties: usize) -> PrimeField {
    PrimeField::next_above((2 * q.modulus()).max(parties as u64))
}

pub fn sample_vector<R: Rng + ?Sized>(field: PrimeField, len: usize, rng: &mut R) -> Vec<FieldElement> {
    (0..len).map(|_| field.elem(rng.gen_range(0..field.modulus()))).collect()
}

/// Deterministic sharing with explicit randomness `r` of length `d - 1`.
pub fn share_with_randomness(s: FieldElement, msp: &Msp, r: &[FieldElement]) -> Result<ScalarShareSet> {
    let field = msp.field();
    if s.modulus() != field.modulus() {
        return Err(Error::ModulusMismatch {
            left: field.modulus(),
            right: s.modulus(),
        });
    }
    if r.len() + 1 != msp.cols() {
        return Err(Error::DimensionMismatch {
            expected: msp.cols() - 1,
            found: r.len(),
        });
    }
    let mut b = Vec::with_capacity(msp.cols());
    b.push(s);
    b.extend_from_slice(r);
    Ok(ScalarShareSet {
        values: msp.matrix().mul_vec(&b)?,
    })
}

pub fn share<R: Rng + ?Sized>(s: FieldElement, msp: &Msp, rng: &mut R) -> Result<ScalarShareSet> {
    let r = sample_vector(msp.field(), msp.cols() - 1, rng);
    share_with_randomness(s, msp, &r)
}

/// `⟨λ, y_A⟩`, where `shares` lists the values of `msp.rows_of(a)` in order.
pub fn reconstruct(msp: &Msp, a: PartySet, shares: &[FieldElement]) -> Result<FieldElement> {
    let rec = msp.recombination(a)?;
    if shares.len() != rec.rows.len() {
        return Err(Error::DimensionMismatch {
            expected: rec.rows.len(),
            found: shares.len(),
        });
    }
    dot(msp.field(), &rec.lambda, shares)
}

/// Per-coordinate sharings of a cyclotomic coefficient over `F_Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoeffShareSet {
    coords: Vec<ScalarShareSet>,
}

impl CoeffShareSet {
    pub fn coords(&self) -> &[ScalarShareSet] {
        &self.coords
    }

    /// For each coordinate, the restriction to the rows of `a`.
    pub fn restrict(&self, msp: &Msp, a: PartySet) -> Vec<Vec<FieldElement>> {
        self.coords.iter().map(|c| c.restrict(msp, a)).collect()
    }

    pub fn for_party(&self, msp: &Msp, party: usize) -> Vec<Vec<FieldElement>> {
        self.coords.iter().map(|c| c.for_party(msp, party)).collect()
    }
}

/// Signed lift of every coordinate into `F_Q`.
pub fn lift_coords(beta: &CycScaled, big: PrimeField) -> Result<Vec<FieldElement>> {
    beta.coords()
        .iter()
        .map(|&c| {
            big.lift_signed(c).ok_or(Error::CoefficientOverflow {
                coord: c,
                modulus: big.modulus(),
                bound: big.signed_bound(),
            })
        })
        .collect()
}

/// `randomness[j]` is the `d_Q - 1` random entries for coordinate `j`.
pub fn share_coefficient_with_randomness(
    beta: &CycScaled,
    msp_big: &Msp,
    randomness: &[Vec<FieldElement>],
) -> Result<CoeffShareSet> {
    let lifted = lift_coords(beta, msp_big.field())?;
    if randomness.len() != lifted.len() {
        return Err(Error::DimensionMismatch {
            expected: lifted.len(),
            found: randomness.len(),
        });
    }
    let coords = lifted
        .into_iter()
        .zip(randomness)
        .map(|(c, r)| share_with_randomness(c, msp_big, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoeffShareSet { coords })
}

pub fn share_coefficient<R: Rng + ?Sized>(beta: &CycScaled, msp_big: &Msp, rng: &mut R) -> Result<CoeffShareSet> {
    let lifted = lift_coords(beta, msp_big.field())?;
    let coords = lifted
        .into_iter()
        .map(|c| share(c, msp_big, rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoeffShareSet { coords })
}

/// Inverse of [`share_coefficient`]: one share list per coordinate, each in
/// `msp_big.rows_of(a)` order. The coordinate count fixes `q`.
pub fn reconstruct_coefficient(msp_big: &Msp, a: PartySet, coord_shares: &[Vec<FieldElement>]) -> Result<CycScaled> {
    let q = PrimeField::new(coord_shares.len() as u64)?;
    let rec = msp_big.recombination(a)?;
    let coords = coord_shares
        .iter()
        .map(|shares| {
            if shares.len() != rec.rows.len() {
                return Err(Error::DimensionMismatch {
                    expected: rec.rows.len(),
                    found: shares.len(),
                });
            }
            Ok(dot(msp_big.field(), &rec.lambda, shares)?.signed())
        })
        .collect::<Result<Vec<i64>>>()?;
    CycScaled::from_coords(q, coords)
}
