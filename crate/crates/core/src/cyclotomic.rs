//! Exact q-th roots of unity and cyclotomic numbers, plus the Fourier
//! transform of functions `F_q -> C`.
//!
//! Inside the protocol every root of unity `ω^j` (with `ω = e^{2πi/q}`) is an
//! exponent `j mod q`. Floating point only appears in [`RootPower::to_complex`]
//! and [`CycScaled::to_complex`].

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// `ω_q^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootPower {
    exponent: u64,
    modulus: u64,
}

impl RootPower {
    pub fn new(field: PrimeField, exponent: u64) -> Self {
        RootPower {
            exponent: exponent % field.modulus(),
            modulus: field.modulus(),
        }
    }

    pub fn one(field: PrimeField) -> Self {
        RootPower::new(field, 0)
    }

    /// `ω^e` for a field element `e`, i.e. `χ_e(1)`.
    pub fn from_exponent(e: FieldElement) -> Self {
        RootPower {
            exponent: e.value(),
            modulus: e.modulus(),
        }
    }

    pub fn exponent(self) -> u64 {
        self.exponent
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn exponent_elem(self) -> FieldElement {
        self.field().elem(self.exponent)
    }

    fn field(self) -> PrimeField {
        PrimeField::new(self.modulus).expect("root modulus is an odd prime")
    }

    /// `ω^u · ω^v = ω^{u+v}`.
    pub fn checked_mul(self, other: RootPower) -> Result<RootPower> {
        let e = self.exponent_elem().checked_add(other.exponent_elem())?;
        Ok(RootPower::from_exponent(e))
    }

    /// `(ω^u)^λ = ω^{uλ}`.
    pub fn checked_pow(self, power: FieldElement) -> Result<RootPower> {
        let e = self.exponent_elem().checked_mul(power)?;
        Ok(RootPower::from_exponent(e))
    }

    pub fn to_complex(self) -> Complex64 {
        let theta = TAU * self.exponent as f64 / self.modulus as f64;
        Complex64::new(theta.cos(), theta.sin())
    }
}

impl fmt::Display for RootPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ω_{}^{}", self.modulus, self.exponent)
    }
}

/// The cyclotomic number `(1/q) · Σ_j coords[j] · ω^j`.
///
/// Coordinates are not unique since `Σ_j ω^j = 0`; [`CycScaled::normal_form`]
/// picks the representative whose smallest coordinate is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycScaled {
    coords: Vec<i64>,
}

impl CycScaled {
    pub fn zero(field: PrimeField) -> Self {
        CycScaled {
            coords: vec![0; field.modulus() as usize],
        }
    }

    /// Builds from raw coordinates; fails unless there are exactly `q` of them.
    pub fn from_coords(field: PrimeField, coords: Vec<i64>) -> Result<Self> {
        if coords.len() != field.modulus() as usize {
            return Err(Error::DimensionMismatch {
                expected: field.modulus() as usize,
                found: coords.len(),
            });
        }
        Ok(CycScaled { coords })
    }

    /// The integer `n`, i.e. coordinates `(q·n, 0, …, 0)`.
    pub fn integer(field: PrimeField, n: i64) -> Self {
        let mut c = CycScaled::zero(field);
        c.coords[0] = n * field.modulus() as i64;
        c
    }

    /// The root `ω^j` itself.
    pub fn root(root: RootPower) -> Self {
        let mut coords = vec![0; root.modulus() as usize];
        coords[root.exponent() as usize] = root.modulus() as i64;
        CycScaled { coords }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn denominator(&self) -> u64 {
        self.coords.len() as u64
    }

    fn check(&self, modulus: u64) -> Result<()> {
        if self.denominator() != modulus {
            return Err(Error::ModulusMismatch {
                left: self.denominator(),
                right: modulus,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &CycScaled) -> Result<CycScaled> {
        self.check(other.denominator())?;
        Ok(CycScaled {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    /// Multiplies by `ω^j`, which rotates the coordinates by `j`.
    pub fn rotate(&self, root: RootPower) -> Result<CycScaled> {
        self.check(root.modulus())?;
        let q = self.coords.len();
        let shift = root.exponent() as usize;
        let mut coords = vec![0; q];
        for (j, &c) in self.coords.iter().enumerate() {
            coords[(j + shift) % q] = c;
        }
        Ok(CycScaled { coords })
    }

    pub fn scale(&self, n: i64) -> CycScaled {
        CycScaled {
            coords: self.coords.iter().map(|c| c * n).collect(),
        }
    }

    pub fn max_abs_coord(&self) -> i64 {
        self.coords.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// Canonical coordinates: subtract the minimum so the smallest entry is 0.
    ///
    /// For prime `q` the only integer relation among `1, ω, …, ω^{q-1}` is the
    /// all-ones vector, so this form is unique.
    pub fn normal_form(&self) -> Vec<i64> {
        let min = self.coords.iter().copied().min().unwrap_or(0);
        self.coords.iter().map(|c| c - min).collect()
    }

    pub fn exact_eq(&self, other: &CycScaled) -> bool {
        self.denominator() == other.denominator() && self.normal_form() == other.normal_form()
    }

    pub fn is_zero(&self) -> bool {
        self.normal_form().iter().all(|&c| c == 0)
    }

    pub fn approx_eq(&self, other: &CycScaled, tol: f64) -> bool {
        (self.to_complex() - other.to_complex()).norm() <= tol
    }

    pub fn to_complex(&self) -> Complex64 {
        let q = self.coords.len() as f64;
        let sum: Complex64 = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| {
                let theta = TAU * j as f64 / q;
                Complex64::new(theta.cos(), theta.sin()) * c as f64
            })
            .sum();
        sum / q
    }
}

impl fmt::Display for CycScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // q is odd so the denominator is always at least 3.
        let nf = self.normal_form();
        let mut first = true;
        write!(f, "(1/{})*(", self.denominator())?;
        for (j, &c) in nf.iter().enumerate().filter(|(_, &c)| c != 0) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                _ => write!(f, "{c}*w^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// One term `β · χ_a` of a Fourier expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierTerm {
    pub freq: FieldElement,
    pub coeff: CycScaled,
}

impl FourierTerm {
    pub fn new(freq: FieldElement, coeff: CycScaled) -> Result<Self> {
        coeff.check(freq.modulus())?;
        Ok(FourierTerm { freq, coeff })
    }

    /// `χ_a` with coefficient 1.
    pub fn basis(freq: FieldElement) -> Self {
        FourierTerm {
            freq,
            coeff: CycScaled::integer(freq.field(), 1),
        }
    }

    /// The padding term `0 · χ_0`.
    pub fn padding(field: PrimeField) -> Self {
        FourierTerm {
            freq: field.zero(),
            coeff: CycScaled::zero(field),
        }
    }
}

/// A `±1`-valued function on `F_q`, listed by input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    field: PrimeField,
    values: Vec<i8>,
}

impl TruthTable {
    pub fn new(field: PrimeField, values: &[i64]) -> Result<Self> {
        if values.len() != field.modulus() as usize {
            return Err(Error::InvalidTruthTable(format!(
                "expected {} entries, found {}",
                field.modulus(),
                values.len()
            )));
        }
        let values = values
            .iter()
            .map(|&v| match v {
                1 => Ok(1),
                -1 => Ok(-1),
                other => Err(Error::InvalidTruthTable(format!("entry {other} is not ±1"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Ok(TruthTable { field, values })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn get(&self, x: FieldElement) -> i8 {
        self.values[x.value() as usize]
    }

    /// All `2^q` tables over `field`.
    pub fn enumerate(field: PrimeField) -> impl Iterator<Item = TruthTable> {
        let q = field.modulus() as usize;
        assert!(q < 32, "exhaustive enumeration only for small q");
        (0u32..(1 << q)).map(move |mask| TruthTable {
            field,
            values: (0..q)
                .map(|x| if mask >> x & 1 == 1 { -1 } else { 1 })
                .collect(),
        })
    }
}

/// `f̂(a) = (1/q) Σ_x f(x) ω^{-ax}` for every `a ∈ F_q`, exactly.
pub fn fourier_transform(table: &TruthTable) -> Vec<CycScaled> {
    let field = table.field;
    let q = field.modulus();
    (0..q)
        .map(|a| {
            let mut coords = vec![0i64; q as usize];
            for (x, &fx) in table.values.iter().enumerate() {
                let j = (-field.elem(a) * field.elem(x as u64)).value();
                coords[j as usize] += fx as i64;
            }
            CycScaled { coords }
        })
        .collect()
}

/// The nonzero terms of the Fourier expansion, in increasing frequency.
pub fn fourier_terms(table: &TruthTable) -> Vec<FourierTerm> {
    fourier_transform(table)
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(a, coeff)| FourierTerm {
            freq: table.field.elem(a as u64),
            coeff,
        })
        .collect()
}

/// `Σ_i β_i ω^{a_i x}` computed exactly; the trusted oracle for decoding.
pub fn evaluate_reference(field: PrimeField, terms: &[FourierTerm], x: FieldElement) -> Result<CycScaled> {
    if x.modulus() != field.modulus() {
        return Err(Error::ModulusMismatch {
            left: field.modulus(),
            right: x.modulus(),
        });
    }
    terms.iter().try_fold(CycScaled::zero(field), |acc, t| {
        let root = RootPower::from_exponent(t.freq.checked_mul(x)?);
        acc.checked_add(&t.coeff.rotate(root)?)
    })
}
