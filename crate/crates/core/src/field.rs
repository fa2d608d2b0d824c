//! Prime-field arithmetic and dense linear algebra over `F_q`.
//!
//! Moduli are odd primes that fit in a `u64`; products go through `u128`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// The prime field `F_q` for an odd prime `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    modulus: u64,
}

fn is_prime(n: u64) -> bool {
    primal_check::miller_rabin(n)
}

impl PrimeField {
    /// Rejects composites and `q = 2`.
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus == 2 || !is_prime(modulus) {
            return Err(Error::NotOddPrime(modulus));
        }
        Ok(PrimeField { modulus })
    }

    /// Smallest odd prime strictly greater than `n`.
    pub fn next_above(n: u64) -> Self {
        let mut c = n.max(2) + 1;
        while !(c != 2 && is_prime(c)) {
            c += 1;
        }
        PrimeField { modulus: c }
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn elem(self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.modulus,
            modulus: self.modulus,
        }
    }

    /// Maps a signed integer to its residue class.
    pub fn from_i64(self, value: i64) -> FieldElement {
        let q = self.modulus as i128;
        let v = (value as i128).rem_euclid(q);
        self.elem(v as u64)
    }

    pub fn zero(self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(self) -> FieldElement {
        self.elem(1)
    }

    pub fn elements(self) -> impl Iterator<Item = FieldElement> {
        (0..self.modulus).map(move |v| self.elem(v))
    }

    /// Largest `b` such that every integer in `[-b, b]` has a distinct residue.
    pub fn signed_bound(self) -> i64 {
        ((self.modulus - 1) / 2) as i64
    }

    /// Signed lift into `[-(q-1)/2, (q-1)/2]`. Returns `None` outside that range.
    pub fn lift_signed(self, value: i64) -> Option<FieldElement> {
        let bound = self.signed_bound();
        (-bound..=bound)
            .contains(&value)
            .then(|| self.from_i64(value))
    }

    fn check(self, other: u64) -> Result<()> {
        if self.modulus != other {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other,
            });
        }
        Ok(())
    }

    fn add_raw(self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    fn sub_raw(self, a: u64, b: u64) -> u64 {
        self.add_raw(a, self.modulus - b % self.modulus)
    }

    fn mul_raw(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    fn inv_raw(self, a: u64) -> Option<u64> {
        if a.is_multiple_of(self.modulus) {
            return None;
        }
        // extended Euclid
        let (mut r0, mut r1) = (self.modulus as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        Some(t0.rem_euclid(self.modulus as i128) as u64)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.modulus)
    }
}

/// An element of `F_q`, carrying its modulus.
///
/// The operator impls panic on mismatched moduli; the `checked_*` methods
/// return [`Error::ModulusMismatch`] instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn field(self) -> PrimeField {
        PrimeField {
            modulus: self.modulus,
        }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.field().check(rhs.modulus)?;
        Ok(self.field().elem(self.field().add_raw(self.value, rhs.value)))
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.field().check(rhs.modulus)?;
        Ok(self.field().elem(self.field().sub_raw(self.value, rhs.value)))
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        self.field().check(rhs.modulus)?;
        Ok(self.field().elem(self.field().mul_raw(self.value, rhs.value)))
    }

    pub fn inv(self) -> Result<Self> {
        self.field()
            .inv_raw(self.value)
            .map(|v| self.field().elem(v))
            .ok_or(Error::ZeroInverse)
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let field = self.field();
        let mut base = self.value;
        let mut acc = 1 % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = field.mul_raw(acc, base);
            }
            base = field.mul_raw(base, base);
            exp >>= 1;
        }
        field.elem(acc)
    }

    /// Representative in `[-(q-1)/2, (q-1)/2]`.
    pub fn signed(self) -> i64 {
        let half = (self.modulus - 1) / 2;
        if self.value > half {
            self.value as i64 - self.modulus as i64
        } else {
            self.value as i64
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for FieldElement {
            type Output = FieldElement;

            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field elements from different fields")
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);

impl Neg for FieldElement {
    type Output = FieldElement;

    fn neg(self) -> FieldElement {
        self.field().elem(self.field().sub_raw(0, self.value))
    }
}

/// Inner product of two equal-length vectors.
pub fn dot(field: PrimeField, a: &[FieldElement], b: &[FieldElement]) -> Result<FieldElement> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    a.iter()
        .zip(b)
        .try_fold(field.zero(), |acc, (&x, &y)| acc.checked_add(x.checked_mul(y)?))
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing every entry mod `q`.
    /// All rows must share the length `cols`.
    pub fn from_rows(field: PrimeField, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&v| v % field.modulus));
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.field.elem(self.data[i * self.cols + j])
    }

    pub fn set(&mut self, i: usize, j: usize, value: FieldElement) {
        assert_eq!(value.modulus(), self.field.modulus, "modulus mismatch");
        self.data[i * self.cols + j] = value.value();
    }

    /// Raw residues of row `i`.
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_elems(&self, i: usize) -> Vec<FieldElement> {
        self.row(i).iter().map(|&v| self.field.elem(v)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Sub-matrix made of the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            field: self.field,
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    fn check_vector(&self, v: &[FieldElement], expected: usize) -> Result<()> {
        if v.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: v.len(),
            });
        }
        if let Some(bad) = v.iter().find(|e| e.modulus() != self.field.modulus) {
            return Err(Error::ModulusMismatch {
                left: self.field.modulus,
                right: bad.modulus(),
            });
        }
        Ok(())
    }

    /// Computes `A·v`.
    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.check_vector(v, self.cols)?;
        Ok((0..self.rows)
            .map(|i| {
                let acc = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, x)| {
                        self.field.add_raw(acc, self.field.mul_raw(a, x.value()))
                    });
                self.field.elem(acc)
            })
            .collect())
    }

    /// Finds some `x` with `A·x = b`, or `None` if the system is inconsistent.
    ///
    /// Gauss-Jordan elimination; the pivot is the first nonzero entry at or
    /// below the current row, and free variables are set to zero.
    pub fn solve(&self, b: &[FieldElement]) -> Result<Option<Vec<FieldElement>>> {
        self.check_vector(b, self.rows)?;
        let f = self.field;
        let width = self.cols + 1;
        let mut aug: Vec<u64> = Vec::with_capacity(self.rows * width);
        for (i, bi) in b.iter().enumerate() {
            aug.extend_from_slice(self.row(i));
            aug.push(bi.value());
        }

        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| aug[i * width + c] != 0) else {
                continue;
            };
            if p != r {
                for k in 0..width {
                    aug.swap(p * width + k, r * width + k);
                }
            }
            let inv = f.inv_raw(aug[r * width + c]).expect("pivot is nonzero");
            for k in 0..width {
                aug[r * width + k] = f.mul_raw(aug[r * width + k], inv);
            }
            for i in 0..self.rows {
                let factor = aug[i * width + c];
                if i == r || factor == 0 {
                    continue;
                }
                for k in 0..width {
                    let sub = f.mul_raw(factor, aug[r * width + k]);
                    aug[i * width + k] = f.sub_raw(aug[i * width + k], sub);
                }
            }
            pivots.push((r, c));
            r += 1;
        }

        // rows without a pivot are all-zero on the left
        if (r..self.rows).any(|i| aug[i * width + self.cols] != 0) {
            return Ok(None);
        }
        let mut x = vec![f.zero(); self.cols];
        for (row, col) in pivots {
            x[col] = f.elem(aug[row * width + self.cols]);
        }
        Ok(Some(x))
    }

    /// Whether `v` lies in the column space of `A`.
    pub fn in_image(&self, v: &[FieldElement]) -> Result<bool> {
        Ok(self.solve(v)?.is_some())
    }

    /// Some `ξ` with `A·ξ = 0` and `ξ₁ = 1`, if one exists.
    ///
    /// Such a `ξ` exists exactly when `e₁` is not in the row space of `A`.
    pub fn kernel_witness_first_one(&self) -> Option<Vec<FieldElement>> {
        assert!(self.cols >= 1, "kernel witness needs at least one column");
        let f = self.field;
        // A' ξ' = -a₁ where A' drops the first column
        let rest: Vec<Vec<u64>> = (0..self.rows).map(|i| self.row(i)[1..].to_vec()).collect();
        let reduced = Matrix::from_rows(f, self.cols - 1, &rest).expect("uniform row length");
        let rhs: Vec<FieldElement> = (0..self.rows).map(|i| -self.get(i, 0)).collect();
        let tail = reduced.solve(&rhs).expect("dimensions agree")?;
        let mut xi = Vec::with_capacity(self.cols);
        xi.push(f.one());
        xi.extend(tail);
        Some(xi)
    }
}

/// The unit vector `e₁` of length `n`.
pub fn unit_e1(field: PrimeField, n: usize) -> Vec<FieldElement> {
    let mut e = vec![field.zero(); n];
    if n > 0 {
        e[0] = field.one();
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn v(field: PrimeField, xs: &[u64]) -> Vec<FieldElement> {
        xs.iter().map(|&x| field.elem(x)).collect()
    }

    #[test]
    fn rejects_composites_and_two() {
        for q in [0, 1, 2, 4, 9, 15, 21, 25] {
            assert!(matches!(PrimeField::new(q), Err(Error::NotOddPrime(_))), "{q}");
        }
        for q in [3, 5, 7, 11, 13, 65_537] {
            assert!(PrimeField::new(q).is_ok());
        }
        assert_eq!(PrimeField::next_above(6).modulus(), 7);
        assert_eq!(PrimeField::next_above(1).modulus(), 3);
        assert_eq!(PrimeField::next_above(10).modulus(), 11);
    }

    #[test]
    fn basic_arithmetic() {
        let f7 = f(7);
        assert_eq!((f7.elem(3) + f7.elem(5)).value(), 1);
        assert_eq!((f7.elem(4) * f7.elem(2)).value(), 1);
        assert_eq!((f7.elem(6) + f7.zero()).value(), 6);
        assert_eq!((-f7.elem(2)).value(), 5);
        assert_eq!(f7.elem(3).inv().unwrap().value(), 5);
        assert_eq!(f7.one().inv().unwrap().value(), 1);
        assert_eq!(f(5).elem(4).inv().unwrap().value(), 4);
        assert!(matches!(f7.zero().inv(), Err(Error::ZeroInverse)));
    }

    #[test]
    fn mismatched_moduli() {
        let a = f(5).elem(1);
        let b = f(7).elem(1);
        assert!(matches!(a.checked_add(b), Err(Error::ModulusMismatch { .. })));
        assert!(matches!(a.checked_mul(b), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for q in [3u64, 5, 7, 11, 13] {
            let field = f(q);
            for a in field.elements() {
                if !a.is_zero() {
                    assert_eq!(a * a.inv().unwrap(), field.one());
                }
                for b in field.elements() {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    for c in field.elements() {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
            }
        }
    }

    #[test]
    fn signed_lift_round_trips() {
        let f7 = f(7);
        for s in -3..=3 {
            assert_eq!(f7.lift_signed(s).unwrap().signed(), s);
        }
        assert!(f7.lift_signed(4).is_none());
        assert!(f7.lift_signed(-4).is_none());
    }

    #[test]
    fn solve_examples() {
        let f7 = f(7);
        let a = Matrix::from_rows(f7, 2, &[vec![1, 1], vec![1, 2]]).unwrap();
        let x = a.solve(&v(f7, &[1, 0])).unwrap().unwrap();
        assert_eq!(x, v(f7, &[2, 6]));
        assert_eq!(a.mul_vec(&x).unwrap(), v(f7, &[1, 0]));

        let id = Matrix::identity(f7, 3);
        assert_eq!(id.solve(&v(f7, &[4, 0, 6])).unwrap().unwrap(), v(f7, &[4, 0, 6]));

        let f5 = f(5);
        let dup = Matrix::from_rows(f5, 1, &[vec![1], vec![1]]).unwrap();
        assert!(dup.solve(&v(f5, &[1, 2])).unwrap().is_none());

        assert!(matches!(
            a.solve(&v(f7, &[1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn in_image_examples() {
        let f7 = f(7);
        let a = Matrix::from_rows(f7, 2, &[vec![1, 1], vec![1, 2]]).unwrap();
        assert!(a.in_image(&unit_e1(f7, 2)).unwrap());
        assert!(a.in_image(&v(f7, &[0, 0])).unwrap());

        let f5 = f(5);
        let col = Matrix::from_rows(f5, 1, &[vec![1], vec![1]]).unwrap();
        assert!(!col.in_image(&unit_e1(f5, 2)).unwrap());
    }

    #[test]
    fn kernel_witness_examples() {
        let f7 = f(7);
        let row = Matrix::from_rows(f7, 2, &[vec![1, 1]]).unwrap();
        assert_eq!(row.kernel_witness_first_one().unwrap(), v(f7, &[1, 6]));

        let full = Matrix::from_rows(f7, 2, &[vec![1, 1], vec![1, 2]]).unwrap();
        assert!(full.kernel_witness_first_one().is_none());

        let zero = Matrix::zeros(f7, 1, 1);
        assert_eq!(zero.kernel_witness_first_one().unwrap(), v(f7, &[1]));

        let empty = Matrix::zeros(f7, 0, 3);
        assert_eq!(empty.kernel_witness_first_one().unwrap(), unit_e1(f7, 3));
    }

    #[test]
    fn empty_systems() {
        let f5 = f(5);
        let no_rows = Matrix::zeros(f5, 0, 2);
        assert_eq!(no_rows.solve(&[]).unwrap().unwrap(), v(f5, &[0, 0]));
        let no_cols = Matrix::zeros(f5, 2, 0);
        assert!(no_cols.solve(&v(f5, &[0, 0])).unwrap().is_some());
        assert!(no_cols.solve(&v(f5, &[1, 0])).unwrap().is_none());
    }
}
