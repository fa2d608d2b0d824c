//! Monotone span programs `(F, M, ρ)` with target vector `e₁`.
//!
//! A set `A` is accepted when `e₁` lies in the row span of `M_A`, the rows
//! labelled by members of `A`. Parties may own several rows.

use std::fmt;

use sha2::{Digest, Sha256};

use crate::access::{Formula, PartySet};
use crate::error::{Error, Result};
use crate::field::{unit_e1, FieldElement, Matrix, PrimeField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Msp {
    matrix: Matrix,
    labels: Vec<usize>,
    parties: usize,
}

/// A recombination vector `λ` with `M_Aᵀλ = e₁`, indexed by the rows of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recombination {
    pub rows: Vec<usize>,
    pub lambda: Vec<FieldElement>,
}

/// Row `i` of the `k × t` threshold gate matrix, split as `(first entry, rest)`.
///
/// Points `1..q-1` give `(1, i, …, i^{t-1})`; point `q` is the point at
/// infinity `(0, …, 0, 1)`. Single-child thresholds (`t = 1`) are all `(1)`.
fn gate_row(field: PrimeField, i: usize, t: usize) -> (u64, Vec<u64>) {
    if t == 1 {
        return (1, Vec::new());
    }
    if i as u64 == field.modulus() {
        let mut tail = vec![0; t - 1];
        tail[t - 2] = 1;
        return (0, tail);
    }
    let point = field.elem(i as u64);
    (1, (1..t as u64).map(|e| point.pow(e).value()).collect())
}

/// Largest fan-in among gates that need distinct evaluation points: proper
/// thresholds `2 <= t < k`, and AND gates small enough to use them.
fn point_fan_in(f: &Formula, field: PrimeField) -> usize {
    match f.gate() {
        None => 0,
        Some((t, ch)) => {
            let k = ch.len();
            let own = if t >= 2 && (t < k || k as u64 <= field.modulus()) { k } else { 0 };
            ch.iter().map(|c| point_fan_in(c, field)).max().unwrap_or(0).max(own)
        }
    }
}

impl Msp {
    /// Wraps a raw matrix; `labels[j]` is the party owning row `j`.
    pub fn from_matrix(matrix: Matrix, labels: Vec<usize>, parties: usize) -> Result<Self> {
        if labels.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                expected: matrix.rows(),
                found: labels.len(),
            });
        }
        if matrix.cols() == 0 {
            return Err(Error::InvalidAccess("span program needs at least one column".into()));
        }
        if parties == 0 || parties > PartySet::MAX_PARTIES {
            return Err(Error::InvalidAccess(format!("unsupported party count {parties}")));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l == 0 || l > parties) {
            return Err(Error::InvalidAccess(format!("row label {bad} outside 1..={parties}")));
        }
        if let Some(missing) = (1..=parties).find(|i| !labels.contains(i)) {
            return Err(Error::InvalidAccess(format!("party {missing} owns no row")));
        }
        Ok(Msp {
            matrix,
            labels,
            parties,
        })
    }

    /// Shamir's `(n, p)` threshold as a `p × n` Vandermonde matrix with rows
    /// `(1, i, i², …, i^{n-1})`. When `p = q` the last party takes the point
    /// at infinity, row `(0, …, 0, 1)`.
    pub fn vandermonde_threshold(n: usize, parties: usize, field: PrimeField) -> Result<Self> {
        if n < 1 || n > parties {
            return Err(Error::InvalidAccess(format!(
                "threshold {n} outside 1..={parties}"
            )));
        }
        if n >= 2 && parties as u64 > field.modulus() {
            return Err(Error::FanInOverflow {
                q: field.modulus(),
                fan_in: parties,
            });
        }
        let rows: Vec<Vec<u64>> = (1..=parties)
            .map(|i| {
                let (head, mut tail) = gate_row(field, i, n);
                tail.insert(0, head);
                tail
            })
            .collect();
        let matrix = Matrix::from_rows(field, n, &rows)?;
        Msp::from_matrix(matrix, (1..=parties).collect(), parties)
    }

    /// Gate-by-gate composition starting from `[1]` at the root.
    ///
    /// A row `r` held by `Threshold(t, k)` becomes `k` rows `r ‖ (i, i², …,
    /// i^{t-1})` for `i = 1..k`, with the `t-1` fresh columns placed on the
    /// right and zero in every other row. Expansion is depth-first, left to right.
    /// A gate with `k = q` gives its last child `0·r ‖ (0, …, 0, 1)`. An AND
    /// gate with `k > q` children uses the additive split instead: children
    /// `1..k-1` get `0·r ‖ e_i`, child `k` gets `r ‖ (-1, …, -1)`.
    pub fn from_formula(formula: &Formula, parties: usize, field: PrimeField) -> Result<Self> {
        let fan_in = point_fan_in(formula, field);
        if fan_in as u64 > field.modulus() {
            return Err(Error::FanInOverflow {
                q: field.modulus(),
                fan_in,
            });
        }

        struct Builder {
            field: PrimeField,
            cols: usize,
            rows: Vec<(Vec<u64>, usize)>,
        }

        impl Builder {
            fn expand(&mut self, node: &Formula, row: Vec<u64>) {
                match (node, node.gate()) {
                    (Formula::Party(i), _) => self.rows.push((row, *i)),
                    (_, Some((t, children))) if t >= 2 && t == children.len() && t as u64 > self.field.modulus() => {
                        let base = self.cols;
                        self.cols += t - 1;
                        let minus_one = self.field.modulus() - 1;
                        for (k, child) in children.iter().enumerate() {
                            let mut r = if k + 1 == t { row.clone() } else { vec![0; row.len()] };
                            r.resize(base, 0);
                            r.extend((0..t - 1).map(|j| match k + 1 == t {
                                true => minus_one,
                                false => (j == k) as u64,
                            }));
                            self.expand(child, r);
                        }
                    }
                    (_, Some((t, children))) => {
                        let base = self.cols;
                        self.cols += t - 1;
                        for (k, child) in children.iter().enumerate() {
                            let (head, tail) = gate_row(self.field, k + 1, t);
                            let mut r: Vec<u64> = row.iter().map(|&v| v * head).collect();
                            r.resize(base, 0);
                            r.extend(tail);
                            self.expand(child, r);
                        }
                    }
                    _ => unreachable!("non-leaf formulas are gates"),
                }
            }
        }

        let mut b = Builder {
            field,
            cols: 1,
            rows: Vec::new(),
        };
        b.expand(formula, vec![1]);
        let cols = b.cols;
        let (rows, labels): (Vec<Vec<u64>>, Vec<usize>) = b
            .rows
            .into_iter()
            .map(|(mut r, l)| {
                r.resize(cols, 0);
                (r, l)
            })
            .unzip();
        let matrix = Matrix::from_rows(field, cols, &rows)?;
        Msp::from_matrix(matrix, labels, parties)
    }

    pub fn field(&self) -> PrimeField {
        self.matrix.field()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Row indices owned by members of `a`, ascending.
    pub fn rows_of(&self, a: PartySet) -> Vec<usize> {
        (0..self.rows()).filter(|&j| a.contains(self.labels[j])).collect()
    }

    pub fn rows_of_party(&self, party: usize) -> Vec<usize> {
        (0..self.rows()).filter(|&j| self.labels[j] == party).collect()
    }

    /// `M_A`.
    pub fn sub_matrix(&self, a: PartySet) -> Matrix {
        self.matrix.select_rows(&self.rows_of(a))
    }

    fn e1(&self) -> Vec<FieldElement> {
        unit_e1(self.field(), self.cols())
    }

    pub fn accepts(&self, a: PartySet) -> bool {
        self.sub_matrix(a)
            .transpose()
            .in_image(&self.e1())
            .expect("dimensions agree by construction")
    }

    pub fn recombination(&self, a: PartySet) -> Result<Recombination> {
        let rows = self.rows_of(a);
        let m_a_t = self.matrix.select_rows(&rows).transpose();
        match m_a_t.solve(&self.e1())? {
            Some(lambda) => Ok(Recombination { rows, lambda }),
            None => Err(Error::NotQualified(a)),
        }
    }

    /// `ξ` with `M_B ξ = 0` and `ξ₁ = 1`.
    pub fn forbidden_witness(&self, b: PartySet) -> Result<Vec<FieldElement>> {
        self.sub_matrix(b)
            .kernel_witness_first_one()
            .ok_or(Error::Qualified(b))
    }

    /// SHA-256 over a canonical text encoding of `(q, M, ρ)`, hex encoded.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_string().as_bytes());
        hex::encode(h.finalize())
    }
}

impl fmt::Display for Msp {
    /// One header line `msp q=… rows=… cols=… parties=…` then one line per row:
    /// `P<label>: e1 e2 …`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "msp q={} rows={} cols={} parties={}",
            self.field().modulus(),
            self.rows(),
            self.cols(),
            self.parties
        )?;
        for j in 0..self.rows() {
            let entries: Vec<String> = self.matrix.row(j).iter().map(u64::to_string).collect();
            writeln!(f, "P{}: {}", self.labels[j], entries.join(" "))?;
        }
        Ok(())
    }
}
