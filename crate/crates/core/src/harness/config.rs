//! Instance configuration files.
//!
//! ```json
//! {
//!   "q": 5,
//!   "coeff_q": 11,
//!   "parties": 3,
//!   "access": "THRESH(2; P1, P2, P3)",
//!   "function": { "terms": [ { "a": 2, "coords": [1], "denominator": 1 } ] },
//!   "budget": 2,
//!   "pad": true,
//!   "seed": 1
//! }
//! ```
//!
//! `function` is either `{"terms": [...]}` or `{"table": [1, -1, ...]}`. A
//! term's value is `(1/denominator) · Σ_j coords[j] · ω^j`; the denominator
//! must be `1` or `q`, and missing trailing coordinates are zero. `coeff_q`
//! and `seed` are optional, `pad` defaults to `true`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CycScaled, FourierTerm, TruthTable};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::fss::{FourierFss, SuccinctFunction};

fn default_pad() -> bool {
    true
}

fn default_denominator() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermSpec {
    pub a: u64,
    pub coords: Vec<i64>,
    #[serde(default = "default_denominator")]
    pub denominator: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionSpec {
    Terms(Vec<TermSpec>),
    Table(Vec<i64>),
}

/// Optional `"boolean": true` next to `"terms"` declares the sum `±1`-valued.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDecl {
    #[serde(flatten)]
    pub spec: FunctionSpec,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub boolean: bool,
}

impl FunctionDecl {
    pub fn terms(terms: Vec<TermSpec>) -> Self {
        FunctionDecl {
            spec: FunctionSpec::Terms(terms),
            boolean: false,
        }
    }

    pub fn table(values: Vec<i64>) -> Self {
        FunctionDecl {
            spec: FunctionSpec::Table(values),
            boolean: false,
        }
    }

    /// `Σ_i χ_{a_i}` with unit coefficients.
    pub fn basis_sum(freqs: &[u64]) -> Self {
        FunctionDecl::terms(
            freqs
                .iter()
                .map(|&a| TermSpec {
                    a,
                    coords: vec![1],
                    denominator: 1,
                })
                .collect(),
        )
    }

    pub fn build(&self, field: PrimeField) -> Result<SuccinctFunction> {
        match &self.spec {
            FunctionSpec::Table(values) => Ok(SuccinctFunction::from_truth_table(&TruthTable::new(field, values)?)),
            FunctionSpec::Terms(terms) => {
                let q = field.modulus();
                let terms = terms
                    .iter()
                    .map(|t| {
                        if t.a >= q {
                            return Err(Error::InvalidFunction(format!("frequency {} outside F_{q}", t.a)));
                        }
                        let scale = match t.denominator {
                            1 => q as i64,
                            d if d == q => 1,
                            d => {
                                return Err(Error::InvalidFunction(format!(
                                    "denominator {d} must be 1 or {q}"
                                )))
                            }
                        };
                        if t.coords.len() > q as usize {
                            return Err(Error::InvalidFunction(format!(
                                "{} coordinates given, at most {q} allowed",
                                t.coords.len()
                            )));
                        }
                        let mut coords: Vec<i64> = t
                            .coords
                            .iter()
                            .map(|&c| {
                                c.checked_mul(scale)
                                    .ok_or_else(|| Error::InvalidFunction(format!("coordinate {c} too large")))
                            })
                            .collect::<Result<_>>()?;
                        coords.resize(q as usize, 0);
                        FourierTerm::new(field.elem(t.a), CycScaled::from_coords(field, coords)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let f = SuccinctFunction::from_terms(field, terms)?;
                if self.boolean {
                    f.declare_boolean()
                } else {
                    Ok(f)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff_q: Option<u64>,
    pub parties: usize,
    pub access: String,
    pub function: FunctionDecl,
    pub budget: usize,
    #[serde(default = "default_pad")]
    pub pad: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Instance {
    pub scheme: FourierFss,
    pub function: SuccinctFunction,
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Malformed {
        path: path.display().to_string(),
        source,
    })
}

/// Builds the scheme for `(q, coeff_q, parties, access, budget, pad)`.
pub fn build_scheme(
    q: u64,
    coeff_q: Option<u64>,
    parties: usize,
    access: &str,
    budget: usize,
    pad: bool,
) -> Result<FourierFss> {
    let field = PrimeField::new(q)?;
    let coeff_field = coeff_q.map(PrimeField::new).transpose()?;
    FourierFss::from_formula(access, parties, field, coeff_field, budget, pad)
}

impl InstanceConfig {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    /// Checks every constraint: odd prime `q`, parseable access formula, gate
    /// fan-in against both fields, term budget and coefficient range.
    pub fn validate(&self) -> Result<Instance> {
        let scheme = build_scheme(self.q, self.coeff_q, self.parties, &self.access, self.budget, self.pad)?;
        let function = self.function.build(scheme.field())?;
        scheme.padded_terms(&function)?;
        Ok(Instance { scheme, function })
    }
}
