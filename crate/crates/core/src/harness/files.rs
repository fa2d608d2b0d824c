//! Versioned JSON key and share files.
//!
//! Every file carries the public header, a random instance id chosen at key
//! generation, and `header_digest = sha256(canonical JSON of {version,
//! instance, header})`. Field elements are decimal strings.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cyclotomic::RootPower;
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::fss::{KeyBundle, PublicHeader, ShareBundle, TermKey, TermShare};

use super::config::read_json;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermKeyRecord {
    pub basis: Vec<String>,
    pub coeff: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyFile {
    pub version: u32,
    pub instance: String,
    pub header_digest: String,
    pub header: PublicHeader,
    pub party: usize,
    pub terms: Vec<TermKeyRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermShareRecord {
    /// Exponents `j` of `ω^j`.
    pub basis: Vec<String>,
    pub coeff: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareFile {
    pub version: u32,
    pub instance: String,
    pub header_digest: String,
    pub header: PublicHeader,
    pub party: usize,
    pub point: String,
    pub terms: Vec<TermShareRecord>,
}

#[derive(Serialize)]
struct DigestInput<'a> {
    version: u32,
    instance: &'a str,
    header: &'a PublicHeader,
}

pub fn header_digest(instance: &str, header: &PublicHeader) -> String {
    let canonical = serde_json::to_string(&DigestInput {
        version: FORMAT_VERSION,
        instance,
        header,
    })
    .expect("header serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn encode(values: &[FieldElement]) -> Vec<String> {
    values.iter().map(|v| v.value().to_string()).collect()
}

fn decode(field: PrimeField, values: &[String]) -> Result<Vec<FieldElement>> {
    values
        .iter()
        .map(|s| match s.parse::<u64>() {
            Ok(v) if v < field.modulus() => Ok(field.elem(v)),
            _ => Err(Error::Integrity(format!("{s:?} is not an element of {field}"))),
        })
        .collect()
}

fn check_envelope(version: u32, instance: &str, digest: &str, header: &PublicHeader) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::Integrity(format!("unsupported format version {version}")));
    }
    if header_digest(instance, header) != digest {
        return Err(Error::Integrity("header digest mismatch".into()));
    }
    Ok(())
}

fn fields(header: &PublicHeader) -> Result<(PrimeField, PrimeField)> {
    let bad = |e: Error| Error::Integrity(format!("header: {e}"));
    Ok((
        PrimeField::new(header.q).map_err(bad)?,
        PrimeField::new(header.coeff_q).map_err(bad)?,
    ))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("file types serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

impl KeyFile {
    pub fn new(instance: &str, bundle: &KeyBundle) -> Self {
        KeyFile {
            version: FORMAT_VERSION,
            instance: instance.to_string(),
            header_digest: header_digest(instance, &bundle.header),
            header: bundle.header.clone(),
            party: bundle.party,
            terms: bundle
                .terms
                .iter()
                .map(|t| TermKeyRecord {
                    basis: encode(&t.basis),
                    coeff: t.coeff.iter().map(|c| encode(c)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_bundle(&self) -> Result<KeyBundle> {
        check_envelope(self.version, &self.instance, &self.header_digest, &self.header)?;
        let (field, coeff_field) = fields(&self.header)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(TermKey {
                    basis: decode(field, &t.basis)?,
                    coeff: t.coeff.iter().map(|c| decode(coeff_field, c)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(KeyBundle {
            header: self.header.clone(),
            party: self.party,
            terms,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

impl ShareFile {
    pub fn new(instance: &str, bundle: &ShareBundle) -> Self {
        ShareFile {
            version: FORMAT_VERSION,
            instance: instance.to_string(),
            header_digest: header_digest(instance, &bundle.header),
            header: bundle.header.clone(),
            party: bundle.party,
            point: bundle.point.value().to_string(),
            terms: bundle
                .terms
                .iter()
                .map(|t| TermShareRecord {
                    basis: t.basis.iter().map(|r| r.exponent().to_string()).collect(),
                    coeff: t.coeff.iter().map(|c| encode(c)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_bundle(&self) -> Result<ShareBundle> {
        check_envelope(self.version, &self.instance, &self.header_digest, &self.header)?;
        let (field, coeff_field) = fields(&self.header)?;
        let point = decode(field, std::slice::from_ref(&self.point))?[0];
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(TermShare {
                    basis: decode(field, &t.basis)?
                        .into_iter()
                        .map(RootPower::from_exponent)
                        .collect(),
                    coeff: t.coeff.iter().map(|c| decode(coeff_field, c)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ShareBundle {
            header: self.header.clone(),
            party: self.party,
            point,
            terms,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}
