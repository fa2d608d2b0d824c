//! File-level operations behind the command-line tool: key generation from an
//! instance config, per-party evaluation, decoding and audits.

pub mod audit;
pub mod config;
pub mod files;

use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::RngCore;

use crate::access::PartySet;
use crate::cyclotomic::CycScaled;
use crate::error::{Error, Result};
use crate::fss::{eval_succinct, FourierFss};

pub use config::{Instance, InstanceConfig};
pub use files::{KeyFile, ShareFile};

/// Generates one key file per party. The 16-byte instance id is drawn from
/// `rng` after the keys, so a seeded run is fully reproducible.
pub fn keygen<R: RngCore>(config: &InstanceConfig, rng: &mut R) -> Result<Vec<KeyFile>> {
    let Instance { scheme, function } = config.validate()?;
    let bundles = scheme.gen(&function, rng)?;
    let mut id = [0u8; 16];
    rng.fill_bytes(&mut id);
    let instance = hex::encode(id);
    Ok(bundles.iter().map(|b| KeyFile::new(&instance, b)).collect())
}

pub fn key_path(dir: &Path, party: usize) -> PathBuf {
    dir.join(format!("party_{party}.key"))
}

pub fn share_path(dir: &Path, party: usize) -> PathBuf {
    dir.join(format!("party_{party}.share"))
}

pub fn write_keys(dir: &Path, keys: &[KeyFile]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    keys.iter()
        .map(|k| {
            let path = key_path(dir, k.party);
            k.save(&path)?;
            Ok(path)
        })
        .collect()
}

/// Evaluates one party's key at `x`.
pub fn eval(key: &KeyFile, x: u64) -> Result<ShareFile> {
    let bundle = key.to_bundle()?;
    let q = bundle.header.q;
    if x >= q {
        return Err(Error::Config(format!("input {x} outside F_{q}")));
    }
    let field = crate::field::PrimeField::new(q)?;
    let share = eval_succinct(&bundle, field.elem(x))?;
    Ok(ShareFile::new(&key.instance, &share))
}

#[derive(Clone, Debug)]
pub struct DecodeReport {
    pub parties: PartySet,
    pub point: u64,
    pub value: CycScaled,
    pub complex: Complex64,
    pub rounded: Option<i8>,
}

impl fmt::Display for DecodeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "parties: {}", self.parties)?;
        writeln!(f, "x: {}", self.point)?;
        writeln!(f, "exact: {}", self.value)?;
        writeln!(f, "complex: {:.12} {:+.12}i", self.complex.re, self.complex.im)?;
        match self.rounded {
            Some(v) => writeln!(f, "value: {v}"),
            None => writeln!(f, "value: not declared boolean, no rounding"),
        }
    }
}

/// Decodes share files. With `subset`, only the files of those parties are
/// used, and each of them must be present.
pub fn decode(shares: &[ShareFile], subset: Option<PartySet>) -> Result<DecodeReport> {
    let Some(first) = shares.first() else {
        return Err(Error::NotQualified(PartySet::empty()));
    };
    if shares.iter().any(|s| s.instance != first.instance) {
        return Err(Error::Integrity("share files come from different key generations".into()));
    }
    let mut bundles = Vec::new();
    for s in shares {
        if subset.is_none_or(|a| a.contains(s.party)) {
            bundles.push(s.to_bundle()?);
        }
    }
    if let Some(a) = subset {
        if let Some(missing) = a.iter().find(|&p| !bundles.iter().any(|b| b.party == p)) {
            return Err(Error::Config(format!("no share file for party {missing}")));
        }
    }
    let scheme = FourierFss::from_header(bundles.first().map_or(&first.header, |b| &b.header))?;
    let parties: PartySet = bundles
        .iter()
        .map(|b| b.party)
        .filter(|&p| (1..=PartySet::MAX_PARTIES).contains(&p))
        .collect();
    let decoded = scheme.decode(&bundles)?;
    Ok(DecodeReport {
        parties,
        point: bundles[0].point.value(),
        value: decoded.value,
        complex: decoded.complex,
        rounded: decoded.rounded,
    })
}
