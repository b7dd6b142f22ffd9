//! The list-file format.
//!
//! ```text
//! #latclass-list 1
//! #rank 8
//! #genus U(8)
//! #hash-version 1
//! #invariants bv3
//! E8 1/696729600 1/1 0123456789abcdef X8.0 : 2 -1 2 ...
//! ```
//!
//! A record holds the root system, the mass `1/|O(L)|`, the reduced mass
//! `|W(R)|/|O(L)|`, one hash per invariant, a provenance token, then the Gram
//! matrix as its lower triangle read row by row.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::classify::{ClassRecord, GenusSymbol};
use crate::error::{Error, Result};
use crate::invariants::{BVHash, BVParams, GenusInvariant, HASH_VERSION};
use crate::lattice::Lattice;
use crate::rootsys::RootSystemDescriptor;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListHeader {
    pub version: u32,
    pub rank: usize,
    pub genus: GenusSymbol,
    pub hash_version: u32,
    pub invariants: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct ListFile {
    pub header: ListHeader,
    pub records: Vec<ClassRecord>,
}

impl ListFile {
    /// A file for records of one genus; invariant names are taken from the first record.
    pub fn new(genus: GenusSymbol, records: Vec<ClassRecord>) -> Self {
        let invariants = records
            .first()
            .map(|r| r.bv.keys().cloned().collect())
            .unwrap_or_else(|| vec!["bv3".to_string()]);
        ListFile {
            header: ListHeader {
                version: FORMAT_VERSION,
                rank: genus.rank,
                genus,
                hash_version: HASH_VERSION,
                invariants,
            },
            records,
        }
    }
}

/// Checks an invariant name such as `bv3` or `bv2+flat24`.
pub fn check_invariant_name(name: &str) -> Result<()> {
    for part in name.split('+') {
        part.parse::<GenusInvariant>()?;
    }
    Ok(())
}

fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn token(s: &str) -> String {
    if s.is_empty() {
        return "-".into();
    }
    s.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect()
}

pub fn serialize(file: &ListFile) -> String {
    let h = &file.header;
    let mut out = String::new();
    let _ = writeln!(out, "#latclass-list {}", h.version);
    let _ = writeln!(out, "#rank {}", h.rank);
    let _ = writeln!(out, "#genus {}", h.genus);
    let _ = writeln!(out, "#hash-version {}", h.hash_version);
    let _ = writeln!(out, "#invariants {}", h.invariants.join(" "));
    for r in &file.records {
        let _ = write!(
            out,
            "{} {} {}",
            r.root_system,
            rational_string(&r.mass()),
            rational_string(&r.reduced_mass())
        );
        for name in &h.invariants {
            let hex = r.bv.get(name).map(|b| b.hex()).unwrap_or_else(|| "-".repeat(16));
            let _ = write!(out, " {hex}");
        }
        let _ = write!(out, " {} :", token(&r.provenance));
        let n = r.lattice.rank();
        for i in 0..n {
            for j in 0..=i {
                let _ = write!(out, " {}", r.lattice.entry(i, j));
            }
        }
        out.push('\n');
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_rational(line: usize, s: &str) -> Result<BigRational> {
    crate::classify::parse_rational(s).ok_or_else(|| perr(line, format!("bad rational {s:?}")))
}

pub fn parse(text: &str) -> Result<ListFile> {
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut records_src = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
            if !records_src.is_empty() {
                return Err(perr(ln, "header line after records"));
            }
            fields.insert(k, (ln, v.trim()));
        } else {
            records_src.push((ln, line));
        }
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| perr(1, format!("missing header `#{k}`")));
    let (ln, v) = get("latclass-list")?;
    let version: u32 = v.parse().map_err(|_| perr(ln, "bad format version"))?;
    if version != FORMAT_VERSION {
        return Err(perr(ln, format!("unsupported format version {version}")));
    }
    let (ln, v) = get("rank")?;
    let rank: usize = v.parse().map_err(|_| perr(ln, "bad rank"))?;
    let (ln, v) = get("genus")?;
    let genus: GenusSymbol = v.parse().map_err(|_| perr(ln, format!("bad genus {v:?}")))?;
    if genus.rank != rank {
        return Err(perr(ln, "genus rank differs from #rank"));
    }
    let (ln, v) = get("hash-version")?;
    let hash_version: u32 = v.parse().map_err(|_| perr(ln, "bad hash version"))?;
    if hash_version != HASH_VERSION {
        return Err(perr(ln, format!("hash version {hash_version} is not {HASH_VERSION}")));
    }
    let (ln, v) = get("invariants")?;
    let invariants: Vec<String> = v.split_whitespace().map(String::from).collect();
    for name in &invariants {
        check_invariant_name(name).map_err(|_| perr(ln, format!("unknown invariant name {name:?}")))?;
    }
    let header = ListHeader { version, rank, genus, hash_version, invariants };
    let mut records = Vec::with_capacity(records_src.len());
    for (ln, line) in records_src {
        records.push(parse_record(ln, line, &header)?);
    }
    Ok(ListFile { header, records })
}

fn parse_record(ln: usize, line: &str, h: &ListHeader) -> Result<ClassRecord> {
    let (left, right) = line.split_once(" :").ok_or_else(|| perr(ln, "missing ` :` before the Gram matrix"))?;
    let toks: Vec<&str> = left.split_whitespace().collect();
    let k = h.invariants.len();
    if toks.len() != 4 + k {
        return Err(perr(ln, format!("expected {} fields before ` :`, found {}", 4 + k, toks.len())));
    }
    let root: RootSystemDescriptor =
        toks[0].parse().map_err(|_| perr(ln, format!("bad root system {:?}", toks[0])))?;
    let mass = parse_rational(ln, toks[1])?;
    if !mass.numer().is_one() || !mass.denom().is_positive() {
        return Err(perr(ln, "mass must be 1/|O(L)|"));
    }
    let aut: BigUint = mass.denom().to_biguint().ok_or_else(|| perr(ln, "bad mass"))?;
    let rmass = parse_rational(ln, toks[2])?;
    let expect = BigRational::new(BigInt::from(root.weyl_order()), BigInt::from(aut.clone()));
    if rmass != expect {
        return Err(perr(ln, format!("reduced mass {} differs from |W(R)|/|O(L)| = {}", toks[2], expect)));
    }
    let mut bv = BTreeMap::new();
    for (name, hx) in h.invariants.iter().zip(&toks[3..3 + k]) {
        if hx.len() != 16 {
            return Err(perr(ln, format!("hash {hx:?} is not 16 hex digits")));
        }
        let value = u64::from_str_radix(hx, 16).map_err(|_| perr(ln, format!("bad hash {hx:?}")))?;
        bv.insert(name.clone(), BVHash { value, params: BVParams::depth(3), vertex_count: 0 });
    }
    let provenance = toks[3 + k].to_string();
    let entries: Vec<i64> = right
        .split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| perr(ln, format!("bad Gram entry {t:?}"))))
        .collect::<Result<_>>()?;
    let n = h.rank;
    if entries.len() != n * (n + 1) / 2 {
        return Err(perr(ln, format!(
            "Gram has {} entries, a rank {n} lower triangle needs {}",
            entries.len(),
            n * (n + 1) / 2
        )));
    }
    let mut g = vec![vec![0i64; n]; n];
    let mut it = entries.into_iter();
    for i in 0..n {
        for j in 0..=i {
            let x = it.next().unwrap();
            g[i][j] = x;
            g[j][i] = x;
        }
    }
    let lattice = Lattice::new(g).map_err(|e| perr(ln, e.to_string()))?;
    if !h.genus.contains(&lattice) {
        return Err(perr(ln, format!("lattice is not in {}", h.genus)));
    }
    Ok(ClassRecord { lattice, root_system: root, aut_order: aut, bv, provenance, group: None })
}
