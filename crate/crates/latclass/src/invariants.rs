//! Marked BV invariants of depth `d` and the genus invariants built from them.
//!
//! Vertices are the pairs `{±v}` of nonzero vectors of norm at most `d`. The
//! parity variant packs the adjacency `v.w mod 2` into bit rows and squares it
//! with population counts; each column of the square is reduced to a 64-bit
//! hash of its sorted entries, and the sorted list of per-vertex records is
//! hashed again. Hashes are seedless and tagged with [`HASH_VERSION`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{self, Lattice};
use crate::linalg::{self, Matrix};
use crate::residue;
use crate::shortvec;

/// Version of the hashing scheme, recorded in list files and manifests.
pub const HASH_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Adjacency `v.w mod 2` on pairs `{±v}`.
    #[default]
    Parity,
    /// Entries `|v.w|` on pairs `{±v}`.
    Absolute,
    /// Entries `v.w` on all vectors, both signs kept.
    Signed,
}

impl Variant {
    fn code(self) -> u64 {
        match self {
            Variant::Parity => 0,
            Variant::Absolute => 1,
            Variant::Signed => 2,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Parity => "parity",
            Variant::Absolute => "absolute",
            Variant::Signed => "signed",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parity" => Ok(Variant::Parity),
            "absolute" => Ok(Variant::Absolute),
            "signed" => Ok(Variant::Signed),
            _ => Err(Error::Parse { line: 0, msg: format!("unknown BV variant {s:?}") }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BVParams {
    pub depth: i64,
    /// Images of a basis of the marked sublattice, in coordinates of `L`.
    pub marking: Vec<Vec<i64>>,
    pub variant: Variant,
}

impl BVParams {
    pub fn depth(depth: i64) -> Self {
        BVParams { depth, marking: Vec::new(), variant: Variant::Parity }
    }

    pub fn with_marking(mut self, marking: Vec<Vec<i64>>) -> Self {
        self.marking = marking;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BVHash {
    pub value: u64,
    pub params: BVParams,
    pub vertex_count: usize,
}

impl BVHash {
    /// 16 lowercase hex digits.
    pub fn hex(&self) -> String {
        format!("{:016x}", self.value)
    }
}

fn fmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sequential 64-bit mixer over words (splitmix64 finalizer as round function).
#[derive(Clone, Debug)]
pub struct Mixer(u64);

impl Default for Mixer {
    fn default() -> Self {
        Mixer(fmix(0x4256_5f68_6173_6800 ^ HASH_VERSION as u64))
    }
}

impl Mixer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn absorb(&mut self, w: u64) {
        self.0 = fmix(self.0.rotate_left(23) ^ fmix(w.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }

    pub fn absorb_i64(&mut self, w: i64) {
        self.absorb(w as u64);
    }

    pub fn finish(&self) -> u64 {
        fmix(self.0 ^ 0x5bd1_e995)
    }
}

/// Hash of a multiset of integers: sorts in place, then mixes length and entries.
pub fn column_hash(entries: &mut [i64]) -> u64 {
    entries.sort_unstable();
    let mut m = Mixer::new();
    m.absorb(entries.len() as u64);
    for &e in entries.iter() {
        m.absorb_i64(e);
    }
    m.finish()
}

/// Per-vertex data: hash of the column multiset of `M^2` and the marking tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexRecord {
    pub column: u64,
    pub mark: Vec<i64>,
}

/// Hash of a record multiset under the given parameters (records are sorted here).
pub fn hash_records(records: &mut [VertexRecord], params: &BVParams) -> u64 {
    records.sort_unstable();
    let mut m = Mixer::new();
    m.absorb_i64(params.depth);
    m.absorb(params.variant.code());
    m.absorb(params.marking.len() as u64);
    m.absorb(records.len() as u64);
    for r in records.iter() {
        m.absorb(r.column);
        for &a in &r.mark {
            m.absorb_i64(a);
        }
    }
    m.finish()
}

/// The vertex vectors of the BV graph.
pub fn bv_vertices(l: &Lattice, params: &BVParams) -> Result<Vec<Vec<i64>>> {
    if params.depth < 2 {
        return Err(Error::Dimension(format!("BV depth must be at least 2, got {}", params.depth)));
    }
    for m in &params.marking {
        if m.len() != l.rank() {
            return Err(Error::Dimension("marking vector has the wrong length".into()));
        }
    }
    let rep = shortvec::short_vectors(l, params.depth)?;
    Ok(match params.variant {
        Variant::Signed => rep.all_vectors(),
        _ => rep.pairs.into_iter().map(|(v, _)| v).collect(),
    })
}

fn mark_of(params: &BVParams, gv: &[i64]) -> Vec<i64> {
    let mut a: Vec<i64> = params
        .marking
        .iter()
        .map(|m| m.iter().zip(gv).map(|(x, y)| x * y).sum())
        .collect();
    if params.variant != Variant::Signed {
        Lattice::sign_normalize(&mut a);
    }
    a
}

/// Sorted per-vertex records.
pub fn bv_records(l: &Lattice, params: &BVParams) -> Result<Vec<VertexRecord>> {
    let verts = bv_vertices(l, params)?;
    let gv: Vec<Vec<i64>> = verts.iter().map(|v| l.apply(v)).collect();
    let nv = verts.len();
    let ip = |i: usize, j: usize| -> i64 { verts[j].iter().zip(&gv[i]).map(|(x, y)| x * y).sum() };
    let columns: Vec<u64> = match params.variant {
        Variant::Parity => {
            let words = nv.div_ceil(64);
            let rows: Vec<Vec<u64>> = (0..nv)
                .into_par_iter()
                .map(|i| {
                    let mut r = vec![0u64; words];
                    for j in 0..nv {
                        if ip(i, j) & 1 != 0 {
                            r[j >> 6] |= 1 << (j & 63);
                        }
                    }
                    r
                })
                .collect();
            (0..nv)
                .into_par_iter()
                .map(|i| {
                    let ri = &rows[i];
                    let mut col: Vec<i64> = rows
                        .iter()
                        .map(|rj| ri.iter().zip(rj).map(|(a, b)| (a & b).count_ones() as i64).sum())
                        .collect();
                    column_hash(&mut col)
                })
                .collect()
        }
        Variant::Absolute | Variant::Signed => {
            let abs = params.variant == Variant::Absolute;
            let m: Vec<Vec<i64>> = (0..nv)
                .into_par_iter()
                .map(|i| {
                    (0..nv)
                        .map(|j| if abs { ip(i, j).abs() } else { ip(i, j) })
                        .collect()
                })
                .collect();
            (0..nv)
                .into_par_iter()
                .map(|i| {
                    // M is symmetric, so the i-th column of M^2 is M times the i-th row
                    let mi = &m[i];
                    let mut col: Vec<i64> = m
                        .iter()
                        .map(|mj| mi.iter().zip(mj).map(|(a, b)| a * b).sum())
                        .collect();
                    column_hash(&mut col)
                })
                .collect()
        }
    };
    let mut recs: Vec<VertexRecord> = (0..nv)
        .map(|i| VertexRecord { column: columns[i], mark: mark_of(params, &gv[i]) })
        .collect();
    recs.sort_unstable();
    Ok(recs)
}

pub fn bv(l: &Lattice, params: &BVParams) -> Result<BVHash> {
    let mut recs = bv_records(l, params)?;
    let value = hash_records(&mut recs, params);
    Ok(BVHash { value, params: params.clone(), vertex_count: recs.len() })
}

/// The plain depth-3 invariant.
pub fn bv3(l: &Lattice) -> Result<BVHash> {
    bv(l, &BVParams::depth(3))
}

/// Lattices whose bilinear residue is opposite to that of `G_{n,p}`, by `n mod 8`.
pub fn companion(n: usize, p: i64) -> Result<Option<Lattice>> {
    let name = match (p, n % 8) {
        (3, 1) | (3, 3) => "<2>+<3>",
        (3, 2) => "<3>",
        (3, 5) => "<6>",
        (3, 6) => "A2",
        (3, 7) => "<2>+A2",
        (5, 1) => "<10>",
        (5, 3) | (5, 5) => "<2>+<5>",
        (5, 4) => "<5>",
        (5, 7) => "<2>+S5",
        (5, 0) => "S5",
        (7, 1) | (7, 3) => "<2>+S7",
        (7, 2) => "S7",
        (7, 5) => "<14>",
        (7, 6) => "<7>",
        (7, 7) => "<2>+<7>",
        (3, _) | (5, _) | (7, _) => return Ok(None),
        _ => return Err(Error::InvalidRank { family: format!("G(n,{p})"), rank: n }),
    };
    Ok(Some(lattice::standard_lattice(name)?))
}

/// Coordinates of `v` (given in the old basis) with respect to `basis / denom`.
fn coords_in_basis(basis: &Matrix, denom: i64, v: &[i64]) -> Result<Vec<i64>> {
    let (adj, det) = linalg::adjugate(basis);
    let n = v.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        // x = denom * v * basis^{-1}
        let mut s = BigInt::zero();
        for i in 0..n {
            s += BigInt::from(v[i]) * &adj[i][j];
        }
        s *= BigInt::from(denom);
        if !(&s % &det).is_zero() {
            return Err(Error::Inconsistent("vector is not in the glued lattice".into()));
        }
        out.push((s / &det).to_i64().ok_or_else(|| Error::Inconsistent("coordinate overflow".into()))?);
    }
    Ok(out)
}

/// The overlattice of `A ⊥ L` obtained by gluing all of `res A` into `-res L`,
/// with the images of the basis of `A` as marking.
pub fn glue_marked(l: &Lattice, a: &Lattice) -> Result<(Lattice, Vec<Vec<i64>>)> {
    let eta = residue::find_anti_embedding(a, l)?
        .ok_or_else(|| Error::NotIsometric("no embedding of res A into -res L".into()))?;
    let ov = residue::glue_pair(a, l, &eta)?;
    let n = a.rank() + l.rank();
    let mut marking = Vec::with_capacity(a.rank());
    for i in 0..a.rank() {
        let mut e = vec![0i64; n];
        e[i] = 1;
        marking.push(coords_in_basis(&ov.basis, ov.denom, &e)?);
    }
    Ok((ov.lattice, marking))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenusInvariant {
    /// Depth 3 on the unimodular glue with the companion lattice.
    Bv1,
    /// Depth 3 on the glue with the companion of the neighbouring even rank.
    Bv2,
    /// Depth 3 on the glue with `A_1`.
    Bv3,
    /// Absolute variant, depth 24, on the rescaled dual.
    FlatAbsolute24,
}

impl fmt::Display for GenusInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GenusInvariant::Bv1 => "bv1",
            GenusInvariant::Bv2 => "bv2",
            GenusInvariant::Bv3 => "bv3",
            GenusInvariant::FlatAbsolute24 => "flat24",
        })
    }
}

impl FromStr for GenusInvariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bv1" | "1" => Ok(GenusInvariant::Bv1),
            "bv2" | "2" => Ok(GenusInvariant::Bv2),
            "bv3" | "3" => Ok(GenusInvariant::Bv3),
            "flat24" => Ok(GenusInvariant::FlatAbsolute24),
            _ => Err(Error::Parse { line: 0, msg: format!("unknown genus invariant {s:?}") }),
        }
    }
}

/// The invariant selection used for `G_{n,p}`.
pub fn default_genus_invariants(n: usize, p: i64) -> Vec<GenusInvariant> {
    use GenusInvariant::*;
    if n % 2 == 0 {
        return vec![Bv1];
    }
    match (n, p) {
        (23, 5) => vec![Bv2, FlatAbsolute24],
        (19, 5) | (21, 5) | (23, 3) => vec![Bv3],
        (19, 7) | (21, 7) | (23, 7) | (25, 3) | (27, 3) => vec![Bv2],
        (25, 5) | (25, 7) | (27, 5) => vec![Bv2, Bv3],
        _ => vec![Bv1],
    }
}

/// `BV^i_{n,p}(L)` for each selector, `L` an even lattice of rank `n` in `G_{n,p}`.
pub fn bv_np(l: &Lattice, p: i64, which: &[GenusInvariant]) -> Result<Vec<BVHash>> {
    let n = l.rank();
    let mut out = Vec::with_capacity(which.len());
    for &w in which {
        let h = match w {
            GenusInvariant::Bv1 => {
                let a = companion(n, p)?.ok_or_else(|| Error::InvalidRank {
                    family: format!("G(n,{p})"),
                    rank: n,
                })?;
                let (u, mark) = glue_marked(l, &a)?;
                bv(&u, &BVParams::depth(3).with_marking(mark))?
            }
            GenusInvariant::Bv2 | GenusInvariant::Bv3 => {
                if n % 2 == 0 {
                    return Err(Error::InvalidRank { family: format!("{w} needs odd n"), rank: n });
                }
                let a = if w == GenusInvariant::Bv3 {
                    lattice::a_n(1)
                } else {
                    let m = if (n + 1 + p as usize) % 4 == 1 { n + 1 } else { n - 1 };
                    companion(m, p)?.ok_or_else(|| Error::InvalidRank {
                        family: format!("G(n,{p})"),
                        rank: m,
                    })?
                };
                let (v, mark) = glue_marked(l, &a)?;
                bv(&v, &BVParams::depth(3).with_marking(mark))?
            }
            GenusInvariant::FlatAbsolute24 => {
                let flat = lattice::dual_and_rescaled_dual(l).1;
                bv(&flat, &BVParams::depth(24).with_variant(Variant::Absolute))?
            }
        };
        out.push(h);
    }
    Ok(out)
}
