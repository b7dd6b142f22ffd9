//! Classification pipelines: the orthogonal-root recursion for unimodular
//! lattices, the orbit method between genera, Kneser neighbors, exceptional
//! vectors, triplication and mass audits.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::invariants::{self, BVHash};
use crate::isometry::{self, IsometryGroup, SearchOptions};
use crate::lattice::Lattice;
use crate::rootsys::{self, RootSystemDescriptor};
use crate::shortvec;

mod audit;
mod exc;
mod genus;
mod neighbor;
mod unimodular;

pub use audit::{
    bernoulli, count_admissible_mod2, extension_mass_identity, genus_audit, parse_mass_table,
    parse_rational, saturated_orthogonal_pairs, unimodular_mass, AuditReport, RANK29_MASS,
};
pub use exc::{exceptional_report, triplicate, ExcReport, Triplication};
pub use genus::{
    classify_genus, genus_invariant, orbit_method, root_systems, typed_vectors,
    unimodular_rank_needed, Arrow, GenusClassification, GenusKind,
    GenusSymbol, OrbitMethodOptions, OrbitStrategy, dominant_vectors, has_type, typed_orbits, OrbitMethodRun, TypeAttr, TypeTag,
};
pub use neighbor::{is_d_neighbor, kneser_neighbor, neighbor_search, NeighborFilter};
pub use unimodular::{
    build_u, classify_unimodular, extend_orthogonal_roots, ExtensionCandidate,
    UnimodularClassification, UnimodularOptions,
};

/// One isometry class with the data stored in list files.
#[derive(Clone, Debug)]
pub struct ClassRecord {
    pub lattice: Lattice,
    pub root_system: RootSystemDescriptor,
    pub aut_order: BigUint,
    /// Invariant name (e.g. `bv3`, `bv1`) to hash.
    pub bv: BTreeMap<String, BVHash>,
    pub provenance: String,
    /// Generators of `O(L)` when they were computed.
    pub group: Option<IsometryGroup>,
}

impl ClassRecord {
    /// Computes the root system, `O(L)` and the plain depth-3 invariant.
    pub fn unimodular(l: Lattice, provenance: impl Into<String>) -> Result<Self> {
        let cand = Candidate::new(l, provenance, "bv3", invariants::bv3)?;
        cand.into_record()
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// `1/|O(L)|`.
    pub fn mass(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.aut_order.clone()))
    }

    /// `|W(R)|/|O(L)|`.
    pub fn reduced_mass(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.root_system.weyl_order()),
            BigInt::from(self.aut_order.clone()),
        )
    }

    /// The dedup key: root system string and the first stored hash.
    pub fn key(&self) -> (String, u64) {
        (self.root_system.to_string(), self.bv.values().next().map_or(0, |h| h.value))
    }

    pub fn group(&mut self) -> Result<&IsometryGroup> {
        if self.group.is_none() {
            self.group = Some(isometry::automorphisms(&self.lattice)?);
        }
        Ok(self.group.as_ref().unwrap())
    }
}

/// A lattice with cheap invariants, before its automorphism group is known.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub lattice: Lattice,
    pub root_system: RootSystemDescriptor,
    pub bv: BTreeMap<String, BVHash>,
    pub provenance: String,
    /// `|O(L)|` when it is already known (or predicted and to be checked).
    pub predicted_aut: Option<BigUint>,
}

impl Candidate {
    pub fn new(
        l: Lattice,
        provenance: impl Into<String>,
        name: &str,
        inv: impl Fn(&Lattice) -> Result<BVHash>,
    ) -> Result<Self> {
        let (_, root_system) = rootsys::root_data(&l)?;
        let h = inv(&l)?;
        let mut bv = BTreeMap::new();
        bv.insert(name.to_string(), h);
        Ok(Candidate { lattice: l, root_system, bv, provenance: provenance.into(), predicted_aut: None })
    }

    pub fn key(&self) -> (String, u64) {
        (self.root_system.to_string(), self.bv.values().next().map_or(0, |h| h.value))
    }

    /// Computes `O(L)` and checks it against the prediction, if any.
    pub fn into_record(self) -> Result<ClassRecord> {
        let g = isometry::automorphisms(&self.lattice)?;
        if let Some(p) = &self.predicted_aut {
            if p != &g.order {
                return Err(Error::Inconsistent(format!(
                    "{}: |O(L)| = {} but the construction predicts {}",
                    self.provenance, g.order, p
                )));
            }
        }
        Ok(ClassRecord {
            lattice: self.lattice,
            root_system: self.root_system,
            aut_order: g.order.clone(),
            bv: self.bv,
            provenance: self.provenance,
            group: Some(g),
        })
    }
}

/// Result of merging candidates into isometry classes.
#[derive(Clone, Debug, Default)]
pub struct DedupOutcome {
    pub classes: Vec<ClassRecord>,
    /// Candidates whose isometry test ran out of budget against a class with the same key.
    pub unresolved: Vec<Candidate>,
    /// Candidates merged into an existing class by a confirmed isometry.
    pub merged: usize,
    /// Equal keys on lattices proven non-isometric.
    pub collisions: usize,
    /// Pairs with the same root system and different hashes checked non-isometric.
    pub spot_checks: usize,
}

/// Isometry search budget used while deduplicating.
pub const DEDUP_BUDGET: u64 = 50_000_000;

/// Merges candidates by `(root system, hash)` with isometry confirmation.
pub fn dedup(cands: Vec<Candidate>) -> Result<DedupOutcome> {
    dedup_by(cands, Candidate::key)
}

/// Same as [`dedup`] with a caller-supplied key; used to exercise the fallback.
pub fn dedup_by<K: Ord + Clone>(
    cands: Vec<Candidate>,
    key: impl Fn(&Candidate) -> K,
) -> Result<DedupOutcome> {
    let opts = SearchOptions { budget: DEDUP_BUDGET, ..SearchOptions::default() };
    let mut out = DedupOutcome::default();
    let mut kept: Vec<Candidate> = Vec::new();
    let mut buckets: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for c in cands {
        let k = key(&c);
        let bucket = buckets.entry(k).or_default();
        let mut found = None;
        let mut exhausted = false;
        for &i in bucket.iter() {
            match isometry::isometry_with(&kept[i].lattice, &c.lattice, opts) {
                Ok(Some(_)) => {
                    found = Some(i);
                    break;
                }
                Ok(None) => {}
                Err(Error::BudgetExceeded(_)) => exhausted = true,
                Err(e) => return Err(e),
            }
        }
        match found {
            Some(i) => {
                out.merged += 1;
                if kept[i].predicted_aut.is_none() {
                    kept[i].predicted_aut = c.predicted_aut;
                } else if c.predicted_aut.is_some() && c.predicted_aut != kept[i].predicted_aut {
                    return Err(Error::Inconsistent(format!(
                        "isometric candidates {} and {} predict different |O|",
                        kept[i].provenance, c.provenance
                    )));
                }
            }
            None if exhausted => out.unresolved.push(c),
            None => {
                if !bucket.is_empty() {
                    out.collisions += 1;
                }
                bucket.push(kept.len());
                kept.push(c);
            }
        }
    }
    out.spot_checks = spot_check(&kept, 64)?;
    out.classes = kept.into_iter().map(Candidate::into_record).collect::<Result<_>>()?;
    Ok(out)
}

/// Checks a sample of pairs sharing a root system but not a hash for non-isometry.
fn spot_check(kept: &[Candidate], limit: usize) -> Result<usize> {
    let opts = SearchOptions { budget: 2_000_000, ..SearchOptions::default() };
    let mut by_root: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, c) in kept.iter().enumerate() {
        by_root.entry(c.root_system.to_string()).or_default().push(i);
    }
    let mut done = 0;
    for idx in by_root.values() {
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                if done >= limit {
                    return Ok(done);
                }
                if kept[i].bv == kept[j].bv {
                    continue;
                }
                match isometry::isometry_with(&kept[i].lattice, &kept[j].lattice, opts) {
                    Ok(Some(_)) => {
                        return Err(Error::Inconsistent(format!(
                            "{} and {} are isometric but have different invariants",
                            kept[i].provenance, kept[j].provenance
                        )))
                    }
                    Ok(None) => done += 1,
                    Err(Error::BudgetExceeded(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(done)
}

/// Sorts records by `(root system, hash)`.
pub fn canonical_order(records: &mut [ClassRecord]) {
    records.sort_by(|a, b| {
        (&a.root_system, a.bv.values().map(|h| h.value).collect::<Vec<_>>())
            .cmp(&(&b.root_system, b.bv.values().map(|h| h.value).collect::<Vec<_>>()))
    });
}

/// Sum of `1/|O(L)|`.
pub fn total_mass(records: &[ClassRecord]) -> BigRational {
    records.iter().fold(BigRational::zero(), |acc, r| acc + r.mass())
}

/// `r_1(L)`, the number of norm 1 vectors.
pub fn r1(l: &Lattice) -> Result<usize> {
    Ok(shortvec::short_vectors(l, 1)?.r(1))
}
