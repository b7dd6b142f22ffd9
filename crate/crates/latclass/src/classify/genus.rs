//! The orbit method: classes of a target genus as orthogonal complements of
//! orbit representatives of typed vectors in a source genus.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::unimodular::UnimodularClassification;
use super::{Candidate, ClassRecord};
use crate::error::{Error, Result};
use crate::invariants::{self, BVHash, GenusInvariant};
use crate::isometry::{self, SearchOptions};
use crate::lattice::{DualVector, Lattice, Q64};
use crate::linalg::{self, Matrix};
use crate::rootsys;
use crate::residue;
use crate::shortvec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenusKind {
    /// All unimodular lattices of the rank.
    Unimodular,
    UnimodularOdd,
    UnimodularEven,
    /// Even lattices of determinant `p` (even rank) or `2p` (odd rank);
    /// `p = 1` gives the even unimodular genus and its determinant 2 neighbour.
    Gnp(i64),
    /// Even lattices of the given determinant, no further residue condition.
    EvenDet(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenusSymbol {
    pub rank: usize,
    pub kind: GenusKind,
}

impl GenusSymbol {
    pub fn gnp(rank: usize, p: i64) -> Self {
        GenusSymbol { rank, kind: GenusKind::Gnp(p) }
    }

    pub fn det(&self) -> i64 {
        match self.kind {
            GenusKind::Unimodular | GenusKind::UnimodularOdd | GenusKind::UnimodularEven => 1,
            GenusKind::Gnp(p) => if self.rank % 2 == 0 { p } else { 2 * p },
            GenusKind::EvenDet(d) => d,
        }
    }

    /// Required parity, if any.
    pub fn even(&self) -> Option<bool> {
        match self.kind {
            GenusKind::Unimodular => None,
            GenusKind::UnimodularOdd => Some(false),
            _ => Some(true),
        }
    }

    /// Whether the genus has any lattice (determinant and parity rules only).
    pub fn is_nonempty(&self) -> bool {
        let n = self.rank as i64;
        match self.kind {
            GenusKind::Unimodular => true,
            GenusKind::UnimodularOdd => n >= 1,
            GenusKind::UnimodularEven => n % 8 == 0,
            GenusKind::Gnp(1) => if n % 2 == 0 { n % 8 == 0 } else { n % 8 == 1 || n % 8 == 7 },
            GenusKind::Gnp(p) => n % 2 == 1 || (n + p) % 4 == 1,
            GenusKind::EvenDet(_) => true,
        }
    }

    pub fn contains(&self, l: &Lattice) -> bool {
        l.rank() == self.rank
            && l.det() == self.det()
            && self.even().map_or(true, |e| e == l.is_even())
    }
}

impl fmt::Display for GenusSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.rank;
        match self.kind {
            GenusKind::Unimodular => write!(f, "U({n})"),
            GenusKind::UnimodularOdd => write!(f, "I({n})"),
            GenusKind::UnimodularEven => write!(f, "II({n})"),
            GenusKind::Gnp(p) => write!(f, "G({n},{p})"),
            GenusKind::EvenDet(d) => write!(f, "E({n},{d})"),
        }
    }
}

impl FromStr for GenusSymbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse { line: 0, msg: format!("bad genus symbol {s:?}") };
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let head = &s[..open];
        let body = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        let rank: usize = parts[0].parse().map_err(|_| bad())?;
        let arg = || -> Result<i64> { parts.get(1).ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let kind = match (head, parts.len()) {
            ("U", 1) => GenusKind::Unimodular,
            ("I", 1) => GenusKind::UnimodularOdd,
            ("II", 1) => GenusKind::UnimodularEven,
            ("G", 2) => GenusKind::Gnp(arg()?),
            ("E", 2) => GenusKind::EvenDet(arg()?),
            _ => return Err(bad()),
        };
        Ok(GenusSymbol { rank, kind })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeAttr {
    Plain,
    Char,
    Exc,
    Sp,
}

/// A vector type `(nu, attribute)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeTag {
    pub nu: i64,
    pub attr: TypeAttr,
}

impl TypeTag {
    pub fn plain(nu: i64) -> Self {
        TypeTag { nu, attr: TypeAttr::Plain }
    }
    pub fn char(nu: i64) -> Self {
        TypeTag { nu, attr: TypeAttr::Char }
    }
    pub fn sp(nu: i64) -> Self {
        TypeTag { nu, attr: TypeAttr::Sp }
    }

    /// Order `o` and `q(w)` of the residue element attached to a complement,
    /// for a source of determinant `d1`; also the determinant of the complement.
    pub fn residue_data(&self, d1: i64) -> Result<(i64, Q64, i64)> {
        let nu = self.nu;
        match self.attr {
            TypeAttr::Plain => {
                if num_integer::gcd(nu, d1) != 1 {
                    return Err(Error::Inconsistent("plain type needs nu prime to det".into()));
                }
                Ok((nu, residue::frac(Q64::new(-1, 2 * nu)), d1 * nu))
            }
            TypeAttr::Char | TypeAttr::Exc => {
                if d1 != 1 {
                    return Err(Error::Inconsistent("characteristic type needs a unimodular source".into()));
                }
                Ok((nu, residue::frac(Q64::new(nu - 1, 2 * nu)), nu))
            }
            TypeAttr::Sp => {
                if nu % d1 != 0 {
                    return Err(Error::Inconsistent("special norm must be a multiple of det".into()));
                }
                let d2 = nu / d1;
                if num_integer::gcd(d1, d2) != 1 || nu % 2 != 0 {
                    return Err(Error::Inconsistent("special type needs gcd(d1,d2) = 1, d1 d2 even".into()));
                }
                Ok((d2, residue::frac(Q64::new(-d1, 2 * d2)), d2))
            }
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.attr {
            TypeAttr::Plain => "",
            TypeAttr::Char => "char",
            TypeAttr::Exc => "exc",
            TypeAttr::Sp => "sp",
        };
        write!(f, "{}{}", self.nu, a)
    }
}

impl FromStr for TypeTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let k = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
        let nu: i64 = s[..k]
            .parse()
            .map_err(|_| Error::Parse { line: 0, msg: format!("bad type {s:?}") })?;
        let attr = match &s[k..] {
            "" | "plain" => TypeAttr::Plain,
            "char" => TypeAttr::Char,
            "exc" => TypeAttr::Exc,
            "sp" => TypeAttr::Sp,
            other => return Err(Error::Parse { line: 0, msg: format!("bad type attribute {other:?}") }),
        };
        if nu <= 0 || (attr == TypeAttr::Exc && nu >= 8) {
            return Err(Error::Parse { line: 0, msg: format!("bad type {s:?}") });
        }
        Ok(TypeTag { nu, attr })
    }
}

/// All vectors of type `t` in `L`, both signs.
pub fn typed_vectors(l: &Lattice, t: TypeTag) -> Result<Vec<Vec<i64>>> {
    match t.attr {
        TypeAttr::Plain => residue::plain_vectors(l, t.nu),
        TypeAttr::Sp => residue::special_vectors(l, t.nu),
        TypeAttr::Char | TypeAttr::Exc => {
            if l.det() != 1 || l.is_even() {
                return Ok(Vec::new());
            }
            let (_, list) = residue::characteristic_vectors(l, t.nu, false)?;
            let mut out: Vec<Vec<i64>> = list
                .into_iter()
                .filter(|x| x.denom == 1 && x.norm(l) == Q64::from(t.nu))
                .map(|x| x.coords)
                .filter(|v| shortvec::is_primitive(v))
                .collect();
            out.sort();
            Ok(out)
        }
    }
}

/// How the orbits of `O(L)` on typed vectors are found.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OrbitStrategy {
    /// Enumerate every typed vector and close under generators of `O(L)`.
    Direct,
    /// Enumerate dominant typed vectors (one per `W(L)`-orbit) and close under
    /// `O(L; rho)`; needs a root system of full rank.
    Dominant,
    /// Dominant when the root system has full rank, direct otherwise.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug)]
pub struct OrbitMethodOptions {
    pub strategy: OrbitStrategy,
    /// Fail when a source lattice has more than one orbit of typed vectors.
    pub assert_unique_orbit: bool,
    /// Compute `O(N)` directly and compare with the orbit-size prediction.
    pub verify_groups: bool,
    /// Cap on the number of typed vectors per source lattice.
    pub vector_cap: usize,
}

impl Default for OrbitMethodOptions {
    fn default() -> Self {
        OrbitMethodOptions {
            strategy: OrbitStrategy::Auto,
            assert_unique_orbit: false, verify_groups: true, vector_cap: 2_000_000 }
    }
}

#[derive(Clone, Debug)]
pub struct OrbitMethodRun {
    pub target: GenusSymbol,
    pub tag: TypeTag,
    pub outputs: Vec<ClassRecord>,
    /// Number of orbits found in each source lattice.
    pub orbits_per_source: Vec<usize>,
    /// `sum #S_L / |O(L)|` over sources.
    pub input_weight: BigRational,
    /// `sum e / |O(N)|` over outputs.
    pub output_weight: BigRational,
}

impl OrbitMethodRun {
    pub fn conserved(&self) -> bool {
        self.input_weight == self.output_weight
    }
}

/// Invariants stored for a lattice of the given genus.
pub fn genus_invariant(target: &GenusSymbol) -> (String, Vec<GenusInvariant>) {
    match target.kind {
        GenusKind::Gnp(p) if matches!(p, 3 | 5 | 7) => {
            let which = invariants::default_genus_invariants(target.rank, p);
            (which.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("+"), which)
        }
        _ => ("bv3".into(), Vec::new()),
    }
}

fn genus_hash(l: &Lattice, target: &GenusSymbol) -> Result<BVHash> {
    let (_, which) = genus_invariant(target);
    if which.is_empty() {
        return invariants::bv3(l);
    }
    let p = match target.kind {
        GenusKind::Gnp(p) => p,
        _ => unreachable!(),
    };
    let hs = invariants::bv_np(l, p, &which)?;
    if hs.len() == 1 {
        return Ok(hs.into_iter().next().unwrap());
    }
    let mut m = invariants::Mixer::new();
    let mut count = 0;
    for h in &hs {
        m.absorb(h.value);
        count += h.vertex_count;
    }
    Ok(BVHash { value: m.finish(), params: hs[0].params.clone(), vertex_count: count })
}

/// True when `res N` has an element of order `o` with `q = q0`.
fn has_residue_element(n: &Lattice, o: i64, q0: Q64) -> Result<bool> {
    let r = residue::residue(n);
    if r.order() > 1 << 16 {
        return Err(Error::CapExceeded { what: "residue order".into(), cap: 1 << 16 });
    }
    Ok(r.elements().iter().any(|x| r.element_order(x) == o && r.q(x) == Some(q0)))
}

/// Runs the orbit method on a complete list of the source genus.
pub fn orbit_method(
    source: &mut [ClassRecord],
    t: TypeTag,
    target: &GenusSymbol,
    opts: OrbitMethodOptions,
) -> Result<OrbitMethodRun> {
    let d1 = source.first().map_or(1, |c| c.lattice.det());
    let (o, q0, d2) = t.residue_data(d1)?;
    if d2 != target.det() || target.even() != Some(true) {
        return Err(Error::Inconsistent(format!(
            "type {t} from determinant {d1} does not land in {target}"
        )));
    }
    let e = if o == 2 { 1u32 } else { 2 };
    let source_even = source.first().map_or(true, |c| c.lattice.is_even());
    let mut outputs = Vec::new();
    let mut orbits_per_source = Vec::new();
    let mut input_weight = BigRational::zero();
    let mut output_weight = BigRational::zero();
    for (si, c) in source.iter_mut().enumerate() {
        if c.lattice.det() != d1 || c.rank() != target.rank + 1 || c.lattice.is_even() != source_even {
            return Err(Error::Inconsistent(format!("source {si} is not in a single genus")));
        }
        let orbits = typed_orbits(c, t, opts)?;
        let total: usize = orbits.iter().map(|(_, s)| *s).sum();
        input_weight += BigRational::new(BigInt::from(total), BigInt::from(c.aut_order.clone()));
        if orbits.is_empty() {
            orbits_per_source.push(0);
            continue;
        }
        if opts.assert_unique_orbit && orbits.len() > 1 {
            return Err(Error::Inconsistent(format!(
                "{} orbits of type {t} vectors in source {si}",
                orbits.len()
            )));
        }
        orbits_per_source.push(orbits.len());
        let parent = c.clone();
        let recs: Vec<ClassRecord> = orbits
            .par_iter()
            .map(|(v, size)| -> Result<ClassRecord> {
                let (_, n) = parent.lattice.orthogonal_complement(std::slice::from_ref(v));
                if !target.contains(&n) {
                    return Err(Error::Inconsistent(format!("complement is not in {target}")));
                }
                if !has_residue_element(&n, o, q0)? {
                    return Err(Error::Inconsistent("complement lacks the expected residue element".into()));
                }
                let num = BigUint::from(e) * &parent.aut_order;
                let den = BigUint::from(*size);
                if !(&num % &den).is_zero() {
                    return Err(Error::Inconsistent("orbit size does not divide |O(L)|".into()));
                }
                let (name, _) = genus_invariant(target);
                let mut cand = Candidate::new(
                    n,
                    format!("{t}<-[{}]", parent.provenance),
                    &name,
                    |l| genus_hash(l, target),
                )?;
                cand.predicted_aut = Some(num / den);
                if opts.verify_groups {
                    cand.into_record()
                } else {
                    let aut = cand.predicted_aut.clone().unwrap();
                    Ok(ClassRecord {
                        lattice: cand.lattice,
                        root_system: cand.root_system,
                        aut_order: aut,
                        bv: cand.bv,
                        provenance: cand.provenance,
                        group: None,
                    })
                }
            })
            .collect::<Result<_>>()?;
        for r in &recs {
            output_weight += BigRational::new(BigInt::from(e), BigInt::from(r.aut_order.clone()));
        }
        outputs.extend(recs);
    }
    check_distinct(&outputs)?;
    super::canonical_order(&mut outputs);
    Ok(OrbitMethodRun { target: *target, tag: t, outputs, orbits_per_source, input_weight, output_weight })
}

/// Whether `v` (a vector of `L`) has type `t`.
pub fn has_type(l: &Lattice, v: &[i64], t: TypeTag) -> Result<bool> {
    if l.norm(v) != t.nu || !shortvec::is_primitive(v) {
        return Ok(false);
    }
    Ok(match t.attr {
        TypeAttr::Plain => true,
        TypeAttr::Sp => residue::modulus(l, v)? == l.det(),
        TypeAttr::Char | TypeAttr::Exc => {
            l.det() == 1 && !l.is_even() && residue::is_characteristic(l, &DualVector::integral(v.to_vec()))
        }
    })
}

/// Orbit representatives of `O(L)` on type-`t` vectors with their orbit sizes.
pub fn typed_orbits(
    c: &mut ClassRecord,
    t: TypeTag,
    opts: OrbitMethodOptions,
) -> Result<Vec<(Vec<i64>, usize)>> {
    let l = c.lattice.clone();
    let (rd, desc) = rootsys::root_data(&l)?;
    let full = desc.rank() == l.rank() && l.rank() > 0;
    let dominant = match opts.strategy {
        OrbitStrategy::Direct => false,
        OrbitStrategy::Dominant => {
            if !full {
                return Err(Error::Inconsistent("dominant strategy needs a full-rank root system".into()));
            }
            true
        }
        OrbitStrategy::Auto => full,
    };
    if !dominant {
        let s = typed_vectors(&l, t)?;
        if s.len() > opts.vector_cap {
            return Err(Error::CapExceeded { what: format!("type {t} vectors"), cap: opts.vector_cap as u64 });
        }
        if s.is_empty() {
            return Ok(Vec::new());
        }
        let gens = c.group()?.generators.clone();
        let orb = isometry::vector_orbits(&gens, &s)?;
        return Ok(orb.representatives.into_iter().zip(orb.sizes).collect());
    }
    let dom = dominant_vectors(&l, &rd.simple, t.nu, opts.vector_cap)?;
    let mut typed = Vec::new();
    for v in dom {
        if has_type(&l, &v, t)? {
            typed.push(v);
        }
    }
    if typed.is_empty() {
        return Ok(Vec::new());
    }
    let red = isometry::reduced_order(&l)?;
    let orb = isometry::vector_orbits(&red.rho_stabilizer.generators, &typed)?;
    let w = desc.weyl_order();
    let mut out = Vec::with_capacity(orb.representatives.len());
    for (v, k) in orb.representatives.into_iter().zip(orb.sizes) {
        let wv = parabolic_weyl_order(&l, &rd.simple, &v)?;
        let s = (&w / wv * BigUint::from(k))
            .to_usize()
            .ok_or_else(|| Error::CapExceeded { what: "orbit size".into(), cap: usize::MAX as u64 })?;
        out.push((v, s));
    }
    Ok(out)
}

/// `|W_v|`: the Weyl group of the simple roots orthogonal to a dominant `v`.
fn parabolic_weyl_order(l: &Lattice, simple: &[Vec<i64>], v: &[i64]) -> Result<BigUint> {
    let sub: Vec<Vec<i64>> = simple.iter().filter(|a| l.ip(a, v) == 0).cloned().collect();
    if sub.is_empty() {
        return Ok(BigUint::from(1u32));
    }
    let q = l.transform_unchecked(&sub);
    Ok(rootsys::root_data(&q)?.1.weyl_order())
}

/// Vectors `v` of norm `nu` with `v.a >= 0` for every simple root `a`, when the
/// simple roots span `L` over `Q`.
pub fn dominant_vectors(l: &Lattice, simple: &[Vec<i64>], nu: i64, cap: usize) -> Result<Vec<Vec<i64>>> {
    let n = l.rank();
    if simple.len() != n {
        return Err(Error::Inconsistent("root system is not of full rank".into()));
    }
    // c = A v with A = S G; v.v = c^T K^{-1} c with K the Cartan matrix
    let a: Matrix = simple.iter().map(|s| l.apply(s)).collect();
    let k = linalg::congruence(&simple.to_vec(), &l.gram());
    let (kadj, kdet) = linalg::adjugate(&k);
    let kadj = linalg::bigint_matrix_to_i64(&kadj).ok_or_else(|| Error::Inconsistent("overflow".into()))?;
    let kdet = kdet.to_i64().ok_or_else(|| Error::Inconsistent("overflow".into()))?;
    let (kadj, kdet) = if kdet < 0 {
        (kadj.iter().map(|r| r.iter().map(|x| -x).collect()).collect::<Matrix>(), -kdet)
    } else {
        (kadj, kdet)
    };
    if kadj.iter().flatten().any(|&x| x < 0) {
        return Err(Error::Inconsistent("inverse Cartan matrix has a negative entry".into()));
    }
    let (aadj, adet) = linalg::adjugate(&a);
    let target = nu as i128 * kdet as i128;
    let mut out = Vec::new();
    let mut c = vec![0i64; n];
    fn rec(
        i: usize,
        partial: i128,
        c: &mut Vec<i64>,
        kadj: &Matrix,
        target: i128,
        found: &mut Vec<Vec<i64>>,
        cap: usize,
    ) -> Result<()> {
        let n = c.len();
        if i == n {
            if partial == target {
                if found.len() >= cap {
                    return Err(Error::CapExceeded { what: "dominant vectors".into(), cap: cap as u64 });
                }
                found.push(c.clone());
            }
            return Ok(());
        }
        let mut x = 0i64;
        loop {
            // value with c_i = x added to the first i coordinates
            let mut add = (x as i128) * (x as i128) * kadj[i][i] as i128;
            for j in 0..i {
                add += 2 * (x as i128) * (c[j] as i128) * kadj[i][j] as i128;
            }
            if partial + add > target {
                break;
            }
            c[i] = x;
            rec(i + 1, partial + add, c, kadj, target, found, cap)?;
            x += 1;
            if kadj[i][i] == 0 {
                break;
            }
        }
        c[i] = 0;
        Ok(())
    }
    let mut cs = Vec::new();
    rec(0, 0, &mut c, &kadj, target, &mut cs, cap)?;
    for c in cs {
        let mut v = Vec::with_capacity(n);
        let mut ok = true;
        for i in 0..n {
            let mut s = BigInt::zero();
            for j in 0..n {
                s += &aadj[i][j] * BigInt::from(c[j]);
            }
            if !(&s % &adet).is_zero() {
                ok = false;
                break;
            }
            v.push((s / &adet).to_i64().ok_or_else(|| Error::Inconsistent("overflow".into()))?);
        }
        if ok {
            out.push(v);
        }
    }
    out.sort();
    Ok(out)
}

/// Outputs of the orbit method are pairwise non-isometric; equal keys are checked.
fn check_distinct(outputs: &[ClassRecord]) -> Result<()> {
    let opts = SearchOptions { budget: super::DEDUP_BUDGET, ..SearchOptions::default() };
    let mut seen: HashMap<(String, u64), Vec<usize>> = HashMap::new();
    for (i, r) in outputs.iter().enumerate() {
        let b = seen.entry(r.key()).or_default();
        for &j in b.iter() {
            if let Some(_) = isometry::isometry_with(&outputs[j].lattice, &r.lattice, opts)? {
                return Err(Error::Inconsistent(format!(
                    "orbit method produced isometric outputs {} and {}",
                    outputs[j].provenance, r.provenance
                )));
            }
        }
        b.push(i);
    }
    Ok(())
}

/// How a genus is reached from lists already known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub source: GenusSymbol,
    pub tag: TypeTag,
}

impl Arrow {
    /// The arrow used for a genus `G(n,p)`, `p in {1,3,5,7}` (none for unimodular genera).
    pub fn into(target: &GenusSymbol) -> Option<Arrow> {
        let n = target.rank;
        let p = match target.kind {
            GenusKind::Gnp(p) => p,
            _ => return None,
        };
        if !target.is_nonempty() || n == 0 {
            return None;
        }
        let uni = GenusSymbol { rank: n + 1, kind: GenusKind::Unimodular };
        let even_uni = GenusSymbol { rank: n + 1, kind: GenusKind::UnimodularEven };
        let up = |q: i64| GenusSymbol::gnp(n + 1, q);
        let (source, tag) = if p == 1 {
            if n % 2 == 0 {
                return None;
            }
            match n % 8 {
                7 => (even_uni, TypeTag::plain(2)),
                _ => (uni, TypeTag::char(2)),
            }
        } else if n % 2 == 0 {
            match (p, n % 8) {
                (3, 2) => (uni, TypeTag::char(3)),
                (3, 6) => (up(1), TypeTag::sp(6)),
                (5, 4) => (uni, TypeTag::char(5)),
                (5, 0) => (up(1), TypeTag::sp(10)),
                (7, 6) => (uni, TypeTag::char(7)),
                (7, 2) => (up(3), TypeTag::sp(42)),
                _ => return None,
            }
        } else if (n as i64 + p) % 4 == 0 {
            (up(p), TypeTag::plain(2))
        } else {
            match (p, n % 8) {
                (3, 7) | (7, 7) => (GenusSymbol { rank: n + 1, kind: GenusKind::UnimodularEven }, TypeTag::plain(2 * p)),
                (3, _) => (up(5), TypeTag::sp(30)),
                (5, 1) => (uni, TypeTag::char(10)),
                (5, 5) => (up(3), TypeTag::sp(30)),
                (7, _) => (up(5), TypeTag::sp(70)),
                _ => return None,
            }
        };
        Some(Arrow { source, tag })
    }
}

#[derive(Clone, Debug, Default)]
pub struct GenusClassification {
    pub lists: HashMap<GenusSymbol, Vec<ClassRecord>>,
    pub runs: Vec<OrbitMethodRun>,
}

impl GenusClassification {
    pub fn get(&self, g: &GenusSymbol) -> Option<&Vec<ClassRecord>> {
        self.lists.get(g)
    }
}

/// Highest unimodular rank needed to reach `target` along the arrows.
pub fn unimodular_rank_needed(target: &GenusSymbol) -> usize {
    match Arrow::into(target) {
        None => target.rank,
        Some(a) => unimodular_rank_needed(&a.source),
    }
}

/// Classifies `target` (and every genus on its arrow chain), reading unimodular
/// lists from `uni`, which must reach rank [`unimodular_rank_needed`].
pub fn classify_genus(
    target: &GenusSymbol,
    uni: &UnimodularClassification,
    cache: &mut GenusClassification,
    opts: OrbitMethodOptions,
) -> Result<Vec<ClassRecord>> {
    if let Some(l) = cache.lists.get(target) {
        return Ok(l.clone());
    }
    let list = match target.kind {
        GenusKind::Unimodular | GenusKind::UnimodularOdd | GenusKind::UnimodularEven => {
            let all = uni.all.get(target.rank).ok_or_else(|| Error::CapExceeded {
                what: "unimodular classification rank".into(),
                cap: uni.all.len().saturating_sub(1) as u64,
            })?;
            all.iter().filter(|c| target.contains(&c.lattice)).cloned().collect()
        }
        GenusKind::Gnp(1) if target.rank % 2 == 0 => {
            let g = GenusSymbol { rank: target.rank, kind: GenusKind::UnimodularEven };
            classify_genus(&g, uni, cache, opts)?
        }
        _ => {
            if !target.is_nonempty() {
                Vec::new()
            } else {
                let arrow = Arrow::into(target).ok_or_else(|| {
                    Error::Inconsistent(format!("no orbit-method arrow into {target}"))
                })?;
                let mut src = classify_genus(&arrow.source, uni, cache, opts)?;
                let run = orbit_method(&mut src, arrow.tag, target, opts)?;
                if !run.conserved() {
                    return Err(Error::Inconsistent(format!(
                        "mass not conserved on {} -> {target}: {} vs {}",
                        arrow.source, run.input_weight, run.output_weight
                    )));
                }
                let out = run.outputs.clone();
                cache.runs.push(run);
                out
            }
        }
    };
    cache.lists.insert(*target, list.clone());
    Ok(list)
}

/// Root-system strings of a list, for reports.
pub fn root_systems(list: &[ClassRecord]) -> Vec<String> {
    list.iter().map(|c| c.root_system.to_string()).collect()
}
