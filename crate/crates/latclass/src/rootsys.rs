//! Root systems `R_2(L)`: detection, Weyl data, orthogonal pairs and relevance,
//! fertile classes and their extensions, and small embedding-orbit counts.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::lattice::{self, DualVector, Lattice, Q64};
use crate::residue;
use crate::shortvec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    D,
    E,
}

/// An irreducible ADE root system; the derived order is `A_1 < A_2 < ... < D_4 < ... < E_8`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Irreducible {
    pub family: Family,
    pub rank: usize,
}

impl Irreducible {
    /// Normal form: `D_3 = A_3`, `D_2 = 2A_1`, empty for `A_0`, `D_0`, `D_1`.
    pub fn normalized(family: Family, rank: usize) -> Result<Vec<Irreducible>> {
        let one = |f, r| Ok(vec![Irreducible { family: f, rank: r }]);
        match (family, rank) {
            (Family::A, 0) | (Family::D, 0) | (Family::D, 1) => Ok(Vec::new()),
            (Family::A, r) => one(Family::A, r),
            (Family::D, 2) => Ok(vec![Irreducible { family: Family::A, rank: 1 }; 2]),
            (Family::D, 3) => one(Family::A, 3),
            (Family::D, r) => one(Family::D, r),
            (Family::E, r) if (6..=8).contains(&r) => one(Family::E, r),
            (f, r) => Err(Error::InvalidRank { family: format!("{f:?}"), rank: r }),
        }
    }

    pub fn coxeter_number(&self) -> u64 {
        let n = self.rank as u64;
        match self.family {
            Family::A => n + 1,
            Family::D => 2 * n - 2,
            Family::E => match n {
                6 => 12,
                7 => 18,
                _ => 30,
            },
        }
    }

    /// `|R| = rank * h`.
    pub fn root_count(&self) -> u64 {
        self.rank as u64 * self.coxeter_number()
    }

    pub fn weyl_order(&self) -> BigUint {
        let fact = |k: usize| (1..=k).fold(BigUint::one(), |a, i| a * BigUint::from(i));
        match self.family {
            Family::A => fact(self.rank + 1),
            Family::D => fact(self.rank) * (BigUint::one() << (self.rank - 1)),
            Family::E => BigUint::from(match self.rank {
                6 => 51_840u64,
                7 => 2_903_040,
                _ => 696_729_600,
            }),
        }
    }

    /// Number of `W`-orbits of unordered pairs of orthogonal roots.
    pub fn np(&self) -> u64 {
        match (self.family, self.rank) {
            (Family::A, r) if r >= 3 => 1,
            (Family::A, _) => 0,
            (Family::D, _) => 2,
            (Family::E, _) => 1,
        }
    }

    /// Identification from rank and root count (these determine the type).
    pub fn from_rank_and_roots(rank: usize, roots: u64) -> Option<Irreducible> {
        let cands = [Family::A, Family::D, Family::E];
        cands.iter().find_map(|&f| {
            let x = Irreducible { family: f, rank };
            let ok = match f {
                Family::A => rank >= 1,
                Family::D => rank >= 4,
                Family::E => (6..=8).contains(&rank),
            };
            (ok && x.root_count() == roots).then_some(x)
        })
    }

    pub fn lattice(&self) -> Lattice {
        match self.family {
            Family::A => lattice::a_n(self.rank),
            Family::D => lattice::d_n(self.rank),
            Family::E => lattice::e_n(self.rank),
        }
    }
}

impl fmt::Display for Irreducible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

/// A root system as a multiset of irreducible components.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RootSystemDescriptor {
    /// `(component, multiplicity)`, sorted by the component order.
    pub components: Vec<(Irreducible, usize)>,
}

impl RootSystemDescriptor {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_list(list: &[Irreducible]) -> Self {
        let mut m: BTreeMap<Irreducible, usize> = BTreeMap::new();
        for &x in list {
            *m.entry(x).or_insert(0) += 1;
        }
        RootSystemDescriptor { components: m.into_iter().collect() }
    }

    pub fn irreducibles(&self) -> Vec<Irreducible> {
        self.components
            .iter()
            .flat_map(|&(x, m)| std::iter::repeat(x).take(m))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.components.iter().map(|(x, m)| x.rank * m).sum()
    }

    pub fn root_count(&self) -> u64 {
        self.components.iter().map(|(x, m)| x.root_count() * *m as u64).sum()
    }

    pub fn weyl_order(&self) -> BigUint {
        self.components
            .iter()
            .fold(BigUint::one(), |acc, (x, m)| acc * x.weyl_order().pow(*m as u32))
    }

    pub fn coxeter_numbers(&self) -> Vec<(Irreducible, u64)> {
        self.components.iter().map(|(x, _)| (*x, x.coxeter_number())).collect()
    }

    /// Number of components of multiplicity one.
    pub fn m1(&self) -> usize {
        self.components.iter().filter(|(_, m)| *m == 1).count()
    }

    /// Isotypic components `mX`, ordered lexicographically by `(m, X)`.
    pub fn isotypic(&self) -> Vec<(usize, Irreducible)> {
        let mut v: Vec<(usize, Irreducible)> =
            self.components.iter().map(|&(x, m)| (m, x)).collect();
        v.sort();
        v
    }

    /// Number of `W(R)`-orbits of unordered orthogonal root pairs.
    pub fn np(&self) -> u64 {
        let h: u64 = self.components.iter().map(|(_, m)| *m as u64).sum();
        h * h.saturating_sub(1) / 2
            + self.components.iter().map(|(x, m)| x.np() * *m as u64).sum::<u64>()
    }

    /// Number of `W(R)`-orbits of relevant orthogonal pairs.
    pub fn npr(&self) -> u64 {
        let iso = self.isotypic();
        if iso.is_empty() {
            return 0;
        }
        let (m, c1) = (iso[0].0 as u64, iso[0].1);
        match self.m1() {
            0 => m * (m - 1) / 2,
            1 => {
                let mut k = m * (m - 1) / 2 + m * c1.np();
                if m == 1 && c1.family == Family::A && c1.rank <= 2 && iso.len() > 1 {
                    k += iso[1].0 as u64;
                }
                k
            }
            _ => if iso.len() > 1 { m * iso[1].0 as u64 } else { 0 },
        }
    }

    /// Relevance of a pair of orthogonal roots lying in the given irreducible
    /// components (component indices distinguish equal types).
    pub fn is_relevant(&self, a: (Irreducible, usize), b: (Irreducible, usize)) -> bool {
        let iso = self.isotypic();
        if iso.is_empty() {
            return false;
        }
        let m1 = self.m1();
        let (ta, ia) = a;
        let (tb, ib) = b;
        if m1 >= 2 {
            let (x1, x2) = (iso[0].1, iso[1].1);
            (ta == x1 && tb == x2) || (ta == x2 && tb == x1)
        } else if m1 == 1 {
            let x1 = iso[0].1;
            if ta == x1 && tb == x1 {
                return true;
            }
            if iso[0].0 == 1 && x1.family == Family::A && x1.rank <= 2 && iso.len() > 1 {
                let x2 = iso[1].1;
                return (ta == x1 && tb == x2) || (ta == x2 && tb == x1);
            }
            false
        } else {
            let x1 = iso[0].1;
            ta == x1 && tb == x1 && ia != ib
        }
    }

    /// The root lattice `Q(R)`, basis of simple roots.
    pub fn root_lattice(&self) -> Lattice {
        self.irreducibles()
            .iter()
            .fold(Lattice::empty(), |acc, x| acc.direct_sum(&x.lattice()))
    }
}

impl Ord for RootSystemDescriptor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.components.cmp(&other.components)
    }
}

impl PartialOrd for RootSystemDescriptor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RootSystemDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(x, m)| if *m == 1 { x.to_string() } else { format!("{m}{x}") })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for RootSystemDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" || s.is_empty() {
            return Ok(Self::empty());
        }
        let mut list = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let digits: String = part.chars().take_while(|c| c.is_ascii_digit()).collect();
            let mult: usize = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| Error::UnknownLattice(part.into()))?
            };
            let rest = &part[digits.len()..];
            let mut chars = rest.chars();
            let family = match chars.next() {
                Some('A') => Family::A,
                Some('D') => Family::D,
                Some('E') => Family::E,
                _ => return Err(Error::UnknownLattice(part.into())),
            };
            let rank: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::UnknownLattice(part.into()))?;
            let irr = Irreducible::normalized(family, rank)?;
            for _ in 0..mult {
                list.extend(irr.iter().copied());
            }
        }
        Ok(Self::from_list(&list))
    }
}

#[derive(Clone, Debug)]
pub struct RootComponent {
    pub kind: Irreducible,
    /// Indices into `RootData::simple`.
    pub simple: Vec<usize>,
    /// Indices into `RootData::positive`.
    pub roots: Vec<usize>,
}

/// Roots of a lattice with a positive system, simple roots, Weyl vector and components.
#[derive(Clone, Debug)]
pub struct RootData {
    /// Positive roots: those whose first nonzero coordinate is positive.
    pub positive: Vec<Vec<i64>>,
    pub simple: Vec<Vec<i64>>,
    /// Half the sum of the positive roots.
    pub weyl_vector: DualVector,
    pub components: Vec<RootComponent>,
    /// Component index of every positive root.
    pub component_of: Vec<usize>,
    index: HashMap<Vec<i64>, usize>,
}

impl RootData {
    /// Component index of a root (either sign).
    pub fn component_of_root(&self, v: &[i64]) -> Option<usize> {
        let mut w = v.to_vec();
        Lattice::sign_normalize(&mut w);
        self.index.get(&w).map(|&i| self.component_of[i])
    }

    /// Relevance of a pair of orthogonal roots of this lattice.
    pub fn is_relevant_pair(&self, desc: &RootSystemDescriptor, a: &[i64], b: &[i64]) -> bool {
        match (self.component_of_root(a), self.component_of_root(b)) {
            (Some(ca), Some(cb)) => desc.is_relevant(
                (self.components[ca].kind, ca),
                (self.components[cb].kind, cb),
            ),
            _ => false,
        }
    }

    pub fn all_roots(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(2 * self.positive.len());
        for v in &self.positive {
            out.push(v.clone());
            out.push(v.iter().map(|x| -x).collect());
        }
        out
    }
}

/// Root data and descriptor of `R_2(L)`.
pub fn root_data(l: &Lattice) -> Result<(RootData, RootSystemDescriptor)> {
    let rep = shortvec::short_vectors(l, 2)?;
    let mut positive: Vec<Vec<i64>> = rep.vectors_of_norm(2).cloned().collect();
    positive.sort_by(|a, b| b.cmp(a));
    root_data_from_positive(l, positive)
}

fn root_data_from_positive(
    l: &Lattice,
    positive: Vec<Vec<i64>>,
) -> Result<(RootData, RootSystemDescriptor)> {
    let n = l.rank();
    let index: HashMap<Vec<i64>, usize> =
        positive.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    // simple roots: positive roots that are not a sum of two positive roots
    let gpos: Vec<Vec<i64>> = positive.iter().map(|v| l.apply(v)).collect();
    let mut simple_idx = Vec::new();
    for (i, a) in positive.iter().enumerate() {
        let decomposable = positive.iter().enumerate().any(|(j, b)| {
            if i == j {
                return false;
            }
            // a - b is a root iff a.b = 1
            let ip: i64 = b.iter().zip(&gpos[i]).map(|(x, y)| x * y).sum();
            if ip != 1 {
                return false;
            }
            let d: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            index.contains_key(&d)
        });
        if !decomposable {
            simple_idx.push(i);
        }
    }
    let simple: Vec<Vec<i64>> = simple_idx.iter().map(|&i| positive[i].clone()).collect();
    // components: connectivity through nonzero inner products among positive roots
    let m = positive.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for i in 0..m {
        for j in i + 1..m {
            let ip: i64 = positive[j].iter().zip(&gpos[i]).map(|(x, y)| x * y).sum();
            if ip != 0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut comp_ids: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        let r = find(&mut parent, i);
        comp_ids.entry(r).or_default().push(i);
    }
    let mut components = Vec::new();
    let mut component_of = vec![0usize; m];
    for roots in comp_ids.values() {
        let simple_in: Vec<usize> = simple_idx
            .iter()
            .enumerate()
            .filter(|(_, &si)| roots.contains(&si))
            .map(|(k, _)| k)
            .collect();
        let kind = Irreducible::from_rank_and_roots(simple_in.len(), 2 * roots.len() as u64)
            .ok_or_else(|| {
                Error::Inconsistent(format!(
                    "root component of rank {} with {} roots",
                    simple_in.len(),
                    2 * roots.len()
                ))
            })?;
        for &r in roots {
            component_of[r] = components.len();
        }
        components.push(RootComponent { kind, simple: simple_in, roots: roots.clone() });
    }
    let mut sum = vec![0i64; n];
    for v in &positive {
        for k in 0..n {
            sum[k] += v[k];
        }
    }
    let weyl_vector = DualVector::new(sum, 2);
    let desc = RootSystemDescriptor::from_list(
        &components.iter().map(|c| c.kind).collect::<Vec<_>>(),
    );
    Ok((
        RootData { positive, simple, weyl_vector, components, component_of, index },
        desc,
    ))
}

/// `(|W(R)|, |R|, Coxeter numbers)`.
pub fn group_constants(r: &RootSystemDescriptor) -> (BigUint, u64, Vec<(Irreducible, u64)>) {
    (r.weyl_order(), r.root_count(), r.coxeter_numbers())
}

#[derive(Clone, Debug)]
pub struct FertileClass {
    /// A dominant minimal lift of the class, in the simple-root basis of `Q(R)`.
    pub class_rep: DualVector,
    pub nu: Q64,
    pub extension: RootSystemDescriptor,
    /// Simple roots `alpha_i` with `class_rep . alpha_i = 1`.
    pub attach_node: Vec<usize>,
}

/// All fertile classes of `qres Q(R)` (including the zero class) with their extensions.
pub fn fertile_classes(r: &RootSystemDescriptor) -> Result<Vec<FertileClass>> {
    let q = r.root_lattice();
    let n = q.rank();
    let res = residue::residue(&q);
    let mut out = Vec::new();
    for x in res.elements() {
        let lift = res.lift(&x);
        let (nu, lifts) = residue::venkov_min(&q, &lift)?;
        if nu >= Q64::from(2) {
            continue;
        }
        // basis vectors are the simple roots; dominant means nonnegative products with them
        let dominant = lifts
            .into_iter()
            .find(|w| {
                let gw = q.apply(&w.coords);
                gw.iter().all(|&c| c >= 0)
            })
            .ok_or_else(|| Error::Inconsistent("no dominant minimal lift".into()))?;
        let gw = q.apply(&dominant.coords);
        let attach: Vec<usize> = (0..n).filter(|&i| gw[i] == dominant.denom).collect();
        let ext = extension_lattice(&q, &dominant)?;
        let (_, desc) = root_data(&ext)?;
        out.push(FertileClass { class_rep: dominant, nu, extension: desc, attach_node: attach });
    }
    Ok(out)
}

/// `Q(R) + Z(e_0 - w)` with `e_0 . e_0 = 2 - w.w`: Gram on the simple roots and `e_0 - w`.
pub fn extension_lattice(q: &Lattice, w: &DualVector) -> Result<Lattice> {
    let n = q.rank();
    let gw = q.apply(&w.coords);
    let mut rows = q.gram();
    for (i, r) in rows.iter_mut().enumerate() {
        if gw[i] % w.denom != 0 {
            return Err(Error::Inconsistent("weight is not in the dual lattice".into()));
        }
        r.push(-gw[i] / w.denom);
    }
    let mut last: Vec<i64> = (0..n).map(|i| -gw[i] / w.denom).collect();
    last.push(2);
    rows.push(last);
    Lattice::new(rows)
}

/// The extension predicted by the diagram rule: one node joined to the `attach` simple roots.
pub fn extension_by_diagram(r: &RootSystemDescriptor, attach: &[usize]) -> Result<RootSystemDescriptor> {
    let q = r.root_lattice();
    let n = q.rank();
    let mut rows = q.gram();
    for (i, row) in rows.iter_mut().enumerate() {
        row.push(if attach.contains(&i) { -1 } else { 0 });
    }
    let mut last: Vec<i64> = (0..n).map(|i| if attach.contains(&i) { -1 } else { 0 }).collect();
    last.push(2);
    rows.push(last);
    let l = Lattice::new(rows)?;
    Ok(root_data(&l)?.1)
}

/// One orbit of embeddings with its saturation flag.
#[derive(Clone, Debug)]
pub struct EmbeddingOrbit {
    /// Images of the simple roots of `S`, in the simple-root basis of `Q(R)`.
    pub images: Vec<Vec<i64>>,
    pub saturated: bool,
}

/// `W(R)^±`-orbits of isometric embeddings `Q(S) -> Q(R)`, by descending the chain
/// of pointwise stabilizers (each is the Weyl group of the orthogonal roots).
pub fn root_embedding_orbits(
    s: &RootSystemDescriptor,
    r: &RootSystemDescriptor,
    cap: usize,
) -> Result<Vec<EmbeddingOrbit>> {
    let qs = s.root_lattice();
    let qr = r.root_lattice();
    if qs.rank() + qr.rank() > 16 {
        return Err(Error::CapExceeded { what: "embedding search rank".into(), cap: 16 });
    }
    let (rd, _) = root_data(&qr)?;
    let roots = rd.all_roots();
    let gs = qs.gram();
    let mut reps: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut work = 0usize;
    descend(&qr, &roots, &gs, &mut Vec::new(), &mut reps, &mut work, cap)?;
    // merge orbits related by -1
    let mut seen: HashSet<usize> = HashSet::new();
    let mut out = Vec::new();
    let canon: Vec<Vec<Vec<i64>>> = reps.clone();
    for (i, t) in reps.iter().enumerate() {
        if seen.contains(&i) {
            continue;
        }
        seen.insert(i);
        let neg: Vec<Vec<i64>> = t.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
        let c = canonical_tuple(&qr, &roots, &neg)?;
        if let Some(j) = canon.iter().position(|u| *u == c) {
            seen.insert(j);
        }
        let saturated = crate::isometry::is_primitive_system(t, qr.rank());
        out.push(EmbeddingOrbit { images: t.clone(), saturated });
    }
    Ok(out)
}

fn orthogonal_roots(l: &Lattice, roots: &[Vec<i64>], fixed: &[Vec<i64>]) -> Vec<Vec<i64>> {
    roots
        .iter()
        .filter(|r| fixed.iter().all(|f| l.ip(r, f) == 0))
        .cloned()
        .collect()
}

fn reflect(l: &Lattice, r: &[i64], v: &[i64]) -> Vec<i64> {
    let c = l.ip(r, v);
    v.iter().zip(r).map(|(x, y)| x - c * y).collect()
}

/// Orbits of the reflection group of `gens` on the set `cands`, with transport words.
fn reflection_orbits(
    l: &Lattice,
    gens: &[Vec<i64>],
    cands: &[Vec<i64>],
) -> Vec<Vec<(Vec<i64>, Vec<usize>)>> {
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut orbits = Vec::new();
    for c in cands {
        if seen.contains(c) {
            continue;
        }
        seen.insert(c.clone());
        // word: reflections mapping the orbit representative to the element
        let mut orb = vec![(c.clone(), Vec::new())];
        let mut k = 0;
        while k < orb.len() {
            let (x, w) = orb[k].clone();
            for (gi, g) in gens.iter().enumerate() {
                let y = reflect(l, g, &x);
                if seen.insert(y.clone()) {
                    let mut w2 = w.clone();
                    w2.push(gi);
                    orb.push((y, w2));
                }
            }
            k += 1;
        }
        orbits.push(orb);
    }
    orbits
}

fn descend(
    l: &Lattice,
    roots: &[Vec<i64>],
    gs: &[Vec<i64>],
    prefix: &mut Vec<Vec<i64>>,
    out: &mut Vec<Vec<Vec<i64>>>,
    work: &mut usize,
    cap: usize,
) -> Result<()> {
    let k = prefix.len();
    if k == gs.len() {
        out.push(prefix.clone());
        return Ok(());
    }
    let cands: Vec<Vec<i64>> = roots
        .iter()
        .filter(|r| (0..k).all(|t| l.ip(r, &prefix[t]) == gs[k][t]))
        .cloned()
        .collect();
    *work += cands.len();
    if *work > cap {
        return Err(Error::CapExceeded { what: "embedding search".into(), cap: cap as u64 });
    }
    let stab = orthogonal_roots(l, roots, prefix);
    for orb in reflection_orbits(l, &stab, &cands) {
        prefix.push(orb[0].0.clone());
        descend(l, roots, gs, prefix, out, work, cap)?;
        prefix.pop();
    }
    Ok(())
}

/// Canonical representative of a tuple of roots under `W(R)`, matching `descend`.
fn canonical_tuple(l: &Lattice, roots: &[Vec<i64>], t: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let mut cur: Vec<Vec<i64>> = t.to_vec();
    let mut prefix: Vec<Vec<i64>> = Vec::new();
    for k in 0..t.len() {
        let gk: Vec<i64> = (0..k).map(|j| l.ip(&cur[k], &prefix[j])).collect();
        let cands: Vec<Vec<i64>> = roots
            .iter()
            .filter(|r| (0..k).all(|j| l.ip(r, &prefix[j]) == gk[j]))
            .cloned()
            .collect();
        let stab = orthogonal_roots(l, roots, &prefix);
        let orbits = reflection_orbits(l, &stab, &cands);
        let (orb, pos) = orbits
            .iter()
            .find_map(|o| o.iter().position(|(x, _)| *x == cur[k]).map(|p| (o, p)))
            .ok_or_else(|| Error::Inconsistent("root not found among candidates".into()))?;
        // apply the inverse word (reflections are involutions) to the remaining entries
        let word = &orb[pos].1;
        for j in k..cur.len() {
            let mut v = cur[j].clone();
            for &g in word.iter().rev() {
                v = reflect(l, &stab[g], &v);
            }
            cur[j] = v;
        }
        prefix.push(orb[0].0.clone());
    }
    Ok(prefix)
}
