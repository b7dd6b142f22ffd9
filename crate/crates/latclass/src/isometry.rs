//! Automorphism groups and isometry tests by backtracking over short vectors,
//! in the manner of Plesken and Souvignier, plus orbit computations.
//!
//! Group elements are integer matrices acting on coordinate columns: `v -> g v`,
//! so the columns of `g` are the images of the basis vectors and
//! `g^T G g = G` holds for every automorphism.

use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{self, Matrix};
use crate::shortvec;

/// Default node budget for one backtracking search.
pub const DEFAULT_BUDGET: u64 = 200_000_000;

const QUICK_NODES: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsometryGroup {
    pub n: usize,
    pub generators: Vec<Matrix>,
    pub order: BigUint,
}

impl IsometryGroup {
    pub fn trivial(n: usize) -> Self {
        IsometryGroup { n, generators: Vec::new(), order: BigUint::one() }
    }

    pub fn order_u128(&self) -> Option<u128> {
        self.order.to_u128()
    }

    /// True when every generator preserves the Gram matrix and is invertible over Z.
    pub fn verify(&self, l: &Lattice) -> bool {
        let g = l.gram();
        self.generators.iter().all(|m| {
            let mt = linalg::transpose(m);
            linalg::mat_mul(&linalg::mat_mul(&mt, &g), m) == g
                && linalg::det_bigint(m).magnitude() == &BigUint::one()
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub budget: u64,
    pub vector_cap: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: DEFAULT_BUDGET, vector_cap: 4_000_000 }
    }
}

fn hash64<T: Hash>(t: &T) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Short vector data and invariant fingerprints for one lattice.
struct VecSet {
    n: usize,
    vecs: Vec<Vec<i64>>,
    gv: Vec<Vec<i64>>,
    norms: Vec<i64>,
    index: HashMap<Vec<i64>, usize>,
    fp: Vec<u64>,
}

impl VecSet {
    fn build(l: &Lattice, bound: i64, fixed: &[Vec<i64>], cap: usize) -> Result<VecSet> {
        let n = l.rank();
        let rep = shortvec::short_vectors_capped(l, bound, cap)?;
        let vecs = rep.all_vectors();
        let gv: Vec<Vec<i64>> = vecs.iter().map(|v| l.apply(v)).collect();
        let norms: Vec<i64> = vecs.iter().map(|v| l.norm(v)).collect();
        let index = vecs.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        // fingerprint: histogram of inner products against the vectors of the
        // smallest norms (at most a few thousand), plus the fixed-vector products
        let mut small: Vec<usize> = (0..vecs.len()).collect();
        small.sort_by_key(|&i| norms[i]);
        // whole norm shells, as long as they keep the set below a few thousand vectors
        let mut cut = small.len();
        for pos in 1..small.len() {
            if norms[small[pos]] != norms[small[pos - 1]] && pos + shell_len(&small[pos..], &norms) > 3000 {
                cut = pos;
                break;
            }
        }
        small.truncate(cut);
        let fixed_g: Vec<Vec<i64>> = fixed.iter().map(|w| l.apply(w)).collect();
        let dot = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let mut fp: Vec<u64> = (0..vecs.len())
            .map(|i| {
                let mut h: Vec<(i64, i64)> =
                    small.iter().map(|&j| (norms[j], dot(&vecs[i], &gv[j]))).collect();
                h.sort_unstable();
                let fx: Vec<i64> = fixed_g.iter().map(|w| dot(&vecs[i], w)).collect();
                hash64(&(norms[i], h, fx))
            })
            .collect();
        // second pass on the small shells: for each value a = x.v, the distribution of
        // v.w over pairs v, w in {v : x.v = a}; skipped when too expensive (the cost is
        // itself an isometry invariant, so both sides of a comparison decide alike)
        let k = small.len();
        let pm: Vec<i64> = (0..k * k)
            .map(|t| dot(&vecs[small[t / k]], &gv[small[t % k]]))
            .collect();
        let mut groups: Vec<Vec<(i64, usize)>> = Vec::with_capacity(k);
        let mut cost = 0usize;
        for a in 0..k {
            let mut g: Vec<(i64, usize)> =
                (0..k).filter(|&b| pm[a * k + b] != 0).map(|b| (pm[a * k + b], b)).collect();
            g.sort_unstable();
            let mut st = 0;
            while st < g.len() {
                let en = st + g[st..].iter().take_while(|e| e.0 == g[st].0).count();
                cost += (en - st) * (en - st);
                st = en;
            }
            groups.push(g);
        }
        if cost <= 200_000_000 {
            for a in 0..k {
                let g = &groups[a];
                let mut sig: Vec<(i64, Vec<(i64, u32)>)> = Vec::new();
                let mut st = 0;
                while st < g.len() {
                    let en = st + g[st..].iter().take_while(|e| e.0 == g[st].0).count();
                    let mut hist: Vec<i64> = Vec::with_capacity((en - st) * (en - st) / 2);
                    for p in st..en {
                        for q in p + 1..en {
                            hist.push(pm[g[p].1 * k + g[q].1]);
                        }
                    }
                    hist.sort_unstable();
                    let mut rl: Vec<(i64, u32)> = Vec::new();
                    for x in hist {
                        match rl.last_mut() {
                            Some((v, c)) if *v == x => *c += 1,
                            _ => rl.push((x, 1)),
                        }
                    }
                    sig.push((g[st].0, rl));
                    st = en;
                }
                let i = small[a];
                fp[i] = hash64(&(fp[i], sig));
            }
        }
        Ok(VecSet { n, vecs, gv, norms, index, fp })
    }

    #[inline]
    fn ip(&self, a: usize, b: usize) -> i64 {
        let (x, y) = (&self.vecs[a], &self.gv[b]);
        let mut s = 0;
        for k in 0..self.n {
            s += x[k] * y[k];
        }
        s
    }
}

fn shell_len(rest: &[usize], norms: &[i64]) -> usize {
    rest.iter().take_while(|&&i| norms[i] == norms[rest[0]]).count()
}

/// The search problem: map the basis of `src` (Gram `g`) into `dst`.
struct Search<'a> {
    n: usize,
    g: &'a Matrix,
    dst: &'a VecSet,
    /// candidates per level (indices into dst), filtered by norm and fingerprint
    cand: Vec<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(g: &'a Matrix, src_fp: &[u64], dst: &'a VecSet, budget: u64) -> Self {
        let n = g.len();
        let cand = (0..n)
            .map(|j| {
                (0..dst.vecs.len())
                    .filter(|&c| dst.norms[c] == g[j][j] && dst.fp[c] == src_fp[j])
                    .collect()
            })
            .collect();
        Search { n, g, dst, cand, nodes: 0, budget }
    }

    /// Extend the prefix `img` to a full assignment.
    fn extend(&mut self, img: &mut Vec<usize>) -> Result<bool> {
        let k = img.len();
        // forward-checked candidate lists for levels k..n
        let mut lists: Vec<Vec<usize>> = Vec::with_capacity(self.n - k);
        for j in k..self.n {
            let l: Vec<usize> = self.cand[j]
                .iter()
                .copied()
                .filter(|&c| (0..k).all(|t| self.dst.ip(c, img[t]) == self.g[j][t]))
                .collect();
            if l.is_empty() {
                return Ok(false);
            }
            lists.push(l);
        }
        self.dfs(img, &lists)
    }

    fn dfs(&mut self, img: &mut Vec<usize>, lists: &[Vec<usize>]) -> Result<bool> {
        let j = img.len();
        if j == self.n {
            return Ok(true);
        }
        for &c in &lists[0] {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExceeded(format!(
                    "{} backtracking nodes",
                    self.budget
                )));
            }
            // forward check
            let mut next: Vec<Vec<usize>> = Vec::with_capacity(lists.len() - 1);
            let mut ok = true;
            for (off, l) in lists[1..].iter().enumerate() {
                let lev = j + 1 + off;
                let gl = self.g[lev][j];
                let f: Vec<usize> = l
                    .iter()
                    .copied()
                    .filter(|&d| d != c && self.dst.ip(d, c) == gl)
                    .collect();
                if f.is_empty() {
                    ok = false;
                    break;
                }
                next.push(f);
            }
            if !ok {
                continue;
            }
            img.push(c);
            if self.dfs(img, &next)? {
                return Ok(true);
            }
            img.pop();
        }
        Ok(false)
    }
}

fn matrix_from_images(dst: &VecSet, img: &[usize]) -> Matrix {
    let n = img.len();
    let mut m = vec![vec![0i64; n]; n];
    for (j, &c) in img.iter().enumerate() {
        for i in 0..n {
            m[i][j] = dst.vecs[c][i];
        }
    }
    m
}

/// Reduced working basis: `t` with rows the new basis; returns (t, reduced gram).
fn working_basis(l: &Lattice) -> (Matrix, Lattice) {
    let (t, red) = l.lll();
    // order basis vectors by norm so that the most constrained levels come first
    let mut idx: Vec<usize> = (0..red.rank()).collect();
    idx.sort_by_key(|&i| red.entry(i, i));
    let t2: Matrix = idx.iter().map(|&i| t[i].clone()).collect();
    let red2 = l.transform_unchecked(&t2);
    (t2, red2)
}

/// Conjugate a group element from working coordinates back to the original ones.
fn to_original(t: &Matrix, tinv: &Matrix, g: &Matrix) -> Matrix {
    // original coords x = T^T y; g_orig = T^T g (T^T)^{-1} = T^T g (T^{-1})^T
    let tt = linalg::transpose(t);
    let tinv_t = linalg::transpose(tinv);
    linalg::mat_mul(&linalg::mat_mul(&tt, g), &tinv_t)
}

/// Automorphism group with default limits.
pub fn automorphisms(l: &Lattice) -> Result<IsometryGroup> {
    automorphisms_with(l, &[], SearchOptions::default())
}

/// Automorphisms fixing each of the given lattice vectors (original coordinates).
pub fn stabilizer(l: &Lattice, fixed: &[Vec<i64>]) -> Result<IsometryGroup> {
    automorphisms_with(l, fixed, SearchOptions::default())
}

pub fn automorphisms_with(
    l: &Lattice,
    fixed: &[Vec<i64>],
    opts: SearchOptions,
) -> Result<IsometryGroup> {
    let n = l.rank();
    if n == 0 {
        return Ok(IsometryGroup::trivial(0));
    }
    if fixed.is_empty() {
        if let Some(g) = split_unit_part(l, opts)? {
            return Ok(g);
        }
    }
    let (t, red) = working_basis(l);
    let tinv = linalg::unimodular_inverse(&t).expect("unimodular");
    // fixed vectors in working coordinates: y = (T^T)^{-1} x = (T^{-1})^T x
    let tinv_t = linalg::transpose(&tinv);
    let fixed_w: Vec<Vec<i64>> = fixed.iter().map(|x| linalg::mat_vec(&tinv_t, x)).collect();
    let g = red.gram();
    let bound = (0..n).map(|i| g[i][i]).max().unwrap();
    let vs = VecSet::build(&red, bound, &fixed_w, opts.vector_cap)?;
    let basis_idx = unit_indices(&vs, n);
    let chain = build_chain(&g, &vs, &basis_idx, opts.budget)?;
    let gens = chain.gens;
    let order = chain.order;
    let generators: Vec<Matrix> = gens.iter().map(|m| to_original(&t, &tinv, m)).collect();
    Ok(IsometryGroup { n, generators, order })
}

fn unit_indices(vs: &VecSet, n: usize) -> Vec<usize> {
    (0..n)
        .map(|i| {
            let mut e = vec![0i64; n];
            e[i] = 1;
            vs.index[&e]
        })
        .collect()
}

/// Generators along the stabilizer chain of the working basis.
struct Chain {
    gens: Vec<Matrix>,
    perms: Vec<Vec<u32>>,
    order: BigUint,
}

fn build_chain(g: &Matrix, vs: &VecSet, basis_idx: &[usize], budget: u64) -> Result<Chain> {
    let n = g.len();
    let src_fp: Vec<u64> = basis_idx.iter().map(|&i| vs.fp[i]).collect();
    let mut search = Search::new(g, &src_fp, vs, budget);
    let mut gens: Vec<Matrix> = Vec::new();
    let mut perms: Vec<Vec<u32>> = Vec::new();
    let mut order = BigUint::one();
    // levels from the last basis vector to the first
    for i in (0..n).rev() {
        let target = basis_idx[i];
        // candidates: images of b_i compatible with fixing b_0..b_{i-1}
        let cands: Vec<usize> = search.cand[i]
            .iter()
            .copied()
            .filter(|&c| (0..i).all(|t| vs.ip(c, basis_idx[t]) == g[i][t]))
            .collect();
        let mut in_orbit: HashSet<usize> = HashSet::new();
        let mut excluded: HashSet<usize> = HashSet::new();
        in_orbit.insert(target);
        close_orbit(&mut in_orbit, &perms);
        for &c in &cands {
            if in_orbit.contains(&c) || excluded.contains(&c) {
                continue;
            }
            let mut img: Vec<usize> = basis_idx[..i].to_vec();
            img.push(c);
            if search.extend(&mut img)? {
                let m = matrix_from_images(vs, &img);
                perms.push(perm_of(vs, &m));
                gens.push(m);
                close_orbit(&mut in_orbit, &perms);
            } else {
                let mut orb = HashSet::new();
                orb.insert(c);
                close_orbit(&mut orb, &perms);
                excluded.extend(orb);
            }
        }
        order *= BigUint::from(in_orbit.len());
    }
    Ok(Chain { gens, perms, order })
}

/// Orbit labels of the vector set under the given permutations.
fn orbit_labels(size: usize, perms: &[Vec<u32>]) -> Vec<u32> {
    let mut label = vec![u32::MAX; size];
    let mut next = 0u32;
    for s in 0..size {
        if label[s] != u32::MAX {
            continue;
        }
        label[s] = next;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for p in perms {
                let y = p[x] as usize;
                if label[y] == u32::MAX {
                    label[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    label
}

fn perm_of(vs: &VecSet, m: &Matrix) -> Vec<u32> {
    vs.vecs
        .iter()
        .map(|v| {
            let w = linalg::mat_vec(m, v);
            vs.index[&w] as u32
        })
        .collect()
}

fn close_orbit(orbit: &mut HashSet<usize>, perms: &[Vec<u32>]) {
    let mut stack: Vec<usize> = orbit.iter().copied().collect();
    while let Some(x) = stack.pop() {
        for p in perms {
            let y = p[x] as usize;
            if orbit.insert(y) {
                stack.push(y);
            }
        }
    }
}

/// Splits `L = I_m + L_1` along the norm-1 vectors when `m > 0`.
fn split_unit_part(l: &Lattice, opts: SearchOptions) -> Result<Option<IsometryGroup>> {
    let n = l.rank();
    let rep = shortvec::short_vectors(l, 1)?;
    let units: Vec<Vec<i64>> = rep.vectors_of_norm(1).cloned().collect();
    let m = units.len();
    if m == 0 || (m == n && n <= 1) {
        return Ok(None);
    }
    let (cbasis, comp) = l.orthogonal_complement(&units);
    // basis of L adapted to I_m + L_1
    let mut basis = units.clone();
    basis.extend(cbasis.iter().cloned());
    let binv = linalg::unimodular_inverse(&basis).ok_or(Error::NotSaturated)?;
    let sub = if comp.rank() > 0 {
        automorphisms_with(&comp, &[], opts)?
    } else {
        IsometryGroup::trivial(0)
    };
    let mut gens_w: Vec<Matrix> = Vec::new();
    // signed permutations of the units
    if m >= 1 {
        let mut neg = linalg::identity(n);
        neg[0][0] = -1;
        gens_w.push(neg);
    }
    if m >= 2 {
        let mut sw = linalg::identity(n);
        sw[0][0] = 0;
        sw[1][1] = 0;
        sw[0][1] = 1;
        sw[1][0] = 1;
        gens_w.push(sw);
        let mut cyc = vec![vec![0i64; n]; n];
        for i in 0..m {
            cyc[(i + 1) % m][i] = 1;
        }
        for i in m..n {
            cyc[i][i] = 1;
        }
        gens_w.push(cyc);
    }
    for h in &sub.generators {
        let mut g = linalg::identity(n);
        for i in 0..h.len() {
            for j in 0..h.len() {
                g[m + i][m + j] = h[i][j];
            }
        }
        gens_w.push(g);
    }
    // working coords y: x = B^T y
    let generators = gens_w.iter().map(|g| to_original(&basis, &binv, g)).collect();
    let mut order = sub.order.clone();
    order *= BigUint::from(2u32).pow(m as u32);
    for k in 2..=m {
        order *= BigUint::from(k);
    }
    Ok(Some(IsometryGroup { n, generators, order }))
}

/// Cheap isometry invariants compared before any search.
fn quick_invariants(l: &Lattice, bound: i64) -> Result<(i64, bool, Vec<(i64, usize)>)> {
    let rep = shortvec::short_vectors(l, bound)?;
    Ok((l.det(), l.is_even(), rep.counts.into_iter().collect()))
}

/// An isometry `g` with `g^T G1 g = G2` (columns are images of the basis of `L2`
/// written in the basis of `L1`), or `None` when none exists.
pub fn isometry(l1: &Lattice, l2: &Lattice) -> Result<Option<Matrix>> {
    isometry_with(l1, l2, SearchOptions::default())
}

pub fn isometry_with(l1: &Lattice, l2: &Lattice, opts: SearchOptions) -> Result<Option<Matrix>> {
    let n = l1.rank();
    if n != l2.rank() {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    if l1.det() != l2.det() || l1.is_even() != l2.is_even() {
        return Ok(None);
    }
    // map a reduced basis of L2 into L1
    let (t2, red2) = working_basis(l2);
    let (t1, red1) = working_basis(l1);
    let g2 = red2.gram();
    let g1 = red1.gram();
    let b2 = (0..n).map(|i| g2[i][i]).max().unwrap();
    let b1 = (0..n).map(|i| g1[i][i]).max().unwrap();
    let bound = b1.max(b2);
    if quick_invariants(l1, bound)? != quick_invariants(l2, bound)? {
        return Ok(None);
    }
    let vs1 = VecSet::build(&red1, bound, &[], opts.vector_cap)?;
    let vs2 = VecSet::build(&red2, bound, &[], opts.vector_cap)?;
    let src_fp: Vec<u64> = unit_indices(&vs2, n).iter().map(|&i| vs2.fp[i]).collect();
    {
        let mut f1: Vec<u64> = vs1.fp.clone();
        let mut f2: Vec<u64> = vs2.fp.clone();
        f1.sort_unstable();
        f2.sort_unstable();
        if f1 != f2 {
            return Ok(None);
        }
    }
    // a short plain attempt first; most calls compare isometric lattices
    let quick = opts.budget.min(QUICK_NODES);
    let mut search = Search::new(&g2, &src_fp, &vs1, quick);
    let mut img = Vec::new();
    let found = match search.extend(&mut img) {
        Ok(true) => true,
        Ok(false) => return Ok(None),
        Err(Error::BudgetExceeded(_)) => {
            // prune the first level by orbits of O(L1), after comparing group orders
            let base1 = unit_indices(&vs1, n);
            let chain1 = build_chain(&g1, &vs1, &base1, opts.budget)?;
            let base2 = unit_indices(&vs2, n);
            let chain2 = build_chain(&g2, &vs2, &base2, opts.budget)?;
            if chain1.order != chain2.order {
                return Ok(None);
            }
            let labels = orbit_labels(vs1.vecs.len(), &chain1.perms);
            let mut search = Search::new(&g2, &src_fp, &vs1, opts.budget);
            let mut tried: HashSet<u32> = HashSet::new();
            let firsts = search.cand[0].clone();
            let mut ok = false;
            for c in firsts {
                if !tried.insert(labels[c]) {
                    continue;
                }
                img = vec![c];
                if search.extend(&mut img)? {
                    ok = true;
                    break;
                }
            }
            ok
        }
        Err(e) => return Err(e),
    };
    if !found {
        return Ok(None);
    }
    // m: columns = images of red2 basis in red1 coordinates
    let m = matrix_from_images(&vs1, &img);
    // original: basis of L2 in terms of red2: e2 = t2^{-1} rows; red1 coords -> L1 coords via t1^T
    let t2inv = linalg::unimodular_inverse(&t2).expect("unimodular");
    // image of original L2 basis vector e_j = sum_k (t2inv)_{jk} red2_k
    let t1t = linalg::transpose(&t1);
    let mt = linalg::mat_mul(&t1t, &m); // columns: images of red2 basis in L1 coords
    let out = linalg::mat_mul(&mt, &linalg::transpose(&t2inv));
    Ok(Some(out))
}

pub fn is_isometric(l1: &Lattice, l2: &Lattice) -> Result<bool> {
    Ok(isometry(l1, l2)?.is_some())
}

/// Checks `g^T G1 g = G2`.
pub fn check_isometry(l1: &Lattice, l2: &Lattice, g: &Matrix) -> bool {
    let gt = linalg::transpose(g);
    linalg::mat_mul(&linalg::mat_mul(&gt, &l1.gram()), g) == l2.gram()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition<T> {
    pub representatives: Vec<T>,
    pub sizes: Vec<usize>,
    pub total: usize,
}

/// Orbits of a matrix group on an explicit finite set of integer vectors.
/// Fails if the set is not closed under the generators.
pub fn vector_orbits(
    generators: &[Matrix],
    vectors: &[Vec<i64>],
) -> Result<OrbitPartition<Vec<i64>>> {
    let index: HashMap<&Vec<i64>, usize> =
        vectors.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let perms: Vec<Vec<usize>> = generators
        .iter()
        .map(|g| {
            vectors
                .iter()
                .map(|v| {
                    let w = linalg::mat_vec(g, v);
                    index.get(&w).copied().ok_or_else(|| {
                        Error::Inconsistent("vector set not closed under the group".into())
                    })
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<_>>()?;
    let mut seen = vec![false; vectors.len()];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&a, &b| vectors[a].cmp(&vectors[b]));
    for &start in &order {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut size = 0;
        while let Some(x) = stack.pop() {
            size += 1;
            for p in &perms {
                let y = p[x];
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        reps.push(vectors[start].clone());
        sizes.push(size);
    }
    Ok(OrbitPartition { representatives: reps, sizes, total: vectors.len() })
}

/// Reflection in a root `a` (norm `a.a`, must divide `2 a.x`), as a matrix on coordinates.
pub fn reflection(l: &Lattice, a: &[i64]) -> Matrix {
    let n = l.rank();
    let ga = l.apply(a);
    let na = l.norm(a);
    let mut m = linalg::identity(n);
    // s(x) = x - 2 (a.x)/(a.a) a; column j is s(e_j)
    for j in 0..n {
        let c = 2 * ga[j] / na;
        for i in 0..n {
            m[i][j] -= c * a[i];
        }
    }
    m
}

/// A basis of `L` made of short vectors, found by LLL followed by a seeded
/// randomized search. Never worse (max norm, then sum of norms) than the input.
pub fn good_basis(l: &Lattice, seed: u64) -> (Matrix, Lattice) {
    let n = l.rank();
    let score = |m: &Lattice| -> (i64, i64) {
        let d: Vec<i64> = (0..m.rank()).map(|i| m.entry(i, i)).collect();
        (d.iter().copied().max().unwrap_or(0), d.iter().sum())
    };
    let mut best_t = linalg::identity(n);
    let mut best = l.clone();
    let (t, red) = l.lll();
    if score(&red) < score(&best) {
        best_t = t;
        best = red;
    }
    if n == 0 {
        return (best_t, best);
    }
    // try to build a basis from the shortest vectors, in a seeded random order
    let maxd = score(&best).0;
    if let Ok(rep) = shortvec::short_vectors_capped(l, maxd, 200_000) {
        let mut vecs: Vec<Vec<i64>> = rep.pairs.iter().map(|(v, _)| v.clone()).collect();
        let mut rng = SplitMix::new(seed);
        for _round in 0..8 {
            // shuffle within equal norms
            let mut keyed: Vec<(i64, u64, Vec<i64>)> =
                vecs.drain(..).map(|v| (l.norm(&v), rng.next(), v)).collect();
            keyed.sort();
            vecs = keyed.into_iter().map(|(_, _, v)| v).collect();
            if let Some(b) = greedy_basis(l, &vecs) {
                let cand = l.transform_unchecked(&b);
                if score(&cand) < score(&best) {
                    best = cand;
                    best_t = b;
                }
            }
        }
    }
    (best_t, best)
}

/// Greedily picks vectors keeping the chosen set primitive; returns a basis if one is reached.
fn greedy_basis(l: &Lattice, vecs: &[Vec<i64>]) -> Option<Matrix> {
    let n = l.rank();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    for v in vecs {
        let mut trial = chosen.clone();
        trial.push(v.clone());
        if is_primitive_system(&trial, n) {
            chosen = trial;
            if chosen.len() == n {
                return Some(chosen);
            }
        }
    }
    None
}

/// True when the rows are independent and span a saturated sublattice of Z^n.
pub fn is_primitive_system(rows: &[Vec<i64>], n: usize) -> bool {
    // the gcd of maximal minors is 1 iff the Smith invariants are all 1
    let k = rows.len();
    let (u, rank) = linalg::column_reduce(&rows.to_vec(), n);
    if rank < k {
        return false;
    }
    // rows * U = [H | 0]; H square lower triangular; saturated iff det H = +-1
    let prod = linalg::mat_mul(&rows.to_vec(), &u);
    let h: Matrix = prod.iter().map(|r| r[..k].to_vec()).collect();
    linalg::det_bigint(&h).magnitude() == &BigUint::one()
}

/// Counter-based generator (splitmix64); deterministic for a given seed.
#[derive(Clone, Debug)]
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix { state: seed }
    }

    pub fn next(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, k: u64) -> u64 {
        self.next() % k.max(1)
    }
}

/// `O(L)^red = O(L)/W(L)`, realized as the stabilizer `O(L;rho)` of the Weyl vector.
#[derive(Clone, Debug)]
pub struct ReducedGroup {
    pub reduced_order: BigUint,
    pub weyl_order: BigUint,
    /// Generators of `O(L;rho)`; its order is `reduced_order`.
    pub rho_stabilizer: IsometryGroup,
}

impl ReducedGroup {
    pub fn full_order(&self) -> BigUint {
        &self.reduced_order * &self.weyl_order
    }
}

pub fn reduced_order(l: &Lattice) -> Result<ReducedGroup> {
    let (rd, desc) = crate::rootsys::root_data(l)?;
    let weyl_order = desc.weyl_order();
    let stab = if rd.positive.is_empty() {
        automorphisms(l)?
    } else {
        let two_rho: Vec<i64> = rd
            .weyl_vector
            .coords
            .iter()
            .map(|c| c * 2 / rd.weyl_vector.denom)
            .collect();
        stabilizer(l, &[two_rho])?
    };
    Ok(ReducedGroup { reduced_order: stab.order.clone(), weyl_order, rho_stabilizer: stab })
}
