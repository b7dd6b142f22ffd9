//! Residues `L#/L`, characteristic and special vectors, overlattices and gluing.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lattice::{DualVector, Lattice, Q64};
use crate::linalg::{self, Matrix};
use crate::shortvec;

/// Fractional part in `[0, 1)`.
pub fn frac(q: Q64) -> Q64 {
    q - q.floor()
}

/// Residue of a lattice as a finite abelian group with its forms.
#[derive(Clone, Debug)]
pub struct FiniteQuadraticModule {
    /// Nontrivial elementary divisors, ascending, each dividing the next.
    pub divisors: Vec<i64>,
    /// Lifts of the cyclic generators, as dual vectors in the basis of the lattice.
    pub gens: Vec<DualVector>,
    /// `b(g_i, g_j)` in `[0, 1)`.
    pub bilinear: Vec<Vec<Q64>>,
    /// `q(g_i) = g_i.g_i / 2 mod 1`, present iff the lattice is even.
    pub quadratic: Option<Vec<Q64>>,
    /// Linear forms on dual coordinates giving the group coordinates.
    forms: Matrix,
    lattice: Lattice,
}

impl FiniteQuadraticModule {
    pub fn order(&self) -> i64 {
        self.divisors.iter().product()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// All group elements as coefficient tuples, in lexicographic order.
    pub fn elements(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.divisors {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for k in 0..d {
                    let mut f = e.clone();
                    f.push(k);
                    next.push(f);
                }
            }
            out = next;
        }
        out
    }

    pub fn zero(&self) -> Vec<i64> {
        vec![0; self.divisors.len()]
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        x.iter()
            .zip(y)
            .zip(&self.divisors)
            .map(|((a, b), d)| (a + b).rem_euclid(*d))
            .collect()
    }

    pub fn scale(&self, x: &[i64], k: i64) -> Vec<i64> {
        x.iter()
            .zip(&self.divisors)
            .map(|(a, d)| (a * k).rem_euclid(*d))
            .collect()
    }

    pub fn element_order(&self, x: &[i64]) -> i64 {
        x.iter()
            .zip(&self.divisors)
            .fold(1i64, |acc, (a, d)| acc.lcm(&(d / d.gcd(a))))
    }

    /// A lift of the element in `L#`.
    pub fn lift(&self, x: &[i64]) -> DualVector {
        let n = self.lattice.rank();
        let mut acc = DualVector::zero(n);
        for (g, &k) in self.gens.iter().zip(x) {
            if k != 0 {
                acc = acc.add(&g.scale(k));
            }
        }
        acc
    }

    /// Group coordinates of an element of `L#`.
    pub fn class_of(&self, v: &DualVector) -> Result<Vec<i64>> {
        // dual coordinates: y = G v, integral iff v in L#
        let gv = self.lattice.apply(&v.coords);
        if gv.iter().any(|x| x % v.denom != 0) {
            return Err(Error::Inconsistent("vector is not in the dual lattice".into()));
        }
        let y: Vec<i64> = gv.iter().map(|x| x / v.denom).collect();
        Ok(self
            .forms
            .iter()
            .zip(&self.divisors)
            .map(|(f, d)| {
                let s: i128 = f.iter().zip(&y).map(|(a, b)| *a as i128 * *b as i128).sum();
                s.rem_euclid(*d as i128) as i64
            })
            .collect())
    }

    pub fn b(&self, x: &[i64], y: &[i64]) -> Q64 {
        let mut s = Q64::from(0);
        for i in 0..x.len() {
            for j in 0..y.len() {
                if x[i] != 0 && y[j] != 0 {
                    s += self.bilinear[i][j] * Q64::from(x[i] * y[j]);
                }
            }
        }
        frac(s)
    }

    /// `x.x mod 1`, defined for every lattice.
    pub fn norm_mod1(&self, x: &[i64]) -> Q64 {
        frac(self.lift(x).norm(&self.lattice))
    }

    /// `q(x) = x.x/2 mod 1` (even lattices only).
    pub fn q(&self, x: &[i64]) -> Option<Q64> {
        self.quadratic.as_ref()?;
        Some(frac(self.lift(x).norm(&self.lattice) / Q64::from(2)))
    }

    /// Elements `x` with `b(x,x) = 0`, and `q(x) = 0` when `even` is requested.
    pub fn is_isotropic(&self, x: &[i64], even: bool) -> bool {
        if even {
            self.q(x).map(|v| v == Q64::from(0)).unwrap_or(false)
        } else {
            self.norm_mod1(x) == Q64::from(0)
        }
    }

    /// Isotropic subgroups, each as the sorted list of its elements.
    /// Exhaustive only for residues of order at most `2^16`.
    pub fn isotropic_subgroups(&self, even: bool) -> Result<Vec<Vec<Vec<i64>>>> {
        if self.order() > 1 << 16 {
            return Err(Error::CapExceeded {
                what: "isotropic subgroup enumeration".into(),
                cap: 1 << 16,
            });
        }
        let iso: Vec<Vec<i64>> = self
            .elements()
            .into_iter()
            .filter(|x| self.is_isotropic(x, even))
            .collect();
        let mut seen: HashSet<Vec<Vec<i64>>> = HashSet::new();
        let mut queue: VecDeque<Vec<Vec<i64>>> = VecDeque::new();
        let start = vec![self.zero()];
        seen.insert(start.clone());
        queue.push_back(start);
        let mut out = Vec::new();
        while let Some(h) = queue.pop_front() {
            let hs: BTreeSet<Vec<i64>> = h.iter().cloned().collect();
            for x in &iso {
                if hs.contains(x) || h.iter().any(|y| self.b(x, y) != Q64::from(0)) {
                    continue;
                }
                let g = self.generated(&h, x);
                if seen.insert(g.clone()) {
                    queue.push_back(g);
                }
            }
            out.push(h);
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// The subgroup generated by the given elements, sorted.
    pub fn span(&self, gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
        gens.iter().fold(vec![self.zero()], |h, x| self.generated(&h, x))
    }

    /// The subgroup generated by `h` and `x`, sorted.
    fn generated(&self, h: &[Vec<i64>], x: &[i64]) -> Vec<Vec<i64>> {
        let mut set: BTreeSet<Vec<i64>> = h.iter().cloned().collect();
        let ord = self.element_order(x);
        let mut add = Vec::new();
        for k in 1..ord {
            let kx = self.scale(x, k);
            for y in h {
                add.push(self.add(&kx, y));
            }
        }
        set.extend(add);
        set.into_iter().collect()
    }
}

/// The residue `L#/L` via Smith normal form of the Gram matrix.
pub fn residue(l: &Lattice) -> FiniteQuadraticModule {
    let n = l.rank();
    let g = l.gram();
    let (diag, u, uinv) = if n == 0 {
        (Vec::new(), Vec::new(), Vec::new())
    } else {
        linalg::smith(&g)
    };
    // G symmetric: V^T G U^T = D, so y -> U y (mod d_i) identifies Z^n / G Z^n with the residue
    let (adj, det) = if n == 0 { (Vec::new(), 1) } else { l.adjugate() };
    let mut divisors = Vec::new();
    let mut gens = Vec::new();
    let mut forms = Vec::new();
    for (i, &d) in diag.iter().enumerate() {
        let d = d.abs();
        if d == 1 {
            continue;
        }
        // generator in dual coordinates: column i of U^{-1}
        let y: Vec<i64> = (0..n).map(|k| uinv[k][i]).collect();
        // L coordinates: G^{-1} y = adj y / det
        let coords = linalg::mat_vec(&adj, &y);
        let v = DualVector::new(coords, det).reduce_mod_lattice();
        divisors.push(d);
        gens.push(v);
        forms.push(u[i].clone());
    }
    let k = gens.len();
    let mut bilinear = vec![vec![Q64::from(0); k]; k];
    for i in 0..k {
        for j in 0..k {
            bilinear[i][j] = frac(l.dual_ip(&gens[i], &gens[j]));
        }
    }
    let quadratic = if l.is_even() {
        Some(
            gens.iter()
                .map(|x| frac(x.norm(l) / Q64::from(2)))
                .collect(),
        )
    } else {
        None
    };
    FiniteQuadraticModule { divisors, gens, bilinear, quadratic, forms, lattice: l.clone() }
}

/// `m(v)`: the positive generator of `{v.x : x in L}`.
pub fn modulus(l: &Lattice, v: &[i64]) -> Result<i64> {
    if v.iter().all(|&x| x == 0) {
        return Err(Error::ZeroVector);
    }
    Ok(linalg::gcd_slice(&l.apply(v)))
}

/// A characteristic vector: `x.xi = x.x mod 2` for every `x` in `L`.
pub fn characteristic_representative(l: &Lattice) -> DualVector {
    let n = l.rank();
    if n == 0 {
        return DualVector::zero(0);
    }
    let (adj, det) = l.adjugate();
    let y: Vec<i64> = (0..n).map(|i| l.entry(i, i).rem_euclid(2)).collect();
    DualVector::new(linalg::mat_vec(&adj, &y), det)
}

pub fn is_characteristic(l: &Lattice, xi: &DualVector) -> bool {
    let gx = l.apply(&xi.coords);
    (0..l.rank()).all(|i| {
        let num = gx[i] - l.entry(i, i) * xi.denom;
        num % (2 * xi.denom) == 0
    })
}

/// All characteristic vectors of norm at most `bound` (strictly below it when `strict`),
/// both signs, together with a representative of the class.
pub fn characteristic_vectors(
    l: &Lattice,
    bound: i64,
    strict: bool,
) -> Result<(DualVector, Vec<DualVector>)> {
    let n = l.rank();
    let rep = characteristic_representative(l);
    if n == 0 {
        let ok = if strict { 0 < bound } else { 0 <= bound };
        let list = if ok { vec![rep.clone()] } else { vec![] };
        return Ok((rep, list));
    }
    // xi + 2 L#: enumerate y/2 + Z^n in dual coordinates for the rescaled dual D,
    // with norm_D(y/2 + z) <= det * bound / 4
    let (_, dlat) = crate::lattice::dual_and_rescaled_dual(l);
    let det = l.det();
    let (adj, _) = l.adjugate();
    let y0: Vec<i64> = (0..n).map(|i| l.entry(i, i).rem_euclid(2)).collect();
    let shift = DualVector::new(y0, 2);
    let vecs = shortvec::coset_short_vectors(&dlat, &shift, Q64::new(det * bound, 4))?;
    let mut out = Vec::new();
    for w in vecs {
        // xi = 2 w in dual coordinates, then adj/det into L coordinates
        let twice: Vec<i64> = w.coords.iter().map(|c| 2 * c).collect();
        let dual_coords = DualVector::new(twice, w.denom);
        let xi = DualVector::new(linalg::mat_vec(&adj, &dual_coords.coords), det * dual_coords.denom);
        let nx = xi.norm(l);
        if strict && nx >= Q64::from(bound) {
            continue;
        }
        out.push(xi);
    }
    out.sort();
    Ok((rep, out))
}

/// `Exc L`: characteristic vectors of norm `< 8` of a unimodular lattice.
pub fn exceptional_vectors(l: &Lattice) -> Result<Vec<Vec<i64>>> {
    if l.det() != 1 {
        return Err(Error::Inconsistent("Exc is defined for unimodular lattices".into()));
    }
    let (_, v) = characteristic_vectors(l, 8, true)?;
    Ok(v.into_iter().map(|x| x.coords).collect())
}

/// Primitive vectors of the given norm with `m(v) = det L`, both signs.
pub fn special_vectors(l: &Lattice, norm: i64) -> Result<Vec<Vec<i64>>> {
    let det = l.det();
    if norm <= 0 || norm % det != 0 {
        return Ok(Vec::new());
    }
    // v = det * w with w in L#, w.w = norm/det^2; in the rescaled dual y.D.y = norm/det
    let (_, dlat) = crate::lattice::dual_and_rescaled_dual(l);
    let (adj, _) = l.adjugate();
    let rep = shortvec::short_vectors(&dlat, norm / det)?;
    let mut out = Vec::new();
    for y in rep.vectors_of_norm(norm / det) {
        if !shortvec::is_primitive(y) {
            continue;
        }
        let v = linalg::mat_vec(&adj, y);
        if !shortvec::is_primitive(&v) || modulus(l, &v)? != det {
            continue;
        }
        out.push(v.iter().map(|x| -x).collect());
        out.push(v);
    }
    out.sort();
    Ok(out)
}

/// Primitive vectors of the given norm, both signs.
pub fn plain_vectors(l: &Lattice, norm: i64) -> Result<Vec<Vec<i64>>> {
    let rep = shortvec::short_vectors(l, norm)?;
    let mut out = Vec::new();
    for v in rep.vectors_of_norm(norm) {
        if shortvec::is_primitive(v) {
            out.push(v.clone());
            out.push(v.iter().map(|x| -x).collect());
        }
    }
    out.sort();
    Ok(out)
}

/// An overlattice together with its basis (rows, divided by `denom`) in the old coordinates.
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: Lattice,
    pub basis: Matrix,
    pub denom: i64,
}

/// The overlattice `L + sum Z g_i`; the generators must span an isotropic subgroup,
/// and when `even` is set also a `q`-isotropic one.
pub fn overlattice(l: &Lattice, gens: &[DualVector], even: bool) -> Result<Overlattice> {
    for g in gens {
        if !g.in_dual(l) {
            return Err(Error::NotIsotropic("generator is not in the dual lattice".into()));
        }
    }
    for (i, a) in gens.iter().enumerate() {
        let na = a.norm(l);
        if !na.is_integer() {
            return Err(Error::NotIsotropic(format!("generator {i} has norm {na}")));
        }
        if even && na.to_integer() % 2 != 0 {
            return Err(Error::NotIsotropic(format!("generator {i} has odd norm {na}")));
        }
        for (j, b) in gens.iter().enumerate().skip(i + 1) {
            let ip = l.dual_ip(a, b);
            if !ip.is_integer() {
                return Err(Error::NotIsotropic(format!("generators {i},{j} pair to {ip}")));
            }
        }
    }
    let (basis, d) = l.overlattice_basis(gens)?;
    let g = linalg::congruence(&basis, &l.gram());
    let dd = d * d;
    let n = l.rank();
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if g[i][j] % dd != 0 {
                return Err(Error::NotIntegral);
            }
            rows[i][j] = g[i][j] / dd;
        }
    }
    let m = Lattice::from_rows_unchecked(&rows);
    let (t, red) = m.lll();
    Ok(Overlattice { lattice: red, basis: linalg::mat_mul(&t, &basis), denom: d })
}

/// An embedding of a subgroup of `res A` into `-res B`, given on lifts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueEmbedding {
    /// Lifts of generators of `H` in `A#`.
    pub source: Vec<DualVector>,
    /// Lifts of their images in `B#`.
    pub images: Vec<DualVector>,
    /// True when the images land in `-res B` (the gluing convention).
    pub negative: bool,
}

impl ResidueEmbedding {
    pub fn trivial() -> Self {
        ResidueEmbedding { source: Vec::new(), images: Vec::new(), negative: true }
    }

    /// Checks that `h -> eta(h)` reverses the bilinear forms on the given generators
    /// and preserves orders.
    pub fn check(&self, a: &Lattice, b: &Lattice) -> Result<()> {
        if self.source.len() != self.images.len() {
            return Err(Error::Dimension("embedding has mismatched generator lists".into()));
        }
        let sign = if self.negative { -1 } else { 1 };
        for i in 0..self.source.len() {
            for j in i..self.source.len() {
                let x = a.dual_ip(&self.source[i], &self.source[j]);
                let y = b.dual_ip(&self.images[i], &self.images[j]);
                if !(x - Q64::from(sign) * y).is_integer() {
                    return Err(Error::NotIsometric(format!(
                        "b(h{i},h{j}) = {x} but the image pairing is {y}"
                    )));
                }
            }
            let ra = residue_order_of(&self.source[i], a);
            let rb = residue_order_of(&self.images[i], b);
            if ra != rb {
                return Err(Error::NotIsometric(format!(
                    "generator {i} has order {ra} but its image has order {rb}"
                )));
            }
        }
        Ok(())
    }
}

/// Order of the class of `v` in `L#/L`.
pub fn residue_order_of(v: &DualVector, _l: &Lattice) -> i64 {
    // dual vectors are kept with gcd(coords, denom) = 1
    v.denom
}

fn concat_dual(a: &DualVector, b: &DualVector) -> DualVector {
    let d = a.denom.lcm(&b.denom);
    let mut coords: Vec<i64> = a.coords.iter().map(|x| x * (d / a.denom)).collect();
    coords.extend(b.coords.iter().map(|x| x * (d / b.denom)));
    DualVector::new(coords, d)
}

/// The glued lattice `A + B + sum Z (h + eta h)`; returned with its basis in `A + B` coordinates.
pub fn glue_pair(a: &Lattice, b: &Lattice, eta: &ResidueEmbedding) -> Result<Overlattice> {
    eta.check(a, b)?;
    if !eta.negative {
        return Err(Error::NotIsometric("gluing needs an embedding into -res B".into()));
    }
    let ab = a.direct_sum(b);
    let gens: Vec<DualVector> = eta
        .source
        .iter()
        .zip(&eta.images)
        .map(|(x, y)| concat_dual(x, y))
        .collect();
    overlattice(&ab, &gens, false)
}

/// Splits `L` along a saturated sublattice `A` (rows in `L` coordinates):
/// returns `B = L ∩ A^perp` (basis rows in `L` coordinates, reduced lattice)
/// and the gluing data with `L = glue_pair(A, B, eta)` up to isometry.
pub fn split_pair(
    l: &Lattice,
    a_basis: &Matrix,
) -> Result<(Lattice, Matrix, Lattice, ResidueEmbedding)> {
    let n = l.rank();
    let k = a_basis.len();
    if !crate::isometry::is_primitive_system(a_basis, n) {
        return Err(Error::NotSaturated);
    }
    let a = l.transform_unchecked(a_basis);
    let (b_basis, b) = if k == n {
        (Vec::new(), Lattice::empty())
    } else {
        l.orthogonal_complement(a_basis)
    };
    let (adj_a, det_a) = if k > 0 { a.adjugate() } else { (Vec::new(), 1) };
    let (adj_b, det_b) = if k < n { b.adjugate() } else { (Vec::new(), 1) };
    // projections of the basis of L onto A and B
    let mut source = Vec::new();
    let mut images = Vec::new();
    let mut seen: HashSet<(DualVector, DualVector)> = HashSet::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        let ge = l.apply(&e);
        let pa: Vec<i64> = a_basis.iter().map(|r| r.iter().zip(&ge).map(|(x, y)| x * y).sum()).collect();
        let pb: Vec<i64> = b_basis.iter().map(|r| r.iter().zip(&ge).map(|(x, y)| x * y).sum()).collect();
        let xa = if k > 0 {
            DualVector::new(linalg::mat_vec(&adj_a, &pa), det_a).reduce_mod_lattice()
        } else {
            DualVector::zero(0)
        };
        let xb = if k < n {
            DualVector::new(linalg::mat_vec(&adj_b, &pb), det_b).reduce_mod_lattice()
        } else {
            DualVector::zero(0)
        };
        if xa.is_integral() && xb.is_integral() {
            continue;
        }
        if seen.insert((xa.clone(), xb.clone())) {
            source.push(xa);
            images.push(xb);
        }
    }
    Ok((b, b_basis, a, ResidueEmbedding { source, images, negative: true }))
}

/// `nu(x) = min { y.y : y in x + M }` and all minimal lifts.
pub fn venkov_min(m: &Lattice, x: &DualVector) -> Result<(Q64, Vec<DualVector>)> {
    let x = x.reduce_mod_lattice();
    if x.is_integral() {
        return Ok((Q64::from(0), vec![DualVector::zero(m.rank())]));
    }
    let upper = x.norm(m);
    let mut b = Q64::new(1, 2).min(upper);
    loop {
        let v = shortvec::coset_short_vectors(m, &x, b)?;
        if !v.is_empty() {
            let nu = v.iter().map(|y| y.norm(m)).min().unwrap();
            let lifts: Vec<DualVector> = v.into_iter().filter(|y| y.norm(m) == nu).collect();
            return Ok((nu, lifts));
        }
        if b >= upper {
            return Err(Error::Inconsistent("coset enumeration missed the lift".into()));
        }
        b = (b * Q64::from(2)).min(upper);
    }
}

/// `D_n^+` for `n` divisible by 4: `D_n` glued along a half-spin class.
pub fn d_n_plus(n: usize) -> Result<Lattice> {
    if n % 4 != 0 || n == 0 {
        return Err(Error::InvalidRank { family: "D+".into(), rank: n });
    }
    let d = crate::lattice::d_n(n);
    let res = residue(&d);
    let target = Q64::new(n as i64, 4);
    for x in res.elements() {
        if res.element_order(&x) != 2 {
            continue;
        }
        let (nu, lifts) = venkov_min(&d, &res.lift(&x))?;
        if nu == target && (n == 4 || nu != Q64::from(1)) {
            return Ok(overlattice(&d, &lifts[..1], false)?.lattice);
        }
    }
    Err(Error::Inconsistent("no half-spin class found".into()))
}

/// Some embedding `res A -> -res B` of the whole residue of `A`, found by a
/// lexicographic search over generator images; `None` if there is none.
pub fn find_anti_embedding(a: &Lattice, b: &Lattice) -> Result<Option<ResidueEmbedding>> {
    let ra = residue(a);
    let rb = residue(b);
    if ra.order() > 1 << 16 || rb.order() > 1 << 16 {
        return Err(Error::CapExceeded { what: "residue order".into(), cap: 1 << 16 });
    }
    let k = ra.divisors.len();
    let elems = rb.elements();
    let mut choice: Vec<Vec<i64>> = Vec::new();
    fn rec(
        ra: &FiniteQuadraticModule,
        rb: &FiniteQuadraticModule,
        elems: &[Vec<i64>],
        k: usize,
        choice: &mut Vec<Vec<i64>>,
    ) -> bool {
        let i = choice.len();
        if i == k {
            let mut h = vec![rb.zero()];
            for y in choice.iter() {
                h = rb.generated(&h, y);
            }
            return h.len() as i64 == ra.order();
        }
        let gi: Vec<i64> = (0..k).map(|t| i64::from(t == i)).collect();
        for y in elems {
            if rb.element_order(y) != ra.divisors[i] {
                continue;
            }
            let ok = (0..=i).all(|j| {
                let gj: Vec<i64> = (0..k).map(|t| i64::from(t == j)).collect();
                let yj = if j == i { y } else { &choice[j] };
                frac(ra.b(&gi, &gj) + rb.b(y, yj)) == Q64::from(0)
            });
            if ok {
                choice.push(y.clone());
                if rec(ra, rb, elems, k, choice) {
                    return true;
                }
                choice.pop();
            }
        }
        false
    }
    if !rec(&ra, &rb, &elems, k, &mut choice) {
        return Ok(None);
    }
    let source = ra.gens.clone();
    let images = choice.iter().map(|y| rb.lift(y)).collect();
    Ok(Some(ResidueEmbedding { source, images, negative: true }))
}
