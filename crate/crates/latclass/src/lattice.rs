//! The `Lattice` carrier, dual vectors and the standard constructors.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Small exact rationals (norms of dual vectors, residue values).
pub type Q64 = Ratio<i64>;

/// An integral positive definite lattice given by its Gram matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    n: usize,
    gram: Vec<i64>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice{:?}", self.gram())
    }
}

impl Lattice {
    /// Validates symmetry and positive definiteness (exact leading minors).
    pub fn new(rows: Matrix) -> Result<Self> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row: i, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        if let Some((index, minor)) = first_bad_minor(&rows) {
            return Err(Error::NotPositiveDefinite { index, minor });
        }
        Ok(Self::from_rows_unchecked(&rows))
    }

    /// No validation. Callers guarantee a symmetric positive definite matrix.
    pub fn from_rows_unchecked(rows: &Matrix) -> Self {
        let n = rows.len();
        let gram = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Lattice { n, gram }
    }

    pub fn empty() -> Self {
        Lattice { n: 0, gram: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.gram[i * self.n + j]
    }

    pub fn gram(&self) -> Matrix {
        (0..self.n)
            .map(|i| self.gram[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn gram_flat(&self) -> &[i64] {
        &self.gram
    }

    /// `G v`, the inner products of `v` with the basis.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| {
                let row = &self.gram[i * self.n..(i + 1) * self.n];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    #[inline]
    pub fn ip(&self, u: &[i64], v: &[i64]) -> i64 {
        let mut s = 0i64;
        for i in 0..self.n {
            if u[i] == 0 {
                continue;
            }
            let row = &self.gram[i * self.n..(i + 1) * self.n];
            let mut t = 0i64;
            for j in 0..self.n {
                t += row[j] * v[j];
            }
            s += u[i] * t;
        }
        s
    }

    #[inline]
    pub fn norm(&self, v: &[i64]) -> i64 {
        self.ip(v, v)
    }

    pub fn determinant(&self) -> BigInt {
        linalg::det_bigint(&self.gram())
    }

    /// Determinant as a machine integer (all lattices handled here have small determinant).
    pub fn det(&self) -> i64 {
        self.determinant()
            .to_i64()
            .expect("determinant does not fit in i64")
    }

    pub fn is_even(&self) -> bool {
        (0..self.n).all(|i| self.entry(i, i) % 2 == 0)
    }

    pub fn is_unimodular(&self) -> bool {
        self.det() == 1
    }

    /// Gram matrix of the sublattice (or basis change) spanned by the rows of `b`.
    pub fn sublattice(&self, b: &Matrix) -> Result<Lattice> {
        Lattice::new(linalg::congruence(b, &self.gram()))
    }

    pub fn transform_unchecked(&self, b: &Matrix) -> Lattice {
        Lattice::from_rows_unchecked(&linalg::congruence(b, &self.gram()))
    }

    /// Orthogonal sum, block diagonal.
    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let n = self.n + other.n;
        let mut rows = vec![vec![0i64; n]; n];
        for i in 0..self.n {
            for j in 0..self.n {
                rows[i][j] = self.entry(i, j);
            }
        }
        for i in 0..other.n {
            for j in 0..other.n {
                rows[self.n + i][self.n + j] = other.entry(i, j);
            }
        }
        Lattice::from_rows_unchecked(&rows)
    }

    pub fn scaled(&self, k: i64) -> Lattice {
        Lattice {
            n: self.n,
            gram: self.gram.iter().map(|x| x * k).collect(),
        }
    }

    /// LLL-reduced copy together with the change of basis.
    pub fn lll(&self) -> (Matrix, Lattice) {
        let (t, g) = linalg::lll_gram(&self.gram(), 0.99);
        (t, Lattice::from_rows_unchecked(&g))
    }

    /// Orthogonal complement of the span of `vs` (coordinates in this basis), LLL reduced.
    /// The returned matrix expresses the complement basis in this basis.
    pub fn orthogonal_complement(&self, vs: &[Vec<i64>]) -> (Matrix, Lattice) {
        let a: Matrix = vs.iter().map(|v| self.apply(v)).collect();
        let ker = linalg::integer_kernel(&a, self.n);
        let sub = self.transform_unchecked(&ker);
        let (t, red) = sub.lll();
        (linalg::mat_mul(&t, &ker), red)
    }

    /// The lattice generated by this one and the given dual vectors.
    /// Fails if the result is not integral.
    pub fn overlattice_basis(&self, gens: &[DualVector]) -> Result<(Matrix, i64)> {
        let d = gens.iter().fold(1i64, |acc, g| acc.lcm(&g.denom));
        if d == 1 {
            return Ok((linalg::identity(self.n), 1));
        }
        let scaled: Vec<Vec<i64>> = gens
            .iter()
            .map(|g| g.coords.iter().map(|&c| c * (d / g.denom)).collect())
            .collect();
        let basis = linalg::module_basis_mod(&scaled, self.n, d);
        Ok((basis, d))
    }

    /// Overlattice generated by `self` and dual vectors `gens`, LLL reduced.
    pub fn overlattice_unchecked(&self, gens: &[DualVector]) -> Result<Lattice> {
        let (basis, d) = self.overlattice_basis(gens)?;
        let g = linalg::congruence(&basis, &self.gram());
        let dd = d * d;
        let mut rows = vec![vec![0i64; self.n]; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if g[i][j] % dd != 0 {
                    return Err(Error::NotIntegral);
                }
                rows[i][j] = g[i][j] / dd;
            }
        }
        let l = Lattice::from_rows_unchecked(&rows);
        Ok(l.lll().1)
    }

    /// Exact inverse Gram scaled by the determinant (the adjugate).
    pub fn adjugate(&self) -> (Matrix, i64) {
        let (adj, det) = linalg::adjugate(&self.gram());
        (
            linalg::bigint_matrix_to_i64(&adj).expect("adjugate overflow"),
            det.to_i64().expect("determinant overflow"),
        )
    }

    /// Canonical up-to-sign representative: the lexicographically larger of `v`, `-v`.
    pub fn sign_normalize(v: &mut [i64]) {
        if let Some(&x) = v.iter().find(|&&x| x != 0) {
            if x < 0 {
                for y in v.iter_mut() {
                    *y = -*y;
                }
            }
        }
    }

    /// Inner products of the dual vector `d` with every basis vector, as rationals.
    pub fn dual_ip(&self, a: &DualVector, b: &DualVector) -> Q64 {
        Q64::new(self.ip(&a.coords, &b.coords), a.denom * b.denom)
    }
}

fn first_bad_minor(rows: &Matrix) -> Option<(usize, String)> {
    let minors = linalg::leading_minors(rows);
    minors
        .iter()
        .enumerate()
        .find(|(_, m)| !m.is_positive())
        .map(|(i, m)| (i + 1, m.to_string()))
}

/// An element `(1/denom) * coords` of the ambient space, coordinates in the basis of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualVector {
    pub coords: Vec<i64>,
    pub denom: i64,
}

impl DualVector {
    pub fn new(coords: Vec<i64>, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        let mut v = DualVector { coords, denom };
        v.normalize();
        v
    }

    pub fn integral(coords: Vec<i64>) -> Self {
        DualVector { coords, denom: 1 }
    }

    pub fn zero(n: usize) -> Self {
        DualVector { coords: vec![0; n], denom: 1 }
    }

    fn normalize(&mut self) {
        if self.denom < 0 {
            self.denom = -self.denom;
            for c in self.coords.iter_mut() {
                *c = -*c;
            }
        }
        let g = self.coords.iter().fold(self.denom, |g, &c| g.gcd(&c));
        if g > 1 {
            self.denom /= g;
            for c in self.coords.iter_mut() {
                *c /= g;
            }
        }
    }

    pub fn is_integral(&self) -> bool {
        self.denom == 1
    }

    pub fn norm(&self, l: &Lattice) -> Q64 {
        Q64::new(l.norm(&self.coords), self.denom * self.denom)
    }

    pub fn add(&self, o: &DualVector) -> DualVector {
        let d = self.denom.lcm(&o.denom);
        let (a, b) = (d / self.denom, d / o.denom);
        DualVector::new(
            self.coords
                .iter()
                .zip(&o.coords)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            d,
        )
    }

    pub fn scale(&self, k: i64) -> DualVector {
        DualVector::new(self.coords.iter().map(|x| x * k).collect(), self.denom)
    }

    pub fn neg(&self) -> DualVector {
        self.scale(-1)
    }

    /// Coordinates reduced modulo the lattice (each coordinate in `[0, 1)`).
    pub fn reduce_mod_lattice(&self) -> DualVector {
        DualVector::new(
            self.coords.iter().map(|c| c.rem_euclid(self.denom)).collect(),
            self.denom,
        )
    }

    /// Inner products with the basis vectors, as rationals.
    pub fn basis_products(&self, l: &Lattice) -> Vec<Q64> {
        l.apply(&self.coords)
            .into_iter()
            .map(|x| Q64::new(x, self.denom))
            .collect()
    }

    /// True when the vector lies in the dual lattice.
    pub fn in_dual(&self, l: &Lattice) -> bool {
        l.apply(&self.coords).iter().all(|x| x % self.denom == 0)
    }
}

/// Rescaled dual `det(L) * L#`: Gram matrix `det(L) * G^{-1}`, the adjugate.
/// Also returns the dual basis as dual vectors (rows of `G^{-1}`).
pub fn dual_and_rescaled_dual(l: &Lattice) -> (Vec<DualVector>, Lattice) {
    if l.rank() == 0 {
        return (Vec::new(), Lattice::empty());
    }
    let (adj, det) = l.adjugate();
    let dual = adj
        .iter()
        .map(|row| DualVector::new(row.clone(), det))
        .collect();
    (dual, Lattice::from_rows_unchecked(&adj))
}

pub fn direct_sum(a: &Lattice, b: &Lattice) -> Lattice {
    a.direct_sum(b)
}

pub fn determinant(l: &Lattice) -> BigInt {
    l.determinant()
}

fn cartan_chain(n: usize) -> Matrix {
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        g[i][i] = 2;
        if i + 1 < n {
            g[i][i + 1] = -1;
            g[i + 1][i] = -1;
        }
    }
    g
}

pub fn a_n(n: usize) -> Lattice {
    Lattice::from_rows_unchecked(&cartan_chain(n))
}

pub fn d_n(n: usize) -> Lattice {
    // chain 0 - 1 - ... - (n-2), node n-1 attached to n-3
    let mut g = cartan_chain(n - 1);
    for r in g.iter_mut() {
        r.push(0);
    }
    g.push(vec![0; n]);
    g[n - 1][n - 1] = 2;
    if n >= 3 {
        g[n - 1][n - 3] = -1;
        g[n - 3][n - 1] = -1;
    }
    Lattice::from_rows_unchecked(&g)
}

pub fn e_n(n: usize) -> Lattice {
    // chain of n-1 nodes, extra node attached to the third one
    let mut g = cartan_chain(n - 1);
    for r in g.iter_mut() {
        r.push(0);
    }
    g.push(vec![0; n]);
    g[n - 1][n - 1] = 2;
    g[n - 1][2] = -1;
    g[2][n - 1] = -1;
    Lattice::from_rows_unchecked(&g)
}

pub fn i_n(n: usize) -> Lattice {
    Lattice::from_rows_unchecked(&linalg::identity(n))
}

pub fn diag(d: i64) -> Lattice {
    Lattice::from_rows_unchecked(&vec![vec![d]])
}

/// `F_8`: the even lattice of determinant 5 containing `E_7 + <10>`.
pub fn f8() -> Lattice {
    let e7 = e_n(7);
    let l = e7.direct_sum(&diag(10));
    // minuscule weight of E_7 plus half the generator of <10>
    let (dual, _) = dual_and_rescaled_dual(&e7);
    let w = dual
        .iter()
        .find(|w| w.norm(&e7) == Q64::new(3, 2))
        .expect("E7 has a weight of norm 3/2")
        .clone();
    assert_eq!(w.denom, 2);
    let mut coords = w.coords.clone();
    coords.push(1);
    let denom = 2;
    l.overlattice_unchecked(&[DualVector::new(coords, denom)])
        .expect("F8 glue is integral")
}

/// Orthogonal complement of the first root found in the lattice.
pub fn root_complement(l: &Lattice) -> Result<Lattice> {
    let idx = (0..l.rank()).find(|&i| l.entry(i, i) == 2);
    let v = match idx {
        Some(i) => {
            let mut v = vec![0; l.rank()];
            v[i] = 1;
            v
        }
        None => crate::shortvec::short_vectors(l, 2)?
            .vectors_of_norm(2)
            .next()
            .ok_or_else(|| Error::Inconsistent("lattice has no root".into()))?
            .clone(),
    };
    Ok(l.orthogonal_complement(&[v]).1)
}

/// Standard lattices by name: `A5`, `D4`, `E8`, `I3`, `<6>`, `S2`, `S5`, `S7`, `F8`,
/// `Q0`, primes for root complements (`A4'`, `F8'`), and `+` for orthogonal sums.
pub fn standard_lattice(spec: &str) -> Result<Lattice> {
    let spec = spec.trim();
    if spec.contains('+') {
        // an empty part marks the preceding one as a `D_n^+` name, e.g. `D16+` or `D12++I2`
        let parts: Vec<&str> = spec.split('+').collect();
        let mut out = Lattice::empty();
        let mut i = 0;
        while i < parts.len() {
            let part = parts[i].trim();
            if part.is_empty() {
                return Err(Error::UnknownLattice(spec.to_string()));
            }
            if i + 1 < parts.len() && parts[i + 1].trim().is_empty() {
                let rank: usize = part
                    .strip_prefix('D')
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| Error::UnknownLattice(spec.to_string()))?;
                out = out.direct_sum(&crate::residue::d_n_plus(rank)?);
                i += 2;
            } else {
                out = out.direct_sum(&standard_lattice(part)?);
                i += 1;
            }
        }
        return Ok(out);
    }
    if let Some(base) = spec.strip_suffix('\'') {
        return root_complement(&standard_lattice(base)?);
    }
    let unknown = || Error::UnknownLattice(spec.to_string());
    if let Some(inner) = spec.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
        let d: i64 = inner.trim().parse().map_err(|_| unknown())?;
        if d < 1 {
            return Err(Error::InvalidRank { family: "<d>".into(), rank: 0 });
        }
        return Ok(diag(d));
    }
    // multiplicity prefix such as 2A1
    let digits: String = spec.chars().take_while(|c| c.is_ascii_digit()).collect();
    if !digits.is_empty() && digits.len() < spec.len() {
        let m: usize = digits.parse().map_err(|_| unknown())?;
        let one = standard_lattice(&spec[digits.len()..])?;
        let mut out = Lattice::empty();
        for _ in 0..m {
            out = out.direct_sum(&one);
        }
        return Ok(out);
    }
    let mut chars = spec.chars();
    let fam = chars.next().ok_or_else(unknown)?;
    let rest: String = chars.collect();
    let rest = rest.trim_start_matches('_');
    let rank: usize = rest.parse().map_err(|_| unknown())?;
    standard_lattice_family(fam, rank)
}

pub fn standard_lattice_family(family: char, rank: usize) -> Result<Lattice> {
    let bad = || Error::InvalidRank { family: family.to_string(), rank };
    match family {
        'A' if rank >= 1 => Ok(a_n(rank)),
        'D' if rank >= 2 => Ok(d_n(rank)),
        'E' if (6..=8).contains(&rank) => Ok(e_n(rank)),
        'I' | 'Z' => Ok(i_n(rank)),
        'S' => match rank {
            2 => Ok(Lattice::from_rows_unchecked(&vec![vec![2, -1], vec![-1, 4]])),
            5 => Ok(Lattice::from_rows_unchecked(&vec![vec![2, 1], vec![1, 3]])),
            7 => Ok(Lattice::from_rows_unchecked(&vec![
                vec![2, 1, 1],
                vec![1, 2, 1],
                vec![1, 1, 3],
            ])),
            _ => Err(bad()),
        },
        'F' if rank == 8 => Ok(f8()),
        'Q' if rank == 0 => Ok(a_n(1).direct_sum(&a_n(1))),
        'A' | 'D' | 'E' | 'F' | 'Q' => Err(bad()),
        _ => Err(Error::UnknownLattice(format!("{family}{rank}"))),
    }
}

/// The largest even sublattice and its index (1 or 2).
pub fn even_part(l: &Lattice) -> (Lattice, usize) {
    let n = l.rank();
    let odd: Vec<usize> = (0..n).filter(|&i| l.entry(i, i) % 2 != 0).collect();
    if odd.is_empty() {
        return (l.clone(), 1);
    }
    let i0 = odd[0];
    let mut basis = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = vec![0i64; n];
        if i == i0 {
            v[i] = 2;
        } else {
            v[i] = 1;
            if l.entry(i, i) % 2 != 0 {
                v[i0] = 1;
            }
        }
        basis.push(v);
    }
    let sub = l.transform_unchecked(&basis);
    (sub.lll().1, 2)
}

/// Even-part basis in the coordinates of `l` (rows), not reduced.
pub fn even_part_basis(l: &Lattice) -> Matrix {
    let n = l.rank();
    let odd: Vec<usize> = (0..n).filter(|&i| l.entry(i, i) % 2 != 0).collect();
    if odd.is_empty() {
        return linalg::identity(n);
    }
    let i0 = odd[0];
    (0..n)
        .map(|i| {
            let mut v = vec![0i64; n];
            if i == i0 {
                v[i] = 2;
            } else {
                v[i] = 1;
                if l.entry(i, i) % 2 != 0 {
                    v[i0] = 1;
                }
            }
            v
        })
        .collect()
}

pub fn q64_floor(q: Q64) -> i64 {
    q.floor().to_integer()
}

pub fn is_one(q: &BigInt) -> bool {
    q.is_one()
}
