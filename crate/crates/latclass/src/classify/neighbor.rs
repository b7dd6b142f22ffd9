//! Kneser `d`-neighbors of unimodular lattices.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::isometry::SplitMix;
use crate::lattice::Lattice;
use crate::linalg::{self, Matrix};
use crate::rootsys::{self, RootSystemDescriptor};
use crate::shortvec;

/// Adjusts `x` by elements of `dL` so that `x.x = 0 mod d^2`.
fn fix_norm(l: &Lattice, d: i64, x: &[i64]) -> Option<Vec<i64>> {
    let dd = (d as i128) * (d as i128);
    let nx = l.norm(x) as i128;
    if nx.rem_euclid(dd) == 0 {
        return Some(x.to_vec());
    }
    // (x + d t y).(x + d t y) = x.x + 2 d t (x.y) mod d^2
    let gx = l.apply(x);
    for (j, &c) in gx.iter().enumerate() {
        for t in 1..d {
            let v = nx + 2 * (d as i128) * (t as i128) * (c as i128) + dd * (t as i128) * (t as i128) * (l.entry(j, j) as i128);
            if v.rem_euclid(dd) == 0 {
                let mut y = x.to_vec();
                y[j] += d * t;
                return Some(y);
            }
        }
    }
    None
}

/// `{v in L : v.x = 0 mod d} + Z x/d`, with `x` adjusted modulo `dL` to make it integral.
pub fn kneser_neighbor(l: &Lattice, d: i64, x: &[i64]) -> Result<Lattice> {
    let n = l.rank();
    if d < 1 {
        return Err(Error::Inconsistent("d must be positive".into()));
    }
    if d == 1 {
        return Ok(l.clone());
    }
    if l.det() != 1 {
        return Err(Error::Inconsistent("neighbors are taken of unimodular lattices".into()));
    }
    if x.iter().fold(d, |g, &c| num_integer::gcd(g, c)) != 1 {
        return Err(Error::Inconsistent("x is not primitive mod d".into()));
    }
    let x = fix_norm(l, d, x).ok_or_else(|| Error::Inconsistent("x.x = 0 mod d^2 is not reachable".into()))?;
    // L_{x,d} from the kernel of [Gx | d]
    let gx = l.apply(&x);
    let mut row = gx.clone();
    row.push(d);
    let ker = linalg::integer_kernel(&vec![row], n + 1);
    let mut gens: Vec<Vec<i64>> = ker.iter().map(|k| k[..n].iter().map(|c| c * d).collect()).collect();
    gens.push(x.clone());
    let b = linalg::module_basis_mod(&gens, n, d * d);
    let g = linalg::congruence(&b, &l.gram());
    let dd = d * d;
    if g.iter().flatten().any(|v| v % dd != 0) {
        return Err(Error::NotIntegral);
    }
    let rows: Matrix = g.iter().map(|r| r.iter().map(|v| v / dd).collect()).collect();
    let m = Lattice::from_rows_unchecked(&rows);
    if m.det() != 1 {
        return Err(Error::Inconsistent("neighbor is not unimodular".into()));
    }
    Ok(m.lll().1)
}

/// True when two lattices given by bases (rows, common scaled coordinates) meet
/// in a sublattice of index `d` in both.
pub fn is_d_neighbor(b1: &Matrix, b2: &Matrix, modulus: i64, d: i64) -> bool {
    let n = b1.len();
    let mut gens = b1.clone();
    gens.extend(b2.iter().cloned());
    let s = linalg::module_basis_mod(&gens, n, modulus);
    let ds = linalg::det_bigint(&s).abs();
    let d1 = linalg::det_bigint(b1).abs();
    let d2 = linalg::det_bigint(b2).abs();
    d1 == d2 && (&d1 % &ds) == BigInt::from(0) && (d1 / ds).to_i64() == Some(d)
}

#[derive(Clone, Debug, Default)]
pub struct NeighborFilter {
    pub root_system: Option<RootSystemDescriptor>,
    /// Keep only lattices without norm 1 vectors.
    pub no_units: bool,
}

/// Random `d`-neighbors of `L` (deterministic for a seed) passing the filter,
/// out of `budget` attempts.
pub fn neighbor_search(
    l: &Lattice,
    d: i64,
    budget: usize,
    filter: &NeighborFilter,
    seed: u64,
) -> Result<Vec<Lattice>> {
    let n = l.rank();
    let mut rng = SplitMix::new(seed);
    let mut out = Vec::new();
    for _ in 0..budget {
        let x0: Vec<i64> = (0..n).map(|_| rng.below(d as u64) as i64).collect();
        let y: Vec<i64> = (0..n).map(|_| rng.below(d as u64) as i64).collect();
        // an isotropic vector mod d on the line x0 + t y
        let Some(x) = (0..d)
            .map(|t| x0.iter().zip(&y).map(|(a, b)| (a + t * b).rem_euclid(d)).collect::<Vec<i64>>())
            .find(|x| l.norm(x).rem_euclid(d) == 0 && x.iter().fold(d, |g, &c| num_integer::gcd(g, c)) == 1)
        else {
            continue;
        };
        let m = match kneser_neighbor(l, d, &x) {
            Ok(m) => m,
            Err(Error::Inconsistent(_)) | Err(Error::NotIntegral) => continue,
            Err(e) => return Err(e),
        };
        if filter.no_units && shortvec::short_vectors(&m, 1)?.r(1) != 0 {
            continue;
        }
        if let Some(r) = &filter.root_system {
            if &rootsys::root_data(&m)?.1 != r {
                continue;
            }
        }
        out.push(m);
    }
    Ok(out)
}
