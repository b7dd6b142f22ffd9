//! Exceptional vectors and the triplication of rank `n = 6 mod 8` lattices.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::ClassRecord;
use crate::error::{Error, Result};
use crate::isometry;
use crate::lattice::{self, DualVector, Lattice, Q64};
use crate::linalg::{self, Matrix};
use crate::residue;
use crate::rootsys;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcReport {
    pub rank: usize,
    pub root_system: String,
    /// `|Exc L|`.
    pub exc_count: usize,
    /// Number of `W(L)^±`-orbits on `Exc L`.
    pub orbits: usize,
    pub orbit_sizes: Vec<usize>,
}

impl ExcReport {
    pub fn transitive(&self) -> bool {
        self.orbits <= 1
    }
}

/// Generators of `W(L)^±`: reflections in the simple roots and `-1`.
pub fn weyl_pm_generators(l: &Lattice) -> Result<Vec<Matrix>> {
    let (rd, _) = rootsys::root_data(l)?;
    let n = l.rank();
    let mut gens: Vec<Matrix> = rd.simple.iter().map(|a| isometry::reflection(l, a)).collect();
    let mut neg = linalg::identity(n);
    for (i, r) in neg.iter_mut().enumerate() {
        r[i] = -1;
    }
    gens.push(neg);
    Ok(gens)
}

/// `|Exc L|` and the `W(L)^±`-orbits on it, for each unimodular class.
pub fn exceptional_report(classes: &[ClassRecord]) -> Result<Vec<ExcReport>> {
    classes
        .iter()
        .map(|c| {
            let l = &c.lattice;
            let exc = residue::exceptional_vectors(l)?;
            let gens = weyl_pm_generators(l)?;
            let orb = isometry::vector_orbits(&gens, &exc)?;
            Ok(ExcReport {
                rank: l.rank(),
                root_system: c.root_system.to_string(),
                exc_count: exc.len(),
                orbits: orb.representatives.len(),
                orbit_sizes: orb.sizes,
            })
        })
        .collect()
}

/// The three lattices attached to `(L, alpha)`, as bases in the coordinates of `L`
/// scaled by 2, with their Gram matrices.
#[derive(Clone, Debug)]
pub struct Triplication {
    /// Bases (rows) of `L_w`, coordinates doubled.
    pub bases: Vec<Matrix>,
    pub lattices: Vec<Lattice>,
    /// Index of the member equal to `L` itself.
    pub source_index: usize,
    /// `[L_w + L_w' : L_w]` for every pair `w < w'`.
    pub pair_indices: Vec<((usize, usize), i64)>,
}

impl Triplication {
    pub fn all_two_neighbors(&self) -> bool {
        self.pair_indices.iter().all(|&(_, k)| k == 2)
    }
}

fn det_abs(m: &Matrix) -> BigInt {
    linalg::det_bigint(m).abs()
}

/// Triplication of a unimodular `L` of rank `6 mod 8` along a root `alpha`.
pub fn triplicate(l: &Lattice, alpha: &[i64]) -> Result<Triplication> {
    let n = l.rank();
    if n % 8 != 6 {
        return Err(Error::InvalidRank { family: "triplication needs rank 6 mod 8".into(), rank: n });
    }
    if l.det() != 1 || l.norm(alpha) != 2 {
        return Err(Error::Inconsistent("triplication needs a unimodular lattice and a root".into()));
    }
    // H = L^even ∩ alpha^perp, rows in L coordinates
    let e = lattice::even_part_basis(l);
    let ga = l.apply(alpha);
    let row: Vec<i64> = e.iter().map(|r| r.iter().zip(&ga).map(|(a, b)| a * b).sum()).collect();
    let ker = linalg::integer_kernel(&vec![row], n);
    let h_rows = linalg::mat_mul(&ker, &e);
    let h = l.transform_unchecked(&h_rows);
    let res = residue::residue(&h);
    let three_q = Q64::new(3, 4);
    let ws: Vec<DualVector> = res
        .elements()
        .into_iter()
        .filter(|x| res.q(x) == Some(three_q))
        .map(|x| res.lift(&x))
        .collect();
    if ws.len() != 3 {
        return Err(Error::Inconsistent(format!("expected 3 elements with q = 3/4, found {}", ws.len())));
    }
    // doubled L coordinates of each w
    let amb: Vec<Vec<i64>> = ws
        .iter()
        .map(|w| {
            let mut v = vec![0i64; n];
            for (c, r) in w.coords.iter().zip(&h_rows) {
                for k in 0..n {
                    v[k] += c * r[k];
                }
            }
            v.iter().map(|x| 2 * x / w.denom).collect()
        })
        .collect();
    let mut base: Vec<Vec<i64>> = h_rows.iter().map(|r| r.iter().map(|x| 2 * x).collect()).collect();
    base.push(alpha.iter().map(|x| 2 * x).collect());
    let mut bases = Vec::new();
    let mut lattices = Vec::new();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut gens = base.clone();
        gens.push(amb[i].iter().zip(alpha).map(|(w, a)| w + a).collect());
        gens.push(amb[j].iter().zip(&amb[k]).map(|(a, b)| a + b).collect());
        let b = linalg::module_basis_mod(&gens, n, 8);
        let g = linalg::congruence(&b, &l.gram());
        if g.iter().flatten().any(|x| x % 4 != 0) {
            return Err(Error::NotIntegral);
        }
        let m = Lattice::from_rows_unchecked(&g.iter().map(|r| r.iter().map(|x| x / 4).collect()).collect());
        if m.det() != 1 {
            return Err(Error::Inconsistent("triplication output is not unimodular".into()));
        }
        lattices.push(m.lll().1);
        bases.push(b);
    }
    let own: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 2 } else { 0 }).collect()).collect();
    let own = linalg::module_basis_mod(&own, n, 8);
    let source_index = bases
        .iter()
        .position(|b| b == &own)
        .ok_or_else(|| Error::Inconsistent("L is not among its triplication".into()))?;
    let mut pair_indices = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let mut gens = bases[i].clone();
            gens.extend(bases[j].iter().cloned());
            let s = linalg::module_basis_mod(&gens, n, 8);
            let k = (det_abs(&bases[i]) / det_abs(&s)).to_i64().unwrap_or(0);
            pair_indices.push(((i, j), k));
        }
    }
    Ok(Triplication { bases, lattices, source_index, pair_indices })
}
