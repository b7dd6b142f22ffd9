//! Unimodular lattices of rank `n + 2` with a pair of orthogonal roots, built
//! from the orbits of `O(L)` on `L/2L` for `L` of rank `n`.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::{dedup, Candidate, ClassRecord, DedupOutcome};
use crate::error::{Error, Result};
use crate::invariants;
use crate::lattice::{self, Lattice};
use crate::linalg::{self, Matrix};
use crate::mod2;
use crate::rootsys;
use crate::shortvec;

/// `U(L,e)` together with the coordinates of `alpha_0` and `beta_0`.
pub fn build_u(l: &Lattice, e: &[i64]) -> Result<(Lattice, Vec<i64>, Vec<i64>)> {
    let n = l.rank();
    if l.norm(e).rem_euclid(4) != 2 {
        return Err(Error::Inconsistent("e.e must be 2 mod 4".into()));
    }
    let ge = l.apply(e);
    let f = (0..n).find(|&i| ge[i] % 2 != 0).ok_or(Error::ZeroVector)?;
    let m = n + 2;
    // coordinates doubled: U sits in (1/2)(L + Q_0)
    let mut gens: Vec<Vec<i64>> = Vec::with_capacity(n + 4);
    for i in 0..n {
        let mut v = vec![0i64; m];
        if i == f {
            v[i] = 4;
        } else if ge[i] % 2 == 0 {
            v[i] = 2;
        } else {
            v[i] = 2;
            v[f] = -2;
        }
        gens.push(v);
    }
    let mut a0 = vec![0i64; m];
    a0[n] = 2;
    let mut b0 = vec![0i64; m];
    b0[n + 1] = 2;
    let mut g1: Vec<i64> = e.iter().copied().chain([1, 0]).collect();
    g1.truncate(m);
    let mut g2: Vec<i64> = e.iter().copied().chain([0, 1]).collect();
    g2[f] += 2;
    gens.extend([a0.clone(), b0.clone(), g1, g2]);
    let h = linalg::module_basis_mod(&gens, m, 4);
    let mut amb = l.gram();
    for r in amb.iter_mut() {
        r.extend([0, 0]);
    }
    let mut r = vec![0i64; m];
    r[n] = 2;
    amb.push(r.clone());
    r[n] = 0;
    r[n + 1] = 2;
    amb.push(r);
    let g = linalg::congruence(&h, &amb);
    let mut rows = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in 0..m {
            if g[i][j] % 4 != 0 {
                return Err(Error::NotIntegral);
            }
            rows[i][j] = g[i][j] / 4;
        }
    }
    let u = Lattice::from_rows_unchecked(&rows);
    if u.det() != 1 {
        return Err(Error::Inconsistent("U(L,e) is not unimodular".into()));
    }
    let alpha = solve_row(&h, &a0)?;
    let beta = solve_row(&h, &b0)?;
    Ok((u, alpha, beta))
}

/// `c` with `c H = t`.
fn solve_row(h: &Matrix, t: &[i64]) -> Result<Vec<i64>> {
    let (adj, det) = linalg::adjugate(h);
    let n = t.len();
    (0..n)
        .map(|j| {
            let mut s = BigInt::zero();
            for i in 0..n {
                s += BigInt::from(t[i]) * &adj[i][j];
            }
            if !(&s % &det).is_zero() {
                return Err(Error::Inconsistent("vector not in the lattice".into()));
            }
            (s / &det).to_i64().ok_or_else(|| Error::Inconsistent("overflow".into()))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ExtensionCandidate {
    pub candidate: Candidate,
    /// Index of the source class and the mask of `e` in `L/2L`.
    pub source: usize,
    pub e_mask: u32,
    /// Size of the orbit of `e` in `L/2L`.
    pub orbit_size: usize,
}

/// Candidates `U(L,e)` with `r_1(U) = 0` and `{alpha_0, beta_0}` relevant, one per
/// `O(L)`-orbit of admissible `e`.
pub fn extend_orthogonal_roots(
    classes: &mut [ClassRecord],
    cap: usize,
) -> Result<Vec<ExtensionCandidate>> {
    for (i, c) in classes.iter_mut().enumerate() {
        c.group().map_err(|e| Error::Inconsistent(format!("class {i}: {e}")))?;
    }
    let mut items: Vec<(usize, u32, usize)> = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        let n = c.rank();
        if n == 0 {
            continue;
        }
        let gram = c.lattice.gram();
        // e must pair oddly with every norm 1 vector
        let units: Vec<u32> = shortvec::short_vectors(&c.lattice, 1)?
            .vectors_of_norm(1)
            .map(|v| mod2::vec_to_mask(&c.lattice.apply(v)))
            .collect();
        let keep = |x: u32| {
            mod2::norm_mod4(&gram, x) == 2 && units.iter().all(|&u| (u & x).count_ones() % 2 == 1)
        };
        let gens = &c.group.as_ref().unwrap().generators;
        let orb = mod2::orbits_mod2_filtered(gens, n, cap, keep)?;
        for (&x, &s) in orb.representatives.iter().zip(&orb.sizes) {
            items.push((i, x, s));
        }
    }
    let out: Vec<Option<ExtensionCandidate>> = items
        .par_iter()
        .map(|&(i, x, s)| -> Result<Option<ExtensionCandidate>> {
            let c = &classes[i];
            let e = mod2::mask_to_vec(x, c.rank());
            let (u, alpha, beta) = build_u(&c.lattice, &e)?;
            if shortvec::short_vectors(&u, 1)?.r(1) != 0 {
                return Ok(None);
            }
            let (rd, desc) = rootsys::root_data(&u)?;
            if !rd.is_relevant_pair(&desc, &alpha, &beta) {
                return Ok(None);
            }
            let predicted = if desc.m1() >= 2 {
                let size = |v: &[i64]| {
                    rd.component_of_root(v).map(|k| rd.components[k].kind.root_count()).unwrap_or(0)
                };
                let num = BigUint::from(size(&alpha)) * BigUint::from(size(&beta)) * &c.aut_order;
                let den = BigUint::from(s);
                if !(&num % &den).is_zero() {
                    return Err(Error::Inconsistent("orbit size does not divide the mass ratio".into()));
                }
                Some(num / den)
            } else {
                None
            };
            let (_, red) = u.lll();
            let mut cand = Candidate::new(
                red,
                format!("ext({}:{}:{:x})", c.rank(), i, x),
                "bv3",
                invariants::bv3,
            )?;
            debug_assert_eq!(cand.root_system, desc);
            cand.predicted_aut = predicted;
            Ok(Some(ExtensionCandidate { candidate: cand, source: i, e_mask: x, orbit_size: s }))
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}

#[derive(Clone, Copy, Debug)]
pub struct UnimodularOptions {
    pub max_rank: usize,
    /// Largest dimension accepted by the mod 2 orbit computation.
    pub mod2_cap: usize,
}

impl Default for UnimodularOptions {
    fn default() -> Self {
        UnimodularOptions { max_rank: 16, mod2_cap: mod2::DEFAULT_MOD2_CAP }
    }
}

#[derive(Clone, Debug, Default)]
pub struct UnimodularClassification {
    /// `all[n]`: every unimodular class of rank `n` (index 0 is the zero lattice).
    pub all: Vec<Vec<ClassRecord>>,
    /// `no_units[n]`: the classes of rank `n` without norm 1 vectors.
    pub no_units: Vec<Vec<ClassRecord>>,
    /// Per-rank dedup statistics for the `r_1 = 0` step.
    pub stats: Vec<DedupOutcome>,
}

impl UnimodularClassification {
    pub fn counts(&self) -> Vec<usize> {
        self.all.iter().map(Vec::len).collect()
    }

    pub fn unresolved(&self) -> usize {
        self.stats.iter().map(|s| s.unresolved.len()).sum()
    }

    /// Even classes of rank `n`.
    pub fn even(&self, n: usize) -> Vec<&ClassRecord> {
        self.all[n].iter().filter(|c| c.lattice.is_even()).collect()
    }
}

/// `I_1 ⊥ L`.
fn pad(c: &ClassRecord) -> Result<ClassRecord> {
    let l = lattice::i_n(1).direct_sum(&c.lattice);
    let prov = if c.rank() == 0 { "I1".to_string() } else { format!("I1+{}", c.provenance) };
    ClassRecord::unimodular(l, prov)
}

/// All unimodular lattices of rank `<= max_rank`, assuming every class without norm 1
/// vectors has a pair of orthogonal roots (checked afterwards by the mass audit).
pub fn classify_unimodular(opts: UnimodularOptions) -> Result<UnimodularClassification> {
    let mut out = UnimodularClassification::default();
    let zero = ClassRecord::unimodular(Lattice::empty(), "0")?;
    out.all.push(vec![zero.clone()]);
    out.no_units.push(vec![zero]);
    out.stats.push(DedupOutcome::default());
    for n in 1..=opts.max_rank {
        let stat = if n >= 2 {
            let cands = extend_orthogonal_roots(&mut out.all[n - 2], opts.mod2_cap)?;
            dedup(cands.into_iter().map(|c| c.candidate).collect())?
        } else {
            DedupOutcome::default()
        };
        let mut x0 = stat.classes.clone();
        for (k, c) in x0.iter_mut().enumerate() {
            c.provenance = format!("X{n}.{k}<-{}", c.provenance);
        }
        super::canonical_order(&mut x0);
        let mut all = x0.clone();
        for c in &out.all[n - 1] {
            all.push(pad(c)?);
        }
        out.no_units.push(x0);
        out.all.push(all);
        out.stats.push(stat);
    }
    Ok(out)
}
