//! Fincke–Pohst enumeration of short vectors and of short elements of cosets.
//!
//! The search tree is pruned with a floating point Cholesky decomposition of an
//! LLL-reduced Gram matrix, widened by a safety margin; every emitted vector is
//! then re-checked with exact integer arithmetic, so the returned sets are exact.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lattice::{DualVector, Lattice, Q64};
use crate::linalg::{self, Matrix};

/// Default cap on the number of vectors a single enumeration may produce.
pub const DEFAULT_CAP: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortVectorReport {
    pub bound: i64,
    /// One representative per pair `{v, -v}` together with its norm, sorted by norm.
    pub pairs: Vec<(Vec<i64>, i64)>,
    /// `r_i`: number of vectors of norm `i` (both signs counted).
    pub counts: BTreeMap<i64, usize>,
}

impl ShortVectorReport {
    pub fn r(&self, norm: i64) -> usize {
        self.counts.get(&norm).copied().unwrap_or(0)
    }

    pub fn vectors_of_norm(&self, norm: i64) -> impl Iterator<Item = &Vec<i64>> {
        self.pairs
            .iter()
            .filter(move |(_, k)| *k == norm)
            .map(|(v, _)| v)
    }

    /// Both signs of every vector.
    pub fn all_vectors(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(2 * self.pairs.len());
        for (v, _) in &self.pairs {
            out.push(v.clone());
            out.push(v.iter().map(|x| -x).collect());
        }
        out
    }
}

struct Prepared {
    t: Matrix,
    tinv_t: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
}

fn prepare(l: &Lattice) -> Prepared {
    let (t, red) = l.lll();
    let n = l.rank();
    let g = red.gram();
    let mut q = vec![vec![0.0f64; n]; n];
    // q[i][i] = b_i*, q[i][j] = mu_{j,i} for j > i (standard Fincke–Pohst layout)
    let mut a: Vec<Vec<f64>> = g.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
    for i in 0..n {
        for j in i + 1..n {
            a[j][i] = a[i][j];
            a[i][j] /= a[i][i];
        }
        for k in i + 1..n {
            for l2 in k..n {
                a[k][l2] -= a[k][i] * a[i][l2];
            }
        }
    }
    for i in 0..n {
        q[i][i] = a[i][i];
        for j in i + 1..n {
            q[i][j] = a[i][j];
        }
    }
    let tinv = linalg::unimodular_inverse(&t).expect("LLL transform is unimodular");
    // shift s in original coordinates becomes tinv^T s in reduced coordinates
    let tinv_t: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| tinv[j][i] as f64).collect())
        .collect();
    Prepared { t, tinv_t, q }
}

/// Enumerates integer `y` with `Q(y + c) <= bound` in the reduced basis.
/// With `half`, only one of `y`, `-y` is visited and zero is skipped (requires `c = 0`).
/// The callback returns `false` to abort.
fn fp_enumerate(
    q: &[Vec<f64>],
    c: &[f64],
    bound: f64,
    half: bool,
    f: &mut dyn FnMut(&[i64]) -> bool,
) -> bool {
    let n = q.len();
    if n == 0 {
        if !half && bound >= 0.0 {
            return f(&[]);
        }
        return true;
    }
    let mut x = vec![0i64; n];
    let mut center = vec![0.0f64; n];
    let mut rem = vec![0.0f64; n + 1];
    let mut upper = vec![0i64; n];
    let mut zero_above = vec![true; n + 1];
    rem[n] = bound;
    let eps = 1e-9;
    // initialize level n-1
    let mut i = n - 1;
    let set_level = |i: usize,
                     x: &mut [i64],
                     center: &mut [f64],
                     rem: &[f64],
                     upper: &mut [i64],
                     zero_above: &[bool]|
     -> bool {
        let mut s = c[i];
        for j in i + 1..n {
            s += q[i][j] * (x[j] as f64 + c[j]);
        }
        center[i] = -s;
        let r = rem[i + 1];
        if r < -eps {
            return false;
        }
        let w = (r.max(0.0) / q[i][i]).sqrt() + eps;
        let mut lo = (center[i] - w).ceil() as i64;
        let hi = (center[i] + w).floor() as i64;
        if half && zero_above[i + 1] && lo < 0 {
            lo = 0;
        }
        if lo > hi {
            return false;
        }
        x[i] = lo;
        upper[i] = hi;
        true
    };
    if !set_level(i, &mut x, &mut center, &rem, &mut upper, &zero_above) {
        return true;
    }
    loop {
        // x[i] is a candidate at level i
        let d = x[i] as f64 - center[i];
        let r = rem[i + 1] - q[i][i] * d * d;
        if r >= -1e-7 * (1.0 + bound.abs()) {
            rem[i] = r;
            zero_above[i] = zero_above[i + 1] && x[i] == 0;
            if i == 0 {
                if !(half && zero_above[0]) && !f(&x) {
                    return false;
                }
            } else {
                i -= 1;
                if set_level(i, &mut x, &mut center, &rem, &mut upper, &zero_above) {
                    continue;
                }
                i += 1;
            }
        }
        // advance at level i, climbing as needed
        loop {
            if x[i] < upper[i] {
                x[i] += 1;
                break;
            }
            i += 1;
            if i == n {
                return true;
            }
        }
    }
}

/// All nonzero vectors of norm at most `bound`, up to sign.
pub fn short_vectors(l: &Lattice, bound: i64) -> Result<ShortVectorReport> {
    short_vectors_capped(l, bound, DEFAULT_CAP)
}

pub fn short_vectors_capped(l: &Lattice, bound: i64, cap: usize) -> Result<ShortVectorReport> {
    let n = l.rank();
    let mut pairs: Vec<(Vec<i64>, i64)> = Vec::new();
    if bound > 0 && n > 0 {
        let p = prepare(l);
        let c = vec![0.0; n];
        let margin = 1e-6 * (1.0 + bound as f64);
        let mut overflow = false;
        fp_enumerate(&p.q, &c, bound as f64 + margin, true, &mut |y| {
            let mut v = vec![0i64; n];
            for (i, &yi) in y.iter().enumerate() {
                if yi != 0 {
                    for j in 0..n {
                        v[j] += yi * p.t[i][j];
                    }
                }
            }
            let nv = l.norm(&v);
            if nv <= bound && nv > 0 {
                Lattice::sign_normalize(&mut v);
                pairs.push((v, nv));
                if pairs.len() > cap {
                    overflow = true;
                    return false;
                }
            }
            true
        });
        if overflow {
            return Err(Error::CapExceeded {
                what: format!("short vectors of norm <= {bound}"),
                cap: cap as u64,
            });
        }
    }
    pairs.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
    let mut counts = BTreeMap::new();
    for (_, k) in &pairs {
        *counts.entry(*k).or_insert(0) += 2;
    }
    Ok(ShortVectorReport { bound, pairs, counts })
}

/// All `v` in `shift + L` with `v.v <= bound`, both signs, exact.
pub fn coset_short_vectors(l: &Lattice, shift: &DualVector, bound: Q64) -> Result<Vec<DualVector>> {
    coset_short_vectors_capped(l, shift, bound, DEFAULT_CAP)
}

pub fn coset_short_vectors_capped(
    l: &Lattice,
    shift: &DualVector,
    bound: Q64,
    cap: usize,
) -> Result<Vec<DualVector>> {
    let n = l.rank();
    if n == 0 {
        return Ok(if bound >= Q64::from(0) { vec![shift.clone()] } else { vec![] });
    }
    if *bound.numer() < 0 {
        return Ok(Vec::new());
    }
    let p = prepare(l);
    let den = shift.denom;
    let s: Vec<f64> = shift.coords.iter().map(|&x| x as f64 / den as f64).collect();
    let c: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| p.tinv_t[i][j] * s[j]).sum())
        .collect();
    let bf = *bound.numer() as f64 / *bound.denom() as f64;
    let margin = 1e-6 * (1.0 + bf);
    // exact test: (den x + coords)^T G (den x + coords) * bound.den <= bound.num * den^2
    let lim = (*bound.numer() as i128) * (den as i128) * (den as i128);
    let bden = *bound.denom() as i128;
    let mut out = Vec::new();
    let mut overflow = false;
    fp_enumerate(&p.q, &c, bf + margin, false, &mut |y| {
        let mut v = shift.coords.clone();
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0 {
                for j in 0..n {
                    v[j] += yi * p.t[i][j] * den;
                }
            }
        }
        let nv = l.norm(&v) as i128;
        if nv * bden <= lim {
            out.push(DualVector::new(v, den));
            if out.len() > cap {
                overflow = true;
                return false;
            }
        }
        true
    });
    if overflow {
        return Err(Error::CapExceeded {
            what: "coset short vectors".into(),
            cap: cap as u64,
        });
    }
    out.sort();
    Ok(out)
}

/// Vectors of `L#` with norm at most `bound`, both signs, zero excluded.
pub fn dual_short_vectors(l: &Lattice, bound: Q64) -> Result<Vec<DualVector>> {
    // L# has Gram det * G^{-1} / det in the dual basis; enumerate in the rescaled dual.
    let (dual, scaled) = crate::lattice::dual_and_rescaled_dual(l);
    let det = l.det();
    // norm in L# = norm in scaled / det
    let b = bound * Q64::from(det);
    let bi = b.floor().to_integer();
    let rep = short_vectors(&scaled, bi)?;
    let mut out = Vec::new();
    for v in rep.all_vectors() {
        // combination of dual basis vectors
        let mut coords = vec![0i64; l.rank()];
        for (i, &c) in v.iter().enumerate() {
            if c != 0 {
                for j in 0..l.rank() {
                    coords[j] += c * dual[i].coords[j] * (det / dual[i].denom);
                }
            }
        }
        out.push(DualVector::new(coords, det));
    }
    out.sort();
    Ok(out)
}

/// Brute force over a box, for tests and tiny cases: all `x` with `|x_i| <= r`.
pub fn brute_force_box(l: &Lattice, bound: i64, r: i64) -> Vec<Vec<i64>> {
    let n = l.rank();
    let mut out = Vec::new();
    let mut x = vec![-r; n];
    if n == 0 {
        return out;
    }
    loop {
        let nv = l.norm(&x);
        if nv > 0 && nv <= bound {
            let mut v = x.clone();
            Lattice::sign_normalize(&mut v);
            if v == x {
                out.push(v);
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            if x[i] < r {
                x[i] += 1;
                break;
            }
            x[i] = -r;
            i += 1;
        }
    }
}

/// Gcd of the coordinates, the usual primitivity test.
pub fn is_primitive(v: &[i64]) -> bool {
    v.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}
