//! Orbits of integer matrix groups acting on `(Z/2)^n`.
//!
//! Vectors are bit masks (`bit i` = coordinate `i`); matrices are reduced mod 2
//! into packed rows and applied with population counts.

use crate::error::{Error, Result};
use crate::isometry::OrbitPartition;
use crate::linalg::Matrix;

pub const DEFAULT_MOD2_CAP: usize = 30;

/// A matrix mod 2 as packed rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mod2Matrix {
    pub n: usize,
    pub rows: Vec<u32>,
}

impl Mod2Matrix {
    pub fn from_int(m: &Matrix) -> Self {
        let n = m.len();
        let rows = m
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .fold(0u32, |acc, (j, &x)| if x & 1 != 0 { acc | 1 << j } else { acc })
            })
            .collect();
        Mod2Matrix { n, rows }
    }

    /// `g x` for a column vector `x`.
    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        let mut y = 0u32;
        for (i, &r) in self.rows.iter().enumerate() {
            y |= ((r & x).count_ones() & 1) << i;
        }
        y
    }

    pub fn determinant_is_odd(&self) -> bool {
        // Gaussian elimination over GF(2)
        let mut rows = self.rows.clone();
        for c in 0..self.n {
            let Some(p) = (c..self.n).find(|&i| rows[i] >> c & 1 == 1) else {
                return false;
            };
            rows.swap(c, p);
            for i in 0..self.n {
                if i != c && rows[i] >> c & 1 == 1 {
                    rows[i] ^= rows[c];
                }
            }
        }
        true
    }
}

/// Integer coordinates `0/1` of a bit mask.
pub fn mask_to_vec(x: u32, n: usize) -> Vec<i64> {
    (0..n).map(|i| i64::from(x >> i & 1)).collect()
}

pub fn vec_to_mask(v: &[i64]) -> u32 {
    v.iter()
        .enumerate()
        .fold(0u32, |acc, (i, &x)| if x & 1 != 0 { acc | 1 << i } else { acc })
}

/// Orbits on all of `(Z/2)^n`; representatives are orbit minima.
pub fn orbits_mod2(generators: &[Matrix], n: usize) -> Result<OrbitPartition<u32>> {
    orbits_mod2_filtered(generators, n, DEFAULT_MOD2_CAP, |_| true)
}

/// Orbits contained in `{x : keep(x)}`, which must be a union of orbits.
pub fn orbits_mod2_filtered(
    generators: &[Matrix],
    n: usize,
    cap: usize,
    keep: impl Fn(u32) -> bool,
) -> Result<OrbitPartition<u32>> {
    if n > cap.min(31) {
        return Err(Error::CapExceeded { what: "orbits_mod2 dimension".into(), cap: cap as u64 });
    }
    let gens: Vec<Mod2Matrix> = generators.iter().map(Mod2Matrix::from_int).collect();
    for g in &gens {
        if g.n != n || g.rows.len() != n {
            return Err(Error::Dimension("generator size differs from n".into()));
        }
        if !g.determinant_is_odd() {
            return Err(Error::Inconsistent("generator has even determinant".into()));
        }
    }
    let size: u64 = 1u64 << n;
    let mut seen = vec![0u64; (size as usize).div_ceil(64)];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut total = 0usize;
    let mut stack: Vec<u32> = Vec::new();
    for x in 0..size {
        let x = x as u32;
        if seen[(x >> 6) as usize] >> (x & 63) & 1 == 1 || !keep(x) {
            continue;
        }
        seen[(x >> 6) as usize] |= 1 << (x & 63);
        stack.push(x);
        let mut count = 0usize;
        while let Some(y) = stack.pop() {
            count += 1;
            for g in &gens {
                let z = g.apply(y);
                let (w, b) = ((z >> 6) as usize, z & 63);
                if seen[w] >> b & 1 == 0 {
                    seen[w] |= 1 << b;
                    stack.push(z);
                }
            }
        }
        reps.push(x);
        sizes.push(count);
        total += count;
    }
    Ok(OrbitPartition { representatives: reps, sizes, total })
}

/// `x.x mod 4` for a mask, given the Gram matrix.
pub fn norm_mod4(gram: &Matrix, x: u32) -> i64 {
    let n = gram.len();
    let mut s = 0i64;
    for i in 0..n {
        if x >> i & 1 == 0 {
            continue;
        }
        s += gram[i][i];
        for j in i + 1..n {
            if x >> j & 1 == 1 {
                s += 2 * gram[i][j];
            }
        }
    }
    s.rem_euclid(4)
}
