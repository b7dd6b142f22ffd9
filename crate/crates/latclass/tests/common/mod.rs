#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use latclass::lattice::{DualVector, Lattice};
use latclass::linalg::{self, Matrix};
use latclass::mod2::{mask_to_vec, vec_to_mask};
use latclass::{isometry, residue};
use num_bigint::BigInt;
use rand::Rng;

/// A product of random elementary operations and sign changes.
pub fn random_unimodular<R: Rng>(n: usize, rng: &mut R, steps: usize) -> Matrix {
    let mut m = linalg::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let f: i64 = rng.gen_range(-2..=2);
        for k in 0..n {
            m[i][k] += f * m[j][k];
        }
        if rng.gen_bool(0.2) {
            m.swap(i, j);
        }
        if rng.gen_bool(0.1) {
            for x in m[i].iter_mut() {
                *x = -*x;
            }
        }
    }
    m
}

pub fn scramble<R: Rng>(l: &Lattice, rng: &mut R) -> Lattice {
    let u = random_unimodular(l.rank(), rng, 3 * l.rank());
    l.sublattice(&u).unwrap()
}

/// A random positive definite Gram matrix with entries bounded by 10 in absolute value.
pub fn random_gram<R: Rng>(n: usize, rng: &mut R) -> Lattice {
    loop {
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = rng.gen_range(1..=10);
            for j in 0..i {
                let x = rng.gen_range(-4..=4);
                g[i][j] = x;
                g[j][i] = x;
            }
        }
        if let Ok(l) = Lattice::new(g) {
            return l;
        }
    }
}

/// Every vector of norm at most `bound` by scanning the box `|x_i|^2 <= bound (G^-1)_ii`.
pub fn brute_short(l: &Lattice, bound: i64) -> Vec<(Vec<i64>, i64)> {
    let n = l.rank();
    let g = l.gram();
    let (adj, det) = linalg::adjugate(&g);
    let det = det.to_string().parse::<f64>().unwrap();
    let r: Vec<i64> = (0..n)
        .map(|i| {
            let inv = adj[i][i].to_string().parse::<f64>().unwrap() / det;
            ((bound as f64) * inv).sqrt().floor() as i64 + 1
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = r.iter().map(|&k| -k).collect();
    loop {
        let mut norm = 0i64;
        for i in 0..n {
            for j in 0..n {
                norm += x[i] * g[i][j] * x[j];
            }
        }
        if norm > 0 && norm <= bound {
            out.push((x.clone(), norm));
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            if x[k] < r[k] {
                x[k] += 1;
                break;
            }
            x[k] = -r[k];
            k += 1;
        }
    }
}

pub fn gram_of(rows: &[&[i64]]) -> Lattice {
    Lattice::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

/// Closure of one point under the generators, as bit masks.
pub fn closure_orbits(gens: &[Matrix], n: usize) -> BTreeSet<BTreeSet<u32>> {
    let act = |g: &Matrix, x: u32| -> u32 {
        let v = mask_to_vec(x, n);
        let w = linalg::mat_vec(g, &v);
        vec_to_mask(&w.iter().map(|c| c.rem_euclid(2)).collect::<Vec<_>>())
    };
    let mut seen: HashSet<u32> = HashSet::new();
    let mut out = BTreeSet::new();
    for s in 0..(1u32 << n) {
        if seen.contains(&s) {
            continue;
        }
        let mut orbit = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = act(g, x);
                if orbit.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen.extend(orbit.iter().copied());
        out.insert(orbit);
    }
    out
}

/// |O(L)| by assigning images to basis vectors among vectors of the same norm.
pub fn exhaustive_order(l: &Lattice) -> u64 {
    let n = l.rank();
    let g = l.gram();
    let maxd = (0..n).map(|i| g[i][i]).max().unwrap();
    let pool = brute_short(l, maxd);
    let cands: Vec<Vec<&Vec<i64>>> =
        (0..n).map(|i| pool.iter().filter(|(_, k)| *k == g[i][i]).map(|(v, _)| v).collect()).collect();
    fn go(i: usize, l: &Lattice, g: &Matrix, cands: &[Vec<&Vec<i64>>], img: &mut Vec<Vec<i64>>) -> u64 {
        if i == cands.len() {
            return 1;
        }
        let mut total = 0;
        for v in &cands[i] {
            if (0..i).all(|j| l.ip(v, &img[j]) == g[i][j]) {
                img.push((*v).clone());
                total += go(i + 1, l, g, cands, img);
                img.pop();
            }
        }
        total
    }
    go(0, l, &g, &cands, &mut Vec::new())
}


fn subgroup_order(a: &Lattice, gens: &[DualVector]) -> usize {
    let r = residue::residue(a);
    let classes: Vec<Vec<i64>> = gens.iter().map(|g| r.class_of(g).unwrap()).collect();
    r.span(&classes).len()
}

/// Splits a random lattice of rank at most 4 along a random saturated `A`, glues
/// back, compares, and splits the glued lattice again. `None` when the draw has
/// discriminant groups too large to be worth it.
pub fn glue_round_trip<R: Rng>(rng: &mut R) -> Option<Result<(), String>> {
    let n = rng.gen_range(2..=4usize);
    let ka = rng.gen_range(1..n);
    let l = random_gram(n, rng).lll().1;
    let u = random_unimodular(n, rng, n);
    let a_basis: Matrix = u[..ka].to_vec();
    let (b, _, a, eta) = residue::split_pair(&l, &a_basis).unwrap();
    if a.det() * b.det() > 4000 {
        return None;
    }
    let fail = |what: &str| Some(Err(format!("{what}: {:?} along {:?}", l.gram(), a_basis)));
    let h = subgroup_order(&a, &eta.source);
    // |H|^2 det L = det A det B
    if BigInt::from(h * h) * l.determinant() != a.determinant() * b.determinant() {
        return fail("determinant identity");
    }
    let glued = residue::glue_pair(&a, &b, &eta).unwrap().lattice;
    let Some(g) = isometry::isometry(&glued, &l).unwrap() else {
        return fail("glued lattice differs");
    };
    // the image of A in the glued lattice
    let image: Matrix = a_basis.iter().map(|row| linalg::mat_vec(&g, row)).collect();
    let (b2, _, _, eta2) = residue::split_pair(&glued, &image).unwrap();
    if !isometry::is_isometric(&b2, &b).unwrap() || subgroup_order(&a, &eta2.source) != h {
        return fail("second split differs");
    }
    Some(Ok(()))
}
