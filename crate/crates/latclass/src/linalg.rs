//! Exact integer linear algebra used by every other module.
//!
//! Matrices are `Vec<Vec<i64>>` in row-major form. A basis change is a matrix
//! whose rows are the new basis vectors written in the old coordinates, so the
//! transformed Gram matrix is `B * G * B^T`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Matrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = if b.is_empty() { 0 } else { b[0].len() };
    let k = b.len();
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for t in 0..k {
            let x = a[i][t];
            if x == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += x * b[t][j];
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    let (n, m) = (a.len(), a[0].len());
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn mat_vec(a: &Matrix, v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `B * G * B^T` for a basis matrix `B` whose rows live in the coordinates of `G`.
pub fn congruence(b: &Matrix, g: &Matrix) -> Matrix {
    let bg = mat_mul(b, g);
    let k = b.len();
    let mut out = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in i..k {
            let s: i64 = bg[i].iter().zip(&b[j]).map(|(x, y)| x * y).sum();
            out[i][j] = s;
            out[j][i] = s;
        }
    }
    out
}

/// Determinant by fraction-free elimination with row pivoting.
pub fn det_bigint(m: &Matrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * prev
}

/// Leading principal minors `d_1, ..., d_n` (Bareiss pivots, no pivoting).
/// Stops at the first minor that is not positive and returns the list so far,
/// that minor included.
pub fn leading_minors(m: &Matrix) -> Vec<BigInt> {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = a[k][k].clone();
        out.push(pivot.clone());
        if !pivot.is_positive() {
            return out;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &pivot - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = pivot;
    }
    out
}

/// Adjugate matrix and determinant of a nonsingular integer matrix.
pub fn adjugate(m: &Matrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let n = m.len();
    let det = det_bigint(m);
    // Solve m * X = det * I column by column with rational elimination.
    let mut a: Vec<Vec<num_rational::BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<num_rational::BigRational> = m[i]
                .iter()
                .map(|&x| num_rational::BigRational::from_integer(BigInt::from(x)))
                .collect();
            for j in 0..n {
                row.push(num_rational::BigRational::from_integer(if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }));
            }
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).expect("singular matrix");
        a.swap(k, p);
        let inv = a[k][k].recip();
        for x in a[k].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                let (top, rest) = if i < k {
                    let (t, r) = a.split_at_mut(k);
                    (&mut t[i], &r[0])
                } else {
                    let (t, r) = a.split_at_mut(i);
                    (&mut r[0], &t[k])
                };
                for j in 0..2 * n {
                    if !rest[j].is_zero() {
                        top[j] = &top[j] - &f * &rest[j];
                    }
                }
            }
        }
    }
    let d = num_rational::BigRational::from_integer(det.clone());
    let adj = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = &a[i][n + j] * &d;
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    (adj, det)
}

pub fn bigint_matrix_to_i64(m: &[Vec<BigInt>]) -> Option<Matrix> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
        .collect()
}

pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, x, y) with a x + b y = g >= 0
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Basis of the Z-module spanned by `gens` together with `d * Z^n`, in Hermite form.
/// All generators must be integral; `d > 0`.
pub fn module_basis_mod(gens: &[Vec<i64>], n: usize, d: i64) -> Matrix {
    let d = d as i128;
    let mut w: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { d } else { 0 }).collect())
        .collect();
    for g in gens {
        let mut g: Vec<i128> = g.iter().map(|&x| (x as i128).rem_euclid(d)).collect();
        for i in 0..n {
            if g[i] == 0 {
                continue;
            }
            let a = w[i][i];
            let b = g[i];
            let (gg, x, y) = ext_gcd(a, b);
            let (ua, ub) = (a / gg, b / gg);
            // d e_k lies in the module, so entries past the pivot stay reduced mod d
            let red = |j: usize, v: i128| if j > i { v.rem_euclid(d) } else { v };
            let new_wi: Vec<i128> = (0..n).map(|j| red(j, x * w[i][j] + y * g[j])).collect();
            let new_g: Vec<i128> = (0..n).map(|j| red(j, ua * g[j] - ub * w[i][j])).collect();
            w[i] = new_wi;
            g = new_g;
            reduce_tail(&mut w, i, d);
            for j in i + 1..n {
                let p = w[j][j];
                let q = g[j].div_euclid(p);
                if q != 0 {
                    for k in j..n {
                        g[k] = (g[k] - q * w[j][k]).rem_euclid(d);
                    }
                }
            }
        }
    }
    for i in (0..n).rev() {
        reduce_tail(&mut w, i, d);
    }
    w.into_iter()
        .map(|r| r.into_iter().map(|x| x as i64).collect())
        .collect()
}

fn reduce_tail(w: &mut [Vec<i128>], i: usize, d: i128) {
    let n = w.len();
    for j in i + 1..n {
        let p = w[j][j];
        let q = w[i][j].div_euclid(p);
        if q != 0 {
            let rowj = w[j].clone();
            w[i][j] -= q * p;
            for k in j + 1..n {
                w[i][k] = (w[i][k] - q * rowj[k]).rem_euclid(d);
            }
        }
    }
}

/// Basis of the integer kernel `{x in Z^n : A x = 0}` for a `k x n` matrix `A`.
pub fn integer_kernel(a: &Matrix, n: usize) -> Matrix {
    let (u, col) = column_reduce(a, n);
    (col..n)
        .map(|j| (0..n).map(|i| u[i][j]).collect())
        .collect()
}

/// Column operations `A U = [H | 0]` with `U` unimodular; returns `(U, rank)`.
pub fn column_reduce(a: &Matrix, n: usize) -> (Matrix, usize) {
    let k = a.len();
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut col = 0usize;
    for row in 0..k {
        if col >= n {
            break;
        }
        // Gather gcd of m[row][col..] into column `col`.
        loop {
            let nz: Vec<usize> = (col..n).filter(|&j| m[row][j] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&j| m[row][j].abs()).unwrap();
            swap_cols(&mut m, &mut u, col, piv);
            let mut done = true;
            for j in col + 1..n {
                if m[row][j] != 0 {
                    let q = m[row][j].div_euclid(m[row][col]);
                    add_col(&mut m, &mut u, j, col, -q);
                    if m[row][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[row][col] != 0 {
            col += 1;
        }
    }
    let u = u
        .into_iter()
        .map(|r| r.into_iter().map(|x| x as i64).collect())
        .collect();
    (u, col)
}

fn swap_cols(m: &mut [Vec<i128>], u: &mut [Vec<i128>], a: usize, b: usize) {
    if a == b {
        return;
    }
    for r in m.iter_mut() {
        r.swap(a, b);
    }
    for r in u.iter_mut() {
        r.swap(a, b);
    }
}

fn add_col(m: &mut [Vec<i128>], u: &mut [Vec<i128>], dst: usize, src: usize, f: i128) {
    for r in m.iter_mut() {
        r[dst] += f * r[src];
    }
    for r in u.iter_mut() {
        r[dst] += f * r[src];
    }
}

/// Smith normal form `U * A * V = diag(d_1, ..., d_n)` with `d_i | d_{i+1}`.
/// Returns `(diag, U, U^{-1})`; `V` is not needed by callers.
pub fn smith(a: &Matrix) -> (Vec<i64>, Matrix, Matrix) {
    let n = a.len();
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut uinv = u.clone();
    let mut v_dummy: Vec<Vec<i128>> = vec![vec![0; n]; n];
    for t in 0..n {
        loop {
            // pivot: smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if m[i][j] != 0
                        && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            row_swap(&mut m, &mut u, &mut uinv, t, pi);
            swap_cols(&mut m, &mut v_dummy, t, pj);
            let mut clean = true;
            for i in t + 1..n {
                if m[i][t] != 0 {
                    let q = m[i][t].div_euclid(m[t][t]);
                    row_add(&mut m, &mut u, &mut uinv, i, t, -q);
                    if m[i][t] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if m[t][j] != 0 {
                    let q = m[t][j].div_euclid(m[t][t]);
                    add_col(&mut m, &mut v_dummy, j, t, -q);
                    if m[t][j] != 0 {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility condition
            let p = m[t][t];
            let bad = (t + 1..n).find_map(|i| {
                (t + 1..n).find(|&j| m[i][j] % p != 0).map(|j| (i, j))
            });
            match bad {
                Some((i, _)) => row_add(&mut m, &mut u, &mut uinv, t, i, 1),
                None => break,
            }
        }
        if m[t][t] < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
            for r in uinv.iter_mut() {
                r[t] = -r[t];
            }
        }
    }
    let diag = (0..n).map(|i| m[i][i] as i64).collect();
    let cv = |x: Vec<Vec<i128>>| -> Matrix {
        x.into_iter()
            .map(|r| r.into_iter().map(|y| y as i64).collect())
            .collect()
    };
    (diag, cv(u), cv(uinv))
}

fn row_swap(m: &mut [Vec<i128>], u: &mut [Vec<i128>], uinv: &mut [Vec<i128>], a: usize, b: usize) {
    if a == b {
        return;
    }
    m.swap(a, b);
    u.swap(a, b);
    for r in uinv.iter_mut() {
        r.swap(a, b);
    }
}

/// row_dst += f * row_src, keeping `uinv` the inverse of `u`.
fn row_add(
    m: &mut [Vec<i128>],
    u: &mut [Vec<i128>],
    uinv: &mut [Vec<i128>],
    dst: usize,
    src: usize,
    f: i128,
) {
    let n = m[0].len();
    for j in 0..n {
        let s = m[src][j];
        m[dst][j] += f * s;
        let s = u[src][j];
        u[dst][j] += f * s;
    }
    for r in uinv.iter_mut() {
        r[src] -= f * r[dst];
    }
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(a: &Matrix) -> Option<Matrix> {
    let (adj, det) = adjugate(a);
    if det.abs() != BigInt::one() {
        return None;
    }
    let adj = bigint_matrix_to_i64(&adj)?;
    let s = det.to_i64().unwrap();
    Some(
        adj.into_iter()
            .map(|r| r.into_iter().map(|x| x * s).collect())
            .collect(),
    )
}

/// LLL reduction of a positive definite Gram matrix. Returns `(T, T G T^T)`
/// with `T` unimodular. Floating point only steers the choices; the returned
/// Gram matrix is computed exactly.
pub fn lll_gram(g: &Matrix, delta: f64) -> (Matrix, Matrix) {
    let n = g.len();
    let mut t = identity(n);
    let mut gr = g.clone();
    if n <= 1 {
        return (t, gr);
    }
    let mut k = 1usize;
    let mut guard = 0usize;
    let (mut mu, mut b) = gso(&gr, n);
    while k < n {
        guard += 1;
        if guard > 200_000 {
            break;
        }
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                add_row_gram(&mut gr, &mut t, k, j, -qi);
                for l in 0..j {
                    mu[k][l] -= q * mu[j][l];
                }
                mu[k][j] -= q;
            }
        }
        if b[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] - 1e-9 {
            swap_gram(&mut gr, &mut t, k, k - 1);
            let r = gso(&gr, n);
            mu = r.0;
            b = r.1;
            k = if k > 1 { k - 1 } else { 1 };
        } else {
            k += 1;
        }
    }
    (t, gr)
}

fn gso(g: &Matrix, upto: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut mu = vec![vec![0.0f64; upto]; upto];
    let mut b = vec![0.0f64; upto];
    for i in 0..upto {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for l in 0..j {
                s -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i] as f64;
        for l in 0..i {
            s -= mu[i][l] * mu[i][l] * b[l];
        }
        b[i] = s;
        mu[i][i] = 1.0;
    }
    (mu, b)
}

/// b_dst += f * b_src on a Gram matrix and its transformation.
pub fn add_row_gram(g: &mut Matrix, t: &mut Matrix, dst: usize, src: usize, f: i64) {
    let n = g.len();
    // new g[dst][j] = g[dst][j] + f g[src][j]; new g[dst][dst] adds f^2 g[src][src] + 2 f g[dst][src]
    let gss = g[src][src];
    let gds = g[dst][src];
    for j in 0..n {
        if j != dst {
            let v = g[dst][j] + f * g[src][j];
            g[dst][j] = v;
            g[j][dst] = v;
        }
    }
    g[dst][dst] += 2 * f * gds + f * f * gss;
    for j in 0..t[0].len() {
        let s = t[src][j];
        t[dst][j] += f * s;
    }
}

pub fn swap_gram(g: &mut Matrix, t: &mut Matrix, a: usize, b: usize) {
    g.swap(a, b);
    for r in g.iter_mut() {
        r.swap(a, b);
    }
    t.swap(a, b);
}

/// Modular inverse of `a` modulo `m` (m > 1), if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some((x.rem_euclid(m as i128)) as i64)
}

/// Extend a primitive integer vector to a unimodular matrix having it as first row.
pub fn complete_to_unimodular(v: &[i64]) -> Option<Matrix> {
    let n = v.len();
    let (u, _) = column_reduce(&vec![v.to_vec()], n);
    // v * U = (g, 0, ..., 0)
    let img: i128 = (0..n).map(|i| v[i] as i128 * u[i][0] as i128).sum();
    if img.abs() != 1 {
        return None;
    }
    let mut inv = unimodular_inverse(&u)?;
    if img < 0 {
        for x in inv[0].iter_mut() {
            *x = -*x;
        }
    }
    debug_assert_eq!(inv[0], v);
    Some(inv)
}
