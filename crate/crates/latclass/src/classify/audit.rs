//! Mass bookkeeping: totals, per-root-system reduced masses and reference values.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ClassRecord;
use crate::error::{Error, Result};
use crate::mod2;
use crate::rootsys;

/// Mass of the genus of rank 29 unimodular lattices.
pub const RANK29_MASS: (&str, &str) = (
    "9683137883598841522700149306218386019856601",
    "65188542827444074570459172044800000000",
);

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub count: usize,
    pub mass: BigRational,
    pub expected_count: Option<usize>,
    pub expected_mass: Option<BigRational>,
    /// Root system to (number of classes, sum of reduced masses).
    pub by_root_system: BTreeMap<String, (usize, BigRational)>,
    /// Root systems whose reduced mass differs from a supplied table.
    pub table_mismatches: Vec<String>,
    pub distinct_invariants: bool,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.expected_count.map_or(true, |c| c == self.count)
            && self.expected_mass.as_ref().map_or(true, |m| m == &self.mass)
            && self.table_mismatches.is_empty()
            && self.distinct_invariants
    }
}

pub fn genus_audit(
    classes: &[ClassRecord],
    expected_count: Option<usize>,
    expected_mass: Option<BigRational>,
    table: Option<&BTreeMap<String, BigRational>>,
) -> AuditReport {
    let mass = super::total_mass(classes);
    let mut by_root: BTreeMap<String, (usize, BigRational)> = BTreeMap::new();
    for c in classes {
        let e = by_root.entry(c.root_system.to_string()).or_insert((0, BigRational::zero()));
        e.0 += 1;
        e.1 += c.reduced_mass();
    }
    let mut table_mismatches = Vec::new();
    if let Some(t) = table {
        for (k, v) in t {
            let ours = by_root.get(k).map(|x| x.1.clone()).unwrap_or_else(BigRational::zero);
            if &ours != v {
                table_mismatches.push(k.clone());
            }
        }
        for k in by_root.keys() {
            if !t.contains_key(k) {
                table_mismatches.push(k.clone());
            }
        }
    }
    let mut keys: Vec<_> = classes.iter().map(|c| (c.key(), c.bv.clone())).map(|(k, _)| k).collect();
    keys.sort();
    let distinct_invariants = keys.windows(2).all(|w| w[0] != w[1]);
    AuditReport {
        count: classes.len(),
        mass,
        expected_count,
        expected_mass,
        by_root_system: by_root,
        table_mismatches,
        distinct_invariants,
    }
}

/// Parses `p/q` or an integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (a, b) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let a: BigInt = a.parse().ok()?;
    let b: BigInt = b.parse().ok()?;
    if b.is_zero() || b.is_negative() {
        return None;
    }
    Some(BigRational::new(a, b))
}

/// Lines `root-system rational`; `#` starts a comment.
pub fn parse_mass_table(text: &str) -> Result<BTreeMap<String, BigRational>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(r), Some(q), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse { line: i + 1, msg: "expected `root-system rational`".into() });
        };
        let desc: rootsys::RootSystemDescriptor = r
            .parse()
            .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad root system {r:?}") })?;
        let q = parse_rational(q)
            .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("bad rational {q:?}") })?;
        out.insert(desc.to_string(), q);
    }
    Ok(out)
}

/// Bernoulli numbers `B_0..=B_m` (with `B_1 = -1/2`).
pub fn bernoulli(m: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::zero(); m + 1];
    b[0] = BigRational::one();
    for k in 1..=m {
        // sum_{j<=k} C(k+1, j) B_j = 0
        let mut s = BigRational::zero();
        let mut c = BigInt::one();
        for (j, bj) in b.iter().enumerate().take(k) {
            s += BigRational::from(c.clone()) * bj;
            c = c * BigInt::from(k + 1 - j) / BigInt::from(j + 1);
        }
        b[k] = -s / BigRational::from(BigInt::from(k + 1));
    }
    b
}

/// Mass of the genus of even unimodular lattices of rank `n` (`8 | n`):
/// `|B_{n/2}|/n * prod_{j < n/2} |B_{2j}|/(4j)`.
pub fn unimodular_mass(n: usize) -> Option<BigRational> {
    if n == 0 {
        return Some(BigRational::one());
    }
    if n % 8 != 0 {
        return None;
    }
    let k = n / 2;
    let b = bernoulli(2 * k);
    let mut m = b[k].abs() / BigRational::from(BigInt::from(n));
    for j in 1..k {
        m *= b[2 * j].abs() / BigRational::from(BigInt::from(4 * j));
    }
    Some(m)
}

/// Number of `e` in `L/2L` with `e.e = 2 mod 4`.
pub fn count_admissible_mod2(gram: &[Vec<i64>]) -> u64 {
    let n = gram.len();
    let g = gram.to_vec();
    (0u32..1 << n).filter(|&x| mod2::norm_mod4(&g, x) == 2).count() as u64
}

/// Unordered pairs of orthogonal roots `{a, b}` (signs counted) with `(a+b)/2` not in `L`.
pub fn saturated_orthogonal_pairs(l: &crate::lattice::Lattice) -> Result<u64> {
    let (rd, _) = rootsys::root_data(l)?;
    let roots = rd.all_roots();
    let mut k = 0u64;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if l.ip(&roots[i], &roots[j]) == 0
                && roots[i].iter().zip(&roots[j]).any(|(a, b)| (a + b) % 2 != 0)
            {
                k += 1;
            }
        }
    }
    Ok(k)
}

/// Both sides of the mass identity between rank `n` pairs `(L, e)` and rank `n+2`
/// pairs `(U, {a, b})`: `sum N(L)/|O(L)| = sum P(U)/|O(U)|`.
pub fn extension_mass_identity(
    rank_n: &[ClassRecord],
    rank_n2: &[ClassRecord],
) -> Result<(BigRational, BigRational)> {
    let mut lhs = BigRational::zero();
    for c in rank_n {
        let k = if c.rank() == 0 { 0 } else { count_admissible_mod2(&c.lattice.gram()) };
        lhs += BigRational::new(BigInt::from(k), BigInt::from(c.aut_order.clone()));
    }
    let mut rhs = BigRational::zero();
    for c in rank_n2 {
        let k = saturated_orthogonal_pairs(&c.lattice)?;
        rhs += BigRational::new(BigInt::from(k), BigInt::from(c.aut_order.clone()));
    }
    Ok((lhs, rhs))
}
