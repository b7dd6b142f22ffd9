mod common;

use common::*;
use latclass::invariants::*;
use latclass::isometry::{automorphisms, is_isometric, reduced_order};
use latclass::lattice::*;
use latclass::mod2::orbits_mod2;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn separates_i9_from_i1_e8() {
    let a = bv3(&standard_lattice("I9").unwrap()).unwrap();
    let b = bv3(&standard_lattice("I1+E8").unwrap()).unwrap();
    assert_ne!(a.value, b.value);
    assert_eq!(a.hex().len(), 16);
}

#[test]
fn invariant_under_basis_change() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in ["E8", "D5", "I1+A2", "A4"] {
        let l = standard_lattice(name).unwrap();
        let want = bv3(&l).unwrap();
        let want_abs = bv(&l, &BVParams::depth(3).with_variant(Variant::Absolute)).unwrap();
        for _ in 0..25 {
            let m = scramble(&l, &mut rng);
            assert_eq!(bv3(&m).unwrap().value, want.value, "{name}");
            let h = bv(&m, &BVParams::depth(3).with_variant(Variant::Absolute)).unwrap();
            assert_eq!(h.value, want_abs.value, "{name}");
        }
    }
}

#[test]
fn marking_is_seen() {
    let i2 = i_n(2);
    let a = bv(&i2, &BVParams::depth(3).with_marking(vec![vec![1, 0]])).unwrap();
    let b = bv(&i2, &BVParams::depth(3).with_marking(vec![vec![1, 1]])).unwrap();
    let c = bv(&i2, &BVParams::depth(3).with_marking(vec![vec![0, -1]])).unwrap();
    assert_ne!(a.value, b.value);
    assert_eq!(a.value, c.value);
    assert!(bv(&i2, &BVParams::depth(1)).is_err());
}

/// Dense reference: vertices from a box scan, `M` and `M^2` with plain loops.
fn reference(l: &latclass::Lattice, params: &BVParams) -> u64 {
    let mut verts: Vec<Vec<i64>> = brute_short(l, params.depth).into_iter().map(|(v, _)| v).collect();
    if params.variant != Variant::Signed {
        verts.retain(|v| v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0));
    }
    let nv = verts.len();
    let m: Vec<Vec<i64>> = (0..nv)
        .map(|i| {
            (0..nv)
                .map(|j| {
                    let x = l.ip(&verts[i], &verts[j]);
                    match params.variant {
                        Variant::Parity => x.rem_euclid(2),
                        Variant::Absolute => x.abs(),
                        Variant::Signed => x,
                    }
                })
                .collect()
        })
        .collect();
    let mut recs: Vec<VertexRecord> = (0..nv)
        .map(|i| {
            let mut col: Vec<i64> = (0..nv).map(|j| (0..nv).map(|k| m[j][k] * m[k][i]).sum()).collect();
            let mut mark: Vec<i64> = params.marking.iter().map(|a| l.ip(a, &verts[i])).collect();
            if params.variant != Variant::Signed {
                Lattice::sign_normalize(&mut mark);
            }
            VertexRecord { column: column_hash(&mut col), mark }
        })
        .collect();
    hash_records(&mut recs, params)
}

#[test]
fn matches_dense_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in 0..60 {
        let n = 1 + k % 4;
        let l = random_gram(n, &mut rng);
        let variant = [Variant::Parity, Variant::Absolute, Variant::Signed][k % 3];
        let mut params = BVParams::depth(2 + (k % 4) as i64).with_variant(variant);
        if k % 2 == 0 {
            let mut e = vec![0; n];
            e[0] = 1;
            params = params.with_marking(vec![e]);
        }
        assert_eq!(bv(&l, &params).unwrap().value, reference(&l, &params), "{:?}", l.gram());
    }
}

#[test]
fn genus_invariants() {
    // A4 glued to <5> along the full residue is the odd unimodular lattice I5
    let a4 = a_n(4);
    let five = companion(4, 5).unwrap().unwrap();
    let (u, mark) = glue_marked(&a4, &five).unwrap();
    assert!(is_isometric(&u, &i_n(5)).unwrap());
    assert_eq!(mark.len(), 1);
    assert_eq!(u.norm(&mark[0]), 5);
    let h = bv_np(&a4, 5, &[GenusInvariant::Bv1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h2 = bv_np(&scramble(&a4, &mut rng), 5, &[GenusInvariant::Bv1]).unwrap();
    assert_eq!(h[0].value, h2[0].value);

    let a2 = a_n(2);
    let (u, _) = glue_marked(&a2, &companion(2, 3).unwrap().unwrap()).unwrap();
    assert_eq!(u.det(), 1);
    assert!(bv_np(&a2, 3, &[GenusInvariant::Bv1]).is_ok());
    assert!(companion(4, 3).unwrap().is_none());
    assert_eq!("bv1+flat24".split('+').map(|s| s.parse::<GenusInvariant>().unwrap()).count(), 2);
}

#[test]
fn e8_mod2_orbits() {
    let e8 = e_n(8);
    let g = automorphisms(&e8).unwrap();
    let o = orbits_mod2(&g.generators, 8).unwrap();
    let mut s = o.sizes.clone();
    s.sort();
    assert_eq!(s, vec![1, 120, 135]);
}

#[test]
fn reduced_orders() {
    for (s, r) in [("E8", 1u64), ("I3", 2), ("D16+", 1), ("I1+E8", 2), ("A2", 2), ("I2", 2)] {
        let g = reduced_order(&standard_lattice(s).unwrap()).unwrap();
        assert_eq!(g.reduced_order, BigUint::from(r), "{s}");
        let full = automorphisms(&standard_lattice(s).unwrap()).unwrap().order;
        assert_eq!(g.full_order(), full, "{s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bv_is_a_class_invariant(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_gram(n, &mut rng);
        let m = scramble(&l, &mut rng);
        prop_assert_eq!(bv3(&l).unwrap().value, bv3(&m).unwrap().value);
    }
}
