mod common;

use common::*;
use latclass::isometry::*;
use latclass::lattice::*;
use latclass::linalg::{self, Matrix};
use latclass::mod2::*;
use latclass::shortvec::short_vectors;
use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn automorphism_orders() {
    for (name, ord) in [
        ("A2", 12u128),
        ("D4", 1152),
        ("I3", 48),
        ("I5", 3840),
        ("E6", 103680),
        ("E7", 2903040),
        ("A1+A1", 8),
    ] {
        let l = standard_lattice(name).unwrap();
        let g = automorphisms(&l).unwrap();
        assert!(g.verify(&l), "{name}");
        assert_eq!(g.order_u128(), Some(ord), "{name}");
    }
    let e8 = e_n(8);
    let g = automorphisms(&e8).unwrap();
    let (w, _, _) = latclass::rootsys::group_constants(&"E8".parse().unwrap());
    assert_eq!(g.order, w);
    assert_eq!(g.order, BigUint::from(696729600u64));
}

#[test]
fn isometry_examples() {
    let g = isometry(&a_n(3), &d_n(3)).unwrap().expect("A3 and D3 are isometric");
    assert!(check_isometry(&a_n(3), &d_n(3), &g));
    assert!(isometry(&e_n(8), &i_n(8)).unwrap().is_none());
    let d16 = standard_lattice("D16+").unwrap();
    let i16 = i_n(16);
    assert!(isometry(&i16, &d16).unwrap().is_none());
    assert!(isometry(&e_n(8).direct_sum(&e_n(8)), &d16).unwrap().is_none());
}

#[test]
fn reduced_orders() {
    assert_eq!(reduced_order(&e_n(8)).unwrap().reduced_order, BigUint::from(1u32));
    let r = reduced_order(&i_n(3)).unwrap();
    assert_eq!((r.full_order(), r.weyl_order.clone(), r.reduced_order), (48u32.into(), 24u32.into(), 2u32.into()));
    for name in ["I1", "I5", "I1+E8", "I3+E8", "I7"] {
        let r = reduced_order(&standard_lattice(name).unwrap()).unwrap();
        assert!((&r.reduced_order % 2u32).is_zero(), "{name}");
    }
}

#[test]
fn good_bases() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let i8 = scramble(&i_n(8), &mut rng);
    let (t, m) = good_basis(&i8, 1);
    assert_eq!(m, i8.sublattice(&t).unwrap());
    assert!((0..8).all(|i| m.entry(i, i) == 1));
    let e8 = scramble(&e_n(8), &mut rng);
    let (_, m) = good_basis(&e8, 1);
    assert!((0..8).all(|i| m.entry(i, i) == 2));
    let (_, m) = good_basis(&a_n(4), 1);
    assert!((0..4).all(|i| m.entry(i, i) == 2));
}

#[test]
fn mod2_examples() {
    let o = orbits_mod2(&[linalg::identity(2)], 2).unwrap();
    assert_eq!(o.sizes, vec![1, 1, 1, 1]);
    let gl2 = vec![vec![vec![1, 1], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]];
    let o = orbits_mod2(&gl2, 2).unwrap();
    assert_eq!(o.sizes, vec![1, 3]);
    let g = automorphisms(&e_n(8)).unwrap();
    let mut s = orbits_mod2(&g.generators, 8).unwrap().sizes;
    s.sort();
    assert_eq!(s, vec![1, 120, 135]);
}

#[test]
fn vector_orbit_examples() {
    let e8 = e_n(8);
    let g = automorphisms(&e8).unwrap();
    let v = short_vectors(&e8, 6).unwrap();
    let six: Vec<Vec<i64>> = v.all_vectors().into_iter().filter(|x| e8.norm(x) == 6).collect();
    let o = vector_orbits(&g.generators, &six).unwrap();
    assert_eq!(o.sizes, vec![6720]);
    let a2 = a_n(2);
    let g = automorphisms(&a2).unwrap();
    let roots = short_vectors(&a2, 2).unwrap().all_vectors();
    assert_eq!(vector_orbits(&g.generators, &roots).unwrap().sizes, vec![6]);
    let o = vector_orbits(&[], &roots).unwrap();
    assert_eq!(o.representatives.len(), 6);
}

#[test]
fn mod2_matches_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=12usize {
        for _ in 0..3 {
            let k = rng.gen_range(1..=3);
            let gens: Vec<Matrix> = (0..k)
                .map(|_| {
                    // sparse perturbations of permutations keep orbits nontrivial
                    let mut p: Vec<usize> = (0..n).collect();
                    for i in (1..n).rev() {
                        p.swap(i, rng.gen_range(0..=i));
                    }
                    let mut m = vec![vec![0i64; n]; n];
                    for i in 0..n {
                        m[i][p[i]] = 1;
                    }
                    if n > 1 && rng.gen_bool(0.5) {
                        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
                        if i != j {
                            for c in 0..n {
                                m[i][c] += m[j][c];
                            }
                        }
                    }
                    m
                })
                .collect();
            let fast = orbits_mod2(&gens, n).unwrap();
            let slow = closure_orbits(&gens, n);
            assert_eq!(fast.representatives.len(), slow.len(), "n={n}");
            assert_eq!(fast.total, 1 << n);
            for (r, s) in fast.representatives.iter().zip(&fast.sizes) {
                let orbit = slow.iter().find(|o| o.contains(r)).unwrap();
                assert_eq!(orbit.len(), *s);
                assert_eq!(orbit.iter().next(), Some(r));
            }
        }
    }
}

#[test]
fn orders_match_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in 0..60 {
        let n = 1 + k % 5;
        let l = random_gram(n, &mut rng);
        let l = l.lll().1;
        let g = automorphisms(&l).unwrap();
        assert!(g.verify(&l));
        assert_eq!(g.order_u128(), Some(exhaustive_order(&l) as u128), "{:?}", l.gram());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn generators_are_isometries(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_gram(n, &mut rng);
        let g = automorphisms(&l).unwrap();
        for m in &g.generators {
            prop_assert!(check_isometry(&l, &l, m));
            let d = linalg::det_bigint(m);
            prop_assert!(d == 1.into() || d == (-1).into());
        }
        let vs = short_vectors(&l, 4).unwrap().all_vectors();
        let o = vector_orbits(&g.generators, &vs).unwrap();
        for s in o.sizes {
            prop_assert!((&g.order % BigUint::from(s)).is_zero());
        }
    }

    #[test]
    fn scrambled_copies_are_isometric(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_gram(n, &mut rng);
        let m = scramble(&l, &mut rng);
        let g = isometry(&l, &m).unwrap();
        prop_assert!(g.is_some());
        prop_assert!(check_isometry(&l, &m, g.as_ref().unwrap()));
    }
}
