use latclass::lattice::*;
use latclass::residue::{self, overlattice};
use latclass::rootsys::*;
use latclass::shortvec::short_vectors;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn desc(s: &str) -> RootSystemDescriptor {
    s.parse().unwrap()
}

#[test]
fn descriptors() {
    for (s, c) in [
        ("E8", "E8"),
        ("D16+", "D16"),
        ("E7+A1", "A1+E7"),
        ("I3", "A3"),
        ("I4", "D4"),
        ("I1", "0"),
        ("<6>", "0"),
        ("D4+A2+2A1", "2A1+A2+D4"),
    ] {
        let (rd, d) = root_data(&standard_lattice(s).unwrap()).unwrap();
        assert_eq!(d.to_string(), c, "{s}");
        assert_eq!(2 * rd.positive.len() as u64, d.root_count(), "{s}");
    }
    assert_eq!(desc("D3+D2").to_string(), "2A1+A3");
    assert_eq!(desc("E6+2D5+3A1").isotypic()[0].1.to_string(), "E6");
}

#[test]
fn simple_roots_and_weyl_vector() {
    for s in ["E8", "D4+A2+2A1", "A5+E6", "I5"] {
        let l = standard_lattice(s).unwrap();
        let (rd, d) = root_data(&l).unwrap();
        assert_eq!(rd.simple.len(), d.rank());
        for (i, a) in rd.simple.iter().enumerate() {
            for b in &rd.simple[i + 1..] {
                assert!(matches!(l.ip(a, b), 0 | -1), "{s}");
            }
            let rho_a: Q64 = rd.weyl_vector.coords.iter().zip(l.apply(a)).map(|(x, y)| x * y).sum::<i64>()
                .into();
            assert_eq!(rho_a / Q64::from(rd.weyl_vector.denom), Q64::from(1), "{s}");
        }
    }
}

#[test]
fn group_constant_examples() {
    let (w, r, h) = group_constants(&desc("A2"));
    assert_eq!((w, r), (BigUint::from(6u32), 6));
    assert_eq!(h[0].1, 3);
    let (w, _, _) = group_constants(&desc("E8"));
    assert_eq!(w, BigUint::from(696729600u64));
    let (w, r, _) = group_constants(&desc("3A1"));
    assert_eq!((w, r), (BigUint::from(8u32), 6));
}

#[test]
fn pair_statistics() {
    for m in 1..7u64 {
        let d = desc(&format!("{m}A1"));
        assert_eq!(d.npr(), m * (m - 1) / 2);
        assert_eq!(d.np(), m * (m - 1) / 2);
    }
    assert_eq!(desc("A1").np(), 0);
    assert_eq!(desc("D4").np(), 2);
    let d = desc("A1+A2");
    assert_eq!(d.np(), 1);
    assert_eq!(d.m1(), 2);
    let a1 = Irreducible::normalized(Family::A, 1).unwrap()[0];
    let a2 = Irreducible::normalized(Family::A, 2).unwrap()[0];
    assert!(d.is_relevant((a1, 0), (a2, 1)));
}

/// Every descriptor with an orthogonal root pair also has a relevant one.
#[test]
fn orthogonal_pairs_imply_relevant_pairs() {
    for s in ["2A1", "A1+A2", "A3", "A2+D4", "2A2+A1", "3A2", "D5", "A1+2A3", "E6+A1", "2D4", "A4+2A1"] {
        let d = desc(s);
        let q = d.root_lattice();
        let (rd, d2) = root_data(&q).unwrap();
        assert_eq!(d2, d);
        let roots = rd.all_roots();
        let mut orth = 0;
        let mut relevant = 0;
        for (i, a) in roots.iter().enumerate() {
            for b in &roots[i + 1..] {
                if q.ip(a, b) == 0 {
                    orth += 1;
                    relevant += rd.is_relevant_pair(&d, a, b) as usize;
                }
            }
        }
        assert_eq!(orth > 0, d.np() > 0, "{s}");
        assert!(orth == 0 || relevant > 0, "{s}");
        assert_eq!(relevant > 0, d.npr() > 0, "{s}");
    }
}

#[test]
fn fertile_examples() {
    let f = fertile_classes(&desc("A5")).unwrap();
    let exts: Vec<String> = f.iter().map(|c| c.extension.to_string()).collect();
    for want in ["A6", "D6", "E6"] {
        assert!(exts.iter().any(|e| e == want), "{exts:?}");
    }
    let f = fertile_classes(&desc("3A1")).unwrap();
    let top = f.iter().find(|c| c.nu == Q64::new(3, 2)).unwrap();
    assert_eq!(top.extension.to_string(), "D4");
    let f = fertile_classes(&desc("A2")).unwrap();
    assert!(f.iter().filter(|c| c.nu != Q64::from(0)).all(|c| c.nu == Q64::new(2, 3)));
    assert_eq!(f.iter().filter(|c| c.nu == Q64::new(2, 3)).count(), 2);
}

/// The marked-node rule and the explicit extension lattice agree for irreducible R of rank at most 7.
#[test]
fn fertile_extensions_match_diagrams() {
    let mut names: Vec<String> = (1..=7).map(|r| format!("A{r}")).collect();
    names.extend((4..=7).map(|r| format!("D{r}")));
    names.extend(["E6".to_string(), "E7".to_string()]);
    for s in names {
        let d = desc(&s);
        for f in fertile_classes(&d).unwrap() {
            assert!(f.nu < Q64::from(2));
            assert_eq!(f.class_rep.norm(&d.root_lattice()), f.nu);
            assert_eq!(extension_by_diagram(&d, &f.attach_node).unwrap(), f.extension, "{s}");
        }
    }
}

#[test]
fn embedding_orbits() {
    let o = root_embedding_orbits(&desc("A3"), &desc("D5"), 100_000_000).unwrap();
    assert_eq!(o.len(), 2);
    let o = root_embedding_orbits(&desc("A3"), &desc("A4"), 100_000_000).unwrap();
    assert_eq!(o.len(), 1);
    let o = root_embedding_orbits(&desc("A7"), &desc("E8"), 100_000_000).unwrap();
    assert_eq!(o.len(), 2);
    assert_eq!(o.iter().filter(|e| !e.saturated).count(), 1);
}

fn random_descriptor<R: Rng>(rng: &mut R) -> RootSystemDescriptor {
    let mut parts = Vec::new();
    let mut left = rng.gen_range(1..=8usize);
    while left > 0 {
        let r = rng.gen_range(1..=left);
        let fam = match rng.gen_range(0..3) {
            1 if r >= 4 => "D",
            2 if (6..=8).contains(&r) => "E",
            _ => "A",
        };
        parts.push(format!("{fam}{r}"));
        left -= r;
    }
    parts.join("+").parse().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn glued_root_lattices_count_roots(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_descriptor(&mut rng);
        let q = d.root_lattice();
        let res = residue::residue(&q);
        let subs = res.isotropic_subgroups(true).unwrap();
        let h = &subs[rng.gen_range(0..subs.len())];
        let gens: Vec<DualVector> = h.iter().map(|x| res.lift(x)).collect();
        let l = overlattice(&q, &gens, true).unwrap().lattice;
        let (_, got) = root_data(&l).unwrap();
        prop_assert_eq!(got.root_count() as usize, short_vectors(&l, 2).unwrap().r(2));
    }
}
