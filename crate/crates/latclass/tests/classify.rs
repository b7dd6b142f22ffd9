mod common;

use std::sync::OnceLock;

use common::*;
use latclass::classify::*;
use latclass::isometry::{automorphisms, is_isometric, vector_orbits};
use latclass::lattice::*;
use latclass::shortvec::{dual_short_vectors, is_primitive};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn uni() -> &'static UnimodularClassification {
    static U: OnceLock<UnimodularClassification> = OnceLock::new();
    U.get_or_init(|| classify_unimodular(UnimodularOptions { max_rank: 13, ..Default::default() }).unwrap())
}

fn record(name: &str) -> ClassRecord {
    ClassRecord::unimodular(standard_lattice(name).unwrap(), name).unwrap()
}

fn factorial(n: u64) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

#[test]
fn small_ranks() {
    let u = uni();
    assert_eq!(u.counts(), vec![1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3]);
    assert_eq!(u.unresolved(), 0);
    let x8: Vec<String> = u.no_units[8].iter().map(|c| c.root_system.to_string()).collect();
    assert_eq!(x8, vec!["E8"]);
    for c in &u.all[8] {
        let want = if c.lattice.is_even() {
            BigUint::from(696_729_600u64)
        } else {
            BigUint::from(256u32) * factorial(8)
        };
        assert_eq!(c.aut_order, want);
    }
    for n in 1..=10 {
        for c in &u.all[n] {
            assert_eq!(c.lattice.det(), 1);
            assert_eq!(c.aut_order, automorphisms(&c.lattice).unwrap().order);
        }
    }
}

#[test]
fn dedup_merges_scrambled_copies() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let e8 = e_n(8);
    let cands: Vec<Candidate> = (0..3)
        .map(|k| Candidate::new(scramble(&e8, &mut rng), format!("e8.{k}"), "bv3", latclass::invariants::bv3).unwrap())
        .collect();
    let out = dedup(cands).unwrap();
    assert_eq!((out.classes.len(), out.merged, out.collisions), (1, 2, 0));
}

#[test]
fn dedup_survives_forced_collisions() {
    let cands: Vec<Candidate> = ["I16", "D16+", "2E8"]
        .iter()
        .map(|s| Candidate::new(standard_lattice(s).unwrap(), *s, "bv3", latclass::invariants::bv3).unwrap())
        .collect();
    let out = dedup_by(cands, |_| 0u8).unwrap();
    assert_eq!(out.classes.len(), 3);
    assert_eq!(out.collisions, 2);
    assert_eq!(out.merged, 0);
}

#[test]
fn kneser_examples() {
    let e8 = kneser_neighbor(&i_n(8), 2, &[1; 8]).unwrap();
    assert!(is_isometric(&e8, &e_n(8)).unwrap());
    assert_eq!(kneser_neighbor(&i_n(5), 1, &[1, 0, 0, 0, 0]).unwrap(), i_n(5));
    let m = kneser_neighbor(&i_n(12), 3, &[1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap();
    assert_eq!(m.det(), 1);
    assert_eq!(m.rank(), 12);
    let d12 = kneser_neighbor(&i_n(12), 2, &[1; 12]).unwrap();
    assert!(is_isometric(&d12, &standard_lattice("D12+").unwrap()).unwrap());
    assert!(kneser_neighbor(&a_n(2), 2, &[1, 0]).is_err());
    // both are 2-neighbors of each other inside Q^8, scaled by 2
    let b1: Vec<Vec<i64>> = (0..8).map(|i| (0..8).map(|j| if i == j { 2 } else { 0 }).collect()).collect();
    let mut b2: Vec<Vec<i64>> = vec![vec![1, -1, -1, -1, -1, -1, -1, 1], vec![2, 2, 0, 0, 0, 0, 0, 0]];
    b2.extend((1..7).map(|k| (0..8).map(|j| if j == k { 2 } else if j == k - 1 { -2 } else { 0 }).collect()));
    assert!(is_d_neighbor(&b1, &b2, 8, 2));
}

#[test]
fn neighbor_search_filters() {
    let filter = NeighborFilter { root_system: None, no_units: true };
    let found = neighbor_search(&i_n(12), 3, 400, &filter, 1).unwrap();
    assert!(!found.is_empty());
    for l in &found {
        assert_eq!(r1(l).unwrap(), 0);
        assert!(is_isometric(l, &standard_lattice("D12+").unwrap()).unwrap());
    }
}

#[test]
fn large_d_neighbors() {
    let found = neighbor_search(&i_n(29), 101, 60, &NeighborFilter::default(), 3).unwrap();
    assert!(!found.is_empty());
    for l in &found {
        assert_eq!((l.rank(), l.det()), (29, 1));
    }
}

#[test]
fn orbit_method_examples() {
    let mut e8 = vec![record("E8")];
    let run = orbit_method(&mut e8, TypeTag::plain(2), &GenusSymbol::gnp(7, 1), OrbitMethodOptions::default()).unwrap();
    assert_eq!(run.outputs.len(), 1);
    assert!(is_isometric(&run.outputs[0].lattice, &e_n(7)).unwrap());
    assert!(run.conserved());
    let six = GenusSymbol { rank: 7, kind: GenusKind::EvenDet(6) };
    let run = orbit_method(&mut e8, TypeTag::plain(6), &six, OrbitMethodOptions::default()).unwrap();
    assert_eq!(run.orbits_per_source, vec![1]);
    assert_eq!(run.outputs[0].root_system.to_string(), "A1+E6");
    assert!(run.conserved());
    let mut a2 = vec![record("A2")];
    let run = orbit_method(&mut a2, TypeTag::sp(6), &GenusSymbol::gnp(1, 1), OrbitMethodOptions::default()).unwrap();
    assert_eq!(run.outputs.len(), 1);
    assert!(is_isometric(&run.outputs[0].lattice, &a_n(1)).unwrap());
    assert!(run.conserved());
    assert!(orbit_method(&mut a2, TypeTag::plain(2), &GenusSymbol::gnp(1, 1), OrbitMethodOptions::default()).is_err());
}

#[test]
fn dominant_and_direct_strategies_agree() {
    let mut src = vec![record("2E8"), record("D16+")];
    let target = GenusSymbol::gnp(15, 1);
    let runs: Vec<OrbitMethodRun> = [OrbitStrategy::Direct, OrbitStrategy::Dominant]
        .into_iter()
        .map(|strategy| {
            orbit_method(&mut src, TypeTag::plain(2), &target, OrbitMethodOptions { strategy, ..Default::default() })
                .unwrap()
        })
        .collect();
    assert_eq!(root_systems(&runs[0].outputs), root_systems(&runs[1].outputs));
    assert_eq!(runs[0].input_weight, runs[1].input_weight);
    assert!(runs.iter().all(OrbitMethodRun::conserved));
    assert_eq!(runs[0].outputs.len(), 2);
}

#[test]
fn small_genera() {
    let u = uni();
    let mut cache = GenusClassification::default();
    let opts = OrbitMethodOptions::default();
    for (n, p, want) in [(2, 3, 1), (6, 3, 1), (1, 3, 1), (3, 3, 1), (4, 5, 1), (8, 5, 1), (1, 5, 1), (5, 5, 1), (2, 7, 1), (6, 7, 1), (3, 7, 1)] {
        let g = GenusSymbol::gnp(n, p);
        assert!(unimodular_rank_needed(&g) <= 13, "{g}");
        let list = classify_genus(&g, u, &mut cache, opts).unwrap();
        assert_eq!(list.len(), want, "{g}");
        for c in &list {
            assert!(g.contains(&c.lattice));
        }
    }
    assert!(cache.runs.iter().all(OrbitMethodRun::conserved));
    assert!(classify_genus(&GenusSymbol::gnp(4, 3), u, &mut cache, opts).unwrap().is_empty());
}

#[test]
fn exceptional_vectors() {
    let reps = exceptional_report(&[record("I4"), record("D12+"), record("E8")]).unwrap();
    assert_eq!((reps[0].exc_count, reps[0].orbits), (16, 2));
    assert_eq!((reps[1].exc_count, reps[1].orbits), (24, 1));
    assert!(reps[1].transitive());
    assert_eq!((reps[2].exc_count, reps[2].orbits), (1, 1));
}

#[test]
fn triplication_of_i14() {
    let l = i_n(14);
    let mut alpha = vec![0; 14];
    alpha[0] = 1;
    alpha[1] = 1;
    let t = triplicate(&l, &alpha).unwrap();
    assert!(t.all_two_neighbors());
    assert_eq!(t.lattices.len(), 3);
    assert!(is_isometric(&t.lattices[t.source_index], &l).unwrap());
    for m in &t.lattices {
        assert_eq!((m.rank(), m.det()), (14, 1));
    }
    assert!(triplicate(&i_n(13), &alpha[..13]).is_err());
}

#[test]
fn audits() {
    let u = uni();
    let want = BigRational::new(BigInt::one(), BigInt::from(696_729_600u64))
        + BigRational::new(BigInt::one(), BigInt::from(BigUint::from(256u32) * factorial(8)));
    let rep = genus_audit(&u.all[8], Some(2), Some(want.clone()), None);
    assert!(rep.passed());
    assert!(!genus_audit(&u.all[8], Some(3), Some(want), None).passed());
    assert!(genus_audit(&u.all[11.min(u.all.len() - 1)], None, None, None).distinct_invariants);
    assert!(genus_audit(&[], Some(0), None, None).passed());
    let table = parse_mass_table("E8 1/696729600 # even\nA1 1/1\n").unwrap();
    let rep = genus_audit(&u.all[8], None, None, Some(&table));
    assert!(rep.table_mismatches.contains(&"A1".to_string()));
    assert!(parse_mass_table("E8 1/0").is_err());
}

#[test]
fn even_unimodular_masses() {
    let b = bernoulli(6);
    assert_eq!(b[2], BigRational::new(1.into(), 6.into()));
    assert_eq!(b[4], BigRational::new((-1).into(), 30.into()));
    assert_eq!(b[6], BigRational::new(1.into(), 42.into()));
    let e8 = BigUint::from(696_729_600u64);
    assert_eq!(unimodular_mass(8).unwrap(), BigRational::new(1.into(), BigInt::from(e8.clone())));
    // II_16 = E8+E8 and D16+
    let m16 = BigRational::new(1.into(), BigInt::from(&e8 * &e8 * 2u32))
        + BigRational::new(1.into(), BigInt::from(BigUint::from(1u32 << 15) * factorial(16)));
    assert_eq!(unimodular_mass(16).unwrap(), m16);
    assert!(unimodular_mass(12).is_none());
}

#[test]
fn extension_masses_balance() {
    let u = uni();
    for n in 0..=8 {
        let (lhs, rhs) = extension_mass_identity(&u.all[n], &u.all[n + 2]).unwrap();
        assert_eq!(lhs, rhs, "n = {n}");
    }
}

/// Even lattices `M` with residue opposite to that of `A4` (ranks 4 and 12) have at
/// most two orbits of primitive dual vectors of norm 6/5.
#[test]
fn at_most_two_orbits_on_norm_six_fifths() {
    let u = uni();
    let mut cache = GenusClassification::default();
    let mut lattices = vec![a_n(4)];
    for c in classify_genus(&GenusSymbol::gnp(12, 5), u, &mut cache, OrbitMethodOptions::default()).unwrap() {
        lattices.push(c.lattice);
    }
    assert_eq!(lattices.len(), 3);
    for m in &lattices {
        let vs: Vec<Vec<i64>> = dual_short_vectors(m, Q64::new(6, 5))
            .unwrap()
            .into_iter()
            .filter(|v| v.norm(m) == Q64::new(6, 5))
            .filter(|v| {
                let y: Vec<i64> = m.apply(&v.coords).iter().map(|c| c / v.denom).collect();
                is_primitive(&y)
            })
            .map(|v| v.coords.iter().map(|c| c * 5 / v.denom).collect())
            .collect();
        assert!(!vs.is_empty());
        let g = automorphisms(m).unwrap();
        let orb = vector_orbits(&g.generators, &vs).unwrap();
        assert!(orb.representatives.len() <= 2, "{:?}", m.gram());
    }
}
