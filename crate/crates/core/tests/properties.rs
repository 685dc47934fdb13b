use std::collections::BTreeMap;
use std::sync::OnceLock;

use fusion_core::associator::{gauge_transform, nontrivial_keys, pentagon_check, AssociatorSet, Gauge};
use fusion_core::braiding::{hexagon_check, search_braidings, RSymbolSet, BRAIDING_BUDGET};
use fusion_core::cyclotomic::Cyclotomic;
use fusion_core::fusion_ring::{enumerate_rings, FusionRing, RingConstraints};
use fusion_core::io::{fixture_name, fixtures_dir, parse, serialize, CategoryFile};
use fusion_core::matrix::Matrix;
use fusion_core::pentagon_solver::invariants;
use fusion_core::reference::reference_solution;
use proptest::prelude::*;

mod common;

use common::*;

fn close(a: num_complex::Complex64, b: num_complex::Complex64) -> bool {
    (a - b).norm() < 1e-9 * (1.0 + a.norm())
}

proptest! {
    #[test]
    fn field_axioms(a in element(), b in element(), c in element()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Cyclotomic::zero());
        prop_assert_eq!(&a * &Cyclotomic::one(), a.clone());
    }

    #[test]
    fn inverses(a in nonzero()) {
        let inv = a.inv().unwrap();
        prop_assert!((&a * &inv).is_one());
        prop_assert_eq!(&Cyclotomic::one() / &a, inv);
    }

    #[test]
    fn embedding_is_a_ring_map(a in element(), b in element()) {
        prop_assert!(close((&a * &b).embed_numeric(), a.embed_numeric() * b.embed_numeric()));
        prop_assert!(close((&a + &b).embed_numeric(), a.embed_numeric() + b.embed_numeric()));
    }

    #[test]
    fn galois_maps_are_automorphisms(a in element(), b in element()) {
        for k in [1, 5, 7, 11] {
            prop_assert_eq!((&a * &b).galois(k).unwrap(), &a.galois(k).unwrap() * &b.galois(k).unwrap());
            prop_assert_eq!((&a + &b).galois(k).unwrap(), &a.galois(k).unwrap() + &b.galois(k).unwrap());
            // order two, so the group is Klein four
            prop_assert_eq!(a.galois(k).unwrap().galois(k).unwrap(), a.clone());
        }
        prop_assert_eq!(a.galois(5).unwrap().galois(7).unwrap(), a.galois(11).unwrap());
        prop_assert_eq!(a.galois(11).unwrap(), a.conj());
        prop_assert!(close(a.conj().embed_numeric(), a.embed_numeric().conj()));
    }

    #[test]
    fn galois_exponents_must_be_units(a in element(), k in 0i64..12) {
        prop_assert_eq!(a.galois(k).is_ok(), [1, 5, 7, 11].contains(&k));
    }
}

fn sample_rings() -> &'static [FusionRing] {
    static RINGS: OnceLock<Vec<FusionRing>> = OnceLock::new();
    RINGS.get_or_init(|| {
        let mut rings = vec![FusionRing::trivial(), FusionRing::paper_ring()];
        rings.extend((2..=5).map(FusionRing::cyclic));
        rings.extend(enumerate_rings(3, &RingConstraints::default()).unwrap());
        rings.extend(enumerate_rings(4, &RingConstraints::rank4_lemma()).unwrap());
        rings
    })
}

proptest! {
    #[test]
    fn hom_dimension_ignores_parenthesization(
        which in any::<prop::sample::Index>(),
        word in prop::collection::vec(any::<prop::sample::Index>(), 1..6),
        target in any::<prop::sample::Index>(),
    ) {
        let rings = sample_rings();
        let ring = which.get(rings);
        let letters: Vec<usize> = word.iter().map(|i| i.index(ring.rank())).collect();
        let t = target.index(ring.rank());
        prop_assert_eq!(ring.hom_dim(&letters, t).unwrap(), ring.hom_dim_right(&letters, t).unwrap());
    }
}

fn z3_trivial() -> AssociatorSet {
    let ring = FusionRing::cyclic(3);
    let mut f = AssociatorSet::new(ring.clone());
    for key in nontrivial_keys(&ring) {
        f.set(key, Matrix::identity(1)).unwrap();
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gauge_preserves_pentagon_and_invariants(g in gauge()) {
        let reference = reference_solution();
        let moved = gauge_transform(&reference, &g).unwrap();
        prop_assert!(pentagon_check(&moved).unwrap().is_empty());
        prop_assert_eq!(invariants(&moved).unwrap(), invariants(&reference).unwrap());

        let bad = corrupted();
        let before = pentagon_check(&bad).unwrap();
        let after = pentagon_check(&gauge_transform(&bad, &g).unwrap()).unwrap();
        prop_assert!(!before.is_empty());
        let names = |r: &fusion_core::associator::PentagonReport| r.violations.iter().map(|v| v.name.clone()).collect::<Vec<_>>();
        prop_assert_eq!(names(&before), names(&after));
    }

    #[test]
    fn serialization_round_trips_gauged_data(g in gauge()) {
        let file = CategoryFile::new(gauge_transform(&reference_solution(), &g).unwrap());
        let text = serialize(&file);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(serialize(&back), text);
    }
}

/// r' on V^z_{xy} ← V^z_{yx} under a change of basis T.
fn gauge_braiding(r: &RSymbolSet, g: &Gauge<Cyclotomic>) -> RSymbolSet {
    let ring = r.ring().clone();
    let t = |k: (usize, usize, usize)| g.blocks.get(&k).cloned().unwrap_or_else(|| Matrix::identity(ring.n(k.0, k.1, k.2) as usize));
    let mut out = RSymbolSet::new(ring.clone());
    for (&(x, y, z), m) in r.blocks() {
        let moved = t((y, x, z)).mul(m).mul(&t((x, y, z)).inverse().unwrap());
        out.set((x, y, z), moved).unwrap();
    }
    out
}

fn z3_gauge() -> impl Strategy<Value = Gauge<Cyclotomic>> {
    prop::collection::vec(nonzero(), 4).prop_map(|v| {
        let mut blocks = BTreeMap::new();
        for (i, (x, y)) in [(1, 1), (1, 2), (2, 1), (2, 2)].into_iter().enumerate() {
            blocks.insert((x, y, (x + y) % 3), Matrix::scalar(v[i].clone()));
        }
        Gauge { blocks }
    })
}

fn random_braiding() -> impl Strategy<Value = RSymbolSet> {
    let ring = FusionRing::paper_ring();
    let keys: Vec<((usize, usize, usize), usize)> = gauge_spaces();
    let cells: usize = keys.iter().map(|(_, d)| d * d).sum();
    prop::collection::vec(element(), cells).prop_filter_map("invertible", move |entries| {
        let mut it = entries.into_iter();
        let mut r = RSymbolSet::new(ring.clone());
        for &(key, d) in &keys {
            r.set(key, Matrix::from_fn(d, d, |_, _| it.next().unwrap())).ok()?;
        }
        Some(r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hexagon_is_gauge_covariant_on_a_braided_category(g in z3_gauge()) {
        static FOUND: OnceLock<Vec<RSymbolSet>> = OnceLock::new();
        let f = z3_trivial();
        let found = FOUND.get_or_init(|| search_braidings(&z3_trivial(), BRAIDING_BUDGET).unwrap().solutions);
        prop_assert_eq!(found.len(), 3);
        let moved = gauge_transform(&f, &g).unwrap();
        for r in found {
            prop_assert!(hexagon_check(&f, r).unwrap().is_empty());
            prop_assert!(hexagon_check(&moved, &gauge_braiding(r, &g)).unwrap().is_empty());
        }
    }

    #[test]
    fn hexagon_failures_are_gauge_covariant(g in gauge(), r in random_braiding()) {
        let f = reference_solution();
        let moved = gauge_transform(&f, &g).unwrap();
        prop_assert_eq!(hexagon_check(&f, &r).unwrap(), hexagon_check(&moved, &gauge_braiding(&r, &g)).unwrap());
    }
}

#[test]
fn fixtures_round_trip() {
    for k in [1, 5, 7, 11] {
        let file = CategoryFile::read(&fixtures_dir().join(fixture_name(k))).unwrap();
        let back = parse(&serialize(&file)).unwrap();
        assert_eq!(back, file);
        assert!(pentagon_check(&file.associators).unwrap().is_empty());
    }
}
