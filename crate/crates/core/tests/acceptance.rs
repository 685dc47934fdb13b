//! End-to-end acceptance run. Prints one line per criterion and fails if any criterion fails.
//! Every runtime bound and numeric tolerance used below is pinned in the constants block.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use fusion_core::associator::{gauge_transform, pentagon_check, triangle_check, AssociatorSet};
use fusion_core::braiding::{prove_no_braiding, search_braidings, BRAIDING_BUDGET};
use fusion_core::cyclotomic::Cyclotomic;
use fusion_core::fusion_ring::{enumerate_rings, FusionRing, RingConstraints};
use fusion_core::io::{fixture_name, fixtures_dir, parse, serialize, CategoryFile};
use fusion_core::pentagon_solver::{equivalent, galois_orbit, invariants, parameters, solve_pentagon, Equivalence};
use fusion_core::pivotal::{build_bending, fs_indicator, pivotal_structures, quantum_dimension, spherical_check};
use fusion_core::reference::reference_solution;
use fusion_core::rigidity_dual::{balance_pseudo_traces, build_rigidity, quadruple_dual_check, snake_check};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const APPENDIX_CHECK_LIMIT: Duration = Duration::from_secs(5);
const CLASSIFICATION_LIMIT: Duration = Duration::from_secs(120);
const NO_BRAIDING_LIMIT: Duration = Duration::from_secs(10);
const ENUMERATION_LIMIT: Duration = Duration::from_secs(60);
/// Largest coordinate denominator accepted when recognizing a floating-point constant.
const RECOGNITION_DENOMINATOR: u64 = 8;
const GAUGE_CASES: u32 = 100;
const FIELD_CASES: u32 = 256;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{what} took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

fn conjugates() -> Vec<(i64, AssociatorSet)> {
    [1, 5, 7, 11]
        .into_iter()
        .map(|k| (k, CategoryFile::read(&fixtures_dir().join(fixture_name(k))).unwrap().associators))
        .collect()
}

fn sqrt3() -> Cyclotomic {
    Cyclotomic::sqrt3()
}

fn appendix_fidelity() -> Outcome {
    let from_file = CategoryFile::read(&fixtures_dir().join(fixture_name(1)))
        .map_err(|e| e.to_string())?
        .associators;
    ensure(from_file == reference_solution(), "fixture differs from the built-in transcription")?;
    let start = Instant::now();
    let tri = triangle_check(&from_file);
    let pent = pentagon_check(&from_file).map_err(|e| e.to_string())?;
    let t = within(start, APPENDIX_CHECK_LIMIT, "triangle + pentagon")?;
    ensure(tri.is_empty(), format!("triangle: {} violations", tri.violations.len()))?;
    ensure(pent.is_empty(), format!("pentagon: {} violations", pent.violations.len()))?;
    Ok(format!("triangle and pentagon hold exactly ({t:.2?})"))
}

fn four_solutions() -> Outcome {
    let start = Instant::now();
    let classes = solve_pentagon().map_err(|e| e.to_string())?;
    let t = within(start, CLASSIFICATION_LIMIT, "solve_pentagon")?;
    let sols = &classes.last.solutions;
    ensure(sols.len() == 4, format!("{} solutions", sols.len()))?;
    for s in sols {
        ensure(pentagon_check(s).map_err(|e| e.to_string())?.is_empty(), "a solution fails the pentagon")?;
    }
    for conj in galois_orbit(&reference_solution()).map_err(|e| e.to_string())? {
        let mut hit = false;
        for s in sols {
            hit |= equivalent(&conj, s).map_err(|e| e.to_string())?.is_equivalent();
        }
        ensure(hit, "a Galois conjugate matches no solution")?;
    }
    let mut pairs = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            match equivalent(&sols[i], &sols[j]).map_err(|e| e.to_string())? {
                Equivalence::Inequivalent { invariant } => {
                    ensure(
                        invariant.contains("a^x_{x,x,x}[0,0]") || invariant.contains("eigenvalues of a^1_{x,x,x}"),
                        invariant,
                    )?;
                }
                Equivalence::Equivalent { .. } => return Err(format!("solutions {i} and {j} are equivalent")),
            }
            pairs += 1;
        }
    }
    let half = Cyclotomic::ratio(1, 2);
    let corners = [&(&sqrt3() - &Cyclotomic::one()) * &half, &(-&(&sqrt3() + &Cyclotomic::one())) * &half];
    let mut eigs = Vec::new();
    for s in sols {
        let inv = invariants(s).map_err(|e| e.to_string())?;
        ensure(corners.contains(&inv.corner), format!("corner {}", inv.corner))?;
        eigs.push(inv.eig1);
    }
    let distinct: std::collections::BTreeSet<_> = eigs.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
    ensure(distinct.len() == 2, "expected two eigenvalue pairs")?;
    let pair: Vec<_> = distinct.into_iter().collect();
    let conj = |(a, b): &(Cyclotomic, Cyclotomic)| {
        let mut v = [a.conj(), b.conj()];
        v.sort();
        (v[0].clone(), v[1].clone())
    };
    ensure(conj(&pair[0]) == pair[1], "eigenvalue pairs are not complex conjugates")?;
    Ok(format!("4 solutions, all {pairs} pairs inequivalent by invariants, orbit matched ({t:.2?})"))
}

/// Exact constant recognized from a floating-point closed form.
fn recognized(z: Complex64) -> Result<Cyclotomic, String> {
    Cyclotomic::recognize(z, RECOGNITION_DENOMINATOR).map_err(|e| e.to_string())
}

fn distinguished_parameters() -> Outcome {
    let classes = solve_pentagon().map_err(|e| e.to_string())?;
    let p = parameters(classes.distinguished().ok_or("no distinguished solution")?).map_err(|e| e.to_string())?;
    let pi = std::f64::consts::PI;
    let s3 = 3f64.sqrt();
    let cis = |t: f64| Complex64::from_polar(1.0, t);
    let expected = [
        ("b", p.b.clone(), Complex64::new(0.0, 1.0)),
        ("φ", p.phi.clone(), Complex64::new((s3 - 1.0) / 2.0, 0.0)),
        ("d", p.d.clone(), cis(7.0 * pi / 12.0) / 2f64.sqrt()),
        ("w", p.w.clone(), cis(2.0 * pi / 3.0) * ((1.0 - s3) / 4.0)),
        ("y", p.y.clone(), (cis(-pi / 3.0) + Complex64::new(0.0, 1.0)) / 2.0),
        ("z", p.z.clone(), cis(5.0 * pi / 6.0) / 2.0),
    ];
    for (name, got, z) in expected {
        let want = recognized(z)?;
        ensure(got == want, format!("{name} = {got}, expected {want}"))?;
    }
    Ok("b = i, φ = (−1+√3)/2, d, w, y, z equal the recognized constants".into())
}

fn no_braiding() -> Outcome {
    let start = Instant::now();
    for (k, f) in conjugates() {
        let cert = prove_no_braiding(&f).map_err(|e| format!("σ{k}: {e}"))?;
        let search = search_braidings(&f, BRAIDING_BUDGET).map_err(|e| format!("σ{k}: {e}"))?;
        ensure(
            search.solutions.is_empty() && search.families == 0 && search.stuck == 0,
            format!("σ{k}: search did not close"),
        )?;
        let text = cert.to_string();
        for needle in ["r^x_{y,x} = b", "r^x_{x,y} = 1/b", "k = n = 0", "l²"] {
            ensure(text.contains(needle), format!("σ{k}: certificate lacks {needle}"))?;
        }
        ensure(
            cert.contradiction.0.starts_with("l²") && cert.contradiction.1.starts_with("l²"),
            "contradiction is not about l²",
        )?;
    }
    let t = within(start, NO_BRAIDING_LIMIT, "certificates + searches")?;
    Ok(format!("certificate and exhaustive search agree on all 4 categories ({t:.2?})"))
}

fn rigidity() -> Outcome {
    for (k, f) in conjugates() {
        let r = build_rigidity(&f).map_err(|e| e.to_string())?;
        let snakes = snake_check(&f, &r).map_err(|e| e.to_string())?;
        ensure(snakes.iter().all(|(a, b)| a.is_one() && b.is_one()), format!("σ{k}: snake pairs not (1,1)"))?;
        let root = sqrt3().galois(k).map_err(|e| e.to_string())?;
        let birth = &Cyclotomic::one() + &root;
        ensure(r.birth[X] == birth, format!("σ{k}: birth of x = {}", r.birth[X]))?;
        ensure((root == sqrt3()) == [1, 11].contains(&k), "√3 conjugation pattern")?;
    }
    Ok("snakes (1,1) everywhere; birth of x is 1+√3 or 1−√3 under √3 ↦ −√3".into())
}

fn pivotality() -> Outcome {
    let ring = FusionRing::paper_ring();
    for (k, f) in conjugates() {
        let r = build_rigidity(&f).map_err(|e| e.to_string())?;
        let b = build_bending(&f, &r).map_err(|e| e.to_string())?;
        ensure(b.cube().is_identity(), format!("σ{k}: B³ ≠ I"))?;
        let ps = pivotal_structures(&f, &r).map_err(|e| e.to_string())?;
        ensure(ps.len() == 1 && ps[0].is_strict(), format!("σ{k}: pivotal families {:?}", ps))?;
        let p = &ps[0];
        for x in 0..ring.rank() {
            ensure(
                fs_indicator(&ring, p, x).map_err(|e| e.to_string())? == 1,
                format!("σ{k}: FS indicator of {}", ring.label(x)),
            )?;
        }
        let sph = spherical_check(&f, &r, p).map_err(|e| e.to_string())?;
        ensure(sph.spherical && sph.traces.iter().all(|(a, b)| a == b), format!("σ{k}: tr_r ≠ tr_l"))?;
        let lambda = quantum_dimension(&f, &r, p, X).map_err(|e| e.to_string())?;
        let two = Cyclotomic::from_integer(2);
        let value = &(&(&lambda * &lambda) - &(&two * &lambda)) - &two;
        ensure(value.is_zero(), format!("σ{k}: dim x = {lambda}"))?;
    }
    Ok("B³ = I, unique strict pivotal structure, FS +1, spherical, dim x root of λ²−2λ−2".into())
}

fn quadruple_dual() -> Outcome {
    for (k, f) in conjugates() {
        let r = balance_pseudo_traces(&f, &build_rigidity(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(quadruple_dual_check(&f, &r).map_err(|e| e.to_string())?, format!("σ{k}: ****≠ Id"))?;
    }
    Ok("after balancing, the quadruple dual is the identity for all 4".into())
}

fn rank_four() -> Outcome {
    let start = Instant::now();
    let rings = enumerate_rings(4, &RingConstraints::rank4_lemma()).map_err(|e| e.to_string())?;
    let t = within(start, ENUMERATION_LIMIT, "enumeration")?;
    ensure(rings.len() == 1, format!("{} rings", rings.len()))?;
    ensure(rings[0].canonical_form() == FusionRing::cyclic(4).canonical_form(), "the ring is not Z4")?;
    Ok(format!("exactly the Z4 group ring ({t:.2?})"))
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            failure_persistence: None,
            ..Config::with_cases(cases)
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn property_suites() -> Outcome {
    let images: std::collections::BTreeSet<Cyclotomic> = [1, 5, 7, 11].into_iter().map(|k| Cyclotomic::zeta().galois(k).unwrap()).collect();
    ensure(images.len() == 4, "the Galois group does not have order 4")?;
    let field = (element(), element(), element());
    runner(FIELD_CASES)
        .run(&field, |(a, b, c)| {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
            let units = [1i64, 5, 7, 11];
            for k in units {
                prop_assert_eq!(a.galois(k).unwrap().galois(k).unwrap(), a.clone());
                for m in units {
                    prop_assert_eq!(a.galois(k).unwrap().galois(m).unwrap(), a.galois(k * m % 12).unwrap());
                }
            }
            Ok(())
        })
        .map_err(|e| format!("field: {e}"))?;

    let reference = reference_solution();
    let base = invariants(&reference).unwrap();
    let bad = corrupted();
    let bad_names: Vec<String> = pentagon_check(&bad).unwrap().violations.iter().map(|v| v.name.clone()).collect();
    runner(GAUGE_CASES)
        .run(&gauge(), |g| {
            let moved = gauge_transform(&reference, &g).unwrap();
            prop_assert!(pentagon_check(&moved).unwrap().is_empty());
            prop_assert_eq!(invariants(&moved).unwrap(), base.clone());
            let after: Vec<String> = pentagon_check(&gauge_transform(&bad, &g).unwrap())
                .unwrap()
                .violations
                .iter()
                .map(|v| v.name.clone())
                .collect();
            prop_assert_eq!(&after, &bad_names);
            Ok(())
        })
        .map_err(|e| format!("gauge: {e}"))?;

    let rings = [FusionRing::paper_ring(), FusionRing::cyclic(4), FusionRing::cyclic(5)];
    runner(FIELD_CASES)
        .run(&(0usize..3, prop::collection::vec(0usize..5, 1..6), 0usize..5), |(i, word, t)| {
            let ring = &rings[i];
            let word: Vec<usize> = word.iter().map(|w| w % ring.rank()).collect();
            let t = t % ring.rank();
            prop_assert_eq!(ring.hom_dim(&word, t).unwrap(), ring.hom_dim_right(&word, t).unwrap());
            Ok(())
        })
        .map_err(|e| format!("hom_dim: {e}"))?;

    for k in [1, 5, 7, 11] {
        let file = CategoryFile::read(&fixtures_dir().join(fixture_name(k))).map_err(|e| e.to_string())?;
        ensure(
            parse(&serialize(&file)).map_err(|e| e.to_string())? == file,
            format!("σ{k} fixture does not round-trip"),
        )?;
    }
    Ok(format!("field and Galois laws, {GAUGE_CASES} exact gauges, hom_dim, fixture round-trips"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("appendix fidelity", appendix_fidelity),
        ("four-solution classification", four_solutions),
        ("distinguished parameters", distinguished_parameters),
        ("no braiding", no_braiding),
        ("rigidity", rigidity),
        ("pivotality and sphericity", pivotality),
        ("quadruple dual", quadruple_dual),
        ("rank-4 lemma", rank_four),
        ("property suites", property_suites),
    ];
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.into_iter().enumerate() {
        let n = i + 1;
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {n} PASS  {title}: {detail}"),
            Err(why) => {
                println!("criterion {n} FAIL  {title}: {why}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
