use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use fusion_core::associator::{block_dim, pentagon_check, triangle_check, AssocError, AssociatorSet};
use fusion_core::braiding::{prove_no_braiding, r_name, search_braidings, BraidError, BRAIDING_BUDGET};
use fusion_core::cyclotomic::Cyclotomic;
use fusion_core::fusion_ring::{enumerate_rings, FusionRing, RingConstraints, RingError};
use fusion_core::io::{serialize, CategoryFile, FormatError};
use fusion_core::pentagon_solver::{equivalent, invariants, parameters, solve_pentagon as classify, SolverError, GALOIS_EXPONENTS};
use fusion_core::pivotal::{build_bending, fs_indicator, pivotal_structures, quantum_dimension, spherical_check, PivotalError, PivotalStructure};
use fusion_core::rigidity_dual::{build_rigidity, snake_check, RigidityError, RigidityStructure};

use crate::report::Report;

/// Anything that stops a command before it reaches a verdict; exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Assoc(#[from] AssocError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Pivotal(#[from] PivotalError),
}

type Result<T> = std::result::Result<T, CliError>;

fn load(path: &Path) -> Result<CategoryFile> {
    Ok(CategoryFile::read(path)?)
}

/// The associators, once the ring is valid and no block is missing.
fn complete(file: &CategoryFile) -> Result<&AssociatorSet> {
    let report = file.ring().validate();
    if let Some(v) = report.violations.first() {
        return Err(CliError::Input(format!("the fusion ring is invalid ({v}); run validate-ring")));
    }
    let missing = file.missing_blocks();
    if !missing.is_empty() {
        return Err(CliError::Input(format!("missing associator blocks: {}", missing.join(", "))));
    }
    Ok(&file.associators)
}

fn rigidity_of(file: &CategoryFile, f: &AssociatorSet) -> Result<(RigidityStructure, &'static str)> {
    Ok(match &file.rigidity {
        Some(r) => (r.clone(), "file"),
        None => (build_rigidity(f)?, "corner recipe"),
    })
}

fn values(v: &[Cyclotomic]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn per_strand(ring: &FusionRing, v: &[Cyclotomic]) -> Value {
    Value::Object(ring.labels().iter().zip(v).map(|(l, c)| (l.clone(), Value::String(c.to_string()))).collect())
}

pub fn validate_ring(path: &Path) -> Result<Report> {
    let file = load(path)?;
    let ring = file.ring();
    let mut rep = Report::new("validate-ring");
    rep.line(format!("rank {} with labels {}", ring.rank(), ring.labels().join(", ")));
    for l in ring.to_string().lines() {
        rep.line(l);
    }
    let violations: Vec<String> = ring.validate().violations.iter().map(ToString::to_string).collect();
    if violations.is_empty() {
        rep.line("unit, duality, associativity and rigidity-symmetry axioms hold");
    } else {
        rep.violation();
        for v in &violations {
            rep.line(format!("violation: {v}"));
        }
    }
    rep.set("rank", ring.rank());
    rep.set("labels", ring.labels().to_vec());
    rep.set("violations", violations);
    Ok(rep)
}

pub fn check_triangle(path: &Path) -> Result<Report> {
    let file = load(path)?;
    let ring = file.ring();
    let f = &file.associators;
    let one = ring.unit();
    let r = ring.rank();
    let mut implicit = 0;
    for x in 0..r {
        for y in 0..r {
            for z in 0..r {
                for u in 0..r {
                    if [x, y, z].contains(&one) && block_dim(ring, (x, y, z, u)) > 0 {
                        implicit += 1;
                    }
                }
            }
        }
    }
    let tri = triangle_check(f);
    let mut rep = Report::new("check-triangle");
    rep.line(format!("{implicit} unit-involving blocks, all implicit identities"));
    let names: Vec<String> = tri.violations.iter().map(|(_, n)| n.clone()).collect();
    if !names.is_empty() {
        rep.violation();
        rep.line(format!("not the identity: {}", names.join(", ")));
    }
    rep.set("unit_blocks", implicit);
    rep.set("violations", names);
    Ok(rep)
}

pub fn check_pentagon(path: &Path) -> Result<Report> {
    let file = load(path)?;
    let f = complete(&file)?;
    let pent = pentagon_check(f)?;
    let mut rep = Report::new("check-pentagon");
    rep.line(format!("{} instances checked", pent.checked));
    for (dim, count) in &pent.census {
        rep.line(format!("{dim}-dimensional instances without the unit: {count}"));
    }
    let names: Vec<String> = pent.violations.iter().map(|v| v.name.clone()).collect();
    if names.is_empty() {
        rep.line("every pentagon instance holds exactly");
    } else {
        rep.violation();
        for v in &pent.violations {
            rep.line(format!("violated: {} (difference {})", v.name, v.difference));
        }
    }
    rep.set("checked", pent.checked);
    rep.set("census", Value::Object(pent.census.iter().map(|(d, c)| (d.to_string(), json!(c))).collect()));
    rep.set("violations", names);
    Ok(rep)
}

pub fn solve_pentagon(out: Option<&Path>) -> Result<Report> {
    let c = classify()?;
    let mut rep = Report::new("solve-pentagon");
    rep.line(format!(
        "1-dimensional stage: {} instances, {} nontrivial, {} distinct equations, {} solutions",
        c.one_dim.raw_instances,
        c.one_dim.nontrivial_equations,
        c.one_dim.distinct.len(),
        c.one_dim.solutions.len()
    ));
    rep.line(format!("2-dimensional stage: {} surviving ansätze, {} branches pruned", c.two_dim.survivors.len(), c.two_dim.pruned.len()));
    for p in &c.two_dim.pruned {
        rep.line(format!("pruned {}: {}", p.branch, p.witness));
    }
    let sols = &c.last.solutions;
    let distinguished = c.distinguished().and_then(|d| sols.iter().position(|s| s == d));
    rep.line(format!("solutions: {}", sols.len()));
    let mut listed = Vec::new();
    for (i, s) in sols.iter().enumerate() {
        let pent = pentagon_check(s)?;
        if !pent.is_empty() {
            rep.violation();
        }
        let p = parameters(s)?;
        let inv = invariants(s)?;
        let conj = GALOIS_EXPONENTS.iter().copied().find(|&k| sols[0].galois(k).map(|g| g == *s).unwrap_or(false));
        let mark = if distinguished == Some(i) { " (distinguished: b = i, φ > 0)" } else { "" };
        rep.line(format!("solution {i}{mark}: b = {}, φ = {}, d = {}, w = {}, y = {}, z = {}", p.b, p.phi, p.d, p.w, p.y, p.z));
        rep.line(format!("  {inv}"));
        rep.line(format!("  pentagon: {}", if pent.is_empty() { "holds" } else { "VIOLATED" }));
        if let Some(k) = conj {
            rep.line(format!("  equals σ_{k} of solution 0"));
        }
        if let Some(dir) = out {
            let path = dir.join(format!("solution_{i}.fc"));
            CategoryFile::new(s.clone()).write(&path)?;
            rep.line(format!("  written to {}", path.display()));
        }
        listed.push(json!({
            "b": p.b.to_string(), "phi": p.phi.to_string(), "d": p.d.to_string(),
            "w": p.w.to_string(), "y": p.y.to_string(), "z": p.z.to_string(),
            "corner": inv.corner.to_string(),
            "eigenvalues": [inv.eig1.0.to_string(), inv.eig1.1.to_string()],
            "pentagon_holds": pent.is_empty(),
            "galois_of_first": conj,
            "distinguished": distinguished == Some(i),
        }));
    }
    let mut pairs = Vec::new();
    for i in 0..sols.len() {
        for j in i + 1..sols.len() {
            let e = equivalent(&sols[i], &sols[j])?;
            let text = match &e {
                fusion_core::pentagon_solver::Equivalence::Equivalent { .. } => "equivalent".to_string(),
                fusion_core::pentagon_solver::Equivalence::Inequivalent { invariant } => format!("inequivalent, {invariant}"),
            };
            rep.line(format!("solutions {i} and {j}: {text}"));
            pairs.push(json!({"pair": [i, j], "equivalent": e.is_equivalent(), "reason": text}));
        }
    }
    rep.set("solutions", listed);
    rep.set("pairs", pairs);
    Ok(rep)
}

pub fn galois_orbit(path: &Path, k: Option<i64>, out: Option<&Path>) -> Result<Report> {
    let file = load(path)?;
    let f = complete(&file)?;
    let mut rep = Report::new("galois-orbit");
    match k {
        Some(k) => {
            let g = f.galois(k)?;
            let text = serialize(&CategoryFile::new(g.clone()));
            rep.line(format!("σ_{k}: ζ ↦ ζ^{k} applied to every entry"));
            if let Ok(inv) = invariants(&g) {
                rep.line(inv.to_string());
            }
            match out {
                Some(p) => {
                    std::fs::write(p, &text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
                    rep.line(format!("written to {}", p.display()));
                }
                None => {
                    for l in text.lines() {
                        rep.line(l);
                    }
                }
            }
            rep.set("k", k);
            rep.set("file", text);
        }
        None => {
            let mut orbit = Vec::new();
            for k in GALOIS_EXPONENTS {
                let g = f.galois(k)?;
                let inv = invariants(&g).map(|i| i.to_string()).unwrap_or_else(|e| e.to_string());
                rep.line(format!("σ_{k}: {inv}"));
                orbit.push(json!({"k": k, "invariants": inv}));
            }
            rep.set("orbit", orbit);
        }
    }
    Ok(rep)
}

pub fn check_hexagon(path: &Path) -> Result<Report> {
    let file = load(path)?;
    let f = complete(&file)?;
    let ring = f.ring();
    let search = search_braidings(f, BRAIDING_BUDGET)?;
    if search.stuck > 0 {
        return Err(CliError::Input(format!("the hexagon elimination left {} branches undecided", search.stuck)));
    }
    let mut rep = Report::new("check-hexagon");
    rep.line(format!("{} distinct hexagon equations in both orientations, {} elimination nodes", search.equations, search.nodes));
    rep.line(format!("braidings: {} isolated, {} parametric families", search.solutions.len(), search.families));
    let mut listed = Vec::new();
    for (i, r) in search.solutions.iter().enumerate() {
        let blocks: Vec<String> = r.blocks().iter().map(|(k, m)| format!("{} = {m}", r_name(ring, *k))).collect();
        rep.line(format!("braiding {i}: {}", blocks.join("; ")));
        listed.push(blocks);
    }
    if search.solutions.is_empty() && search.families == 0 {
        rep.violation();
        rep.line("the hexagon equations have no solution: no braiding exists");
    }
    rep.set("equations", search.equations);
    rep.set("braidings", listed);
    rep.set("families", search.families);
    Ok(rep)
}

pub fn prove_braiding_absent(path: &Path) -> Result<Report> {
    let file = load(path)?;
    let f = complete(&file)?;
    let mut rep = Report::new("prove-no-braiding");
    match prove_no_braiding(f) {
        Ok(cert) => {
            for (i, s) in cert.steps.iter().enumerate() {
                rep.line(format!("{}. {}: {}", i + 1, s.instance, s.constraint));
            }
            rep.line(format!("contradiction: {} and {}", cert.contradiction.0, cert.contradiction.1));
            rep.line(cert.conclusion.clone());
            let steps: Vec<Value> = cert.steps.iter().map(|s| json!({"instance": s.instance, "constraint": s.constraint})).collect();
            rep.set("steps", steps);
            rep.set("contradiction", vec![cert.contradiction.0.clone(), cert.contradiction.1.clone()]);
            rep.set("conclusion", cert.conclusion);
        }
        Err(BraidError::CertificateFailure(why)) => {
            rep.violation();
            rep.line(format!("the derivation breaks down: {why}"));
            rep.set("failure", why);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(rep)
}

pub fn pivotal(path: &Path) -> Result<Report> {
    let file = load(path)?;
    let f = complete(&file)?;
    let ring = f.ring();
    let (rig, source) = rigidity_of(&file, f)?;
    let bend = build_bending(f, &rig)?;
    let cube = bend.cube();
    let mut rep = Report::new("pivotal");
    rep.line(format!("rigidity scalars from the {source}"));
    rep.line(format!("bending matrix B is {0}x{0} on the unit-free spaces; B³ = I: {1}", bend.dim(), cube.is_identity()));
    rep.set("bending_dim", bend.dim());
    rep.set("cube_is_identity", cube.is_identity());
    match pivotal_structures(f, &rig) {
        Ok(all) => {
            let listed: Vec<Value> = all.iter().map(|p| per_strand(ring, &p.t)).collect();
            for p in &all {
                let t: Vec<String> = ring.labels().iter().zip(&p.t).map(|(l, v)| format!("t_{l} = {v}")).collect();
                rep.line(format!("pivotal structure: {}{}", t.join(", "), if p.is_strict() { " (strict)" } else { "" }));
            }
            rep.set("structures", listed);
        }
        Err(PivotalError::NonPivotal(why)) => {
            rep.violation();
            rep.line(format!("no pivotal structure: {why}"));
            rep.set("structures", Vec::<Value>::new());
            rep.set("failure", why);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(rep)
}

fn chosen_pivotal(file: &CategoryFile, f: &AssociatorSet, rig: &RigidityStructure) -> Result<(PivotalStructure, &'static str)> {
    if let Some(p) = &file.pivotal {
        return Ok((p.clone(), "file"));
    }
    let all = pivotal_structures(f, rig)?;
    let strict = all.iter().find(|p| p.is_strict()).cloned();
    match strict.or_else(|| all.first().cloned()) {
        Some(p) => Ok((p, "first solution of the pivotal equations")),
        None => Err(CliError::Input("no pivotal structure exists".into())),
    }
}

pub fn traces(path: &Path) -> Result<Report> {
    let file = load(path)?;
    let f = complete(&file)?;
    let ring = f.ring();
    let (rig, _) = rigidity_of(&file, f)?;
    let (piv, source) = chosen_pivotal(&file, f, &rig)?;
    if let Some(why) = piv.coherence_violation(ring) {
        return Err(CliError::Input(format!("pivotal scalars are incoherent: {why}")));
    }
    let sph = spherical_check(f, &rig, &piv)?;
    let mut rep = Report::new("traces");
    rep.line(format!("pivotal structure from the {source}"));
    let mut rows = Vec::new();
    for x in 0..ring.rank() {
        let (r, l) = &sph.traces[x];
        let dim = quantum_dimension(f, &rig, &piv, x)?;
        let fs = if ring.is_self_dual(x) { fs_indicator(ring, &piv, x).ok() } else { None };
        let fs_text = fs.map_or("n/a".to_string(), |s| format!("{s:+}"));
        rep.line(format!("{}: tr_r = {r}, tr_l = {l}, dim = {dim}, FS = {fs_text}", ring.label(x)));
        rows.push(json!({"strand": ring.label(x), "tr_r": r.to_string(), "tr_l": l.to_string(), "dim": dim.to_string(), "fs": fs}));
    }
    rep.line(format!("spherical: {}", sph.spherical));
    if !sph.spherical {
        rep.violation();
    }
    rep.set("strands", rows);
    rep.set("spherical", sph.spherical);
    Ok(rep)
}

pub fn snake(path: &Path) -> Result<Report> {
    let file = load(path)?;
    let f = complete(&file)?;
    let ring = f.ring();
    let (rig, source) = rigidity_of(&file, f)?;
    let pairs = snake_check(f, &rig)?;
    let mut rep = Report::new("snake-check");
    rep.line(format!("rigidity scalars from the {source}"));
    let mut rows = Vec::new();
    for (x, (r, l)) in pairs.iter().enumerate() {
        let ok = r.is_one() && l.is_one();
        if !ok {
            rep.violation();
        }
        rep.line(format!(
            "{}: birth = {}, death = {}, snakes ({r}, {l}){}",
            ring.label(x),
            rig.birth[x],
            rig.death[x],
            if ok { "" } else { " ≠ (1, 1)" }
        ));
        rows.push(json!({"strand": ring.label(x), "right": r.to_string(), "left": l.to_string()}));
    }
    rep.set("snakes", rows);
    rep.set("birth", values(&rig.birth));
    rep.set("death", values(&rig.death));
    Ok(rep)
}

pub fn enumerate(rank: usize, max_entry: u32, lemma: bool) -> Result<Report> {
    let constraints = if lemma {
        if rank != 4 {
            return Err(CliError::Input("--lemma applies to rank 4 only".into()));
        }
        RingConstraints { max_entry, ..RingConstraints::rank4_lemma() }
    } else {
        RingConstraints { max_entry, ..RingConstraints::default() }
    };
    let rings = enumerate_rings(rank, &constraints)?;
    let mut rep = Report::new("enumerate-rings");
    rep.line(format!("rank {rank}, entries at most {max_entry}{}: {} rings up to relabeling", if lemma { ", lemma constraints" } else { "" }, rings.len()));
    let mut listed = Vec::new();
    for (i, r) in rings.iter().enumerate() {
        rep.line(format!("ring {i}:"));
        for l in r.to_string().lines() {
            rep.line(format!("  {l}"));
        }
        listed.push(serde_json::to_value(r).expect("rings serialize"));
    }
    rep.set("rings", listed);
    Ok(rep)
}
