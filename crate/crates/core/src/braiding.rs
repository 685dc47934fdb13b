//! Hexagon equations for candidate braidings, an exhaustive exact search, and the
//! five-instance derivation showing the reference categories are not braided.
//!
//! r^z_{x,y} maps V^z_{y,x} (rows) to V^z_{x,y} (columns), f ↦ c_{x,y}∘f. The inverse
//! orientation uses r̄^z_{x,y} = (r^z_{y,x})⁻¹.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::associator::{block_dim, canonical_basis, instance_name, AssocError, AssociatorSet, Associators, BasisPath, HomBasis, Shape};
use crate::cyclotomic::{Cyclotomic, FieldError};
use crate::elimination::{normalize, EliminationError, System};
use crate::fusion_ring::strand::{ONE, X, Y};
use crate::fusion_ring::FusionRing;
use crate::matrix::{Matrix, Ring};
use crate::poly::{Poly, Var};

/// (x, y, z) for r^z_{x,y}.
pub type RKey = (usize, usize, usize);

pub const BRAIDING_BUDGET: usize = 200_000;

#[derive(Debug, Error)]
pub enum BraidError {
    #[error(transparent)]
    Assoc(#[from] AssocError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("elimination budget of {0} nodes exceeded")]
    BudgetExceeded(usize),
    #[error("{key} must be {expected}x{expected}, got {rows}x{cols}")]
    ShapeMismatch { key: String, expected: usize, rows: usize, cols: usize },
    #[error("{0} is singular")]
    Singular(String),
    #[error("{0} is not set")]
    MissingBlock(String),
    #[error("the fusion ring is not commutative, so it carries no braiding")]
    NonCommutative,
    #[error("the derivation is written for the ring with strands 1, y, x")]
    UnsupportedRing,
    #[error("symbolic r-blocks larger than 2x2 are not supported ({0})")]
    UnsupportedBlock(String),
    #[error("certificate step failed: {0}")]
    CertificateFailure(String),
}

impl From<EliminationError> for BraidError {
    fn from(e: EliminationError) -> Self {
        match e {
            EliminationError::BudgetExceeded(n) => BraidError::BudgetExceeded(n),
            EliminationError::Field(f) => BraidError::Field(f),
        }
    }
}

pub fn r_name(ring: &FusionRing, (x, y, z): RKey) -> String {
    format!("r^{}_{{{},{}}}", ring.label(z), ring.label(x), ring.label(y))
}

/// Keys with neither x nor y the unit and N^z_{x,y} > 0.
pub fn r_keys(ring: &FusionRing) -> Vec<RKey> {
    let one = ring.unit();
    let r = ring.rank();
    let mut out = Vec::new();
    for x in (0..r).filter(|&x| x != one) {
        for y in (0..r).filter(|&y| y != one) {
            for z in 0..r {
                if ring.n(x, y, z) > 0 {
                    out.push((x, y, z));
                }
            }
        }
    }
    out
}

/// R-blocks together with their inverses. Unit-involving blocks are identities.
#[derive(Clone, Debug, PartialEq)]
pub struct RSymbols<T: Ring> {
    ring: FusionRing,
    blocks: BTreeMap<RKey, Matrix<T>>,
    inverses: BTreeMap<RKey, Matrix<T>>,
}

pub type RSymbolSet = RSymbols<Cyclotomic>;

impl<T: Ring> RSymbols<T> {
    pub fn empty(ring: FusionRing) -> Self {
        RSymbols { ring, blocks: BTreeMap::new(), inverses: BTreeMap::new() }
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn blocks(&self) -> &BTreeMap<RKey, Matrix<T>> {
        &self.blocks
    }

    fn check_shape(&self, key: RKey, m: &Matrix<T>) -> Result<(), BraidError> {
        let expected = self.ring.n(key.0, key.1, key.2) as usize;
        if m.rows() != expected || m.cols() != expected || expected == 0 {
            return Err(BraidError::ShapeMismatch { key: r_name(&self.ring, key), expected, rows: m.rows(), cols: m.cols() });
        }
        Ok(())
    }

    /// Stores a block with an inverse supplied by the caller.
    pub fn set_with_inverse(&mut self, key: RKey, m: Matrix<T>, inverse: Matrix<T>) -> Result<(), BraidError> {
        self.check_shape(key, &m)?;
        self.check_shape(key, &inverse)?;
        self.blocks.insert(key, m);
        self.inverses.insert(key, inverse);
        Ok(())
    }

    fn lookup(&self, map: &BTreeMap<RKey, Matrix<T>>, key: RKey) -> Result<Matrix<T>, BraidError> {
        if let Some(m) = map.get(&key) {
            return Ok(m.clone());
        }
        if key.0 == self.ring.unit() || key.1 == self.ring.unit() {
            return Ok(Matrix::identity(self.ring.n(key.0, key.1, key.2) as usize));
        }
        Err(BraidError::MissingBlock(r_name(&self.ring, key)))
    }

    pub fn r(&self, key: RKey) -> Result<Matrix<T>, BraidError> {
        self.lookup(&self.blocks, key)
    }

    /// r̄^z_{x,y} = (r^z_{y,x})⁻¹.
    pub fn r_bar(&self, (x, y, z): RKey) -> Result<Matrix<T>, BraidError> {
        self.lookup(&self.inverses, (y, x, z))
    }
}

impl RSymbolSet {
    pub fn new(ring: FusionRing) -> Self {
        RSymbols::empty(ring)
    }

    pub fn set(&mut self, key: RKey, m: Matrix<Cyclotomic>) -> Result<(), BraidError> {
        self.check_shape(key, &m)?;
        let inverse = m.inverse().ok_or_else(|| BraidError::Singular(r_name(&self.ring, key)))?;
        self.set_with_inverse(key, m, inverse)
    }

    pub fn galois(&self, k: i64) -> Result<Self, BraidError> {
        let mut out = RSymbolSet::new(self.ring.clone());
        for (key, m) in &self.blocks {
            out.set(*key, m.galois(k)?)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// H, built from c.
    Forward,
    /// H̄, built from c⁻¹.
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HexagonInstance {
    pub direction: Direction,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub t: usize,
}

impl HexagonInstance {
    pub fn new(direction: Direction, x: usize, y: usize, z: usize, t: usize) -> Self {
        HexagonInstance { direction, x, y, z, t }
    }

    pub fn name(&self, ring: &FusionRing) -> String {
        let head = match self.direction {
            Direction::Forward => "H",
            Direction::Inverse => "H̄",
        };
        instance_name(ring, head, self.t, &[self.x, self.y, self.z])
    }
}

/// Every instance with a nonzero hom space, both orientations.
pub fn hexagon_instances(ring: &FusionRing) -> Vec<HexagonInstance> {
    let r = ring.rank();
    let mut out = Vec::new();
    for direction in [Direction::Forward, Direction::Inverse] {
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    for t in 0..r {
                        if block_dim(ring, (x, y, z, t)) > 0 {
                            out.push(HexagonInstance::new(direction, x, y, z, t));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Matrix of a map that acts on one vertex of each basis path.
fn vertex_map<T: Ring>(
    from: &HomBasis,
    to: &HomBasis,
    mut image: impl FnMut(&BasisPath) -> Result<Vec<(BasisPath, T)>, BraidError>,
) -> Result<Matrix<T>, BraidError> {
    let mut m: Matrix<T> = Matrix::zeros(from.len(), to.len());
    for (i, p) in from.paths().iter().enumerate() {
        for (q, v) in image(p)? {
            let j = to.position(&q).expect("image path lies in the target basis");
            m.entry_mut(i, j).add_assign(&v);
        }
    }
    Ok(m)
}

fn r_for<T: Ring>(r: &RSymbols<T>, direction: Direction, key: RKey) -> Result<Matrix<T>, BraidError> {
    match direction {
        Direction::Forward => r.r(key),
        Direction::Inverse => r.r_bar(key),
    }
}

/// LHS − RHS of H^t_{x,y,z} or H̄^t_{x,y,z} as maps V^t_{y(zx)} → V^t_{(xy)z};
/// `None` when the space is zero.
pub fn hexagon_residual<T: Ring>(f: &Associators<T>, r: &RSymbols<T>, inst: HexagonInstance) -> Result<Option<Matrix<T>>, BraidError> {
    let ring = f.ring();
    let HexagonInstance { direction, x, y, z, t } = inst;
    let start = canonical_basis(ring, &[y, z, x], t, Shape::Right)?;
    if start.is_empty() {
        return Ok(None);
    }
    let yxz_right = canonical_basis(ring, &[y, x, z], t, Shape::Right)?;
    let yxz_left = canonical_basis(ring, &[y, x, z], t, Shape::Left)?;
    let xyz_left = canonical_basis(ring, &[x, y, z], t, Shape::Left)?;
    let yzx_left = canonical_basis(ring, &[y, z, x], t, Shape::Left)?;
    let xyz_right = canonical_basis(ring, &[x, y, z], t, Shape::Right)?;
    let sizes = [&yxz_right, &yxz_left, &xyz_left, &yzx_left, &xyz_right];
    if sizes.iter().any(|b| b.len() != start.len()) {
        return Err(BraidError::NonCommutative);
    }
    // Swap the inner pair: r^s_{x,z} on V^s_{z,x}.
    let l1 = vertex_map(&start, &yxz_right, |p| {
        let s = p.internal[0];
        let m = r_for(r, direction, (x, z, s))?;
        Ok((0..m.cols()).map(|k| (BasisPath::new(vec![s], vec![k, p.mult[1]]), m.get(p.mult[0], k).clone())).collect())
    })?;
    let l2 = f.block((y, x, z, t))?;
    // Swap the lower pair: r^s_{x,y} on V^s_{y,x}.
    let l3 = vertex_map(&yxz_left, &xyz_left, |p| {
        let s = p.internal[0];
        let m = r_for(r, direction, (x, y, s))?;
        Ok((0..m.cols()).map(|k| (BasisPath::new(vec![s], vec![k, p.mult[1]]), m.get(p.mult[0], k).clone())).collect())
    })?;
    let r1 = f.block((y, z, x, t))?;
    // Move x past the fused pair: r^t_{x,s} on V^t_{s,x}.
    let r2 = vertex_map(&yzx_left, &xyz_right, |p| {
        let s = p.internal[0];
        let m = r_for(r, direction, (x, s, t))?;
        Ok((0..m.cols()).map(|k| (BasisPath::new(vec![s], vec![p.mult[0], k]), m.get(p.mult[1], k).clone())).collect())
    })?;
    let r3 = f.block((x, y, z, t))?;
    Ok(Some(l1.mul(&l2).mul(&l3).sub(&r1.mul(&r2).mul(&r3))))
}

/// Instances whose residual is nonzero.
pub fn hexagon_check(f: &AssociatorSet, r: &RSymbolSet) -> Result<Vec<HexagonInstance>, BraidError> {
    let results: Vec<Result<Option<HexagonInstance>, BraidError>> = hexagon_instances(f.ring())
        .into_par_iter()
        .map(|inst| Ok(hexagon_residual(f, r, inst)?.filter(|m| !m.is_zero()).map(|_| inst)))
        .collect();
    results.into_iter().filter_map(Result::transpose).collect()
}

/// All unit-free R-blocks as unknowns, with inverses through auxiliary variables:
/// 1/r for scalars, 1/det together with the adjugate for 2x2 blocks.
#[derive(Clone, Debug)]
pub struct BraidingFamily {
    /// Variables and nonzero marks, no equations.
    pub base: System,
    pub symbols: RSymbols<Poly>,
    pub unknowns: BTreeMap<RKey, Vec<Var>>,
    pub inverse_vars: BTreeMap<RKey, Var>,
    pub inverse_equations: BTreeMap<RKey, Poly>,
}

pub fn braiding_family(ring: &FusionRing) -> Result<BraidingFamily, BraidError> {
    let mut base = System::new();
    let mut symbols = RSymbols::empty(ring.clone());
    let mut unknowns = BTreeMap::new();
    let mut inverse_vars = BTreeMap::new();
    let mut inverse_equations = BTreeMap::new();
    for key in r_keys(ring) {
        let name = r_name(ring, key);
        match ring.n(key.0, key.1, key.2) {
            1 => {
                let v = base.nonzero_var(name.clone());
                let w = base.nonzero_var(format!("1/{name}"));
                symbols.set_with_inverse(key, Matrix::scalar(Poly::var(v)), Matrix::scalar(Poly::var(w)))?;
                inverse_equations.insert(key, Poly::var(v).mul(&Poly::var(w)).sub(&Poly::one()));
                unknowns.insert(key, vec![v]);
                inverse_vars.insert(key, w);
            }
            2 => {
                let vs: Vec<Var> = (0..4).map(|i| base.var(format!("{name}[{},{}]", i / 2, i % 2))).collect();
                let det_inv = base.nonzero_var(format!("1/det {name}"));
                let p = |i: usize| Poly::var(vs[i]);
                let m = Matrix::from_rows(vec![vec![p(0), p(1)], vec![p(2), p(3)]]);
                let d = Poly::var(det_inv);
                let adj = Matrix::from_rows(vec![vec![p(3).mul(&d), p(1).neg().mul(&d)], vec![p(2).neg().mul(&d), p(0).mul(&d)]]);
                let det = p(0).mul(&p(3)).sub(&p(1).mul(&p(2)));
                inverse_equations.insert(key, det.mul(&d).sub(&Poly::one()));
                symbols.set_with_inverse(key, m, adj)?;
                unknowns.insert(key, vs);
                inverse_vars.insert(key, det_inv);
            }
            _ => return Err(BraidError::UnsupportedBlock(name)),
        }
    }
    Ok(BraidingFamily { base, symbols, unknowns, inverse_vars, inverse_equations })
}

pub fn symbolic(f: &AssociatorSet) -> Associators<Poly> {
    f.try_map(|c| Ok::<_, std::convert::Infallible>(Poly::constant(c.clone()))).expect("infallible")
}

pub fn instance_equations(fp: &Associators<Poly>, fam: &BraidingFamily, inst: HexagonInstance) -> Result<Vec<Poly>, BraidError> {
    Ok(hexagon_residual(fp, &fam.symbols, inst)?
        .map(|m| m.entries().map(|(_, _, p)| p.clone()).filter(|p| !p.is_zero()).collect())
        .unwrap_or_default())
}

#[derive(Clone, Debug)]
pub struct BraidingSearch {
    pub solutions: Vec<RSymbolSet>,
    /// Surviving branches that still have free parameters.
    pub families: usize,
    pub stuck: usize,
    pub nodes: usize,
    pub equations: usize,
}

impl BraidingSearch {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty() && self.families == 0 && self.stuck == 0
    }
}

/// Solves the hexagon system over all unit-free R-blocks, leaving out `excluded`.
pub fn search_braidings_without(f: &AssociatorSet, excluded: &[HexagonInstance], budget: usize) -> Result<BraidingSearch, BraidError> {
    let instances: Vec<HexagonInstance> = hexagon_instances(f.ring()).into_iter().filter(|i| !excluded.contains(i)).collect();
    search_braidings_on(f, &instances, budget)
}

/// The five instances of the no-braiding derivation, in order.
pub fn certificate_instances() -> [HexagonInstance; 5] {
    [
        HexagonInstance::new(Direction::Forward, Y, X, X, X),
        HexagonInstance::new(Direction::Inverse, Y, X, X, X),
        HexagonInstance::new(Direction::Forward, X, Y, X, X),
        HexagonInstance::new(Direction::Inverse, X, Y, X, X),
        HexagonInstance::new(Direction::Forward, X, X, X, ONE),
    ]
}

/// Solves only the given instances. Unknowns that appear in none of them stay free.
pub fn search_braidings_on(f: &AssociatorSet, instances: &[HexagonInstance], budget: usize) -> Result<BraidingSearch, BraidError> {
    let ring = f.ring();
    let fam = braiding_family(ring)?;
    let fp = symbolic(f);
    let per: Vec<Result<Vec<Poly>, BraidError>> = instances.par_iter().map(|&i| instance_equations(&fp, &fam, i)).collect();
    let nonzero: BTreeSet<Var> = fam.inverse_vars.values().copied().chain(fam.unknowns.iter().filter(|(_, v)| v.len() == 1).map(|(_, v)| v[0])).collect();
    let mut seen = BTreeSet::new();
    let mut sys = fam.base.clone();
    for eqs in per {
        for p in eqs? {
            let n = normalize(&p, &nonzero);
            if seen.insert(format!("{n:?}")) {
                sys.add_equation(n);
            }
        }
    }
    // Blocks absent from every chosen instance stay free.
    let used: BTreeSet<Var> = sys.equations().iter().flat_map(Poly::vars).collect();
    for (key, eq) in &fam.inverse_equations {
        if fam.unknowns[key].iter().chain(std::iter::once(&fam.inverse_vars[key])).any(|v| used.contains(v)) {
            sys.add_equation(eq.clone());
        }
    }
    let equations = sys.equations().len();
    let run = sys.solve(budget)?;
    let mut solutions = Vec::new();
    let mut families = 0;
    for leaf in &run.leaves {
        if !leaf.is_point() {
            families += 1;
            continue;
        }
        let values = leaf.evaluate(&BTreeMap::new())?;
        let mut set = RSymbolSet::new(ring.clone());
        for (key, vars) in &fam.unknowns {
            let entries: Vec<Cyclotomic> = vars.iter().map(|v| values.get(v).cloned().ok_or(FieldError::NotFound)).collect::<Result<_, _>>()?;
            let m = if entries.len() == 1 {
                Matrix::scalar(entries[0].clone())
            } else {
                Matrix::from_rows(vec![entries[..2].to_vec(), entries[2..].to_vec()])
            };
            set.set(*key, m)?;
        }
        if instances.iter().map(|&i| hexagon_residual(f, &set, i)).collect::<Result<Vec<_>, _>>()?.into_iter().flatten().any(|m| !m.is_zero()) {
            return Err(BraidError::CertificateFailure("an elimination leaf fails the hexagon check".into()));
        }
        solutions.push(set);
    }
    Ok(BraidingSearch { solutions, families, stuck: run.stuck.len(), nodes: run.nodes, equations })
}

pub fn search_braidings(f: &AssociatorSet, budget: usize) -> Result<BraidingSearch, BraidError> {
    search_braidings_without(f, &[], budget)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateStep {
    pub instance: String,
    pub constraint: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoBraidingCertificate {
    pub steps: Vec<CertificateStep>,
    /// Two identities that cannot both hold.
    pub contradiction: (String, String),
    /// The reason they cannot.
    pub conclusion: String,
}

impl fmt::Display for NoBraidingCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{}. {}: {}", i + 1, s.instance, s.constraint)?;
        }
        writeln!(f, "contradiction: {} and {}", self.contradiction.0, self.contradiction.1)?;
        write!(f, "{}", self.conclusion)
    }
}

/// The value every surviving branch assigns to `var`.
fn forced_value(sys: &System, var: Var, what: &str) -> Result<Cyclotomic, BraidError> {
    let run = sys.solve(BRAIDING_BUDGET)?;
    if !run.stuck.is_empty() || run.leaves.is_empty() {
        return Err(BraidError::CertificateFailure(format!("{what}: elimination did not isolate a value")));
    }
    let mut value: Option<Cyclotomic> = None;
    for leaf in &run.leaves {
        let v = leaf.symbolic_values()?.get(&var).and_then(Poly::as_constant).ok_or_else(|| BraidError::CertificateFailure(format!("{what}: value not forced")))?;
        if value.as_ref().is_some_and(|w| *w != v) {
            return Err(BraidError::CertificateFailure(format!("{what}: branches disagree")));
        }
        value = Some(v);
    }
    Ok(value.expect("at least one leaf"))
}

/// Whether `claim` is a field-linear combination of `eqs`, monomials as coordinates.
fn in_span(eqs: &[Poly], claim: &Poly) -> bool {
    let mut monomials = BTreeSet::new();
    for p in eqs.iter().chain(std::iter::once(claim)) {
        for (m, _) in p.terms() {
            monomials.insert(m.clone());
        }
    }
    let cols: Vec<_> = monomials.into_iter().collect();
    let row = |p: &Poly| -> Vec<Cyclotomic> {
        let coeffs: BTreeMap<_, _> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        cols.iter().map(|m| coeffs.get(m).cloned().unwrap_or_else(Cyclotomic::zero)).collect()
    };
    let base: Vec<Vec<Cyclotomic>> = eqs.iter().map(row).collect();
    let mut with = base.clone();
    with.push(row(claim));
    let rank = |rows: Vec<Vec<Cyclotomic>>| if rows.is_empty() { 0 } else { Matrix::from_rows(rows).rank() };
    rank(base) == rank(with)
}

fn substitute_all(p: &Poly, values: &[(Var, Poly)]) -> Result<Poly, FieldError> {
    values.iter().try_fold(p.clone(), |acc, (v, val)| acc.substitute(*v, val))
}

fn failure(what: &str) -> BraidError {
    BraidError::CertificateFailure(what.to_string())
}

/// Replays the elimination through H^x_{y,x,x}, H̄^x_{y,x,x}, H^x_{x,y,x}, H̄^x_{x,y,x}
/// and H^1_{x,x,x}, checking every derived identity exactly.
pub fn prove_no_braiding(f: &AssociatorSet) -> Result<NoBraidingCertificate, BraidError> {
    let ring = f.ring();
    if !ring.is_paper_ring() {
        return Err(BraidError::UnsupportedRing);
    }
    let fam = braiding_family(ring)?;
    let fp = symbolic(f);
    let b = f.block((X, X, Y, X))?.get(0, 1).clone();
    let d = f.block((X, X, X, ONE))?.get(0, 0).clone();
    let r_yx = fam.unknowns[&(Y, X, X)][0];
    let r_xy = fam.unknowns[&(X, Y, X)][0];
    let r_xy_inv = fam.inverse_vars[&(X, Y, X)];
    let r_yx_inv = fam.inverse_vars[&(Y, X, X)];
    let r_1 = fam.unknowns[&(X, X, ONE)][0];
    let kv = &fam.unknowns[&(X, X, X)];
    let (k, l, m, n) = (kv[0], kv[1], kv[2], kv[3]);
    let det_inv = fam.inverse_vars[&(X, X, X)];
    let nonzero: BTreeSet<Var> = [r_yx, r_xy, r_xy_inv, r_yx_inv, r_1, det_inv].into_iter().collect();
    let var = Poly::var;
    let c = |v: &Cyclotomic| Poly::constant(v.clone());
    let mut steps = Vec::new();
    let named = |inst: HexagonInstance| inst.name(ring);
    let eqs_of = |inst: HexagonInstance| instance_equations(&fp, &fam, inst);

    // r^x_{y,x} = b
    let [h1, h2, h3, h4, h5] = certificate_instances();
    let mut sys = fam.base.clone();
    sys.add_equations(eqs_of(h1)?);
    let value_yx = forced_value(&sys, r_yx, "r^x_{y,x}")?;
    if value_yx != b {
        return Err(failure("r^x_{y,x} is not b"));
    }
    steps.push(CertificateStep { instance: named(h1), constraint: format!("r^x_{{y,x}} = b = {b}") });

    // r^x_{x,y} = 1/b
    let mut sys = fam.base.clone();
    sys.add_equations(eqs_of(h2)?);
    sys.add_equation(fam.inverse_equations[&(X, Y, X)].clone());
    let value_xy = forced_value(&sys, r_xy, "r^x_{x,y}")?;
    if value_xy != b.inv()? {
        return Err(failure("r^x_{x,y} is not 1/b"));
    }
    steps.push(CertificateStep { instance: named(h2), constraint: format!("r^x_{{x,y}} = 1/b = {value_xy}") });

    // Linear relations on r^x_{x,x} = [[k, l], [m, n]].
    let known = [
        (r_yx, c(&value_yx)),
        (r_xy, c(&value_xy)),
        (r_yx_inv, c(&value_yx.inv()?)),
        (r_xy_inv, c(&value_yx)),
    ];
    let reduce = |eqs: Vec<Poly>| -> Result<Vec<Poly>, BraidError> {
        eqs.iter().map(|p| Ok(normalize(&substitute_all(p, &known)?, &nonzero))).filter(|p: &Result<Poly, BraidError>| p.as_ref().map_or(true, |p| !p.is_zero())).collect()
    };
    let e3 = reduce(eqs_of(h3)?)?;
    let n_from_xy = var(n).add(&var(k).scale(&value_xy));
    let m_from_xy = var(m).sub(&var(l).scale(&value_xy));
    if !in_span(&e3, &n_from_xy) || !in_span(&e3, &m_from_xy) {
        return Err(failure("H^x_{x,y,x} does not give −n = r^x_{x,y}k and m = r^x_{x,y}l"));
    }
    steps.push(CertificateStep { instance: named(h3), constraint: "−n = r^x_{x,y}·k and m = r^x_{x,y}·l".into() });

    let e4 = reduce(eqs_of(h4)?)?;
    let n_from_yx = var(n).add(&var(k).scale(&value_yx));
    if !in_span(&e4, &n_from_yx) {
        return Err(failure("H̄^x_{x,y,x} does not give −n = r^x_{y,x}k"));
    }
    steps.push(CertificateStep { instance: named(h4), constraint: "−n = r^x_{y,x}·k".into() });

    // (r^x_{x,y} − r^x_{y,x})·k = 0 with the difference nonzero.
    let gap = &value_xy - &value_yx;
    if gap.is_zero() {
        return Err(failure("r^x_{x,y} = r^x_{y,x}, so k and n are not forced to vanish"));
    }
    steps.push(CertificateStep { instance: format!("{} with {}", named(h3), named(h4)), constraint: format!("k = n = 0, since r^x_{{x,y}} − r^x_{{y,x}} = {gap} ≠ 0") });

    // H^1_{x,x,x} after k = n = 0 and m = l/b.
    let mut known5 = known.to_vec();
    known5.extend([(k, Poly::zero()), (n, Poly::zero()), (m, var(l).scale(&value_xy))]);
    let e5: Vec<Poly> = eqs_of(h5)?
        .iter()
        .map(|p| substitute_all(p, &known5))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|p| !p.is_zero())
        .collect();
    let one_plus_b = &Cyclotomic::one() + &b;
    let rhs = var(r_1).scale(&(&d * &one_plus_b));
    let l_sq = var(l).mul(&var(l));
    let first = l_sq.sub(&rhs);
    let second = l_sq.add(&rhs);
    if !in_span(&e5, &first) || !in_span(&e5, &second) {
        return Err(failure("H^1_{x,x,x} does not give l² = ±d·r^1_{x,x}(1+b)"));
    }
    steps.push(CertificateStep { instance: named(h5), constraint: "l² = d·r^1_{x,x}(b+1) and −b·l·m = d·r^1_{x,x}(1+b), so l² = −d·r^1_{x,x}(1+b)".into() });
    if d.is_zero() || one_plus_b.is_zero() {
        return Err(failure("d = 0 or b = −1, so the two values of l² can agree"));
    }
    Ok(NoBraidingCertificate {
        steps,
        contradiction: ("l² = d·r^1_{x,x}(1+b)".into(), "l² = −d·r^1_{x,x}(1+b)".into()),
        conclusion: format!("subtracting gives 2d·r^1_{{x,x}}(1+b) = 0, impossible with d = {d} ≠ 0, 1+b = {one_plus_b} ≠ 0 and r^1_{{x,x}} invertible"),
    })
}
