//! Staged solution of the pentagon system over the rank-3 ring {1, y, x}.
//!
//! Stage one solves the scalar equations, stage two the 2×2 blocks with
//! branch pruning, stage three the remaining blocks. Every stage runs the
//! exact elimination engine and records what it did.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::associator::{
    block_dim, instance_name, key_name, nontrivial_keys, pentagon_check, pentagon_instances, triangle_check,
    AssocError, AssociatorSet, Associators, BlockKey, Gauge,
};
use crate::cyclotomic::{Cyclotomic, FieldError};
use crate::elimination::{normalize, EliminationError, Leaf, System};
use crate::fusion_ring::strand::{ONE, X, Y};
use crate::fusion_ring::FusionRing;
use crate::matrix::{FieldMatrix, Matrix};
use crate::poly::{Poly, Var};
use crate::roots;

pub const ELIMINATION_BUDGET: usize = 200_000;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Assoc(#[from] AssocError),
    #[error(transparent)]
    Elimination(#[from] EliminationError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("solver incomplete: {0}")]
    SolverIncomplete(String),
    #[error("eigenvalues of {0} do not lie in Q(ζ₁₂)")]
    EigenvaluesOutsideField(String),
    #[error("this solver only handles the rank-3 ring with x⊗x = 1⊕y⊕2x")]
    UnsupportedRing,
}

pub type Instance = (usize, usize, usize, usize, usize);

/// g = a^x_{y,x,y}.
pub const G_KEY: BlockKey = (Y, X, Y, X);
/// h = a^1_{y,x,x}.
pub const H_KEY: BlockKey = (Y, X, X, ONE);
/// a^x_{x,y,x}.
pub const A_KEY: BlockKey = (X, Y, X, X);
/// a^x_{x,x,y}.
pub const B_KEY: BlockKey = (X, X, Y, X);
/// a^x_{y,x,x}.
pub const F_KEY: BlockKey = (Y, X, X, X);
/// a^1_{x,x,x}.
pub const D_KEY: BlockKey = (X, X, X, ONE);
/// a^y_{x,x,x}.
pub const E_KEY: BlockKey = (X, X, X, Y);
/// a^x_{x,x,x}.
pub const PHI_KEY: BlockKey = (X, X, X, X);

/// The scalars fixed to 1 by rescaling v^x_{yx}, v^1_{yy} and v^1_{xx}.
pub const SCALAR_NORMALIZATIONS: [BlockKey; 3] = [(Y, Y, X, X), (X, Y, X, ONE), (X, X, Y, ONE)];

fn require_paper_ring(ring: &FusionRing) -> Result<(), SolverError> {
    if ring.is_paper_ring() {
        Ok(())
    } else {
        Err(SolverError::UnsupportedRing)
    }
}

fn instance_dim(ring: &FusionRing, (x, y, z, w, u): Instance) -> usize {
    ring.hom_dim(&[x, y, z, w], u).unwrap_or(0) as usize
}

fn nontrivial_instances(ring: &FusionRing) -> Vec<Instance> {
    let one = ring.unit();
    pentagon_instances(ring).into_iter().filter(|&(x, y, z, w, _)| ![x, y, z, w].contains(&one)).collect()
}

fn symbolic_block(sys: &mut System, ring: &FusionRing, key: BlockKey, nonzero: bool) -> Matrix<Poly> {
    let n = block_dim(ring, key);
    let base = key_name(ring, key);
    Matrix::from_fn(n, n, |r, c| {
        let name = if n == 1 { base.clone() } else { format!("{base}[{r},{c}]") };
        let v = if nonzero { sys.nonzero_var(name) } else { sys.var(name) };
        Poly::var(v)
    })
}

fn constant_matrix(m: &FieldMatrix) -> Matrix<Poly> {
    m.map(|c| Poly::constant(c.clone()))
}

fn matrix_vars(m: &Matrix<Poly>) -> Vec<Var> {
    m.entries().map(|(_, _, p)| *p.vars().iter().next().expect("symbolic entry")).collect()
}

/// Entries of lhs − rhs for one instance, or `None` when a needed block is unset.
fn instance_equations(data: &Associators<Poly>, (x, y, z, w, u): Instance) -> Result<Option<Vec<Poly>>, AssocError> {
    match data.pentagon_instance(x, y, z, w, u) {
        Ok(Some((l, r))) => Ok(Some(l.sub(&r).entries().map(|(_, _, p)| p.clone()).filter(|p| !p.is_zero()).collect())),
        Ok(None) => Ok(Some(Vec::new())),
        Err(AssocError::MissingBlock(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Equations of every instance that can be built, in instance order.
fn collect_equations(data: &Associators<Poly>, instances: &[Instance]) -> Result<Vec<(Instance, Vec<Poly>)>, AssocError> {
    let results: Vec<Result<Option<Vec<Poly>>, AssocError>> =
        instances.par_iter().map(|&q| instance_equations(data, q)).collect();
    let mut out = Vec::new();
    for (res, &q) in results.into_iter().zip(instances) {
        if let Some(eqs) = res? {
            out.push((q, eqs));
        }
    }
    Ok(out)
}

fn dedup_normalized(eqs: impl IntoIterator<Item = Poly>, nonzero: &BTreeSet<Var>) -> Vec<Poly> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for e in eqs {
        let n = normalize(&e, nonzero);
        if !n.is_zero() && seen.insert(format!("{n:?}")) {
            out.push(n);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Stage one: scalar blocks

#[derive(Clone, Debug)]
pub struct ScalarEquation {
    pub instance: String,
    pub equation: String,
}

/// Result of the scalar stage.
#[derive(Clone, Debug)]
pub struct OneDimStage {
    /// Nontrivial instances whose hom space is 1-dimensional.
    pub raw_instances: usize,
    /// Those instances whose equation is not an identity.
    pub nontrivial_equations: usize,
    /// Distinct equations after clearing nonzero monomials, before normalization.
    pub distinct: Vec<ScalarEquation>,
    /// Every solution, one value per scalar block.
    pub solutions: Vec<BTreeMap<BlockKey, Cyclotomic>>,
    pub normalizations: Vec<String>,
    pub trace: Vec<String>,
}

impl OneDimStage {
    /// (g, h) of each solution.
    pub fn signs(&self) -> Vec<(Cyclotomic, Cyclotomic)> {
        self.solutions.iter().map(|s| (s[&G_KEY].clone(), s[&H_KEY].clone())).collect()
    }
}

pub fn scalar_keys(ring: &FusionRing) -> Vec<BlockKey> {
    nontrivial_keys(ring).into_iter().filter(|&k| block_dim(ring, k) == 1).collect()
}

pub fn solve_1dim() -> Result<OneDimStage, SolverError> {
    let ring = FusionRing::paper_ring();
    let keys = scalar_keys(&ring);
    let mut sys = System::new();
    let mut data: Associators<Poly> = Associators::new(ring.clone());
    let mut var_of = BTreeMap::new();
    for &k in &keys {
        let m = symbolic_block(&mut sys, &ring, k, true);
        var_of.insert(k, matrix_vars(&m)[0]);
        data.set(k, m)?;
    }
    let instances: Vec<Instance> =
        nontrivial_instances(&ring).into_iter().filter(|&q| instance_dim(&ring, q) == 1).collect();
    let equations = collect_equations(&data, &instances)?;
    let all_nonzero: BTreeSet<Var> = var_of.values().copied().collect();

    let mut nontrivial = 0;
    let mut seen = BTreeSet::new();
    let mut distinct = Vec::new();
    let mut raw = Vec::new();
    for ((x, y, z, w, u), eqs) in &equations {
        if eqs.is_empty() {
            continue;
        }
        nontrivial += 1;
        for e in eqs {
            let n = normalize(e, &all_nonzero);
            raw.push(e.clone());
            if seen.insert(format!("{n:?}")) {
                distinct.push(ScalarEquation {
                    instance: instance_name(&ring, "P", *u, &[*x, *y, *z, *w]),
                    equation: format!("{} = 0", sys.display(&n)),
                });
            }
        }
    }

    let mut normalizations = Vec::new();
    let mut solved = sys.clone();
    let mut fixed = BTreeMap::new();
    for k in SCALAR_NORMALIZATIONS {
        let v = var_of[&k];
        fixed.insert(v, Poly::one());
        normalizations.push(format!("{} = 1", key_name(&ring, k)));
    }
    let mut reduced = Vec::new();
    for e in &raw {
        let mut p = e.clone();
        for (v, val) in &fixed {
            p = p.substitute(*v, val)?;
        }
        reduced.push(p);
    }
    solved.add_equations(reduced);
    let elim = solved.solve(ELIMINATION_BUDGET)?;
    let trace = elim.render_trace(&solved);
    if !elim.stuck.is_empty() {
        return Err(SolverError::SolverIncomplete("scalar equations left unresolved".into()));
    }

    let mut solutions = Vec::new();
    for leaf in &elim.leaves {
        let free: Vec<Var> = leaf.free.iter().copied().filter(|v| !fixed.contains_key(v)).collect();
        if !free.is_empty() {
            let names: Vec<&str> = free.iter().map(|&v| sys.name(v)).collect();
            return Err(SolverError::SolverIncomplete(format!("scalar solution leaves {} free", names.join(", "))));
        }
        let mut params = BTreeMap::new();
        for v in fixed.keys() {
            params.insert(*v, Cyclotomic::one());
        }
        let values = leaf.evaluate(&params)?;
        solutions.push(keys.iter().map(|k| (*k, values[&var_of[k]].clone())).collect());
    }
    Ok(OneDimStage {
        raw_instances: instances.len(),
        nontrivial_equations: nontrivial,
        distinct,
        solutions,
        normalizations,
        trace,
    })
}

// ---------------------------------------------------------------------------
// Stage two: the 2×2 blocks a^x_{x,y,x}, a^x_{x,x,y}, a^x_{y,x,x}

/// Partially solved associator data: blocks with entries in the parameters.
#[derive(Clone, Debug)]
pub struct PentagonAnsatz {
    pub g: Cyclotomic,
    pub h: Cyclotomic,
    pub data: Associators<Poly>,
    pub system: System,
    /// Relations the parameters still have to satisfy.
    pub constraints: Vec<Poly>,
    pub normalizations: Vec<String>,
}

impl PentagonAnsatz {
    pub fn block(&self, key: BlockKey) -> Result<Matrix<Poly>, AssocError> {
        self.data.block(key)
    }

    pub fn render_block(&self, key: BlockKey) -> Result<String, AssocError> {
        let m = self.block(key)?;
        let rows: Vec<String> = (0..m.rows())
            .map(|r| {
                let cells: Vec<String> = m.row(r).iter().map(|p| self.system.display(p)).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        Ok(format!("[{}]", rows.join(", ")))
    }
}

impl fmt::Display for PentagonAnsatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = self.data.ring();
        writeln!(f, "g = {}, h = {}", self.g, self.h)?;
        for key in [A_KEY, B_KEY, F_KEY] {
            if let Ok(s) = self.render_block(key) {
                writeln!(f, "{} = {}", key_name(ring, key), s)?;
            }
        }
        for c in &self.constraints {
            writeln!(f, "constraint: {} = 0", self.system.display(c))?;
        }
        Ok(())
    }
}

/// A branch closed by a contradiction.
#[derive(Clone, Debug)]
pub struct PrunedBranch {
    pub branch: String,
    pub witness: String,
}

#[derive(Clone, Debug)]
pub struct TwoDimStage {
    pub survivors: Vec<PentagonAnsatz>,
    pub pruned: Vec<PrunedBranch>,
    /// Identities read off particular instances and used as extra equations.
    pub derived: Vec<String>,
    pub trace: Vec<String>,
}

/// Jordan forms allowed for a^x_{x,y,x} once it squares to the identity.
fn involution_forms() -> Vec<(&'static str, FieldMatrix)> {
    let one = Cyclotomic::one();
    let m1 = -&one;
    let z = Cyclotomic::zero();
    vec![
        ("I", FieldMatrix::identity(2)),
        ("-I", FieldMatrix::scalar(m1.clone()).kron(&FieldMatrix::identity(2))),
        ("diag(1,-1)", FieldMatrix::from_rows(vec![vec![one, z.clone()], vec![z, m1]])),
    ]
}

fn scalar_blocks<T: crate::matrix::Ring>(data: &mut Associators<T>, values: &BTreeMap<BlockKey, Cyclotomic>) -> Result<(), AssocError> {
    for (k, v) in values {
        data.set(*k, Matrix::scalar(T::from_field(v)))?;
    }
    Ok(())
}

fn either_sign(diff: &Matrix<Poly>, expected: &Matrix<Poly>) -> bool {
    diff == expected || *diff == expected.neg()
}

/// Checks that P^u_{x,y,z,w} reads `expected = 0` up to sign.
fn confirm_identity(
    data: &Associators<Poly>,
    q: Instance,
    expected: &Matrix<Poly>,
    statement: &str,
) -> Result<String, SolverError> {
    let (x, y, z, w, u) = q;
    let (l, r) = data.pentagon_instance(x, y, z, w, u)?.expect("instance is nonzero");
    let name = instance_name(data.ring(), "P", u, &[x, y, z, w]);
    if either_sign(&l.sub(&r), expected) {
        Ok(format!("{name}: {statement}"))
    } else {
        Err(SolverError::SolverIncomplete(format!("{name} does not have the form {statement}")))
    }
}

fn trace_det(m: &Matrix<Poly>) -> (Poly, Poly) {
    let tr = m.get(0, 0).add(m.get(1, 1));
    let det = m.get(0, 0).mul(m.get(1, 1)).sub(&m.get(0, 1).mul(m.get(1, 0)));
    (tr, det)
}

/// The identities A² = I, F·D·A = D and A·D·B = D, confirmed symbolically
/// for one sign choice.
fn derive_identities(values: &BTreeMap<BlockKey, Cyclotomic>) -> Result<Vec<String>, SolverError> {
    let ring = FusionRing::paper_ring();
    let mut sys = System::new();
    let mut data: Associators<Poly> = Associators::new(ring.clone());
    scalar_blocks(&mut data, values)?;
    let a = symbolic_block(&mut sys, &ring, A_KEY, false);
    let b = symbolic_block(&mut sys, &ring, B_KEY, false);
    let f = symbolic_block(&mut sys, &ring, F_KEY, false);
    let d = symbolic_block(&mut sys, &ring, D_KEY, false);
    for (k, m) in [(A_KEY, &a), (B_KEY, &b), (F_KEY, &f), (D_KEY, &d)] {
        data.set(k, m.clone())?;
    }
    let id = Matrix::<Poly>::identity(2);
    let mut out = Vec::new();
    out.push(confirm_identity(&data, (X, Y, Y, X, X), &a.mul(&a).sub(&id), "a^x_{x,y,x}² = I")?);
    out.push(confirm_identity(
        &data,
        (X, Y, X, X, ONE),
        &f.mul(&d).mul(&a).sub(&d),
        "a^x_{y,x,x}·a^1_{x,x,x}·a^x_{x,y,x} = a^1_{x,x,x}",
    )?);
    out.push(confirm_identity(
        &data,
        (X, X, Y, X, ONE),
        &a.mul(&d).mul(&b).sub(&d),
        "a^x_{x,y,x}·a^1_{x,x,x}·a^x_{x,x,y} = a^1_{x,x,x}",
    )?);
    Ok(out)
}

/// Unknown blocks a^1_{x,x,x}, a^y_{x,x,x}, a^x_{x,x,x} as fresh variables.
struct LargeBlocks {
    d: Matrix<Poly>,
    e: Matrix<Poly>,
    phi: Matrix<Poly>,
}

impl LargeBlocks {
    fn new(sys: &mut System, ring: &FusionRing) -> Self {
        LargeBlocks {
            d: symbolic_block(sys, ring, D_KEY, false),
            e: symbolic_block(sys, ring, E_KEY, false),
            phi: symbolic_block(sys, ring, PHI_KEY, false),
        }
    }

    fn vars(&self) -> Vec<Var> {
        let mut v = matrix_vars(&self.d);
        v.extend(matrix_vars(&self.e));
        v.extend(matrix_vars(&self.phi));
        v
    }

    fn install(&self, data: &mut Associators<Poly>) -> Result<(), AssocError> {
        data.set(D_KEY, self.d.clone())?;
        data.set(E_KEY, self.e.clone())?;
        data.set(PHI_KEY, self.phi.clone())
    }
}

/// Affine solution of the linear equations: each unknown as a polynomial of
/// degree ≤ 1 in the remaining free unknowns.
struct LinearSolution {
    values: BTreeMap<Var, Poly>,
}

enum LinearOutcome {
    Solved(LinearSolution),
    Inconsistent,
}

fn is_affine_in(p: &Poly, unknowns: &BTreeSet<Var>) -> bool {
    p.terms().all(|(m, _)| {
        let f = m.factors();
        f.is_empty() || (f.len() == 1 && f[0].1 == 1 && unknowns.contains(&f[0].0))
    })
}

fn solve_linear(eqs: &[Poly], unknowns: &[Var]) -> LinearOutcome {
    let col: BTreeMap<Var, usize> = unknowns.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let n = unknowns.len();
    let m = FieldMatrix::from_fn(eqs.len(), n + 1, |r, c| {
        let e = &eqs[r];
        if c == n {
            return -&e.constant_term();
        }
        e.coefficient(unknowns[c], 1).as_constant().unwrap_or_else(Cyclotomic::zero)
    });
    let (red, pivots) = m.rref();
    if pivots.contains(&n) {
        return LinearOutcome::Inconsistent;
    }
    let mut values = BTreeMap::new();
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    for &v in unknowns {
        if !pivot_set.contains(&col[&v]) {
            values.insert(v, Poly::var(v));
        }
    }
    for (row, &pc) in pivots.iter().enumerate() {
        let mut value = Poly::constant(red.get(row, n).clone());
        for c in 0..n {
            if c != pc && !pivot_set.contains(&c) && !red.get(row, c).is_zero() {
                value = value.sub(&Poly::var(unknowns[c]).scale(red.get(row, c)));
            }
        }
        values.insert(unknowns[pc], value);
    }
    LinearOutcome::Solved(LinearSolution { values })
}

impl LinearSolution {
    fn apply(&self, m: &Matrix<Poly>) -> Matrix<Poly> {
        m.map(|p| {
            let v = *p.vars().iter().next().expect("symbolic entry");
            self.values[&v].clone()
        })
    }
}

fn is_zero_column(m: &Matrix<Poly>, c: usize) -> bool {
    (0..m.rows()).all(|r| m.get(r, c).is_zero())
}

fn proportional_columns(m: &Matrix<Poly>, a: usize, b: usize) -> bool {
    for r in 0..m.rows() {
        for s in r + 1..m.rows() {
            let minor = m.get(r, a).mul(m.get(s, b)).sub(&m.get(s, a).mul(m.get(r, b)));
            if !minor.is_zero() {
                return false;
            }
        }
    }
    true
}

/// A reason the block is singular for every value of the free unknowns.
fn singularity_witness(m: &Matrix<Poly>, name: &str) -> Option<String> {
    for c in 0..m.cols() {
        if is_zero_column(m, c) {
            return Some(format!("column {} of {name} vanishes, so det {name} = 0", c + 1));
        }
    }
    for a in 0..m.cols() {
        for b in a + 1..m.cols() {
            if proportional_columns(m, a, b) {
                return Some(format!("columns {} and {} of {name} are proportional, so det {name} = 0", a + 1, b + 1));
            }
        }
    }
    if m.det_expansion().is_zero() {
        return Some(format!("det {name} = 0 identically"));
    }
    None
}

/// Linear equations over the large blocks, given concrete smaller blocks.
fn linear_large_stage(
    base: &Associators<Poly>,
    large: &LargeBlocks,
    extra: &[Poly],
) -> Result<(LinearOutcome, Vec<Poly>), SolverError> {
    let ring = base.ring().clone();
    let mut data = base.clone();
    large.install(&mut data)?;
    let unknowns = large.vars();
    let unknown_set: BTreeSet<Var> = unknowns.iter().copied().collect();
    let eqs = collect_equations(&data, &nontrivial_instances(&ring))?;
    let mut linear: Vec<Poly> = extra.to_vec();
    let mut nonlinear = Vec::new();
    for (_, es) in eqs {
        for e in es {
            if e.is_constant() {
                return Ok((LinearOutcome::Inconsistent, Vec::new()));
            }
            if is_affine_in(&e, &unknown_set) {
                linear.push(e);
            } else {
                nonlinear.push(e);
            }
        }
    }
    Ok((solve_linear(&linear, &unknowns), nonlinear))
}

/// Why no invertible large blocks exist, if the linear equations already decide it.
fn prune_large(base: &Associators<Poly>, sys: &System, ring: &FusionRing) -> Result<Option<String>, SolverError> {
    let mut sys = sys.clone();
    let large = LargeBlocks::new(&mut sys, ring);
    let (outcome, _) = linear_large_stage(base, &large, &[])?;
    let sol = match outcome {
        LinearOutcome::Inconsistent => return Ok(Some("the linear equations on the large blocks are inconsistent".into())),
        LinearOutcome::Solved(s) => s,
    };
    for (m, key) in [(&large.phi, PHI_KEY), (&large.d, D_KEY), (&large.e, E_KEY)] {
        if let Some(w) = singularity_witness(&sol.apply(m), &key_name(ring, key)) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

pub fn solve_2dim(stage1: &OneDimStage) -> Result<TwoDimStage, SolverError> {
    let ring = FusionRing::paper_ring();
    let mut survivors = Vec::new();
    let mut pruned = Vec::new();
    let mut derived = Vec::new();
    let mut trace = Vec::new();
    for values in &stage1.solutions {
        let g = values[&G_KEY].clone();
        let h = values[&H_KEY].clone();
        let ids = derive_identities(values)?;
        if derived.is_empty() {
            derived = ids;
        }
        for (a_name, a) in involution_forms() {
            let branch = format!("g = {g}, h = {h}, a^x_{{x,y,x}} = {a_name}");
            trace.push(format!("branch {branch}"));
            let mut sys = System::new();
            let mut data: Associators<Poly> = Associators::new(ring.clone());
            scalar_blocks(&mut data, values)?;
            data.set(A_KEY, constant_matrix(&a))?;
            let f = symbolic_block(&mut sys, &ring, F_KEY, false);
            let b = symbolic_block(&mut sys, &ring, B_KEY, false);
            let f_inv_det = sys.nonzero_var("1/det a^x_{y,x,x}");
            let b_inv_det = sys.nonzero_var("1/det a^x_{x,x,y}");
            data.set(F_KEY, f.clone())?;
            data.set(B_KEY, b.clone())?;

            let eqs = collect_equations(&data, &nontrivial_instances(&ring))?;
            for (_, es) in eqs {
                sys.add_equations(es);
            }
            let (tr_f, det_f) = trace_det(&f);
            let (tr_b, det_b) = trace_det(&b);
            sys.add_equation(det_f.mul(&Poly::var(f_inv_det)).sub(&Poly::one()));
            sys.add_equation(det_b.mul(&Poly::var(b_inv_det)).sub(&Poly::one()));
            // a^x_{y,x,x} and a^x_{x,x,y} are conjugate to the inverse of a^x_{x,y,x}.
            let a_inv = a.inverse().expect("involution");
            let tr_inv = Poly::constant(a_inv.get(0, 0) + a_inv.get(1, 1));
            let det_inv = Poly::constant(a_inv.det());
            sys.add_equations([tr_f.sub(&tr_inv), det_f.sub(&det_inv), tr_b.sub(&tr_inv), det_b.sub(&det_inv)]);

            let elim = sys.solve(ELIMINATION_BUDGET)?;
            trace.extend(elim.render_trace(&sys).into_iter().map(|l| format!("  {l}")));
            if !elim.stuck.is_empty() {
                let eqs: Vec<String> = elim.stuck[0].iter().map(|e| sys.display(e)).collect();
                return Err(SolverError::SolverIncomplete(format!("branch {branch} is stuck at {}", eqs.join("; "))));
            }
            if elim.leaves.is_empty() {
                let cases = elim.contradictions().count();
                let witness = format!("no invertible a^x_{{y,x,x}}, a^x_{{x,x,y}}: all {cases} cases of the elimination contradict");
                pruned.push(PrunedBranch { branch, witness });
                continue;
            }
            for leaf in &elim.leaves {
                let ansatz = leaf_ansatz(&ring, values, &a, &sys, leaf, &f, &b)?;
                let leaf_name = format!(
                    "{branch}, a^x_{{y,x,x}} = {}, a^x_{{x,x,y}} = {}",
                    ansatz.render_block(F_KEY)?,
                    ansatz.render_block(B_KEY)?
                );
                let normalized = normalize_rescaling(&ansatz)?;
                match prune_large(&normalized.data, &normalized.system, &ring)? {
                    Some(w) => pruned.push(PrunedBranch { branch: leaf_name, witness: w }),
                    None => survivors.push(ansatz),
                }
            }
        }
    }
    Ok(TwoDimStage { survivors, pruned, derived, trace })
}

fn leaf_ansatz(
    ring: &FusionRing,
    values: &BTreeMap<BlockKey, Cyclotomic>,
    a: &FieldMatrix,
    sys: &System,
    leaf: &Leaf,
    f: &Matrix<Poly>,
    b: &Matrix<Poly>,
) -> Result<PentagonAnsatz, SolverError> {
    let sol = leaf.symbolic_values()?;
    let subst = |m: &Matrix<Poly>| -> Matrix<Poly> {
        m.map(|p| {
            let v = *p.vars().iter().next().expect("symbolic entry");
            sol.get(&v).cloned().unwrap_or_else(|| p.clone())
        })
    };
    let mut data: Associators<Poly> = Associators::new(ring.clone());
    scalar_blocks(&mut data, values)?;
    data.set(A_KEY, constant_matrix(a))?;
    data.set(F_KEY, subst(f))?;
    data.set(B_KEY, subst(b))?;
    let mut system = System::new();
    for n in sys.names() {
        system.var(n.clone());
    }
    Ok(PentagonAnsatz {
        g: values[&G_KEY].clone(),
        h: values[&H_KEY].clone(),
        data,
        system,
        constraints: leaf.conditions.clone(),
        normalizations: Vec::new(),
    })
}

/// Rescales v_1 against v_2 so that a^x_{y,x,x}[0,1] = 1 when it is a free parameter.
fn normalize_rescaling(ansatz: &PentagonAnsatz) -> Result<PentagonAnsatz, SolverError> {
    let f = ansatz.block(F_KEY)?;
    let mut params = BTreeSet::new();
    for key in [F_KEY, B_KEY] {
        for (_, _, p) in ansatz.block(key)?.entries() {
            params.extend(p.vars());
        }
    }
    if params.is_empty() {
        return Ok(ansatz.clone());
    }
    let corner = f.get(0, 1);
    let Some((m, c)) = corner.as_term() else {
        return Err(SolverError::SolverIncomplete(format!(
            "a^x_{{y,x,x}}[0,1] = {} is not a single free parameter",
            ansatz.system.display(corner)
        )));
    };
    let factors = m.factors();
    if factors.len() != 1 || factors[0].1.abs() != 1 || params.len() != 1 {
        return Err(SolverError::SolverIncomplete(format!(
            "cannot normalize a^x_{{y,x,x}}[0,1] = {}",
            ansatz.system.display(corner)
        )));
    }
    // c·v^{±1} = 1
    let (v, e) = factors[0];
    let value = c.inv()?.pow(e as i64)?;
    let one = Poly::constant(value);
    let data = ansatz.data.try_map(|p| p.substitute(v, &one))?;
    let constraints = ansatz.constraints.iter().map(|p| p.substitute(v, &one)).collect::<Result<_, _>>()?;
    let mut normalizations = ansatz.normalizations.clone();
    normalizations.push("a^x_{y,x,x}[0,1] = 1".into());
    Ok(PentagonAnsatz { data, constraints, normalizations, ..ansatz.clone() })
}

// ---------------------------------------------------------------------------
// Stage three: a^1_{x,x,x}, a^y_{x,x,x}, a^x_{x,x,x}

#[derive(Clone, Debug)]
pub struct FinalStage {
    pub solutions: Vec<AssociatorSet>,
    /// Per surviving ansatz: the large blocks after the linear equations, rendered.
    pub shapes: Vec<String>,
    pub normalizations: Vec<String>,
    pub trace: Vec<String>,
}

fn render_matrix(sys: &System, m: &Matrix<Poly>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|r| {
            let cells: Vec<String> = m.row(r).iter().map(|p| sys.display(p)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Rows 2.. of the first column of a^x_{x,x,x} pair v^x_{xy}-type paths; this entry is set to 1.
pub const XPARAM_ENTRY: (usize, usize) = (2, 0);

/// Solves one surviving ansatz completely, verifying each solution exactly.
pub fn solve_ansatz(ansatz: &PentagonAnsatz) -> Result<FinalStage, SolverError> {
    let ring = ansatz.data.ring().clone();
    let normalized = normalize_rescaling(ansatz)?;
    let mut normalizations = normalized.normalizations.clone();
    let mut sys = normalized.system.clone();
    let large = LargeBlocks::new(&mut sys, &ring);
    let (r, c) = XPARAM_ENTRY;
    let xparam = large.phi.get(r, c).sub(&Poly::one());
    normalizations.push(format!("a^x_{{x,x,x}}[{r},{c}] = 1"));
    let (outcome, _) = linear_large_stage(&normalized.data, &large, &[xparam])?;
    let LinearOutcome::Solved(lin) = outcome else {
        return Err(SolverError::SolverIncomplete("linear equations on the large blocks are inconsistent".into()));
    };
    let d = lin.apply(&large.d);
    let e = lin.apply(&large.e);
    let phi = lin.apply(&large.phi);
    let shape = format!(
        "a^1_{{x,x,x}} = {}\na^y_{{x,x,x}} = {}\na^x_{{x,x,x}} = {}",
        render_matrix(&sys, &d),
        render_matrix(&sys, &e),
        render_matrix(&sys, &phi)
    );

    let mut data = normalized.data.clone();
    data.set(D_KEY, d.clone())?;
    data.set(E_KEY, e.clone())?;
    data.set(PHI_KEY, phi.clone())?;
    let eqs = collect_equations(&data, &nontrivial_instances(&ring))?;
    let mut solver = sys.clone();
    solver.add_equations(dedup_normalized(eqs.into_iter().flat_map(|(_, es)| es), &BTreeSet::new()));
    for m in [&d, &e, &phi] {
        solver.require_nonzero(m.det_expansion());
    }
    let elim = solver.solve(ELIMINATION_BUDGET)?;
    let mut trace = vec![format!("ansatz g = {}, h = {}", ansatz.g, ansatz.h)];
    trace.extend(elim.render_trace(&solver).into_iter().map(|l| format!("  {l}")));
    if !elim.stuck.is_empty() {
        let eqs: Vec<String> = elim.stuck[0].iter().map(|e| solver.display(e)).collect();
        return Err(SolverError::SolverIncomplete(format!("large blocks stuck at {}", eqs.join("; "))));
    }

    let mut solutions = Vec::new();
    for leaf in &elim.leaves {
        let unknowns: BTreeSet<Var> = data.stored().values().flat_map(|m| m.entries().flat_map(|(_, _, p)| p.vars())).collect();
        if leaf.free.iter().any(|v| unknowns.contains(v)) {
            return Err(SolverError::SolverIncomplete("a solution family with free parameters remains".into()));
        }
        let values = leaf.evaluate(&BTreeMap::new())?;
        let set = data.try_map(|p| -> Result<Cyclotomic, SolverError> {
            p.evaluate(&values)?.ok_or_else(|| SolverError::SolverIncomplete("unassigned parameter".into()))
        })?;
        let report = pentagon_check(&set)?;
        if !report.is_empty() || !triangle_check(&set).is_empty() || !set.singular_blocks().is_empty() {
            return Err(SolverError::SolverIncomplete(format!("candidate failed exact verification:\n{report}")));
        }
        solutions.push(set);
    }
    Ok(FinalStage { solutions, shapes: vec![shape], normalizations, trace })
}

pub fn solve_final(stage2: &TwoDimStage) -> Result<FinalStage, SolverError> {
    let mut out = FinalStage { solutions: Vec::new(), shapes: Vec::new(), normalizations: Vec::new(), trace: Vec::new() };
    for ansatz in &stage2.survivors {
        let part = solve_ansatz(ansatz)?;
        out.solutions.extend(part.solutions);
        out.shapes.extend(part.shapes);
        if out.normalizations.is_empty() {
            out.normalizations = part.normalizations;
        }
        out.trace.extend(part.trace);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Named parameters, Galois orbit, invariants, equivalence

/// The scalars naming a solution: a^x_{x,x,y} = [[0, b], [1/b, 0]],
/// a^x_{y,x,x} = [[0, f], [1/f, 0]], a^1_{x,x,x} = d·[[1, b], [1, −b]], and the
/// entries φ, w, x, z, y of a^x_{x,x,x} at (0,0), (0,3), (2,0), (2,3), (2,4).
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionParameters {
    pub b: Cyclotomic,
    pub f: Cyclotomic,
    pub phi: Cyclotomic,
    pub d: Cyclotomic,
    pub w: Cyclotomic,
    pub y: Cyclotomic,
    pub z: Cyclotomic,
    pub xparam: Cyclotomic,
}

pub fn parameters(set: &AssociatorSet) -> Result<SolutionParameters, SolverError> {
    require_paper_ring(set.ring())?;
    let b = set.block(B_KEY)?;
    let f = set.block(F_KEY)?;
    let d = set.block(D_KEY)?;
    let phi = set.block(PHI_KEY)?;
    Ok(SolutionParameters {
        b: b.get(0, 1).clone(),
        f: f.get(0, 1).clone(),
        phi: phi.get(0, 0).clone(),
        d: d.get(0, 0).clone(),
        w: phi.get(0, 3).clone(),
        y: phi.get(2, 4).clone(),
        z: phi.get(2, 3).clone(),
        xparam: phi.get(2, 0).clone(),
    })
}

pub const GALOIS_EXPONENTS: [i64; 4] = [1, 5, 7, 11];

/// σ_k applied entrywise for k = 1, 5, 7, 11, in that order.
pub fn galois_orbit(set: &AssociatorSet) -> Result<Vec<AssociatorSet>, SolverError> {
    GALOIS_EXPONENTS.iter().map(|&k| Ok(set.galois(k)?)).collect()
}

/// Quantities unchanged by every change of basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeInvariants {
    /// Eigenvalues of a^1_{x,x,x}, sorted, with multiplicity.
    pub eig1: (Cyclotomic, Cyclotomic),
    /// a^x_{x,x,x}[0,0].
    pub corner: Cyclotomic,
    /// g = a^x_{y,x,y} and h·a^1_{x,y,x}·a^1_{x,x,y}, which is h after normalization.
    pub signs: (Cyclotomic, Cyclotomic),
}

impl fmt::Display for GaugeInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "eigenvalues of a^1_{{x,x,x}}: {{{}, {}}}; a^x_{{x,x,x}}[0,0] = {}; g = {}, h = {}",
            self.eig1.0, self.eig1.1, self.corner, self.signs.0, self.signs.1
        )
    }
}

fn scalar(set: &AssociatorSet, key: BlockKey) -> Result<Cyclotomic, SolverError> {
    Ok(set.block(key)?.get(0, 0).clone())
}

pub fn invariants(set: &AssociatorSet) -> Result<GaugeInvariants, SolverError> {
    require_paper_ring(set.ring())?;
    let d = set.block(D_KEY)?;
    let tr = d.get(0, 0) + d.get(1, 1);
    let det = d.det();
    // λ² − tr·λ + det
    let charpoly = vec![det, -&tr, Cyclotomic::one()];
    let rts = roots::roots_in_field(&charpoly)?;
    let eig1 = match rts.as_slice() {
        [r] => (r.clone(), r.clone()),
        [r, s] => (r.clone(), s.clone()),
        _ => return Err(SolverError::EigenvaluesOutsideField(key_name(set.ring(), D_KEY))),
    };
    let corner = set.block(PHI_KEY)?.get(0, 0).clone();
    let g = scalar(set, G_KEY)?;
    let h = &(&scalar(set, H_KEY)? * &scalar(set, (X, Y, X, ONE))?) * &scalar(set, (X, X, Y, ONE))?;
    Ok(GaugeInvariants { eig1, corner, signs: (g, h) })
}

#[derive(Clone, Debug)]
pub enum Equivalence {
    /// gauge_transform(first, gauge) equals the second set exactly.
    Equivalent { gauge: Gauge<Cyclotomic> },
    Inequivalent { invariant: String },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent { .. })
    }
}

/// Spaces V^z_{xy} with x, y not the unit: the full gauge family.
fn gauge_spaces(ring: &FusionRing) -> Vec<(usize, usize, usize)> {
    let one = ring.unit();
    let mut out = Vec::new();
    for x in 0..ring.rank() {
        for y in 0..ring.rank() {
            for z in 0..ring.rank() {
                if x != one && y != one && ring.n(x, y, z) > 0 {
                    out.push((x, y, z));
                }
            }
        }
    }
    out
}

/// Small values tried for parameters a gauge family leaves free.
const PARAMETER_TRIALS: [i64; 6] = [1, 2, 3, -1, 5, 7];

pub fn equivalent(first: &AssociatorSet, second: &AssociatorSet) -> Result<Equivalence, SolverError> {
    if first.ring() != second.ring() {
        return Ok(Equivalence::Inequivalent { invariant: "different fusion rings".into() });
    }
    let ring = first.ring().clone();
    if require_paper_ring(&ring).is_ok() {
        let (a, b) = (invariants(first)?, invariants(second)?);
        if a.eig1 != b.eig1 {
            return Ok(Equivalence::Inequivalent {
                invariant: format!("eigenvalues of a^1_{{x,x,x}}: {{{}, {}}} vs {{{}, {}}}", a.eig1.0, a.eig1.1, b.eig1.0, b.eig1.1),
            });
        }
        if a.corner != b.corner {
            return Ok(Equivalence::Inequivalent { invariant: format!("a^x_{{x,x,x}}[0,0]: {} vs {}", a.corner, b.corner) });
        }
        if a.signs != b.signs {
            return Ok(Equivalence::Inequivalent {
                invariant: format!("signs (g, h): ({}, {}) vs ({}, {})", a.signs.0, a.signs.1, b.signs.0, b.signs.1),
            });
        }
    }

    let mut sys = System::new();
    let mut gauge: Gauge<Poly> = Gauge::identity();
    for (x, y, z) in gauge_spaces(&ring) {
        let n = ring.n(x, y, z) as usize;
        let name = format!("G^{}_{{{},{}}}", ring.label(z), ring.label(x), ring.label(y));
        let m = Matrix::from_fn(n, n, |r, c| {
            let label = if n == 1 { name.clone() } else { format!("{name}[{r},{c}]") };
            Poly::var(if n == 1 { sys.nonzero_var(label) } else { sys.var(label) })
        });
        if n > 1 {
            let inv = sys.nonzero_var(format!("1/det {name}"));
            sys.add_equation(m.det_expansion().mul(&Poly::var(inv)).sub(&Poly::one()));
        }
        gauge.blocks.insert((x, y, z), m);
    }
    for key in nontrivial_keys(&ring) {
        let a1 = constant_matrix(&first.block(key)?);
        let a2 = constant_matrix(&second.block(key)?);
        let (tr, tl) = gauge.block_factors(&ring, key);
        for (_, _, p) in tr.mul(&a1).sub(&a2.mul(&tl)).entries() {
            sys.add_equation(p.clone());
        }
    }
    let elim = sys.solve(ELIMINATION_BUDGET)?;
    if elim.is_inconsistent() {
        return Ok(Equivalence::Inequivalent { invariant: "no change of basis solves T_R·α₁ = α₂·T_L".into() });
    }
    for leaf in &elim.leaves {
        for trial in 0..PARAMETER_TRIALS.len() {
            let params: BTreeMap<Var, Cyclotomic> = leaf
                .free
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, Cyclotomic::from_integer(PARAMETER_TRIALS[(i + trial) % PARAMETER_TRIALS.len()])))
                .collect();
            let Ok(values) = leaf.evaluate(&params) else { continue };
            let Ok(concrete) = gauge_from(&gauge, &values) else { continue };
            if concrete.validate(&ring).is_err() {
                continue;
            }
            if crate::associator::gauge_transform(first, &concrete)? == *second {
                return Ok(Equivalence::Equivalent { gauge: concrete });
            }
        }
    }
    if !elim.stuck.is_empty() {
        return Err(SolverError::SolverIncomplete("gauge search did not close".into()));
    }
    Err(SolverError::SolverIncomplete("gauge family found but no trial value verified".into()))
}

fn gauge_from(gauge: &Gauge<Poly>, values: &BTreeMap<Var, Cyclotomic>) -> Result<Gauge<Cyclotomic>, SolverError> {
    let mut out = Gauge::identity();
    for (&k, m) in &gauge.blocks {
        let c = m.try_map(|p| -> Result<Cyclotomic, SolverError> {
            p.evaluate(values)?.ok_or_else(|| SolverError::SolverIncomplete("unassigned gauge entry".into()))
        })?;
        out.blocks.insert(k, c);
    }
    Ok(out)
}

/// Every stage in sequence.
#[derive(Clone, Debug)]
pub struct Classification {
    pub one_dim: OneDimStage,
    pub two_dim: TwoDimStage,
    pub last: FinalStage,
}

impl Classification {
    /// The solution with b = i whose corner φ is positive under ζ ↦ e^{πi/6}.
    pub fn distinguished(&self) -> Option<&AssociatorSet> {
        self.last.solutions.iter().find(|s| {
            parameters(s).is_ok_and(|p| p.b == Cyclotomic::i() && p.phi.embed_numeric().re > 0.0)
        })
    }
}

pub fn solve_pentagon() -> Result<Classification, SolverError> {
    let one_dim = solve_1dim()?;
    let two_dim = solve_2dim(&one_dim)?;
    let last = solve_final(&two_dim)?;
    Ok(Classification { one_dim, two_dim, last })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::associator::gauge_transform;
    use crate::reference;
    use std::sync::OnceLock;

    fn classification() -> &'static Classification {
        static CELL: OnceLock<Classification> = OnceLock::new();
        CELL.get_or_init(|| solve_pentagon().expect("classification succeeds"))
    }

    fn c(n: i64) -> Cyclotomic {
        Cyclotomic::from_integer(n)
    }

    #[test]
    fn scalar_stage_counts_and_solutions() {
        let s = &classification().one_dim;
        assert_eq!(s.raw_instances, 17);
        assert_eq!(s.solutions.len(), 4);
        let mut signs: Vec<(String, String)> = s.signs().iter().map(|(g, h)| (g.to_string(), h.to_string())).collect();
        signs.sort();
        assert_eq!(signs, vec![("-1".into(), "-1".into()), ("-1".into(), "1".into()), ("1".into(), "-1".into()), ("1".into(), "1".into())]);
        for sol in &s.solutions {
            assert!(sol[&(Y, Y, Y, Y)].is_one());
            assert!((&sol[&G_KEY] * &sol[&G_KEY]).is_one());
        }
    }

    #[test]
    fn listed_scalar_relations_hold() {
        let s = &classification().one_dim;
        for sol in &s.solutions {
            let a = |x, y, z, u| sol[&(x, y, z, u)].clone();
            let one = Cyclotomic::one();
            let checks = [
                (&a(Y, Y, Y, Y) * &a(X, Y, Y, X), a(X, Y, Y, X)),
                (&(&a(X, Y, Y, X) * &a(X, X, Y, ONE)) * &a(X, X, Y, Y), one.clone()),
                (&a(Y, X, Y, X) * &a(X, Y, X, Y), a(X, Y, X, ONE)),
                (&a(Y, X, Y, X) * &a(X, Y, X, ONE), a(X, Y, X, Y)),
                (&a(Y, Y, X, X) * &a(X, Y, Y, X), &a(X, Y, X, ONE) * &a(X, Y, X, ONE)),
                (&a(Y, Y, X, X) * &a(X, Y, Y, X), &a(X, Y, X, Y) * &a(X, Y, X, Y)),
                (&a(Y, X, Y, X) * &a(Y, X, Y, X), one.clone()),
                (&(&a(Y, X, X, Y) * &a(Y, X, X, ONE)) * &a(Y, Y, X, X), one.clone()),
                (&a(X, X, Y, Y) * &a(Y, X, X, Y), &a(Y, X, X, ONE) * &a(X, X, Y, ONE)),
            ];
            for (i, (l, r)) in checks.iter().enumerate() {
                assert_eq!(l, r, "relation {i}");
            }
        }
    }

    #[test]
    fn block_identities_are_read_off_instances() {
        let d = &classification().two_dim.derived;
        assert_eq!(d.len(), 3);
        assert!(d[0].starts_with("P^x_{x,y,y,x}"));
    }

    #[test]
    fn only_one_branch_survives() {
        let s = &classification().two_dim;
        assert_eq!(s.survivors.len(), 2);
        let minus = -&Cyclotomic::one();
        let diag = FieldMatrix::from_ints(&[&[1, 0], &[0, -1]]);
        for a in &s.survivors {
            assert_eq!(a.g, minus);
            assert!(a.h.is_one());
            assert_eq!(a.block(A_KEY).unwrap(), constant_matrix(&diag));
            let f = a.block(F_KEY).unwrap();
            let b = a.block(B_KEY).unwrap();
            assert!(f.get(0, 0).is_zero() && f.get(1, 1).is_zero());
            assert!(b.get(0, 0).is_zero() && b.get(1, 1).is_zero());
            assert!(f.get(0, 1).mul(f.get(1, 0)).sub(&Poly::one()).is_zero());
            assert!(b.get(0, 1).mul(b.get(1, 0)).sub(&Poly::one()).is_zero());
            // f² + b² = 0
            assert!(f.get(0, 1).pow(2).add(&b.get(0, 1).pow(2)).is_zero());
        }
    }

    #[test]
    fn pruned_branches_carry_witnesses() {
        let s = &classification().two_dim;
        let find = |needle: &str| s.pruned.iter().filter(|p| p.branch.contains(needle)).collect::<Vec<_>>();
        let identity = find("g = 1, h = 1, a^x_{x,y,x} = I,");
        assert_eq!(identity.len(), 1);
        assert!(identity[0].witness.contains("det a^x_{x,x,x} = 0"), "{}", identity[0].witness);
        let h_minus = find("g = -1, h = -1, a^x_{x,y,x} = diag(1,-1)");
        assert_eq!(h_minus.len(), 2);
        for p in h_minus {
            assert!(p.witness.starts_with("column 1 of a^x_{x,x,x} vanishes"), "{}", p.witness);
        }
        for p in find("g = 1,") {
            assert!(p.witness.contains("a^x_{x,x,x}"));
        }
        for p in find("g = -1, h = 1, a^x_{x,y,x} = I") {
            assert!(p.witness.contains("contradict"));
        }
    }

    #[test]
    fn four_verified_solutions_forming_one_orbit() {
        let sols = &classification().last.solutions;
        assert_eq!(sols.len(), 4);
        for s in sols {
            assert!(pentagon_check(s).unwrap().is_empty());
            assert!(triangle_check(s).is_empty());
        }
        let orbit = galois_orbit(&reference::reference_solution()).unwrap();
        for g in &orbit {
            assert!(sols.contains(g));
        }
    }

    #[test]
    fn named_parameters_of_the_reference_solution() {
        let sols = &classification().last.solutions;
        let params: Vec<SolutionParameters> = sols.iter().map(|s| parameters(s).unwrap()).collect();
        let p = params.iter().find(|p| p.b == Cyclotomic::i() && p.phi == reference::phi()).expect("b = i, φ = (−1+√3)/2");
        assert_eq!(parameters(classification().distinguished().unwrap()).unwrap(), *p);
        assert_eq!(p.d, reference::d());
        assert_eq!(p.w, reference::w());
        assert_eq!(p.y, reference::y());
        assert_eq!(p.z, reference::z_param());
        assert!(p.f.is_one() && p.xparam.is_one());
    }

    #[test]
    fn galois_orbit_images() {
        let r = reference::reference_solution();
        let orbit = galois_orbit(&r).unwrap();
        assert_eq!(orbit[0], r);
        assert_eq!(orbit[3], r.try_map(|c| Ok::<_, FieldError>(c.conj())).unwrap());
        let corners: Vec<Cyclotomic> = orbit.iter().map(|s| invariants(s).unwrap().corner).collect();
        let half = Cyclotomic::ratio(1, 2);
        let s3 = Cyclotomic::sqrt3();
        let minus_one_minus = &(&(-&Cyclotomic::one()) - &s3) * &half;
        assert_eq!(corners[0], reference::phi());
        assert_eq!(corners[1], minus_one_minus);
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(orbit[i], orbit[j]);
            }
        }
    }

    #[test]
    fn invariants_of_gauge_images() {
        let r = reference::reference_solution();
        let mut gauge = Gauge::identity();
        gauge.blocks.insert((X, X, X), FieldMatrix::from_ints(&[&[1, 2], &[3, -1]]));
        gauge.blocks.insert((X, Y, X), FieldMatrix::scalar(c(3)));
        gauge.blocks.insert((X, X, ONE), FieldMatrix::scalar(c(-2)));
        gauge.blocks.insert((X, X, Y), FieldMatrix::scalar(Cyclotomic::zeta()));
        let moved = gauge_transform(&r, &gauge).unwrap();
        assert_eq!(invariants(&moved).unwrap(), invariants(&r).unwrap());
        assert!(equivalent(&r, &moved).unwrap().is_equivalent());
    }

    #[test]
    fn self_equivalence_and_conjugates() {
        let r = reference::reference_solution();
        assert!(equivalent(&r, &r).unwrap().is_equivalent());
        // σ₇ and σ₅ move √3, so the corner separates them; σ₁₁ only conjugates i.
        for (k, prefix) in [(5, "eigenvalues"), (7, "a^x_{x,x,x}[0,0]"), (11, "eigenvalues of a^1_{x,x,x}")] {
            match equivalent(&r, &r.galois(k).unwrap()).unwrap() {
                Equivalence::Inequivalent { invariant } => assert!(invariant.starts_with(prefix), "σ{k}: {invariant}"),
                e => panic!("{e:?}"),
            }
        }
    }

    #[test]
    fn equivalence_pattern_is_diagonal() {
        let sols = &classification().last.solutions;
        for (i, a) in sols.iter().enumerate() {
            for (j, b) in sols.iter().enumerate() {
                assert_eq!(equivalent(a, b).unwrap().is_equivalent(), i == j, "{i} {j}");
            }
        }
    }

    #[test]
    fn anticommuting_off_diagonal_blocks() {
        // P^x_{y,x,x,y} with a^x_{y,x,x} = [[0,f],[1/f,0]], a^x_{x,x,y} = [[0,b],[1/b,0]] forces f² + b² = 0.
        let ring = FusionRing::paper_ring();
        let mut sys = System::new();
        let f = sys.nonzero_var("f");
        let b = sys.nonzero_var("b");
        let anti = |v: Var| {
            Matrix::from_rows(vec![vec![Poly::zero(), Poly::var(v)], vec![Poly::term(Cyclotomic::one(), crate::poly::Monomial::var(v, -1)), Poly::zero()]])
        };
        let mut data: Associators<Poly> = Associators::new(ring);
        scalar_blocks(&mut data, &reference::one_dim_values().into_iter().collect()).unwrap();
        data.set(A_KEY, constant_matrix(&FieldMatrix::from_ints(&[&[1, 0], &[0, -1]]))).unwrap();
        data.set(F_KEY, anti(f)).unwrap();
        data.set(B_KEY, anti(b)).unwrap();
        let eqs = instance_equations(&data, (Y, X, X, Y, X)).unwrap().unwrap();
        let nz: BTreeSet<Var> = [f, b].into_iter().collect();
        let target = normalize(&Poly::var(f).pow(2).add(&Poly::var(b).pow(2)), &nz);
        assert!(!eqs.is_empty());
        for e in eqs {
            assert_eq!(normalize(&e, &nz), target);
        }
    }

    #[test]
    fn other_rings_are_refused() {
        let t = AssociatorSet::new(FusionRing::trivial());
        assert!(matches!(invariants(&t), Err(SolverError::UnsupportedRing)));
    }
}
