//! Associator blocks a^u_{x,y,z} on ordered hom bases, and the pentagon and
//! triangle equations built from them.
//!
//! A block maps the right-parenthesized basis of V^u_{x(yz)} (rows) to the
//! left-parenthesized basis of V^u_{(xy)z} (columns). Composites act on row
//! vectors, so a path of maps M₁, M₂, M₃ composes as the product M₁·M₂·M₃.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::cyclotomic::{Cyclotomic, FieldError};
use crate::fusion_ring::FusionRing;
use crate::matrix::{FieldMatrix, Matrix, Ring};

/// (x, y, z, u) for a^u_{x,y,z}.
pub type BlockKey = (usize, usize, usize, usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssocError {
    #[error("unsupported word length {0} for this shape")]
    UnsupportedWordLength(usize),
    #[error("missing associator block {0}")]
    MissingBlock(String),
    #[error("block {key} must be {expected}×{expected}, found {rows}×{cols}")]
    ShapeMismatch { key: String, expected: usize, rows: usize, cols: usize },
    #[error("block {0} has an empty hom space")]
    EmptyBlock(String),
    #[error("singular gauge block on {0}")]
    SingularBlock(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("label index {0} out of range")]
    UnknownLabel(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Parenthesization of a word, with the order in which internal edges are created.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// x y
    Pair,
    /// (x y) z
    Left,
    /// x (y z)
    Right,
    /// ((x y) z) w
    LeftComb,
    /// (x (y z)) w
    LeftMid,
    /// x ((y z) w)
    RightMid,
    /// x (y (z w))
    RightComb,
    /// (x y)(z w), internal edges xy then zw
    Balanced,
    /// (x y)(z w), internal edges zw then xy
    BalancedSwapped,
}

/// Which internal label is most significant when sorting basis paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum BasisOrder {
    #[default]
    Forward,
    Reverse,
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Letter(usize),
    Internal(usize),
    Target,
}

impl Shape {
    pub fn word_len(self) -> usize {
        match self {
            Shape::Pair => 2,
            Shape::Left | Shape::Right => 3,
            _ => 4,
        }
    }

    fn vertices(self) -> Vec<(Slot, Slot, Slot)> {
        use Slot::*;
        match self {
            Shape::Pair => vec![(Letter(0), Letter(1), Target)],
            Shape::Left => vec![(Letter(0), Letter(1), Internal(0)), (Internal(0), Letter(2), Target)],
            Shape::Right => vec![(Letter(1), Letter(2), Internal(0)), (Letter(0), Internal(0), Target)],
            Shape::LeftComb => vec![
                (Letter(0), Letter(1), Internal(0)),
                (Internal(0), Letter(2), Internal(1)),
                (Internal(1), Letter(3), Target),
            ],
            Shape::LeftMid => vec![
                (Letter(1), Letter(2), Internal(0)),
                (Letter(0), Internal(0), Internal(1)),
                (Internal(1), Letter(3), Target),
            ],
            Shape::RightMid => vec![
                (Letter(1), Letter(2), Internal(0)),
                (Internal(0), Letter(3), Internal(1)),
                (Letter(0), Internal(1), Target),
            ],
            Shape::RightComb => vec![
                (Letter(2), Letter(3), Internal(0)),
                (Letter(1), Internal(0), Internal(1)),
                (Letter(0), Internal(1), Target),
            ],
            Shape::Balanced => vec![
                (Letter(0), Letter(1), Internal(0)),
                (Letter(2), Letter(3), Internal(1)),
                (Internal(0), Internal(1), Target),
            ],
            Shape::BalancedSwapped => vec![
                (Letter(2), Letter(3), Internal(0)),
                (Letter(0), Letter(1), Internal(1)),
                (Internal(1), Internal(0), Target),
            ],
        }
    }

    fn internal_count(self) -> usize {
        self.word_len() - 2
    }
}

/// A basis vector: one label per internal edge and one multiplicity index per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisPath {
    pub internal: Vec<usize>,
    pub mult: Vec<usize>,
}

impl BasisPath {
    pub fn new(internal: Vec<usize>, mult: Vec<usize>) -> Self {
        BasisPath { internal, mult }
    }
}

#[derive(Clone, Debug)]
pub struct HomBasis {
    pub word: Vec<usize>,
    pub target: usize,
    pub shape: Shape,
    pub order: BasisOrder,
    paths: Vec<BasisPath>,
    index: HashMap<BasisPath, usize>,
}

impl HomBasis {
    pub fn new(ring: &FusionRing, word: &[usize], target: usize, shape: Shape, order: BasisOrder) -> Result<Self, AssocError> {
        if word.len() != shape.word_len() {
            return Err(AssocError::UnsupportedWordLength(word.len()));
        }
        let r = ring.rank();
        if let Some(&bad) = word.iter().chain(std::iter::once(&target)).find(|&&l| l >= r) {
            return Err(AssocError::UnknownLabel(bad));
        }
        let verts = shape.vertices();
        let k = shape.internal_count();
        let mut keyed = Vec::new();
        let mut internal = vec![0usize; k];
        loop {
            let label = |s: Slot| match s {
                Slot::Letter(i) => word[i],
                Slot::Internal(i) => internal[i],
                Slot::Target => target,
            };
            let dims: Vec<usize> = verts.iter().map(|&(a, b, c)| ring.n(label(a), label(b), label(c)) as usize).collect();
            if dims.iter().all(|&d| d > 0) {
                let mut mult = vec![0usize; dims.len()];
                loop {
                    let sort_key = match order {
                        BasisOrder::Forward => internal.clone(),
                        BasisOrder::Reverse => internal.iter().rev().copied().collect(),
                    };
                    keyed.push((sort_key, BasisPath::new(internal.clone(), mult.clone())));
                    if !advance(&mut mult, &dims) {
                        break;
                    }
                }
            }
            if !advance(&mut internal, &vec![r; k]) {
                break;
            }
        }
        keyed.sort_by(|a, b| (&a.0, &a.1.mult).cmp(&(&b.0, &b.1.mult)));
        let paths: Vec<BasisPath> = keyed.into_iter().map(|(_, p)| p).collect();
        let index = paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(HomBasis { word: word.to_vec(), target, shape, order, paths, index })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[BasisPath] {
        &self.paths
    }

    pub fn position(&self, p: &BasisPath) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Human-readable form such as "v^y_{x,x} v^x_{x,y}", with multiplicity subscripts when needed.
    pub fn describe(&self, ring: &FusionRing, p: &BasisPath) -> String {
        let verts = self.shape.vertices();
        let label = |s: Slot| match s {
            Slot::Letter(i) => self.word[i],
            Slot::Internal(i) => p.internal[i],
            Slot::Target => self.target,
        };
        verts
            .iter()
            .zip(&p.mult)
            .map(|(&(a, b, c), &m)| {
                let (a, b, c) = (label(a), label(b), label(c));
                let base = format!("v^{}_{{{},{}}}", ring.label(c), ring.label(a), ring.label(b));
                if ring.n(a, b, c) > 1 {
                    format!("{base}[{}]", m + 1)
                } else {
                    base
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Odometer increment, first position most significant. Returns false after the last value.
fn advance(v: &mut [usize], bounds: &[usize]) -> bool {
    for i in (0..v.len()).rev() {
        v[i] += 1;
        if v[i] < bounds[i] {
            return true;
        }
        v[i] = 0;
    }
    false
}

pub fn canonical_basis(ring: &FusionRing, word: &[usize], target: usize, shape: Shape) -> Result<HomBasis, AssocError> {
    HomBasis::new(ring, word, target, shape, BasisOrder::Forward)
}

pub fn block_dim(ring: &FusionRing, (x, y, z, u): BlockKey) -> usize {
    (0..ring.rank()).map(|s| (ring.n(x, y, s) * ring.n(s, z, u)) as usize).sum()
}

pub fn key_name(ring: &FusionRing, (x, y, z, u): BlockKey) -> String {
    format!("a^{}_{{{},{},{}}}", ring.label(u), ring.label(x), ring.label(y), ring.label(z))
}

/// Paper-style instance identifier such as "P^x_{x,x,x,x}".
pub fn instance_name(ring: &FusionRing, head: &str, upper: usize, lower: &[usize]) -> String {
    let lower: Vec<&str> = lower.iter().map(|&l| ring.label(l)).collect();
    format!("{head}^{}_{{{}}}", ring.label(upper), lower.join(","))
}

/// Keys (x, y, z, u) with no unit among x, y, z and a nonzero hom space.
pub fn nontrivial_keys(ring: &FusionRing) -> Vec<BlockKey> {
    let r = ring.rank();
    let one = ring.unit();
    let mut out = Vec::new();
    for x in 0..r {
        for y in 0..r {
            for z in 0..r {
                if x == one || y == one || z == one {
                    continue;
                }
                for u in 0..r {
                    if block_dim(ring, (x, y, z, u)) > 0 {
                        out.push((x, y, z, u));
                    }
                }
            }
        }
    }
    out
}

/// A full set of associator blocks. Unit-involving blocks default to identities.
#[derive(Clone, Debug, PartialEq)]
pub struct Associators<T: Ring> {
    ring: FusionRing,
    blocks: BTreeMap<BlockKey, Matrix<T>>,
}

pub type AssociatorSet = Associators<Cyclotomic>;

impl<T: Ring> Associators<T> {
    pub fn new(ring: FusionRing) -> Self {
        Associators { ring, blocks: BTreeMap::new() }
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn involves_unit(&self, (x, y, z, _): BlockKey) -> bool {
        let one = self.ring.unit();
        x == one || y == one || z == one
    }

    /// Stores a block after checking its size against the hom space.
    pub fn set(&mut self, key: BlockKey, m: Matrix<T>) -> Result<(), AssocError> {
        let r = self.ring.rank();
        if let Some(&bad) = [key.0, key.1, key.2, key.3].iter().find(|&&l| l >= r) {
            return Err(AssocError::UnknownLabel(bad));
        }
        let expected = block_dim(&self.ring, key);
        if expected == 0 {
            return Err(AssocError::EmptyBlock(key_name(&self.ring, key)));
        }
        if m.rows() != expected || m.cols() != expected {
            return Err(AssocError::ShapeMismatch {
                key: key_name(&self.ring, key),
                expected,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        self.blocks.insert(key, m);
        Ok(())
    }

    /// The stored block, the implicit identity for unit-involving keys, or an error.
    pub fn block(&self, key: BlockKey) -> Result<Matrix<T>, AssocError> {
        if let Some(m) = self.blocks.get(&key) {
            return Ok(m.clone());
        }
        let d = block_dim(&self.ring, key);
        if d == 0 || self.involves_unit(key) {
            return Ok(Matrix::identity(d));
        }
        Err(AssocError::MissingBlock(key_name(&self.ring, key)))
    }

    pub fn stored(&self) -> &BTreeMap<BlockKey, Matrix<T>> {
        &self.blocks
    }

    pub fn missing_blocks(&self) -> Vec<BlockKey> {
        nontrivial_keys(&self.ring).into_iter().filter(|k| !self.blocks.contains_key(k)).collect()
    }

    pub fn try_map<U: Ring, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Associators<U>, E> {
        let mut blocks = BTreeMap::new();
        for (k, m) in &self.blocks {
            blocks.insert(*k, m.try_map(&f)?);
        }
        Ok(Associators { ring: self.ring.clone(), blocks })
    }

    /// Both sides of P^u_{x,y,z,w}, or `None` when the hom space is zero.
    pub fn pentagon_instance(&self, x: usize, y: usize, z: usize, w: usize, u: usize) -> Result<Option<(Matrix<T>, Matrix<T>)>, AssocError> {
        let ring = &self.ring;
        let word = [x, y, z, w];
        let s1 = canonical_basis(ring, &word, u, Shape::RightComb)?;
        if s1.is_empty() {
            return Ok(None);
        }
        let s2 = canonical_basis(ring, &word, u, Shape::RightMid)?;
        let s3 = canonical_basis(ring, &word, u, Shape::LeftMid)?;
        let s4 = canonical_basis(ring, &word, u, Shape::LeftComb)?;
        let s5a = canonical_basis(ring, &word, u, Shape::BalancedSwapped)?;
        let s5b = canonical_basis(ring, &word, u, Shape::Balanced)?;

        // x(y(zw)) → x((yz)w): α^t_{y,z,w} on (s; i, j)
        let m1 = self.lift(&s1, &s2, |p| {
            let (s, t) = (p.internal[0], p.internal[1]);
            let (i, j, k) = (p.mult[0], p.mult[1], p.mult[2]);
            ((y, z, w, t), BasisPath::new(vec![s], vec![i, j]), Box::new(move |q: &BasisPath| {
                BasisPath::new(vec![q.internal[0], t], vec![q.mult[0], q.mult[1], k])
            }))
        })?;
        // x((yz)w) → (x(yz))w: α^u_{x,s,w} on (t; j, k)
        let m2 = self.lift(&s2, &s3, |p| {
            let (s, t) = (p.internal[0], p.internal[1]);
            let (i, j, k) = (p.mult[0], p.mult[1], p.mult[2]);
            ((x, s, w, u), BasisPath::new(vec![t], vec![j, k]), Box::new(move |q: &BasisPath| {
                BasisPath::new(vec![s, q.internal[0]], vec![i, q.mult[0], q.mult[1]])
            }))
        })?;
        // (x(yz))w → ((xy)z)w: α^t_{x,y,z} on (s; i, j)
        let m3 = self.lift(&s3, &s4, |p| {
            let (s, t) = (p.internal[0], p.internal[1]);
            let (i, j, k) = (p.mult[0], p.mult[1], p.mult[2]);
            ((x, y, z, t), BasisPath::new(vec![s], vec![i, j]), Box::new(move |q: &BasisPath| {
                BasisPath::new(vec![q.internal[0], t], vec![q.mult[0], q.mult[1], k])
            }))
        })?;
        // x(y(zw)) → (xy)(zw): α^u_{x,y,s} on (t; j, k)
        let r1 = self.lift(&s1, &s5a, |p| {
            let (s, t) = (p.internal[0], p.internal[1]);
            let (i, j, k) = (p.mult[0], p.mult[1], p.mult[2]);
            ((x, y, s, u), BasisPath::new(vec![t], vec![j, k]), Box::new(move |q: &BasisPath| {
                BasisPath::new(vec![s, q.internal[0]], vec![i, q.mult[0], q.mult[1]])
            }))
        })?;
        let tau = tau_matrix::<T>(&s5a, &s5b)?;
        // (xy)(zw) → ((xy)z)w: α^u_{s,z,w} on (t; j, k)
        let r2 = self.lift(&s5b, &s4, |p| {
            let (s, t) = (p.internal[0], p.internal[1]);
            let (i, j, k) = (p.mult[0], p.mult[1], p.mult[2]);
            ((s, z, w, u), BasisPath::new(vec![t], vec![j, k]), Box::new(move |q: &BasisPath| {
                BasisPath::new(vec![s, q.internal[0]], vec![i, q.mult[0], q.mult[1]])
            }))
        })?;
        Ok(Some((m1.mul(&m2).mul(&m3), r1.mul(&tau).mul(&r2))))
    }

    /// Matrix from `src` to `dst` applying, for each source path, one row of an
    /// associator block and mapping the block's columns into `dst`.
    #[allow(clippy::type_complexity)]
    fn lift(
        &self,
        src: &HomBasis,
        dst: &HomBasis,
        f: impl Fn(&BasisPath) -> (BlockKey, BasisPath, Box<dyn Fn(&BasisPath) -> BasisPath>),
    ) -> Result<Matrix<T>, AssocError> {
        if src.len() != dst.len() {
            return Err(AssocError::DimensionMismatch(src.len(), dst.len()));
        }
        let mut out: Matrix<T> = Matrix::zeros(src.len(), dst.len());
        let mut cache: HashMap<BlockKey, (HomBasis, HomBasis, Matrix<T>)> = HashMap::new();
        for (r, p) in src.paths().iter().enumerate() {
            let (key, row_path, to_dst) = f(p);
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(key) {
                let (a, b, c, d) = key;
                let right = canonical_basis(&self.ring, &[a, b, c], d, Shape::Right)?;
                let left = canonical_basis(&self.ring, &[a, b, c], d, Shape::Left)?;
                let m = self.block(key)?;
                e.insert((right, left, m));
            }
            let (right, left, m) = &cache[&key];
            let row = right.position(&row_path).expect("sub-path lies in the block's basis");
            for (c, q) in left.paths().iter().enumerate() {
                let v = m.get(row, c);
                if v.is_zero() {
                    continue;
                }
                let target = to_dst(q);
                let col = dst.position(&target).expect("image path lies in the target basis");
                out.entry_mut(r, col).add_assign(v);
            }
        }
        Ok(out)
    }
}

/// The factor swap (s, t; i, j, k) ↦ (t, s; j, i, k) between the two (xy)(zw) bases.
fn tau_matrix<T: Ring>(from: &HomBasis, to: &HomBasis) -> Result<Matrix<T>, AssocError> {
    if from.len() != to.len() {
        return Err(AssocError::DimensionMismatch(from.len(), to.len()));
    }
    let mut perm = Vec::with_capacity(from.len());
    for p in from.paths() {
        let q = BasisPath::new(vec![p.internal[1], p.internal[0]], vec![p.mult[1], p.mult[0], p.mult[2]]);
        perm.push(to.position(&q).ok_or(AssocError::DimensionMismatch(from.len(), to.len()))?);
    }
    Ok(Matrix::permutation(&perm))
}

/// τ for P^u_{x,y,z,w}: the permutation between the two orderings of (xy)(zw).
pub fn tau(ring: &FusionRing, x: usize, y: usize, z: usize, w: usize, u: usize) -> Result<FieldMatrix, AssocError> {
    let word = [x, y, z, w];
    let a = canonical_basis(ring, &word, u, Shape::BalancedSwapped)?;
    let b = canonical_basis(ring, &word, u, Shape::Balanced)?;
    tau_matrix(&a, &b)
}

#[derive(Clone, Debug)]
pub struct PentagonViolation {
    pub instance: (usize, usize, usize, usize, usize),
    pub name: String,
    pub lhs: FieldMatrix,
    pub rhs: FieldMatrix,
    pub difference: FieldMatrix,
}

#[derive(Clone, Debug, Default)]
pub struct PentagonReport {
    pub violations: Vec<PentagonViolation>,
    /// Instances checked, including unit-involving ones.
    pub checked: usize,
    /// Instances with no unit among x, y, z, w, counted by hom-space dimension.
    pub census: BTreeMap<usize, usize>,
}

impl PentagonReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every (x, y, z, w, u) with a nonzero hom space, in lexicographic order.
pub fn pentagon_instances(ring: &FusionRing) -> Vec<(usize, usize, usize, usize, usize)> {
    let r = ring.rank();
    let mut out = Vec::new();
    for x in 0..r {
        for y in 0..r {
            for z in 0..r {
                for w in 0..r {
                    for u in 0..r {
                        if ring.hom_dim(&[x, y, z, w], u).unwrap_or(0) > 0 {
                            out.push((x, y, z, w, u));
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn pentagon_check(f: &AssociatorSet) -> Result<PentagonReport, AssocError> {
    let ring = f.ring();
    let one = ring.unit();
    let instances = pentagon_instances(ring);
    let results: Vec<Result<(usize, Option<PentagonViolation>), AssocError>> = instances
        .par_iter()
        .map(|&(x, y, z, w, u)| {
            let (lhs, rhs) = f.pentagon_instance(x, y, z, w, u)?.expect("instance has a nonzero hom space");
            let dim = lhs.rows();
            if lhs == rhs {
                return Ok((dim, None));
            }
            let difference = lhs.sub(&rhs);
            let name = instance_name(ring, "P", u, &[x, y, z, w]);
            Ok((dim, Some(PentagonViolation { instance: (x, y, z, w, u), name, lhs, rhs, difference })))
        })
        .collect();
    let mut report = PentagonReport::default();
    for (res, &(x, y, z, w, _)) in results.into_iter().zip(&instances) {
        let (dim, violation) = res?;
        report.checked += 1;
        if ![x, y, z, w].contains(&one) {
            *report.census.entry(dim).or_insert(0) += 1;
        }
        report.violations.extend(violation);
    }
    Ok(report)
}

#[derive(Clone, Debug, Default)]
pub struct TriangleReport {
    pub violations: Vec<(BlockKey, String)>,
}

impl TriangleReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every stored block with a unit among x, y, z is the identity.
pub fn triangle_check<T: Ring>(f: &Associators<T>) -> TriangleReport {
    let violations = f
        .stored()
        .iter()
        .filter(|(k, m)| f.involves_unit(**k) && !m.is_identity())
        .map(|(k, _)| (*k, key_name(f.ring(), *k)))
        .collect();
    TriangleReport { violations }
}

/// Change of basis on each V^z_{xy}: key (x, y, z) → invertible N^z_{xy}-square matrix.
/// Missing keys mean the identity; keys with a unit among x, y must be absent.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge<T: Ring> {
    pub blocks: BTreeMap<(usize, usize, usize), Matrix<T>>,
}

impl<T: Ring> Default for Gauge<T> {
    fn default() -> Self {
        Gauge { blocks: BTreeMap::new() }
    }
}

impl<T: Ring> Gauge<T> {
    pub fn identity() -> Self {
        Gauge::default()
    }

    fn get(&self, ring: &FusionRing, (x, y, z): (usize, usize, usize)) -> Matrix<T> {
        self.blocks.get(&(x, y, z)).cloned().unwrap_or_else(|| Matrix::identity(ring.n(x, y, z) as usize))
    }

    /// Basis-change matrices (on the right-parenthesized, on the left-parenthesized basis) of V^u_{xyz}.
    pub fn block_factors(&self, ring: &FusionRing, (x, y, z, u): BlockKey) -> (Matrix<T>, Matrix<T>) {
        let mut right = Vec::new();
        let mut left = Vec::new();
        for s in 0..ring.rank() {
            if ring.n(y, z, s) > 0 && ring.n(x, s, u) > 0 {
                right.push(self.get(ring, (y, z, s)).kron(&self.get(ring, (x, s, u))));
            }
            if ring.n(x, y, s) > 0 && ring.n(s, z, u) > 0 {
                left.push(self.get(ring, (x, y, s)).kron(&self.get(ring, (s, z, u))));
            }
        }
        (Matrix::direct_sum(&right), Matrix::direct_sum(&left))
    }
}

impl Gauge<Cyclotomic> {
    pub fn validate(&self, ring: &FusionRing) -> Result<(), AssocError> {
        let one = ring.unit();
        for (&(x, y, z), m) in &self.blocks {
            let name = format!("V^{}_{{{},{}}}", ring.label(z), ring.label(x), ring.label(y));
            let d = ring.n(x, y, z) as usize;
            if m.rows() != d || m.cols() != d {
                return Err(AssocError::ShapeMismatch { key: name, expected: d, rows: m.rows(), cols: m.cols() });
            }
            if (x == one || y == one) && !m.is_identity() {
                return Err(AssocError::SingularBlock(format!("{name} (unit spaces keep the identity)")));
            }
            if m.det().is_zero() {
                return Err(AssocError::SingularBlock(name));
            }
        }
        Ok(())
    }
}

/// α' = T_R · α · T_L⁻¹ on every stored block.
pub fn gauge_transform(f: &AssociatorSet, g: &Gauge<Cyclotomic>) -> Result<AssociatorSet, AssocError> {
    let ring = f.ring();
    g.validate(ring)?;
    let mut out = Associators::new(ring.clone());
    for (&key, m) in f.stored() {
        let (tr, tl) = g.block_factors(ring, key);
        let tl_inv = tl.inverse().ok_or_else(|| AssocError::SingularBlock(key_name(ring, key)))?;
        out.set(key, tr.mul(m).mul(&tl_inv))?;
    }
    Ok(out)
}

impl AssociatorSet {
    pub fn galois(&self, k: i64) -> Result<AssociatorSet, AssocError> {
        Ok(self.try_map(|c| c.galois(k))?)
    }

    /// Blocks with zero determinant.
    pub fn singular_blocks(&self) -> Vec<BlockKey> {
        self.blocks.iter().filter(|(_, m)| m.det().is_zero()).map(|(k, _)| *k).collect()
    }
}

impl fmt::Display for PentagonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let census: Vec<String> = self.census.iter().map(|(d, c)| format!("{d}-dim: {c}")).collect();
        writeln!(f, "checked {} instances; nontrivial by dimension: {}", self.checked, census.join(", "))?;
        if self.violations.is_empty() {
            write!(f, "all instances hold")
        } else {
            let names: Vec<&str> = self.violations.iter().map(|v| v.name.as_str()).collect();
            write!(f, "{} violated: {}", names.len(), names.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: usize = 0;
    const Y: usize = 1;
    const X: usize = 2;

    #[test]
    fn right_basis_of_xxx_to_x() {
        let r = FusionRing::paper_ring();
        let b = canonical_basis(&r, &[X, X, X], X, Shape::Right).unwrap();
        let got: Vec<String> = b.paths().iter().map(|p| b.describe(&r, p)).collect();
        assert_eq!(
            got,
            [
                "v^1_{x,x} v^x_{x,1}",
                "v^y_{x,x} v^x_{x,y}",
                "v^x_{x,x}[1] v^x_{x,x}[1]",
                "v^x_{x,x}[1] v^x_{x,x}[2]",
                "v^x_{x,x}[2] v^x_{x,x}[1]",
                "v^x_{x,x}[2] v^x_{x,x}[2]",
            ]
        );
    }

    #[test]
    fn four_letter_bases_have_sixteen_paths() {
        let r = FusionRing::paper_ring();
        for shape in [Shape::LeftComb, Shape::LeftMid, Shape::RightMid, Shape::RightComb, Shape::Balanced] {
            assert_eq!(canonical_basis(&r, &[X, X, X, X], X, shape).unwrap().len(), 16);
        }
        assert_eq!(canonical_basis(&r, &[Y, Y], ONE, Shape::Pair).unwrap().len(), 1);
        assert!(matches!(canonical_basis(&r, &[X], X, Shape::Pair), Err(AssocError::UnsupportedWordLength(1))));
    }

    #[test]
    fn tau_is_identity_on_pxyxx() {
        let r = FusionRing::paper_ring();
        assert!(tau(&r, X, Y, X, X, X).unwrap().is_identity());
    }

    #[test]
    fn trivial_category_passes() {
        let f = AssociatorSet::new(FusionRing::trivial());
        let rep = pentagon_check(&f).unwrap();
        assert!(rep.is_empty());
        assert!(triangle_check(&f).is_empty());
    }

    #[test]
    fn wrong_block_size_is_rejected() {
        let mut f = AssociatorSet::new(FusionRing::paper_ring());
        let err = f.set((X, Y, X, X), FieldMatrix::identity(3)).unwrap_err();
        assert!(matches!(err, AssocError::ShapeMismatch { expected: 2, rows: 3, .. }));
    }
}
