//! Fusion rules N^z_{xy}, their validation, and brute-force enumeration of small rings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("search exceeded the node limit of {0}")]
    BudgetExceeded(usize),
    #[error("unsupported enumeration parameters: {0}")]
    Unsupported(String),
    #[error("empty word")]
    EmptyWord,
}

/// Label indices of the rank-3 ring [1, y, x].
pub mod strand {
    pub const ONE: usize = 0;
    pub const Y: usize = 1;
    pub const X: usize = 2;
}

/// Fusion rules on labels `0..rank`; `n[i][j][k]` is the multiplicity of label k in i⊗j.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FusionRing {
    labels: Vec<String>,
    unit: usize,
    dual: Vec<usize>,
    #[serde(rename = "N")]
    n: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnitLeft { j: usize, k: usize, value: u32 },
    UnitRight { j: usize, k: usize, value: u32 },
    DualNotInvolution { label: usize },
    DualityPairing { i: usize, j: usize, value: u32 },
    Associativity { x: usize, y: usize, z: usize, u: usize, left: u32, right: u32 },
    RigiditySymmetry { x: usize, y: usize, z: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl FusionRing {
    pub fn new(labels: Vec<String>, unit: usize, dual: Vec<usize>, n: Vec<Vec<Vec<u32>>>) -> Result<Self, RingError> {
        let r = labels.len();
        if r == 0 {
            return Err(RingError::ShapeMismatch("rank must be positive".into()));
        }
        if unit >= r {
            return Err(RingError::ShapeMismatch(format!("unit index {unit} out of range for rank {r}")));
        }
        if dual.len() != r || dual.iter().any(|&d| d >= r) {
            return Err(RingError::ShapeMismatch(format!("dual must be a map on {r} labels")));
        }
        if n.len() != r || n.iter().any(|a| a.len() != r || a.iter().any(|b| b.len() != r)) {
            return Err(RingError::ShapeMismatch(format!("fusion tensor must be {r}×{r}×{r}")));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != r {
            return Err(RingError::ShapeMismatch("labels must be distinct".into()));
        }
        Ok(FusionRing { labels, unit, dual, n })
    }

    /// The rank-1 ring with only the unit.
    pub fn trivial() -> Self {
        FusionRing { labels: vec!["1".into()], unit: 0, dual: vec![0], n: vec![vec![vec![1]]] }
    }

    /// Group ring of Z_n with labels 1, g, g2, …
    pub fn cyclic(order: usize) -> Self {
        let labels = (0..order)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "g".to_string(),
                _ => format!("g{k}"),
            })
            .collect();
        let dual = (0..order).map(|k| (order - k) % order).collect();
        let mut n = vec![vec![vec![0; order]; order]; order];
        for (a, row) in n.iter_mut().enumerate() {
            for (b, col) in row.iter_mut().enumerate() {
                col[(a + b) % order] = 1;
            }
        }
        FusionRing { labels, unit: 0, dual, n }
    }

    /// Labels [1, y, x], all self-dual, x⊗x = 1⊕y⊕2x, x⊗y = y⊗x = x, y⊗y = 1.
    pub fn paper_ring() -> Self {
        use strand::{ONE, X, Y};
        let mut n = vec![vec![vec![0u32; 3]; 3]; 3];
        for a in 0..3 {
            n[ONE][a][a] = 1;
            n[a][ONE][a] = 1;
        }
        n[Y][Y][ONE] = 1;
        n[X][Y][X] = 1;
        n[Y][X][X] = 1;
        n[X][X][ONE] = 1;
        n[X][X][Y] = 1;
        n[X][X][X] = 2;
        FusionRing { labels: vec!["1".into(), "y".into(), "x".into()], unit: ONE, dual: vec![0, 1, 2], n }
    }

    /// Equal to `paper_ring()` including the label order.
    pub fn is_paper_ring(&self) -> bool {
        *self == FusionRing::paper_ring()
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index(&self, name: &str) -> Result<usize, RingError> {
        self.labels.iter().position(|l| l == name).ok_or_else(|| RingError::UnknownLabel(name.to_string()))
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    pub fn is_self_dual(&self, i: usize) -> bool {
        self.dual[i] == i
    }

    /// N^z_{xy}.
    pub fn n(&self, x: usize, y: usize, z: usize) -> u32 {
        self.n[x][y][z]
    }

    pub fn tensor(&self) -> &Vec<Vec<Vec<u32>>> {
        &self.n
    }

    pub fn validate(&self) -> ValidationReport {
        let r = self.rank();
        let one = self.unit;
        let mut v = Vec::new();
        for j in 0..r {
            for k in 0..r {
                let expect = u32::from(j == k);
                if self.n[one][j][k] != expect {
                    v.push(Violation::UnitLeft { j, k, value: self.n[one][j][k] });
                }
                if self.n[j][one][k] != expect {
                    v.push(Violation::UnitRight { j, k, value: self.n[j][one][k] });
                }
            }
        }
        for i in 0..r {
            if self.dual[self.dual[i]] != i {
                v.push(Violation::DualNotInvolution { label: i });
            }
        }
        for i in 0..r {
            for j in 0..r {
                let expect = u32::from(j == self.dual[i]);
                if self.n[i][j][one] != expect {
                    v.push(Violation::DualityPairing { i, j, value: self.n[i][j][one] });
                }
            }
        }
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    for u in 0..r {
                        let left: u32 = (0..r).map(|s| self.n[x][y][s] * self.n[s][z][u]).sum();
                        let right: u32 = (0..r).map(|t| self.n[y][z][t] * self.n[x][t][u]).sum();
                        if left != right {
                            v.push(Violation::Associativity { x, y, z, u, left, right });
                        }
                    }
                }
            }
        }
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    if self.n[x][y][z] != self.n[self.dual[z]][x][self.dual[y]] {
                        v.push(Violation::RigiditySymmetry { x, y, z });
                    }
                }
            }
        }
        ValidationReport { violations: v }
    }

    /// Dimension of Hom(w₁⊗…⊗wₙ, target), contracting from the left.
    pub fn hom_dim(&self, word: &[usize], target: usize) -> Result<u64, RingError> {
        let (&first, rest) = word.split_first().ok_or(RingError::EmptyWord)?;
        let r = self.rank();
        let mut vec = vec![0u64; r];
        vec[first] = 1;
        for &w in rest {
            let mut next = vec![0u64; r];
            for (j, &c) in vec.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (k, slot) in next.iter_mut().enumerate() {
                    *slot += c * u64::from(self.n[j][w][k]);
                }
            }
            vec = next;
        }
        Ok(vec[target])
    }

    /// Same dimension, contracting from the right.
    pub fn hom_dim_right(&self, word: &[usize], target: usize) -> Result<u64, RingError> {
        let (&last, rest) = word.split_last().ok_or(RingError::EmptyWord)?;
        let r = self.rank();
        let mut vec = vec![0u64; r];
        vec[last] = 1;
        for &w in rest.iter().rev() {
            let mut next = vec![0u64; r];
            for (j, &c) in vec.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (k, slot) in next.iter_mut().enumerate() {
                    *slot += c * u64::from(self.n[w][j][k]);
                }
            }
            vec = next;
        }
        Ok(vec[target])
    }

    pub fn word(&self, names: &[&str]) -> Result<Vec<usize>, RingError> {
        names.iter().map(|n| self.index(n)).collect()
    }

    /// Entry-wise relabeling: label i of `self` becomes label perm[i].
    fn permuted_tensor(&self, perm: &[usize]) -> Vec<u32> {
        let r = self.rank();
        let mut inv = vec![0; r];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let mut out = Vec::with_capacity(r * r * r);
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    out.push(self.n[inv[a]][inv[b]][inv[c]]);
                }
            }
        }
        out
    }

    /// Canonical form up to permutations fixing the unit and commuting with the dual.
    pub fn canonical_form(&self) -> (Vec<usize>, Vec<u32>) {
        let r = self.rank();
        let mut best: Option<(Vec<usize>, Vec<u32>)> = None;
        for perm in unit_fixing_permutations(r, self.unit) {
            let mut inv = vec![0; r];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            let dual: Vec<usize> = (0..r).map(|a| perm[self.dual[inv[a]]]).collect();
            let key = (dual, self.permuted_tensor(&perm));
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        best.expect("at least the identity permutation")
    }
}

fn unit_fixing_permutations(r: usize, unit: usize) -> Vec<Vec<usize>> {
    let others: Vec<usize> = (0..r).filter(|&i| i != unit).collect();
    let mut out = Vec::new();
    let mut current = others.clone();
    permute(&mut current, 0, &mut |p| {
        let mut perm = vec![0; r];
        perm[unit] = unit;
        for (src, &dst) in others.iter().zip(p.iter()) {
            perm[*src] = dst;
        }
        out.push(perm);
    });
    out
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Restrictions for `enumerate_rings`. The unit is label 0.
#[derive(Clone, Debug)]
pub struct RingConstraints {
    pub labels: Option<Vec<String>>,
    /// Fixed duality involution; every involution fixing the unit is tried when absent.
    pub dual: Option<Vec<usize>>,
    /// Allowed values for individual entries N^k_{ij}, keyed by (i, j, k).
    pub allowed: BTreeMap<(usize, usize, usize), Vec<u32>>,
    /// Z/2 degree per label; entries N^k_{ij} with deg i + deg j ≠ deg k are forced to zero.
    pub grading: Option<Vec<u8>>,
    pub max_entry: u32,
    pub node_limit: usize,
}

impl Default for RingConstraints {
    fn default() -> Self {
        RingConstraints {
            labels: None,
            dual: None,
            allowed: BTreeMap::new(),
            grading: None,
            max_entry: 3,
            node_limit: 50_000_000,
        }
    }
}

impl RingConstraints {
    /// Objects 1, w, v, v* with v* dual to v; w⊗w ∈ {1, w⊕1}; v⊗w = a·v ⊕ b·v*;
    /// graded by 1, w even and v, v* odd.
    pub fn rank4_lemma() -> Self {
        const W: usize = 1;
        const V: usize = 2;
        let mut allowed = BTreeMap::new();
        allowed.insert((W, W, 0), vec![1]);
        allowed.insert((W, W, W), vec![0, 1]);
        allowed.insert((W, W, V), vec![0]);
        allowed.insert((W, W, 3), vec![0]);
        allowed.insert((V, W, 0), vec![0]);
        allowed.insert((V, W, W), vec![0]);
        RingConstraints {
            labels: Some(vec!["1".into(), "w".into(), "v".into(), "v*".into()]),
            dual: Some(vec![0, 1, 3, 2]),
            allowed,
            grading: Some(vec![0, 0, 1, 1]),
            ..RingConstraints::default()
        }
    }

    /// The same lemma constraints without the grading.
    pub fn rank4_lemma_ungraded() -> Self {
        RingConstraints { grading: None, ..RingConstraints::rank4_lemma() }
    }
}

fn involutions(r: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        if cur[i] != usize::MAX {
            return go(cur, i + 1, out);
        }
        cur[i] = i;
        go(cur, i + 1, out);
        for j in i + 1..cur.len() {
            if cur[j] == usize::MAX {
                cur[i] = j;
                cur[j] = i;
                go(cur, i + 1, out);
                cur[j] = usize::MAX;
            }
        }
        cur[i] = usize::MAX;
    }
    let mut cur = vec![usize::MAX; r];
    cur[0] = 0;
    let mut out = Vec::new();
    go(&mut cur, 1, &mut out);
    out
}

/// All associative fusion rings of the given rank satisfying `constraints`, up to relabeling.
pub fn enumerate_rings(rank: usize, constraints: &RingConstraints) -> Result<Vec<FusionRing>, RingError> {
    if rank == 0 || rank > 4 {
        return Err(RingError::Unsupported(format!("rank {rank} (supported: 1 to 4)")));
    }
    if constraints.max_entry > 3 {
        return Err(RingError::Unsupported(format!("max entry {} (supported: up to 3)", constraints.max_entry)));
    }
    let labels = match &constraints.labels {
        Some(l) if l.len() == rank => l.clone(),
        Some(l) => return Err(RingError::ShapeMismatch(format!("{} labels for rank {rank}", l.len()))),
        None => (0..rank).map(|i| if i == 0 { "1".to_string() } else { format!("a{i}") }).collect(),
    };
    let duals = match &constraints.dual {
        Some(d) => {
            if d.len() != rank || d[0] != 0 || (0..rank).any(|i| d[i] >= rank || d[d[i]] != i) {
                return Err(RingError::ShapeMismatch("dual must be an involution fixing the unit".into()));
            }
            vec![d.clone()]
        }
        None => involutions(rank),
    };
    if let Some(g) = &constraints.grading {
        if g.len() != rank || g[0] != 0 {
            return Err(RingError::ShapeMismatch("grading must give the unit degree 0".into()));
        }
    }
    let mut found: BTreeMap<(Vec<usize>, Vec<u32>), FusionRing> = BTreeMap::new();
    let mut nodes = 0usize;
    for dual in duals {
        let mut search = Search::new(rank, &dual, constraints);
        search.run(0, &mut nodes, &mut |n| {
            let ring = FusionRing { labels: labels.clone(), unit: 0, dual: dual.clone(), n: n.to_vec() };
            found.entry(ring.canonical_form()).or_insert(ring);
        })?;
    }
    Ok(found.into_values().collect())
}

struct Search<'a> {
    rank: usize,
    n: Vec<Vec<Vec<Option<u32>>>>,
    orbits: Vec<Vec<(usize, usize, usize)>>,
    constraints: &'a RingConstraints,
}

impl<'a> Search<'a> {
    fn new(rank: usize, dual: &[usize], constraints: &'a RingConstraints) -> Self {
        let mut n = vec![vec![vec![None; rank]; rank]; rank];
        for a in 0..rank {
            for b in 0..rank {
                n[0][a][b] = Some(u32::from(a == b));
                n[a][0][b] = Some(u32::from(a == b));
                n[a][b][0] = Some(u32::from(b == dual[a]));
            }
        }
        let mut seen = BTreeSet::new();
        let mut orbits = Vec::new();
        for x in 1..rank {
            for y in 1..rank {
                for z in 1..rank {
                    if seen.contains(&(x, y, z)) {
                        continue;
                    }
                    let mut orbit = vec![(x, y, z)];
                    let mut cur = (x, y, z);
                    loop {
                        cur = (dual[cur.2], cur.0, dual[cur.1]);
                        if cur == (x, y, z) {
                            break;
                        }
                        if !orbit.contains(&cur) {
                            orbit.push(cur);
                        }
                    }
                    seen.extend(orbit.iter().copied());
                    orbits.push(orbit);
                }
            }
        }
        Search { rank, n, orbits, constraints }
    }

    fn value_allowed(&self, (i, j, k): (usize, usize, usize), v: u32) -> bool {
        if let Some(g) = &self.constraints.grading {
            if v != 0 && (g[i] + g[j]) % 2 != g[k] % 2 {
                return false;
            }
        }
        self.constraints.allowed.get(&(i, j, k)).is_none_or(|a| a.contains(&v))
    }

    fn associative_so_far(&self) -> bool {
        let r = self.rank;
        for x in 0..r {
            for y in 0..r {
                for z in 0..r {
                    'u: for u in 0..r {
                        let mut left = 0;
                        let mut right = 0;
                        for s in 0..r {
                            match (self.n[x][y][s], self.n[s][z][u], self.n[y][z][s], self.n[x][s][u]) {
                                (Some(a), Some(b), Some(c), Some(d)) => {
                                    left += a * b;
                                    right += c * d;
                                }
                                _ => continue 'u,
                            }
                        }
                        if left != right {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, k: usize, nodes: &mut usize, emit: &mut impl FnMut(&[Vec<Vec<u32>>])) -> Result<(), RingError> {
        *nodes += 1;
        if *nodes > self.constraints.node_limit {
            return Err(RingError::BudgetExceeded(self.constraints.node_limit));
        }
        if k == self.orbits.len() {
            let full: Vec<Vec<Vec<u32>>> =
                self.n.iter().map(|a| a.iter().map(|b| b.iter().map(|c| c.unwrap()).collect()).collect()).collect();
            emit(&full);
            return Ok(());
        }
        let orbit = self.orbits[k].clone();
        for v in 0..=self.constraints.max_entry {
            if !orbit.iter().all(|&t| self.value_allowed(t, v)) {
                continue;
            }
            for &(i, j, l) in &orbit {
                self.n[i][j][l] = Some(v);
            }
            if self.associative_so_far() {
                self.run(k + 1, nodes, emit)?;
            }
        }
        for &(i, j, l) in &orbit {
            self.n[i][j][l] = None;
        }
        Ok(())
    }
}

impl fmt::Display for FusionRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rank();
        for a in 0..r {
            for b in a..r {
                let parts: Vec<String> = (0..r)
                    .filter(|&c| self.n[a][b][c] > 0)
                    .map(|c| match self.n[a][b][c] {
                        1 => self.labels[c].clone(),
                        m => format!("{m}{}", self.labels[c]),
                    })
                    .collect();
                let rhs = if parts.is_empty() { "0".to_string() } else { parts.join(" ⊕ ") };
                writeln!(f, "{} ⊗ {} = {}", self.labels[a], self.labels[b], rhs)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnitLeft { j, k, value } => write!(f, "N^{k}_(1,{j}) = {value} breaks the unit law"),
            Violation::UnitRight { j, k, value } => write!(f, "N^{k}_({j},1) = {value} breaks the unit law"),
            Violation::DualNotInvolution { label } => write!(f, "dual of label {label} is not an involution"),
            Violation::DualityPairing { i, j, value } => write!(f, "N^1_({i},{j}) = {value} breaks the duality pairing"),
            Violation::Associativity { x, y, z, u, left, right } => {
                write!(f, "associativity fails at ({x},{y},{z};{u}): {left} ≠ {right}")
            }
            Violation::RigiditySymmetry { x, y, z } => write!(f, "N^{z}_({x},{y}) ≠ N^(y*)_(z*,{x})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_ring_is_valid_and_self_dual() {
        let r = FusionRing::paper_ring();
        assert!(r.validate().is_valid());
        assert!((0..3).all(|i| r.is_self_dual(i)));
        assert_eq!(r.n(2, 2, 2), 2);
    }

    #[test]
    fn hom_dims_of_words_in_x() {
        let r = FusionRing::paper_ring();
        let x = r.index("x").unwrap();
        assert_eq!(r.hom_dim(&[x, x, x], x).unwrap(), 6);
        assert_eq!(r.hom_dim(&[x, x, x, x], x).unwrap(), 16);
        assert_eq!(r.hom_dim(&[0], 0).unwrap(), 1);
        assert_eq!(r.hom_dim(&[], 0), Err(RingError::EmptyWord));
    }

    #[test]
    fn bad_pairing_is_reported() {
        let n = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![2, 1]]];
        let r = FusionRing::new(vec!["1".into(), "y".into()], 0, vec![0, 1], n).unwrap();
        let rep = r.validate();
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::DualityPairing { .. })));
    }

    #[test]
    fn rank_two_enumeration() {
        let c = RingConstraints { max_entry: 1, ..RingConstraints::default() };
        assert_eq!(enumerate_rings(2, &c).unwrap().len(), 2);
        assert_eq!(enumerate_rings(1, &c).unwrap().len(), 1);
    }

    #[test]
    fn cyclic_rings_validate() {
        for k in 1..=5 {
            assert!(FusionRing::cyclic(k).validate().is_valid());
        }
    }

    #[test]
    fn node_limit_is_enforced() {
        let c = RingConstraints { node_limit: 3, ..RingConstraints::rank4_lemma_ungraded() };
        assert_eq!(enumerate_rings(4, &c), Err(RingError::BudgetExceeded(3)));
    }
}
