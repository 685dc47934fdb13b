//! The bending matrix B on unit-free (2,1)-stranded spaces, pivotal scalars read off
//! B³, Frobenius–Schur indicators, traces and sphericity.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::associator::AssociatorSet;
use crate::cyclotomic::{Cyclotomic, FieldError};
use crate::fusion_ring::FusionRing;
use crate::matrix::FieldMatrix;
use crate::rigidity_dual::{bending_on, unit_free_spaces, RigidityError, RigidityStructure, Space};
use crate::roots;

#[derive(Debug, Error)]
pub enum PivotalError {
    #[error(transparent)]
    Rigidity(#[from] RigidityError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("not pivotal: {0}")]
    NonPivotal(String),
    #[error("strand {0} is not self-dual")]
    NotSelfDual(String),
    #[error("pivotal scalars are not determined by the strand equations ({0} free)")]
    Underdetermined(usize),
    #[error("a pivotal scalar needs a {degree}-th root of {value} outside Q(ζ12)")]
    RootOutsideField { degree: i64, value: Box<Cyclotomic> },
}

fn space_name(ring: &FusionRing, (x, y, z): Space) -> String {
    format!("V^{}_{{{},{}}}", ring.label(z), ring.label(x), ring.label(y))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BendingMatrix {
    pub spaces: Vec<Space>,
    pub offsets: Vec<usize>,
    pub matrix: FieldMatrix,
}

impl BendingMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn range(&self, ring: &FusionRing, s: usize) -> std::ops::Range<usize> {
        let (x, y, z) = self.spaces[s];
        self.offsets[s]..self.offsets[s] + ring.n(x, y, z) as usize
    }

    /// The block of `m` between two listed spaces.
    pub fn block_of(&self, ring: &FusionRing, m: &FieldMatrix, from: Space, to: Space) -> Option<FieldMatrix> {
        let r = self.range(ring, self.spaces.iter().position(|&s| s == from)?);
        let c = self.range(ring, self.spaces.iter().position(|&s| s == to)?);
        Some(FieldMatrix::from_fn(r.len(), c.len(), |i, j| m.get(r.start + i, c.start + j).clone()))
    }

    pub fn cube(&self) -> FieldMatrix {
        self.matrix.mul(&self.matrix).mul(&self.matrix)
    }
}

/// B on the unit-free spaces V^z_{x,y}, listed in lexicographic order of (x, y, z).
pub fn build_bending(f: &AssociatorSet, r: &RigidityStructure) -> Result<BendingMatrix, PivotalError> {
    let ring = f.ring();
    let spaces = unit_free_spaces(ring);
    let mut offsets = Vec::with_capacity(spaces.len());
    let mut total = 0;
    for &(x, y, z) in &spaces {
        offsets.push(total);
        total += ring.n(x, y, z) as usize;
    }
    let matrix = bending_on(f, r, &spaces)?;
    Ok(BendingMatrix { spaces, offsets, matrix })
}

/// π_x = t_x · Id_x on every strand.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PivotalStructure {
    pub t: Vec<Cyclotomic>,
}

impl PivotalStructure {
    pub fn strict(rank: usize) -> Self {
        PivotalStructure { t: vec![Cyclotomic::one(); rank] }
    }

    pub fn is_strict(&self) -> bool {
        self.t.iter().all(Cyclotomic::is_one)
    }

    /// The first violated coherence condition, if any.
    pub fn coherence_violation(&self, ring: &FusionRing) -> Option<String> {
        if !self.t[ring.unit()].is_one() {
            return Some("t_1 ≠ 1".into());
        }
        for z in 0..ring.rank() {
            if !(&self.t[z] * &self.t[ring.dual(z)]).is_one() {
                return Some(format!("t_{} t_{} ≠ 1", ring.label(z), ring.label(ring.dual(z))));
            }
        }
        for (x, y, z) in unit_free_spaces(ring) {
            if &self.t[x] * &self.t[y] != self.t[z] {
                return Some(format!("t_{} t_{} ≠ t_{}", ring.label(x), ring.label(y), ring.label(z)));
            }
        }
        None
    }
}

/// Integer Smith form: returns (u, d, v) with u·e·v = d diagonal, u and v unimodular.
fn smith(e: &[Vec<i64>], cols: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let rows = e.len();
    let ident = |n: usize| (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect::<Vec<_>>()).collect::<Vec<_>>();
    let (mut u, mut d, mut v) = (ident(rows), e.to_vec(), ident(cols));
    for k in 0..rows.min(cols) {
        loop {
            let pivot = (k..rows).flat_map(|i| (k..cols).map(move |j| (i, j))).filter(|&(i, j)| d[i][j] != 0).min_by_key(|&(i, j)| d[i][j].abs());
            let Some((pi, pj)) = pivot else { return (u, d, v) };
            d.swap(k, pi);
            u.swap(k, pi);
            for row in d.iter_mut() {
                row.swap(k, pj);
            }
            for row in v.iter_mut() {
                row.swap(k, pj);
            }
            let mut clean = true;
            for i in k + 1..rows {
                let q = d[i][k] / d[k][k];
                if q != 0 {
                    for j in 0..cols {
                        d[i][j] -= q * d[k][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= q * u[k][j];
                    }
                }
                clean &= d[i][k] == 0;
            }
            for j in k + 1..cols {
                let q = d[k][j] / d[k][k];
                if q != 0 {
                    for row in d.iter_mut() {
                        row[j] -= q * row[k];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[k];
                    }
                }
                clean &= d[k][j] == 0;
            }
            if !clean {
                continue;
            }
            // Divisibility is not needed: each diagonal equation is solved on its own.
            break;
        }
    }
    (u, d, v)
}

/// All strand scalars t with t_x t_y / t_z equal to the B³ eigenvalue on every
/// unit-free V^z_{x,y}, t_1 = 1 and t_x t_{x*} = 1.
pub fn pivotal_structures(f: &AssociatorSet, r: &RigidityStructure) -> Result<Vec<PivotalStructure>, PivotalError> {
    let ring = f.ring();
    let b = build_bending(f, r)?;
    let cube = b.cube();
    let rank = ring.rank();
    let mut equations: Vec<(Vec<i64>, Cyclotomic, String)> = Vec::new();
    for (s, &space) in b.spaces.iter().enumerate() {
        let range = b.range(ring, s);
        for i in 0..b.dim() {
            for j in range.clone() {
                let v = cube.get(i, j);
                if !v.is_zero() && (i != j || v != cube.get(range.start, range.start)) {
                    let what = if i == j { "unequal diagonal entries" } else { "off-diagonal entry" };
                    return Err(PivotalError::NonPivotal(format!("B³ has {what} {v} at ({i}, {j}) in the block of {}", space_name(ring, space))));
                }
            }
        }
        let (x, y, z) = space;
        let mut row = vec![0i64; rank];
        row[x] += 1;
        row[y] += 1;
        row[z] -= 1;
        let name = format!("(t_{} t_{} / t_{} on {})", ring.label(x), ring.label(y), ring.label(z), space_name(ring, space));
        equations.push((row, cube.get(range.start, range.start).clone(), name));
    }
    let mut unit_row = vec![0i64; rank];
    unit_row[ring.unit()] = 1;
    equations.push((unit_row, Cyclotomic::one(), "t_1".into()));
    for z in 0..rank {
        if ring.dual(z) >= z {
            let mut row = vec![0i64; rank];
            row[z] += 1;
            row[ring.dual(z)] += 1;
            equations.push((row, Cyclotomic::one(), format!("t_{} t_{}", ring.label(z), ring.label(ring.dual(z)))));
        }
    }

    let e: Vec<Vec<i64>> = equations.iter().map(|(row, _, _)| row.clone()).collect();
    let (u, d, v) = smith(&e, rank);
    let diag: Vec<i64> = (0..rank).map(|i| if i < d.len() { d[i][i] } else { 0 }).collect();
    let free = diag.iter().filter(|&&x| x == 0).count();
    if free > 0 {
        return Err(PivotalError::Underdetermined(free));
    }
    let mut targets = Vec::with_capacity(u.len());
    for urow in &u {
        let mut mu = Cyclotomic::one();
        for (k, &ex) in urow.iter().enumerate() {
            if ex != 0 {
                mu = &mu * &equations[k].1.pow(ex)?;
            }
        }
        targets.push((mu, urow));
    }
    for (mu, urow) in &targets[rank..] {
        if !mu.is_one() {
            let involved: Vec<&str> = urow.iter().enumerate().filter(|(_, &ex)| ex != 0).map(|(k, _)| equations[k].2.as_str()).collect();
            return Err(PivotalError::NonPivotal(format!("incoherent eigenvalues: the combination of {} is {mu}, not 1", involved.join(", "))));
        }
    }
    let mut choices: Vec<Vec<Cyclotomic>> = Vec::with_capacity(rank);
    for i in 0..rank {
        let degree = diag[i].abs();
        let mu = if diag[i] < 0 { targets[i].0.inv()? } else { targets[i].0.clone() };
        let found = roots::nth_roots(&mu, degree as usize)?;
        if found.len() < degree as usize {
            if found.is_empty() {
                let involved: Vec<&str> = targets[i].1.iter().enumerate().filter(|(_, &ex)| ex != 0).map(|(k, _)| equations[k].2.as_str()).collect();
                return Err(PivotalError::NonPivotal(format!("no coherent scalars: the combination of {} has no {degree}-th root", involved.join(", "))));
            }
            return Err(PivotalError::RootOutsideField { degree, value: Box::new(mu) });
        }
        choices.push(found);
    }

    let mut out = BTreeSet::new();
    let mut pick = vec![0usize; rank];
    loop {
        let mut t = vec![Cyclotomic::one(); rank];
        for (j, tj) in t.iter_mut().enumerate() {
            for i in 0..rank {
                if v[j][i] != 0 {
                    *tj = &*tj * &choices[i][pick[i]].pow(v[j][i])?;
                }
            }
        }
        let p = PivotalStructure { t };
        if let Some(bad) = p.coherence_violation(ring) {
            return Err(PivotalError::NonPivotal(bad));
        }
        for (s, &(x, y, z)) in b.spaces.iter().enumerate() {
            let at = b.offsets[s];
            if &(&p.t[x] * &p.t[y]) * &p.t[z].inv()? != *cube.get(at, at) {
                return Err(PivotalError::NonPivotal(format!("t does not reproduce B³ on {}", space_name(ring, (x, y, z)))));
            }
        }
        out.insert(p);
        let mut i = 0;
        while i < rank {
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == rank {
            break;
        }
    }
    Ok(out.into_iter().collect())
}

/// t_x for a self-dual strand, which coherence forces to be ±1.
pub fn fs_indicator(ring: &FusionRing, p: &PivotalStructure, x: usize) -> Result<i8, PivotalError> {
    if !ring.is_self_dual(x) {
        return Err(PivotalError::NotSelfDual(ring.label(x).to_string()));
    }
    if p.t[x].is_one() {
        Ok(1)
    } else if (-&p.t[x]).is_one() {
        Ok(-1)
    } else {
        Err(PivotalError::NonPivotal(format!("t_{} = {} on a self-dual strand", ring.label(x), p.t[x])))
    }
}

/// (tr_r, tr_l) of the endomorphism `scalar`·Id_x.
pub fn traces(f: &AssociatorSet, r: &RigidityStructure, p: &PivotalStructure, x: usize, scalar: &Cyclotomic) -> Result<(Cyclotomic, Cyclotomic), PivotalError> {
    let ring = f.ring();
    let right = &(&p.t[x].inv()? * &r.right_pseudo_trace(ring, x)) * scalar;
    let left = &(&p.t[x] * &r.left_pseudo_trace(ring, x)) * scalar;
    Ok((right, left))
}

pub fn quantum_dimension(f: &AssociatorSet, r: &RigidityStructure, p: &PivotalStructure, x: usize) -> Result<Cyclotomic, PivotalError> {
    Ok(traces(f, r, p, x, &Cyclotomic::one())?.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphericalReport {
    pub spherical: bool,
    /// (tr_r, tr_l) of Id_x per strand.
    pub traces: Vec<(Cyclotomic, Cyclotomic)>,
    /// The self-dual shortcut, when every strand is self-dual and t_x = ±1 on each.
    pub lemma: Option<bool>,
}

pub fn spherical_check(f: &AssociatorSet, r: &RigidityStructure, p: &PivotalStructure) -> Result<SphericalReport, PivotalError> {
    let ring = f.ring();
    let table = (0..ring.rank()).map(|x| traces(f, r, p, x, &Cyclotomic::one())).collect::<Result<Vec<_>, _>>()?;
    let spherical = table.iter().all(|(a, b)| a == b);
    let applies = (0..ring.rank()).all(|x| fs_indicator(ring, p, x).is_ok());
    Ok(SphericalReport { spherical, traces: table, lemma: applies.then_some(true) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::associator::{nontrivial_keys, Associators};
    use crate::fusion_ring::strand::{ONE, X, Y};
    use crate::matrix::Matrix;
    use crate::reference::reference_solution;
    use crate::rigidity_dual::{build_rigidity, double_dual};

    fn pointed(order: usize) -> AssociatorSet {
        let ring = FusionRing::cyclic(order);
        let mut f = Associators::new(ring.clone());
        for key in nontrivial_keys(&ring) {
            f.set(key, Matrix::identity(1)).unwrap();
        }
        f
    }

    #[test]
    fn bending_matrix_has_the_cycle_shape() {
        let f = reference_solution();
        let ring = f.ring();
        let b = build_bending(&f, &build_rigidity(&f).unwrap()).unwrap();
        assert_eq!(b.dim(), 5);
        let blk = |from, to| b.block_of(ring, &b.matrix, from, to).unwrap();
        assert_eq!(blk((X, X, X), (X, X, X)), f.block((X, X, X, ONE)).unwrap());
        let one = Matrix::identity(1);
        assert_eq!(blk((X, X, Y), (Y, X, X)), one);
        assert_eq!(blk((Y, X, X), (X, Y, X)), one);
        assert_eq!(blk((X, Y, X), (X, X, Y)), one);
        for from in &b.spaces {
            for to in &b.spaces {
                let allowed = [((X, X, X), (X, X, X)), ((X, X, Y), (Y, X, X)), ((Y, X, X), (X, Y, X)), ((X, Y, X), (X, X, Y))];
                if !allowed.contains(&(*from, *to)) {
                    assert!(blk(*from, *to).is_zero());
                }
            }
        }
        let b3 = b.cube();
        assert!(b3.is_identity());
        for space in &b.spaces {
            assert_eq!(double_dual(&f, &build_rigidity(&f).unwrap(), *space).unwrap(), b.block_of(ring, &b3, *space, *space).unwrap());
        }
    }

    #[test]
    fn the_reference_category_is_strictly_pivotal() {
        let f = reference_solution();
        for k in [1, 5, 7, 11] {
            let g = f.galois(k).unwrap();
            let r = build_rigidity(&g).unwrap();
            let all = pivotal_structures(&g, &r).unwrap();
            assert_eq!(all, vec![PivotalStructure::strict(3)], "σ{k}");
            for x in [ONE, Y, X] {
                assert_eq!(fs_indicator(g.ring(), &all[0], x).unwrap(), 1);
            }
        }
    }

    #[test]
    fn pointed_two_has_both_signs() {
        let f = pointed(2);
        let r = build_rigidity(&f).unwrap();
        let all = pivotal_structures(&f, &r).unwrap();
        let t: Vec<Cyclotomic> = all.iter().map(|p| p.t[1].clone()).collect();
        assert_eq!(all.len(), 2);
        assert!(t.contains(&Cyclotomic::one()) && t.contains(&Cyclotomic::from_integer(-1)));
        assert!(all.iter().all(|p| p.t[0].is_one()));
        let signs: BTreeSet<i8> = all.iter().map(|p| fs_indicator(f.ring(), p, 1).unwrap()).collect();
        assert_eq!(signs, BTreeSet::from([-1, 1]));
    }

    #[test]
    fn pointed_three_gives_cube_roots() {
        let f = pointed(3);
        let r = build_rigidity(&f).unwrap();
        let all = pivotal_structures(&f, &r).unwrap();
        assert_eq!(all.len(), 3);
        for p in &all {
            assert!(p.t[1].pow(3).unwrap().is_one());
            assert_eq!(p.t[2], &p.t[1] * &p.t[1]);
        }
        assert!(matches!(fs_indicator(f.ring(), &PivotalStructure::strict(3), 1), Err(PivotalError::NotSelfDual(_))));
    }

    #[test]
    fn traces_and_dimensions() {
        let f = reference_solution();
        let r = build_rigidity(&f).unwrap();
        let p = PivotalStructure::strict(3);
        let dim_x = &Cyclotomic::one() + &Cyclotomic::sqrt3();
        assert_eq!(traces(&f, &r, &p, X, &Cyclotomic::one()).unwrap(), (dim_x.clone(), dim_x.clone()));
        assert_eq!(traces(&f, &r, &p, Y, &Cyclotomic::one()).unwrap(), (Cyclotomic::one(), Cyclotomic::one()));
        // λ² − 2λ − 2 = 0
        let two = Cyclotomic::from_integer(2);
        assert!((&(&(&dim_x * &dim_x) - &(&two * &dim_x)) - &two).is_zero());
        let g = f.galois(5).unwrap();
        let rg = build_rigidity(&g).unwrap();
        let dim_g = &Cyclotomic::one() - &Cyclotomic::sqrt3();
        assert_eq!(traces(&g, &rg, &p, X, &Cyclotomic::one()).unwrap(), (dim_g.clone(), dim_g));
    }

    #[test]
    fn sphericity_and_injected_scalars() {
        let f = reference_solution();
        let r = build_rigidity(&f).unwrap();
        let report = spherical_check(&f, &r, &PivotalStructure::strict(3)).unwrap();
        assert!(report.spherical);
        assert_eq!(report.lemma, Some(true));
        let tx = Cyclotomic::from_integer(3);
        let mut skewed = PivotalStructure::strict(3);
        skewed.t[X] = tx.clone();
        let report = spherical_check(&f, &r, &skewed).unwrap();
        assert!(!report.spherical);
        assert_eq!(report.lemma, None);
        let (right, left) = &report.traces[X];
        assert_eq!(left * &right.inv().unwrap(), &tx * &tx);
        let trivial = Associators::new(FusionRing::trivial());
        let rt = build_rigidity(&trivial).unwrap();
        assert!(spherical_check(&trivial, &rt, &PivotalStructure::strict(1)).unwrap().spherical);
    }

    #[test]
    fn incoherent_cube_is_not_pivotal() {
        let f = reference_solution();
        let mut r = build_rigidity(&f).unwrap();
        r.birth[Y] = Cyclotomic::from_integer(2);
        assert!(matches!(pivotal_structures(&f, &r), Err(PivotalError::NonPivotal(_))));
    }

    #[test]
    fn smith_form_is_diagonal() {
        let e = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let (u, d, v) = smith(&e, 3);
        let mul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            (0..a.len()).map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
        };
        assert_eq!(mul(&mul(&u, &e), &v), d);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(d[i][j], 0);
                }
            }
        }
    }
}
