//! Birth and death morphisms, snake evaluation, the dual functor on (2,1)-stranded
//! basis vectors, and pseudo-trace balancing.
//!
//! Scalars are coefficients against fixed basis vectors: the death d_z is
//! `death[z]` times the basis vector of V^1_{z*,z}, and the birth b_z is
//! `birth[z]` times the vector of V^{z,z*}_1 dual to the basis vector of V^1_{z,z*}.

use thiserror::Error;

use crate::associator::{canonical_basis, AssocError, AssociatorSet, BasisPath, Shape};
use crate::cyclotomic::{Cyclotomic, FieldError};
use crate::fusion_ring::FusionRing;
use crate::matrix::FieldMatrix;
use crate::roots;

/// (x, y, z) for the hom space V^z_{x,y}.
pub type Space = (usize, usize, usize);

#[derive(Debug, Error)]
pub enum RigidityError {
    #[error(transparent)]
    Assoc(#[from] AssocError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("strand {strand}: {entry} vanishes, so the corner recipe gives no rigidity")]
    ZeroCorner { strand: String, entry: String },
    #[error("balancing strand {strand} needs a square root of {value}, which is not in Q(ζ12)")]
    NoSquareRootInField { strand: String, value: Box<Cyclotomic> },
    #[error("rigidity scalar for strand {0} is zero")]
    ZeroScalar(String),
    #[error("rigidity data has {got} strands, the ring has {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("V^{2}_{{{0},{1}}} is zero")]
    EmptySpace(String, String, String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityStructure {
    pub death: Vec<Cyclotomic>,
    pub birth: Vec<Cyclotomic>,
}

impl RigidityStructure {
    pub fn new(ring: &FusionRing, death: Vec<Cyclotomic>, birth: Vec<Cyclotomic>) -> Result<Self, RigidityError> {
        for v in [&death, &birth] {
            if v.len() != ring.rank() {
                return Err(RigidityError::RankMismatch { expected: ring.rank(), got: v.len() });
            }
        }
        if let Some(z) = (0..ring.rank()).find(|&z| death[z].is_zero() || birth[z].is_zero()) {
            return Err(RigidityError::ZeroScalar(ring.label(z).to_string()));
        }
        Ok(RigidityStructure { death, birth })
    }

    /// Birth scaled by c, death by 1/c. Snakes are unchanged.
    pub fn rescale(&self, strand: usize, c: &Cyclotomic) -> Result<Self, RigidityError> {
        let mut out = self.clone();
        out.birth[strand] = &out.birth[strand] * c;
        out.death[strand] = &out.death[strand] * &c.inv()?;
        Ok(out)
    }

    /// ptr_r(Id_z) = b_z ∘ d_{z*}.
    pub fn right_pseudo_trace(&self, ring: &FusionRing, z: usize) -> Cyclotomic {
        &self.birth[z] * &self.death[ring.dual(z)]
    }

    /// ptr_l(Id_z) = b_{z*} ∘ d_z.
    pub fn left_pseudo_trace(&self, ring: &FusionRing, z: usize) -> Cyclotomic {
        &self.birth[ring.dual(z)] * &self.death[z]
    }
}

/// Position of the path through the unit on the internal edge.
fn unit_path_index(ring: &FusionRing, word: [usize; 3], target: usize, shape: Shape) -> Result<usize, RigidityError> {
    let basis = canonical_basis(ring, &word, target, shape)?;
    let path = BasisPath::new(vec![ring.unit()], vec![0, 0]);
    Ok(basis.position(&path).expect("unit path exists whenever z* z contains the unit"))
}

/// a^z_{z,z*,z} from the unit path of z(z* z) to the unit path of (z z*)z.
pub fn right_corner(f: &AssociatorSet, z: usize) -> Result<Cyclotomic, RigidityError> {
    let ring = f.ring();
    let word = [z, ring.dual(z), z];
    let block = f.block((z, ring.dual(z), z, z))?;
    let r = unit_path_index(ring, word, z, Shape::Right)?;
    let c = unit_path_index(ring, word, z, Shape::Left)?;
    Ok(block.get(r, c).clone())
}

/// (a^{z*}_{z*,z,z*})⁻¹ from the unit path of (z* z)z* to the unit path of z*(z z*).
pub fn left_corner(f: &AssociatorSet, z: usize) -> Result<Cyclotomic, RigidityError> {
    let ring = f.ring();
    let zd = ring.dual(z);
    let word = [zd, z, zd];
    let key = (zd, z, zd, zd);
    let block = f.block(key)?;
    let inverse = block.inverse().ok_or(FieldError::DivisionByZero)?;
    let r = unit_path_index(ring, word, zd, Shape::Left)?;
    let c = unit_path_index(ring, word, zd, Shape::Right)?;
    Ok(inverse.get(r, c).clone())
}

/// Death 1 and birth 1/corner on every strand, the corner being the unit-to-unit
/// entry of a^z_{z,z*,z}.
pub fn build_rigidity(f: &AssociatorSet) -> Result<RigidityStructure, RigidityError> {
    let ring = f.ring();
    let mut birth = Vec::with_capacity(ring.rank());
    for z in 0..ring.rank() {
        let corner = right_corner(f, z)?;
        if corner.is_zero() {
            let key = (z, ring.dual(z), z, z);
            return Err(RigidityError::ZeroCorner {
                strand: ring.label(z).to_string(),
                entry: crate::associator::key_name(ring, key),
            });
        }
        birth.push(corner.inv()?);
    }
    RigidityStructure::new(ring, vec![Cyclotomic::one(); ring.rank()], birth)
}

/// Per strand z: (b_z ⊗ Id_z)∘(Id_z ⊗ d_z) and (Id_{z*} ⊗ b_z)∘(d_z ⊗ Id_{z*}) as scalars.
pub fn snake_check(f: &AssociatorSet, r: &RigidityStructure) -> Result<Vec<(Cyclotomic, Cyclotomic)>, RigidityError> {
    (0..f.ring().rank())
        .map(|z| {
            let pair = &r.birth[z] * &r.death[z];
            Ok((&pair * &right_corner(f, z)?, &pair * &left_corner(f, z)?))
        })
        .collect()
}

/// Nonzero spaces V^z_{x,y}, in lexicographic order of (x, y, z).
pub fn all_spaces(ring: &FusionRing) -> Vec<Space> {
    let r = ring.rank();
    let mut out = Vec::new();
    for x in 0..r {
        for y in 0..r {
            for z in 0..r {
                if ring.n(x, y, z) > 0 {
                    out.push((x, y, z));
                }
            }
        }
    }
    out
}

/// Nonzero spaces V^z_{x,y} with none of x, y, z the unit.
pub fn unit_free_spaces(ring: &FusionRing) -> Vec<Space> {
    let one = ring.unit();
    all_spaces(ring).into_iter().filter(|&(x, y, z)| x != one && y != one && z != one).collect()
}

/// The space V^{y*}_{z*,x} that bending one arm sends V^z_{x,y} to.
pub fn bent_space(ring: &FusionRing, (x, y, z): Space) -> Space {
    (ring.dual(z), x, ring.dual(y))
}

/// Bending arms on V^z_{x,y}: z bent down on the left with d_z, y bent up on the right
/// with b_y. Row i holds the image of the i-th basis vector in the basis of V^{y*}_{z*,x}.
pub fn bend(f: &AssociatorSet, r: &RigidityStructure, space: Space) -> Result<FieldMatrix, RigidityError> {
    let ring = f.ring();
    let (x, y, z) = space;
    let n = ring.n(x, y, z) as usize;
    if n == 0 {
        return Err(RigidityError::EmptySpace(ring.label(x).into(), ring.label(y).into(), ring.label(z).into()));
    }
    let (zd, yd) = (ring.dual(z), ring.dual(y));
    let m = ring.n(zd, x, yd) as usize;
    let word = [zd, x, y];
    let one = ring.unit();
    let block = f.block((zd, x, y, one))?;
    let rows = canonical_basis(ring, &word, one, Shape::Right)?;
    let cols = canonical_basis(ring, &word, one, Shape::Left)?;
    let snake = &(&r.birth[y] * &r.death[y]) * &left_corner(f, y)?;
    let factor = &(&r.death[z] * &r.death[y].inv()?) * &snake;
    let mut out = FieldMatrix::zeros(n, m);
    for i in 0..n {
        let ri = rows.position(&BasisPath::new(vec![z], vec![i, 0])).expect("path through z");
        for k in 0..m {
            let ck = cols.position(&BasisPath::new(vec![yd], vec![k, 0])).expect("path through y*");
            out.set(i, k, &factor * block.get(ri, ck));
        }
    }
    Ok(out)
}

/// Bending on the direct sum of `spaces`, which must be closed under bending.
/// Block rows and columns follow the order of `spaces`.
pub fn bending_on(f: &AssociatorSet, r: &RigidityStructure, spaces: &[Space]) -> Result<FieldMatrix, RigidityError> {
    let ring = f.ring();
    let mut offsets = Vec::with_capacity(spaces.len());
    let mut total = 0;
    for &(x, y, z) in spaces {
        offsets.push(total);
        total += ring.n(x, y, z) as usize;
    }
    let mut out = FieldMatrix::zeros(total, total);
    for (s, &space) in spaces.iter().enumerate() {
        let target = bent_space(ring, space);
        let t = spaces.iter().position(|&v| v == target).expect("space list closed under bending");
        let piece = bend(f, r, space)?;
        for (i, k, v) in piece.entries() {
            out.set(offsets[s] + i, offsets[t] + k, v.clone());
        }
    }
    Ok(out)
}

/// A dual taken on a basis vector of V^z_{x,y}. The (1,2)-stranded morphism f* is
/// stored through the (2,1)-stranded morphism obtained by bending its y* output
/// down on the left, which lies in `space` = V^{x*}_{y,z*}.
#[derive(Clone, Debug, PartialEq)]
pub struct DualImage {
    pub space: Space,
    pub coefficients: Vec<Cyclotomic>,
}

/// f* for the `index`-th basis vector f of `space`.
pub fn dual_on_basis(f: &AssociatorSet, r: &RigidityStructure, space: Space, index: usize) -> Result<DualImage, RigidityError> {
    let ring = f.ring();
    let once = bend(f, r, space)?;
    let mid = bent_space(ring, space);
    let twice = once.mul(&bend(f, r, mid)?);
    Ok(DualImage { space: bent_space(ring, mid), coefficients: twice.row(index).to_vec() })
}

/// The dual of a (1,2)-stranded morphism given in bent form. For d = f* this is f**,
/// back in the space f lived in.
pub fn dual_of_dual(f: &AssociatorSet, r: &RigidityStructure, d: &DualImage) -> Result<DualImage, RigidityError> {
    let last = bend(f, r, d.space)?;
    let coefficients = (0..last.cols())
        .map(|k| d.coefficients.iter().enumerate().fold(Cyclotomic::zero(), |acc, (i, c)| &acc + &(c * last.get(i, k))))
        .collect();
    Ok(DualImage { space: bent_space(f.ring(), d.space), coefficients })
}

/// The double dual on V^z_{x,y}, row i holding f_i**.
pub fn double_dual(f: &AssociatorSet, r: &RigidityStructure, space: Space) -> Result<FieldMatrix, RigidityError> {
    let n = f.ring().n(space.0, space.1, space.2) as usize;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        rows.push(dual_of_dual(f, r, &dual_on_basis(f, r, space, i)?)?.coefficients);
    }
    Ok(FieldMatrix::from_rows(rows))
}

/// Rescales (birth, death) per strand so both pseudo-traces of every identity agree.
///
/// For each dual pair the lower-indexed strand gets death 1; its partner's scalar c
/// solves c² = ptr_r/ptr_l, taking the root whose first nonzero coordinate is positive (so 1 over −1).
pub fn balance_pseudo_traces(f: &AssociatorSet, r: &RigidityStructure) -> Result<RigidityStructure, RigidityError> {
    let ring = f.ring();
    let mut out = r.clone();
    for z in 0..ring.rank() {
        let zd = ring.dual(z);
        if zd < z {
            continue;
        }
        out = out.rescale(z, &out.death[z].clone())?;
        if zd == z {
            continue;
        }
        // ptr_r(z) scales by 1/c and ptr_l(z) by c when strand z* is rescaled by c.
        let ratio = &out.right_pseudo_trace(ring, z) * &out.left_pseudo_trace(ring, z).inv()?;
        let c = roots::nth_roots(&ratio, 2)?.into_iter().find(leading_positive).ok_or_else(|| RigidityError::NoSquareRootInField {
            strand: ring.label(zd).to_string(),
            value: Box::new(ratio.clone()),
        })?;
        out = out.rescale(zd, &c)?;
    }
    Ok(out)
}

fn leading_positive(c: &Cyclotomic) -> bool {
    c.coeffs().iter().find(|q| !num_traits::Zero::is_zero(*q)).is_some_and(num_traits::Signed::is_positive)
}

/// B⁶ = I on every (2,1)-stranded basis vector, units included.
pub fn quadruple_dual_check(f: &AssociatorSet, r: &RigidityStructure) -> Result<bool, RigidityError> {
    let b = bending_on(f, r, &all_spaces(f.ring()))?;
    let b3 = b.mul(&b).mul(&b);
    Ok(b3.mul(&b3).is_identity())
}
