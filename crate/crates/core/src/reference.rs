//! The explicit associator solution over the rank-3 ring, transcribed in exact form.

use crate::associator::{AssociatorSet, BlockKey};
use crate::cyclotomic::Cyclotomic;
use crate::fusion_ring::strand::{ONE, X, Y};
use crate::fusion_ring::FusionRing;
use crate::matrix::FieldMatrix;

/// ζ^k with ζ = e^{iπ/6}.
fn z(k: i64) -> Cyclotomic {
    Cyclotomic::zeta_pow(k)
}

fn half(c: &Cyclotomic) -> Cyclotomic {
    c * &Cyclotomic::ratio(1, 2)
}

/// φ = (−1 + √3)/2.
pub fn phi() -> Cyclotomic {
    half(&(&Cyclotomic::sqrt3() - &Cyclotomic::one()))
}

/// (1 − √3)/4, the common factor of the first two rows of a^x_{x,x,x}.
pub fn w_coefficient() -> Cyclotomic {
    &(&Cyclotomic::one() - &Cyclotomic::sqrt3()) * &Cyclotomic::ratio(1, 4)
}

/// d = e^{7πi/12}/√2, in basis form (−ζ + ζ² + ζ³)/2.
pub fn d() -> Cyclotomic {
    Cyclotomic::from_ints([0, -1, 1, 1]).scale(&num_rational::BigRational::new(1.into(), 2.into()))
}

/// w = (1 − √3)/4 · e^{2πi/3}.
pub fn w() -> Cyclotomic {
    &w_coefficient() * &z(4)
}

/// y = (e^{−iπ/3} + i)/2.
pub fn y() -> Cyclotomic {
    half(&(&z(-2) + &Cyclotomic::i()))
}

/// z = e^{5πi/6}/2.
pub fn z_param() -> Cyclotomic {
    half(&z(5))
}

/// b = i.
pub fn b() -> Cyclotomic {
    Cyclotomic::i()
}

/// The ten 1-dimensional blocks with their values.
pub fn one_dim_values() -> Vec<(BlockKey, Cyclotomic)> {
    let one = Cyclotomic::one();
    let minus = -&one;
    vec![
        ((Y, Y, Y, Y), one.clone()),
        ((X, Y, Y, X), one.clone()),
        ((Y, Y, X, X), one.clone()),
        ((X, Y, X, ONE), one.clone()),
        ((X, X, Y, ONE), one.clone()),
        ((X, X, Y, Y), one.clone()),
        ((Y, X, X, ONE), one.clone()),
        ((Y, X, X, Y), one.clone()),
        ((X, Y, X, Y), minus.clone()),
        ((Y, X, Y, X), minus),
    ]
}

/// a^x_{x,x,x} as a 6×6 matrix.
pub fn phi_matrix() -> FieldMatrix {
    let p = phi();
    let wc = w_coefficient();
    let a = half(&(&Cyclotomic::one() - &z(1)));
    let bq = half(&z(5));
    let c = y();
    let f = half(&z(2));
    let one = Cyclotomic::one();
    let m1 = -&one;
    let w1 = &wc * &z(1);
    let w4 = &wc * &z(4);
    FieldMatrix::from_rows(vec![
        vec![p.clone(), p.clone(), w1.clone(), w4.clone(), w4.clone(), w1.clone()],
        vec![p.clone(), -&p, w1.clone(), w4.clone(), -&w4, -&w1],
        vec![one.clone(), one.clone(), a.clone(), bq.clone(), c.clone(), f.clone()],
        vec![one.clone(), one.clone(), f.clone(), c.clone(), bq.clone(), a.clone()],
        vec![one.clone(), m1.clone(), a.clone(), bq.clone(), -&c, -&f],
        vec![m1, one, -&f, -&c, bq, a],
    ])
}

/// The full solution over `FusionRing::paper_ring()`.
pub fn reference_solution() -> AssociatorSet {
    let ring = FusionRing::paper_ring();
    let mut f = AssociatorSet::new(ring);
    let i = Cyclotomic::i();
    let zero = Cyclotomic::zero();
    let one = Cyclotomic::one();
    let put = |f: &mut AssociatorSet, key: BlockKey, m: FieldMatrix| f.set(key, m).expect("block sizes match the ring");
    for (key, v) in one_dim_values() {
        put(&mut f, key, FieldMatrix::scalar(v));
    }
    put(&mut f, (X, Y, X, X), FieldMatrix::from_rows(vec![vec![one.clone(), zero.clone()], vec![zero.clone(), -&one]]));
    put(&mut f, (X, X, Y, X), FieldMatrix::from_rows(vec![vec![zero.clone(), i.clone()], vec![-&i, zero.clone()]]));
    put(&mut f, (Y, X, X, X), FieldMatrix::from_rows(vec![vec![zero.clone(), one.clone()], vec![one.clone(), zero]]));
    let dd = d();
    let di = &dd * &i;
    put(&mut f, (X, X, X, ONE), FieldMatrix::from_rows(vec![vec![dd.clone(), di.clone()], vec![dd.clone(), -&di]]));
    put(&mut f, (X, X, X, Y), FieldMatrix::from_rows(vec![vec![di.clone(), dd.clone()], vec![-&di, dd]]));
    put(&mut f, (X, X, X, X), phi_matrix());
    f
}
