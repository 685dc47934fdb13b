//! Strategies shared by the property and acceptance targets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fusion_core::associator::{AssociatorSet, Gauge};
use fusion_core::cyclotomic::{Cyclotomic, Rational};
use fusion_core::fusion_ring::FusionRing;
use fusion_core::matrix::Matrix;
use fusion_core::reference::reference_solution;
use num_bigint::BigInt;
use proptest::prelude::*;

pub const ONE: usize = 0;
pub const Y: usize = 1;
pub const X: usize = 2;

pub fn coeff() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

pub fn element() -> impl Strategy<Value = Cyclotomic> {
    [coeff(), coeff(), coeff(), coeff()].prop_map(Cyclotomic::new)
}

/// Small integral entries keep exact gauge arithmetic cheap.
pub fn gauge_entry() -> impl Strategy<Value = Cyclotomic> {
    [-2i64..=2, -2i64..=2, -1i64..=1, -1i64..=1].prop_map(Cyclotomic::from_ints)
}

pub fn nonzero() -> impl Strategy<Value = Cyclotomic> {
    element().prop_filter("nonzero", |c| !c.is_zero())
}

/// Spaces V^z_{xy} of the rank-3 ring that a gauge may act on, with their dimensions.
pub fn gauge_spaces() -> Vec<((usize, usize, usize), usize)> {
    let ring = FusionRing::paper_ring();
    let mut out = Vec::new();
    for x in [Y, X] {
        for y in [Y, X] {
            for z in [ONE, Y, X] {
                let d = ring.n(x, y, z) as usize;
                if d > 0 {
                    out.push(((x, y, z), d));
                }
            }
        }
    }
    out
}

pub fn gauge() -> impl Strategy<Value = Gauge<Cyclotomic>> {
    let spaces = gauge_spaces();
    let cells: usize = spaces.iter().map(|(_, d)| d * d).sum();
    prop::collection::vec(gauge_entry(), cells)
        .prop_map(move |entries| {
            let mut it = entries.into_iter();
            let mut blocks = BTreeMap::new();
            for &(key, d) in &spaces {
                let m = Matrix::from_fn(d, d, |_, _| it.next().unwrap());
                blocks.insert(key, m);
            }
            Gauge { blocks }
        })
        .prop_filter("invertible", |g| g.blocks.values().all(|m| !m.det().is_zero()))
}

pub fn corrupted() -> AssociatorSet {
    let mut f = reference_solution();
    let key = (X, Y, X, Y);
    let m = f.block(key).unwrap();
    f.set(key, m.map(|c| -c)).unwrap();
    f
}
