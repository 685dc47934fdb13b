//! Sparse multivariate Laurent polynomials over Q(ζ₁₂).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cyclotomic::{Cyclotomic, FieldError};
use crate::matrix::Ring;

pub type Var = u32;

/// Monomial as sorted (variable, nonzero exponent) pairs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(Vec<(Var, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: i32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: Var) -> i32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |&(_, e)| e)
    }

    pub fn factors(&self) -> &[(Var, i32)] {
        &self.0
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            match (self.0.get(i), o.0.get(j)) {
                (Some(&(a, ea)), Some(&(b, eb))) if a == b => {
                    if ea + eb != 0 {
                        out.push((a, ea + eb));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(a, ea)), Some(&(b, _))) if a < b => {
                    out.push((a, ea));
                    i += 1;
                }
                (Some(_), Some(&(b, eb))) => {
                    out.push((b, eb));
                    j += 1;
                }
                (Some(&p), None) => {
                    out.push(p);
                    i += 1;
                }
                (None, Some(&p)) => {
                    out.push(p);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, e)| (v, -e)).collect())
    }

    fn without(&self, v: Var) -> Monomial {
        Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Cyclotomic>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Cyclotomic) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one() -> Self {
        Poly::constant(Cyclotomic::one())
    }

    pub fn var(v: Var) -> Self {
        Poly::term(Cyclotomic::one(), Monomial::var(v, 1))
    }

    pub fn term(c: Cyclotomic, m: Monomial) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Cyclotomic> {
        match self.terms.len() {
            0 => Some(Cyclotomic::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Cyclotomic {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Cyclotomic::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// The single term if the polynomial is a monomial times a constant.
    pub fn as_term(&self) -> Option<(&Monomial, &Cyclotomic)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|&(v, _)| v)).collect()
    }

    pub fn total_degree(&self) -> i32 {
        self.terms.keys().map(|m| m.0.iter().map(|&(_, e)| e).sum::<i32>()).max().unwrap_or(0)
    }

    pub fn max_exponent(&self, v: Var) -> i32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn min_exponent(&self, v: Var) -> i32 {
        self.terms.keys().map(|m| m.exponent(v)).min().unwrap_or(0)
    }

    fn insert_term(&mut self, m: Monomial, c: Cyclotomic) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn add_in_place(&mut self, o: &Poly) {
        for (m, c) in &o.terms {
            self.insert_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.insert_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Cyclotomic) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coefficient of v^k, as a polynomial in the remaining variables.
    pub fn coefficient(&self, v: Var, k: i32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.exponent(v) == k {
                out.insert_term(m.without(v), c.clone());
            }
        }
        out
    }

    /// Replaces v by `value`. Negative powers of v need `value` to be a single term.
    pub fn substitute(&self, v: Var, value: &Poly) -> Result<Poly, FieldError> {
        if !self.vars().contains(&v) {
            return Ok(self.clone());
        }
        let inverse = if self.min_exponent(v) < 0 {
            let (m, c) = value.as_term().ok_or(FieldError::DivisionByZero)?;
            Some(Poly::term(c.inv()?, m.inverse()))
        } else {
            None
        };
        let mut powers: BTreeMap<i32, Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let rest = Poly::term(c.clone(), m.without(v));
            if e == 0 {
                out.add_in_place(&rest);
                continue;
            }
            let pw = powers
                .entry(e)
                .or_insert_with(|| if e > 0 { value.pow(e as u32) } else { inverse.as_ref().unwrap().pow((-e) as u32) })
                .clone();
            out.add_in_place(&rest.mul(&pw));
        }
        Ok(out)
    }

    /// Evaluates at field values; unassigned variables make this `None`.
    pub fn evaluate(&self, values: &BTreeMap<Var, Cyclotomic>) -> Result<Option<Cyclotomic>, FieldError> {
        let mut acc = Cyclotomic::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                let Some(x) = values.get(&v) else { return Ok(None) };
                t = &t * &x.pow(e as i64)?;
            }
            acc += &t;
        }
        Ok(Some(acc))
    }

    /// Univariate coefficients (lowest degree first) if only `v` occurs with nonnegative powers.
    pub fn univariate_coeffs(&self, v: Var) -> Option<Vec<Cyclotomic>> {
        if self.vars().iter().any(|&w| w != v) || self.min_exponent(v) < 0 {
            return None;
        }
        let deg = self.max_exponent(v).max(0) as usize;
        let mut out = vec![Cyclotomic::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m.exponent(v) as usize] = c.clone();
        }
        Some(out)
    }

    pub fn galois(&self, k: i64) -> Result<Poly, FieldError> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.insert_term(m.clone(), c.galois(k)?);
        }
        Ok(out)
    }

    /// Leading coefficient in the internal term order.
    pub fn leading_coefficient(&self) -> Option<&Cyclotomic> {
        self.terms.values().next_back()
    }

    /// Scaled so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading_coefficient() {
            Some(c) => self.scale(&c.inv().expect("nonzero leading coefficient")),
            None => Poly::zero(),
        }
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names: Some(names) }
    }
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Poly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Poly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Poly::mul(self, o)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn from_field(c: &Cyclotomic) -> Self {
        Poly::constant(c.clone())
    }
    fn add_assign(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            self.insert_term(m.clone(), c.clone());
        }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: Option<&'a [String]>,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.poly.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono: Vec<String> = m
                .0
                .iter()
                .map(|&(v, e)| {
                    let name = self.names.and_then(|n| n.get(v as usize).cloned()).unwrap_or_else(|| format!("v{v}"));
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            match (m.is_one(), c.is_one()) {
                (true, _) => write!(f, "({c})")?,
                (false, true) => write!(f, "{}", mono.join("·"))?,
                (false, false) => write!(f, "({c})·{}", mono.join("·"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        PolyDisplay { poly: self, names: None }.fmt(f)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Cyclotomic {
        Cyclotomic::from_integer(n)
    }

    #[test]
    fn square_of_binomial() {
        let p = Poly::var(0).add(&Poly::var(1));
        let sq = p.mul(&p);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.coefficient(0, 1), Poly::var(1).scale(&c(2)));
    }

    #[test]
    fn laurent_cancellation() {
        let p = Poly::term(c(3), Monomial::var(0, 2)).mul(&Poly::term(c(1), Monomial::var(0, -2)));
        assert_eq!(p.as_constant(), Some(c(3)));
    }

    #[test]
    fn substitution_and_evaluation() {
        // x^2 y - 1 at x = y + 1
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = x.mul(&x).mul(&y).sub(&Poly::one());
        let q = p.substitute(0, &y.add(&Poly::one())).unwrap();
        let vals = BTreeMap::from([(1, c(2))]);
        assert_eq!(q.evaluate(&vals).unwrap(), Some(c(17)));
    }

    #[test]
    fn negative_power_needs_monomial_value() {
        let p = Poly::term(c(1), Monomial::var(0, -1));
        assert!(p.substitute(0, &Poly::var(1).add(&Poly::one())).is_err());
        let q = p.substitute(0, &Poly::var(1).scale(&c(2))).unwrap();
        assert_eq!(q, Poly::term(Cyclotomic::ratio(1, 2), Monomial::var(1, -1)));
    }
}
