//! Exact arithmetic in Q(ζ₁₂) = Q(√3, i).
//!
//! Elements are stored as rational coordinates in the power basis
//! {1, ζ, ζ², ζ³} with ζ = e^{iπ/6}, reduced by ζ⁴ = ζ² − 1.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

/// Exponents k with σ_k(ζ) = ζ^k a field automorphism.
pub const GALOIS_UNITS: [u32; 4] = [1, 5, 7, 11];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not a unit modulo 12")]
    InvalidAutomorphism(i64),
    #[error("no field element found near the given value")]
    NotFound,
    #[error("malformed rational {text:?}: {reason}")]
    Malformed { text: String, reason: &'static str },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cyclotomic {
    c: [Rational; 4],
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Basis coordinates of ζ^m for m = 0..12.
fn zeta_power_table() -> [[i64; 4]; 12] {
    let mut t = [[0i64; 4]; 12];
    t[0] = [1, 0, 0, 0];
    for m in 1..12 {
        let p = t[m - 1];
        // multiply by ζ, then fold ζ⁴ = ζ² − 1
        t[m] = [-p[3], p[0], p[1] + p[3], p[2]];
    }
    t
}

impl Cyclotomic {
    pub fn new(c: [Rational; 4]) -> Self {
        Cyclotomic { c }
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        Cyclotomic { c: c.map(rat) }
    }

    pub fn zero() -> Self {
        Self::from_ints([0; 4])
    }

    pub fn one() -> Self {
        Self::from_ints([1, 0, 0, 0])
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_ints([n, 0, 0, 0])
    }

    pub fn from_rational(q: Rational) -> Self {
        Cyclotomic { c: [q, Rational::zero(), Rational::zero(), Rational::zero()] }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zeta() -> Self {
        Self::from_ints([0, 1, 0, 0])
    }

    /// ζ^m for any integer m.
    pub fn zeta_pow(m: i64) -> Self {
        Self::from_ints(zeta_power_table()[m.rem_euclid(12) as usize])
    }

    pub fn i() -> Self {
        Self::zeta_pow(3)
    }

    pub fn sqrt3() -> Self {
        Self::from_ints([0, 2, 0, -1])
    }

    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self == &Self::one()
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(Zero::is_zero)
    }

    /// Least common multiple of the coordinate denominators.
    pub fn denominator(&self) -> BigInt {
        self.c.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Cyclotomic { c: [&self.c[0] * q, &self.c[1] * q, &self.c[2] * q, &self.c[3] * q] }
    }

    /// Matrix of multiplication by `self` on coordinate vectors (row j = self·ζ^j).
    fn mul_matrix(&self) -> [[Rational; 4]; 4] {
        let mut rows: [[Rational; 4]; 4] = Default::default();
        for (j, row) in rows.iter_mut().enumerate() {
            *row = (self * &Self::zeta_pow(j as i64)).c;
        }
        rows
    }

    /// Multiplicative inverse, found by solving the 4×4 system for multiplication by `self`.
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // Unknown u = Σ u_j ζ^j with Σ u_j (self·ζ^j) = 1: solve Mᵀu = e₀.
        let m = self.mul_matrix();
        let mut a: Vec<Vec<Rational>> = (0..4)
            .map(|r| {
                let mut row: Vec<Rational> = (0..4).map(|j| m[j][r].clone()).collect();
                row.push(if r == 0 { Rational::one() } else { Rational::zero() });
                row
            })
            .collect();
        for col in 0..4 {
            let piv = (col..4).find(|&r| !a[r][col].is_zero()).ok_or(FieldError::DivisionByZero)?;
            a.swap(col, piv);
            let p = a[col][col].clone();
            for v in a[col].iter_mut() {
                *v = &*v / &p;
            }
            for r in 0..4 {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for k in col..5 {
                        let t = &a[col][k] * &f;
                        a[r][k] -= t;
                    }
                }
            }
        }
        Ok(Cyclotomic { c: [a[0][4].clone(), a[1][4].clone(), a[2][4].clone(), a[3][4].clone()] })
    }

    pub fn pow(&self, e: i64) -> Result<Self, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        Ok(acc)
    }

    /// The automorphism σ_k : ζ ↦ ζ^k.
    pub fn galois(&self, k: i64) -> Result<Self, FieldError> {
        if k.gcd(&12) != 1 {
            return Err(FieldError::InvalidAutomorphism(k));
        }
        let t = zeta_power_table();
        let mut out: [Rational; 4] = Default::default();
        for (m, cm) in self.c.iter().enumerate() {
            if cm.is_zero() {
                continue;
            }
            let img = t[(m as i64 * k).rem_euclid(12) as usize];
            for (o, &v) in out.iter_mut().zip(img.iter()) {
                if v != 0 {
                    *o += cm * rat(v);
                }
            }
        }
        Ok(Cyclotomic { c: out })
    }

    pub fn conj(&self) -> Self {
        self.galois(11).expect("11 is a unit")
    }

    /// Complex value under the standard embedding ζ ↦ e^{iπ/6}.
    pub fn embed_numeric(&self) -> Complex64 {
        self.embed_at(1)
    }

    /// Complex value of σ_k(self).
    pub fn embed_at(&self, k: u32) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for (m, cm) in self.c.iter().enumerate() {
            if cm.is_zero() {
                continue;
            }
            let ang = std::f64::consts::PI * (m as f64 * k as f64) / 6.0;
            z += Complex64::from_polar(cm.to_f64().unwrap_or(f64::NAN), ang);
        }
        z
    }

    /// Exact element of Q(ζ₁₂) closest to `z` whose coordinate denominators are at most
    /// `denominator_bound`, provided it is isolated.
    pub fn recognize(z: Complex64, denominator_bound: u64) -> Result<Self, FieldError> {
        let bound = denominator_bound.max(1);
        let height = 16f64.max(4.0 * z.norm());
        let (a, b) = recognize_quadratic(z.re, 2 * bound, height)?;
        let (c, e) = recognize_quadratic(z.im, 2 * bound, height)?;
        // a + b√3 + i(c + e√3) with √3 = 2ζ − ζ³, i = ζ³, i√3 = 2ζ² − 1
        let two = rat(2);
        let out = Cyclotomic { c: [&a - &e, &b * &two, &e * &two, &c - &b] };
        if out.c.iter().any(|q| q.denom() > &BigInt::from(bound)) {
            return Err(FieldError::NotFound);
        }
        Ok(out)
    }
}

const RECOGNIZE_TOL: f64 = 1e-8;
const RECOGNIZE_ISOLATION: f64 = 1000.0;

/// Finds rationals p, q with p + q√3 ≈ x, common denominator ≤ `max_den`, |q| ≤ height.
fn recognize_quadratic(x: f64, max_den: u64, height: f64) -> Result<(Rational, Rational), FieldError> {
    if !x.is_finite() {
        return Err(FieldError::NotFound);
    }
    let s3 = 3f64.sqrt();
    let mut best: Option<(f64, Rational, Rational)> = None;
    let mut runner_up = f64::INFINITY;
    for d in 1..=max_den {
        let df = d as f64;
        let mmax = (df * height).ceil() as i64;
        let target = df * x;
        for m in -mmax..=mmax {
            let n = (target - m as f64 * s3).round();
            let dist = ((n + m as f64 * s3) / df - x).abs();
            if dist > RECOGNIZE_TOL {
                continue;
            }
            let p = Rational::new(BigInt::from(n as i64), BigInt::from(d));
            let q = Rational::new(BigInt::from(m), BigInt::from(d));
            match &best {
                Some((_, bp, bq)) if *bp == p && *bq == q => {}
                Some((bd, _, _)) if dist < *bd => {
                    runner_up = runner_up.min(*bd);
                    best = Some((dist, p, q));
                }
                Some(_) => runner_up = runner_up.min(dist),
                None => best = Some((dist, p, q)),
            }
        }
    }
    let (bd, p, q) = best.ok_or(FieldError::NotFound)?;
    if runner_up.is_finite() && runner_up <= RECOGNIZE_ISOLATION * bd.max(1e-15) {
        return Err(FieldError::NotFound);
    }
    Ok((p, q))
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Cyclotomic::one()
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, o: &Cyclotomic) -> Cyclotomic {
        Cyclotomic { c: [&self.c[0] + &o.c[0], &self.c[1] + &o.c[1], &self.c[2] + &o.c[2], &self.c[3] + &o.c[3]] }
    }
}

impl<'a> Sub<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, o: &Cyclotomic) -> Cyclotomic {
        Cyclotomic { c: [&self.c[0] - &o.c[0], &self.c[1] - &o.c[1], &self.c[2] - &o.c[2], &self.c[3] - &o.c[3]] }
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, o: &Cyclotomic) -> Cyclotomic {
        let mut p: [Rational; 7] = Default::default();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    p[i + j] += a * b;
                }
            }
        }
        for k in (4..7).rev() {
            let t = std::mem::take(&mut p[k]);
            if !t.is_zero() {
                p[k - 2] += &t;
                p[k - 4] -= t;
            }
        }
        let [a, b, c, d, ..] = p;
        Cyclotomic { c: [a, b, c, d] }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { c: [-&self.c[0], -&self.c[1], -&self.c[2], -&self.c[3]] }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -&self
    }
}

impl Div<&Cyclotomic> for &Cyclotomic {
    type Output = Cyclotomic;
    /// Panics on division by zero, like integer division.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &Cyclotomic) -> Cyclotomic {
        self * &o.inv().expect("division by zero in Q(ζ12)")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, o: Cyclotomic) -> Cyclotomic {
                (&self).$m(&o)
            }
        }
        impl $tr<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, o: &Cyclotomic) -> Cyclotomic {
                (&self).$m(o)
            }
        }
        impl $tr<Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $m(self, o: Cyclotomic) -> Cyclotomic {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, o: &Cyclotomic) {
        for (a, b) in self.c.iter_mut().zip(o.c.iter()) {
            *a += b;
        }
    }
}

impl SubAssign<&Cyclotomic> for Cyclotomic {
    fn sub_assign(&mut self, o: &Cyclotomic) {
        for (a, b) in self.c.iter_mut().zip(o.c.iter()) {
            *a -= b;
        }
    }
}

impl MulAssign<&Cyclotomic> for Cyclotomic {
    fn mul_assign(&mut self, o: &Cyclotomic) {
        *self = &*self * o;
    }
}

impl From<i64> for Cyclotomic {
    fn from(n: i64) -> Self {
        Cyclotomic::from_integer(n)
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, q) in self.c.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let mag = q.abs();
            if first {
                if q.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if q.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            match (m, unit) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}·")?,
            }
            match m {
                0 => {}
                1 => write!(f, "ζ")?,
                _ => write!(f, "ζ^{m}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic({self})")
    }
}

/// Canonical text of a rational: "p" for integers, "p/q" otherwise, lowest terms.
pub fn rational_to_string(q: &Rational) -> String {
    q.to_string()
}

/// Parses a rational in canonical form; "2/4", "3/1", "+1", "-0" and "01" are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, FieldError> {
    let bad = |reason| FieldError::Malformed { text: text.to_string(), reason };
    let canonical_int = |s: &str, allow_sign: bool| -> bool {
        let digits = if allow_sign { s.strip_prefix('-').unwrap_or(s) } else { s };
        !digits.is_empty()
            && digits.bytes().all(|b| b.is_ascii_digit())
            && (digits == "0" || !digits.starts_with('0'))
            && !(s.starts_with('-') && digits == "0")
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    if !canonical_int(num, true) {
        return Err(bad("numerator is not a canonical integer"));
    }
    let n = BigInt::from_str(num).map_err(|_| bad("numerator is not an integer"))?;
    match den {
        None => Ok(Rational::from_integer(n)),
        Some(d) => {
            if !canonical_int(d, false) {
                return Err(bad("denominator is not a canonical positive integer"));
            }
            let d = BigInt::from_str(d).map_err(|_| bad("denominator is not an integer"))?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            if d.is_one() {
                return Err(bad("integer written with denominator 1"));
            }
            if !n.gcd(&d).is_one() {
                return Err(bad("not in lowest terms"));
            }
            Ok(Rational::new_raw(n, d))
        }
    }
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.c.iter().map(rational_to_string).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let strs: Vec<String> = Vec::deserialize(d)?;
        if strs.len() != 4 {
            return Err(D::Error::custom(format!("expected 4 coefficients, found {}", strs.len())));
        }
        let mut c: [Rational; 4] = Default::default();
        for (slot, s) in c.iter_mut().zip(strs.iter()) {
            *slot = parse_rational(s).map_err(D::Error::custom)?;
        }
        Ok(Cyclotomic { c })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_cubed_squared_is_minus_one() {
        assert_eq!(Cyclotomic::i() * Cyclotomic::i(), Cyclotomic::from_integer(-1));
    }

    #[test]
    fn sqrt3_squares_to_three() {
        let s = Cyclotomic::sqrt3();
        assert_eq!(&s * &s, Cyclotomic::from_integer(3));
    }

    #[test]
    fn zeta_has_order_twelve() {
        let z = Cyclotomic::zeta();
        for k in 1..12 {
            assert!(!z.pow(k).unwrap().is_one(), "ζ^{k}");
        }
        assert!(z.pow(12).unwrap().is_one());
    }

    #[test]
    fn inverse_of_zeta() {
        let inv = Cyclotomic::zeta().inv().unwrap();
        assert_eq!(inv, Cyclotomic::zeta_pow(11));
        assert_eq!(inv, -Cyclotomic::zeta_pow(5));
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(Cyclotomic::zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn galois_rejects_non_units() {
        assert_eq!(Cyclotomic::one().galois(3), Err(FieldError::InvalidAutomorphism(3)));
    }

    #[test]
    fn display_is_readable() {
        let x = Cyclotomic::new([Rational::new(1.into(), 2.into()), rat(-1), rat(0), rat(2)]);
        assert_eq!(x.to_string(), "1/2 - ζ + 2·ζ^3");
    }

    #[test]
    fn parse_rejects_non_canonical() {
        for s in ["2/4", "3/1", "+1", "-0", "01", "1/0", "1/-2", "", "x"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
        assert_eq!(parse_rational("-3/4").unwrap(), Rational::new((-3).into(), 4.into()));
    }
}
