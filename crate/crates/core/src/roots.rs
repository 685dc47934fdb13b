//! Exact roots of univariate polynomials over Q(ζ₁₂).
//!
//! Roots are located numerically in two embeddings, lifted to Z[ζ] after an
//! integral rescaling, and then accepted only after exact evaluation.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::cyclotomic::{Cyclotomic, FieldError, Rational};

/// Coefficients, lowest degree first.
pub type UniPoly = Vec<Cyclotomic>;

pub fn trim(p: &mut UniPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn degree(p: &[Cyclotomic]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn evaluate(p: &[Cyclotomic], x: &Cyclotomic) -> Cyclotomic {
    let mut acc = Cyclotomic::zero();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

pub fn derivative(p: &[Cyclotomic]) -> UniPoly {
    p.iter().enumerate().skip(1).map(|(k, c)| c * &Cyclotomic::from_integer(k as i64)).collect()
}

/// Quotient and remainder; `d` must be nonzero.
pub fn divmod(n: &[Cyclotomic], d: &[Cyclotomic]) -> Result<(UniPoly, UniPoly), FieldError> {
    let dd = degree(d).ok_or(FieldError::DivisionByZero)?;
    let lead_inv = d[dd].inv()?;
    let mut rem: UniPoly = n.to_vec();
    trim(&mut rem);
    if rem.len() <= dd {
        return Ok((Vec::new(), rem));
    }
    let mut quot = vec![Cyclotomic::zero(); rem.len() - dd];
    while let Some(rd) = degree(&rem) {
        if rd < dd {
            break;
        }
        let factor = &rem[rd] * &lead_inv;
        let shift = rd - dd;
        for (k, c) in d.iter().enumerate().take(dd + 1) {
            let t = &factor * c;
            rem[shift + k] -= &t;
        }
        quot[shift] = factor;
        trim(&mut rem);
    }
    trim(&mut quot);
    Ok((quot, rem))
}

pub fn monic(p: &[Cyclotomic]) -> Result<UniPoly, FieldError> {
    let d = degree(p).ok_or(FieldError::DivisionByZero)?;
    let inv = p[d].inv()?;
    Ok(p[..=d].iter().map(|c| c * &inv).collect())
}

pub fn gcd(a: &[Cyclotomic], b: &[Cyclotomic]) -> Result<UniPoly, FieldError> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let (_, r) = divmod(&x, &y)?;
        x = y;
        y = r;
    }
    if x.is_empty() {
        return Ok(x);
    }
    monic(&x)
}

/// p / gcd(p, p'), made monic.
pub fn squarefree(p: &[Cyclotomic]) -> Result<UniPoly, FieldError> {
    let g = gcd(p, &derivative(p))?;
    let (q, _) = divmod(p, &g)?;
    monic(&q)
}

/// Distinct roots lying in Q(ζ₁₂), sorted. Errors on the zero polynomial.
pub fn roots_in_field(p: &[Cyclotomic]) -> Result<Vec<Cyclotomic>, FieldError> {
    let Some(d) = degree(p) else {
        return Err(FieldError::Malformed { text: "0".into(), reason: "zero polynomial has every root" });
    };
    let mut out = Vec::new();
    let low = p.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if low > 0 {
        out.push(Cyclotomic::zero());
    }
    if d > low {
        let reduced: UniPoly = p[low..=d].to_vec();
        let sf = squarefree(&reduced)?;
        out.extend(nonzero_roots(&sf)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn nth_roots(a: &Cyclotomic, n: usize) -> Result<Vec<Cyclotomic>, FieldError> {
    let mut p = vec![Cyclotomic::zero(); n + 1];
    p[0] = -a;
    p[n] = Cyclotomic::one();
    roots_in_field(&p)
}

/// Both square roots, or `NotFound` when `a` is not a square in the field.
pub fn sqrt(a: &Cyclotomic) -> Result<Vec<Cyclotomic>, FieldError> {
    let r = nth_roots(a, 2)?;
    if r.is_empty() {
        Err(FieldError::NotFound)
    } else {
        Ok(r)
    }
}

fn lcm_denominator(p: &[Cyclotomic]) -> BigInt {
    p.iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.denominator()))
}

/// Roots of a monic squarefree polynomial with nonzero constant term.
fn nonzero_roots(p: &[Cyclotomic]) -> Result<Vec<Cyclotomic>, FieldError> {
    let n = p.len() - 1;
    if n == 1 {
        return Ok(vec![-&p[0]]);
    }
    let m = lcm_denominator(p);
    // q(Y) = m^n p(Y/m): monic with coefficients in Z[ζ]; its roots are m times those of p.
    let mut q = Vec::with_capacity(n + 1);
    let mut mpow = BigInt::one();
    for k in (0..=n).rev() {
        q.push(p[k].scale(&Rational::from_integer(mpow.clone())));
        mpow *= &m;
    }
    q.reverse();
    let m_rat = Rational::from_integer(m);

    let r1 = numeric_roots(&q.iter().map(|c| c.embed_at(1)).collect::<Vec<_>>());
    let r5 = numeric_roots(&q.iter().map(|c| c.embed_at(5)).collect::<Vec<_>>());
    let inverse = minkowski_inverse();
    let mut found: Vec<Cyclotomic> = Vec::new();
    for a in &r1 {
        for b in &r5 {
            let rhs = [a.re, a.im, b.re, b.im];
            let mut coeffs = [0i64; 4];
            let mut ok = true;
            for (row, slot) in inverse.iter().zip(coeffs.iter_mut()) {
                let v: f64 = row.iter().zip(rhs.iter()).map(|(x, y)| x * y).sum();
                let rounded = v.round();
                if (v - rounded).abs() > 0.25 || !rounded.is_finite() || rounded.abs() > 9.0e15 {
                    ok = false;
                    break;
                }
                *slot = rounded as i64;
            }
            if !ok {
                continue;
            }
            let cand = Cyclotomic::from_ints(coeffs).scale(&m_rat.recip());
            if !found.contains(&cand) && evaluate(p, &cand).is_zero() {
                found.push(cand);
            }
        }
    }
    Ok(found)
}

/// Inverse of the real 4×4 map from power-basis coordinates to (Re σ₁, Im σ₁, Re σ₅, Im σ₅).
fn minkowski_inverse() -> [[f64; 4]; 4] {
    let mut m = [[0.0f64; 4]; 4];
    for j in 0..4 {
        let e1 = Cyclotomic::zeta_pow(j as i64).embed_at(1);
        let e5 = Cyclotomic::zeta_pow(j as i64).embed_at(5);
        m[0][j] = e1.re;
        m[1][j] = e1.im;
        m[2][j] = e5.re;
        m[3][j] = e5.im;
    }
    invert4(m)
}

fn invert4(m: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut a = [[0.0f64; 8]; 4];
    for i in 0..4 {
        a[i][..4].copy_from_slice(&m[i]);
        a[i][4 + i] = 1.0;
    }
    for col in 0..4 {
        let piv = (col..4).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                let pivot_row = a[col];
                for (v, pv) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *v -= f * pv;
                }
            }
        }
    }
    let mut inv = [[0.0f64; 4]; 4];
    for i in 0..4 {
        inv[i].copy_from_slice(&a[i][4..]);
    }
    inv
}

/// All complex roots of a polynomial (lowest degree first, nonzero leading coefficient)
/// by Aberth iteration followed by Newton polishing.
pub fn numeric_roots(p: &[Complex64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = p[n];
    let c: Vec<Complex64> = p.iter().map(|x| x / lead).collect();
    let radius = 1.0 + c[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.7, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::zero();
        let mut dv = Complex64::zero();
        for a in c.iter().rev() {
            dv = dv * x + v;
            v = v * x + a;
        }
        (v, dv)
    };
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, dv) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::one() / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::one() - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = eval(*zi);
            if dv.norm() == 0.0 {
                break;
            }
            let step = v / dv;
            if step.is_finite() {
                *zi -= step;
            }
        }
    }
    z
}

/// Numerical sanity bound used by tests: |p(z)| relative to the coefficient size.
pub fn residual_norm(p: &[Complex64], z: Complex64) -> f64 {
    let v = p.iter().rev().fold(Complex64::zero(), |acc, c| acc * z + c);
    let scale: f64 = p.iter().map(|c| c.norm()).sum::<f64>() * (1.0 + z.norm()).powi(p.len() as i32);
    v.norm() / scale.max(f64::MIN_POSITIVE)
}
