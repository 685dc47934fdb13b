//! Sequential exact elimination for small polynomial systems over Q(ζ₁₂).
//!
//! Each node normalizes its equations, then applies the first rule that fires:
//! split on a variable dividing an equation, substitute a variable that occurs
//! linearly with an invertible monomial coefficient, or branch over the field
//! roots of a univariate equation. Anything else is reported as stuck.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::cyclotomic::{Cyclotomic, FieldError};
use crate::poly::{Monomial, Poly, Var};
use crate::roots;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EliminationError {
    #[error("elimination budget of {0} nodes exceeded")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, Default)]
pub struct System {
    names: Vec<String>,
    equations: Vec<Poly>,
    nonzero: BTreeSet<Var>,
    nonzero_exprs: Vec<Poly>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    SplitZero { var: Var },
    SplitNonzero { var: Var },
    Substitute { var: Var, value: Poly },
    Root { var: Var, equation: Poly, value: Box<Cyclotomic> },
    /// u := ρ·M from an equation u^k = c·M^k in nonzero variables.
    BinomialRoot { var: Var, equation: Poly, value: Poly },
    NoFieldRoots { var: Var, equation: Poly },
    Contradiction { equation: Poly },
    NonzeroViolated { expr: Poly },
    Solution { leaf: usize },
    Stuck { equations: Vec<Poly> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEvent {
    pub depth: usize,
    pub event: Event,
}

/// A surviving branch. Values are stored as the substitution stack, innermost last.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub stack: Vec<(Var, Poly)>,
    pub free: Vec<Var>,
    /// Expressions in the free variables that must not vanish.
    pub conditions: Vec<Poly>,
}

#[derive(Clone, Debug, Default)]
pub struct Elimination {
    pub leaves: Vec<Leaf>,
    pub stuck: Vec<Vec<Poly>>,
    pub trace: Vec<TraceEvent>,
    pub nodes: usize,
}

impl Elimination {
    /// True when every branch closed with a contradiction and none got stuck.
    pub fn is_inconsistent(&self) -> bool {
        self.leaves.is_empty() && self.stuck.is_empty()
    }

    pub fn contradictions(&self) -> impl Iterator<Item = &Poly> {
        self.trace.iter().filter_map(|t| match &t.event {
            Event::Contradiction { equation } => Some(equation),
            _ => None,
        })
    }

    pub fn render_trace(&self, system: &System) -> Vec<String> {
        self.trace.iter().map(|t| format!("{}{}", "  ".repeat(t.depth), system.describe(&t.event))).collect()
    }
}

impl Leaf {
    pub fn is_point(&self) -> bool {
        self.free.is_empty()
    }

    /// Field values of all assigned variables given values of the free ones.
    pub fn evaluate(&self, params: &BTreeMap<Var, Cyclotomic>) -> Result<BTreeMap<Var, Cyclotomic>, FieldError> {
        let mut values = params.clone();
        for (v, expr) in self.stack.iter().rev() {
            let x = expr.evaluate(&values)?.ok_or(FieldError::NotFound)?;
            values.insert(*v, x);
        }
        Ok(values)
    }

    /// Values as polynomials in the free variables, when back-substitution stays polynomial.
    pub fn symbolic_values(&self) -> Result<BTreeMap<Var, Poly>, FieldError> {
        let mut out: BTreeMap<Var, Poly> = BTreeMap::new();
        for (v, expr) in self.stack.iter().rev() {
            let mut e = expr.clone();
            for (w, val) in &out {
                e = e.substitute(*w, val)?;
            }
            out.insert(*v, e);
        }
        Ok(out)
    }
}

struct Node {
    equations: Vec<Poly>,
    nonzero: BTreeSet<Var>,
    nonzero_exprs: Vec<Poly>,
    stack: Vec<(Var, Poly)>,
}

impl System {
    pub fn new() -> Self {
        System::default()
    }

    pub fn var(&mut self, name: impl Into<String>) -> Var {
        self.names.push(name.into());
        (self.names.len() - 1) as Var
    }

    pub fn nonzero_var(&mut self, name: impl Into<String>) -> Var {
        let v = self.var(name);
        self.nonzero.insert(v);
        v
    }

    pub fn mark_nonzero(&mut self, v: Var) {
        self.nonzero.insert(v);
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn equations(&self) -> &[Poly] {
        &self.equations
    }

    pub fn add_equation(&mut self, p: Poly) {
        if !p.is_zero() {
            self.equations.push(p);
        }
    }

    pub fn add_equations(&mut self, ps: impl IntoIterator<Item = Poly>) {
        for p in ps {
            self.add_equation(p);
        }
    }

    /// Adds a side condition that `p` must not vanish on any solution.
    pub fn require_nonzero(&mut self, p: Poly) {
        self.nonzero_exprs.push(p);
    }

    pub fn display(&self, p: &Poly) -> String {
        p.display_with(&self.names).to_string()
    }

    pub fn describe(&self, e: &Event) -> String {
        match e {
            Event::SplitZero { var } => format!("case {} = 0", self.name(*var)),
            Event::SplitNonzero { var } => format!("case {} ≠ 0", self.name(*var)),
            Event::Substitute { var, value } => format!("{} := {}", self.name(*var), self.display(value)),
            Event::Root { var, equation, value } => {
                format!("{} := {} (root of {} = 0)", self.name(*var), value, self.display(equation))
            }
            Event::BinomialRoot { var, equation, value } => {
                format!("{} := {} (from {} = 0)", self.name(*var), self.display(value), self.display(equation))
            }
            Event::NoFieldRoots { var, equation } => {
                format!("no root of {} = 0 for {} in the field", self.display(equation), self.name(*var))
            }
            Event::Contradiction { equation } => format!("contradiction: {} = 0", self.display(equation)),
            Event::NonzeroViolated { expr } => format!("contradiction: {} must be nonzero", self.display(expr)),
            Event::Solution { leaf } => format!("solution #{leaf}"),
            Event::Stuck { equations } => format!("stuck with {} equations", equations.len()),
        }
    }

    pub fn solve(&self, budget: usize) -> Result<Elimination, EliminationError> {
        let mut out = Elimination::default();
        let root = Node {
            equations: self.equations.clone(),
            nonzero: self.nonzero.clone(),
            nonzero_exprs: self.nonzero_exprs.clone(),
            stack: Vec::new(),
        };
        self.step(root, 0, budget, &mut out)?;
        Ok(out)
    }

    fn emit(out: &mut Elimination, depth: usize, event: Event) {
        out.trace.push(TraceEvent { depth, event });
    }

    fn step(&self, mut node: Node, depth: usize, budget: usize, out: &mut Elimination) -> Result<(), EliminationError> {
        out.nodes += 1;
        if out.nodes > budget {
            return Err(EliminationError::BudgetExceeded(budget));
        }

        // Side conditions: single terms turn into nonzero variables.
        let mut kept = Vec::new();
        for expr in std::mem::take(&mut node.nonzero_exprs) {
            let expr = normalize(&expr, &node.nonzero);
            if expr.is_zero() {
                Self::emit(out, depth, Event::NonzeroViolated { expr });
                return Ok(());
            }
            if let Some((m, _)) = expr.as_term() {
                node.nonzero.extend(m.factors().iter().map(|&(v, _)| v));
            } else if !kept.contains(&expr) {
                kept.push(expr);
            }
        }
        node.nonzero_exprs = kept;

        let mut seen = HashSet::new();
        let mut eqs = Vec::new();
        for e in &node.equations {
            for &(v, _) in e.terms().flat_map(|(m, _)| m.factors()) {
                if e.min_exponent(v) < 0 {
                    node.nonzero.insert(v);
                }
            }
        }
        for e in &node.equations {
            let n = normalize(e, &node.nonzero);
            if n.is_zero() {
                continue;
            }
            if n.is_constant() {
                Self::emit(out, depth, Event::Contradiction { equation: n });
                return Ok(());
            }
            if seen.insert(n.clone()) {
                eqs.push(n);
            }
        }
        node.equations = eqs;

        if node.equations.is_empty() {
            let assigned: BTreeSet<Var> = node.stack.iter().map(|(v, _)| *v).collect();
            let free = (0..self.names.len() as Var).filter(|v| !assigned.contains(v)).collect();
            out.leaves.push(Leaf { stack: node.stack, free, conditions: node.nonzero_exprs });
            Self::emit(out, depth, Event::Solution { leaf: out.leaves.len() - 1 });
            return Ok(());
        }

        // c·M + d with d ≠ 0 forces every variable of M to be nonzero.
        let before = node.nonzero.len();
        for e in &node.equations {
            if e.num_terms() == 2 && !e.constant_term().is_zero() {
                let (m, _) = e.terms().find(|(m, _)| !m.is_one()).expect("two terms, one constant");
                node.nonzero.extend(m.factors().iter().map(|&(v, _)| v));
            }
        }
        if node.nonzero.len() > before {
            return self.step(node, depth, budget, out);
        }

        // Split on a variable that divides an equation.
        for e in &node.equations {
            for v in e.vars() {
                if !node.nonzero.contains(&v) && e.min_exponent(v) > 0 {
                    Self::emit(out, depth, Event::SplitZero { var: v });
                    let zero = self.substituted(&node, v, &Poly::zero())?;
                    self.step(zero, depth + 1, budget, out)?;
                    Self::emit(out, depth, Event::SplitNonzero { var: v });
                    let mut nz = node;
                    nz.nonzero.insert(v);
                    return self.step(nz, depth + 1, budget, out);
                }
            }
        }

        // Linear substitution with an invertible monomial coefficient.
        let mut order: Vec<usize> = (0..node.equations.len()).collect();
        order.sort_by_key(|&i| {
            let e = &node.equations[i];
            (e.vars().len(), e.num_terms(), e.total_degree())
        });
        for &i in &order {
            let e = &node.equations[i];
            for v in e.vars() {
                if e.max_exponent(v) != 1 || e.min_exponent(v) != 0 {
                    continue;
                }
                let coeff = e.coefficient(v, 1);
                let Some((m, c)) = coeff.as_term() else { continue };
                if !m.factors().iter().all(|(w, _)| node.nonzero.contains(w)) {
                    continue;
                }
                let inv = Poly::term(c.inv()?, m.inverse());
                let value = e.coefficient(v, 0).mul(&inv).neg();
                Self::emit(out, depth, Event::Substitute { var: v, value: value.clone() });
                let mut next = self.substituted(&node, v, &value)?;
                if node.nonzero.contains(&v) {
                    next.nonzero_exprs.push(value.clone());
                }
                return self.step(next, depth + 1, budget, out);
            }
        }

        // Univariate equation: branch over its roots in the field.
        for &i in &order {
            let e = &node.equations[i];
            let vars = e.vars();
            if vars.len() != 1 {
                continue;
            }
            let v = *vars.iter().next().unwrap();
            let coeffs = e.univariate_coeffs(v).expect("normalized univariate equation");
            let rts = roots::roots_in_field(&coeffs)?;
            let equation = e.clone();
            let usable: Vec<Cyclotomic> =
                rts.into_iter().filter(|r| !(r.is_zero() && node.nonzero.contains(&v))).collect();
            if usable.is_empty() {
                Self::emit(out, depth, Event::NoFieldRoots { var: v, equation });
                return Ok(());
            }
            for r in usable {
                Self::emit(out, depth, Event::Root { var: v, equation: equation.clone(), value: Box::new(r.clone()) });
                let next = self.substituted(&node, v, &Poly::constant(r))?;
                self.step(next, depth + 1, budget, out)?;
            }
            return Ok(());
        }

        // Binomial u^k·M₁ + c·M₂ with M₁, M₂ in nonzero variables and M₂/M₁ a k-th power.
        for &i in &order {
            let e = &node.equations[i];
            let Some((var, ratio, coeff, k)) = binomial(e, &node.nonzero) else { continue };
            let rts = roots::nth_roots(&coeff, k as usize)?;
            let equation = e.clone();
            if rts.is_empty() {
                Self::emit(out, depth, Event::NoFieldRoots { var, equation });
                return Ok(());
            }
            for r in rts {
                let value = Poly::term(r, ratio.clone());
                Self::emit(out, depth, Event::BinomialRoot { var, equation: equation.clone(), value: value.clone() });
                let next = self.substituted(&node, var, &value)?;
                self.step(next, depth + 1, budget, out)?;
            }
            return Ok(());
        }

        out.stuck.push(node.equations.clone());
        Self::emit(out, depth, Event::Stuck { equations: node.equations });
        Ok(())
    }

    fn substituted(&self, node: &Node, v: Var, value: &Poly) -> Result<Node, EliminationError> {
        let sub = |p: &Poly| p.substitute(v, value);
        let mut stack = node.stack.clone();
        stack.push((v, value.clone()));
        Ok(Node {
            equations: node.equations.iter().map(sub).collect::<Result<_, _>>()?,
            nonzero: node.nonzero.iter().copied().filter(|&w| w != v).collect(),
            nonzero_exprs: node.nonzero_exprs.iter().map(sub).collect::<Result<_, _>>()?,
            stack,
        })
    }
}

/// For c₁·u^k·M₁ + c₂·M₂ = 0, returns (u, (M₂/M₁)^{1/k}, −c₂/c₁, k).
fn binomial(e: &Poly, nonzero: &BTreeSet<Var>) -> Option<(Var, Monomial, Cyclotomic, i32)> {
    if e.num_terms() != 2 {
        return None;
    }
    let terms: Vec<(&Monomial, &Cyclotomic)> = e.terms().collect();
    for (a, b) in [(0, 1), (1, 0)] {
        let (m1, c1) = terms[a];
        let (m2, c2) = terms[b];
        for &(u, k) in m1.factors() {
            if k < 2 || m2.exponent(u) != 0 {
                continue;
            }
            let rest = m1.mul(&Monomial::var(u, -k));
            let ratio = m2.mul(&rest.inverse());
            let others_nonzero = rest.factors().iter().chain(m2.factors()).all(|(w, _)| nonzero.contains(w));
            if !others_nonzero || ratio.factors().iter().any(|&(_, x)| x % k != 0) {
                continue;
            }
            let root = ratio.factors().iter().fold(Monomial::one(), |acc, &(w, x)| acc.mul(&Monomial::var(w, x / k)));
            let coeff = -&(c2 * &c1.inv().ok()?);
            return Some((u, root, coeff, k));
        }
    }
    None
}

/// Removes monomial content in known-nonzero variables and makes the polynomial monic.
pub fn normalize(p: &Poly, nonzero: &BTreeSet<Var>) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let mut shift = Monomial::one();
    for v in p.vars() {
        if nonzero.contains(&v) {
            let lo = p.min_exponent(v);
            if lo != 0 {
                shift = shift.mul(&Monomial::var(v, -lo));
            }
        }
    }
    p.mul_monomial(&shift).monic()
}

impl fmt::Display for Elimination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} leaves, {} stuck, {} nodes", self.leaves.len(), self.stuck.len(), self.nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Cyclotomic {
        Cyclotomic::from_integer(n)
    }

    #[test]
    fn circle_meets_line() {
        // x² + y² = 1, x = y·√3  → points (±√3/2, ±1/2)
        let mut s = System::new();
        let x = s.var("x");
        let y = s.var("y");
        let px = Poly::var(x);
        let py = Poly::var(y);
        s.add_equation(px.mul(&px).add(&py.mul(&py)).sub(&Poly::one()));
        s.add_equation(px.sub(&py.scale(&Cyclotomic::sqrt3())));
        let res = s.solve(100).unwrap();
        assert_eq!(res.leaves.len(), 2);
        for leaf in &res.leaves {
            let v = leaf.evaluate(&BTreeMap::new()).unwrap();
            assert_eq!(&v[&y] * &v[&y], Cyclotomic::ratio(1, 4));
        }
    }

    #[test]
    fn nonzero_variable_rules_out_branch() {
        // t·(t − 2) = 0 with t ≠ 0
        let mut s = System::new();
        let t = s.nonzero_var("t");
        let pt = Poly::var(t);
        s.add_equation(pt.mul(&pt.sub(&Poly::constant(c(2)))));
        let res = s.solve(10).unwrap();
        assert_eq!(res.leaves.len(), 1);
        assert_eq!(res.leaves[0].evaluate(&BTreeMap::new()).unwrap()[&t], c(2));
    }

    #[test]
    fn inconsistent_system_closes() {
        // u·v = 1, u = 0
        let mut s = System::new();
        let u = s.var("u");
        let v = s.var("v");
        s.add_equation(Poly::var(u).mul(&Poly::var(v)).sub(&Poly::one()));
        s.add_equation(Poly::var(u));
        let res = s.solve(10).unwrap();
        assert!(res.is_inconsistent());
        assert_eq!(res.contradictions().count(), 1);
    }

    #[test]
    fn parametric_family_is_a_leaf() {
        // x·y = 1 with both nonzero: one free parameter remains.
        let mut s = System::new();
        let x = s.nonzero_var("x");
        let y = s.nonzero_var("y");
        s.add_equation(Poly::var(x).mul(&Poly::var(y)).sub(&Poly::one()));
        let res = s.solve(10).unwrap();
        assert_eq!(res.leaves.len(), 1);
        assert_eq!(res.leaves[0].free.len(), 1);
    }

    #[test]
    fn nonzero_condition_checked_after_substitution() {
        // a = b, require a − b ≠ 0
        let mut s = System::new();
        let a = s.var("a");
        let b = s.var("b");
        s.add_equation(Poly::var(a).sub(&Poly::var(b)));
        s.require_nonzero(Poly::var(a).sub(&Poly::var(b)));
        let res = s.solve(10).unwrap();
        assert!(res.is_inconsistent());
    }

    #[test]
    fn binomial_in_two_unknowns() {
        // b² + f² = 0 with f ≠ 0 → b = ±i·f
        let mut s = System::new();
        let b = s.var("b");
        let f = s.nonzero_var("f");
        s.add_equation(Poly::var(b).pow(2).add(&Poly::var(f).pow(2)));
        let res = s.solve(10).unwrap();
        assert_eq!(res.leaves.len(), 2);
        for leaf in &res.leaves {
            assert_eq!(leaf.free, vec![f]);
            let mut p = BTreeMap::new();
            p.insert(f, c(3));
            let v = leaf.evaluate(&p).unwrap();
            assert_eq!(&v[&b] * &v[&b], c(-9));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mut s = System::new();
        let x = s.var("x");
        s.add_equation(Poly::var(x).pow(3).sub(&Poly::var(x)));
        assert_eq!(s.solve(2).unwrap_err(), EliminationError::BudgetExceeded(2));
    }
}
