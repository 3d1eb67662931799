//! Quantifier-free linear arithmetic over the naturals.
//!
//! Formulas are boolean combinations of linear (in)equalities. [`solve`] is
//! a complete procedure: CDCL over the atoms, an exact simplex for each
//! partial assignment and branch-and-bound inside a finite box whose size
//! comes from a small-solution bound.

mod lattice;
mod simplex;
mod solver;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use solver::{small_solution_bound, solve, LiaResult, SolveOptions};

/// Presburger constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PresVar {
    /// Indicator `a_i`.
    Indicator(usize),
    /// Balance constant `b_{i,j}`: slot `i`, function `j`.
    Balance(usize, usize),
    /// Nat constant `c_k`.
    Nat(usize),
    Named(String),
}

impl fmt::Display for PresVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresVar::Indicator(i) => write!(f, "a{i}"),
            PresVar::Balance(i, j) => write!(f, "b{i}_{j}"),
            PresVar::Nat(k) => write!(f, "c{k}"),
            PresVar::Named(s) => f.write_str(s),
        }
    }
}

/// `sum(coeff * var) + constant`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<PresVar, i64>,
    pub constant: i64,
}

impl LinExpr {
    pub fn var(v: PresVar) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, 1);
        LinExpr { coeffs, constant: 0 }
    }

    pub fn constant(c: i64) -> Self {
        LinExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn sum(parts: impl IntoIterator<Item = LinExpr>) -> Self {
        parts.into_iter().fold(LinExpr::default(), |acc, e| acc.plus(&e))
    }

    pub fn plus(mut self, other: &LinExpr) -> Self {
        for (v, c) in &other.coeffs {
            let e = self.coeffs.entry(v.clone()).or_insert(0);
            *e += c;
            if *e == 0 {
                self.coeffs.remove(v);
            }
        }
        self.constant += other.constant;
        self
    }

    pub fn plus_const(mut self, c: i64) -> Self {
        self.constant += c;
        self
    }

    pub fn vars(&self) -> impl Iterator<Item = &PresVar> {
        self.coeffs.keys()
    }

    fn eval(&self, m: &LiaModel) -> Result<i128, LiaError> {
        let mut acc = self.constant as i128;
        for (v, c) in &self.coeffs {
            let x = m.get(v).ok_or_else(|| LiaError::MissingVar(v.to_string()))?;
            acc += *c as i128 * *x as i128;
        }
        Ok(acc)
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag != 1 {
                write!(f, "{mag}*")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, " + {}", self.constant)
        } else if self.constant < 0 {
            write!(f, " - {}", -self.constant)
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PresFormula {
    True,
    False,
    Eq(LinExpr, LinExpr),
    Le(LinExpr, LinExpr),
    Not(Box<PresFormula>),
    And(Vec<PresFormula>),
    Or(Vec<PresFormula>),
    Implies(Box<PresFormula>, Box<PresFormula>),
}

impl PresFormula {
    pub fn eq(a: LinExpr, b: LinExpr) -> Self {
        PresFormula::Eq(a, b)
    }

    pub fn le(a: LinExpr, b: LinExpr) -> Self {
        PresFormula::Le(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: PresFormula) -> Self {
        PresFormula::Not(Box::new(f))
    }

    pub fn implies(a: PresFormula, b: PresFormula) -> Self {
        PresFormula::Implies(Box::new(a), Box::new(b))
    }

    /// `v = 0`.
    pub fn is_zero(v: PresVar) -> Self {
        PresFormula::Eq(LinExpr::var(v), LinExpr::constant(0))
    }

    pub fn vars(&self) -> BTreeSet<PresVar> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<PresVar>) {
        match self {
            PresFormula::True | PresFormula::False => {}
            PresFormula::Eq(a, b) | PresFormula::Le(a, b) => {
                out.extend(a.vars().cloned());
                out.extend(b.vars().cloned());
            }
            PresFormula::Not(g) => g.collect_vars(out),
            PresFormula::And(fs) | PresFormula::Or(fs) => fs.iter().for_each(|g| g.collect_vars(out)),
            PresFormula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Number of nodes, atoms counting one.
    pub fn size(&self) -> usize {
        match self {
            PresFormula::True | PresFormula::False | PresFormula::Eq(..) | PresFormula::Le(..) => 1,
            PresFormula::Not(g) => 1 + g.size(),
            PresFormula::And(fs) | PresFormula::Or(fs) => 1 + fs.iter().map(|g| g.size()).sum::<usize>(),
            PresFormula::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Renames constants.
    pub fn rename(&self, f: &dyn Fn(&PresVar) -> PresVar) -> PresFormula {
        let expr = |e: &LinExpr| {
            let mut out = LinExpr::constant(e.constant);
            for (v, c) in &e.coeffs {
                let mut t = LinExpr::var(f(v));
                t.coeffs.values_mut().for_each(|x| *x = *c);
                out = out.plus(&t);
            }
            out
        };
        match self {
            PresFormula::True => PresFormula::True,
            PresFormula::False => PresFormula::False,
            PresFormula::Eq(a, b) => PresFormula::Eq(expr(a), expr(b)),
            PresFormula::Le(a, b) => PresFormula::Le(expr(a), expr(b)),
            PresFormula::Not(g) => PresFormula::not(g.rename(f)),
            PresFormula::And(fs) => PresFormula::And(fs.iter().map(|g| g.rename(f)).collect()),
            PresFormula::Or(fs) => PresFormula::Or(fs.iter().map(|g| g.rename(f)).collect()),
            PresFormula::Implies(a, b) => PresFormula::implies(a.rename(f), b.rename(f)),
        }
    }
}

fn pres_prec(f: &PresFormula) -> u8 {
    match f {
        PresFormula::Implies(..) => 1,
        PresFormula::Or(v) if v.len() > 1 => 2,
        PresFormula::And(v) if v.len() > 1 => 3,
        PresFormula::Or(v) | PresFormula::And(v) => v.first().map(pres_prec).unwrap_or(5),
        PresFormula::Not(_) => 4,
        _ => 5,
    }
}

fn pres_emit(f: &PresFormula, ctx: u8, out: &mut String) {
    if let PresFormula::And(fs) | PresFormula::Or(fs) = f {
        if fs.len() == 1 {
            return pres_emit(&fs[0], ctx, out);
        }
    }
    if pres_prec(f) < ctx {
        out.push('(');
        pres_emit(f, 0, out);
        out.push(')');
        return;
    }
    match f {
        PresFormula::True => out.push_str("true"),
        PresFormula::False => out.push_str("false"),
        PresFormula::Eq(a, b) => out.push_str(&format!("{a} = {b}")),
        PresFormula::Le(a, b) => out.push_str(&format!("{a} <= {b}")),
        PresFormula::Not(g) => {
            out.push('!');
            if pres_prec(g) == 5 && !matches!(**g, PresFormula::True | PresFormula::False) {
                out.push('(');
                pres_emit(g, 0, out);
                out.push(')');
            } else {
                pres_emit(g, 4, out);
            }
        }
        PresFormula::And(fs) | PresFormula::Or(fs) if fs.is_empty() => {
            out.push_str(if matches!(f, PresFormula::And(_)) { "true" } else { "false" })
        }
        PresFormula::And(fs) | PresFormula::Or(fs) => {
            let (sep, p) = if matches!(f, PresFormula::And(_)) { (" & ", 3) } else { (" | ", 2) };
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                pres_emit(g, p, out);
            }
        }
        PresFormula::Implies(a, b) => {
            pres_emit(a, 2, out);
            out.push_str(" -> ");
            pres_emit(b, 1, out);
        }
    }
}

impl fmt::Display for PresFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        pres_emit(self, 0, &mut s);
        f.write_str(&s)
    }
}

/// Natural-number assignment to Presburger constants.
pub type LiaModel = BTreeMap<PresVar, u64>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LiaError {
    #[error("model has no value for `{0}`")]
    MissingVar(String),
    #[error("coefficient or constant out of range")]
    Overflow,
    #[error("solution value does not fit in 64 bits")]
    ValueTooLarge,
}

/// Evaluates `f` under `m`.
pub fn check_model(f: &PresFormula, m: &LiaModel) -> Result<bool, LiaError> {
    Ok(match f {
        PresFormula::True => true,
        PresFormula::False => false,
        PresFormula::Eq(a, b) => a.eval(m)? == b.eval(m)?,
        PresFormula::Le(a, b) => a.eval(m)? <= b.eval(m)?,
        PresFormula::Not(g) => !check_model(g, m)?,
        PresFormula::And(fs) => {
            for g in fs {
                if !check_model(g, m)? {
                    return Ok(false);
                }
            }
            true
        }
        PresFormula::Or(fs) => {
            for g in fs {
                if check_model(g, m)? {
                    return Ok(true);
                }
            }
            false
        }
        PresFormula::Implies(a, b) => !check_model(a, m)? || check_model(b, m)?,
    })
}

fn smt_expr(e: &LinExpr) -> String {
    let mut parts: Vec<String> = e
        .coeffs
        .iter()
        .map(|(v, c)| {
            let name = smt_name(v);
            match *c {
                1 => name,
                c if c < 0 => format!("(* (- {}) {name})", -c),
                c => format!("(* {c} {name})"),
            }
        })
        .collect();
    if e.constant != 0 || parts.is_empty() {
        parts.push(if e.constant < 0 { format!("(- {})", -e.constant) } else { e.constant.to_string() });
    }
    if parts.len() == 1 {
        parts.pop().unwrap_or_default()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

fn smt_name(v: &PresVar) -> String {
    match v {
        PresVar::Named(s) => format!("|{s}|"),
        other => other.to_string(),
    }
}

fn smt_formula(f: &PresFormula) -> String {
    match f {
        PresFormula::True => "true".into(),
        PresFormula::False => "false".into(),
        PresFormula::Eq(a, b) => format!("(= {} {})", smt_expr(a), smt_expr(b)),
        PresFormula::Le(a, b) => format!("(<= {} {})", smt_expr(a), smt_expr(b)),
        PresFormula::Not(g) => format!("(not {})", smt_formula(g)),
        PresFormula::And(fs) if fs.is_empty() => "true".into(),
        PresFormula::Or(fs) if fs.is_empty() => "false".into(),
        PresFormula::And(fs) => format!("(and {})", fs.iter().map(smt_formula).collect::<Vec<_>>().join(" ")),
        PresFormula::Or(fs) => format!("(or {})", fs.iter().map(smt_formula).collect::<Vec<_>>().join(" ")),
        PresFormula::Implies(a, b) => format!("(=> {} {})", smt_formula(a), smt_formula(b)),
    }
}

/// QF_LIA script with every constant declared non-negative.
pub fn to_smtlib(f: &PresFormula) -> String {
    let mut out = String::from("(set-logic QF_LIA)\n");
    for v in f.vars() {
        let n = smt_name(&v);
        out.push_str(&format!("(declare-fun {n} () Int)\n(assert (<= 0 {n}))\n"));
    }
    out.push_str(&format!("(assert {})\n(check-sat)\n", smt_formula(f)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> LinExpr {
        LinExpr::var(PresVar::Named(s.into()))
    }

    #[test]
    fn printing() {
        let f = PresFormula::And(vec![
            PresFormula::implies(
                PresFormula::is_zero(PresVar::Indicator(1)),
                PresFormula::And(vec![PresFormula::is_zero(PresVar::Balance(1, 1))]),
            ),
            PresFormula::not(PresFormula::is_zero(PresVar::Indicator(1))),
        ]);
        assert_eq!(f.to_string(), "(a1 = 0 -> b1_1 = 0) & !(a1 = 0)");
        let e = v("x").plus(&v("y")).plus_const(-2);
        assert_eq!(e.to_string(), "x + y - 2");
    }

    #[test]
    fn model_check() {
        let f = PresFormula::Or(vec![PresFormula::le(v("x"), LinExpr::constant(1)), PresFormula::eq(v("x"), v("y"))]);
        let mut m = LiaModel::new();
        m.insert(PresVar::Named("x".into()), 3);
        assert!(check_model(&f, &m).is_err());
        m.insert(PresVar::Named("y".into()), 3);
        assert!(check_model(&f, &m).unwrap());
    }
}
