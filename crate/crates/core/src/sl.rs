//! Sum logic: vocabularies, terms, formulas, structures and evaluation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Address element identifier inside an [`SlStructure`].
pub type AddressId = u32;

/// Vocabulary with `l` address constants, `m` balance/sum pairs and `d` nat constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    pub l: usize,
    pub m: usize,
    pub d: usize,
    pub plus: bool,
    pub leq: bool,
}

impl Vocabulary {
    pub fn new(l: usize, m: usize, d: usize) -> Self {
        Vocabulary { l, m, d, plus: false, leq: false }
    }

    pub fn with_plus(mut self) -> Self {
        self.plus = true;
        self
    }

    pub fn with_leq(mut self) -> Self {
        self.leq = true;
        self
    }

    /// One balance function, no `+`, no `<=`.
    pub fn is_fragment(&self) -> bool {
        self.m == 1 && !self.plus && !self.leq
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Address,
    Nat,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// `a_i`, 1-based.
    AddressConst(usize),
    AddressVar(String),
    Numeral(u64),
    /// `c_k`, 1-based.
    NatConst(usize),
    /// `s_j`, 1-based.
    SumConst(usize),
    /// `b_j(t)`, 1-based.
    Balance(usize, Box<Term>),
    Plus(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::AddressVar(name.to_string())
    }

    pub fn bal(j: usize, t: Term) -> Term {
        Term::Balance(j, Box::new(t))
    }

    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Box::new(a), Box::new(b))
    }

    /// Syntactic sort of the head symbol.
    pub fn sort(&self) -> Sort {
        match self {
            Term::AddressConst(_) | Term::AddressVar(_) => Sort::Address,
            _ => Sort::Nat,
        }
    }

    fn length(&self) -> u64 {
        match self {
            Term::Numeral(n) => n.saturating_add(1),
            Term::AddressConst(_) | Term::AddressVar(_) | Term::NatConst(_) | Term::SumConst(_) => 1,
            Term::Balance(_, t) => 1 + t.length(),
            Term::Plus(a, b) => 1 + a.length() + b.length(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    Leq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ForallAddress(String, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn leq(a: Term, b: Term) -> Formula {
        Formula::Leq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::ForallAddress(x.to_string(), Box::new(body))
    }

    /// Nested universal quantification, outermost first.
    pub fn forall_many(vars: &[&str], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, x| Formula::forall(x, acc))
    }

    /// Left-nested conjunction. Panics on an empty list.
    pub fn and_all(parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter();
        let first = it.next().expect("and_all needs at least one conjunct");
        it.fold(first, Formula::and)
    }

    /// Left-nested disjunction. Panics on an empty list.
    pub fn or_all(parts: Vec<Formula>) -> Formula {
        let mut it = parts.into_iter();
        let first = it.next().expect("or_all needs at least one disjunct");
        it.fold(first, Formula::or)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Largest numeral occurring in the formula, 0 if none.
    pub fn max_numeral(&self) -> u64 {
        let mut best = 0;
        self.visit_terms(&mut |t| {
            if let Term::Numeral(n) = t {
                best = best.max(*n);
            }
        });
        best
    }

    /// Calls `f` on every term node, including subterms.
    pub fn visit_terms(&self, f: &mut dyn FnMut(&Term)) {
        fn term(t: &Term, f: &mut dyn FnMut(&Term)) {
            f(t);
            match t {
                Term::Balance(_, a) => term(a, f),
                Term::Plus(a, b) => {
                    term(a, f);
                    term(b, f);
                }
                _ => {}
            }
        }
        match self {
            Formula::Eq(a, b) | Formula::Leq(a, b) => {
                term(a, f);
                term(b, f);
            }
            Formula::Not(g) | Formula::ForallAddress(_, g) => g.visit_terms(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    /// Rewrites every term bottom-up.
    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Formula {
        fn term(t: &Term, f: &dyn Fn(&Term) -> Term) -> Term {
            let inner = match t {
                Term::Balance(j, a) => Term::Balance(*j, Box::new(term(a, f))),
                Term::Plus(a, b) => Term::plus(term(a, f), term(b, f)),
                other => other.clone(),
            };
            f(&inner)
        }
        match self {
            Formula::Eq(a, b) => Formula::Eq(term(a, f), term(b, f)),
            Formula::Leq(a, b) => Formula::Leq(term(a, f), term(b, f)),
            Formula::Not(g) => Formula::not(g.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
            Formula::ForallAddress(x, g) => Formula::forall(x, g.map_terms(f)),
        }
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    fn term(t: &Term, bound: &[String], out: &mut BTreeSet<String>) {
        match t {
            Term::AddressVar(x) if !bound.contains(x) => {
                out.insert(x.clone());
            }
            Term::Balance(_, a) => term(a, bound, out),
            Term::Plus(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            _ => {}
        }
    }
    match f {
        Formula::Eq(a, b) | Formula::Leq(a, b) => {
            term(a, bound, out);
            term(b, bound, out);
        }
        Formula::Not(g) => collect_free(g, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::ForallAddress(x, g) => {
            bound.push(x.clone());
            collect_free(g, bound, out);
            bound.pop();
        }
    }
}

/// Node count of the syntax tree; a numeral `n` counts `n + 1`.
pub fn formula_length(f: &Formula) -> u64 {
    match f {
        Formula::Eq(a, b) | Formula::Leq(a, b) => 1 + a.length() + b.length(),
        Formula::Not(g) | Formula::ForallAddress(_, g) => 1 + formula_length(g),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + formula_length(a) + formula_length(b),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("address constant a{0} out of range")]
    AddressConstOutOfRange(usize),
    #[error("balance function b{0} out of range")]
    BalanceOutOfRange(usize),
    #[error("sum constant s{0} out of range")]
    SumOutOfRange(usize),
    #[error("nat constant c{0} out of range")]
    NatConstOutOfRange(usize),
    #[error("`+` is not in the vocabulary")]
    PlusUnavailable,
    #[error("`<=` is not in the vocabulary")]
    LeqUnavailable,
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("quantifier over `{0}` occurs under negation")]
    NonUniversal(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

/// Checks sorting, index ranges, operator availability, closedness and that
/// every quantifier has positive polarity.
pub fn well_formed(v: &Vocabulary, f: &Formula) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    check_formula(v, f, true, &mut Vec::new(), &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

fn check_formula(v: &Vocabulary, f: &Formula, positive: bool, bound: &mut Vec<String>, out: &mut Vec<Violation>) {
    match f {
        Formula::Eq(a, b) => {
            let sa = check_term(v, a, bound, out);
            let sb = check_term(v, b, bound, out);
            if sa != sb {
                out.push(Violation::SortMismatch("equality between an address and a nat".into()));
            }
        }
        Formula::Leq(a, b) => {
            if !v.leq {
                out.push(Violation::LeqUnavailable);
            }
            for t in [a, b] {
                if check_term(v, t, bound, out) != Sort::Nat {
                    out.push(Violation::SortMismatch("`<=` on an address term".into()));
                }
            }
        }
        Formula::Not(g) => check_formula(v, g, !positive, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            check_formula(v, a, positive, bound, out);
            check_formula(v, b, positive, bound, out);
        }
        Formula::Implies(a, b) => {
            check_formula(v, a, !positive, bound, out);
            check_formula(v, b, positive, bound, out);
        }
        Formula::ForallAddress(x, g) => {
            if !positive {
                out.push(Violation::NonUniversal(x.clone()));
            }
            bound.push(x.clone());
            check_formula(v, g, positive, bound, out);
            bound.pop();
        }
    }
}

fn check_term(v: &Vocabulary, t: &Term, bound: &[String], out: &mut Vec<Violation>) -> Sort {
    match t {
        Term::AddressConst(i) => {
            if *i == 0 || *i > v.l {
                out.push(Violation::AddressConstOutOfRange(*i));
            }
            Sort::Address
        }
        Term::AddressVar(x) => {
            if !bound.contains(x) {
                out.push(Violation::UnboundVariable(x.clone()));
            }
            Sort::Address
        }
        Term::Numeral(_) => Sort::Nat,
        Term::NatConst(k) => {
            if *k == 0 || *k > v.d {
                out.push(Violation::NatConstOutOfRange(*k));
            }
            Sort::Nat
        }
        Term::SumConst(j) => {
            if *j == 0 || *j > v.m {
                out.push(Violation::SumOutOfRange(*j));
            }
            Sort::Nat
        }
        Term::Balance(j, a) => {
            if *j == 0 || *j > v.m {
                out.push(Violation::BalanceOutOfRange(*j));
            }
            if check_term(v, a, bound, out) != Sort::Address {
                out.push(Violation::SortMismatch(format!("argument of b{j} is not an address")));
            }
            Sort::Nat
        }
        Term::Plus(a, b) => {
            if !v.plus {
                out.push(Violation::PlusUnavailable);
            }
            for s in [a, b] {
                if check_term(v, s, bound, out) != Sort::Nat {
                    out.push(Violation::SortMismatch("`+` on an address term".into()));
                }
            }
            Sort::Nat
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("duplicate address {0} in domain")]
    DuplicateAddress(AddressId),
    #[error("address constant a{index} denotes {id}, which is not in the domain")]
    ConstantOutsideDomain { index: usize, id: AddressId },
    #[error("balance table b{0} has the wrong length")]
    BalanceLength(usize),
    #[error("sum s{j} is {given} but the balances add up to {derived}")]
    SumProperty { j: usize, given: u64, derived: u64 },
    #[error("sum s{0} overflows")]
    Overflow(usize),
}

/// A finite structure satisfying the sum property.
///
/// `balances[j][p]` is the value of `b_{j+1}` at the `p`-th element of the
/// sorted domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlStructure {
    domain: Vec<AddressId>,
    addr_consts: Vec<AddressId>,
    balances: Vec<Vec<u64>>,
    nat_consts: Vec<u64>,
    sums: Vec<u64>,
}

impl SlStructure {
    /// Builds a structure, deriving every sum from its balance table.
    /// `balances[j]` is aligned with `domain` as given (not necessarily sorted).
    pub fn new(
        domain: Vec<AddressId>,
        addr_consts: Vec<AddressId>,
        balances: Vec<Vec<u64>>,
        nat_consts: Vec<u64>,
    ) -> Result<Self, StructureError> {
        let mut order: Vec<usize> = (0..domain.len()).collect();
        order.sort_by_key(|&p| domain[p]);
        let sorted: Vec<AddressId> = order.iter().map(|&p| domain[p]).collect();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(StructureError::DuplicateAddress(w[0]));
        }
        for (i, id) in addr_consts.iter().enumerate() {
            if sorted.binary_search(id).is_err() {
                return Err(StructureError::ConstantOutsideDomain { index: i + 1, id: *id });
            }
        }
        let mut table = Vec::with_capacity(balances.len());
        let mut sums = Vec::with_capacity(balances.len());
        for (j, row) in balances.iter().enumerate() {
            if row.len() != domain.len() {
                return Err(StructureError::BalanceLength(j + 1));
            }
            let sorted_row: Vec<u64> = order.iter().map(|&p| row[p]).collect();
            let total = sorted_row
                .iter()
                .try_fold(0u64, |acc, v| acc.checked_add(*v))
                .ok_or(StructureError::Overflow(j + 1))?;
            sums.push(total);
            table.push(sorted_row);
        }
        Ok(SlStructure { domain: sorted, addr_consts, balances: table, nat_consts, sums })
    }

    /// Like [`SlStructure::new`] but with explicitly given sums, which must
    /// agree with the balances.
    pub fn with_sums(
        domain: Vec<AddressId>,
        addr_consts: Vec<AddressId>,
        balances: Vec<Vec<u64>>,
        nat_consts: Vec<u64>,
        sums: Vec<u64>,
    ) -> Result<Self, StructureError> {
        let s = SlStructure::new(domain, addr_consts, balances, nat_consts)?;
        for (j, (given, derived)) in sums.iter().zip(&s.sums).enumerate() {
            if given != derived {
                return Err(StructureError::SumProperty { j: j + 1, given: *given, derived: *derived });
            }
        }
        if sums.len() != s.sums.len() {
            return Err(StructureError::BalanceLength(sums.len().min(s.sums.len()) + 1));
        }
        Ok(s)
    }

    /// Sorted domain.
    pub fn domain(&self) -> &[AddressId] {
        &self.domain
    }

    pub fn addr_consts(&self) -> &[AddressId] {
        &self.addr_consts
    }

    pub fn nat_consts(&self) -> &[u64] {
        &self.nat_consts
    }

    pub fn sums(&self) -> &[u64] {
        &self.sums
    }

    /// Balance table of `b_j` (1-based) aligned with [`SlStructure::domain`].
    pub fn balance_table(&self, j: usize) -> Option<&[u64]> {
        j.checked_sub(1).and_then(|i| self.balances.get(i)).map(|v| v.as_slice())
    }

    pub fn balance(&self, j: usize, id: AddressId) -> Option<u64> {
        let p = self.position(id)?;
        self.balance_table(j).map(|row| row[p])
    }

    pub fn num_balances(&self) -> usize {
        self.balances.len()
    }

    pub fn position(&self, id: AddressId) -> Option<usize> {
        self.domain.binary_search(&id).ok()
    }

    /// Constants denote pairwise different elements.
    pub fn is_distinct(&self) -> bool {
        let set: BTreeSet<_> = self.addr_consts.iter().collect();
        set.len() == self.addr_consts.len()
    }

    /// Largest value among balances, sums and nat constants.
    pub fn max_value(&self) -> u64 {
        self.balances.iter().flatten().chain(&self.sums).chain(&self.nat_consts).copied().max().unwrap_or(0)
    }
}

/// Variable assignment for open formulas.
pub type Assignment = BTreeMap<String, AddressId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Value {
    Nat(u64),
    Address(AddressId),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("variable `{0}` is assigned an element outside the domain")]
    OutsideDomain(String),
    #[error("structure has no interpretation for {0}")]
    MissingSymbol(String),
    #[error("sort error: {0}")]
    Sort(String),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("formula is not a sentence; free variables: {0:?}")]
    NotClosed(Vec<String>),
}

/// Evaluation environment: variables are bound to domain positions.
struct Env<'a> {
    s: &'a SlStructure,
    vars: Vec<(&'a str, usize)>,
}

impl<'a> Env<'a> {
    fn lookup(&self, x: &str) -> Result<usize, EvalError> {
        self.vars
            .iter()
            .rev()
            .find(|(n, _)| *n == x)
            .map(|(_, p)| *p)
            .ok_or_else(|| EvalError::UnboundVariable(x.to_string()))
    }

    fn addr(&self, t: &'a Term) -> Result<usize, EvalError> {
        match t {
            Term::AddressConst(i) => {
                let id = i
                    .checked_sub(1)
                    .and_then(|k| self.s.addr_consts.get(k))
                    .ok_or_else(|| EvalError::MissingSymbol(format!("a{i}")))?;
                self.s.position(*id).ok_or_else(|| EvalError::MissingSymbol(format!("a{i}")))
            }
            Term::AddressVar(x) => self.lookup(x),
            _ => Err(EvalError::Sort("expected an address term".into())),
        }
    }

    fn nat(&self, t: &'a Term) -> Result<u64, EvalError> {
        match t {
            Term::Numeral(n) => Ok(*n),
            Term::NatConst(k) => k
                .checked_sub(1)
                .and_then(|i| self.s.nat_consts.get(i))
                .copied()
                .ok_or_else(|| EvalError::MissingSymbol(format!("c{k}"))),
            Term::SumConst(j) => j
                .checked_sub(1)
                .and_then(|i| self.s.sums.get(i))
                .copied()
                .ok_or_else(|| EvalError::MissingSymbol(format!("s{j}"))),
            Term::Balance(j, a) => {
                let p = self.addr(a)?;
                self.s.balance_table(*j).map(|row| row[p]).ok_or_else(|| EvalError::MissingSymbol(format!("b{j}")))
            }
            Term::Plus(a, b) => self.nat(a)?.checked_add(self.nat(b)?).ok_or(EvalError::Overflow),
            _ => Err(EvalError::Sort("expected a nat term".into())),
        }
    }

    fn formula(&mut self, f: &'a Formula) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::Eq(a, b) => match (a.sort(), b.sort()) {
                (Sort::Address, Sort::Address) => self.addr(a)? == self.addr(b)?,
                (Sort::Nat, Sort::Nat) => self.nat(a)? == self.nat(b)?,
                _ => return Err(EvalError::Sort("equality between an address and a nat".into())),
            },
            Formula::Leq(a, b) => self.nat(a)? <= self.nat(b)?,
            Formula::Not(g) => !self.formula(g)?,
            Formula::And(a, b) => self.formula(a)? && self.formula(b)?,
            Formula::Or(a, b) => self.formula(a)? || self.formula(b)?,
            Formula::Implies(a, b) => !self.formula(a)? || self.formula(b)?,
            Formula::ForallAddress(x, g) => {
                let mut vars = vec![x.as_str()];
                let mut body: &'a Formula = g;
                while let Formula::ForallAddress(y, h) = body {
                    vars.push(y.as_str());
                    body = h;
                }
                match body {
                    Formula::Implies(prem, concl) => {
                        let mut conj = Vec::new();
                        conjuncts(prem, &mut conj);
                        // conjuncts are tested as soon as their variables are bound
                        let levels: Vec<usize> = conj
                            .iter()
                            .map(|c| {
                                c.free_vars()
                                    .iter()
                                    .filter_map(|v| vars.iter().rposition(|y| y == v))
                                    .max()
                                    .map_or(0, |i| i + 1)
                            })
                            .collect();
                        self.chain(&vars, 0, &conj, &levels, concl)?
                    }
                    _ => self.chain(&vars, 0, &[], &[], body)?,
                }
            }
        })
    }

    fn chain(
        &mut self,
        vars: &[&'a str],
        i: usize,
        conj: &[&'a Formula],
        levels: &[usize],
        concl: &'a Formula,
    ) -> Result<bool, EvalError> {
        for (c, lv) in conj.iter().zip(levels) {
            if *lv == i && !self.formula(c)? {
                return Ok(true);
            }
        }
        if i == vars.len() {
            return self.formula(concl);
        }
        for p in 0..self.s.domain.len() {
            self.vars.push((vars[i], p));
            let r = self.chain(vars, i + 1, conj, levels, concl);
            self.vars.pop();
            if !r? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(f),
    }
}

fn env_from<'a>(s: &'a SlStructure, asg: &'a Assignment) -> Result<Env<'a>, EvalError> {
    let mut vars = Vec::with_capacity(asg.len());
    for (x, id) in asg {
        let p = s.position(*id).ok_or_else(|| EvalError::OutsideDomain(x.clone()))?;
        vars.push((x.as_str(), p));
    }
    Ok(Env { s, vars })
}

pub fn eval_term(s: &SlStructure, t: &Term, asg: &Assignment) -> Result<Value, EvalError> {
    let env = env_from(s, asg)?;
    match t.sort() {
        Sort::Address => Ok(Value::Address(s.domain[env.addr(t)?])),
        Sort::Nat => Ok(Value::Nat(env.nat(t)?)),
    }
}

pub fn eval_formula(s: &SlStructure, f: &Formula, asg: &Assignment) -> Result<bool, EvalError> {
    let mut env = env_from(s, asg)?;
    env.formula(f)
}

/// `s |=_SL f` for a sentence `f`.
pub fn is_sl_model(s: &SlStructure, f: &Formula) -> Result<bool, EvalError> {
    let free = f.free_vars();
    if !free.is_empty() {
        return Err(EvalError::NotClosed(free.into_iter().collect()));
    }
    eval_formula(s, f, &Assignment::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig() -> Formula {
        // forall x. b1(x) = 1
        Formula::forall("x", Formula::eq(Term::bal(1, Term::var("x")), Term::Numeral(1)))
    }

    #[test]
    fn length_counts_numerals_by_value() {
        assert_eq!(formula_length(&fig()), 6);
        assert_eq!(formula_length(&Formula::eq(Term::Numeral(0), Term::Numeral(0))), 3);
    }

    #[test]
    fn universal_over_empty_domain_holds() {
        let s = SlStructure::new(vec![], vec![], vec![vec![]], vec![]).unwrap();
        assert_eq!(s.sums(), &[0]);
        assert!(is_sl_model(&s, &fig()).unwrap());
    }

    #[test]
    fn sum_property_enforced() {
        let err = SlStructure::with_sums(vec![1, 2], vec![], vec![vec![1, 1]], vec![], vec![3]);
        assert!(matches!(err, Err(StructureError::SumProperty { .. })));
        assert!(SlStructure::with_sums(vec![1, 2], vec![], vec![vec![1, 1]], vec![], vec![2]).is_ok());
    }

    #[test]
    fn free_variable_rejected() {
        let s = SlStructure::new(vec![1], vec![], vec![vec![0]], vec![]).unwrap();
        let f = Formula::eq(Term::bal(1, Term::var("y")), Term::Numeral(0));
        assert!(matches!(is_sl_model(&s, &f), Err(EvalError::NotClosed(_))));
    }

    #[test]
    fn violations_reported() {
        let v = Vocabulary::new(1, 1, 0);
        let f = Formula::eq(Term::plus(Term::bal(1, Term::AddressConst(1)), Term::Numeral(1)), Term::SumConst(1));
        assert_eq!(well_formed(&v, &f), Err(vec![Violation::PlusUnavailable]));
        let g = Formula::not(Formula::forall("x", Formula::eq(Term::var("x"), Term::AddressConst(2))));
        let errs = well_formed(&v, &g).unwrap_err();
        assert!(errs.contains(&Violation::NonUniversal("x".into())));
        assert!(errs.contains(&Violation::AddressConstOutOfRange(2)));
        let h = Formula::implies(fig(), Formula::eq(Term::SumConst(1), Term::Numeral(0)));
        assert_eq!(well_formed(&v, &h), Err(vec![Violation::NonUniversal("x".into())]));
    }

    #[test]
    fn evaluates_with_unsorted_domain_input() {
        let s = SlStructure::new(vec![7, 3], vec![7], vec![vec![2, 5]], vec![4]).unwrap();
        assert_eq!(s.domain(), &[3, 7]);
        assert_eq!(s.balance(1, 7), Some(2));
        let f = Formula::and(
            Formula::eq(Term::bal(1, Term::AddressConst(1)), Term::Numeral(2)),
            Formula::eq(Term::SumConst(1), Term::Numeral(7)),
        );
        assert!(is_sl_model(&s, &f).unwrap());
    }
}
