use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::lattice::{integer_point, ColBounds, IntOutcome};
use super::simplex::{Reason, Simplex, Q};
use super::{LiaError, LiaModel, LinExpr, PresFormula, PresVar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiaResult {
    Sat(LiaModel),
    Unsat,
    /// Work budget exhausted; says nothing about satisfiability.
    Incomplete(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Cap on decisions + conflicts + branch-and-bound nodes.
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: 2_000_000 }
    }
}

/// Papadimitriou's bound: if `A x <= b` (`m` rows, `n` columns, entries of
/// `A` and `b` at most `a` in absolute value) has a solution in the
/// naturals, it has one with every entry at most `(n + m) (m a)^(2m + 1)`.
/// Every boolean branch of a formula is such a system (an equation counts
/// as two rows, a disequality branch as one), so boxing all variables at
/// this value keeps the search finite without losing solutions.
pub fn small_solution_bound(n: usize, m: usize, a: &BigInt) -> BigInt {
    let a = if a.is_zero() { BigInt::one() } else { a.abs() };
    let base = BigInt::from(m.max(1)) * a;
    BigInt::from(n + m) * num_traits::pow(base, 2 * m + 1)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct Lit(u32);

impl Lit {
    fn new(var: usize, neg: bool) -> Lit {
        Lit(((var as u32) << 1) | neg as u32)
    }
    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    fn neg(self) -> bool {
        self.0 & 1 == 1
    }
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Clone, Debug)]
enum AtomKind {
    Eq(BigInt),
    Le(BigInt),
}

#[derive(Clone, Debug)]
struct TheoryAtom {
    x: usize,
    kind: AtomKind,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Val {
    Undef,
    True,
    False,
}

enum Fail {
    Conflict(Vec<Lit>),
    Budget,
    TooLarge,
}

struct Builder {
    vars: Vec<PresVar>,
    var_index: HashMap<PresVar, usize>,
    defs: Vec<Vec<(usize, BigInt)>>,
    def_index: HashMap<Vec<(usize, BigInt)>, usize>,
    atoms: Vec<Option<TheoryAtom>>,
    atom_index: HashMap<(usize, bool, BigInt), usize>,
    clauses: Vec<Vec<Lit>>,
    max_entry: BigInt,
    unsat: bool,
    /// Fixed once every constant of the input has a column.
    n_orig: usize,
}

enum Enc {
    Const(bool),
    L(Lit),
}

impl Builder {
    fn fresh(&mut self) -> usize {
        self.atoms.push(None);
        self.atoms.len() - 1
    }

    fn col(&mut self, v: &PresVar) -> usize {
        if let Some(&i) = self.var_index.get(v) {
            return i;
        }
        self.vars.push(v.clone());
        self.var_index.insert(v.clone(), self.vars.len() - 1);
        self.vars.len() - 1
    }

    /// Normalises `lhs - rhs (= | <=) 0` into a bound on one tableau column.
    fn atom(&mut self, lhs: &LinExpr, rhs: &LinExpr, is_eq: bool) -> Enc {
        let mut terms: Vec<(usize, BigInt)> = Vec::new();
        let mut k = BigInt::from(lhs.constant) - BigInt::from(rhs.constant);
        let mut acc: HashMap<usize, BigInt> = HashMap::new();
        for (v, c) in &lhs.coeffs {
            let i = self.col(v);
            *acc.entry(i).or_default() += BigInt::from(*c);
        }
        for (v, c) in &rhs.coeffs {
            let i = self.col(v);
            *acc.entry(i).or_default() -= BigInt::from(*c);
        }
        terms.extend(acc.into_iter().filter(|(_, c)| !c.is_zero()));
        terms.sort_by_key(|(i, _)| *i);
        for (_, c) in &terms {
            if c.abs() > self.max_entry {
                self.max_entry = c.abs();
            }
        }
        if terms.is_empty() {
            return Enc::Const(if is_eq { k.is_zero() } else { !k.is_positive() });
        }
        let g = terms.iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
        let sign = if terms[0].1.is_negative() { -BigInt::one() } else { BigInt::one() };
        let scale = &g * &sign;
        for (_, c) in terms.iter_mut() {
            *c = &*c / &scale;
        }
        // sign * g * T + k (= | <=) 0
        let (upper_side, bound) = if is_eq {
            if !(&k % &g).is_zero() {
                return Enc::Const(false);
            }
            (true, -(&k / &scale))
        } else if sign.is_positive() {
            // T <= floor(-k / g)
            (true, (-&k).div_floor(&g))
        } else {
            // T >= ceil(k / g)
            (false, -((-&k).div_floor(&g)))
        };
        k = bound;
        if k.abs() > self.max_entry {
            self.max_entry = k.abs();
        }
        let x = if terms.len() == 1 {
            terms[0].0
        } else {
            let key = terms.clone();
            let d = match self.def_index.get(&key) {
                Some(&d) => d,
                None => {
                    self.defs.push(terms);
                    self.def_index.insert(key, self.defs.len() - 1);
                    self.defs.len() - 1
                }
            };
            self.n_orig + d
        };
        // Ge(l) is stored as the negation of Le(l - 1).
        let (kind_eq, value, negate) = if is_eq {
            (true, k, false)
        } else if upper_side {
            (false, k, false)
        } else {
            (false, k - 1, true)
        };
        let key = (x, kind_eq, value.clone());
        let var = match self.atom_index.get(&key) {
            Some(&v) => v,
            None => {
                let v = self.fresh();
                self.atoms[v] =
                    Some(TheoryAtom { x, kind: if kind_eq { AtomKind::Eq(value) } else { AtomKind::Le(value) } });
                self.atom_index.insert(key, v);
                v
            }
        };
        Enc::L(Lit::new(var, negate))
    }

    fn encode(&mut self, f: &PresFormula) -> Enc {
        match f {
            PresFormula::True => Enc::Const(true),
            PresFormula::False => Enc::Const(false),
            PresFormula::Eq(a, b) => self.atom(a, b, true),
            PresFormula::Le(a, b) => self.atom(a, b, false),
            PresFormula::Not(g) => match self.encode(g) {
                Enc::Const(b) => Enc::Const(!b),
                Enc::L(l) => Enc::L(l.not()),
            },
            PresFormula::And(fs) => self.gate(fs, true),
            PresFormula::Or(fs) => self.gate(fs, false),
            PresFormula::Implies(a, b) => {
                let parts = [PresFormula::not((**a).clone()), (**b).clone()];
                self.gate(&parts, false)
            }
        }
    }

    /// Tseitin gate for a conjunction (`and = true`) or disjunction.
    fn gate(&mut self, parts: &[PresFormula], and: bool) -> Enc {
        let mut lits = Vec::new();
        for p in parts {
            match self.encode(p) {
                Enc::Const(b) if b == and => {}
                Enc::Const(b) => return Enc::Const(b),
                Enc::L(l) => lits.push(l),
            }
        }
        match lits.len() {
            0 => Enc::Const(and),
            1 => Enc::L(lits[0]),
            _ => {
                let g = Lit::new(self.fresh(), false);
                // and: g -> l_i, (l_1 & .. & l_n) -> g ; or: dual
                let (g_pos, g_neg) = if and { (g, g.not()) } else { (g.not(), g) };
                let flip = |l: Lit| if and { l } else { l.not() };
                for &l in &lits {
                    self.clauses.push(vec![g_neg, flip(l)]);
                }
                let mut big = vec![g_pos];
                big.extend(lits.iter().map(|&l| flip(l).not()));
                self.clauses.push(big);
                Enc::L(g)
            }
        }
    }

    /// Top-level assertion: conjunctions are split, disjunctions become clauses.
    fn assert_top(&mut self, f: &PresFormula) {
        match f {
            PresFormula::And(fs) => fs.iter().for_each(|g| self.assert_top(g)),
            PresFormula::Or(fs) => {
                let mut clause = Vec::new();
                for g in fs {
                    match self.encode(g) {
                        Enc::Const(true) => return,
                        Enc::Const(false) => {}
                        Enc::L(l) => clause.push(l),
                    }
                }
                if clause.is_empty() {
                    self.unsat = true;
                }
                self.clauses.push(clause);
            }
            PresFormula::Implies(a, b) => {
                self.assert_top(&PresFormula::Or(vec![PresFormula::not((**a).clone()), (**b).clone()]))
            }
            PresFormula::Not(g) if matches!(**g, PresFormula::Or(_)) => {
                if let PresFormula::Or(fs) = &**g {
                    fs.iter().for_each(|h| self.assert_top(&PresFormula::not(h.clone())));
                }
            }
            _ => match self.encode(f) {
                Enc::Const(true) => {}
                Enc::Const(false) => self.unsat = true,
                Enc::L(l) => self.clauses.push(vec![l]),
            },
        }
    }
}

struct Solver {
    vars: Vec<PresVar>,
    atoms: Vec<Option<TheoryAtom>>,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assign: Vec<Val>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    theory_head: usize,
    theory_marks: Vec<(usize, usize)>,
    diseqs: Vec<(usize, BigInt, Lit)>,
    activity: Vec<f64>,
    bump: f64,
    phase: Vec<bool>,
    simplex: Simplex,
    defs: Vec<Vec<(usize, BigInt)>>,
    n_orig: usize,
    work: u64,
    budget: u64,
}

impl Solver {
    fn value(&self, l: Lit) -> Val {
        match self.assign[l.var()] {
            Val::Undef => Val::Undef,
            Val::True if !l.neg() => Val::True,
            Val::False if l.neg() => Val::True,
            _ => Val::False,
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        self.assign[l.var()] = if l.neg() { Val::False } else { Val::True };
        self.level[l.var()] = self.decision_level();
        self.reason[l.var()] = reason;
        self.trail.push(l);
    }

    fn attach(&mut self, ci: usize) {
        let c = &self.clauses[ci];
        self.watches[c[0].not().0 as usize].push(ci);
        self.watches[c[1].not().0 as usize].push(ci);
    }

    fn propagate_bool(&mut self) -> Option<Vec<Lit>> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let ws = std::mem::take(&mut self.watches[p.0 as usize]);
            let mut keep = Vec::with_capacity(ws.len());
            let mut conflict = None;
            let mut idx = 0;
            while idx < ws.len() {
                let ci = ws[idx];
                idx += 1;
                if conflict.is_some() {
                    keep.push(ci);
                    continue;
                }
                let false_lit = p.not();
                {
                    let c = &mut self.clauses[ci];
                    if c[0] == false_lit {
                        c.swap(0, 1);
                    }
                }
                let first = self.clauses[ci][0];
                if self.value(first) == Val::True {
                    keep.push(ci);
                    continue;
                }
                let len = self.clauses[ci].len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[ci][k];
                    if self.value(l) != Val::False {
                        self.clauses[ci].swap(1, k);
                        let w = self.clauses[ci][1].not().0 as usize;
                        self.watches[w].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                keep.push(ci);
                match self.value(first) {
                    Val::False => conflict = Some(self.clauses[ci].clone()),
                    _ => self.enqueue(first, Some(ci)),
                }
            }
            self.watches[p.0 as usize] = keep;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn theory_assert(&mut self, l: Lit) -> Result<(), Vec<Reason>> {
        let Some(atom) = self.atoms[l.var()].clone() else { return Ok(()) };
        let x = atom.x;
        let r = Reason::Lit(l.0);
        match (atom.kind, l.neg()) {
            (AtomKind::Eq(v), false) => {
                let q = Q::from_integer(v);
                self.simplex.assert_upper(x, q.clone(), r)?;
                self.simplex.assert_lower(x, q, r)
            }
            (AtomKind::Eq(v), true) => {
                self.diseqs.push((x, v, l));
                Ok(())
            }
            (AtomKind::Le(v), false) => self.simplex.assert_upper(x, Q::from_integer(v), r),
            (AtomKind::Le(v), true) => self.simplex.assert_lower(x, Q::from_integer(v + 1), r),
        }
    }

    fn explain(reasons: &[Reason]) -> Vec<Lit> {
        let mut set: BTreeSet<u32> = BTreeSet::new();
        for r in reasons {
            if let Reason::Lit(l) = r {
                set.insert(*l);
            }
        }
        set.into_iter().map(|l| Lit(l).not()).collect()
    }

    fn propagate(&mut self) -> Option<Vec<Lit>> {
        if let Some(c) = self.propagate_bool() {
            return Some(c);
        }
        while self.theory_head < self.trail.len() {
            let l = self.trail[self.theory_head];
            self.theory_head += 1;
            if let Err(why) = self.theory_assert(l) {
                return Some(Self::explain(&why));
            }
        }
        if let Err(why) = self.simplex.check() {
            return Some(Self::explain(&why));
        }
        None
    }

    fn backtrack(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl];
        for i in (start..self.trail.len()).rev() {
            let v = self.trail[i].var();
            self.phase[v] = !self.trail[i].neg();
            self.assign[v] = Val::Undef;
            self.reason[v] = None;
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl);
        let (mark, nd) = self.theory_marks[lvl];
        self.theory_marks.truncate(lvl);
        self.simplex.undo(mark);
        self.diseqs.truncate(nd);
        self.qhead = start;
        self.theory_head = self.theory_head.min(start);
    }

    fn new_level(&mut self) {
        self.theory_marks.push((self.simplex.mark(), self.diseqs.len()));
        self.trail_lim.push(self.trail.len());
    }

    /// Learns from a clause whose literals are all false. Returns false on UNSAT.
    fn resolve(&mut self, conflict: Vec<Lit>) -> bool {
        if conflict.is_empty() {
            return false;
        }
        let top = conflict.iter().map(|l| self.level[l.var()]).max().unwrap_or(0);
        if top == 0 {
            return false;
        }
        self.backtrack(top);
        let cur = self.decision_level();
        let mut seen = vec![false; self.assign.len()];
        let mut learnt: Vec<Lit> = vec![Lit(0)];
        let mut counter = 0;
        let mut lits = conflict;
        let mut idx = self.trail.len();
        let uip;
        loop {
            for &q in &lits {
                let v = q.var();
                if !seen[v] && self.level[v] > 0 {
                    seen[v] = true;
                    self.activity[v] += self.bump;
                    if self.level[v] >= cur {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            let p = loop {
                idx -= 1;
                let p = self.trail[idx];
                if seen[p.var()] {
                    break p;
                }
            };
            seen[p.var()] = false;
            counter -= 1;
            if counter == 0 {
                uip = p;
                break;
            }
            let ci = self.reason[p.var()].expect("implied literal has a reason");
            lits = self.clauses[ci].iter().copied().filter(|&l| l != p).collect();
        }
        learnt[0] = uip.not();
        self.bump *= 1.05;
        if self.bump > 1e100 {
            self.activity.iter_mut().for_each(|a| *a *= 1e-100);
            self.bump *= 1e-100;
        }
        let back = if learnt.len() == 1 {
            0
        } else {
            let (k, lvl) = learnt[1..]
                .iter()
                .enumerate()
                .map(|(k, l)| (k + 1, self.level[l.var()]))
                .max_by_key(|(_, lv)| *lv)
                .expect("non-empty");
            learnt.swap(1, k);
            lvl
        };
        self.backtrack(back);
        if learnt.len() == 1 {
            self.enqueue(learnt[0], None);
        } else {
            let ci = self.clauses.len();
            let first = learnt[0];
            self.clauses.push(learnt);
            self.attach(ci);
            self.enqueue(first, Some(ci));
        }
        true
    }

    fn pick(&self) -> Option<Lit> {
        let mut best: Option<usize> = None;
        for v in 0..self.assign.len() {
            if self.assign[v] == Val::Undef && best.is_none_or(|b| self.activity[v] > self.activity[b]) {
                best = Some(v);
            }
        }
        best.map(|v| Lit::new(v, !self.phase[v]))
    }

    fn tick(&mut self) -> Result<(), Fail> {
        self.work += 1;
        if self.work > self.budget {
            Err(Fail::Budget)
        } else {
            Ok(())
        }
    }

    /// An integer point within the current bounds, if any.
    fn lattice_point(&mut self) -> Result<Vec<BigInt>, Fail> {
        if let Err(why) = self.simplex.check() {
            return Err(Fail::Conflict(Self::explain(&why)));
        }
        if (0..self.n_orig).all(|x| self.simplex.value(x).is_integer()) {
            return Ok((0..self.n_orig).map(|x| self.simplex.value(x).to_integer()).collect());
        }
        let bounds: Vec<ColBounds> = (0..self.simplex.columns())
            .map(|x| ColBounds { lo: self.simplex.lower_bound(x), hi: self.simplex.upper_bound(x) })
            .collect();
        let (work, budget) = (&mut self.work, self.budget);
        let mut tick = || {
            *work += 1;
            *work <= budget
        };
        match integer_point(self.n_orig, &self.defs, &bounds, &mut tick) {
            IntOutcome::Point(x) => Ok(x),
            IntOutcome::Infeasible(why) => Err(Fail::Conflict(Self::explain(&why))),
            IntOutcome::Budget => Err(Fail::Budget),
        }
    }

    /// One branch-and-bound node at the current bounds.
    fn visit(&mut self) -> Visit {
        if let Err(e) = self.tick() {
            return Visit::Done(Err(e));
        }
        let point = match self.lattice_point() {
            Ok(p) => p,
            Err(e) => return Visit::Done(Err(e)),
        };
        let column = |x: usize| -> BigInt {
            if x < self.n_orig {
                point[x].clone()
            } else {
                self.defs[x - self.n_orig].iter().map(|(i, c)| c * &point[*i]).sum()
            }
        };
        let hit = self.diseqs.iter().find(|(x, v, _)| column(*x) == *v).cloned();
        if let Some((x, v, l)) = hit {
            return Visit::Branch(x, Q::from_integer(&v - 1), Q::from_integer(&v + 1), Reason::Lit(l.0));
        }
        let mut model = LiaModel::new();
        for (name, val) in self.vars.iter().zip(&point) {
            match val.to_u64() {
                Some(n) => model.insert(name.clone(), n),
                None => return Visit::Done(Err(Fail::TooLarge)),
            };
        }
        Visit::Done(Ok(model))
    }

    /// Splits on disequalities the current point violates. Iterative, since
    /// the depth is bounded only by the box.
    fn integer(&mut self) -> Result<LiaModel, Fail> {
        let mut stack: Vec<Frame> = Vec::new();
        let mut pending: Option<Result<LiaModel, Fail>> = None;
        loop {
            let r = match pending.take() {
                Some(r) => r,
                None => match self.visit() {
                    Visit::Done(r) => r,
                    Visit::Branch(x, lo, hi, reason) => {
                        let mark = self.simplex.mark();
                        stack.push(Frame { x, hi, reason, mark, right: false, why: BTreeSet::new() });
                        if let Err(r) = self.simplex.assert_upper(x, lo, reason) {
                            pending = Some(Err(Fail::Conflict(Self::explain(&r))));
                        }
                        continue;
                    }
                },
            };
            let Some(top) = stack.last_mut() else { return r };
            self.simplex.undo(top.mark);
            match r {
                Err(Fail::Conflict(c)) => {
                    top.why.extend(c.into_iter().map(|l| l.not().0));
                    if !top.right {
                        top.right = true;
                        let (x, hi, reason) = (top.x, top.hi.clone(), top.reason);
                        if let Err(r) = self.simplex.assert_lower(x, hi, reason) {
                            pending = Some(Err(Fail::Conflict(Self::explain(&r))));
                        }
                    } else {
                        let mut f = stack.pop().expect("non-empty");
                        if let Reason::Lit(l) = f.reason {
                            f.why.insert(l);
                        }
                        pending = Some(Err(Fail::Conflict(f.why.into_iter().map(|l| Lit(l).not()).collect())));
                    }
                }
                other => {
                    stack.pop();
                    pending = Some(other);
                }
            }
        }
    }

    fn run(&mut self) -> LiaResult {
        loop {
            if let Some(conflict) = self.propagate() {
                if self.tick().is_err() {
                    return LiaResult::Incomplete("work budget exhausted".into());
                }
                if !self.resolve(conflict) {
                    return LiaResult::Unsat;
                }
                continue;
            }
            match self.pick() {
                Some(l) => {
                    if self.tick().is_err() {
                        return LiaResult::Incomplete("work budget exhausted".into());
                    }
                    self.new_level();
                    self.enqueue(l, None);
                }
                None => {
                    let mark = self.simplex.mark();
                    let r = self.integer();
                    self.simplex.undo(mark);
                    match r {
                        Ok(m) => return LiaResult::Sat(m),
                        Err(Fail::Budget) => return LiaResult::Incomplete("work budget exhausted".into()),
                        Err(Fail::TooLarge) => return LiaResult::Incomplete("solution value exceeds 64 bits".into()),
                        Err(Fail::Conflict(c)) => {
                            if !self.resolve(c) {
                                return LiaResult::Unsat;
                            }
                        }
                    }
                }
            }
        }
    }
}

enum Visit {
    Done(Result<LiaModel, Fail>),
    Branch(usize, Q, Q, Reason),
}

struct Frame {
    x: usize,
    hi: Q,
    reason: Reason,
    mark: usize,
    right: bool,
    why: BTreeSet<u32>,
}

/// Decides `f` over the naturals.
///
/// Small boxes are tried first, each with an eighth of the budget: a model
/// found there is a model, anything else is inconclusive. Only the run under
/// the full small-solution box can answer UNSAT.
pub fn solve(f: &PresFormula, opts: &SolveOptions) -> Result<LiaResult, LiaError> {
    let probe = SolveOptions { budget: (opts.budget / 8).max(1) };
    for cap in [16u32, 1024] {
        match solve_boxed(f, &probe, Some(BigInt::from(cap)))? {
            (LiaResult::Sat(m), _) => return Ok(LiaResult::Sat(m)),
            (r, true) => return Ok(r),
            _ => {}
        }
    }
    Ok(solve_boxed(f, opts, None)?.0)
}

/// The flag says whether the box used was the full small-solution bound.
fn solve_boxed(f: &PresFormula, opts: &SolveOptions, cap: Option<BigInt>) -> Result<(LiaResult, bool), LiaError> {
    let mut b = Builder {
        vars: Vec::new(),
        var_index: HashMap::new(),
        defs: Vec::new(),
        def_index: HashMap::new(),
        atoms: Vec::new(),
        atom_index: HashMap::new(),
        clauses: Vec::new(),
        max_entry: BigInt::one(),
        unsat: false,
        n_orig: 0,
    };
    for v in f.vars() {
        b.col(&v);
    }
    b.n_orig = b.vars.len();
    b.assert_top(f);
    if b.unsat || b.clauses.iter().any(|c| c.is_empty()) {
        return Ok((LiaResult::Unsat, true));
    }
    let n_orig = b.vars.len();
    let n_rows = 2 * b.atom_index.len();
    let full = small_solution_bound(n_orig, n_rows, &b.max_entry);
    let (bound, exact) = match cap {
        Some(c) if c < full => (c, false),
        _ => (full, true),
    };
    let nb = b.atoms.len();
    let mut s = Solver {
        simplex: Simplex::new(n_orig, &b.defs),
        defs: b.defs,
        vars: b.vars,
        atoms: b.atoms,
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * nb],
        assign: vec![Val::Undef; nb],
        level: vec![0; nb],
        reason: vec![None; nb],
        trail: Vec::new(),
        trail_lim: Vec::new(),
        qhead: 0,
        theory_head: 0,
        theory_marks: Vec::new(),
        diseqs: Vec::new(),
        activity: vec![0.0; nb],
        bump: 1.0,
        phase: vec![false; nb],
        n_orig,
        work: 0,
        budget: opts.budget,
    };
    let box_top = Q::from_integer(bound);
    for x in 0..n_orig {
        s.simplex.assert_upper(x, box_top.clone(), Reason::Structural).expect("fresh box is consistent");
    }
    for c in b.clauses {
        let mut c: Vec<Lit> = c;
        c.sort_by_key(|l| l.0);
        c.dedup();
        if c.windows(2).any(|w| w[0] == w[1].not()) {
            continue;
        }
        if c.len() == 1 {
            match s.value(c[0]) {
                Val::False => return Ok((LiaResult::Unsat, true)),
                Val::True => {}
                Val::Undef => s.enqueue(c[0], None),
            }
        } else {
            let ci = s.clauses.len();
            s.clauses.push(c);
            s.attach(ci);
        }
    }
    Ok((s.run(), exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> LinExpr {
        LinExpr::var(PresVar::Named(s.into()))
    }

    fn k(c: i64) -> LinExpr {
        LinExpr::constant(c)
    }

    fn sat(f: &PresFormula) -> Option<LiaModel> {
        match solve(f, &SolveOptions::default()).unwrap() {
            LiaResult::Sat(m) => {
                assert!(super::super::check_model(f, &m).unwrap(), "model does not satisfy {f}");
                Some(m)
            }
            LiaResult::Unsat => None,
            LiaResult::Incomplete(r) => panic!("incomplete: {r}"),
        }
    }

    #[test]
    fn parity_needs_integers() {
        // 2x = 2y + 1 has rational but no integer solutions
        let two_x = v("x").plus(&v("x"));
        let f = PresFormula::eq(two_x, v("y").plus(&v("y")).plus_const(1));
        assert!(sat(&f).is_none());
    }

    #[test]
    fn disequalities_split() {
        let f = PresFormula::And(vec![
            PresFormula::le(v("x"), k(2)),
            PresFormula::not(PresFormula::eq(v("x"), k(0))),
            PresFormula::not(PresFormula::eq(v("x"), k(1))),
        ]);
        assert_eq!(sat(&f).unwrap()[&PresVar::Named("x".into())], 2);
        let g = PresFormula::And(vec![f, PresFormula::not(PresFormula::eq(v("x"), k(2)))]);
        assert!(sat(&g).is_none());
    }

    #[test]
    fn boolean_structure() {
        // (x = 1 | x = 3) & (x = 3 -> y = 2) & x + y = 5
        let f = PresFormula::And(vec![
            PresFormula::Or(vec![PresFormula::eq(v("x"), k(1)), PresFormula::eq(v("x"), k(3))]),
            PresFormula::implies(PresFormula::eq(v("x"), k(3)), PresFormula::eq(v("y"), k(2))),
            PresFormula::eq(v("x").plus(&v("y")), k(5)),
        ]);
        let m = sat(&f).unwrap();
        assert_eq!(m[&PresVar::Named("x".into())] + m[&PresVar::Named("y".into())], 5);
    }

    #[test]
    fn naturals_are_non_negative() {
        assert!(sat(&PresFormula::le(v("x").plus_const(1), k(0))).is_none());
        assert!(sat(&PresFormula::True).is_some());
        assert!(sat(&PresFormula::False).is_none());
    }

    #[test]
    fn budget_reports_incomplete() {
        let mut parts = vec![PresFormula::le(v("x"), k(5))];
        parts.extend((0..6).map(|i| PresFormula::not(PresFormula::eq(v("x"), k(i)))));
        let f = PresFormula::And(parts);
        let r = solve(&f, &SolveOptions { budget: 1 }).unwrap();
        assert!(matches!(r, LiaResult::Incomplete(_)));
        assert_eq!(solve(&f, &SolveOptions::default()).unwrap(), LiaResult::Unsat);
    }

    #[test]
    fn bound_grows_with_inputs() {
        assert!(small_solution_bound(2, 2, &BigInt::from(3)) > BigInt::from(1000));
    }
}
