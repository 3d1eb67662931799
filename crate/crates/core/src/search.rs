//! Bounded enumeration of SL structures.
//!
//! Tables are filled in the order address constants, nat constants,
//! balances; after every choice the sentence is evaluated in three-valued
//! logic with unknown entries ranging over `0..=max_value`, and subtrees that
//! already falsify it are skipped. A chain `forall x1 .. xk. (A1 & .. & An) -> B`
//! checks each `Ai` as soon as its variables are bound.
//!
//! With [`SearchOptions::symmetry_breaking`] only one structure per
//! permutation class of the addresses outside the constants is visited:
//! constants take the first positions, and the remaining columns are sorted.

use serde::{Deserialize, Serialize};

use crate::exec::{self, Execution};
use crate::sl::{AddressId, Formula, SlStructure, Sort, Term, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_addresses: usize,
    pub max_value: u64,
}

impl SearchBounds {
    pub fn new(max_addresses: usize, max_value: u64) -> Self {
        SearchBounds { max_addresses, max_value }
    }

    /// `max_value` defaults to the largest numeral plus `d + max_addresses + 1`.
    pub fn default_for(f: &Formula, v: &Vocabulary, max_addresses: usize) -> Self {
        let max_value =
            f.max_numeral().saturating_add(v.d as u64).saturating_add(max_addresses as u64).saturating_add(1);
        SearchBounds { max_addresses, max_value }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Address constants must denote pairwise different elements.
    pub distinct: bool,
    pub symmetry_breaking: bool,
}

/// Smallest model within `bounds`, or `None` if the bounded space has none.
pub fn find_model(f: &Formula, v: &Vocabulary, bounds: SearchBounds) -> Option<SlStructure> {
    find_model_with(f, v, bounds, false, Execution::default())
}

/// Like [`find_model`] but the address constants must be pairwise different.
pub fn find_distinct_model(f: &Formula, v: &Vocabulary, bounds: SearchBounds) -> Option<SlStructure> {
    find_model_with(f, v, bounds, true, Execution::default())
}

/// Domain sizes are searched independently; the smallest size wins.
/// Open formulas have no models here.
pub fn find_model_with(
    f: &Formula,
    v: &Vocabulary,
    bounds: SearchBounds,
    distinct: bool,
    exec: Execution,
) -> Option<SlStructure> {
    find_model_opts(f, v, bounds, SearchOptions { distinct, symmetry_breaking: false }, exec)
}

pub fn find_model_opts(
    f: &Formula,
    v: &Vocabulary,
    bounds: SearchBounds,
    opts: SearchOptions,
    exec: Execution,
) -> Option<SlStructure> {
    if !f.is_closed() {
        return None;
    }
    let sizes: Vec<usize> = (0..=bounds.max_addresses).collect();
    exec::find_map_first(exec, &sizes, |&n| search_size_opts(f, v, n, bounds.max_value, opts))
}

/// Search restricted to domains of exactly `n` elements `1..=n`.
pub fn search_size(f: &Formula, v: &Vocabulary, n: usize, max_value: u64, distinct: bool) -> Option<SlStructure> {
    search_size_opts(f, v, n, max_value, SearchOptions { distinct, symmetry_breaking: false })
}

pub fn search_size_opts(
    f: &Formula,
    v: &Vocabulary,
    n: usize,
    max_value: u64,
    opts: SearchOptions,
) -> Option<SlStructure> {
    if v.l > 0 && n == 0 {
        return None;
    }
    if opts.distinct && v.l > n {
        return None;
    }
    let mut w = Partial { n, max_value, consts: vec![0; v.l], nats: vec![None; v.d], bals: vec![vec![None; n]; v.m] };
    let mut st = Search { f, opts, free: Vec::new() };
    if st.consts(&mut w, 0) {
        Some(w.complete())
    } else {
        None
    }
}

/// Partially filled structure over positions `0..n`.
struct Partial {
    n: usize,
    max_value: u64,
    consts: Vec<usize>,
    nats: Vec<Option<u64>>,
    bals: Vec<Vec<Option<u64>>>,
}

impl Partial {
    fn complete(&self) -> SlStructure {
        let domain: Vec<AddressId> = (1..=self.n as AddressId).collect();
        let consts = self.consts.iter().map(|p| *p as AddressId + 1).collect();
        let bals = self.bals.iter().map(|row| row.iter().map(|x| x.unwrap_or(0)).collect()).collect();
        let nats = self.nats.iter().map(|x| x.unwrap_or(0)).collect();
        SlStructure::new(domain, consts, bals, nats).expect("bounded values cannot overflow")
    }
}

type Interval = (u128, u128);

struct Eval<'a> {
    w: &'a Partial,
    vars: Vec<(&'a str, usize)>,
}

impl<'a> Eval<'a> {
    fn addr(&self, t: &Term) -> Option<usize> {
        match t {
            Term::AddressConst(i) => i.checked_sub(1).and_then(|k| self.w.consts.get(k)).copied(),
            Term::AddressVar(x) => self.vars.iter().rev().find(|(n, _)| n == x).map(|(_, p)| *p),
            _ => None,
        }
    }

    fn known(&self, x: Option<u64>) -> Interval {
        match x {
            Some(v) => (v as u128, v as u128),
            None => (0, self.w.max_value as u128),
        }
    }

    /// `None` for ill-sorted or out-of-vocabulary terms.
    fn nat(&self, t: &Term) -> Option<Interval> {
        match t {
            Term::Numeral(k) => Some((*k as u128, *k as u128)),
            Term::NatConst(k) => k.checked_sub(1).and_then(|i| self.w.nats.get(i)).map(|x| self.known(*x)),
            Term::SumConst(j) => {
                let row = j.checked_sub(1).and_then(|i| self.w.bals.get(i))?;
                Some(row.iter().fold((0, 0), |(lo, hi), x| {
                    let (a, b) = self.known(*x);
                    (lo + a, hi + b)
                }))
            }
            Term::Balance(j, a) => {
                let p = self.addr(a)?;
                let row = j.checked_sub(1).and_then(|i| self.w.bals.get(i))?;
                Some(self.known(row[p]))
            }
            Term::Plus(a, b) => {
                let (a0, a1) = self.nat(a)?;
                let (b0, b1) = self.nat(b)?;
                Some((a0 + b0, a1 + b1))
            }
            _ => None,
        }
    }

    /// Kleene evaluation; `None` is unknown.
    fn formula(&mut self, f: &'a Formula) -> Option<bool> {
        match f {
            Formula::Eq(a, b) if a.sort() == Sort::Address => Some(self.addr(a)? == self.addr(b)?),
            Formula::Eq(a, b) => {
                let (a0, a1) = self.nat(a)?;
                let (b0, b1) = self.nat(b)?;
                if a0 == a1 && b0 == b1 {
                    Some(a0 == b0)
                } else if a1 < b0 || b1 < a0 {
                    Some(false)
                } else {
                    None
                }
            }
            Formula::Leq(a, b) => {
                let (a0, a1) = self.nat(a)?;
                let (b0, b1) = self.nat(b)?;
                if a1 <= b0 {
                    Some(true)
                } else if a0 > b1 {
                    Some(false)
                } else {
                    None
                }
            }
            Formula::Not(g) => self.formula(g).map(|x| !x),
            Formula::And(a, b) => match self.formula(a) {
                Some(false) => Some(false),
                x => and3(x, self.formula(b)),
            },
            Formula::Or(a, b) => or3(self.formula(a), self.formula(b)),
            Formula::Implies(a, b) => or3(self.formula(a).map(|x| !x), self.formula(b)),
            Formula::ForallAddress(..) => {
                let mut vars = Vec::new();
                let mut body = f;
                while let Formula::ForallAddress(x, g) = body {
                    vars.push(x.as_str());
                    body = g;
                }
                match body {
                    Formula::Implies(prem, concl) if vars.len() > 1 => {
                        let mut conj = Vec::new();
                        flatten_and(prem, &mut conj);
                        let levels: Vec<usize> = conj
                            .iter()
                            .map(|c| {
                                c.free_vars()
                                    .iter()
                                    .filter_map(|v| vars.iter().rposition(|x| x == v))
                                    .max()
                                    .map_or(0, |i| i + 1)
                            })
                            .collect();
                        let mut acc = Some(true);
                        self.chain(&vars, 0, &conj, &levels, concl, Some(true), &mut acc);
                        acc
                    }
                    _ => match f {
                        Formula::ForallAddress(x, g) => self.forall(x, g),
                        _ => unreachable!("matched above"),
                    },
                }
            }
        }
    }

    fn forall(&mut self, x: &'a str, g: &'a Formula) -> Option<bool> {
        let mut acc = Some(true);
        for p in 0..self.w.n {
            self.vars.push((x, p));
            let r = self.formula(g);
            self.vars.pop();
            acc = and3(acc, r);
            if acc == Some(false) {
                break;
            }
        }
        acc
    }

    /// `forall vars[i..]. prem -> concl`, where the conjuncts at level `i`
    /// become decidable once `vars[..i]` are bound. The result is folded
    /// into `acc`; once it is unknown only a falsifying tuple can change it,
    /// and tuples with an undecided premise cannot falsify.
    #[allow(clippy::too_many_arguments)]
    fn chain(
        &mut self,
        vars: &[&'a str],
        i: usize,
        conj: &[&'a Formula],
        levels: &[usize],
        concl: &'a Formula,
        mut prem: Option<bool>,
        acc: &mut Option<bool>,
    ) {
        for (c, lv) in conj.iter().zip(levels) {
            if *lv == i {
                prem = and3(prem, self.formula(c));
                if prem == Some(false) {
                    return;
                }
            }
        }
        if prem.is_none() && acc.is_none() {
            return;
        }
        if i == vars.len() {
            *acc = and3(*acc, or3(prem.map(|x| !x), self.formula(concl)));
            return;
        }
        for p in 0..self.w.n {
            self.vars.push((vars[i], p));
            self.chain(vars, i + 1, conj, levels, concl, prem, acc);
            self.vars.pop();
            if *acc == Some(false) {
                break;
            }
        }
    }
}

fn flatten_and<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        _ => out.push(f),
    }
}

fn and3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

struct Search<'a> {
    f: &'a Formula,
    opts: SearchOptions,
    /// Previous position outside the constants, per position.
    free: Vec<Option<usize>>,
}

impl<'a> Search<'a> {
    fn status(&self, w: &Partial) -> Option<bool> {
        Eval { w, vars: Vec::new() }.formula(self.f)
    }

    fn consts(&mut self, w: &mut Partial, i: usize) -> bool {
        if i == w.consts.len() {
            self.free = (0..w.n)
                .map(|q| (0..q).rev().find(|p| !w.consts.contains(p)).filter(|_| !w.consts.contains(&q)))
                .collect();
            return self.values(w, 0);
        }
        let limit = if self.opts.symmetry_breaking {
            w.consts[..i].iter().map(|p| p + 1).max().unwrap_or(0).min(w.n - 1)
        } else {
            w.n - 1
        };
        for p in 0..=limit {
            if self.opts.distinct && w.consts[..i].contains(&p) {
                continue;
            }
            w.consts[i] = p;
            if self.consts(w, i + 1) {
                return true;
            }
        }
        false
    }

    /// Slot `k` indexes nat constants first, then balances row by row.
    fn values(&mut self, w: &mut Partial, k: usize) -> bool {
        match self.status(w) {
            Some(false) => return false,
            // every completion works; unknowns become 0
            Some(true) => return true,
            None => {}
        }
        let d = w.nats.len();
        let total = d + w.bals.len() * w.n;
        if k == total {
            return false;
        }
        let lo = if k >= d { self.lower_bound(w, k - d) } else { 0 };
        for val in lo..=w.max_value {
            self.set(w, k, d, Some(val));
            if self.values(w, k + 1) {
                return true;
            }
        }
        self.set(w, k, d, None);
        false
    }

    /// Columns outside the constants stay lexicographically sorted.
    fn lower_bound(&self, w: &Partial, slot: usize) -> u64 {
        if !self.opts.symmetry_breaking {
            return 0;
        }
        let (r, q) = (slot / w.n, slot % w.n);
        match self.free[q] {
            Some(p) if (0..r).all(|row| w.bals[row][p] == w.bals[row][q]) => w.bals[r][p].unwrap_or(0),
            _ => 0,
        }
    }

    fn set(&self, w: &mut Partial, k: usize, d: usize, val: Option<u64>) {
        if k < d {
            w.nats[k] = val;
        } else {
            let r = k - d;
            w.bals[r / w.n][r % w.n] = val;
        }
    }
}
