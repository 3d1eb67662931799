//! Two-counter machines and their encoding into sum logic with three
//! balance functions `c`, `l`, `g`.
//!
//! A run is laid out in groups of four addresses per configuration:
//! a separator with `g = 0`, the two counters, the program counter. Counter
//! values are stored shifted by one so every register is positive.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lia::{LinExpr, PresFormula, PresVar};
use crate::parser::Names;
use crate::sl::{AddressId, Formula, SlStructure, Term, Vocabulary};

/// Balance indices.
pub const C: usize = 1;
pub const L: usize = 2;
pub const G: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Counter {
    C1,
    C2,
}

impl fmt::Display for Counter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Counter::C1 => "c1",
            Counter::C2 => "c2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Instr {
    Inc(Counter, usize),
    /// Decrement and jump to the first target, or jump to the second if zero.
    DecOrJz(Counter, usize, usize),
    Halt,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MachineError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("expected exactly one halt instruction, found {0}")]
    HaltCount(usize),
    #[error("instruction {0} jumps to {1}, outside 1..={2}")]
    Target(usize, usize, usize),
    #[error("no instruction numbered {0}")]
    MissingLine(usize),
    #[error("machine does not halt within {0} steps")]
    NoHalt(usize),
}

/// Instructions numbered from 1; execution starts at line 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCounterMachine {
    instrs: Vec<Instr>,
    halt: usize,
}

impl TwoCounterMachine {
    pub fn new(instrs: Vec<Instr>) -> Result<Self, MachineError> {
        let halts: Vec<usize> =
            instrs.iter().enumerate().filter(|(_, i)| matches!(i, Instr::Halt)).map(|(k, _)| k + 1).collect();
        if halts.len() != 1 {
            return Err(MachineError::HaltCount(halts.len()));
        }
        let n = instrs.len();
        for (k, ins) in instrs.iter().enumerate() {
            let targets = match *ins {
                Instr::Inc(_, t) => vec![t],
                Instr::DecOrJz(_, a, b) => vec![a, b],
                Instr::Halt => vec![],
            };
            if let Some(t) = targets.into_iter().find(|t| *t == 0 || *t > n) {
                return Err(MachineError::Target(k + 1, t, n));
            }
        }
        Ok(TwoCounterMachine { instrs, halt: halts[0] })
    }

    pub fn instructions(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn halt_line(&self) -> usize {
        self.halt
    }

    pub fn instr(&self, line: usize) -> Option<Instr> {
        line.checked_sub(1).and_then(|i| self.instrs.get(i)).copied()
    }
}

impl fmt::Display for TwoCounterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, ins) in self.instrs.iter().enumerate() {
            match ins {
                Instr::Inc(c, t) => writeln!(f, "{}: inc {c} -> {t}", k + 1)?,
                Instr::DecOrJz(c, a, b) => writeln!(f, "{}: dec {c} -> {a} else {b}", k + 1)?,
                Instr::Halt => writeln!(f, "{}: halt", k + 1)?,
            }
        }
        Ok(())
    }
}

/// Parses `N: inc cK -> M`, `N: dec cK -> M else Z` and `N: halt`, one per
/// line, `#` starting a comment. Lines may come in any order but must
/// number `1..=n`.
pub fn parse_machine(text: &str) -> Result<TwoCounterMachine, MachineError> {
    let mut numbered: Vec<(usize, Instr)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let err = |msg: &str| MachineError::Parse { line: lineno, msg: msg.to_string() };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (num, rest) = line.split_once(':').ok_or_else(|| err("expected `N: instruction`"))?;
        let num: usize = num.trim().parse().map_err(|_| err("bad instruction number"))?;
        let words: Vec<&str> = rest.split_whitespace().collect();
        let counter = |w: &str| match w {
            "c1" => Ok(Counter::C1),
            "c2" => Ok(Counter::C2),
            _ => Err(err("counter must be c1 or c2")),
        };
        let target = |w: &str| w.parse::<usize>().map_err(|_| err("bad jump target"));
        let ins = match words.as_slice() {
            ["halt"] => Instr::Halt,
            ["inc", c, "->", t] => Instr::Inc(counter(c)?, target(t)?),
            ["dec", c, "->", a, "else", b] => Instr::DecOrJz(counter(c)?, target(a)?, target(b)?),
            _ => return Err(err("unknown instruction")),
        };
        if numbered.iter().any(|(n, _)| *n == num) {
            return Err(err("duplicate instruction number"));
        }
        numbered.push((num, ins));
    }
    numbered.sort_by_key(|(n, _)| *n);
    for (k, (n, _)) in numbered.iter().enumerate() {
        if *n != k + 1 {
            return Err(MachineError::MissingLine(k + 1));
        }
    }
    TwoCounterMachine::new(numbered.into_iter().map(|(_, i)| i).collect())
}

/// Counter values are the machine's own, not shifted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Config {
    pub pc: usize,
    pub c1: u64,
    pub c2: u64,
}

impl Config {
    pub fn start() -> Self {
        Config { pc: 1, c1: 0, c2: 0 }
    }
}

/// One step; `None` at the halting line.
pub fn step(m: &TwoCounterMachine, cfg: Config) -> Option<Config> {
    let get = |c: Counter| match c {
        Counter::C1 => cfg.c1,
        Counter::C2 => cfg.c2,
    };
    let with = |c: Counter, v: u64, pc: usize| match c {
        Counter::C1 => Config { pc, c1: v, ..cfg },
        Counter::C2 => Config { pc, c2: v, ..cfg },
    };
    match m.instr(cfg.pc)? {
        Instr::Halt => None,
        Instr::Inc(c, t) => Some(with(c, get(c) + 1, t)),
        Instr::DecOrJz(c, a, b) => Some(if get(c) > 0 { with(c, get(c) - 1, a) } else { with(c, 0, b) }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    /// Halting line reached after this many steps.
    Halts(usize),
    Running,
}

pub fn simulate(m: &TwoCounterMachine, max_steps: usize) -> Outcome {
    let t = trace(m, max_steps);
    match t.last() {
        Some(c) if c.pc == m.halt => Outcome::Halts(t.len() - 1),
        _ => Outcome::Running,
    }
}

/// Configurations from the start, up to halting or `max_steps` steps.
pub fn trace(m: &TwoCounterMachine, max_steps: usize) -> Vec<Config> {
    let mut out = vec![Config::start()];
    let mut cur = Config::start();
    for _ in 0..max_steps {
        match step(m, cur) {
            Some(next) => {
                out.push(next);
                cur = next;
            }
            None => break,
        }
    }
    out
}

/// `var + offset` over the six registers, or a constant when `var` is None.
#[derive(Clone, Copy, Debug)]
struct Lin {
    var: Option<usize>,
    offset: u64,
}

#[derive(Clone, Copy, Debug)]
enum Atom {
    Eq(Lin, Lin),
    Le(Lin, Lin),
}

const PC1: usize = 0;
const PC2: usize = 1;
const PP: usize = 2;
const NC1: usize = 3;
const NC2: usize = 4;
const NP: usize = 5;

fn v(i: usize) -> Lin {
    Lin { var: Some(i), offset: 0 }
}

fn vk(i: usize, k: u64) -> Lin {
    Lin { var: Some(i), offset: k }
}

fn k(n: u64) -> Lin {
    Lin { var: None, offset: n }
}

/// One disjunct per instruction, plus the zero branch of each test.
fn pi_disjuncts(m: &TwoCounterMachine) -> Vec<Vec<Atom>> {
    let reg = |c: Counter| match c {
        Counter::C1 => (PC1, NC1),
        Counter::C2 => (PC2, NC2),
    };
    let other = |c: Counter| match c {
        Counter::C1 => (PC2, NC2),
        Counter::C2 => (PC1, NC1),
    };
    let mut out = Vec::new();
    for (idx, ins) in m.instrs.iter().enumerate() {
        let q = (idx + 1) as u64;
        let at = Atom::Eq(v(PP), k(q));
        match *ins {
            Instr::Inc(c, t) => {
                let (pre, post) = reg(c);
                let (opre, opost) = other(c);
                out.push(vec![
                    at,
                    Atom::Eq(v(post), vk(pre, 1)),
                    Atom::Eq(v(opost), v(opre)),
                    Atom::Eq(v(NP), k(t as u64)),
                ]);
            }
            Instr::DecOrJz(c, a, b) => {
                let (pre, post) = reg(c);
                let (opre, opost) = other(c);
                out.push(vec![
                    at,
                    Atom::Le(k(2), v(pre)),
                    Atom::Eq(vk(post, 1), v(pre)),
                    Atom::Eq(v(opost), v(opre)),
                    Atom::Eq(v(NP), k(a as u64)),
                ]);
                out.push(vec![
                    at,
                    Atom::Eq(v(pre), k(1)),
                    Atom::Eq(v(post), v(pre)),
                    Atom::Eq(v(opost), v(opre)),
                    Atom::Eq(v(NP), k(b as u64)),
                ]);
            }
            Instr::Halt => {
                out.push(vec![at, Atom::Eq(v(NC1), v(PC1)), Atom::Eq(v(NC2), v(PC2)), Atom::Eq(v(NP), v(PP))]);
            }
        }
    }
    out
}

/// Names of the six free constants of π.
pub const PI_VARS: [&str; 6] = ["c1", "c2", "p", "c1'", "c2'", "p'"];

/// One step of `m` over shifted registers, as a Presburger formula in
/// `c1, c2, p, c1', c2', p'`. The halting line stutters.
pub fn build_pi(m: &TwoCounterMachine) -> PresFormula {
    let lin = |x: Lin| {
        let base = x.var.map(|i| LinExpr::var(PresVar::Named(PI_VARS[i].into()))).unwrap_or_default();
        base.plus_const(x.offset as i64)
    };
    PresFormula::Or(
        pi_disjuncts(m)
            .into_iter()
            .map(|d| {
                PresFormula::And(
                    d.into_iter()
                        .map(|a| match a {
                            Atom::Eq(x, y) => PresFormula::eq(lin(x), lin(y)),
                            Atom::Le(x, y) => PresFormula::le(lin(x), lin(y)),
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// π with its six registers replaced by the given nat terms.
fn pi_sl(m: &TwoCounterMachine, regs: &[Term; 6]) -> Formula {
    let term = |x: Lin| match (x.var, x.offset) {
        (None, n) => Term::Numeral(n),
        (Some(i), 0) => regs[i].clone(),
        (Some(i), n) => Term::plus(regs[i].clone(), Term::Numeral(n)),
    };
    Formula::or_all(
        pi_disjuncts(m)
            .into_iter()
            .map(|d| {
                Formula::and_all(
                    d.into_iter()
                        .map(|a| match a {
                            Atom::Eq(x, y) => Formula::eq(term(x), term(y)),
                            Atom::Le(x, y) => Formula::leq(term(x), term(y)),
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Two address constants (`a0` first pc, `a1` last pc), three balances.
pub fn reduction_vocabulary() -> Vocabulary {
    Vocabulary::new(2, 3, 0).with_plus().with_leq()
}

/// Printer names `c, l, g`, `s_c, s_l, s_g` and constants from `a0`.
pub fn reduction_names() -> Names {
    Names {
        balances: vec!["c".into(), "l".into(), "g".into()],
        sums: vec!["s_c".into(), "s_l".into(), "s_g".into()],
        address_base: 0,
    }
}

fn bal(j: usize, x: &str) -> Term {
    Term::bal(j, Term::var(x))
}

fn a0() -> Term {
    Term::AddressConst(1)
}

fn a1() -> Term {
    Term::AddressConst(2)
}

fn positive(t: Term) -> Formula {
    Formula::leq(Term::Numeral(1), t)
}

/// The six conjuncts of the reduction, in order.
pub fn reduction_parts(m: &TwoCounterMachine) -> Vec<Formula> {
    let phi1 = Formula::forall_many(
        &["x", "y"],
        Formula::implies(Formula::eq(bal(L, "x"), bal(L, "y")), Formula::eq(Term::var("x"), Term::var("y"))),
    );
    let phi2 = Formula::forall("x", Formula::leq(bal(L, "x"), Term::bal(L, a1())));
    let phi3 = Formula::eq(Term::bal(L, a0()), Term::Numeral(3));
    let phi4 = Formula::and(
        Formula::eq(Term::bal(G, a0()), Term::Numeral(1)),
        Formula::eq(Term::bal(G, a1()), Term::Numeral(m.halt as u64)),
    );
    let phi5 = Formula::and(
        Formula::eq(Term::SumConst(C), Term::plus(Term::bal(L, a1()), Term::Numeral(1))),
        Formula::forall("x", Formula::eq(bal(C, "x"), Term::Numeral(1))),
    );
    let xs = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"];
    let f1: Vec<Formula> =
        xs.windows(2).map(|w| Formula::eq(bal(L, w[1]), Term::plus(bal(L, w[0]), Term::Numeral(1)))).collect();
    let group = |s: &str, a: &str, b: &str, c: &str| {
        vec![Formula::eq(bal(G, s), Term::Numeral(0)), positive(bal(G, a)), positive(bal(G, b)), positive(bal(G, c))]
    };
    let mut premise = f1;
    premise.extend(group("x1", "x2", "x3", "x4"));
    premise.extend(group("x5", "x6", "x7", "x8"));
    let regs = ["x2", "x3", "x4", "x6", "x7", "x8"].map(|x| bal(G, x));
    let phi6 = Formula::forall_many(&xs, Formula::implies(Formula::and_all(premise), pi_sl(m, &regs)));
    vec![phi1, phi2, phi3, phi4, phi5, phi6]
}

/// φ1 ∧ … ∧ φ6 for `m`.
pub fn build_reduction(m: &TwoCounterMachine) -> Formula {
    Formula::and_all(reduction_parts(m))
}

/// Constraints pinning separators to the labels divisible by four and the
/// last program counter to the end of a group. Without them a structure
/// with no separators satisfies the transition rule vacuously.
pub fn grouping_constraints() -> Formula {
    let lab = |x: &str, n: u64| Formula::eq(bal(L, x), Term::Numeral(n));
    let sep = |x: &str| Formula::eq(bal(G, x), Term::Numeral(0));
    Formula::and_all(vec![
        Formula::forall("x", Formula::implies(lab("x", 0), sep("x"))),
        Formula::forall(
            "x",
            Formula::implies(Formula::or_all(vec![lab("x", 1), lab("x", 2), lab("x", 3)]), positive(bal(G, "x"))),
        ),
        Formula::forall_many(
            &["x", "y"],
            Formula::implies(
                Formula::eq(bal(L, "y"), Term::plus(bal(L, "x"), Term::Numeral(4))),
                Formula::and(Formula::implies(sep("x"), sep("y")), Formula::implies(sep("y"), sep("x"))),
            ),
        ),
        Formula::forall(
            "x",
            Formula::implies(Formula::eq(Term::plus(bal(L, "x"), Term::Numeral(3)), Term::bal(L, a1())), sep("x")),
        ),
    ])
}

/// [`build_reduction`] with [`grouping_constraints`]. Witnesses of halting
/// runs still satisfy it.
pub fn build_grouped_reduction(m: &TwoCounterMachine) -> Formula {
    Formula::and(build_reduction(m), grouping_constraints())
}

/// The run laid out as `4 (k + 1)` addresses with labels `0..`, padded
/// with halting configurations when the machine stops before step `k`.
pub fn witness_model(m: &TwoCounterMachine, k: usize) -> Result<SlStructure, MachineError> {
    let mut run = trace(m, k);
    let last = *run.last().expect("trace is never empty");
    if last.pc != m.halt {
        return Err(MachineError::NoHalt(k));
    }
    run.resize(k + 1, last);
    let n = 4 * (k + 1);
    let domain: Vec<AddressId> = (1..=n as AddressId).collect();
    let c = vec![1; n];
    let l: Vec<u64> = (0..n as u64).collect();
    let mut g = Vec::with_capacity(n);
    for cfg in &run {
        g.extend([0, cfg.c1 + 1, cfg.c2 + 1, cfg.pc as u64]);
    }
    let consts = vec![domain[3], domain[n - 1]];
    Ok(SlStructure::new(domain, consts, vec![c, l, g], vec![]).expect("witness values are small"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lia::check_model;
    use crate::parser::print_formula_with;
    use crate::sl::{is_sl_model, well_formed};

    fn two_step() -> TwoCounterMachine {
        parse_machine("1: inc c1 -> 2\n2: halt\n").unwrap()
    }

    #[test]
    fn parse_and_print_roundtrip() {
        let m = parse_machine("# demo\n2: halt\n1: dec c2 -> 1 else 2\n").unwrap();
        assert_eq!(m.to_string(), "1: dec c2 -> 1 else 2\n2: halt\n");
        assert_eq!(parse_machine(&m.to_string()).unwrap(), m);
        assert_eq!(parse_machine("1: inc c1 -> 1\n"), Err(MachineError::HaltCount(0)));
        assert!(matches!(parse_machine("1: inc c1 -> 3\n2: halt"), Err(MachineError::Target(1, 3, 2))));
        assert!(matches!(parse_machine("1: halt\n3: halt"), Err(MachineError::MissingLine(2))));
        assert!(matches!(parse_machine("1: jump 2"), Err(MachineError::Parse { line: 1, .. })));
    }

    #[test]
    fn simulation() {
        assert_eq!(simulate(&parse_machine("1: halt").unwrap(), 10), Outcome::Halts(0));
        assert_eq!(simulate(&two_step(), 10), Outcome::Halts(1));
        let lp = parse_machine("1: inc c1 -> 1\n2: halt").unwrap();
        assert_eq!(simulate(&lp, 1000), Outcome::Running);
        let count = parse_machine("1: inc c1 -> 2\n2: inc c1 -> 3\n3: dec c1 -> 3 else 4\n4: halt").unwrap();
        assert_eq!(simulate(&count, 100), Outcome::Halts(5));
    }

    #[test]
    fn printed_parts() {
        let parts = reduction_parts(&two_step());
        let names = reduction_names();
        assert_eq!(print_formula_with(&parts[2], &names), "l(a0) = 3");
        assert!(print_formula_with(&parts[4], &names).contains("s_c = l(a1) + 1"));
        assert_eq!(print_formula_with(&parts[3], &names), "g(a0) = 1 & g(a1) = 2");
        well_formed(&reduction_vocabulary(), &build_reduction(&two_step())).unwrap();
        well_formed(&reduction_vocabulary(), &build_grouped_reduction(&two_step())).unwrap();
    }

    #[test]
    fn pi_matches_step() {
        let m = parse_machine("1: inc c1 -> 2\n2: dec c1 -> 3 else 4\n3: inc c2 -> 2\n4: halt").unwrap();
        let pi = build_pi(&m);
        let model = |pre: Config, post: Config| {
            let vals = [pre.c1 + 1, pre.c2 + 1, pre.pc as u64, post.c1 + 1, post.c2 + 1, post.pc as u64];
            PI_VARS.iter().zip(vals).map(|(n, v)| (PresVar::Named(n.to_string()), v)).collect()
        };
        for pc in 1..=4 {
            for c1 in 0..=3 {
                for c2 in 0..=3 {
                    let pre = Config { pc, c1, c2 };
                    let expect = step(&m, pre).unwrap_or(pre);
                    for pc2 in 1..=4 {
                        for d1 in 0..=4 {
                            for d2 in 0..=4 {
                                let post = Config { pc: pc2, c1: d1, c2: d2 };
                                assert_eq!(check_model(&pi, &model(pre, post)).unwrap(), post == expect);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn witnesses_satisfy_the_reduction() {
        for (src, k, size) in [("1: halt", 0, 4), ("1: inc c1 -> 2\n2: halt", 1, 8), ("1: halt", 1, 8)] {
            let m = parse_machine(src).unwrap();
            let w = witness_model(&m, k).unwrap();
            assert_eq!(w.domain().len(), size);
            assert!(is_sl_model(&w, &build_reduction(&m)).unwrap(), "{src}");
            assert!(is_sl_model(&w, &build_grouped_reduction(&m)).unwrap(), "{src}");
        }
        let lp = parse_machine("1: inc c1 -> 1\n2: halt").unwrap();
        assert_eq!(witness_model(&lp, 5), Err(MachineError::NoHalt(5)));
        // too few steps for the two-step machine
        assert_eq!(witness_model(&two_step(), 0), Err(MachineError::NoHalt(0)));
    }
}
