//! Text syntax for sum-logic formulas and problem files.
//!
//! ```text
//! # comment
//! vocab l=1 m=1 d=0
//! assert forall x. !(x = a1) -> b1(x) = 0
//! ```
//!
//! Binding strength, tightest first: `!`, `&`, `|`, `->` (right associative).
//! The body of `forall x.` extends as far right as possible.

use std::fmt;

use thiserror::Error;

use crate::sl::{Formula, SlStructure, Sort, Term, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {}, column {}: {message}", span.line, span.col)]
pub struct ParseError {
    pub message: String,
    pub span: Span,
}

impl ParseError {
    fn new(message: impl Into<String>, span: Span) -> Self {
        ParseError { message: message.into(), span }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    Dot,
    Eq,
    Leq,
    Plus,
    Bang,
    Amp,
    Bar,
    Arrow,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Leq => f.write_str("`<=`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str, base: usize, line: usize, col0: usize) -> Result<Vec<(Tok, Span)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = line;
    let mut line_start: isize = -(col0 as isize - 1);
    let span = |s: usize, e: usize, line: usize, ls: isize| Span {
        start: base + s,
        end: base + e,
        line,
        col: (s as isize - ls) as usize + 1,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            line_start = i as isize;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'.' => Tok::Dot,
            b'=' => Tok::Eq,
            b'+' => Tok::Plus,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'<' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Leq
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'0'..=b'9' => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..=i];
                let n = digits.parse::<u64>().map_err(|_| {
                    ParseError::new(format!("numeral `{digits}` is too large"), span(start, i + 1, line, line_start))
                })?;
                Tok::Num(n)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_' || bytes[i + 1] == b'\'')
                {
                    i += 1;
                }
                Tok::Ident(text[start..=i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(
                    format!("unexpected character `{ch}`"),
                    span(start, start + ch.len_utf8(), line, line_start),
                ));
            }
        };
        i += 1;
        out.push((tok, span(start, i, line, line_start)));
    }
    out.push((Tok::End, span(bytes.len(), bytes.len(), line, line_start)));
    Ok(out)
}

/// Symbol classes recognised by name.
enum Symbol {
    Addr(usize),
    Nat(usize),
    Sum(usize),
    Bal(usize),
    Var,
}

fn classify(name: &str) -> Symbol {
    let (head, rest) = name.split_at(1);
    let index = if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) && !rest.starts_with('0') {
        rest.parse::<usize>().ok()
    } else {
        None
    };
    match (head, index) {
        ("a", Some(i)) => Symbol::Addr(i),
        ("c", Some(i)) => Symbol::Nat(i),
        ("s", Some(i)) => Symbol::Sum(i),
        ("b", Some(i)) => Symbol::Bal(i),
        _ => Symbol::Var,
    }
}

struct Parser<'v> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    vocab: &'v Vocabulary,
    bound: Vec<String>,
    quantifiers: Vec<Span>,
    /// Furthest error seen during backtracking.
    best: Option<ParseError>,
}

impl<'v> Parser<'v> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Span, ParseError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(ParseError::new(format!("expected {want}, found {}", self.peek()), self.span()))
        }
    }

    fn note(&mut self, e: ParseError) -> ParseError {
        match &self.best {
            Some(b) if b.span.start >= e.span.start => b.clone(),
            _ => {
                self.best = Some(e.clone());
                e
            }
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "forall" => {
                let (_, kw_span) = self.bump();
                let (tok, sp) = self.bump();
                let x = match tok {
                    Tok::Ident(x) if matches!(classify(&x), Symbol::Var) && x != "forall" => x,
                    other => {
                        return Err(ParseError::new(format!("expected a variable after `forall`, found {other}"), sp))
                    }
                };
                self.expect(Tok::Dot)?;
                self.quantifiers.push(Span { end: sp.end, ..kw_span });
                self.bound.push(x.clone());
                let body = self.implication();
                self.bound.pop();
                Ok(Formula::forall(&x, body?))
            }
            Tok::LParen => {
                let save = self.pos;
                let nq = self.quantifiers.len();
                match self.atom() {
                    Ok(f) => Ok(f),
                    Err(e) => {
                        let e = self.note(e);
                        self.pos = save;
                        self.quantifiers.truncate(nq);
                        self.bump();
                        let f = self.implication().map_err(|e2| self.note(e2))?;
                        self.expect(Tok::RParen).map_err(|e2| {
                            let e2 = self.note(e2);
                            if e.span.start > e2.span.start {
                                e.clone()
                            } else {
                                e2
                            }
                        })?;
                        Ok(f)
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let start = self.span();
        let (lhs, ls) = self.term()?;
        let (op, op_span) = self.bump();
        match op {
            Tok::Eq => {
                let (rhs, rs) = self.term()?;
                if ls != rs {
                    let span = Span { end: self.toks[self.pos.saturating_sub(1)].1.end, ..start };
                    return Err(ParseError::new("equality between an address and a nat", span));
                }
                Ok(Formula::eq(lhs, rhs))
            }
            Tok::Leq => {
                if !self.vocab.leq {
                    return Err(ParseError::new("`<=` is not in the vocabulary", op_span));
                }
                let rspan = self.span();
                let (rhs, rs) = self.term()?;
                if ls != Sort::Nat {
                    return Err(ParseError::new("`<=` needs nat operands", start));
                }
                if rs != Sort::Nat {
                    return Err(ParseError::new("`<=` needs nat operands", rspan));
                }
                Ok(Formula::leq(lhs, rhs))
            }
            other => Err(ParseError::new(format!("expected `=` or `<=`, found {other}"), op_span)),
        }
    }

    fn term(&mut self) -> Result<(Term, Sort), ParseError> {
        let first_span = self.span();
        let (mut t, mut s) = self.primary()?;
        while *self.peek() == Tok::Plus {
            let (_, plus_span) = self.bump();
            if !self.vocab.plus {
                return Err(ParseError::new("`+` is not in the vocabulary", plus_span));
            }
            if s != Sort::Nat {
                return Err(ParseError::new("`+` needs nat operands", first_span));
            }
            let rspan = self.span();
            let (r, rs) = self.primary()?;
            if rs != Sort::Nat {
                return Err(ParseError::new("`+` needs nat operands", rspan));
            }
            t = Term::plus(t, r);
            s = Sort::Nat;
        }
        Ok((t, s))
    }

    fn primary(&mut self) -> Result<(Term, Sort), ParseError> {
        let (tok, sp) = self.bump();
        let v = self.vocab;
        let range = |what: &str, i: usize, max: usize| {
            if i == 0 || i > max {
                Err(ParseError::new(format!("{what}{i} is out of range (vocabulary has {max})"), sp))
            } else {
                Ok(())
            }
        };
        match tok {
            Tok::Num(n) => Ok((Term::Numeral(n), Sort::Nat)),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) if name == "forall" => Err(ParseError::new("unexpected `forall` in a term", sp)),
            Tok::Ident(name) => match classify(&name) {
                Symbol::Addr(i) => {
                    range("a", i, v.l)?;
                    Ok((Term::AddressConst(i), Sort::Address))
                }
                Symbol::Nat(k) => {
                    range("c", k, v.d)?;
                    Ok((Term::NatConst(k), Sort::Nat))
                }
                Symbol::Sum(j) => {
                    range("s", j, v.m)?;
                    Ok((Term::SumConst(j), Sort::Nat))
                }
                Symbol::Bal(j) => {
                    range("b", j, v.m)?;
                    self.expect(Tok::LParen)?;
                    let arg_span = self.span();
                    let (arg, s) = self.term()?;
                    if s != Sort::Address {
                        return Err(ParseError::new(format!("argument of b{j} must be an address"), arg_span));
                    }
                    self.expect(Tok::RParen)?;
                    Ok((Term::bal(j, arg), Sort::Nat))
                }
                Symbol::Var => {
                    if !self.bound.contains(&name) {
                        return Err(ParseError::new(format!("unknown symbol `{name}`"), sp));
                    }
                    Ok((Term::AddressVar(name), Sort::Address))
                }
            },
            other => Err(ParseError::new(format!("expected a term, found {other}"), sp)),
        }
    }
}

/// Pre-order walk matching quantifiers (in textual order) to their polarity.
fn check_polarity(f: &Formula, positive: bool, spans: &[Span], next: &mut usize) -> Result<(), ParseError> {
    match f {
        Formula::Eq(..) | Formula::Leq(..) => Ok(()),
        Formula::Not(g) => check_polarity(g, !positive, spans, next),
        Formula::And(a, b) | Formula::Or(a, b) => {
            check_polarity(a, positive, spans, next)?;
            check_polarity(b, positive, spans, next)
        }
        Formula::Implies(a, b) => {
            check_polarity(a, !positive, spans, next)?;
            check_polarity(b, positive, spans, next)
        }
        Formula::ForallAddress(x, g) => {
            let sp = spans.get(*next).copied().unwrap_or_default();
            *next += 1;
            if !positive {
                return Err(ParseError::new(
                    format!("quantifier over `{x}` occurs under negation; only universal sentences are supported"),
                    sp,
                ));
            }
            check_polarity(g, positive, spans, next)
        }
    }
}

fn parse_at(text: &str, v: &Vocabulary, base: usize, line: usize, col: usize) -> Result<Formula, ParseError> {
    let toks = lex(text, base, line, col)?;
    let mut p = Parser { toks, pos: 0, vocab: v, bound: Vec::new(), quantifiers: Vec::new(), best: None };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        let msg = format!("unexpected {} after formula", p.peek());
        return Err(ParseError::new(msg, p.span()));
    }
    check_polarity(&f, true, &p.quantifiers, &mut 0)?;
    Ok(f)
}

/// Parses a closed universal formula over `v`.
pub fn parse_formula(text: &str, v: &Vocabulary) -> Result<Formula, ParseError> {
    parse_at(text, v, 0, 1, 1)
}

/// Parses `vocab l=<n> m=<n> d=<n> [+] [<=]`.
pub fn parse_vocabulary(text: &str) -> Result<Vocabulary, ParseError> {
    parse_vocab_line(text, 0, 1)
}

fn parse_vocab_line(text: &str, base: usize, line: usize) -> Result<Vocabulary, ParseError> {
    let mut v = Vocabulary::new(0, 0, 0);
    let mut seen = [false; 3];
    let mut words = Vec::new();
    let mut idx = 0;
    for w in text.split_whitespace() {
        let start = text[idx..].find(w).map(|o| o + idx).unwrap_or(idx);
        idx = start + w.len();
        words.push((w, Span { start: base + start, end: base + idx, line, col: start + 1 }));
    }
    let mut it = words.into_iter();
    match it.next() {
        Some(("vocab", _)) => {}
        Some((w, sp)) => return Err(ParseError::new(format!("expected `vocab`, found `{w}`"), sp)),
        None => return Err(ParseError::new("empty vocabulary line", Span { start: base, end: base, line, col: 1 })),
    }
    for (w, sp) in it {
        match w {
            "+" => v.plus = true,
            "<=" => v.leq = true,
            _ => {
                let (key, val) =
                    w.split_once('=').ok_or_else(|| ParseError::new(format!("unexpected `{w}` in vocabulary"), sp))?;
                let n: usize = val.parse().map_err(|_| ParseError::new(format!("bad count `{val}`"), sp))?;
                let slot = match key {
                    "l" => 0,
                    "m" => 1,
                    "d" => 2,
                    _ => return Err(ParseError::new(format!("unknown vocabulary key `{key}`"), sp)),
                };
                seen[slot] = true;
                match slot {
                    0 => v.l = n,
                    1 => v.m = n,
                    _ => v.d = n,
                }
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        let key = ["l", "m", "d"][missing];
        return Err(ParseError::new(
            format!("vocabulary is missing `{key}=`"),
            Span { start: base, end: base + text.len(), line, col: 1 },
        ));
    }
    Ok(v)
}

/// A vocabulary header followed by assertions, read as their conjunction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub vocab: Vocabulary,
    pub assertions: Vec<Formula>,
}

impl Problem {
    /// Conjunction of all assertions; `None` when there are none.
    pub fn conjunction(&self) -> Option<Formula> {
        if self.assertions.is_empty() {
            None
        } else {
            Some(Formula::and_all(self.assertions.clone()))
        }
    }
}

/// Parses a problem file. Lines that start with neither `vocab` nor `assert`
/// continue the previous assertion.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut vocab: Option<Vocabulary> = None;
    // (text, byte offset, line, column) of each assertion chunk
    let mut chunks: Vec<(String, usize, usize, usize)> = Vec::new();
    let mut offset = 0;
    for (n, raw) in text.split_inclusive('\n').enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim_end_matches(['\n', '\r']);
        let trimmed = line.trim_start();
        let indent = line.len() - trimmed.len();
        if trimmed.trim().is_empty() {
            offset += raw.len();
            continue;
        }
        if trimmed.split_whitespace().next() == Some("vocab") {
            if vocab.is_some() {
                return Err(ParseError::new(
                    "duplicate `vocab` line",
                    Span { start: offset, end: offset + line.len(), line: line_no, col: 1 },
                ));
            }
            vocab = Some(parse_vocab_line(line, offset, line_no)?);
        } else if let Some(rest) = trimmed.strip_prefix("assert") {
            let col = indent + 7;
            chunks.push((rest.to_string(), offset + col - 1, line_no, col));
        } else if let Some(last) = chunks.last_mut() {
            last.0.push('\n');
            last.0.push_str(line);
        } else {
            return Err(ParseError::new(
                format!("expected `vocab` or `assert`, found `{}`", trimmed.split_whitespace().next().unwrap_or("")),
                Span { start: offset + indent, end: offset + line.len(), line: line_no, col: indent + 1 },
            ));
        }
        offset += raw.len();
    }
    let vocab =
        vocab.ok_or_else(|| ParseError::new("missing `vocab` line", Span { start: 0, end: 0, line: 1, col: 1 }))?;
    let mut assertions = Vec::new();
    for (body, base, line, col) in chunks {
        assertions.push(parse_at(&body, &vocab, base, line, col)?);
    }
    Ok(Problem { vocab, assertions })
}

/// Display names used by the printer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Names {
    pub balances: Vec<String>,
    pub sums: Vec<String>,
    /// Printed index of the first address constant.
    pub address_base: usize,
}

impl Default for Names {
    fn default() -> Self {
        Names { balances: Vec::new(), sums: Vec::new(), address_base: 1 }
    }
}

impl Names {
    fn balance(&self, j: usize) -> String {
        self.balances.get(j.wrapping_sub(1)).cloned().unwrap_or_else(|| format!("b{j}"))
    }

    fn sum(&self, j: usize) -> String {
        self.sums.get(j.wrapping_sub(1)).cloned().unwrap_or_else(|| format!("s{j}"))
    }
}

pub fn print_term(t: &Term) -> String {
    print_term_with(t, &Names::default())
}

pub fn print_term_with(t: &Term, names: &Names) -> String {
    match t {
        Term::AddressConst(i) => format!("a{}", i + names.address_base - 1),
        Term::AddressVar(x) => x.clone(),
        Term::Numeral(n) => n.to_string(),
        Term::NatConst(k) => format!("c{k}"),
        Term::SumConst(j) => names.sum(*j),
        Term::Balance(j, a) => format!("{}({})", names.balance(*j), print_term_with(a, names)),
        Term::Plus(a, b) => {
            let rhs = print_term_with(b, names);
            if matches!(**b, Term::Plus(..)) {
                format!("{} + ({rhs})", print_term_with(a, names))
            } else {
                format!("{} + {rhs}", print_term_with(a, names))
            }
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    print_formula_with(f, &Names::default())
}

pub fn print_formula_with(f: &Formula, names: &Names) -> String {
    let mut out = String::new();
    emit(f, 0, true, names, &mut out);
    out
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) => 4,
        Formula::Eq(..) | Formula::Leq(..) => 5,
        Formula::ForallAddress(..) => 0,
    }
}

/// `ctx` is the minimum binding strength the position accepts; `last` tells
/// whether nothing follows this subformula up to the enclosing parenthesis.
fn emit(f: &Formula, ctx: u8, last: bool, names: &Names, out: &mut String) {
    let wrap = match f {
        Formula::ForallAddress(..) => !last,
        _ => prec(f) < ctx,
    };
    if wrap {
        out.push('(');
        emit(f, 0, true, names, out);
        out.push(')');
        return;
    }
    match f {
        Formula::Eq(a, b) => {
            out.push_str(&print_term_with(a, names));
            out.push_str(" = ");
            out.push_str(&print_term_with(b, names));
        }
        Formula::Leq(a, b) => {
            out.push_str(&print_term_with(a, names));
            out.push_str(" <= ");
            out.push_str(&print_term_with(b, names));
        }
        Formula::Not(g) => {
            out.push('!');
            if matches!(**g, Formula::Eq(..) | Formula::Leq(..)) {
                out.push('(');
                emit(g, 0, true, names, out);
                out.push(')');
            } else {
                emit(g, 4, last, names, out);
            }
        }
        Formula::And(a, b) => {
            emit(a, 3, false, names, out);
            out.push_str(" & ");
            emit(b, 4, last, names, out);
        }
        Formula::Or(a, b) => {
            emit(a, 2, false, names, out);
            out.push_str(" | ");
            emit(b, 3, last, names, out);
        }
        Formula::Implies(a, b) => {
            emit(a, 2, false, names, out);
            out.push_str(" -> ");
            emit(b, 1, last, names, out);
        }
        Formula::ForallAddress(x, g) => {
            out.push_str("forall ");
            out.push_str(x);
            out.push_str(". ");
            emit(g, 0, true, names, out);
        }
    }
}

/// Multi-line table of a structure: domain, constants, one row per balance
/// function with its sum, nat constants.
pub fn print_structure(s: &SlStructure, names: &Names) -> String {
    let ids: Vec<String> = s.domain().iter().map(|a| a.to_string()).collect();
    let width = ids.iter().map(String::len).max().unwrap_or(1);
    let row = |vals: Vec<String>| vals.iter().map(|v| format!("{v:>width$}")).collect::<Vec<_>>().join(" ");
    let mut out = format!("domain: {}\n", row(ids.clone()));
    if !s.addr_consts().is_empty() {
        let consts: Vec<String> =
            s.addr_consts().iter().enumerate().map(|(i, a)| format!("a{} = {a}", i + names.address_base)).collect();
        out.push_str(&consts.join(", "));
        out.push('\n');
    }
    for j in 1..=s.num_balances() {
        let vals = s.balance_table(j).unwrap_or(&[]).iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("{}: {}  ({} = {})\n", names.balance(j), row(vals), names.sum(j), s.sums()[j - 1]));
    }
    for (k, c) in s.nat_consts().iter().enumerate() {
        out.push_str(&format!("c{} = {c}\n", k + 1));
    }
    out
}

/// Problem file text: vocabulary header plus one `assert` line per formula.
pub fn print_problem(v: &Vocabulary, assertions: &[Formula]) -> String {
    let mut out = format!("vocab l={} m={} d={}", v.l, v.m, v.d);
    if v.plus {
        out.push_str(" +");
    }
    if v.leq {
        out.push_str(" <=");
    }
    out.push('\n');
    for f in assertions {
        out.push_str("assert ");
        out.push_str(&print_formula(f));
        out.push('\n');
    }
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frag() -> Vocabulary {
        Vocabulary::new(1, 2, 1)
    }

    #[test]
    fn parses_guarded_universal() {
        let f = parse_formula("forall x. !(x = a1) -> b2(x) = b1(x)", &frag()).unwrap();
        let expect = Formula::forall(
            "x",
            Formula::implies(
                Formula::not(Formula::eq(Term::var("x"), Term::AddressConst(1))),
                Formula::eq(Term::bal(2, Term::var("x")), Term::bal(1, Term::var("x"))),
            ),
        );
        assert_eq!(f, expect);
        assert_eq!(print_formula(&f), "forall x. !(x = a1) -> b2(x) = b1(x)");
    }

    #[test]
    fn plus_rejected_with_span() {
        let v = Vocabulary::new(1, 1, 0);
        let e = parse_formula("b1(a1) + 1 = s1", &v).unwrap_err();
        assert_eq!(e.span.col, 8);
        assert!(e.message.contains('+'));
    }

    #[test]
    fn quantifier_scope_and_parens() {
        let v = Vocabulary::new(1, 1, 0);
        let f = Formula::and(
            Formula::forall("x", Formula::eq(Term::bal(1, Term::var("x")), Term::Numeral(0))),
            Formula::eq(Term::SumConst(1), Term::Numeral(0)),
        );
        let text = print_formula(&f);
        assert_eq!(text, "(forall x. b1(x) = 0) & s1 = 0");
        assert_eq!(parse_formula(&text, &v).unwrap(), f);
    }

    #[test]
    fn parenthesised_terms_and_formulas() {
        let v = Vocabulary::new(1, 1, 1).with_plus();
        let f = parse_formula("(b1(a1) + 1) = s1 & (s1 = c1 | c1 = 0)", &v).unwrap();
        assert_eq!(print_formula(&f), "b1(a1) + 1 = s1 & (s1 = c1 | c1 = 0)");
    }

    #[test]
    fn negated_quantifier_rejected() {
        let e = parse_formula("!forall x. b1(x) = 0", &Vocabulary::new(0, 1, 0)).unwrap_err();
        assert!(e.message.contains("negation"));
        assert_eq!(e.span.col, 2);
    }

    #[test]
    fn problem_file() {
        let p = parse_problem("# demo\nvocab l=1 m=1 d=0\nassert forall x.\n  b1(x) = 1\nassert s1 = 2\n").unwrap();
        assert_eq!(p.vocab, Vocabulary::new(1, 1, 0));
        assert_eq!(p.assertions.len(), 2);
        let e = parse_problem("vocab l=1 m=1 d=0\nassert s2 = 0\n").unwrap_err();
        assert_eq!((e.span.line, e.span.col), (2, 8));
    }
}
