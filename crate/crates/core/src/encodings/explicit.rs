//! `int`, `nat` and `id` scripts.

use super::{EncodingError, EncodingKind, SmtScript, Surjectivity, TransitionSpec, VariantFlags};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Amount {
    K(u64),
    N,
}

/// One balance change: `gain` means `new = old + amount`, otherwise
/// `old = new + amount`.
#[derive(Clone, Debug)]
pub(crate) struct Change {
    addr: String,
    gain: bool,
    amount: Amount,
}

#[derive(Clone, Debug)]
pub(crate) struct Effect {
    label: String,
    changes: Vec<Change>,
    /// `None` when the sum is unchanged.
    sum: Option<(bool, Amount)>,
    single: bool,
}

impl Effect {
    pub(crate) fn of(t: &TransitionSpec) -> Result<Effect, EncodingError> {
        let gain = |a: &str, amount| Change { addr: a.to_string(), gain: true, amount };
        let loss = |a: &str, amount| Change { addr: a.to_string(), gain: false, amount };
        let distinct = |a: &str, b: &str| {
            if a == b {
                Err(EncodingError::InvalidTransition("transfer needs two different addresses".into()))
            } else {
                Ok(())
            }
        };
        Ok(match t {
            TransitionSpec::Mint1 { receiver } => Effect {
                label: "mint1".into(),
                changes: vec![gain(receiver, Amount::K(1))],
                sum: Some((true, Amount::K(1))),
                single: true,
            },
            TransitionSpec::MintN { receiver } => Effect {
                label: "mintn".into(),
                changes: vec![gain(receiver, Amount::N)],
                sum: Some((true, Amount::N)),
                single: true,
            },
            TransitionSpec::Transfer1 { from, to } => {
                distinct(from, to)?;
                Effect {
                    label: "transfer1".into(),
                    changes: vec![loss(from, Amount::K(1)), gain(to, Amount::K(1))],
                    sum: None,
                    single: false,
                }
            }
            TransitionSpec::TransferN { from, to } => {
                distinct(from, to)?;
                Effect {
                    label: "transfern".into(),
                    changes: vec![loss(from, Amount::N), gain(to, Amount::N)],
                    sum: None,
                    single: false,
                }
            }
            TransitionSpec::Deltas { deltas, expected_sum_delta, allow_mismatch } => {
                if deltas.is_empty() {
                    return Err(EncodingError::InvalidTransition("no deltas".into()));
                }
                for (i, (a, _)) in deltas.iter().enumerate() {
                    if deltas[..i].iter().any(|(b, _)| a == b) {
                        return Err(EncodingError::InvalidTransition(format!("address `{a}` changes twice")));
                    }
                }
                let total: i64 = deltas.iter().map(|(_, d)| d).sum();
                if total != *expected_sum_delta && !allow_mismatch {
                    return Err(EncodingError::InvalidTransition(format!(
                        "deltas add up to {total}, not {expected_sum_delta}"
                    )));
                }
                let label = deltas
                    .iter()
                    .map(|(_, d)| format!("{}{}", if *d < 0 { "minus" } else { "plus" }, d.unsigned_abs()))
                    .collect::<Vec<_>>()
                    .join(" ");
                let changes = deltas
                    .iter()
                    .map(|(a, d)| Change { addr: a.clone(), gain: *d >= 0, amount: Amount::K(d.unsigned_abs()) })
                    .collect();
                let sum = (*expected_sum_delta != 0)
                    .then(|| (*expected_sum_delta > 0, Amount::K(expected_sum_delta.unsigned_abs())));
                Effect { label, changes, sum, single: false }
            }
        })
    }

    fn symbolic(&self) -> bool {
        self.changes.iter().any(|c| c.amount == Amount::N)
    }

    fn addresses(&self) -> Vec<&str> {
        self.changes.iter().map(|c| c.addr.as_str()).collect()
    }
}

/// Arithmetic vocabulary: built-in integers or axiomatised naturals.
#[derive(Clone, Copy)]
struct Ar {
    kind: EncodingKind,
}

impl Ar {
    fn nat(self) -> bool {
        self.kind != EncodingKind::Int
    }

    fn sort(self) -> &'static str {
        if self.nat() {
            "Nat"
        } else {
            "Int"
        }
    }

    fn pos(self, x: &str) -> String {
        if self.nat() {
            format!("(distinct {x} zero)")
        } else {
            format!("(< 0 {x})")
        }
    }

    fn le(self, a: &str, b: &str) -> String {
        if self.nat() {
            format!("(leq {a} {b})")
        } else {
            format!("(<= {a} {b})")
        }
    }

    fn add(self, x: &str, amount: Amount) -> String {
        match (amount, self.nat()) {
            (Amount::K(0), _) => x.to_string(),
            (Amount::K(k), false) => format!("(+ {x} {k})"),
            (Amount::K(k), true) => {
                let mut s = x.to_string();
                for _ in 0..k {
                    s = format!("(s {s})");
                }
                s
            }
            (Amount::N, false) => format!("(+ {x} n)"),
            (Amount::N, true) => format!("(plus {x} n)"),
        }
    }

    /// `ind` witnesses keep the compact `(+(x) k)` spacing.
    fn add_tight(self, x: &str, k: u64) -> String {
        if k == 0 || self.nat() {
            self.add(x, Amount::K(k))
        } else {
            format!("(+{x} {k})")
        }
    }

    /// Coin `c` is owned by `a` in state `st`.
    fn owned(self, c: &str, a: &str, st: &str) -> String {
        self.owned_with(c, a, st, "")
    }

    /// Same, with `pad` before the closing parenthesis of the comparison.
    fn owned_with(self, c: &str, a: &str, st: &str, pad: &str) -> String {
        let op = if self.nat() { "leq" } else { "<=" };
        let le = format!("({op} (ind {c} {a}) ({st}-bal {a}){pad})");
        if self.kind == EncodingKind::Id {
            format!("(and (distinct {c} null) {le})")
        } else {
            le
        }
    }

    fn counted(self, c: &str, st: &str) -> String {
        let le = self.le(&format!("(count {c})"), &format!("{st}-sum"));
        if self.kind == EncodingKind::Id {
            format!("(and (distinct {c} null) {le})")
        } else {
            le
        }
    }
}

fn logic(kind: EncodingKind) -> &'static str {
    match kind {
        EncodingKind::Int => "UFLIA",
        EncodingKind::Nat => "UF",
        _ => "ALL",
    }
}

fn declarations(sc: &mut SmtScript, ar: Ar, eff: &Effect, total: bool) {
    let t = ar.sort();
    if ar.kind == EncodingKind::Id {
        sc.line("(declare-datatypes ((Coin 0)) (((null) (cnext (cprev Coin)))))");
    } else {
        sc.line("(declare-sort Coin 0 )");
    }
    sc.line("(declare-sort Address 0)");
    if ar.nat() {
        sc.lines_from([
            "(declare-sort Nat 0)",
            "(declare-fun zero () Nat)",
            "(declare-fun s (Nat) Nat)",
            "(declare-fun plus (Nat Nat) Nat)",
            "(declare-fun leq (Nat Nat) Bool)",
        ]);
    }
    sc.line(format!("(declare-fun old-sum () {t})"));
    sc.line(format!("(declare-fun new-sum () {t})"));
    if total {
        sc.line(format!("(declare-fun old-total () {t})"));
        sc.line(format!("(declare-fun new-total () {t})"));
    }
    if eff.symbolic() {
        sc.line(format!("(declare-fun n () {t})"));
    }
    for a in eff.addresses() {
        sc.line(format!("(declare-fun {a} () Address)"));
    }
    sc.line(format!("(declare-fun old-bal (Address) {t})"));
    sc.line(format!("(declare-fun new-bal (Address) {t})"));
    sc.line(format!("(declare-fun count (Coin) {t})"));
    sc.line(format!("(declare-fun ind (Coin Address) {t})"));
    if ar.kind == EncodingKind::Id {
        sc.line("(declare-fun inext (Address Coin) Coin)");
    }
    sc.blank();
}

/// Axioms of the naturals that the scripts rely on; all true in the
/// standard model.
fn nat_axioms(sc: &mut SmtScript) {
    sc.lines_from([
        ";###  axioms on Nat  ###",
        ";#zero is no successor",
        "(assert (forall ((X Nat)) (distinct (s X) zero) ))",
        ";#successor injective",
        "(assert (forall ((X Nat) (Y Nat))",
        "  (=> (= (s X) (s Y)) (= X Y) )))",
        ";#every non-zero is a successor",
        "(assert (forall ((X Nat))",
        "  (or (= X zero) (exists ((Y Nat)) (= X (s Y)) ))))",
        ";#plus",
        "(assert (forall ((X Nat)) (= (plus X zero) X) ))",
        "(assert (forall ((X Nat) (Y Nat)) (= (plus X (s Y)) (s (plus X Y)) )))",
        ";#leq",
        "(assert (forall ((X Nat) (Y Nat))",
        "  (= (leq X Y) (exists ((Z Nat)) (= (plus X Z) Y) ))))",
        "(assert (forall ((X Nat)) (leq zero X) ))",
        "(assert (forall ((X Nat) (Y Nat)) (or (leq X Y) (leq Y X)) ))",
        "(assert (forall ((X Nat) (Y Nat))",
        "  (=> (and (leq X Y) (leq Y X)) (= X Y) )))",
        "(assert (forall ((X Nat) (Y Nat))",
        "  (= (leq (s X) Y) (and (leq X Y) (distinct X Y)) )))",
        "(assert (forall ((X Nat)) (not (leq (s X) X)) ))",
        "",
    ]);
}

fn list_axioms(sc: &mut SmtScript) {
    sc.lines_from([
        ";###  coin lists  ###",
        ";#count is the position in the list of all coins",
        "(assert (= (count null) zero))",
        "(assert (forall ((C Coin)) (= (count (cnext C)) (s (count C))) ))",
        ";#ind(A,.) is the position in the list of A",
        "(assert (forall ((A Address)) (= (ind null A) zero) ))",
        "(assert (forall ((A Address) (C Coin)) (= (ind (inext A C) A) (s (ind C A))) ))",
        ";#every coin but null has a predecessor in each list",
        "(assert (forall ((A Address) (C Coin))",
        "  (=> (distinct C null) (exists ((D Coin)) (= (inext A D) C) ))))",
        "",
    ]);
}

/// Surjectivity assertions, without section headers.
pub(crate) fn surjectivity(kind: EncodingKind, eff: &Effect, v: VariantFlags) -> Vec<String> {
    let mut out = count_surjectivity(Ar { kind }, eff, v);
    out.extend(ind_surjectivity(Ar { kind }, eff, v));
    out
}

/// Symbolic amounts always get full intervals: partial ranges admit models
/// where the sums drift apart.
fn effective(eff: &Effect, v: VariantFlags) -> Surjectivity {
    if eff.symbolic() {
        Surjectivity::FullIntervals
    } else {
        v.surjectivity
    }
}

fn count_surjectivity(ar: Ar, eff: &Effect, v: VariantFlags) -> Vec<String> {
    let mut out = Vec::new();
    let exists = |rhs: &str| format!("(assert (exists ((C Coin)) (= (count C) {rhs}) ))");
    if ar.kind == EncodingKind::Id {
        out.push(";#count surjective".into());
        out.push(exists("old-sum"));
        out.push(exists("new-sum"));
        return out;
    }
    match effective(eff, v) {
        Surjectivity::FullIntervals => {
            let t = ar.sort();
            out.push(";#count surjective".into());
            out.push(format!("(assert (forall ((N {t}))"));
            out.push(" (=>".into());
            out.push(format!("  (and {} (or {} {}) )", ar.pos("N"), ar.le("N", "old-sum"), ar.le("N", "new-sum")));
            out.push("  (exists ((C Coin)) (= (count C) N) ))))".into());
        }
        Surjectivity::RelevantInstances => {
            out.push(";#count instances of surjectivity".into());
            match eff.sum {
                Some((up, Amount::K(k))) => {
                    let (base, other) = if up { ("old-sum", "new-sum") } else { ("new-sum", "old-sum") };
                    for i in 0..=k {
                        out.push(exists(&ar.add(base, Amount::K(i))));
                    }
                    out.push(exists(other));
                }
                Some((_, Amount::N)) => unreachable!("symbolic amounts use full intervals"),
                None => {
                    out.push(exists("old-sum"));
                    out.push(exists("new-sum"));
                }
            }
        }
    }
    out
}

fn ind_surjectivity(ar: Ar, eff: &Effect, v: VariantFlags) -> Vec<String> {
    let mut out = Vec::new();
    if ar.kind == EncodingKind::Id {
        out.push(";#ind(A,.) surjective".into());
        for st in ["old", "new"] {
            out.push(format!("(assert (forall ((A Address)) (exists ((C Coin)) (= (ind C A) ({st}-bal A)) )))"));
        }
        return out;
    }
    match effective(eff, v) {
        Surjectivity::FullIntervals => {
            let t = ar.sort();
            out.push(";#ind(A,.) surjective".into());
            out.push(format!("(assert (forall ((N {t}) (A Address))"));
            out.push(format!(
                " (=> (and {} (or {} {}))",
                ar.pos("N"),
                ar.le("N", "(new-bal A)"),
                ar.le("N", "(old-bal A)")
            ));
            out.push("  (exists ((C Coin)) (= (ind C A) N) ))))".into());
        }
        Surjectivity::RelevantInstances => {
            out.push(";#ind(A,.) instances of surjectivity".into());
            for ch in &eff.changes {
                let a = &ch.addr;
                let base = if ch.gain { format!("(old-bal {a})") } else { format!("(new-bal {a})") };
                match ch.amount {
                    Amount::K(k) => {
                        for i in 0..=k {
                            let rhs = ar.add_tight(&base, i);
                            if i == 0 {
                                out.push(format!("(assert (exists ((C Coin)) (= (ind C {a}) {rhs}) ))"));
                            } else {
                                out.push(format!("(assert (exists ((C Coin)) (= (ind C {a}) {rhs})))"));
                            }
                        }
                    }
                    Amount::N => unreachable!("symbolic amounts use full intervals"),
                }
            }
        }
    }
    out
}

fn axioms(sc: &mut SmtScript, ar: Ar, eff: &Effect, v: VariantFlags) {
    let int = ar.kind == EncodingKind::Int;
    sc.line(";###  axioms on sum and count  ###");
    if int {
        sc.lines_from([";#sum non-negative", "(assert (<= 0 old-sum))", "(assert (<= 0 new-sum))"]);
        if eff.symbolic() {
            sc.lines_from([";#n non-negative", "(assert (<= 0 n))"]);
        }
    }
    sc.line(";#count positive");
    if ar.kind == EncodingKind::Id {
        sc.line("(assert (forall ((C Coin)) (=> (distinct C null) (distinct (count C) zero)) ) )");
    } else {
        sc.line(format!("(assert (forall ((C Coin)) {} ) )", ar.pos("(count C)")));
    }
    sc.lines_from([
        ";#count injective",
        "(assert (forall ((C Coin) (D Coin))",
        " (=> (= (count C) (count D)) (= C D) )))",
    ]);
    sc.lines_from(count_surjectivity(ar, eff, v));
    sc.blank();

    sc.line(";####  axioms on bal and ind ###");
    if int {
        sc.lines_from([
            ";#bal non-negative",
            "(assert (forall ((A Address)) (<= 0 (old-bal A)) ))",
            "(assert (forall ((A Address)) (<= 0 (new-bal A)) ))",
        ]);
    }
    sc.line(";#ind positive");
    if ar.kind == EncodingKind::Id {
        sc.line("(assert (forall ((C Coin)(A Address)) (=> (distinct C null) (distinct (ind C A) zero)) ))");
    } else {
        sc.line(format!("(assert (forall ((C Coin)(A Address)) {} ))", ar.pos("(ind C A)")));
    }
    sc.lines_from([
        ";#ind(A,.) injective",
        "(assert (forall ((C Coin) (D Coin) (A Address))",
        " (=> (= (ind C A) (ind D A)) (= C D) )))",
    ]);
    sc.lines_from(ind_surjectivity(ar, eff, v));
    sc.blank();

    sc.line(";###  axioms between sum and bal  ###");
    sc.line("; #ind leq bal iff count leq sum");
    for st in ["old", "new"] {
        sc.line("(assert (forall ((C Coin)) (=");
        sc.line(format!(" (exists ((A Address)) {} )", ar.owned("C", "A", st)));
        sc.line(format!(" {} )))", ar.counted("C", st)));
    }
    sc.line(";#only once ind leq bal");
    for st in ["old", "new"] {
        sc.line("(assert (forall ((A Address)(B Address)(C Coin))");
        sc.line(" (=> (and");
        sc.line(format!("       {}", ar.owned_with("C", "A", st, " ")));
        sc.line(format!("       {} )", ar.owned_with("C", "B", st, " ")));
        sc.line("     (= A B) )))");
    }
    sc.blank();
}

/// For one address losing and another gaining the same amount, the moved
/// coins are numbered in the same order on both sides.
fn ordering(sc: &mut SmtScript, ar: Ar, eff: &Effect) {
    let [from, to] = match eff.changes.as_slice() {
        [a, b] if a.gain != b.gain && a.amount == b.amount => {
            if a.gain {
                [b, a]
            } else {
                [a, b]
            }
        }
        _ => return,
    };
    let (f, t) = (&from.addr, &to.addr);
    let plus = |x: &str, y: &str| if ar.nat() { format!("(plus {x} {y})") } else { format!("(+ {x} {y})") };
    let lo_from = ar.add(&format!("(new-bal {f})"), Amount::K(1));
    let lo_to = ar.add(&format!("(old-bal {t})"), Amount::K(1));
    sc.lines_from([
        ";###  ordering of moved coins  ###".to_string(),
        "(assert (forall ((C Coin))".to_string(),
        format!(
            " (=> (and {} {})",
            ar.le(&lo_from, &format!("(ind C {f})")),
            ar.le(&format!("(ind C {f})"), &format!("(old-bal {f})"))
        ),
        format!("  (= {} {}) )))", plus(&format!("(ind C {f})"), &lo_to), plus(&format!("(ind C {t})"), &lo_from)),
    ]);
    sc.blank();
}

fn transition(sc: &mut SmtScript, ar: Ar, eff: &Effect) {
    sc.line(format!(";#{}", eff.label));
    sc.line("(assert (and ");
    for ch in &eff.changes {
        let a = &ch.addr;
        if ch.gain {
            sc.line(format!("   (= (new-bal {a}) {})", ar.add(&format!("(old-bal {a})"), ch.amount)));
        } else {
            sc.line(format!("   (= (old-bal {a}) {})", ar.add(&format!("(new-bal {a})"), ch.amount)));
        }
    }
    if eff.single {
        sc.line("   (forall ((A Address ))");
        sc.line(format!("      (=> (distinct A {}) (= (old-bal A) (new-bal A)) ))))", eff.changes[0].addr));
    } else {
        let guards: Vec<String> = eff.addresses().iter().map(|a| format!("(distinct A {a})")).collect();
        sc.line("   (forall ((A Address)) (=>");
        sc.line(format!("     (and {})", guards.join(" ")));
        sc.line("     (= (old-bal A) (new-bal A)) ))))");
    }
}

/// `(lhs, rhs)` with `rhs` the state after the transition.
fn sum_relation(ar: Ar, sum: Option<(bool, Amount)>, old: &str, new: &str) -> (String, String) {
    match sum {
        None => (old.to_string(), new.to_string()),
        Some((true, amt)) => (ar.add(old, amt), new.to_string()),
        Some((false, amt)) => (old.to_string(), ar.add(new, amt)),
    }
}

enum Goal<'a> {
    Impact,
    Lemma { assumed: &'a [String], negated: &'a str },
}

fn build(t: &TransitionSpec, kind: EncodingKind, v: VariantFlags, goal: Goal<'_>) -> Result<SmtScript, EncodingError> {
    let eff = Effect::of(t)?;
    let ar = Ar { kind };
    let mut sc = SmtScript::new(logic(kind));
    declarations(&mut sc, ar, &eff, v.with_total);
    if ar.nat() {
        nat_axioms(&mut sc);
    }
    if kind == EncodingKind::Id {
        list_axioms(&mut sc);
    }
    axioms(&mut sc, ar, &eff, v);
    if v.ordering {
        ordering(&mut sc, ar, &eff);
    }
    match goal {
        Goal::Impact if v.with_total => {
            sc.line(";###  transition and expected impact  ###");
            transition(&mut sc, ar, &eff);
            let (l, r) = sum_relation(ar, eff.sum, "old-total", "new-total");
            sc.lines_from([";#expected Impact".to_string(), format!("(assert (= {l} {r}) )")]);
            sc.blank();
            sc.lines_from([
                ";### invariants ###",
                ";#pre-invariant",
                "(assert (= old-sum old-total) )",
                ";#negated post-invariant",
                "(assert (distinct new-sum new-total) )",
            ]);
        }
        Goal::Impact => {
            sc.line(";###  transition and negated impact  ###");
            transition(&mut sc, ar, &eff);
            sc.blank();
            let (l, r) = sum_relation(ar, eff.sum, "old-sum", "new-sum");
            sc.lines_from([";#negated Impact".to_string(), format!("(assert (distinct {l} {r}) )")]);
        }
        Goal::Lemma { assumed, negated } => {
            sc.line(";###  transition and negated lemma  ###");
            transition(&mut sc, ar, &eff);
            sc.blank();
            if !assumed.is_empty() {
                sc.line(";#proved lemmas");
                for l in assumed {
                    sc.line(format!("(assert {l})"));
                }
            }
            sc.lines_from([";#negated lemma".to_string(), format!("(assert (not {negated}))")]);
        }
    }
    Ok(sc.finish())
}

pub(crate) fn goal(t: &TransitionSpec, kind: EncodingKind, v: VariantFlags) -> Result<SmtScript, EncodingError> {
    build(t, kind, v, Goal::Impact)
}

pub(crate) fn consistency(kind: EncodingKind) -> SmtScript {
    let eff = Effect::of(&TransitionSpec::mint1()).expect("mint1 is valid");
    let ar = Ar { kind };
    let mut sc = SmtScript::new(logic(kind));
    declarations(&mut sc, ar, &eff, false);
    if ar.nat() {
        nat_axioms(&mut sc);
    }
    if kind == EncodingKind::Id {
        list_axioms(&mut sc);
    }
    axioms(&mut sc, ar, &eff, VariantFlags::default());
    sc.finish()
}

pub(crate) fn lemma_split(t: &TransitionSpec, kind: EncodingKind) -> Result<Vec<(String, SmtScript)>, EncodingError> {
    let eff = Effect::of(t)?;
    let ar = Ar { kind };
    let lemmas: Vec<String> = match t {
        TransitionSpec::MintN { .. } => vec![ar.le("new-sum", &ar.add("old-sum", Amount::N))],
        TransitionSpec::TransferN { .. } => vec![
            ar.le("new-sum", &ar.add("old-sum", Amount::N)),
            ar.le("old-sum", &ar.add("new-sum", Amount::N)),
            ar.le("new-sum", "old-sum"),
            ar.le("old-sum", "new-sum"),
        ],
        _ => return Err(EncodingError::Unsupported(format!("no lemma split for {}", t.name()))),
    };
    let mut out = Vec::with_capacity(lemmas.len() + 1);
    for (i, l) in lemmas.iter().enumerate() {
        // the tight bounds build on the loose ones
        let assumed: Vec<String> = if i >= 2 { lemmas[i - 2..i - 1].to_vec() } else { Vec::new() };
        let sc = build(t, kind, VariantFlags::default(), Goal::Lemma { assumed: &assumed, negated: l })?;
        out.push((format!("lemma{}", i + 1), sc));
    }
    let (l, r) = sum_relation(ar, eff.sum, "old-sum", "new-sum");
    let target = format!("(= {l} {r})");
    let main = build(t, kind, VariantFlags::default(), Goal::Lemma { assumed: &lemmas, negated: &target })?;
    out.push(("main".into(), main));
    Ok(out)
}
