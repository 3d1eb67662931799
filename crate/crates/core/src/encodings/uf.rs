//! Implicit encodings over `has-coin` and `active` only.

use super::{SmtScript, TransitionSpec};

fn header(sc: &mut SmtScript) {
    sc.lines_from(["(declare-sort Coin 0 )", "(declare-sort Address 0)"]);
}

fn two_state_decls(sc: &mut SmtScript, consts: &[&str]) {
    header(sc);
    sc.lines_from([
        "(declare-fun old-act (Coin) Bool)",
        "(declare-fun new-act (Coin) Bool)",
        "(declare-fun old-hc (Address Coin) Bool)",
        "(declare-fun new-hc (Address Coin) Bool)",
    ]);
    for c in consts {
        sc.line(*c);
    }
    sc.blank();
}

/// Smart invariants of one state, as two assertions.
fn invariants(sc: &mut SmtScript, hc: &str, act: &str) {
    sc.lines_from([
        ";#inactive coins and at least one".to_string(),
        "(assert (forall ((C Coin))".to_string(),
        format!("(= (exists ((A Address)) ({hc} A C))"),
        format!("   ({act} C) )))"),
        ";#at most one".to_string(),
        "(assert (forall ((A Address)(B Address)(C Coin))".to_string(),
        format!("(=> (and ({hc} A C) ({hc} B C)) (= A B) )))"),
    ]);
}

fn negated_post_invariant(sc: &mut SmtScript) {
    sc.lines_from([
        ";### negated post-invariant ###",
        "(assert (not (and",
        " (forall ((C Coin))",
        "  (= (exists ((A Address)) (new-hc A C)) (new-act C) ))",
        " (forall ((A Address)(B Address)(C Coin))",
        "  (=> (and (new-hc A C) (new-hc B C)) (= A B) )))))",
    ]);
}

fn indexed_decls(sc: &mut SmtScript, consts: &[&str]) {
    header(sc);
    sc.lines_from([
        "(declare-fun act (Coin Int) Bool )",
        "(declare-fun hc (Address Coin Int) Bool)",
        "(declare-fun induct (Int) Bool)",
    ]);
    for c in consts {
        sc.line(format!("(declare-const {c} Address)"));
    }
    sc.line("(declare-const n Int)");
    sc.blank();
    sc.lines_from([
        ";### inductive predicate definition ###",
        "(assert (forall ((I Int)) ",
        " (= (induct I) ",
        "    (and (forall ((C Coin))",
        "          (= (exists ((A Address)) (hc A C I)) (act C I)) )",
        "         (forall ((A Address) (B Address) (C Coin))",
        "          (=> (and (hc A C I) (hc B C I)) (= A B)) ))))) ",
        " ",
        ";### pre-invariants ###",
        ";#inactive coins and at least one",
        "(assert (forall ((C Coin))",
        "(= (exists ((A Address)) (hc A C 0))",
        "   (act C 0) )))",
        ";#at most one",
        "(assert (forall ((A Address)(B Address)(C Coin))",
        "(=> (and (hc A C 0) (hc B C 0)) (= A B) )))",
        "",
    ]);
}

fn indexed_goal(sc: &mut SmtScript) {
    sc.lines_from(["", ";### negated post-invariant ###", "(assert (and (<= 0 n) (not (induct n)) ))"]);
}

pub(crate) fn goal(t: &TransitionSpec) -> SmtScript {
    let mut sc = SmtScript::new("UFLIA");
    match t {
        TransitionSpec::Mint1 { receiver: a } => {
            two_state_decls(&mut sc, &[&format!("(declare-const {a} Address)"), "(declare-const c0 Coin)"]);
            sc.line(";### pre-invariants ###");
            invariants(&mut sc, "old-hc", "old-act");
            sc.blank();
            sc.lines_from([
                ";### transition ###".to_string(),
                ";#mint1".to_string(),
                "(assert (and (not (old-act c0)) (new-act c0) ))".to_string(),
                format!("(assert (and (new-hc {a} c0) (forall ((A Address)) (not (old-hc A c0)) )))"),
                "(assert (forall ((D Coin))".to_string(),
                " (=> (distinct D c0) (= (new-act D) (old-act D)) )))".to_string(),
                "(assert (forall ((D Coin) (A Address))".to_string(),
                format!(" (=> (or (distinct D c0) (distinct A {a}))"),
                "     (= (new-hc A D) (old-hc A D)) )))".to_string(),
            ]);
            sc.blank();
            negated_post_invariant(&mut sc);
        }
        TransitionSpec::Transfer1 { from, to } => {
            two_state_decls(
                &mut sc,
                &[&format!("(declare-const {from} Address)"), &format!("(declare-const {to} Address)")],
            );
            sc.line(";### pre-invariants ###");
            invariants(&mut sc, "old-hc", "old-act");
            sc.blank();
            sc.lines_from([
                ";### transition ###".to_string(),
                ";#transfer1".to_string(),
                "(assert (forall ((D Coin)) (= (old-act D) (new-act D)) ))".to_string(),
                "(assert (exists ((C Coin)) (and".to_string(),
                format!(" (old-hc {from} C) (not (old-hc {to} C))"),
                format!(" (not (new-hc {from} C)) (new-hc {to} C)"),
                " (forall ((D Coin) (A Address))".to_string(),
                "  (=> (or (distinct C D)".to_string(),
                format!("          (and (distinct A {from}) (distinct A {to})) )"),
                "      (= (new-hc A D) (old-hc A D)) )))))".to_string(),
            ]);
            sc.blank();
            negated_post_invariant(&mut sc);
        }
        TransitionSpec::MintN { receiver: a } => {
            indexed_decls(&mut sc, &[a]);
            sc.lines_from([
                ";### transition ###".to_string(),
                "(assert (forall ((I Int)) (=> ".to_string(),
                " (<= 0 I)".to_string(),
                " (exists ((C Coin)) (and".to_string(),
                "  (not (act C I)) (act C (+ I 1))".to_string(),
                format!("  (hc {a} C (+ I 1))"),
                "  (forall ((A Address)) (not (hc A C I)) )".to_string(),
                "  (forall ((D Coin))".to_string(),
                "   (=> (distinct D C) (= (act D (+ I 1)) (act D I)) ))".to_string(),
                "  (forall ((D Coin) (A Address))".to_string(),
                format!("   (=> (or (distinct D C) (distinct A {a}))"),
                "       (= (hc A D (+ I 1)) (hc A D I)) )))))))".to_string(),
            ]);
            indexed_goal(&mut sc);
        }
        TransitionSpec::TransferN { from, to } => {
            indexed_decls(&mut sc, &[from, to]);
            sc.lines_from([
                ";### transition ###".to_string(),
                "(assert (forall ((I Int)) (=> ".to_string(),
                " (<= 0 I)".to_string(),
                " (and (forall ((D Coin)) (= (act D I) (act D (+ I 1)) ))".to_string(),
                "      (exists ((C Coin)) (and".to_string(),
                format!("       (hc {from} C I) (not (hc {to} C I))"),
                format!("       (not (hc {from} C (+ I 1))) (hc {to} C (+ I 1))"),
                "       (forall ((D Coin) (A Address))".to_string(),
                "        (=> (or (distinct C D)".to_string(),
                format!("                (and (distinct A {from}) (distinct A {to})) )"),
                "            (= (hc A D (+ I 1)) (hc A D I)) ))))))))".to_string(),
            ]);
            indexed_goal(&mut sc);
        }
        TransitionSpec::Deltas { .. } => unreachable!("rejected by the caller"),
    }
    sc.finish()
}

pub(crate) fn consistency() -> SmtScript {
    let mut sc = SmtScript::new("UFLIA");
    two_state_decls(&mut sc, &[]);
    sc.line(";### invariants ###");
    invariants(&mut sc, "old-hc", "old-act");
    invariants(&mut sc, "new-hc", "new-act");
    sc.finish()
}
