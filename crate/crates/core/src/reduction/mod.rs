//! Small-model reduction of the one-balance fragment to Presburger
//! arithmetic, and the resulting decision procedure.
//!
//! For every partition `P` of the address constants, `phi_P` identifies the
//! constants in each block. Its query `tau(phi_P) & eta(phi_P)` unrolls each
//! universal quantifier over `kappa~` indicator slots; slot `i` is an
//! address when its indicator `a_i` is non-zero. `phi` is satisfiable iff
//! some query is.

mod partition;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use partition::{apply_partition, enumerate_partitions, Partition};

use crate::exec::{self, Execution};
use crate::lia::{self, LiaModel, LiaResult, LinExpr, PresFormula, PresVar, SolveOptions};
use crate::sl::{formula_length, well_formed, AddressId, Formula, SlStructure, Term, Violation, Vocabulary};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("vocabulary is outside the decidable fragment (needs m = 1 and neither `+` nor `<=`; got m = {m}{}{})",
        if *.plus { ", `+`" } else { "" }, if *.leq { ", `<=`" } else { "" })]
    NotFragment { m: usize, plus: bool, leq: bool },
    #[error("ill-formed input: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormed(Vec<Violation>),
    #[error("numeral {0} is too large")]
    NumeralTooLarge(u64),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("Presburger oracle `{oracle}` failed: {reason}")]
    Oracle { oracle: String, reason: String },
    #[error("structure does not fit the Presburger vocabulary: {0}")]
    Congruence(String),
}

/// `kappa(x) = l + x + 1` for the fragment.
pub fn kappa(v: &Vocabulary, len: u64) -> Result<usize, ReductionError> {
    if !v.is_fragment() {
        return Err(ReductionError::NotFragment { m: v.m, plus: v.plus, leq: v.leq });
    }
    Ok(v.l + len as usize + 1)
}

/// Presburger vocabulary: `kt` indicator slots, `m` balance functions, `d` nat constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresVocabulary {
    pub kt: usize,
    pub m: usize,
    pub d: usize,
}

fn zero(v: PresVar) -> PresFormula {
    PresFormula::is_zero(v)
}

/// Slot constraints: empty slots carry zero balances, the first `l` slots
/// are non-empty, and non-empty slots form a prefix.
pub fn build_eta(kt: usize, l: usize, m: usize) -> PresFormula {
    let eta1 = PresFormula::And(
        (1..=kt)
            .map(|i| {
                PresFormula::implies(
                    zero(PresVar::Indicator(i)),
                    PresFormula::And((1..=m).map(|j| zero(PresVar::Balance(i, j))).collect()),
                )
            })
            .collect(),
    );
    let eta2 = PresFormula::And((1..=l).map(|i| PresFormula::not(zero(PresVar::Indicator(i)))).collect());
    let eta3 = PresFormula::And(
        (1..=kt)
            .map(|i| {
                PresFormula::implies(
                    zero(PresVar::Indicator(i)),
                    PresFormula::And((i..=kt).map(|i2| zero(PresVar::Indicator(i2))).collect()),
                )
            })
            .collect(),
    );
    PresFormula::And(vec![eta1, eta2, eta3])
}

/// Core connectives after rewriting `|` and `->`.
enum Core<'a> {
    Eq(&'a Term, &'a Term),
    Leq(&'a Term, &'a Term),
    Not(Box<Core<'a>>),
    And(Box<Core<'a>>, Box<Core<'a>>),
    Forall(&'a str, Box<Core<'a>>),
}

fn normalize(f: &Formula) -> Core<'_> {
    match f {
        Formula::Eq(a, b) => Core::Eq(a, b),
        Formula::Leq(a, b) => Core::Leq(a, b),
        Formula::Not(g) => Core::Not(Box::new(normalize(g))),
        Formula::And(a, b) => Core::And(Box::new(normalize(a)), Box::new(normalize(b))),
        Formula::Or(a, b) => Core::Not(Box::new(Core::And(
            Box::new(Core::Not(Box::new(normalize(a)))),
            Box::new(Core::Not(Box::new(normalize(b)))),
        ))),
        Formula::Implies(a, b) => {
            Core::Not(Box::new(Core::And(Box::new(normalize(a)), Box::new(Core::Not(Box::new(normalize(b)))))))
        }
        Formula::ForallAddress(x, g) => Core::Forall(x, Box::new(normalize(g))),
    }
}

struct Tau<'a> {
    pv: PresVocabulary,
    env: Vec<(&'a str, usize)>,
}

impl<'a> Tau<'a> {
    /// Slot denoted by an address term.
    fn slot(&self, t: &Term) -> Result<usize, ReductionError> {
        match t {
            Term::AddressConst(i) => Ok(*i),
            Term::AddressVar(x) => self
                .env
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, s)| *s)
                .ok_or_else(|| ReductionError::Unbound(x.clone())),
            _ => Err(ReductionError::IllFormed(vec![Violation::SortMismatch("expected an address term".into())])),
        }
    }

    fn term(&self, t: &Term) -> Result<LinExpr, ReductionError> {
        Ok(match t {
            Term::Numeral(n) => LinExpr::constant(i64::try_from(*n).map_err(|_| ReductionError::NumeralTooLarge(*n))?),
            Term::NatConst(k) => LinExpr::var(PresVar::Nat(*k)),
            Term::SumConst(j) => LinExpr::sum((1..=self.pv.kt).map(|i| LinExpr::var(PresVar::Balance(i, *j)))),
            Term::Balance(j, a) => LinExpr::var(PresVar::Balance(self.slot(a)?, *j)),
            Term::Plus(a, b) => self.term(a)?.plus(&self.term(b)?),
            Term::AddressConst(_) | Term::AddressVar(_) => {
                return Err(ReductionError::IllFormed(vec![Violation::SortMismatch(
                    "address term in arithmetic".into(),
                )]))
            }
        })
    }

    fn formula(&mut self, f: &Core<'a>) -> Result<PresFormula, ReductionError> {
        Ok(match f {
            Core::Eq(a, b) if a.sort() == crate::sl::Sort::Address => {
                // address equality between slots is decided syntactically
                if self.slot(a)? == self.slot(b)? {
                    PresFormula::True
                } else {
                    PresFormula::False
                }
            }
            Core::Eq(a, b) => PresFormula::eq(self.term(a)?, self.term(b)?),
            Core::Leq(a, b) => PresFormula::le(self.term(a)?, self.term(b)?),
            Core::Not(g) => PresFormula::not(self.formula(g)?),
            Core::And(a, b) => PresFormula::And(vec![self.formula(a)?, self.formula(b)?]),
            Core::Forall(x, g) => {
                let mut parts = Vec::with_capacity(self.pv.kt);
                for i in 1..=self.pv.kt {
                    self.env.push((x, i));
                    let body = self.formula(g);
                    self.env.pop();
                    parts.push(PresFormula::Or(vec![zero(PresVar::Indicator(i)), body?]));
                }
                PresFormula::And(parts)
            }
        })
    }
}

/// Translation of a sentence into Presburger arithmetic over `pv`.
///
/// Address constant `a_i` occupies slot `i`, so the input must use distinct
/// constants for distinct slots (as `phi_P` does).
pub fn build_tau(f: &Formula, pv: &PresVocabulary) -> Result<PresFormula, ReductionError> {
    let core = normalize(f);
    let mut tau = Tau { pv: *pv, env: Vec::new() };
    tau.formula(&core)
}

/// Answer of a Presburger backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleAnswer {
    Sat(Option<LiaModel>),
    Unsat,
    Unknown(String),
}

pub trait PresburgerOracle: Sync {
    fn name(&self) -> &str;
    fn check(&self, f: &PresFormula) -> OracleAnswer;
}

/// The built-in solver from [`crate::lia`].
#[derive(Clone, Copy, Debug, Default)]
pub struct InternalOracle {
    pub options: SolveOptions,
}

impl PresburgerOracle for InternalOracle {
    fn name(&self) -> &str {
        "internal"
    }

    fn check(&self, f: &PresFormula) -> OracleAnswer {
        match lia::solve(f, &self.options) {
            Ok(LiaResult::Sat(m)) => OracleAnswer::Sat(Some(m)),
            Ok(LiaResult::Unsat) => OracleAnswer::Unsat,
            Ok(LiaResult::Incomplete(r)) => OracleAnswer::Unknown(r),
            Err(e) => OracleAnswer::Unknown(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Sat,
    Unsat,
}

fn model_as_strings<S: serde::Serializer>(m: &LiaModel, ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_map(m.iter().map(|(k, v)| (k.to_string(), *v)))
}

/// Per-partition record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionOutcome {
    pub partition: Partition,
    pub kappa: usize,
    pub query_size: usize,
    pub sat: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Index into [`Decision::partitions`].
    pub partition: usize,
    #[serde(serialize_with = "model_as_strings", skip_deserializing)]
    pub presburger: LiaModel,
    /// Distinct model of `phi_P`, with constants mapped back for `phi`.
    pub structure: SlStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub verdict: Verdict,
    pub partitions: Vec<PartitionOutcome>,
    pub witness: Option<Witness>,
}

/// The Presburger query for one partition, with its vocabulary.
pub fn partition_query(
    f: &Formula,
    v: &Vocabulary,
    p: &Partition,
) -> Result<(PresFormula, PresVocabulary), ReductionError> {
    let fp = apply_partition(f, p);
    let lp = p.num_blocks();
    let vp = Vocabulary { l: lp, ..*v };
    let kt = kappa(&vp, formula_length(&fp))?.max(lp);
    let pv = PresVocabulary { kt, m: v.m, d: v.d };
    let query = PresFormula::And(vec![build_tau(&fp, &pv)?, build_eta(kt, lp, v.m)]);
    Ok((query, pv))
}

/// Decides satisfiability of a sentence of the one-balance fragment.
///
/// Every partition is checked; the witness comes from the first
/// satisfiable one in enumeration order.
pub fn decide(
    f: &Formula,
    v: &Vocabulary,
    oracle: &dyn PresburgerOracle,
    exec: Execution,
) -> Result<Decision, ReductionError> {
    kappa(v, 0)?;
    well_formed(v, f).map_err(ReductionError::IllFormed)?;
    let parts = enumerate_partitions(v.l);
    let results =
        exec::map(exec, &parts, |p| -> Result<(PartitionOutcome, Option<LiaModel>, PresVocabulary), ReductionError> {
            let (query, pv) = partition_query(f, v, p)?;
            let (sat, model) = match oracle.check(&query) {
                OracleAnswer::Sat(m) => (true, m),
                OracleAnswer::Unsat => (false, None),
                OracleAnswer::Unknown(reason) => {
                    return Err(ReductionError::Oracle { oracle: oracle.name().to_string(), reason })
                }
            };
            Ok((PartitionOutcome { partition: p.clone(), kappa: pv.kt, query_size: query.size(), sat }, model, pv))
        });
    let mut partitions = Vec::with_capacity(parts.len());
    let mut witness = None;
    for (idx, r) in results.into_iter().enumerate() {
        let (outcome, model, pv) = r?;
        if outcome.sat && witness.is_none() {
            if let Some(model) = model {
                let local = structure_from_presburger(&model, &pv, outcome.partition.num_blocks())?;
                let consts: Vec<AddressId> =
                    (1..=v.l).map(|i| local.addr_consts()[outcome.partition.class_of(i) - 1]).collect();
                let balances = (1..=v.m).map(|j| local.balance_table(j).unwrap_or(&[]).to_vec()).collect();
                let structure =
                    SlStructure::new(local.domain().to_vec(), consts, balances, local.nat_consts().to_vec())
                        .map_err(|e| ReductionError::Congruence(e.to_string()))?;
                witness = Some(Witness { partition: idx, presburger: model, structure });
            }
        }
        partitions.push(outcome);
    }
    let verdict = if partitions.iter().any(|p| p.sat) { Verdict::Sat } else { Verdict::Unsat };
    Ok(Decision { verdict, partitions, witness })
}

/// Presburger model congruent to a distinct structure: the constants take
/// the first slots, the remaining elements follow in ascending order.
pub fn presburger_model_of(s: &SlStructure, pv: &PresVocabulary) -> Result<LiaModel, ReductionError> {
    if !s.is_distinct() {
        return Err(ReductionError::Congruence("address constants are not distinct".into()));
    }
    let mut order: Vec<AddressId> = s.addr_consts().to_vec();
    order.extend(s.domain().iter().filter(|a| !s.addr_consts().contains(a)));
    if order.len() > pv.kt {
        return Err(ReductionError::Congruence(format!("{} addresses exceed {} slots", order.len(), pv.kt)));
    }
    if s.num_balances() < pv.m || s.nat_consts().len() < pv.d {
        return Err(ReductionError::Congruence("structure lacks symbols of the vocabulary".into()));
    }
    let mut m = LiaModel::new();
    for i in 1..=pv.kt {
        let elem = order.get(i - 1);
        m.insert(PresVar::Indicator(i), elem.is_some() as u64);
        for j in 1..=pv.m {
            let val = elem.and_then(|a| s.balance(j, *a)).unwrap_or(0);
            m.insert(PresVar::Balance(i, j), val);
        }
    }
    for k in 1..=pv.d {
        m.insert(PresVar::Nat(k), s.nat_consts()[k - 1]);
    }
    Ok(m)
}

/// Structure read off a Presburger model: the domain is `1..=z` for the
/// last non-empty slot `z`, constant `a_i` denotes element `i`.
pub fn structure_from_presburger(m: &LiaModel, pv: &PresVocabulary, l: usize) -> Result<SlStructure, ReductionError> {
    let get = |v: PresVar| m.get(&v).copied().ok_or_else(|| ReductionError::Congruence(format!("model lacks {v}")));
    let mut z = 0;
    for i in 1..=pv.kt {
        if get(PresVar::Indicator(i))? != 0 {
            z = i;
        }
    }
    if l > z {
        return Err(ReductionError::Congruence(format!("constant a{l} has no slot")));
    }
    let domain: Vec<AddressId> = (1..=z as AddressId).collect();
    let consts: Vec<AddressId> = (1..=l as AddressId).collect();
    let mut balances = Vec::with_capacity(pv.m);
    for j in 1..=pv.m {
        balances.push((1..=z).map(|i| get(PresVar::Balance(i, j))).collect::<Result<Vec<_>, _>>()?);
    }
    // a nat constant absent from the query is unconstrained
    let nats = (1..=pv.d).map(|k| m.get(&PresVar::Nat(k)).copied().unwrap_or(0)).collect();
    SlStructure::new(domain, consts, balances, nats).map_err(|e| ReductionError::Congruence(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::sl::is_sl_model;

    #[test]
    fn eta_for_one_slot() {
        assert_eq!(build_eta(1, 1, 1).to_string(), "(a1 = 0 -> b1_1 = 0) & !(a1 = 0) & (a1 = 0 -> a1 = 0)");
    }

    #[test]
    fn kappa_rejects_extensions() {
        assert_eq!(kappa(&Vocabulary::new(2, 1, 0), 5), Ok(8));
        assert!(kappa(&Vocabulary::new(2, 2, 0), 5).is_err());
        assert!(kappa(&Vocabulary::new(2, 1, 0).with_plus(), 5).is_err());
    }

    #[test]
    fn address_equalities_fold() {
        let v = Vocabulary::new(1, 1, 0);
        let pv = PresVocabulary { kt: 2, m: 1, d: 0 };
        let f = parse_formula("a1 = a1", &v).unwrap();
        assert_eq!(build_tau(&f, &pv).unwrap(), PresFormula::True);
    }

    #[test]
    fn decides_small_examples() {
        let v = Vocabulary::new(1, 1, 0);
        let o = InternalOracle::default();
        let sat = parse_formula("forall x. b1(x) = 1", &v).unwrap();
        let d = decide(&sat, &v, &o, Execution::Sequential).unwrap();
        assert_eq!(d.verdict, Verdict::Sat);
        let w = d.witness.unwrap();
        assert!(is_sl_model(&w.structure, &sat).unwrap());
        let unsat = parse_formula("s1 = 0 & b1(a1) = 1", &v).unwrap();
        assert_eq!(decide(&unsat, &v, &o, Execution::Sequential).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn identified_constants() {
        let v = Vocabulary::new(2, 1, 0);
        let o = InternalOracle::default();
        // satisfiable only when a1 and a2 denote the same address
        let f = parse_formula("s1 = 1 & b1(a1) = 1 & b1(a2) = 1", &v).unwrap();
        let d = decide(&f, &v, &o, Execution::Parallel).unwrap();
        assert_eq!(d.verdict, Verdict::Sat);
        assert_eq!(d.partitions.iter().filter(|p| p.sat).count(), 1);
        let w = d.witness.unwrap();
        assert!(is_sl_model(&w.structure, &f).unwrap());
        assert!(!w.structure.is_distinct());
    }

    #[test]
    fn rejects_non_fragment() {
        let v = Vocabulary::new(1, 2, 0);
        let f = parse_formula("s1 = s2", &v).unwrap();
        assert!(matches!(
            decide(&f, &v, &InternalOracle::default(), Execution::Sequential),
            Err(ReductionError::NotFragment { .. })
        ));
    }
}
