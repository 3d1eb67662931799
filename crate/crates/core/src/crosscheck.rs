//! Reduction pipeline against brute-force search and a second Presburger backend.

use serde::Serialize;

use crate::exec::{self, Execution};
use crate::reduction::{
    decide, kappa, partition_query, Decision, OracleAnswer, PresburgerOracle, ReductionError, Verdict,
};
use crate::search::{find_model_with, SearchBounds};
use crate::sl::{formula_length, is_sl_model, Formula, SlStructure, Vocabulary};

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheck {
    pub decision: Decision,
    pub bounds: SearchBounds,
    pub search_model: Option<SlStructure>,
    /// Per-partition answers of the second backend (`None` when it gave up).
    pub external: Option<Vec<Option<bool>>>,
    /// Disagreements; empty when everything lines up.
    pub problems: Vec<String>,
    /// Non-fatal remarks, e.g. a witness outside the search bounds.
    pub notes: Vec<String>,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Decides `f` with `oracle`, then
/// - replays the witness through the two-valued evaluator,
/// - runs model search over at most `min(kappa, max_addresses)` elements,
/// - re-asks every partition query to `external`, if given.
pub fn cross_check(
    f: &Formula,
    v: &Vocabulary,
    oracle: &dyn PresburgerOracle,
    external: Option<&dyn PresburgerOracle>,
    max_addresses: usize,
    exec: Execution,
) -> Result<CrossCheck, ReductionError> {
    let decision = decide(f, v, oracle, exec)?;
    let mut problems = Vec::new();
    let mut notes = Vec::new();

    if let Some(w) = &decision.witness {
        match is_sl_model(&w.structure, f) {
            Ok(true) => {}
            Ok(false) => problems.push("witness structure does not satisfy the formula".into()),
            Err(e) => problems.push(format!("witness evaluation failed: {e}")),
        }
    }

    let n = kappa(v, formula_length(f))?.min(max_addresses);
    let bounds = SearchBounds::default_for(f, v, n);
    let search_model = find_model_with(f, v, bounds, false, exec);
    match (&search_model, decision.verdict) {
        (Some(_), Verdict::Unsat) => problems.push("model search found a model of an UNSAT formula".into()),
        (None, Verdict::Sat) => match &decision.witness {
            Some(w) if w.structure.domain().len() <= n && w.structure.max_value() <= bounds.max_value => {
                problems.push("model search missed a witness inside its bounds".into())
            }
            _ => notes.push(format!(
                "SAT witness lies outside search bounds ({n} addresses, values <= {})",
                bounds.max_value
            )),
        },
        _ => {}
    }

    let external = match external {
        None => None,
        Some(ext) => {
            let answers = exec::map(exec, &decision.partitions, |p| -> Result<Option<bool>, ReductionError> {
                let (q, _) = partition_query(f, v, &p.partition)?;
                Ok(match ext.check(&q) {
                    OracleAnswer::Sat(_) => Some(true),
                    OracleAnswer::Unsat => Some(false),
                    OracleAnswer::Unknown(_) => None,
                })
            });
            let answers: Vec<Option<bool>> = answers.into_iter().collect::<Result<_, _>>()?;
            for (i, (a, p)) in answers.iter().zip(&decision.partitions).enumerate() {
                match a {
                    Some(sat) if *sat != p.sat => problems.push(format!(
                        "partition {i}: {} says {}, {} says {}",
                        oracle.name(),
                        word(p.sat),
                        ext.name(),
                        word(*sat)
                    )),
                    None => notes.push(format!("partition {i}: {} gave no answer", ext.name())),
                    _ => {}
                }
            }
            Some(answers)
        }
    };

    Ok(CrossCheck { decision, bounds, search_model, external, problems, notes })
}

fn word(sat: bool) -> &'static str {
    if sat {
        "SAT"
    } else {
        "UNSAT"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::reduction::InternalOracle;

    #[test]
    fn small_examples_agree() {
        for (src, l, sat) in
            [("s1 = 0", 0, true), ("s1 = 0 & b1(a1) = 1", 1, false), ("(forall x. b1(x) = 1) & s1 = 2", 0, true)]
        {
            let v = Vocabulary::new(l, 1, 0);
            let f = parse_formula(src, &v).unwrap();
            let c = cross_check(&f, &v, &InternalOracle::default(), None, 4, Execution::Sequential).unwrap();
            assert!(c.agrees(), "{src}: {:?}", c.problems);
            assert_eq!(c.decision.verdict == Verdict::Sat, sat);
            assert_eq!(c.search_model.is_some(), sat);
        }
    }
}
