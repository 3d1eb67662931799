//! Seeded random formulas and structures for cross-checking.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::sl::{formula_length, well_formed, AddressId, Formula, SlStructure, Term, Vocabulary};

const VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormulaShape {
    pub max_length: u64,
    pub max_numeral: u64,
    /// Quantifier nesting limit.
    pub max_vars: usize,
}

impl Default for FormulaShape {
    fn default() -> Self {
        FormulaShape { max_length: 12, max_numeral: 2, max_vars: 2 }
    }
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    v: Vocabulary,
    shape: FormulaShape,
}

impl<R: Rng> Gen<'_, R> {
    fn addr_term(&mut self, scope: &[String]) -> Option<Term> {
        let n = self.v.l + scope.len();
        if n == 0 {
            return None;
        }
        let i = self.rng.gen_range(0..n);
        Some(if i < self.v.l { Term::AddressConst(i + 1) } else { Term::AddressVar(scope[i - self.v.l].clone()) })
    }

    fn nat_term(&mut self, scope: &[String]) -> Term {
        loop {
            match self.rng.gen_range(0..4) {
                0 => return Term::Numeral(self.rng.gen_range(0..=self.shape.max_numeral)),
                1 if self.v.d > 0 => return Term::NatConst(self.rng.gen_range(1..=self.v.d)),
                2 => return Term::SumConst(self.rng.gen_range(1..=self.v.m)),
                3 => {
                    if let Some(a) = self.addr_term(scope) {
                        return Term::bal(self.rng.gen_range(1..=self.v.m), a);
                    }
                }
                _ => {}
            }
        }
    }

    fn atom(&mut self, scope: &[String]) -> Formula {
        if self.rng.gen_bool(0.2) {
            if let (Some(a), Some(b)) = (self.addr_term(scope), self.addr_term(scope)) {
                return Formula::eq(a, b);
            }
        }
        let (a, b) = (self.nat_term(scope), self.nat_term(scope));
        Formula::eq(a, b)
    }

    fn formula(&mut self, budget: u64, positive: bool, scope: &mut Vec<String>) -> Formula {
        if budget < 4 {
            return self.atom(scope);
        }
        match self.rng.gen_range(0..10) {
            0..=2 => self.atom(scope),
            3 => Formula::not(self.formula(budget - 1, !positive, scope)),
            4 | 5 => {
                let (a, b) = self.split(budget, positive, positive, scope);
                Formula::and(a, b)
            }
            6 => {
                let (a, b) = self.split(budget, positive, positive, scope);
                Formula::or(a, b)
            }
            7 => {
                let (a, b) = self.split(budget, !positive, positive, scope);
                Formula::implies(a, b)
            }
            _ if positive && scope.len() < self.shape.max_vars => {
                let x = VARS[scope.len()].to_string();
                scope.push(x.clone());
                let body = self.formula(budget - 1, positive, scope);
                scope.pop();
                Formula::forall(&x, body)
            }
            _ => self.atom(scope),
        }
    }

    fn split(&mut self, budget: u64, pa: bool, pb: bool, scope: &mut Vec<String>) -> (Formula, Formula) {
        let left = if budget >= 7 { self.rng.gen_range(3..=budget - 4) } else { 3 };
        let a = self.formula(left, pa, scope);
        let b = self.formula(budget - 1 - left, pb, scope);
        (a, b)
    }
}

/// A closed, well-formed formula over `v` whose length stays within the shape.
pub fn random_formula<R: Rng>(rng: &mut R, v: &Vocabulary, shape: FormulaShape) -> Formula {
    loop {
        let budget = rng.gen_range(3..=shape.max_length);
        let f = Gen { rng: &mut *rng, v: *v, shape }.formula(budget, true, &mut Vec::new());
        if formula_length(&f) <= shape.max_length && well_formed(v, &f).is_ok() {
            return f;
        }
    }
}

/// `n` formulas over one-balance vocabularies with `l <= max_l`, `d <= max_d`.
pub fn fragment_corpus(
    seed: u64,
    n: usize,
    max_l: usize,
    max_d: usize,
    shape: FormulaShape,
) -> Vec<(Vocabulary, Formula)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v = Vocabulary::new(rng.gen_range(0..=max_l), 1, rng.gen_range(0..=max_d));
            let f = random_formula(&mut rng, &v, shape);
            (v, f)
        })
        .collect()
}

/// Random structure over `v` with at most `max_domain` elements drawn from
/// `1..=2 * max_domain + 1`, so ids are not always contiguous.
pub fn random_structure<R: Rng>(
    rng: &mut R,
    v: &Vocabulary,
    max_domain: usize,
    max_value: u64,
    distinct: bool,
) -> SlStructure {
    let min = if distinct { v.l } else { v.l.min(1) };
    let n = rng.gen_range(min..=max_domain.max(min));
    let pool: Vec<AddressId> = (1..=(2 * max_domain.max(min) + 1) as AddressId).collect();
    let mut domain: Vec<AddressId> = pool.choose_multiple(rng, n).copied().collect();
    domain.sort_unstable();
    let consts: Vec<AddressId> = if distinct {
        let mut c: Vec<AddressId> = domain.choose_multiple(rng, v.l).copied().collect();
        c.shuffle(rng);
        c
    } else {
        (0..v.l).map(|_| *domain.choose(rng).expect("non-empty domain")).collect()
    };
    let balances = (0..v.m).map(|_| (0..n).map(|_| rng.gen_range(0..=max_value)).collect()).collect();
    let nats = (0..v.d).map(|_| rng.gen_range(0..=max_value)).collect();
    SlStructure::new(domain, consts, balances, nats).expect("generated structure is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_respects_shape() {
        let shape = FormulaShape::default();
        let c = fragment_corpus(7, 200, 3, 2, shape);
        assert_eq!(c, fragment_corpus(7, 200, 3, 2, shape));
        for (v, f) in &c {
            assert!(v.is_fragment() && v.l <= 3 && v.d <= 2);
            assert!(formula_length(f) <= 12);
            assert!(well_formed(v, f).is_ok());
        }
        assert!(c.iter().any(|(_, f)| matches!(f, Formula::ForallAddress(..))));
    }

    #[test]
    fn structures_are_distinct_when_asked() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = Vocabulary::new(3, 1, 2);
        for _ in 0..100 {
            let s = random_structure(&mut rng, &v, 6, 4, true);
            assert!(s.is_distinct());
            assert!(s.domain().len() <= 6 && s.domain().len() >= 3);
            assert!(s.max_value() <= 4 * 6);
        }
    }
}
