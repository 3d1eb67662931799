//! Exact bounded simplex in the style used by SMT solvers: a fixed tableau,
//! bounds asserted and retracted incrementally, Bland's rule for pivoting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) type Q = BigRational;

/// Why a bound holds. `Lit` carries an encoded boolean literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Reason {
    Structural,
    Lit(u32),
}

#[derive(Clone, Debug)]
struct Bound {
    value: Q,
    reason: Reason,
}

type Row = Vec<(usize, Q)>;

pub(crate) struct Simplex {
    rows: Vec<Row>,
    basic_of: Vec<usize>,
    row_of: Vec<Option<usize>>,
    val: Vec<Q>,
    lower: Vec<Option<Bound>>,
    upper: Vec<Option<Bound>>,
    trail: Vec<(usize, bool, Option<Bound>)>,
    pub(crate) pivots: u64,
}

fn coef(row: &Row, x: usize) -> Option<&Q> {
    row.binary_search_by_key(&x, |(v, _)| *v).ok().map(|i| &row[i].1)
}

/// `a + c * b` for sorted sparse rows.
fn add_scaled(a: &Row, b: &Row, c: &Q) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, &b[j].1 * c));
            j += 1;
        } else {
            let v = &a[i].1 + &b[j].1 * c;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Simplex {
    /// `originals` structural variables (all `>= 0`) and one extra variable
    /// per row of `defs`, each defined as a combination of originals.
    pub(crate) fn new(originals: usize, defs: &[Vec<(usize, BigInt)>]) -> Self {
        let mut s = Self::new_free(originals, defs);
        for x in 0..originals {
            s.lower[x] = Some(Bound { value: Q::zero(), reason: Reason::Structural });
        }
        s
    }

    /// As [`Simplex::new`] but with unbounded originals.
    pub(crate) fn new_free(originals: usize, defs: &[Vec<(usize, BigInt)>]) -> Self {
        let n = originals + defs.len();
        let mut s = Simplex {
            rows: Vec::with_capacity(defs.len()),
            basic_of: Vec::with_capacity(defs.len()),
            row_of: vec![None; n],
            val: vec![Q::zero(); n],
            lower: vec![None; n],
            upper: vec![None; n],
            trail: Vec::new(),
            pivots: 0,
        };
        for (k, def) in defs.iter().enumerate() {
            let mut row: Row = def.iter().map(|(x, c)| (*x, Q::from_integer(c.clone()))).collect();
            row.sort_by_key(|(x, _)| *x);
            s.row_of[originals + k] = Some(s.rows.len());
            s.basic_of.push(originals + k);
            s.rows.push(row);
        }
        s
    }

    pub(crate) fn columns(&self) -> usize {
        self.val.len()
    }

    pub(crate) fn lower_bound(&self, x: usize) -> Option<(Q, Reason)> {
        self.lower[x].as_ref().map(|b| (b.value.clone(), b.reason))
    }

    pub(crate) fn upper_bound(&self, x: usize) -> Option<(Q, Reason)> {
        self.upper[x].as_ref().map(|b| (b.value.clone(), b.reason))
    }

    pub(crate) fn value(&self, x: usize) -> &Q {
        &self.val[x]
    }

    pub(crate) fn mark(&self) -> usize {
        self.trail.len()
    }

    pub(crate) fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (x, is_upper, old) = self.trail.pop().expect("trail not empty");
            if is_upper {
                self.upper[x] = old;
            } else {
                self.lower[x] = old;
            }
        }
    }

    pub(crate) fn assert_upper(&mut self, x: usize, v: Q, reason: Reason) -> Result<(), Vec<Reason>> {
        if let Some(u) = &self.upper[x] {
            if u.value <= v {
                return Ok(());
            }
        }
        if let Some(l) = &self.lower[x] {
            if v < l.value {
                return Err(vec![reason, l.reason]);
            }
        }
        let old = self.upper[x].replace(Bound { value: v.clone(), reason });
        self.trail.push((x, true, old));
        if self.row_of[x].is_none() && self.val[x] > v {
            self.update(x, v);
        }
        Ok(())
    }

    pub(crate) fn assert_lower(&mut self, x: usize, v: Q, reason: Reason) -> Result<(), Vec<Reason>> {
        if let Some(l) = &self.lower[x] {
            if l.value >= v {
                return Ok(());
            }
        }
        if let Some(u) = &self.upper[x] {
            if v > u.value {
                return Err(vec![reason, u.reason]);
            }
        }
        let old = self.lower[x].replace(Bound { value: v.clone(), reason });
        self.trail.push((x, false, old));
        if self.row_of[x].is_none() && self.val[x] < v {
            self.update(x, v);
        }
        Ok(())
    }

    fn update(&mut self, x: usize, v: Q) {
        let delta = &v - &self.val[x];
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(a) = coef(row, x) {
                let b = self.basic_of[r];
                self.val[b] = &self.val[b] + a * &delta;
            }
        }
        self.val[x] = v;
    }

    fn below_lower(&self, x: usize) -> bool {
        self.lower[x].as_ref().is_some_and(|l| self.val[x] < l.value)
    }

    fn above_upper(&self, x: usize) -> bool {
        self.upper[x].as_ref().is_some_and(|u| self.val[x] > u.value)
    }

    fn can_increase(&self, x: usize) -> bool {
        self.upper[x].as_ref().is_none_or(|u| self.val[x] < u.value)
    }

    fn can_decrease(&self, x: usize) -> bool {
        self.lower[x].as_ref().is_none_or(|l| self.val[x] > l.value)
    }

    /// Restores feasibility or returns the bounds that make it impossible.
    pub(crate) fn check(&mut self) -> Result<(), Vec<Reason>> {
        loop {
            let mut pick: Option<(usize, usize)> = None;
            for (r, &b) in self.basic_of.iter().enumerate() {
                if (self.below_lower(b) || self.above_upper(b)) && pick.is_none_or(|(_, pb)| b < pb) {
                    pick = Some((r, b));
                }
            }
            let Some((r, b)) = pick else { return Ok(()) };
            let raise = self.below_lower(b);
            let row = &self.rows[r];
            let entering = row
                .iter()
                .filter(|(x, a)| {
                    let pos = a.is_positive();
                    if raise == pos {
                        self.can_increase(*x)
                    } else {
                        self.can_decrease(*x)
                    }
                })
                .map(|(x, _)| *x)
                .min();
            match entering {
                Some(e) => {
                    let target = if raise {
                        self.lower[b].as_ref().map(|l| l.value.clone())
                    } else {
                        self.upper[b].as_ref().map(|u| u.value.clone())
                    }
                    .expect("violated bound exists");
                    self.pivot_and_update(r, e, target);
                }
                None => {
                    let mut why = Vec::with_capacity(row.len() + 1);
                    let own = if raise { &self.lower[b] } else { &self.upper[b] };
                    why.push(own.as_ref().expect("violated bound exists").reason);
                    for (x, a) in row {
                        let bound = if a.is_positive() == raise { &self.upper[*x] } else { &self.lower[*x] };
                        why.push(bound.as_ref().expect("blocking bound exists").reason);
                    }
                    return Err(why);
                }
            }
        }
    }

    fn pivot_and_update(&mut self, r: usize, e: usize, target: Q) {
        let b = self.basic_of[r];
        let a = coef(&self.rows[r], e).expect("entering variable in row").clone();
        let theta = (&target - &self.val[b]) / &a;
        self.val[b] = target;
        self.val[e] = &self.val[e] + &theta;
        for (r2, row) in self.rows.iter().enumerate() {
            if r2 != r {
                if let Some(c) = coef(row, e) {
                    let b2 = self.basic_of[r2];
                    self.val[b2] = &self.val[b2] + c * &theta;
                }
            }
        }
        self.pivot(r, e, &a);
    }

    fn pivot(&mut self, r: usize, e: usize, a: &Q) {
        self.pivots += 1;
        let b = self.basic_of[r];
        // b = a*e + rest  =>  e = (1/a) b - (1/a) rest
        let inv = Q::one() / a;
        let mut new_row: Row = self.rows[r].iter().filter(|(x, _)| *x != e).map(|(x, c)| (*x, -(c * &inv))).collect();
        let pos = new_row.partition_point(|(x, _)| *x < b);
        new_row.insert(pos, (b, inv));
        for r2 in 0..self.rows.len() {
            if r2 == r {
                continue;
            }
            if let Some(c) = coef(&self.rows[r2], e).cloned() {
                let without: Row = self.rows[r2].iter().filter(|(x, _)| *x != e).cloned().collect();
                self.rows[r2] = add_scaled(&without, &new_row, &c);
            }
        }
        self.rows[r] = new_row;
        self.row_of[b] = None;
        self.row_of[e] = Some(r);
        self.basic_of[r] = e;
    }
}
