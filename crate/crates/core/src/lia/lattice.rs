//! Integer feasibility of one conjunction of bounds.
//!
//! Rows pinned to a single value are solved exactly over the integers
//! (`x = x0 + V t`), every other bound is rewritten in `t` and tightened by
//! the gcd of its coefficients, and branch and bound runs on `t`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::simplex::{Reason, Simplex, Q};

#[derive(Clone, Debug)]
pub(crate) struct ColBounds {
    pub lo: Option<(Q, Reason)>,
    pub hi: Option<(Q, Reason)>,
}

pub(crate) enum IntOutcome {
    Point(Vec<BigInt>),
    Infeasible(Vec<Reason>),
    Budget,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unimodular column reduction of `a` (rows over `n` columns): returns `u`
/// with `a u` lower echelon, together with the pivot column of each row.
type Matrix = Vec<Vec<BigInt>>;
type RowBound = Option<(BigInt, u32)>;

fn column_echelon(mut a: Matrix, n: usize) -> (Matrix, Matrix, Vec<Option<usize>>) {
    let mut u: Matrix = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect()).collect();
    let mut pivots = Vec::with_capacity(a.len());
    let mut col = 0;
    let col_op = |m: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let s = &row[src] * q;
            row[dst] -= s;
        }
    };
    let swap = |m: &mut Vec<Vec<BigInt>>, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    };
    for i in 0..a.len() {
        if col >= n {
            pivots.push(None);
            continue;
        }
        for j in col + 1..n {
            while !a[i][j].is_zero() {
                let q = &a[i][col] / &a[i][j];
                col_op(&mut a, col, j, &q);
                col_op(&mut u, col, j, &q);
                swap(&mut a, col, j);
                swap(&mut u, col, j);
            }
        }
        if a[i][col].is_zero() {
            pivots.push(None);
        } else {
            pivots.push(Some(col));
            col += 1;
        }
    }
    (a, u, pivots)
}

fn ceil(q: &Q) -> BigInt {
    q.ceil().to_integer()
}

fn floor(q: &Q) -> BigInt {
    q.floor().to_integer()
}

/// Columns `0..n` are free integers (besides their bounds); column `n + k`
/// is `defs[k]`. `tick` returns false once the budget is spent.
pub(crate) fn integer_point(
    n: usize,
    defs: &[Vec<(usize, BigInt)>],
    bounds: &[ColBounds],
    tick: &mut dyn FnMut() -> bool,
) -> IntOutcome {
    let dense = |j: usize| -> Vec<BigInt> {
        let mut r = vec![BigInt::zero(); n];
        if j < n {
            r[j] = BigInt::one();
        } else {
            for (x, c) in &defs[j - n] {
                r[*x] += c;
            }
        }
        r
    };
    let fixed = |b: &ColBounds| match (&b.lo, &b.hi) {
        (Some((l, _)), Some((h, _))) => l == h && l.is_integer(),
        _ => false,
    };

    let mut eq_rows = Vec::new();
    let mut eq_rhs = Vec::new();
    let mut eq_why: Vec<Reason> = Vec::new();
    for (j, b) in bounds.iter().enumerate() {
        if fixed(b) {
            let (l, lr) = b.lo.as_ref().expect("fixed");
            eq_rows.push(dense(j));
            eq_rhs.push(l.to_integer());
            eq_why.push(*lr);
            eq_why.push(b.hi.as_ref().expect("fixed").1);
        }
    }

    let (ech, u, pivots) = column_echelon(eq_rows, n);
    let rank = pivots.iter().flatten().count();
    let mut y = vec![BigInt::zero(); n];
    for (i, p) in pivots.iter().enumerate() {
        let known: BigInt = (0..rank).map(|c| &ech[i][c] * &y[c]).sum();
        let rest = &eq_rhs[i] - known;
        match p {
            Some(c) => {
                let (q, r) = rest.div_rem(&ech[i][*c]);
                if !r.is_zero() {
                    return IntOutcome::Infeasible(eq_why);
                }
                y[*c] = q;
            }
            None if !rest.is_zero() => return IntOutcome::Infeasible(eq_why),
            None => {}
        }
    }
    let x0: Vec<BigInt> = (0..n).map(|i| dot(&u[i][..rank], &y[..rank])).collect();
    let free = n - rank;
    let v: Vec<Vec<BigInt>> = (0..n).map(|i| u[i][rank..].to_vec()).collect();

    // Remaining bounds as tightened rows over t; tag k stands for why[k].
    let mut why: Vec<Reason> = Vec::new();
    let mut rows: Vec<Vec<(usize, BigInt)>> = Vec::new();
    let mut row_bounds: Vec<(RowBound, RowBound)> = Vec::new();
    for (j, b) in bounds.iter().enumerate() {
        if fixed(b) || (b.lo.is_none() && b.hi.is_none()) {
            continue;
        }
        let r = dense(j);
        let k0 = dot(&r, &x0);
        let coeffs: Vec<BigInt> = (0..free).map(|c| r.iter().zip(&v).map(|(a, vi)| a * &vi[c]).sum()).collect();
        let g = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            let k0q = Q::from_integer(k0);
            if let Some((l, lr)) = &b.lo {
                if k0q < *l {
                    let mut w = eq_why;
                    w.push(*lr);
                    return IntOutcome::Infeasible(w);
                }
            }
            if let Some((h, hr)) = &b.hi {
                if k0q > *h {
                    let mut w = eq_why;
                    w.push(*hr);
                    return IntOutcome::Infeasible(w);
                }
            }
            continue;
        }
        let mut tag = |r: Reason| {
            why.push(r);
            (why.len() - 1) as u32
        };
        let lo = b.lo.as_ref().map(|(l, lr)| ((ceil(l) - &k0).div_ceil(&g), tag(*lr)));
        let hi = b.hi.as_ref().map(|(h, hr)| ((floor(h) - &k0).div_floor(&g), tag(*hr)));
        rows.push(coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c / &g)).collect());
        row_bounds.push((lo, hi));
    }

    let mut s = Simplex::new_free(free, &rows);
    let mut used: BTreeSet<u32> = BTreeSet::new();
    let infeasible = |r: Vec<Reason>, used: &mut BTreeSet<u32>| {
        used.extend(r.into_iter().filter_map(|r| match r {
            Reason::Lit(t) => Some(t),
            Reason::Structural => None,
        }))
    };
    for (k, (lo, hi)) in row_bounds.into_iter().enumerate() {
        for (is_hi, b) in [(false, lo), (true, hi)] {
            let Some((val, t)) = b else { continue };
            let res = if is_hi {
                s.assert_upper(free + k, Q::from_integer(val), Reason::Lit(t))
            } else {
                s.assert_lower(free + k, Q::from_integer(val), Reason::Lit(t))
            };
            if let Err(r) = res {
                infeasible(r, &mut used);
                return IntOutcome::Infeasible(finish(eq_why, &why, &used));
            }
        }
    }

    // Depth-first over t; a frame holds the split column and its upper side.
    let mut stack: Vec<(usize, Q, usize, bool)> = Vec::new();
    let mut descend = true;
    loop {
        if descend {
            if !tick() {
                return IntOutcome::Budget;
            }
            match s.check() {
                Err(r) => {
                    infeasible(r, &mut used);
                    descend = false;
                }
                Ok(()) => match (0..free).find(|&c| !s.value(c).is_integer()) {
                    None => {
                        let t: Vec<BigInt> = (0..free).map(|c| s.value(c).to_integer()).collect();
                        let x = (0..n).map(|i| &x0[i] + dot(&v[i], &t)).collect();
                        return IntOutcome::Point(x);
                    }
                    Some(c) => {
                        let val = s.value(c).clone();
                        let mark = s.mark();
                        stack.push((c, Q::from_integer(val.ceil().to_integer()), mark, false));
                        s.assert_upper(c, Q::from_integer(val.floor().to_integer()), Reason::Structural)
                            .expect("split below a fractional value");
                    }
                },
            }
            continue;
        }
        let Some(top) = stack.last_mut() else {
            return IntOutcome::Infeasible(finish(eq_why, &why, &used));
        };
        s.undo(top.2);
        if top.3 {
            stack.pop();
            continue;
        }
        top.3 = true;
        let (c, hi) = (top.0, top.1.clone());
        s.assert_lower(c, hi, Reason::Structural).expect("split above a fractional value");
        descend = true;
    }
}

fn finish(mut out: Vec<Reason>, why: &[Reason], used: &BTreeSet<u32>) -> Vec<Reason> {
    out.extend(used.iter().map(|&t| why[t as usize]));
    out
}
