//! Finite coin worlds: ownership and activity of coins, the invariants
//! relating them to balances and sums, and the mint and transfer
//! transitions.
//!
//! Coins are indexed `0..n_coins` (at most 64) and stored as bit masks.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Execution};

pub const MAX_COINS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CoinError {
    #[error("address {0} is outside the world")]
    AddressOutOfRange(usize),
    #[error("coin {0} is outside the world")]
    CoinOutOfRange(usize),
    #[error("worlds have different address or coin universes")]
    UniverseMismatch,
    #[error("at most {MAX_COINS} coins are supported")]
    TooManyCoins,
    #[error("empty trace")]
    EmptyTrace,
    #[error("transfer needs two different addresses")]
    SameAddress,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("counting functions are not injective: {0}")]
    NonInjective(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoinWorld {
    n_coins: usize,
    active: u64,
    /// `has[a]` is the set of coins owned by address `a`.
    has: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceSummary {
    pub bal: Vec<u64>,
    pub sum: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvReport {
    pub i1: bool,
    pub i2: bool,
    pub i3: bool,
}

impl InvReport {
    pub fn all(&self) -> bool {
        self.i1 && self.i2 && self.i3
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ErrorMetrics {
    pub inact: BTreeSet<usize>,
    pub least: BTreeSet<usize>,
    pub most: BTreeSet<usize>,
    pub pairs: BTreeSet<(usize, usize)>,
    pub v_leq: u64,
    pub v_geq: u64,
}

/// `count[c]` numbers coins; `idx[a][c]` numbers coins per address.
/// Values are in `1..=n_coins`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingFunctions {
    pub count: Vec<u64>,
    pub idx: Vec<Vec<u64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub ax1: bool,
    pub ax2: bool,
    /// Whenever both axioms and the invariants hold, the summary equals the
    /// derived balances.
    pub conclusion: bool,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.ax1 && self.ax2 && self.conclusion
    }
}

fn bit(c: usize) -> u64 {
    1u64 << c
}

impl CoinWorld {
    /// World with no active and no owned coins.
    pub fn empty(n_addresses: usize, n_coins: usize) -> Result<Self, CoinError> {
        if n_coins > MAX_COINS {
            return Err(CoinError::TooManyCoins);
        }
        Ok(CoinWorld { n_coins, active: 0, has: vec![0; n_addresses] })
    }

    pub fn n_addresses(&self) -> usize {
        self.has.len()
    }

    pub fn n_coins(&self) -> usize {
        self.n_coins
    }

    fn all_coins(&self) -> u64 {
        if self.n_coins == MAX_COINS {
            u64::MAX
        } else {
            bit(self.n_coins) - 1
        }
    }

    fn check_addr(&self, a: usize) -> Result<(), CoinError> {
        if a < self.has.len() {
            Ok(())
        } else {
            Err(CoinError::AddressOutOfRange(a))
        }
    }

    fn check_coin(&self, c: usize) -> Result<(), CoinError> {
        if c < self.n_coins {
            Ok(())
        } else {
            Err(CoinError::CoinOutOfRange(c))
        }
    }

    pub fn is_active(&self, c: usize) -> bool {
        self.active & bit(c) != 0
    }

    pub fn has_coin(&self, a: usize, c: usize) -> bool {
        self.has[a] & bit(c) != 0
    }

    pub fn set_active(&mut self, c: usize, on: bool) -> Result<(), CoinError> {
        self.check_coin(c)?;
        if on {
            self.active |= bit(c);
        } else {
            self.active &= !bit(c);
        }
        Ok(())
    }

    pub fn set_has(&mut self, a: usize, c: usize, on: bool) -> Result<(), CoinError> {
        self.check_addr(a)?;
        self.check_coin(c)?;
        if on {
            self.has[a] |= bit(c);
        } else {
            self.has[a] &= !bit(c);
        }
        Ok(())
    }

    pub fn active_coins(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_coins).filter(|c| self.is_active(*c))
    }

    pub fn owned_coins(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_coins).filter(move |c| self.has_coin(a, *c))
    }

    fn owned_by_any(&self) -> u64 {
        self.has.iter().fold(0, |acc, h| acc | h)
    }

    /// Coins owned by at least two addresses.
    fn owned_twice(&self) -> u64 {
        let mut once = 0u64;
        let mut twice = 0u64;
        for h in &self.has {
            twice |= once & h;
            once |= h;
        }
        twice
    }

    fn same_universe(&self, other: &CoinWorld) -> Result<(), CoinError> {
        if self.n_coins == other.n_coins && self.has.len() == other.has.len() {
            Ok(())
        } else {
            Err(CoinError::UniverseMismatch)
        }
    }

    /// Number of worlds over the given universe.
    pub fn count(n_addresses: usize, n_coins: usize) -> u64 {
        1u64 << (n_coins * (n_addresses + 1))
    }

    /// The `index`-th world in a fixed enumeration of all worlds; the low
    /// bits are the active set, then one mask per address.
    pub fn from_index(n_addresses: usize, n_coins: usize, index: u64) -> CoinWorld {
        let mask = if n_coins == 0 { 0 } else { (1u64 << n_coins) - 1 };
        let active = index & mask;
        let has = (0..n_addresses).map(|a| (index >> (n_coins * (a + 1))) & mask).collect();
        CoinWorld { n_coins, active, has }
    }
}

/// All worlds with exactly `n_addresses` and `n_coins`.
pub fn all_worlds(n_addresses: usize, n_coins: usize) -> impl Iterator<Item = CoinWorld> {
    assert!(n_coins * (n_addresses + 1) < 64, "universe too large to enumerate");
    (0..CoinWorld::count(n_addresses, n_coins)).map(move |i| CoinWorld::from_index(n_addresses, n_coins, i))
}

/// Checks `pred` on every world of every universe up to the given sizes and
/// returns the first counterexample.
pub fn find_world<F>(max_addresses: usize, max_coins: usize, exec: Execution, pred: F) -> Option<CoinWorld>
where
    F: Fn(&CoinWorld) -> bool + Sync + Send,
{
    let mut universes = Vec::new();
    for a in 0..=max_addresses {
        for c in 0..=max_coins {
            universes.push((a, c));
        }
    }
    exec::find_map_first(exec, &universes, |&(a, c)| {
        let n = CoinWorld::count(a, c);
        let idx: Vec<u64> = (0..n).collect();
        exec::find_map_first(exec, &idx, |&i| {
            let w = CoinWorld::from_index(a, c, i);
            pred(&w).then_some(w)
        })
    })
}

pub fn derived_balances(w: &CoinWorld) -> BalanceSummary {
    BalanceSummary { bal: w.has.iter().map(|h| h.count_ones() as u64).collect(), sum: w.active.count_ones() as u64 }
}

pub fn check_inv(w: &CoinWorld) -> InvReport {
    let owned = w.owned_by_any();
    InvReport { i1: owned & !w.active == 0, i2: w.active & !owned == 0, i3: w.owned_twice() == 0 }
}

fn coins_of(mask: u64) -> BTreeSet<usize> {
    (0..64).filter(|c| mask & bit(*c) != 0).collect()
}

pub fn error_metrics(w: &CoinWorld) -> ErrorMetrics {
    let owned = w.owned_by_any();
    let twice = w.owned_twice();
    let inact = owned & !w.active;
    let least = w.active & !owned;
    let mut pairs = BTreeSet::new();
    for (a, h) in w.has.iter().enumerate() {
        for c in coins_of(h & twice) {
            pairs.insert((a, c));
        }
    }
    let v_leq = least.count_ones() as u64;
    let v_geq = inact.count_ones() as u64 + pairs.len() as u64 - twice.count_ones() as u64;
    ErrorMetrics { inact: coins_of(inact), least: coins_of(least), most: coins_of(twice), pairs, v_leq, v_geq }
}

/// Membership of `w` in the preimage of `bs` under the translation function.
pub fn in_f(w: &CoinWorld, bs: &BalanceSummary) -> bool {
    let d = derived_balances(w);
    let m = error_metrics(w);
    d == *bs && (m.v_leq == 0 || m.v_geq == 0)
}

/// `mint1(a, c)` between two worlds.
pub fn is_mint1(old: &CoinWorld, new: &CoinWorld, a: usize, c: usize) -> Result<bool, CoinError> {
    old.same_universe(new)?;
    old.check_addr(a)?;
    old.check_coin(c)?;
    let m1 = !old.is_active(c) && new.is_active(c);
    let m2 = new.has_coin(a, c) && old.owned_by_any() & bit(c) == 0;
    let m3 = (old.active ^ new.active) & !bit(c) == 0;
    let m4 = old.has.iter().zip(&new.has).enumerate().all(|(a2, (o, n))| {
        let diff = o ^ n;
        if a2 == a {
            diff & !bit(c) == 0
        } else {
            diff == 0
        }
    });
    Ok(m1 && m2 && m3 && m4)
}

/// Some coin makes `mint1(a, _)` hold.
pub fn mint1_coin(old: &CoinWorld, new: &CoinWorld, a: usize) -> Result<Option<usize>, CoinError> {
    old.same_universe(new)?;
    old.check_addr(a)?;
    for c in 0..old.n_coins {
        if is_mint1(old, new, a, c)? {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// Checks the balance and sum effect of a `mint1(a, c)` pair.
pub fn check_mint1_soundness(old: &CoinWorld, new: &CoinWorld, a: usize, c: usize) -> Result<bool, CoinError> {
    if !is_mint1(old, new, a, c)? {
        return Err(CoinError::Precondition(format!("not a mint1(a{}, c{}) pair", a + 1, c + 1)));
    }
    let o = derived_balances(old);
    let n = derived_balances(new);
    let others = (0..old.n_addresses()).filter(|x| *x != a).all(|x| o.bal[x] == n.bal[x]);
    Ok(n.sum == o.sum + 1 && n.bal[a] == o.bal[a] + 1 && others)
}

/// All `mint1` successors of `old`.
pub fn mint1_successors(old: &CoinWorld) -> Vec<(usize, usize, CoinWorld)> {
    let free = !old.active & !old.owned_by_any() & old.all_coins();
    let mut out = Vec::new();
    for a in 0..old.n_addresses() {
        for c in coins_of(free) {
            let mut new = old.clone();
            new.active |= bit(c);
            new.has[a] |= bit(c);
            out.push((a, c, new));
        }
    }
    out
}

/// Each step of the trace mints one coin into `a`.
pub fn is_mint_n_trace(trace: &[CoinWorld], a: usize) -> Result<bool, CoinError> {
    let first = trace.first().ok_or(CoinError::EmptyTrace)?;
    first.check_addr(a)?;
    for w in trace.windows(2) {
        if mint1_coin(&w[0], &w[1], a)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For a valid trace, the sum and the balance of `a` grow by the number of
/// steps while other balances stay fixed.
pub fn check_mint_n_soundness(trace: &[CoinWorld], a: usize) -> Result<bool, CoinError> {
    if !is_mint_n_trace(trace, a)? {
        return Err(CoinError::Precondition(format!("not a mint trace into a{}", a + 1)));
    }
    let n = trace.len() as u64 - 1;
    let b0 = derived_balances(&trace[0]);
    let bn = derived_balances(trace.last().expect("non-empty"));
    let others = (0..b0.bal.len()).filter(|x| *x != a).all(|x| b0.bal[x] == bn.bal[x]);
    Ok(bn.sum == b0.sum + n && bn.bal[a] == b0.bal[a] + n && others)
}

/// One coin owned by `from` moves to `to`; nothing else changes.
pub fn is_transfer1(old: &CoinWorld, new: &CoinWorld, from: usize, to: usize) -> Result<bool, CoinError> {
    old.same_universe(new)?;
    old.check_addr(from)?;
    old.check_addr(to)?;
    if from == to {
        return Err(CoinError::SameAddress);
    }
    if old.active != new.active {
        return Ok(false);
    }
    let moved = old.has[from] & !new.has[from];
    if moved.count_ones() != 1 {
        return Ok(false);
    }
    let mut expect = old.has.clone();
    expect[from] &= !moved;
    expect[to] |= moved;
    Ok(old.has[to] & moved == 0 && expect == new.has)
}

fn check_injective(cf: &CountingFunctions, w: &CoinWorld) -> Result<(), CoinError> {
    let n = w.n_coins as u64;
    let ok = |vals: &[u64]| {
        let set: BTreeSet<_> = vals.iter().collect();
        set.len() == vals.len() && vals.iter().all(|v| (1..=n).contains(v))
    };
    if cf.count.len() != w.n_coins || !ok(&cf.count) {
        return Err(CoinError::NonInjective("count".into()));
    }
    if cf.idx.len() != w.n_addresses() {
        return Err(CoinError::NonInjective("idx has the wrong number of addresses".into()));
    }
    for (a, row) in cf.idx.iter().enumerate() {
        if row.len() != w.n_coins || !ok(row) {
            return Err(CoinError::NonInjective(format!("idx(a{}, _)", a + 1)));
        }
    }
    Ok(())
}

/// Checks `active(c) <-> count(c) <= sum` and
/// `has(a, c) <-> idx(a, c) <= bal(a)`.
pub fn check_explicit_axioms(
    w: &CoinWorld,
    bs: &BalanceSummary,
    cf: &CountingFunctions,
) -> Result<AxiomReport, CoinError> {
    check_injective(cf, w)?;
    if bs.bal.len() != w.n_addresses() {
        return Err(CoinError::UniverseMismatch);
    }
    let ax1 = (0..w.n_coins).all(|c| w.is_active(c) == (cf.count[c] <= bs.sum));
    let ax2 = (0..w.n_addresses()).all(|a| (0..w.n_coins).all(|c| w.has_coin(a, c) == (cf.idx[a][c] <= bs.bal[a])));
    let conclusion = !(ax1 && ax2 && check_inv(w).all()) || {
        let d = derived_balances(w);
        d.sum == bs.sum && d.bal == bs.bal && bs.bal.iter().sum::<u64>() == bs.sum
    };
    Ok(AxiomReport { ax1, ax2, conclusion })
}

/// Numbers the coins in `first` before those in `second` before the rest.
fn layered(n: usize, first: u64, second: u64) -> Vec<u64> {
    let mut out = vec![0; n];
    let mut next = 1;
    for layer in [first, second & !first, !(first | second)] {
        for (c, slot) in out.iter_mut().enumerate() {
            if layer & bit(c) != 0 {
                *slot = next;
                next += 1;
            }
        }
    }
    out
}

fn require_exact(w: &CoinWorld, bs: &BalanceSummary) -> Result<(), CoinError> {
    let m = error_metrics(w);
    if !in_f(w, bs) || m.v_leq != 0 || m.v_geq != 0 {
        return Err(CoinError::Precondition("world does not realise the summary exactly".into()));
    }
    Ok(())
}

/// Canonical counting functions for a world whose invariants hold.
pub fn build_counting(w: &CoinWorld, bs: &BalanceSummary) -> Result<CountingFunctions, CoinError> {
    require_exact(w, bs)?;
    Ok(CountingFunctions {
        count: layered(w.n_coins, w.active, 0),
        idx: w.has.iter().map(|h| layered(w.n_coins, *h, 0)).collect(),
    })
}

fn nested(a: u64, b: u64) -> Option<(u64, u64)> {
    if a & !b == 0 {
        Some((a, b))
    } else if b & !a == 0 {
        Some((b, a))
    } else {
        None
    }
}

/// One `count` and one `idx` serving two worlds at once, as needed when the
/// old and new states share their counting functions. Requires the active
/// sets, and each address's owned sets, to be nested.
pub fn build_counting_pair(old: &CoinWorld, new: &CoinWorld) -> Result<CountingFunctions, CoinError> {
    old.same_universe(new)?;
    require_exact(old, &derived_balances(old))?;
    require_exact(new, &derived_balances(new))?;
    let (small, big) =
        nested(old.active, new.active).ok_or_else(|| CoinError::Precondition("active sets are not nested".into()))?;
    let count = layered(old.n_coins, small, big);
    let mut idx = Vec::with_capacity(old.n_addresses());
    for (a, (o, n)) in old.has.iter().zip(&new.has).enumerate() {
        let (small, big) = nested(*o, *n)
            .ok_or_else(|| CoinError::Precondition(format!("owned sets of a{} are not nested", a + 1)))?;
        idx.push(layered(old.n_coins, small, big));
    }
    Ok(CountingFunctions { count, idx })
}

/// A world together with the names used in its text form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedWorld {
    pub addresses: Vec<String>,
    pub coins: Vec<String>,
    pub world: CoinWorld,
}

impl NamedWorld {
    /// Default names `a1..` and `c1..`.
    pub fn with_default_names(world: CoinWorld) -> Self {
        NamedWorld {
            addresses: (1..=world.n_addresses()).map(|i| format!("a{i}")).collect(),
            coins: (1..=world.n_coins()).map(|i| format!("c{i}")).collect(),
            world,
        }
    }
}

/// Parses the line format: `addr NAME..`, `coin NAME..`, `active COIN..`,
/// `has ADDR COIN..`. Declarations must precede their uses; `#` starts a
/// comment.
pub fn parse_world(text: &str) -> Result<NamedWorld, CoinError> {
    let mut addresses: Vec<String> = Vec::new();
    let mut coins: Vec<String> = Vec::new();
    let mut active: Vec<(usize, String)> = Vec::new();
    let mut has: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(kw) = words.next() else { continue };
        let rest: Vec<String> = words.map(str::to_string).collect();
        let err = |msg: String| CoinError::Parse { line, msg };
        match kw {
            "addr" | "coin" => {
                let target = if kw == "addr" { &mut addresses } else { &mut coins };
                for name in rest {
                    if target.contains(&name) {
                        return Err(err(format!("`{name}` declared twice")));
                    }
                    target.push(name);
                }
            }
            "active" => active.extend(rest.into_iter().map(|c| (line, c))),
            "has" => {
                let (a, cs) = rest.split_first().ok_or_else(|| err("`has` needs an address".into()))?;
                if cs.is_empty() {
                    return Err(err("`has` needs at least one coin".into()));
                }
                has.extend(cs.iter().map(|c| (line, a.clone(), c.clone())));
            }
            other => return Err(err(format!("unknown keyword `{other}`"))),
        }
    }
    if coins.len() > MAX_COINS {
        return Err(CoinError::TooManyCoins);
    }
    let find = |names: &[String], n: &str, what: &str, line: usize| {
        names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| CoinError::Parse { line, msg: format!("undeclared {what} `{n}`") })
    };
    let mut world = CoinWorld::empty(addresses.len(), coins.len())?;
    for (line, c) in &active {
        world.set_active(find(&coins, c, "coin", *line)?, true)?;
    }
    for (line, a, c) in &has {
        world.set_has(find(&addresses, a, "address", *line)?, find(&coins, c, "coin", *line)?, true)?;
    }
    Ok(NamedWorld { addresses, coins, world })
}

impl fmt::Display for NamedWorld {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "addr {}", self.addresses.join(" "))?;
        writeln!(f, "coin {}", self.coins.join(" "))?;
        let act: Vec<&str> = self.world.active_coins().map(|c| self.coins[c].as_str()).collect();
        if !act.is_empty() {
            writeln!(f, "active {}", act.join(" "))?;
        }
        for (a, name) in self.addresses.iter().enumerate() {
            let owned: Vec<&str> = self.world.owned_coins(a).map(|c| self.coins[c].as_str()).collect();
            if !owned.is_empty() {
                writeln!(f, "has {name} {}", owned.join(" "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// c1 active and unowned; c2 active and owned by both addresses.
    fn counterexample() -> CoinWorld {
        parse_world("addr a1 a2\ncoin c1 c2\nactive c1 c2\nhas a1 c2\nhas a2 c2\n").unwrap().world
    }

    #[test]
    fn counterexample_metrics() {
        let w = counterexample();
        let m = error_metrics(&w);
        assert_eq!(m.least, BTreeSet::from([0]));
        assert_eq!(m.most, BTreeSet::from([1]));
        assert_eq!(m.pairs, BTreeSet::from([(0, 1), (1, 1)]));
        assert_eq!((m.v_leq, m.v_geq), (1, 1));
        assert!(!in_f(&w, &derived_balances(&w)));
        let bs = derived_balances(&w);
        assert_eq!(bs.bal.iter().sum::<u64>(), bs.sum);
        assert!(!check_inv(&w).all());
    }

    #[test]
    fn invariants_separately() {
        let w = parse_world("addr a\ncoin c\nhas a c").unwrap().world;
        assert_eq!(check_inv(&w), InvReport { i1: false, i2: true, i3: true });
        let m = error_metrics(&w);
        assert_eq!(m.v_geq, 1);
        let w = parse_world("addr a\ncoin c\nactive c").unwrap().world;
        assert_eq!(check_inv(&w), InvReport { i1: true, i2: false, i3: true });
        assert!(in_f(&w, &derived_balances(&w)));
    }

    #[test]
    fn mint_and_transfer() {
        let old = parse_world("addr a1 a2\ncoin c1 c2\nactive c1\nhas a2 c1").unwrap().world;
        let succ = mint1_successors(&old);
        assert_eq!(succ.len(), 2);
        for (a, c, new) in &succ {
            assert!(check_mint1_soundness(&old, new, *a, *c).unwrap());
        }
        assert!(!is_mint1(&old, &old, 0, 0).unwrap());
        let mut moved = old.clone();
        moved.set_has(1, 0, false).unwrap();
        moved.set_has(0, 0, true).unwrap();
        assert!(is_transfer1(&old, &moved, 1, 0).unwrap());
        assert!(!is_transfer1(&old, &moved, 0, 1).unwrap());
        assert_eq!(is_transfer1(&old, &moved, 0, 0), Err(CoinError::SameAddress));
    }

    #[test]
    fn mint_n() {
        let w0 = CoinWorld::empty(2, 3).unwrap();
        let (_, _, w1) = mint1_successors(&w0).into_iter().find(|(a, _, _)| *a == 1).unwrap();
        let (_, _, w2) = mint1_successors(&w1).into_iter().find(|(a, _, _)| *a == 1).unwrap();
        let trace = vec![w0.clone(), w1.clone(), w2];
        assert!(check_mint_n_soundness(&trace, 1).unwrap());
        assert!(is_mint_n_trace(std::slice::from_ref(&w0), 0).unwrap());
        assert!(!is_mint_n_trace(&[w0, w1.clone(), w1], 1).unwrap());
    }

    #[test]
    fn counting_functions() {
        let w = parse_world("addr a1 a2\ncoin c1 c2 c3\nactive c2 c3\nhas a1 c3\nhas a2 c2").unwrap().world;
        let bs = derived_balances(&w);
        let cf = build_counting(&w, &bs).unwrap();
        assert!(check_explicit_axioms(&w, &bs, &cf).unwrap().holds());
        let mut bad = cf.clone();
        bad.count.swap(0, 1);
        assert!(!check_explicit_axioms(&w, &bs, &bad).unwrap().ax1);
        for (_, _, new) in mint1_successors(&w) {
            let cf = build_counting_pair(&w, &new).unwrap();
            assert!(check_explicit_axioms(&w, &bs, &cf).unwrap().holds());
            assert!(check_explicit_axioms(&new, &derived_balances(&new), &cf).unwrap().holds());
        }
    }

    #[test]
    fn text_round_trip() {
        let nw = NamedWorld::with_default_names(counterexample());
        assert_eq!(parse_world(&nw.to_string()).unwrap(), nw);
        assert!(matches!(parse_world("coin c\nhas a c"), Err(CoinError::Parse { line: 2, .. })));
    }
}
