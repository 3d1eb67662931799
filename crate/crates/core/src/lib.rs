//! Sum logic (SL): a decidable extension of Presburger arithmetic with
//! unbounded sums over a finite address domain, plus the coin-world model,
//! SMT-LIB benchmark generation and a two-counter machine reduction.

pub mod cm2;
pub mod coin;
pub mod crosscheck;
pub mod encodings;
pub mod exec;
pub mod gen;
pub mod harness;
pub mod lia;
pub mod parser;
pub mod reduction;
pub mod search;
pub mod sl;
