//! SMT-LIB encodings of smart transitions.
//!
//! `uf` keeps balances implicit through `has-coin`/`active` predicates;
//! `int`, `nat` and `id` carry explicit `bal`/`sum` symbols tied to coins by
//! the numbering functions `count` and `ind`. Goal scripts are expected to be
//! UNSAT, consistency scripts SAT.

mod explicit;
mod family;
mod uf;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use family::{benchmark_family, goal_entry, write_family, write_scripts, Manifest, ManifestEntry, Role};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Uf,
    Int,
    Nat,
    Id,
}

impl EncodingKind {
    pub const ALL: [EncodingKind; 4] = [EncodingKind::Uf, EncodingKind::Int, EncodingKind::Nat, EncodingKind::Id];

    pub fn name(self) -> &'static str {
        match self {
            EncodingKind::Uf => "uf",
            EncodingKind::Int => "int",
            EncodingKind::Nat => "nat",
            EncodingKind::Id => "id",
        }
    }

    /// Naturals are axiomatised inside the script.
    pub fn has_nat_axioms(self) -> bool {
        matches!(self, EncodingKind::Nat | EncodingKind::Id)
    }

    /// Coins are numbered by position in linked lists.
    pub fn has_linked_lists(self) -> bool {
        self == EncodingKind::Id
    }
}

impl std::str::FromStr for EncodingKind {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EncodingKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| EncodingError::Unsupported(format!("unknown encoding `{s}`")))
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitionSpec {
    Mint1 {
        receiver: String,
    },
    MintN {
        receiver: String,
    },
    Transfer1 {
        from: String,
        to: String,
    },
    TransferN {
        from: String,
        to: String,
    },
    /// Fixed balance changes. `allow_mismatch` permits an expected sum change
    /// that differs from the total of the deltas (for negative tests).
    Deltas {
        deltas: Vec<(String, i64)>,
        expected_sum_delta: i64,
        allow_mismatch: bool,
    },
}

impl TransitionSpec {
    pub fn mint1() -> Self {
        TransitionSpec::Mint1 { receiver: "a0".into() }
    }

    pub fn mint_n() -> Self {
        TransitionSpec::MintN { receiver: "a0".into() }
    }

    pub fn transfer1() -> Self {
        TransitionSpec::Transfer1 { from: "a1".into(), to: "a2".into() }
    }

    pub fn transfer_n() -> Self {
        TransitionSpec::TransferN { from: "a1".into(), to: "a2".into() }
    }

    /// Deltas over `a0, a1, ..` with the matching sum change.
    pub fn deltas(ds: &[i64]) -> Self {
        TransitionSpec::Deltas {
            deltas: ds.iter().enumerate().map(|(i, d)| (format!("a{i}"), *d)).collect(),
            expected_sum_delta: ds.iter().sum(),
            allow_mismatch: false,
        }
    }

    /// File-name stem.
    pub fn name(&self) -> String {
        match self {
            TransitionSpec::Mint1 { .. } => "mint1".into(),
            TransitionSpec::MintN { .. } => "mintn".into(),
            TransitionSpec::Transfer1 { .. } => "transfer1".into(),
            TransitionSpec::TransferN { .. } => "transfern".into(),
            TransitionSpec::Deltas { deltas, .. } => {
                let mut s = String::from("deltas");
                for (_, d) in deltas {
                    let sign = if *d < 0 { 'm' } else { 'p' };
                    s.push_str(&format!("_{sign}{}", d.unsigned_abs()));
                }
                s
            }
        }
    }

    pub fn is_n(&self) -> bool {
        matches!(self, TransitionSpec::MintN { .. } | TransitionSpec::TransferN { .. })
    }
}

impl std::str::FromStr for TransitionSpec {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mint1" => Ok(TransitionSpec::mint1()),
            "mintn" => Ok(TransitionSpec::mint_n()),
            "transfer1" => Ok(TransitionSpec::transfer1()),
            "transfern" => Ok(TransitionSpec::transfer_n()),
            other => Err(EncodingError::Unsupported(format!("unknown transition `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Surjectivity {
    /// Only the instances the goal needs.
    #[default]
    RelevantInstances,
    /// Surjectivity onto the whole intervals `[1, sum]` and `[1, bal(a)]`.
    FullIntervals,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantFlags {
    pub surjectivity: Surjectivity,
    pub with_total: bool,
    /// Assume moved coins keep their relative order. Never changes verdicts.
    #[serde(default)]
    pub ordering: bool,
}

impl VariantFlags {
    pub fn new(full_surjectivity: bool, with_total: bool) -> Self {
        VariantFlags {
            surjectivity: if full_surjectivity { Surjectivity::FullIntervals } else { Surjectivity::RelevantInstances },
            with_total,
            ordering: false,
        }
    }

    pub fn with_ordering(self) -> Self {
        VariantFlags { ordering: true, ..self }
    }

    pub fn is_default(&self) -> bool {
        *self == VariantFlags::default()
    }

    /// `_surj`, `_total`, `_ord` suffixes.
    pub fn suffix(&self) -> String {
        let mut s = String::new();
        if self.surjectivity == Surjectivity::FullIntervals {
            s.push_str("_surj");
        }
        if self.with_total {
            s.push_str("_total");
        }
        if self.ordering {
            s.push_str("_ord");
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("invalid transition: {0}")]
    InvalidTransition(String),
}

/// A rendered script: a logic header, declarations and assertions, and a
/// single `(check-sat)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmtScript {
    lines: Vec<String>,
}

impl SmtScript {
    pub(crate) fn new(logic: &str) -> Self {
        SmtScript { lines: vec![format!("(set-logic {logic})")] }
    }

    pub(crate) fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.lines.push(s.into());
        self
    }

    pub(crate) fn lines_from<I: IntoIterator<Item = S>, S: Into<String>>(&mut self, it: I) -> &mut Self {
        self.lines.extend(it.into_iter().map(Into::into));
        self
    }

    pub(crate) fn blank(&mut self) -> &mut Self {
        self.line("")
    }

    pub(crate) fn finish(mut self) -> Self {
        if self.lines.last().is_some_and(|l| !l.is_empty()) {
            self.blank();
        }
        self.line("(check-sat)");
        self
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }

    pub fn contains_line(&self, line: &str) -> bool {
        self.lines.iter().any(|l| l == line)
    }
}

impl fmt::Display for SmtScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Goal script for `t` in encoding `k`. The negated expected impact makes it
/// UNSAT when the encoding is sound.
pub fn generate(t: &TransitionSpec, k: EncodingKind, v: VariantFlags) -> Result<SmtScript, EncodingError> {
    match k {
        EncodingKind::Uf => {
            if matches!(t, TransitionSpec::Deltas { .. }) {
                return Err(EncodingError::Unsupported("uf has no explicit balances for delta tasks".into()));
            }
            Ok(uf::goal(t))
        }
        _ => {
            if k == EncodingKind::Id && (v.with_total || v.surjectivity != Surjectivity::RelevantInstances) {
                return Err(EncodingError::Unsupported(
                    "id already asserts surjectivity through its lists; variants exist only for int and nat".into(),
                ));
            }
            explicit::goal(t, k, v)
        }
    }
}

/// The axioms of `k` alone; expected SAT.
pub fn generate_consistency(k: EncodingKind) -> SmtScript {
    match k {
        EncodingKind::Uf => uf::consistency(),
        _ => explicit::consistency(k),
    }
}

/// Surjectivity assertions of an explicit goal script.
pub fn surjectivity_block(k: EncodingKind, t: &TransitionSpec, v: VariantFlags) -> Result<Vec<String>, EncodingError> {
    if k == EncodingKind::Uf {
        return Err(EncodingError::Unsupported("uf has no numbering functions".into()));
    }
    let eff = explicit::Effect::of(t)?;
    Ok(explicit::surjectivity(k, &eff, v))
}

/// Intermediate lemmas followed by the main script that assumes them.
/// These lemma choices are this crate's own.
pub fn lemma_split(t: &TransitionSpec, k: EncodingKind) -> Result<Vec<(String, SmtScript)>, EncodingError> {
    if k == EncodingKind::Uf {
        return Err(EncodingError::Unsupported("lemma splits exist for explicit encodings only".into()));
    }
    explicit::lemma_split(t, k)
}
