//! The benchmark family and its manifest.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{generate, generate_consistency, lemma_split, EncodingKind, SmtScript, TransitionSpec, VariantFlags};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Goal,
    Lemma,
    Consistency,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Path relative to the manifest.
    pub file: String,
    pub role: Role,
    /// `SAT` or `UNSAT`.
    pub expected: String,
    pub transition: Option<String>,
    pub kind: EncodingKind,
    pub surj: bool,
    pub total: bool,
    /// Scripts whose verdicts should agree with or support this one.
    pub related: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub benchmarks: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn goals(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.benchmarks.iter().filter(|e| e.role == Role::Goal)
    }

    pub fn get(&self, id: &str) -> Option<&ManifestEntry> {
        self.benchmarks.iter().find(|e| e.id == id)
    }
}

pub fn goal_entry(t: &TransitionSpec, k: EncodingKind, v: VariantFlags) -> ManifestEntry {
    let id = format!("{}_{}{}", t.name(), k, v.suffix());
    let mut related = Vec::new();
    if v.with_total {
        related.push(format!("{}_{}{}", t.name(), k, VariantFlags { with_total: false, ..v }.suffix()));
    }
    ManifestEntry {
        file: format!("{id}.smt2"),
        id,
        role: Role::Goal,
        expected: "UNSAT".into(),
        transition: Some(t.name()),
        kind: k,
        surj: v.surjectivity == super::Surjectivity::FullIntervals,
        total: v.with_total,
        related,
    }
}

/// Goal scripts: every transition in every encoding, the three delta
/// tasks, and the surjectivity and total variants of `mint1`/`transfer1`.
fn goals() -> Vec<(TransitionSpec, EncodingKind, VariantFlags)> {
    let mut out = Vec::new();
    let transitions =
        [TransitionSpec::mint1(), TransitionSpec::mint_n(), TransitionSpec::transfer1(), TransitionSpec::transfer_n()];
    for t in &transitions {
        for k in EncodingKind::ALL {
            out.push((t.clone(), k, VariantFlags::default()));
        }
    }
    for ds in [&[3, -3][..], &[4, -2], &[5, -3, -1]] {
        out.push((TransitionSpec::deltas(ds), EncodingKind::Int, VariantFlags::default()));
    }
    for t in [TransitionSpec::mint1(), TransitionSpec::transfer1()] {
        for k in [EncodingKind::Nat, EncodingKind::Int] {
            for (surj, total) in [(true, false), (false, true), (true, true)] {
                out.push((t.clone(), k, VariantFlags::new(surj, total)));
            }
        }
    }
    out
}

/// Goal, consistency and lemma scripts with their manifest entries.
pub fn benchmark_family() -> Vec<(ManifestEntry, SmtScript)> {
    let mut out = Vec::new();
    for (t, k, v) in goals() {
        let script = generate(&t, k, v).expect("family combinations are supported");
        let mut entry = goal_entry(&t, k, v);
        if t.is_n() && k != EncodingKind::Uf {
            for (name, _) in lemma_split(&t, k).expect("n-transitions split") {
                entry.related.push(format!("{}_{}", entry.id, name));
            }
        }
        out.push((entry, script));
    }
    for k in EncodingKind::ALL {
        let id = format!("consistency_{k}");
        out.push((
            ManifestEntry {
                file: format!("consistency/{id}.smt2"),
                id,
                role: Role::Consistency,
                expected: "SAT".into(),
                transition: None,
                kind: k,
                surj: false,
                total: false,
                related: Vec::new(),
            },
            generate_consistency(k),
        ));
    }
    for t in [TransitionSpec::mint_n(), TransitionSpec::transfer_n()] {
        for k in [EncodingKind::Int, EncodingKind::Nat, EncodingKind::Id] {
            let goal = format!("{}_{}", t.name(), k);
            for (name, script) in lemma_split(&t, k).expect("n-transitions split") {
                let id = format!("{goal}_{name}");
                out.push((
                    ManifestEntry {
                        file: format!("lemmas/{id}.smt2"),
                        id,
                        role: Role::Lemma,
                        expected: "UNSAT".into(),
                        transition: Some(t.name()),
                        kind: k,
                        surj: false,
                        total: false,
                        related: vec![goal.clone()],
                    },
                    script,
                ));
            }
        }
    }
    out
}

/// Writes every script below `dir` plus `manifest.json`.
pub fn write_family(dir: &Path) -> io::Result<Manifest> {
    let family = benchmark_family();
    write_scripts(dir, &family)
}

pub fn write_scripts(dir: &Path, family: &[(ManifestEntry, SmtScript)]) -> io::Result<Manifest> {
    let mut manifest = Manifest::default();
    for (entry, script) in family {
        let path = dir.join(&entry.file);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, script.render())?;
        manifest.benchmarks.push(entry.clone());
    }
    fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(&manifest).map_err(io::Error::other)?;
    fs::write(dir.join("manifest.json"), json + "\n")?;
    Ok(manifest)
}
