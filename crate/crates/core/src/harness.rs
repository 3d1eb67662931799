//! Running external SMT solvers and first-order provers on generated scripts.

use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wait_timeout::ChildExt;

use crate::encodings::Manifest;
use crate::lia::{to_smtlib, PresFormula};
use crate::reduction::{OracleAnswer, PresburgerOracle};

/// Environment variable naming a solver config file.
pub const CONFIG_ENV: &str = "SUMLOGIC_SOLVER_CONFIG";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("solver `{0}`: command template must contain {{file}}")]
    NoFilePlaceholder(String),
    #[error("solver `{0}`: timeout must be positive")]
    BadTimeout(String),
    #[error("solver `{name}`: bad {which} pattern: {source}")]
    BadPattern { name: String, which: &'static str, source: regex::Error },
    #[error("solver config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SolverVerdict {
    Sat,
    Unsat,
    Unknown,
    Timeout,
    Error,
}

impl SolverVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverVerdict::Sat => "SAT",
            SolverVerdict::Unsat => "UNSAT",
            SolverVerdict::Unknown => "UNKNOWN",
            SolverVerdict::Timeout => "TIMEOUT",
            SolverVerdict::Error => "ERROR",
        }
    }

    pub fn is_definite(self) -> bool {
        matches!(self, SolverVerdict::Sat | SolverVerdict::Unsat)
    }
}

impl fmt::Display for SolverVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Regexes tried in the order unsat, sat, unknown against the whole stdout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerdictPatterns {
    pub sat: String,
    pub unsat: String,
    pub unknown: String,
}

impl Default for VerdictPatterns {
    fn default() -> Self {
        VerdictPatterns {
            sat: r"(?m)^sat\s*$|SZS status (Satisfiable|CounterSatisfiable)".into(),
            unsat: r"(?m)^unsat\s*$|SZS status (Unsatisfiable|Theorem)".into(),
            unknown: r"(?m)^unknown\s*$|SZS status (GaveUp|Unknown|Incomplete)".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub name: String,
    /// Program and arguments; `{file}` is replaced by the script path.
    pub command: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    #[serde(default)]
    pub patterns: VerdictPatterns,
}

fn default_timeout() -> f64 {
    300.0
}

struct Compiled {
    sat: Regex,
    unsat: Regex,
    unknown: Regex,
}

impl SolverConfig {
    pub fn new(name: &str, command: &[&str]) -> Self {
        SolverConfig {
            name: name.into(),
            command: command.iter().map(|s| s.to_string()).collect(),
            timeout_s: default_timeout(),
            patterns: VerdictPatterns::default(),
        }
    }

    pub fn with_timeout(mut self, secs: f64) -> Self {
        self.timeout_s = secs;
        self
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !self.command.iter().any(|a| a.contains("{file}")) {
            return Err(HarnessError::NoFilePlaceholder(self.name.clone()));
        }
        if !(self.timeout_s > 0.0 && self.timeout_s.is_finite()) {
            return Err(HarnessError::BadTimeout(self.name.clone()));
        }
        self.compile().map(|_| ())
    }

    fn compile(&self) -> Result<Compiled, HarnessError> {
        let re = |which: &'static str, p: &str| {
            Regex::new(p).map_err(|source| HarnessError::BadPattern { name: self.name.clone(), which, source })
        };
        Ok(Compiled {
            sat: re("sat", &self.patterns.sat)?,
            unsat: re("unsat", &self.patterns.unsat)?,
            unknown: re("unknown", &self.patterns.unknown)?,
        })
    }

    /// `SUMLOGIC_<PROGRAM>` overrides the program, e.g. `SUMLOGIC_Z3`.
    pub fn env_override_var(&self) -> String {
        let prog = self.command.first().map(String::as_str).unwrap_or("");
        let base = Path::new(prog).file_name().and_then(|s| s.to_str()).unwrap_or(prog);
        let up: String =
            base.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '_' }).collect();
        format!("SUMLOGIC_{up}")
    }

    pub fn program(&self) -> String {
        std::env::var(self.env_override_var())
            .ok()
            .filter(|s| !s.is_empty())
            .unwrap_or_else(|| self.command.first().cloned().unwrap_or_default())
    }

    /// Path of the executable if it can be found.
    pub fn resolve(&self) -> Option<PathBuf> {
        find_executable(&self.program())
    }

    pub fn is_available(&self) -> bool {
        self.resolve().is_some()
    }

    pub fn args_for(&self, file: &Path) -> Vec<String> {
        let f = file.to_string_lossy();
        self.command.iter().skip(1).map(|a| a.replace("{file}", &f)).collect()
    }
}

fn find_executable(prog: &str) -> Option<PathBuf> {
    if prog.is_empty() {
        return None;
    }
    let p = Path::new(prog);
    if p.components().count() > 1 {
        return p.is_file().then(|| p.to_path_buf());
    }
    std::env::var_os("PATH").and_then(|paths| std::env::split_paths(&paths).map(|d| d.join(prog)).find(|c| c.is_file()))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverSet {
    #[serde(default, rename = "solver")]
    pub solvers: Vec<SolverConfig>,
}

impl SolverSet {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let set: SolverSet = toml::from_str(text)?;
        for s in &set.solvers {
            s.validate()?;
        }
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("solver sets serialize")
    }

    pub fn available(&self) -> SolverSet {
        SolverSet { solvers: self.solvers.iter().filter(|s| s.is_available()).cloned().collect() }
    }
}

/// Z3, CVC4 and Vampire with the published invocation lines.
pub fn default_solvers() -> SolverSet {
    SolverSet {
        solvers: vec![
            SolverConfig::new("z3", &["z3", "-smt2", "{file}"]),
            SolverConfig::new("cvc4", &["cvc4", "--lang=smtlib2.6", "--full-saturate-quant", "{file}"]),
            SolverConfig::new("vampire", &["vampire", "-input_syntax", "smtlib2", "{file}"]),
            SolverConfig::new(
                "vampire-ind",
                &[
                    "vampire",
                    "--input_syntax",
                    "smtlib2",
                    "{file}",
                    "--forced_options",
                    "aac=none:add=large:afp=40000:afq=1.2:amm=off:anc=none:bd=off:fsr=off:gsp=input_only:inw=on:irw=on:lma=on:nm=64:nwc=1:sos=on:sp=occurrence:tha=off:updr=off:awr=5:s=1011:sa=discount:ind=math",
                ],
            ),
            SolverConfig::new(
                "vampire-thsq",
                &["vampire", "-input_syntax", "smtlib2", "-thsq", "on", "-thsqd", "6", "-thsqc", "6", "-thsqr", "10,1", "{file}"],
            ),
        ],
    }
}

/// The config named by [`CONFIG_ENV`], or the defaults.
pub fn solvers_from_env() -> Result<SolverSet, HarnessError> {
    match std::env::var_os(CONFIG_ENV) {
        Some(p) if !p.is_empty() => SolverSet::load(Path::new(&p)),
        _ => Ok(default_solvers()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub benchmark: String,
    pub solver: String,
    pub verdict: SolverVerdict,
    pub time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn classify(c: &Compiled, stdout: &str) -> Option<SolverVerdict> {
    if c.unsat.is_match(stdout) {
        Some(SolverVerdict::Unsat)
    } else if c.sat.is_match(stdout) {
        Some(SolverVerdict::Sat)
    } else if c.unknown.is_match(stdout) {
        Some(SolverVerdict::Unknown)
    } else {
        None
    }
}

fn tail(s: &str) -> String {
    let lines: Vec<&str> = s.lines().filter(|l| !l.trim().is_empty()).collect();
    lines[lines.len().saturating_sub(3)..].join(" | ")
}

/// Runs one solver on one script file.
pub fn run(benchmark: &str, script: &Path, cfg: &SolverConfig) -> RunResult {
    let result = |verdict, time_s, reason: Option<String>| RunResult {
        benchmark: benchmark.to_string(),
        solver: cfg.name.clone(),
        verdict,
        time_s,
        reason,
    };
    let compiled = match cfg.validate().and_then(|_| cfg.compile()) {
        Ok(c) => c,
        Err(e) => return result(SolverVerdict::Error, 0.0, Some(e.to_string())),
    };
    let program = cfg.program();
    let Some(exe) = find_executable(&program) else {
        return result(SolverVerdict::Error, 0.0, Some(format!("executable `{program}` not found")));
    };
    let timeout = Duration::from_secs_f64(cfg.timeout_s);
    let start = Instant::now();
    let mut child = match Command::new(&exe)
        .args(cfg.args_for(script))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return result(SolverVerdict::Error, 0.0, Some(format!("spawn {}: {e}", exe.display()))),
    };
    // readers are detached on timeout, grandchildren may keep the pipes open
    let reader = |mut pipe: Box<dyn Read + Send>| {
        std::thread::spawn(move || {
            let mut buf = Vec::new();
            let _ = pipe.read_to_end(&mut buf);
            String::from_utf8_lossy(&buf).into_owned()
        })
    };
    let out = reader(Box::new(child.stdout.take().expect("piped")));
    let err = reader(Box::new(child.stderr.take().expect("piped")));
    let status = match child.wait_timeout(timeout) {
        Ok(Some(status)) => status,
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            let t = start.elapsed().as_secs_f64().max(cfg.timeout_s);
            return result(SolverVerdict::Timeout, t, None);
        }
        Err(e) => {
            let _ = child.kill();
            return result(SolverVerdict::Error, start.elapsed().as_secs_f64(), Some(e.to_string()));
        }
    };
    let time_s = start.elapsed().as_secs_f64();
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    match classify(&compiled, &stdout) {
        Some(v) => result(v, time_s, None),
        None if status.success() => result(SolverVerdict::Unknown, time_s, Some(tail(&stdout))),
        None => {
            let msg = if stderr.trim().is_empty() { tail(&stdout) } else { tail(&stderr) };
            result(SolverVerdict::Error, time_s, Some(format!("{status}: {msg}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchStatus {
    #[serde(rename = "ok")]
    Ok,
    #[serde(rename = "MISMATCH")]
    Mismatch,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl MatchStatus {
    pub fn of(expected: &str, v: SolverVerdict) -> Self {
        if !v.is_definite() || !(expected == "SAT" || expected == "UNSAT") {
            MatchStatus::NotApplicable
        } else if v.as_str() == expected {
            MatchStatus::Ok
        } else {
            MatchStatus::Mismatch
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MatchStatus::Ok => "ok",
            MatchStatus::Mismatch => "MISMATCH",
            MatchStatus::NotApplicable => "n/a",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub benchmark: String,
    pub solver: String,
    pub verdict: SolverVerdict,
    pub time_s: f64,
    pub expected: String,
    #[serde(rename = "match")]
    pub status: MatchStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: Vec<MatrixRow>,
}

impl Matrix {
    /// Rows sorted by `(benchmark, solver)` whatever order they arrive in.
    pub fn from_rows(mut rows: Vec<MatrixRow>) -> Self {
        rows.sort_by(|a, b| (&a.benchmark, &a.solver).cmp(&(&b.benchmark, &b.solver)));
        Matrix { rows }
    }

    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| r.status == MatchStatus::Mismatch).count()
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["benchmark", "solver", "verdict", "time_s", "expected", "match"])?;
        for r in &self.rows {
            w.write_record([
                r.benchmark.as_str(),
                r.solver.as_str(),
                r.verdict.as_str(),
                &format!("{:.2}", r.time_s),
                r.expected.as_str(),
                r.status.as_str(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// One row per benchmark, one column per solver. Timeouts print as `×`.
    pub fn to_markdown(&self, show_times: bool) -> String {
        let mut solvers: Vec<&str> = Vec::new();
        let mut benches: Vec<(&str, &str)> = Vec::new();
        for r in &self.rows {
            if !solvers.contains(&r.solver.as_str()) {
                solvers.push(&r.solver);
            }
            if !benches.iter().any(|(b, _)| *b == r.benchmark) {
                benches.push((&r.benchmark, &r.expected));
            }
        }
        solvers.sort_unstable();
        let cell = |r: &MatrixRow| {
            let mut s = match r.verdict {
                SolverVerdict::Timeout => "×".to_string(),
                v if show_times && v.is_definite() => format!("{} {:.2}", v, r.time_s),
                v => v.to_string(),
            };
            if r.status == MatchStatus::Mismatch {
                s.push_str(" !");
            }
            s
        };
        let mut table: Vec<Vec<String>> = vec![];
        let mut header = vec!["benchmark".to_string(), "expected".to_string()];
        header.extend(solvers.iter().map(|s| s.to_string()));
        table.push(header);
        for (b, e) in &benches {
            let mut row = vec![b.to_string(), e.to_string()];
            for s in &solvers {
                let c = self.rows.iter().find(|r| r.benchmark == *b && r.solver == *s).map(cell).unwrap_or_default();
                row.push(c);
            }
            table.push(row);
        }
        let widths: Vec<usize> =
            (0..table[0].len()).map(|i| table.iter().map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
        let fmt_row = |r: &[String]| {
            let cells: Vec<String> =
                r.iter().zip(&widths).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
            format!("| {} |", cells.join(" | "))
        };
        let mut out = fmt_row(&table[0]);
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
        for r in &table[1..] {
            out.push_str(&fmt_row(r));
            out.push('\n');
        }
        out
    }
}

/// Every (benchmark, solver) cell, at most `jobs` subprocesses at a time.
/// Script paths in the manifest are relative to `root`.
pub fn run_matrix(manifest: &Manifest, root: &Path, solvers: &[SolverConfig], jobs: usize) -> Matrix {
    let cells: Vec<(usize, usize)> =
        (0..manifest.benchmarks.len()).flat_map(|b| (0..solvers.len()).map(move |s| (b, s))).collect();
    let next = AtomicUsize::new(0);
    let rows = Mutex::new(Vec::with_capacity(cells.len()));
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(cells.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(b, s)) = cells.get(i) else { break };
                let entry = &manifest.benchmarks[b];
                let r = run(&entry.id, &root.join(&entry.file), &solvers[s]);
                let row = MatrixRow {
                    status: MatchStatus::of(&entry.expected, r.verdict),
                    benchmark: r.benchmark,
                    solver: r.solver,
                    verdict: r.verdict,
                    time_s: r.time_s,
                    expected: entry.expected.clone(),
                };
                rows.lock().expect("no panics while holding the lock").push(row);
            });
        }
    });
    Matrix::from_rows(rows.into_inner().expect("threads joined"))
}

/// Presburger backend that ships each query to an external solver as a
/// QF_LIA script.
#[derive(Clone, Debug)]
pub struct SmtOracle {
    pub solver: SolverConfig,
}

static QUERY_SEQ: AtomicUsize = AtomicUsize::new(0);

impl SmtOracle {
    pub fn new(solver: SolverConfig) -> Self {
        SmtOracle { solver }
    }

    /// The first available solver of `set`, preferring z3.
    pub fn from_set(set: &SolverSet) -> Option<Self> {
        let mut solvers = set.available().solvers;
        // the others are not tuned for ground arithmetic
        solvers.sort_by_key(|s| s.name != "z3");
        solvers.into_iter().next().map(SmtOracle::new)
    }

    pub fn from_env() -> Option<Self> {
        SmtOracle::from_set(&solvers_from_env().ok()?)
    }
}

impl PresburgerOracle for SmtOracle {
    fn name(&self) -> &str {
        &self.solver.name
    }

    fn check(&self, f: &PresFormula) -> OracleAnswer {
        let seq = QUERY_SEQ.fetch_add(1, Ordering::Relaxed);
        let path = std::env::temp_dir().join(format!("sumlogic-q{}-{seq}.smt2", std::process::id()));
        if let Err(e) = std::fs::write(&path, to_smtlib(f)) {
            return OracleAnswer::Unknown(e.to_string());
        }
        let r = run("query", &path, &self.solver);
        let _ = std::fs::remove_file(&path);
        match r.verdict {
            SolverVerdict::Sat => OracleAnswer::Sat(None),
            SolverVerdict::Unsat => OracleAnswer::Unsat,
            v => OracleAnswer::Unknown(r.reason.unwrap_or_else(|| v.to_string())),
        }
    }
}
