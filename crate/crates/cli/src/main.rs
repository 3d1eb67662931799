use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sumlogic::cm2::{
    build_grouped_reduction, build_reduction, parse_machine, reduction_names, reduction_parts, reduction_vocabulary,
    simulate, trace, witness_model, MachineError, Outcome, TwoCounterMachine,
};
use sumlogic::coin::{
    check_inv, check_mint1_soundness, derived_balances, error_metrics, in_f, is_mint1, is_transfer1, parse_world,
    NamedWorld,
};
use sumlogic::crosscheck::cross_check;
use sumlogic::encodings::{
    generate, goal_entry, write_family, write_scripts, EncodingKind, Manifest, Role, TransitionSpec, VariantFlags,
};
use sumlogic::exec::Execution;
use sumlogic::harness::{default_solvers, run_matrix, SmtOracle, SolverSet, CONFIG_ENV};
use sumlogic::parser::{
    parse_problem, print_formula, print_formula_with, print_problem, print_structure, Names, Problem,
};
use sumlogic::reduction::{decide, InternalOracle, PresburgerOracle, Verdict};
use sumlogic::search::{find_model_opts, SearchBounds, SearchOptions};
use sumlogic::sl::{formula_length, is_sl_model, well_formed, Formula, SlStructure};

/// Exit code for a logical mismatch; usage and IO errors use 2.
const MISMATCH: u8 = 1;

#[derive(Parser)]
#[command(name = "sumlogic", version, about = "Sum logic decision procedure, coin-world checks and SMT benchmarks")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Leave wall-clock times out of the output.
    #[arg(long, global = true)]
    quiet_times: bool,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Solver list (TOML).
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a problem file and report well-formedness.
    Check { file: PathBuf },
    /// Decide a one-balance problem through the Presburger reduction.
    Decide(DecideArgs),
    /// Bounded search for a model.
    Search(SearchArgs),
    /// Write SMT-LIB benchmark scripts.
    Encode(EncodeArgs),
    /// Run solvers over a manifest.
    Bench(BenchArgs),
    /// Invariant and transition checks on coin worlds.
    CheckWorld(WorldArgs),
    /// Two-counter machine tools.
    #[command(name = "2cm", subcommand)]
    Cm2(Cm2Cmd),
}

#[derive(Args)]
struct DecideArgs {
    /// Problem file, `-` for stdin.
    file: PathBuf,
    /// Cross-check against model search and, when configured, an external solver.
    #[arg(long)]
    oracle_check: bool,
    /// Skip the external solver during --oracle-check.
    #[arg(long)]
    no_external: bool,
    /// Domain cap for the --oracle-check search.
    #[arg(long, default_value_t = 5)]
    search_addresses: usize,
    /// Per-partition statistics.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct SearchArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 4)]
    max_addresses: usize,
    /// Defaults to the largest numeral plus d plus max-addresses plus one.
    #[arg(long)]
    max_value: Option<u64>,
    /// Address constants denote different elements.
    #[arg(long)]
    distinct: bool,
    #[arg(long)]
    symmetry_breaking: bool,
}

#[derive(Args)]
struct EncodeArgs {
    /// mint1, mintn, transfer1, transfern or deltas.
    transition: Option<String>,
    /// uf, int, nat or id.
    kind: Option<String>,
    /// The whole benchmark family.
    #[arg(long)]
    all: bool,
    /// Surjectivity over full intervals.
    #[arg(long)]
    surj_full: bool,
    /// Goal stated against a separately declared total.
    #[arg(long)]
    total: bool,
    /// Ordering constraints on moved coins.
    #[arg(long)]
    ordering: bool,
    /// Balance changes for `deltas`, e.g. `--deltas=5,-3,-1`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    deltas: Vec<i64>,
    /// Print the script instead of writing files.
    #[arg(long)]
    stdout: bool,
    #[arg(long, short, default_value = "benchmarks")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// manifest.json or the directory holding it.
    manifest: PathBuf,
    #[arg(long, short, default_value_t = 1)]
    jobs: usize,
    /// CSV destination; defaults to results.csv next to the manifest.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Restrict to these solver names.
    #[arg(long = "solver")]
    solvers: Vec<String>,
    /// Override every solver's time limit, in seconds.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Args)]
struct WorldArgs {
    world: PathBuf,
    /// Post-state for a transition check.
    new: Option<PathBuf>,
    #[arg(long, num_args = 2, value_names = ["ADDR", "COIN"])]
    mint1: Option<Vec<String>>,
    #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
    transfer1: Option<Vec<String>>,
}

#[derive(Subcommand)]
enum Cm2Cmd {
    /// Run the machine from pc 1 with both counters at zero.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        #[arg(long)]
        trace: bool,
    },
    /// Print the reduction formula as a problem file.
    Reduce {
        file: PathBuf,
        /// Add the separator-placement constraints.
        #[arg(long)]
        grouped: bool,
    },
    /// Build and check the model of a k-step run.
    Witness { file: PathBuf, k: usize },
    /// Bounded model search on the reduction formula.
    Search {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_addresses: usize,
        #[arg(long, default_value_t = 14)]
        max_value: u64,
        #[arg(long)]
        grouped: bool,
        #[arg(long)]
        symmetry_breaking: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Check { file } => cmd_check(cli, file),
        Cmd::Decide(a) => cmd_decide(cli, a),
        Cmd::Search(a) => cmd_search(cli, a),
        Cmd::Encode(a) => cmd_encode(cli, a),
        Cmd::Bench(a) => cmd_bench(cli, a),
        Cmd::CheckWorld(a) => cmd_check_world(cli, a),
        Cmd::Cm2(c) => cmd_2cm(cli, c),
    }
}

impl Cli {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn solvers(&self) -> Result<SolverSet> {
        match &self.config {
            Some(p) => SolverSet::load(p).with_context(|| format!("loading {}", p.display())),
            None => Ok(default_solvers()),
        }
    }

    fn emit(&self, v: serde_json::Value) {
        println!("{}", serde_json::to_string_pretty(&v).expect("json values serialize"));
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load_problem(path: &Path) -> Result<(Problem, Formula)> {
    let text = read_input(path)?;
    let p = parse_problem(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let f = p.conjunction().ok_or_else(|| anyhow!("{}: no assertions", path.display()))?;
    Ok((p, f))
}

fn cmd_check(cli: &Cli, file: &Path) -> Result<u8> {
    let (p, f) = load_problem(file)?;
    let issues: Vec<String> = match well_formed(&p.vocab, &f) {
        Ok(()) => vec![],
        Err(vs) => vs.iter().map(|v| v.to_string()).collect(),
    };
    if cli.json {
        cli.emit(json!({
            "vocab": p.vocab,
            "assertions": p.assertions.iter().map(print_formula).collect::<Vec<_>>(),
            "length": formula_length(&f),
            "fragment": p.vocab.is_fragment(),
            "issues": issues,
        }));
    } else {
        print!("{}", print_problem(&p.vocab, &p.assertions));
        println!("length: {}, fragment: {}", formula_length(&f), p.vocab.is_fragment());
        if issues.is_empty() {
            println!("well-formed");
        }
        for i in &issues {
            println!("ill-formed: {i}");
        }
    }
    Ok(if issues.is_empty() { 0 } else { 2 })
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Sat => "SAT",
        Verdict::Unsat => "UNSAT",
    }
}

fn cmd_decide(cli: &Cli, a: &DecideArgs) -> Result<u8> {
    let (p, f) = load_problem(&a.file)?;
    let internal = InternalOracle::default();
    let exec = cli.exec();
    if !a.oracle_check {
        let d = decide(&f, &p.vocab, &internal, exec)?;
        if cli.json {
            cli.emit(json!(d));
            return Ok(0);
        }
        println!("{}", verdict_word(d.verdict));
        if let Some(w) = &d.witness {
            println!("partition: {}", d.partitions[w.partition].partition);
            print!("{}", print_structure(&w.structure, &Names::default()));
            println!(
                "presburger: {}",
                w.presburger.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
            );
        }
        if a.verbose {
            for (i, o) in d.partitions.iter().enumerate() {
                println!(
                    "  [{i}] {}: kappa {}, query size {}, {}",
                    o.partition,
                    o.kappa,
                    o.query_size,
                    if o.sat { "SAT" } else { "UNSAT" }
                );
            }
        }
        return Ok(0);
    }
    let external = if a.no_external { None } else { SmtOracle::from_set(&cli.solvers()?) };
    let ext_ref = external.as_ref().map(|o| o as &dyn PresburgerOracle);
    let c = cross_check(&f, &p.vocab, &internal, ext_ref, a.search_addresses, exec)?;
    let code = if c.agrees() { 0 } else { MISMATCH };
    if cli.json {
        cli.emit(json!(c));
        return Ok(code);
    }
    println!("{}", verdict_word(c.decision.verdict));
    if let Some(w) = &c.decision.witness {
        println!("partition: {}", c.decision.partitions[w.partition].partition);
        print!("{}", print_structure(&w.structure, &Names::default()));
    }
    if a.verbose {
        for (i, o) in c.decision.partitions.iter().enumerate() {
            println!(
                "  [{i}] {}: kappa {}, query size {}, {}",
                o.partition,
                o.kappa,
                o.query_size,
                if o.sat { "SAT" } else { "UNSAT" }
            );
        }
    }
    let search = match &c.search_model {
        Some(m) => format!("model with {} addresses", m.domain().len()),
        None => format!("no model up to {} addresses, values <= {}", c.bounds.max_addresses, c.bounds.max_value),
    };
    let ext = match (&external, &c.external) {
        (Some(o), Some(ans)) => {
            format!("; {}: {}/{} partitions answered", o.name(), ans.iter().flatten().count(), ans.len())
        }
        _ => "; no external solver".to_string(),
    };
    println!("search: {search}{ext}");
    for n in &c.notes {
        println!("note: {n}");
    }
    if c.agrees() {
        println!("oracle-check: agree");
    } else {
        for pr in &c.problems {
            println!("disagreement: {pr}");
        }
        println!("oracle-check: DISAGREE");
    }
    Ok(code)
}

fn cmd_search(cli: &Cli, a: &SearchArgs) -> Result<u8> {
    let (p, f) = load_problem(&a.file)?;
    if let Err(vs) = well_formed(&p.vocab, &f) {
        bail!("ill-formed: {}", vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "));
    }
    let mut bounds = SearchBounds::default_for(&f, &p.vocab, a.max_addresses);
    if let Some(v) = a.max_value {
        bounds.max_value = v;
    }
    let opts = SearchOptions { distinct: a.distinct, symmetry_breaking: a.symmetry_breaking };
    let m = find_model_opts(&f, &p.vocab, bounds, opts, cli.exec());
    report_search(cli, m.as_ref(), bounds, &Names::default());
    Ok(0)
}

fn report_search(cli: &Cli, m: Option<&SlStructure>, bounds: SearchBounds, names: &Names) {
    if cli.json {
        cli.emit(json!({ "bounds": bounds, "model": m }));
        return;
    }
    match m {
        Some(s) => {
            println!("model found ({} addresses)", s.domain().len());
            print!("{}", print_structure(s, names));
        }
        None => println!("no model up to {} addresses (values <= {})", bounds.max_addresses, bounds.max_value),
    }
}

fn cmd_encode(cli: &Cli, a: &EncodeArgs) -> Result<u8> {
    if a.all {
        if a.transition.is_some() || a.kind.is_some() {
            bail!("--all takes no transition or kind");
        }
        let m = write_family(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
        let count = |r: Role| m.benchmarks.iter().filter(|e| e.role == r).count();
        if cli.json {
            cli.emit(json!(m));
        } else {
            println!(
                "{} goal scripts, {} consistency scripts, {} lemma scripts in {}",
                count(Role::Goal),
                count(Role::Consistency),
                count(Role::Lemma),
                a.out.display()
            );
        }
        return Ok(0);
    }
    let (Some(t), Some(k)) = (&a.transition, &a.kind) else {
        bail!("give a transition and an encoding kind, or --all");
    };
    let spec = if t == "deltas" {
        if a.deltas.is_empty() {
            bail!("`deltas` needs --deltas=D1,D2,..");
        }
        TransitionSpec::deltas(&a.deltas)
    } else {
        t.parse::<TransitionSpec>()?
    };
    let kind: EncodingKind = k.parse()?;
    let mut flags = VariantFlags::new(a.surj_full, a.total);
    if a.ordering {
        flags = flags.with_ordering();
    }
    let script = generate(&spec, kind, flags)?;
    if a.stdout {
        print!("{}", script.render());
        return Ok(0);
    }
    let entry = goal_entry(&spec, kind, flags);
    let m =
        write_scripts(&a.out, &[(entry.clone(), script)]).with_context(|| format!("writing {}", a.out.display()))?;
    if cli.json {
        cli.emit(json!(m));
    } else {
        println!("{} (expected {})", a.out.join(&entry.file).display(), entry.expected);
    }
    Ok(0)
}

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> Result<u8> {
    let path = if a.manifest.is_dir() { a.manifest.join("manifest.json") } else { a.manifest.clone() };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: Manifest = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let root = path.parent().unwrap_or(Path::new("."));
    let mut solvers = cli.solvers()?.available().solvers;
    if !a.solvers.is_empty() {
        solvers.retain(|s| a.solvers.contains(&s.name));
    }
    if solvers.is_empty() {
        bail!("no solver available; install one of z3, cvc4, vampire or list solvers with --config / {CONFIG_ENV}");
    }
    if let Some(t) = a.timeout {
        solvers = solvers.into_iter().map(|s| s.with_timeout(t)).collect();
    }
    let m = run_matrix(&manifest, root, &solvers, a.jobs);
    let csv_path = a.csv.clone().unwrap_or_else(|| root.join("results.csv"));
    fs::write(&csv_path, m.to_csv()?).with_context(|| format!("writing {}", csv_path.display()))?;
    let code = if m.mismatches() > 0 { MISMATCH } else { 0 };
    if cli.json {
        let rows: Vec<_> = if cli.quiet_times {
            m.rows.iter().map(|r| json!({"benchmark": r.benchmark, "solver": r.solver, "verdict": r.verdict, "expected": r.expected, "match": r.status})).collect()
        } else {
            m.rows.iter().map(|r| json!(r)).collect()
        };
        cli.emit(json!({ "rows": rows, "mismatches": m.mismatches() }));
    } else {
        print!("{}", m.to_markdown(!cli.quiet_times));
        println!("{} runs, {} mismatches; csv: {}", m.rows.len(), m.mismatches(), csv_path.display());
    }
    Ok(code)
}

fn load_world(path: &Path) -> Result<NamedWorld> {
    parse_world(&read_input(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn world_report(nw: &NamedWorld) -> (serde_json::Value, Vec<String>, bool) {
    let w = &nw.world;
    let inv = check_inv(w);
    let bs = derived_balances(w);
    let m = error_metrics(w);
    let f = in_f(w, &bs);
    let total: u64 = bs.bal.iter().sum();
    let bal: Vec<String> = nw.addresses.iter().zip(&bs.bal).map(|(a, b)| format!("{a}={b}")).collect();
    let lines = vec![
        format!("I1: {}, I2: {}, I3: {}", inv.i1, inv.i2, inv.i3),
        format!("inv: {}, in_f: {f}, V<={}, V>={}", inv.all(), m.v_leq, m.v_geq),
        format!("sum: {}, bal: {}, sum matches balances: {}", bs.sum, bal.join(" "), total == bs.sum),
    ];
    let v = json!({ "inv": inv, "in_f": f, "metrics": m, "balances": bs, "sum_matches": total == bs.sum });
    (v, lines, inv.all())
}

fn index_of(names: &[String], n: &str, what: &str) -> Result<usize> {
    names.iter().position(|x| x == n).ok_or_else(|| anyhow!("unknown {what} `{n}`"))
}

fn cmd_check_world(cli: &Cli, a: &WorldArgs) -> Result<u8> {
    let old = load_world(&a.world)?;
    let (ov, olines, ook) = world_report(&old);
    let mut out = json!({ "world": ov });
    let mut lines = olines;
    let mut ok = ook;
    if let Some(np) = &a.new {
        let new = load_world(np)?;
        if new.addresses != old.addresses || new.coins != old.coins {
            bail!("{} declares different addresses or coins", np.display());
        }
        let (nv, nlines, _) = world_report(&new);
        out["new"] = nv;
        lines.push("new:".into());
        lines.extend(nlines.into_iter().map(|l| format!("  {l}")));
        let sum_delta = derived_balances(&new.world).sum as i64 - derived_balances(&old.world).sum as i64;
        if let Some(mc) = &a.mint1 {
            let ai = index_of(&old.addresses, &mc[0], "address")?;
            let ci = index_of(&old.coins, &mc[1], "coin")?;
            let is = is_mint1(&old.world, &new.world, ai, ci)?;
            let sound = is && check_mint1_soundness(&old.world, &new.world, ai, ci)?;
            lines.push(if is { format!("mint1: true, sum {sum_delta:+}") } else { "mint1: false".into() });
            if is && !sound {
                lines.push("mint1 soundness: FAILED".into());
            }
            out["mint1"] = json!({ "holds": is, "sound": sound, "sum_delta": sum_delta });
            ok &= sound;
        }
        if let Some(tc) = &a.transfer1 {
            let fi = index_of(&old.addresses, &tc[0], "address")?;
            let ti = index_of(&old.addresses, &tc[1], "address")?;
            let is = is_transfer1(&old.world, &new.world, fi, ti)?;
            lines.push(format!("transfer1: {is}, sum {sum_delta:+}"));
            out["transfer1"] = json!({ "holds": is, "sum_delta": sum_delta });
            ok &= is;
        }
    } else if a.mint1.is_some() || a.transfer1.is_some() {
        bail!("transition checks need a second world file");
    }
    if cli.json {
        cli.emit(out);
    } else {
        for l in lines {
            println!("{l}");
        }
    }
    Ok(if ok { 0 } else { MISMATCH })
}

fn load_machine(path: &Path) -> Result<TwoCounterMachine> {
    parse_machine(&read_input(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn cmd_2cm(cli: &Cli, c: &Cm2Cmd) -> Result<u8> {
    match c {
        Cm2Cmd::Simulate { file, max_steps, trace: show } => {
            let m = load_machine(file)?;
            let outcome = simulate(&m, *max_steps);
            if cli.json {
                let t = if *show { Some(trace(&m, *max_steps)) } else { None };
                cli.emit(json!({ "outcome": outcome, "trace": t }));
                return Ok(0);
            }
            if *show {
                for (i, cfg) in trace(&m, *max_steps).iter().enumerate() {
                    println!("{i:>5}: pc {} c1 {} c2 {}", cfg.pc, cfg.c1, cfg.c2);
                }
            }
            match outcome {
                Outcome::Halts(k) => println!("HALT at step {k}"),
                Outcome::Running => println!("no halt within {max_steps} steps"),
            }
            Ok(0)
        }
        Cm2Cmd::Reduce { file, grouped } => {
            let m = load_machine(file)?;
            let f = if *grouped { build_grouped_reduction(&m) } else { build_reduction(&m) };
            if cli.json {
                cli.emit(json!({ "formula": print_formula(&f) }));
                return Ok(0);
            }
            let names = reduction_names();
            for (i, part) in reduction_parts(&m).iter().enumerate() {
                println!("# phi{}: {}", i + 1, print_formula_with(part, &names));
            }
            println!("# below: b1 = c, b2 = l, b3 = g; a1 = a0, a2 = a1");
            print!("{}", print_problem(&reduction_vocabulary(), &[f]));
            Ok(0)
        }
        Cm2Cmd::Witness { file, k } => {
            let m = load_machine(file)?;
            let w = match witness_model(&m, *k) {
                Ok(w) => w,
                Err(e @ MachineError::NoHalt(_)) => {
                    println!("{e}");
                    return Ok(MISMATCH);
                }
                Err(e) => return Err(e.into()),
            };
            let ok = is_sl_model(&w, &build_reduction(&m))?;
            if cli.json {
                cli.emit(json!({ "model": w, "ok": ok }));
            } else {
                print!("{}", print_structure(&w, &reduction_names()));
                if ok {
                    println!("model OK ({} addresses)", w.domain().len());
                } else {
                    println!("model check FAILED");
                }
            }
            Ok(if ok { 0 } else { MISMATCH })
        }
        Cm2Cmd::Search { file, max_addresses, max_value, grouped, symmetry_breaking } => {
            let m = load_machine(file)?;
            let f = if *grouped { build_grouped_reduction(&m) } else { build_reduction(&m) };
            let bounds = SearchBounds::new(*max_addresses, *max_value);
            let opts = SearchOptions { distinct: false, symmetry_breaking: *symmetry_breaking };
            let model = find_model_opts(&f, &reduction_vocabulary(), bounds, opts, cli.exec());
            report_search(cli, model.as_ref(), bounds, &reduction_names());
            Ok(0)
        }
    }
}
