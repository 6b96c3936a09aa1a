use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::io::{self, BufRead, Write as _};
use std::path::Path;

use probedepth::families::{generate, psi_strategy, FamilyKind, FamilySpec};
use probedepth::graphdnf::{decide_evasive_acyclic, find_pattern, GraphDnf};
use probedepth::provenance::{dnf_to_database, eval_query, load_database, Query};
use probedepth::random::{all_labeled_trees, edges_to_dnf, random_forest};
use probedepth::readonce::factor_read_once;
use probedepth::strategy::{greedy_strategy, is_evasive, optimal_depth, run_session};
use probedepth::{DecisionDiagram, Error, ExpressionSet, MonotoneDnf, SearchConfig, Var};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::{Command, Format, Method, ProvCommand, SearchArgs};

pub const CAP_VAR: &str = "PROBEDEPTH_CAP";
const MAX_CROSSCHECK_NODES: usize = 8;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain { message: String, stdout: Option<String> },
}

impl Failure {
    fn domain(message: impl Into<String>) -> Failure {
        Failure::Domain { message: message.into(), stdout: None }
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain { .. } => 1,
        }
    }

    pub fn stdout(&self) -> Option<&str> {
        match self {
            Failure::Domain { stdout, .. } => stdout.as_deref(),
            Failure::Usage(_) => None,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Domain { message: m, .. } => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let message = e.to_string();
        match e {
            Error::Parse(_)
            | Error::EmptyInput
            | Error::DuplicateVariable(_)
            | Error::InvalidName(_)
            | Error::UnknownVariable(_)
            | Error::Json(_)
            | Error::Schema(_)
            | Error::UnknownRelation(_)
            | Error::UnknownColumn(_)
            | Error::AmbiguousColumn(_)
            | Error::FamilyParameter { .. } => Failure::Usage(message),
            _ => Failure::domain(message),
        }
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::domain(format!("{}: {e}", path.display())))
}

fn load_set(path: &Path) -> Result<ExpressionSet, Failure> {
    let text = read(path)?;
    ExpressionSet::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn search_config(args: &SearchArgs) -> Result<SearchConfig, Failure> {
    let mut cfg = SearchConfig { budget: args.budget, threads: args.threads.max(1), ..SearchConfig::default() };
    if let Ok(cap) = std::env::var(CAP_VAR) {
        cfg.universe_cap = cap.trim().parse().map_err(|_| Failure::Usage(format!("{CAP_VAR}: `{cap}` is not a count")))?;
    }
    Ok(cfg)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn truth(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Depth { file, search, json } => depth(&load_set(&file)?, &search_config(&search)?, json),
        Command::Evasive { file, method, search, json } => {
            evasive(&load_set(&file)?, method, &search_config(&search)?, json)
        }
        Command::Strategy { file, out, greedy, search } => {
            let set = load_set(&file)?;
            let d = strategy_for(&set, greedy, &search_config(&search)?)?;
            Ok(match out {
                Format::Dot => d.to_dot(),
                Format::Json => pretty(&d.to_json()),
            })
        }
        Command::Probe { file, answers, interactive: _, greedy, search, json } => {
            let set = load_set(&file)?;
            let d = strategy_for(&set, greedy, &search_config(&search)?)?;
            match answers {
                Some(path) => {
                    let table = parse_answers(&read(&path)?, &set)?;
                    probe(&set, &d, |x| table.get(&x).copied(), json)
                }
                None => {
                    let stdin = io::stdin();
                    let mut lines = stdin.lock().lines();
                    probe(&set, &d, |x| ask(set.universe().name(x), &mut lines), json)
                }
            }
        }
        Command::Prov { command } => prov(command),
        Command::Crosscheck { max_nodes, seed, trials, json } => crosscheck(max_nodes, seed, trials, json),
        Command::Family { kind, parameter, dot } => {
            let kind: FamilyKind = kind.parse()?;
            let set = generate(FamilySpec::new(kind, parameter))?;
            if !dot {
                return Ok(set.to_text());
            }
            let d = if kind == FamilyKind::Psi { psi_strategy(parameter)? } else { greedy_strategy(&set)? };
            Ok(d.to_dot())
        }
        Command::Factor { file } => factor(&load_set(&file)?),
    }
}

fn strategy_for(set: &ExpressionSet, greedy: bool, cfg: &SearchConfig) -> Result<DecisionDiagram, Failure> {
    Ok(if greedy { greedy_strategy(set)? } else { optimal_depth(set, cfg)?.diagram })
}

fn depth(set: &ExpressionSet, cfg: &SearchConfig, json: bool) -> Outcome {
    let r = optimal_depth(set, cfg)?;
    Ok(if json {
        pretty(&json!({
            "depth": r.depth,
            "n": r.n,
            "evasive": r.evasive,
            "explored_states": r.explored_states,
        }))
    } else {
        format!("depth={} n={} evasive={} explored={}\n", r.depth, r.n, r.evasive, r.explored_states)
    })
}

/// The single member as a monotone DNF, when the acyclic procedure applies to it.
fn acyclic_input(set: &ExpressionSet) -> Result<MonotoneDnf, String> {
    let [member] = set.members() else {
        return Err(format!("the acyclic method needs exactly one expression, found {}", set.members().len()));
    };
    let d = member.to_monotone_dnf(set.universe()).map_err(|e| e.to_string())?;
    if d.as_const().is_none() {
        let g = GraphDnf::from_monotone_dnf(&d).map_err(|e| e.to_string())?;
        if !g.is_acyclic() {
            return Err(Error::Cyclic.to_string());
        }
    }
    Ok(d)
}

fn evasive(set: &ExpressionSet, method: Method, cfg: &SearchConfig, json: bool) -> Outcome {
    let input = match method {
        Method::Brute => None,
        Method::Auto => acyclic_input(set).ok(),
        Method::Acyclic => Some(acyclic_input(set).map_err(Failure::domain)?),
    };
    let (verdict, used, pattern, free) = match input {
        None => (is_evasive(set, cfg)?, "brute", None, Vec::new()),
        Some(d) => {
            let verdict = decide_evasive_acyclic(&d, set.universe())?;
            let (mut pattern, mut free) = (None, Vec::new());
            if !verdict && d.as_const().is_none() {
                let (parts, unused) = GraphDnf::from_monotone_dnf(&d)?.components();
                free = unused.iter().map(|&v| set.universe().name(v).to_string()).collect();
                for part in &parts {
                    if let Some(p) = find_pattern(part)? {
                        pattern = Some(p.display(set.universe()).to_string());
                        break;
                    }
                }
            }
            (verdict, "acyclic", pattern, free)
        }
    };
    if json {
        return Ok(pretty(&json!({
            "evasive": verdict,
            "n": set.n(),
            "method": used,
            "pattern": pattern,
            "free_variables": free,
        })));
    }
    let mut out = format!("evasive={verdict} n={} method={used}\n", set.n());
    if let Some(p) = pattern {
        let _ = writeln!(out, "pattern: {p}");
    }
    if !free.is_empty() {
        let _ = writeln!(out, "unused variables: {}", free.join(" "));
    }
    Ok(out)
}

fn parse_bool(word: &str) -> Option<bool> {
    match word.trim().to_ascii_lowercase().as_str() {
        "y" | "yes" | "t" | "true" | "1" => Some(true),
        "n" | "no" | "f" | "false" | "0" => Some(false),
        _ => None,
    }
}

/// Lines of `name=value`; blank lines and `#` comments are skipped.
fn parse_answers(text: &str, set: &ExpressionSet) -> Result<BTreeMap<Var, bool>, Failure> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Failure::Usage(format!("answers line {}: {what}", i + 1));
        let (name, value) = line.split_once('=').ok_or_else(|| bad("expected `variable=value`"))?;
        let var = set.universe().lookup(name.trim()).ok_or_else(|| bad(&format!("unknown variable `{}`", name.trim())))?;
        let value = parse_bool(value).ok_or_else(|| bad(&format!("`{}` is not a truth value", value.trim())))?;
        if out.insert(var, value).is_some() {
            return Err(bad(&format!("`{}` answered twice", name.trim())));
        }
    }
    Ok(out)
}

fn ask(name: &str, lines: &mut impl Iterator<Item = io::Result<String>>) -> Option<bool> {
    loop {
        eprint!("{name}? ");
        let _ = io::stderr().flush();
        match lines.next() {
            Some(Ok(line)) => match parse_bool(&line) {
                Some(b) => return Some(b),
                None => eprintln!("answer y/n, true/false or 1/0"),
            },
            _ => return None,
        }
    }
}

fn probe(set: &ExpressionSet, d: &DecisionDiagram, answer: impl FnMut(Var) -> Option<bool>, json: bool) -> Outcome {
    let t = run_session(d, answer)?;
    let u = set.universe();
    if json {
        return Ok(pretty(&json!({
            "probes": t.probes.iter().map(|&(x, b)| json!({"variable": u.name(x), "value": b})).collect::<Vec<_>>(),
            "labels": t.labels,
            "probe_count": t.probes.len(),
            "depth": d.depth(),
        })));
    }
    let mut out = String::new();
    for (x, b) in &t.probes {
        let _ = writeln!(out, "probe {} = {}", u.name(*x), truth(*b));
    }
    for (e, b) in set.members().iter().zip(&t.labels) {
        let _ = writeln!(out, "{} = {}", e.display(u), truth(*b));
    }
    let _ = writeln!(out, "probes={} depth={}", t.probes.len(), d.depth());
    Ok(out)
}

fn prov(command: ProvCommand) -> Outcome {
    match command {
        ProvCommand::Eval { db, query } => {
            let db = load_database(&read(&db)?)?;
            let q = Query::parse(&read(&query)?)?;
            Ok(pretty(&eval_query(&db, &q)?.to_json()))
        }
        ProvCommand::ToDb { dnf, k, db_out, query_out } => {
            let set = load_set(&dnf)?;
            let [member] = set.members() else {
                return Err(Failure::Usage(format!("{}: expected a single expression", dnf.display())));
            };
            let d = member.to_monotone_dnf(set.universe())?;
            let (db, q) = dnf_to_database(&d, k)?;
            let query = serde_json::to_value(&q).expect("queries serialize");
            match (db_out, query_out) {
                (Some(db_path), Some(query_path)) => {
                    write(&db_path, &pretty(&db.to_json()))?;
                    write(&query_path, &pretty(&query))?;
                    Ok(format!("wrote {} and {}\n", db_path.display(), query_path.display()))
                }
                _ => Ok(pretty(&json!({"database": db.to_json(), "query": query}))),
            }
        }
    }
}

fn crosscheck(max_nodes: usize, seed: u64, trials: usize, json: bool) -> Outcome {
    if !(1..=MAX_CROSSCHECK_NODES).contains(&max_nodes) {
        return Err(Failure::Usage(format!("--max-nodes must be between 1 and {MAX_CROSSCHECK_NODES}")));
    }
    let cfg = SearchConfig::default();
    let mut disagreements = Vec::new();
    let mut check = |d: &MonotoneDnf| -> Result<bool, Failure> {
        let fast = decide_evasive_acyclic(d, d.universe())?;
        let set = ExpressionSet::single(d.universe().clone(), d.to_expression())?;
        let slow = is_evasive(&set, &cfg)?;
        if fast != slow && disagreements.len() < 10 {
            disagreements.push(d.to_string());
        }
        Ok(slow)
    };
    let (mut smaller, mut largest, mut evasive_largest) = (0usize, 0usize, 0usize);
    for n in 1..=max_nodes {
        for edges in all_labeled_trees(n) {
            let evasive = check(&edges_to_dnf(n, &edges))?;
            if n == max_nodes {
                largest += 1;
                evasive_largest += usize::from(evasive);
            } else {
                smaller += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        check(&random_forest(max_nodes, true, &mut rng))?;
    }
    let report = if json {
        pretty(&json!({
            "max_nodes": max_nodes,
            "seed": seed,
            "trees": largest,
            "evasive_trees": evasive_largest,
            "smaller_trees": smaller,
            "forests": trials,
            "disagreements": disagreements.len(),
            "examples": disagreements,
        }))
    } else {
        let mut out = format!(
            "trees on {max_nodes} nodes: {largest} ({evasive_largest} evasive)\n\
             trees on fewer nodes: {smaller}\n\
             random forests: {trials} (seed {seed})\n\
             disagreements: {}\n",
            disagreements.len()
        );
        for d in &disagreements {
            let _ = writeln!(out, "  {d}");
        }
        out
    };
    if disagreements.is_empty() {
        Ok(report)
    } else {
        Err(Failure::Domain { message: "acyclic procedure disagrees with exhaustive search".into(), stdout: Some(report) })
    }
}

fn factor(set: &ExpressionSet) -> Outcome {
    let u = set.universe();
    let mut members = Vec::with_capacity(set.members().len());
    for (i, e) in set.members().iter().enumerate() {
        let factored = e.to_monotone_dnf(u).ok().and_then(|d| factor_read_once(&d));
        match factored {
            Some(f) => members.push(f),
            None => {
                eprintln!("member {}: no read-once form found, kept as is", i + 1);
                members.push(e.clone());
            }
        }
    }
    Ok(ExpressionSet::new(u.clone(), members)?.to_text())
}
