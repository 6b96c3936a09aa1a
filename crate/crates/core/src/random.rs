//! Seeded generators for property tests and cross-checks.
//!
//! Every generator takes the RNG explicitly so runs are reproducible from a seed.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::boolexpr::{Expression, ExpressionSet, MonotoneDnf, Term, Var, VariableUniverse};
use crate::provenance::{AnnotatedDatabase, Atom, CompareOp, Operand, Query, Relation, Tuple, Value};

/// Decodes a Prüfer sequence over `0..seq.len() + 2` into tree edges.
pub fn prufer_decode(seq: &[usize]) -> Vec<(usize, usize)> {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = leaves.pop_first().expect("a leaf always exists");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let last: Vec<usize> = leaves.into_iter().collect();
    edges.push((last[0], last[1]));
    edges
}

/// Every labeled tree on `n` nodes, as edge lists (`n^(n-2)` of them).
pub fn all_labeled_trees(n: usize) -> Box<dyn Iterator<Item = Vec<(usize, usize)>>> {
    match n {
        0 | 1 => Box::new(std::iter::once(Vec::new())),
        2 => Box::new(std::iter::once(vec![(0, 1)])),
        _ => {
            let len = n - 2;
            let total = n.pow(len as u32);
            Box::new((0..total).map(move |mut code| {
                let mut seq = vec![0; len];
                for s in seq.iter_mut() {
                    *s = code % n;
                    code /= n;
                }
                prufer_decode(&seq)
            }))
        }
    }
}

pub fn random_tree(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    prufer_decode(&seq)
}

fn numbered(prefix: &str, n: usize) -> VariableUniverse {
    VariableUniverse::new((0..n).map(|i| format!("{prefix}{i}"))).expect("valid names")
}

/// The all-binary-term DNF of a tree or forest given by its edges.
pub fn edges_to_dnf(n: usize, edges: &[(usize, usize)]) -> MonotoneDnf {
    MonotoneDnf::new(numbered("x", n), edges.iter().map(|&(a, b)| [Var::new(a), Var::new(b)]))
}

/// A random acyclic monotone 2-DNF on `1..=max_vars` variables: a forest of
/// random trees, where some single-node components become singleton terms and
/// (when `allow_free`) some are left out of every term.
pub fn random_forest(max_vars: usize, allow_free: bool, rng: &mut impl Rng) -> MonotoneDnf {
    let n = rng.gen_range(1..=max_vars);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut terms: Vec<Term> = Vec::new();
    let mut rest = &order[..];
    while !rest.is_empty() {
        let size = rng.gen_range(1..=rest.len());
        let (part, tail) = rest.split_at(size);
        rest = tail;
        if size == 1 {
            if !allow_free || rng.gen_bool(0.5) {
                terms.push(Term::from([Var::new(part[0])]));
            }
            continue;
        }
        for (a, b) in random_tree(size, rng) {
            terms.push(Term::from([Var::new(part[a]), Var::new(part[b])]));
        }
    }
    MonotoneDnf::new(numbered("x", n), terms)
}

/// A random read-once expression over exactly `vars`, with no constants.
pub fn random_read_once(vars: &[Var], rng: &mut impl Rng) -> Expression {
    let mut e = if vars.len() == 1 {
        Expression::Var(vars[0])
    } else {
        let parts = rng.gen_range(2..=vars.len().min(3));
        let mut cuts: Vec<usize> = (1..vars.len()).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
        cuts.sort();
        let mut children = Vec::new();
        let mut start = 0;
        for end in cuts.into_iter().chain([vars.len()]) {
            children.push(random_read_once(&vars[start..end], rng));
            start = end;
        }
        if rng.gen_bool(0.5) {
            Expression::And(children)
        } else {
            Expression::Or(children)
        }
    };
    if rng.gen_bool(0.25) {
        e = Expression::not(e);
    }
    e
}

/// An overall read-once set of non-simplifiable members whose supports cover
/// a universe of `1..=max_vars` variables.
pub fn random_read_once_set(max_vars: usize, rng: &mut impl Rng) -> ExpressionSet {
    let n = rng.gen_range(1..=max_vars);
    let mut vars: Vec<Var> = (0..n).map(Var::new).collect();
    vars.shuffle(rng);
    let members = rng.gen_range(1..=n.min(3));
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(members - 1).collect();
    cuts.sort();
    let mut out = Vec::new();
    let mut start = 0;
    for end in cuts.into_iter().chain([n]) {
        out.push(random_read_once(&vars[start..end], rng));
        start = end;
    }
    ExpressionSet::new(numbered("x", n), out).expect("variables in range")
}

/// Random 3-CNF (`cnf = true`) or 3-DNF over `n` variables with `m` clauses.
pub fn random_three_normal_form(n: usize, m: usize, cnf: bool, rng: &mut impl Rng) -> ExpressionSet {
    let clauses = (0..m)
        .map(|_| {
            let lits = (0..3)
                .map(|_| {
                    let v = Expression::Var(Var::new(rng.gen_range(0..n)));
                    if rng.gen_bool(0.5) {
                        Expression::not(v)
                    } else {
                        v
                    }
                })
                .collect();
            if cnf {
                Expression::Or(lits)
            } else {
                Expression::And(lits)
            }
        })
        .collect();
    let e = if cnf { Expression::and(clauses) } else { Expression::or(clauses) };
    ExpressionSet::single(numbered("x", n), e).expect("variables in range")
}

/// A random non-constant monotone DNF with terms of size `1..=k` over
/// `1..=max_vars` variables.
pub fn random_kdnf(k: usize, max_vars: usize, rng: &mut impl Rng) -> MonotoneDnf {
    let n = rng.gen_range(1..=max_vars);
    let count = rng.gen_range(1..=2 * n);
    let terms = (0..count).map(|_| {
        let size = rng.gen_range(1..=k.min(n));
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(rng);
        all.into_iter().take(size).map(Var::new).collect::<Term>()
    });
    MonotoneDnf::new(numbered("x", n), terms.collect::<Vec<_>>())
}

/// A random database of at most `max_tuples` tuples over three binary integer
/// relations. Annotations are sometimes shared between tuples.
pub fn random_database(max_tuples: usize, rng: &mut impl Rng) -> AnnotatedDatabase {
    let total = rng.gen_range(1..=max_tuples);
    let mut relations: Vec<Relation> = ["R", "S", "T"]
        .iter()
        .map(|name| Relation { name: name.to_string(), columns: vec!["a".into(), "b".into()], tuples: Vec::new() })
        .collect();
    let mut vars = 0;
    for _ in 0..total {
        let annotation = if vars > 0 && rng.gen_bool(0.15) {
            Var::new(rng.gen_range(0..vars))
        } else {
            vars += 1;
            Var::new(vars - 1)
        };
        let values = vec![Value::Int(rng.gen_range(0..3)), Value::Int(rng.gen_range(0..3))];
        let r = rng.gen_range(0..relations.len());
        relations[r].tuples.push(Tuple { values, annotation });
    }
    AnnotatedDatabase::new(numbered("t", vars), relations).expect("well-formed")
}

/// A random SPJU query of height at most `depth` over [`random_database`]'s schema.
pub fn random_query(depth: usize, rng: &mut impl Rng) -> Query {
    let mut aliases = 0;
    gen_query(depth, &mut aliases, rng).0
}

fn gen_query(depth: usize, aliases: &mut usize, rng: &mut impl Rng) -> (Query, Vec<String>) {
    let choice = if depth == 0 { 0 } else { rng.gen_range(0..5) };
    match choice {
        1 => {
            let (q, cols) = gen_query(depth - 1, aliases, rng);
            if cols.is_empty() {
                return (q, cols);
            }
            let lhs = Operand::Col(cols.choose(rng).unwrap().clone());
            let rhs = if rng.gen_bool(0.5) {
                Operand::Col(cols.choose(rng).unwrap().clone())
            } else {
                Operand::Lit(Value::Int(rng.gen_range(0..3)))
            };
            let op = *[CompareOp::Eq, CompareOp::Ne, CompareOp::Lt, CompareOp::Le, CompareOp::Gt, CompareOp::Ge]
                .choose(rng)
                .unwrap();
            (Query::Select { pred: vec![Atom::Compare { lhs, op, rhs }], input: Box::new(q) }, cols)
        }
        2 => {
            let (q, cols) = gen_query(depth - 1, aliases, rng);
            let keep: Vec<String> = cols.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            (Query::Project { columns: keep.clone(), input: Box::new(q) }, keep)
        }
        3 => {
            let (l, lc) = gen_query(depth - 1, aliases, rng);
            let (r, rc) = gen_query(depth - 1, aliases, rng);
            let on = if !lc.is_empty() && !rc.is_empty() && rng.gen_bool(0.8) {
                vec![(lc.choose(rng).unwrap().clone(), rc.choose(rng).unwrap().clone())]
            } else {
                Vec::new()
            };
            let cols = lc.into_iter().chain(rc).collect();
            (Query::Join { on, left: Box::new(l), right: Box::new(r) }, cols)
        }
        4 => {
            // Both sides are cut down to one column so the arities agree.
            let mut side = |aliases: &mut usize| {
                let (mut q, mut cols) = gen_query(depth - 1, aliases, rng);
                if cols.is_empty() {
                    (q, cols) = gen_scan(aliases, rng);
                }
                let c = cols.swap_remove(0);
                (Query::Project { columns: vec![c.clone()], input: Box::new(q) }, vec![c])
            };
            let (a, ac) = side(aliases);
            let (b, _) = side(aliases);
            (Query::Union { inputs: vec![a, b] }, ac)
        }
        _ => gen_scan(aliases, rng),
    }
}

fn gen_scan(aliases: &mut usize, rng: &mut impl Rng) -> (Query, Vec<String>) {
    let relation = *["R", "S", "T"].choose(rng).unwrap();
    let alias = format!("q{}", *aliases);
    *aliases += 1;
    let cols = vec![format!("{alias}.a"), format!("{alias}.b")];
    (Query::scan(relation, &alias), cols)
}
