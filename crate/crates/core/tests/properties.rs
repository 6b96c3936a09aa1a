//! Cross-module invariants checked against independent oracles.

use std::collections::HashMap;

use probedepth::boolexpr::{Expression, ExpressionSet, MonotoneDnf, Valuation, Var, VariableUniverse};
use probedepth::families::{psi, psi_strategy};
use probedepth::graphdnf::{decide_evasive_acyclic, find_pattern, pattern_rooted_at, GraphDnf};
use probedepth::provenance::{eval_query, join_width, max_term_size};
use probedepth::random;
use probedepth::readonce::{evasive_by_read_once, factor_read_once, is_read_once};
use probedepth::strategy::{
    decide_depth_at_most, greedy_strategy, is_evasive, optimal_depth, run_session, SearchConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn random_expr(n: usize, depth: usize, rng: &mut impl Rng) -> Expression {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..12) {
            0 => Expression::Const(rng.gen()),
            _ => Expression::Var(Var::new(rng.gen_range(0..n))),
        };
    }
    match rng.gen_range(0..5) {
        0 => Expression::not(random_expr(n, depth - 1, rng)),
        1 | 2 => Expression::And((0..rng.gen_range(2..4)).map(|_| random_expr(n, depth - 1, rng)).collect()),
        _ => Expression::Or((0..rng.gen_range(2..4)).map(|_| random_expr(n, depth - 1, rng)).collect()),
    }
}

fn random_set(max_n: usize, rng: &mut impl Rng) -> ExpressionSet {
    let n = rng.gen_range(1..=max_n);
    let u = VariableUniverse::new((0..n).map(|i| format!("v{i}"))).unwrap();
    let members = (0..rng.gen_range(1..=3)).map(|_| random_expr(n, 4, rng)).collect();
    ExpressionSet::new(u, members).unwrap()
}

/// Minimax over partial valuations, deciding constancy by enumerating completions.
fn oracle_depth(s: &ExpressionSet) -> usize {
    fn decided(s: &ExpressionSet, fixed: &[Option<bool>]) -> bool {
        let free: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].is_none()).collect();
        let at = |bits: u64| {
            let mut v = Valuation::from_fn(fixed.len(), |i| fixed[i].unwrap_or(false));
            for (k, &i) in free.iter().enumerate() {
                v.set(Var::new(i), (bits >> k) & 1 == 1);
            }
            s.evaluate(&v)
        };
        let first = at(0);
        (1..1u64 << free.len()).all(|b| at(b) == first)
    }
    fn go(s: &ExpressionSet, fixed: &mut Vec<Option<bool>>, memo: &mut HashMap<Vec<Option<bool>>, usize>) -> usize {
        if let Some(&d) = memo.get(fixed) {
            return d;
        }
        let d = if decided(s, fixed) {
            0
        } else {
            let mut best = usize::MAX;
            for i in 0..fixed.len() {
                if fixed[i].is_none() {
                    let mut worst = 0;
                    for b in [false, true] {
                        fixed[i] = Some(b);
                        worst = worst.max(go(s, fixed, memo));
                    }
                    fixed[i] = None;
                    best = best.min(1 + worst);
                }
            }
            best
        };
        memo.insert(fixed.clone(), d);
        d
    }
    go(s, &mut vec![None; s.n()], &mut HashMap::new())
}

#[test]
fn optimal_depth_matches_oracle_up_to_eight_variables() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let s = random_set(8, &mut rng);
        let r = optimal_depth(&s, &cfg()).unwrap();
        assert_eq!(r.depth, oracle_depth(&s), "{}", s.to_text());
        assert_eq!(r.diagram.depth(), r.depth);
        assert_eq!(r.evasive, r.depth == s.n());
        for k in 0..s.n() {
            assert_eq!(decide_depth_at_most(&s, k, &cfg()).unwrap(), r.depth <= k);
        }
        assert_eq!(is_evasive(&s, &cfg()).unwrap(), r.evasive);
    }
}

#[test]
fn diagrams_are_sound_on_every_valuation() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let s = random_set(10, &mut rng);
        let r = optimal_depth(&s, &cfg()).unwrap();
        let g = greedy_strategy(&s).unwrap();
        assert!(g.depth() >= r.depth);
        for bits in 0..1u64 << s.n() {
            let v = Valuation::from_bits(s.n(), bits);
            let expected = s.evaluate(&v);
            assert_eq!(r.diagram.follow(&v).0, expected.as_slice());
            assert_eq!(g.follow(&v).0, expected.as_slice());
            let t = run_session(&r.diagram, |x| Some(v.get(x))).unwrap();
            assert_eq!(t.labels, expected);
            assert!(t.probes.len() <= r.depth);
        }
    }
}

#[test]
fn threaded_search_reports_the_same_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let threaded = SearchConfig { threads: 4, ..cfg() };
    for _ in 0..30 {
        let s = random_set(9, &mut rng);
        let a = optimal_depth(&s, &cfg()).unwrap();
        let b = optimal_depth(&s, &threaded).unwrap();
        assert_eq!(a.depth, b.depth);
        assert!(b.diagram.labels_match(&s).unwrap());
    }
}

#[test]
fn monotone_lower_bound_never_exceeds_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..80 {
        let d = random::random_kdnf(4, 9, &mut rng);
        let s = ExpressionSet::single(d.universe().clone(), d.to_expression()).unwrap();
        let depth = optimal_depth(&s, &cfg()).unwrap().depth;
        assert!(d.depth_lower_bound().unwrap() <= depth, "{d:?}");
    }
}

#[test]
fn session_examples() {
    let s = ExpressionSet::parse("x&y\nx|z").unwrap();
    let d = optimal_depth(&s, &cfg()).unwrap().diagram;
    let u = s.universe().clone();
    let answers = |pairs: &'static [(&'static str, bool)]| {
        let u = u.clone();
        move |x: Var| pairs.iter().find(|(n, _)| u.name(x) == *n).map(|p| p.1)
    };
    let t = run_session(&d, answers(&[("x", true), ("y", true)])).unwrap();
    assert_eq!((t.labels, t.probes.len()), (vec![true, true], 2));
    let t = run_session(&d, answers(&[("x", false), ("z", false)])).unwrap();
    assert_eq!((t.labels, t.probes.len()), (vec![false, false], 2));
    let leaf = probedepth::DecisionDiagram::leaf(u.clone(), vec![true]);
    assert!(run_session(&leaf, |_| None).unwrap().probes.is_empty());
}

#[test]
fn greedy_examples() {
    let s = ExpressionSet::parse("x&y\nx|z").unwrap();
    assert_eq!(greedy_strategy(&s).unwrap().root_variable(), Some("x"));
    let s = ExpressionSet::parse("x").unwrap();
    let d = greedy_strategy(&s).unwrap();
    assert_eq!((d.depth(), d.nodes().len()), (1, 3));
    let d = greedy_strategy(&ExpressionSet::parse("1").unwrap()).unwrap();
    assert_eq!(d.nodes().len(), 1);
}

#[test]
fn patterns_verify_reroot_and_match_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..400 {
        let d = random::random_forest(8, true, &mut rng);
        let s = ExpressionSet::single(d.universe().clone(), d.to_expression()).unwrap();
        let g = GraphDnf::from_monotone_dnf(&d).unwrap();
        let (parts, free) = g.components();
        let mut any_pattern = false;
        for part in &parts {
            if let Some(p) = find_pattern(part).unwrap() {
                any_pattern = true;
                assert!(p.verify(part));
                for label in p.labels() {
                    let again = pattern_rooted_at(part, label).unwrap().expect("re-rooting keeps a pattern");
                    assert!(again.verify(part));
                }
                // A component with a pattern is not evasive on its own.
                let sub = part.to_dnf();
                let vars = sub.variables();
                let names: Vec<&str> = vars.iter().map(|&v| d.universe().name(v)).collect();
                let local = VariableUniverse::new(names).unwrap();
                let local_dnf = sub.remap(&local).unwrap();
                let local_set = ExpressionSet::single(local.clone(), local_dnf.to_expression()).unwrap();
                assert!(!is_evasive(&local_set, &cfg()).unwrap());
            }
        }
        let expected = free.is_empty() && !any_pattern;
        assert_eq!(decide_evasive_acyclic(&d, d.universe()).unwrap(), expected);
        assert_eq!(is_evasive(&s, &cfg()).unwrap(), expected, "{d:?}");
    }
}

#[test]
fn all_small_trees_agree_with_search() {
    for n in 1..=6 {
        for edges in random::all_labeled_trees(n) {
            let d = random::edges_to_dnf(n, &edges);
            let s = ExpressionSet::single(d.universe().clone(), d.to_expression()).unwrap();
            assert_eq!(decide_evasive_acyclic(&d, d.universe()).unwrap(), is_evasive(&s, &cfg()).unwrap(), "{d:?}");
        }
    }
}

#[test]
fn read_once_verdicts_are_confirmed_by_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut confirmed = 0;
    for i in 0..200 {
        let s = if i % 2 == 0 {
            random::random_read_once_set(9, &mut rng)
        } else {
            random_set(7, &mut rng)
        };
        if evasive_by_read_once(&s) == Some(true) {
            confirmed += 1;
            assert!(is_evasive(&s, &cfg()).unwrap(), "{}", s.to_text());
        }
    }
    assert!(confirmed >= 100);
}

#[test]
fn factoring_is_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut factored = 0;
    for _ in 0..300 {
        let d = if rng.gen_bool(0.5) {
            random::random_kdnf(3, 8, &mut rng)
        } else {
            // Monotone read-once formulas always factor.
            let n = rng.gen_range(1..=8);
            let vars: Vec<Var> = (0..n).map(Var::new).collect();
            let e = monotone(random::random_read_once(&vars, &mut rng));
            let u = VariableUniverse::new((0..n).map(|i| format!("x{i}"))).unwrap();
            let d = e.to_monotone_dnf(&u).unwrap();
            assert!(factor_read_once(&d).is_some(), "{d:?}");
            d
        };
        if let Some(f) = factor_read_once(&d) {
            factored += 1;
            assert!(is_read_once(&f));
            let n = d.universe().len();
            for bits in 0..1u64 << n {
                let v = Valuation::from_bits(n, bits);
                assert_eq!(f.evaluate(&v), d.evaluate(&v));
            }
        }
    }
    assert!(factored > 150);
    let path = MonotoneDnf::from_names(VariableUniverse::new(["a", "b", "c", "d"]).unwrap(), &[&["a", "b"], &["b", "c"], &["c", "d"]]).unwrap();
    assert!(factor_read_once(&path).is_none());
}

fn monotone(e: Expression) -> Expression {
    match e {
        Expression::Not(c) => monotone(*c),
        Expression::And(cs) => Expression::And(cs.into_iter().map(monotone).collect()),
        Expression::Or(cs) => Expression::Or(cs.into_iter().map(monotone).collect()),
        other => other,
    }
}

#[test]
fn provenance_terms_bounded_by_join_width() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for _ in 0..300 {
        let db = random::random_database(12, &mut rng);
        let q = random::random_query(4, &mut rng);
        let r = eval_query(&db, &q).unwrap();
        assert!(max_term_size(&r) <= join_width(&q));
        for row in &r.rows {
            let again = MonotoneDnf::new(row.annotation.universe().clone(), row.annotation.terms().clone());
            assert_eq!(again, row.annotation);
        }
    }
}

#[test]
fn psi_strategies_are_sound_through_level_two() {
    for i in 0..=2 {
        let s = psi(i).unwrap();
        let d = psi_strategy(i).unwrap();
        assert_eq!(d.depth(), 2 * (i + 2) - 1);
        for bits in 0..1u64 << s.n() {
            let v = Valuation::from_bits(s.n(), bits);
            assert_eq!(d.follow(&v).0[0], s.members()[0].evaluate(&v));
        }
    }
    let p2 = psi(2).unwrap();
    assert!(p2.members()[0].monotone_depth_lower_bound(p2.universe()).unwrap() >= 4);
}
