//! Read-once structure: occurrence counting, the read-once evasiveness
//! criterion, and factoring monotone DNFs into read-once form.

use std::collections::{BTreeMap, BTreeSet};

use crate::boolexpr::{Expression, ExpressionSet, MonotoneDnf, Term, Var};

/// Literal occurrence counts, per member and over the whole set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OccurrenceIndex {
    pub per_member: Vec<BTreeMap<Var, usize>>,
    pub total: BTreeMap<Var, usize>,
}

impl OccurrenceIndex {
    pub fn of_expression(e: &Expression) -> BTreeMap<Var, usize> {
        let mut counts = BTreeMap::new();
        e.for_each_occurrence(&mut |v| *counts.entry(v).or_insert(0) += 1);
        counts
    }

    pub fn of_set(s: &ExpressionSet) -> OccurrenceIndex {
        let per_member: Vec<_> = s.members().iter().map(OccurrenceIndex::of_expression).collect();
        let mut total = BTreeMap::new();
        for counts in &per_member {
            for (&v, &c) in counts {
                *total.entry(v).or_insert(0) += c;
            }
        }
        OccurrenceIndex { per_member, total }
    }
}

pub fn is_read_once(e: &Expression) -> bool {
    OccurrenceIndex::of_expression(e).values().all(|&c| c <= 1)
}

/// No variable occurs twice, even across different members.
pub fn is_overall_read_once(s: &ExpressionSet) -> bool {
    OccurrenceIndex::of_set(s).total.values().all(|&c| c <= 1)
}

/// A constant, or an expression with no constant occurrence at all.
pub fn is_non_simplifiable(e: &Expression) -> bool {
    e.as_const().is_some() || !e.contains_constant()
}

fn read_once_hypotheses(s: &ExpressionSet, members: &[Expression]) -> bool {
    let mut seen = BTreeSet::new();
    let mut repeated = false;
    for m in members {
        m.for_each_occurrence(&mut |v| repeated |= !seen.insert(v));
    }
    !repeated && seen.len() == s.n() && members.iter().all(is_non_simplifiable)
}

/// `Some(true)` when `s` is (equivalent to) an overall read-once set of
/// non-simplifiable members mentioning every variable; `None` when this
/// criterion does not apply. Never answers `Some(false)`.
pub fn evasive_by_read_once(s: &ExpressionSet) -> Option<bool> {
    if read_once_hypotheses(s, s.members()) {
        return Some(true);
    }
    let mut changed = false;
    let mut factored = Vec::with_capacity(s.members().len());
    for m in s.members() {
        if !is_read_once(m) && m.is_negation_free() {
            if let Some(f) = m.to_monotone_dnf(s.universe()).ok().as_ref().and_then(factor_read_once) {
                factored.push(f);
                changed = true;
                continue;
            }
        }
        factored.push(m.clone());
    }
    (changed && read_once_hypotheses(s, &factored)).then_some(true)
}

/// Factors a monotone DNF (already free of absorbed terms) into a read-once
/// expression when the recursion below succeeds:
///
/// * a single term is its conjunction;
/// * variables shared by every term are pulled out as a conjunction;
/// * terms that split into groups sharing no variable are factored group by
///   group and joined by a disjunction;
/// * a connected group is split by the components of the complement of its
///   co-occurrence graph, and succeeds when the terms are exactly the product
///   of their projections onto those components.
///
/// For a monotone DNF this succeeds exactly when the function is read-once.
pub fn factor_read_once(d: &MonotoneDnf) -> Option<Expression> {
    if let Some(b) = d.as_const() {
        return Some(Expression::Const(b));
    }
    factor(&d.terms().iter().cloned().collect::<Vec<_>>()).map(|e| e.simplify())
}

fn conjunction(vars: &Term) -> Vec<Expression> {
    vars.iter().map(|&v| Expression::Var(v)).collect()
}

fn factor(terms: &[Term]) -> Option<Expression> {
    if let [only] = terms {
        return Some(Expression::and(conjunction(only)));
    }
    let common: Term = terms.iter().skip(1).fold(terms[0].clone(), |acc, t| &acc & t);
    if !common.is_empty() {
        let rest: Vec<Term> = terms.iter().map(|t| t - &common).collect();
        let mut parts = conjunction(&common);
        parts.push(factor(&rest)?);
        return Some(Expression::and(parts));
    }
    let groups = co_occurrence_groups(terms);
    if groups.len() > 1 {
        return groups.iter().map(|g| factor(g)).collect::<Option<Vec<_>>>().map(Expression::or);
    }
    let blocks = non_co_occurrence_blocks(terms);
    if blocks.len() < 2 {
        return None;
    }
    let mut product = 1usize;
    let mut parts = Vec::with_capacity(blocks.len());
    for block in &blocks {
        let projected: BTreeSet<Term> = terms.iter().map(|t| t & block).collect();
        if projected.contains(&Term::new()) {
            return None;
        }
        product = product.saturating_mul(projected.len());
        parts.push(factor(&projected.into_iter().collect::<Vec<_>>())?);
    }
    // Terms map injectively to their projections, so equal counts mean every
    // combination of projections is present.
    (product == terms.len()).then(|| Expression::and(parts))
}

/// Components of the graph joining two variables when no term contains both.
fn non_co_occurrence_blocks(terms: &[Term]) -> Vec<Term> {
    let vars: Vec<Var> = terms.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let together: BTreeSet<(Var, Var)> = terms
        .iter()
        .flat_map(|t| t.iter().flat_map(move |&a| t.iter().map(move |&b| (a, b))))
        .collect();
    let mut block: Vec<Option<usize>> = vec![None; vars.len()];
    let mut out = Vec::new();
    for start in 0..vars.len() {
        if block[start].is_some() {
            continue;
        }
        let id = out.len();
        let mut members = Term::new();
        let mut stack = vec![start];
        block[start] = Some(id);
        while let Some(i) = stack.pop() {
            members.insert(vars[i]);
            for j in 0..vars.len() {
                if block[j].is_none() && !together.contains(&(vars[i], vars[j])) {
                    block[j] = Some(id);
                    stack.push(j);
                }
            }
        }
        out.push(members);
    }
    out
}

/// Partitions terms into classes connected by shared variables, ordered by first term.
fn co_occurrence_groups(terms: &[Term]) -> Vec<Vec<Term>> {
    let mut group_of: Vec<usize> = (0..terms.len()).collect();
    fn find(g: &mut [usize], mut i: usize) -> usize {
        while g[i] != i {
            g[i] = g[g[i]];
            i = g[i];
        }
        i
    }
    let mut owner: BTreeMap<Var, usize> = BTreeMap::new();
    for (i, t) in terms.iter().enumerate() {
        for &v in t {
            match owner.get(&v) {
                Some(&j) => {
                    let (a, b) = (find(&mut group_of, i), find(&mut group_of, j));
                    group_of[a.max(b)] = a.min(b);
                }
                None => {
                    owner.insert(v, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Term>> = BTreeMap::new();
    for (i, t) in terms.iter().enumerate() {
        let root = find(&mut group_of, i);
        groups.entry(root).or_default().push(t.clone());
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::{Valuation, VariableUniverse};

    fn set(text: &str) -> ExpressionSet {
        ExpressionSet::parse(text).unwrap()
    }

    #[test]
    fn read_once_checks() {
        let s = set("a0&((r0&e0)|(r1&e1)|(r2&e3))\n(a0&r0&e0)|(a0&r1&e1)\nx");
        assert!(is_read_once(&s.members()[0]));
        assert!(!is_read_once(&s.members()[1]));
        assert!(is_read_once(&s.members()[2]));

        assert!(!is_overall_read_once(&set("x&y\nx|z")));
        assert!(is_overall_read_once(&set("x\ny")));
        let idx = OccurrenceIndex::of_set(&set("x&y\nx|z"));
        assert_eq!(idx.total[&Var::new(0)], 2);
        assert_eq!(idx.per_member[1][&Var::new(0)], 1);
    }

    #[test]
    fn non_simplifiable() {
        let s = set("vars: w x y z\n1\nx & 1\n(w&x)|(x&y)|(y&z)");
        assert!(is_non_simplifiable(&s.members()[0]));
        assert!(!is_non_simplifiable(&s.members()[1]));
        assert!(is_non_simplifiable(&s.members()[2]));
    }

    #[test]
    fn read_once_evasiveness() {
        assert_eq!(evasive_by_read_once(&set("x1&x2&x3")), Some(true));
        assert_eq!(evasive_by_read_once(&set("x&y\nx|z")), None);
        assert_eq!(evasive_by_read_once(&set("vars: w x y z\n(w&x)|(y|z)")), Some(true));
        assert_eq!(evasive_by_read_once(&set("vars: x y q\nx&y")), None);
        // Equivalent to a read-once form after factoring.
        assert_eq!(evasive_by_read_once(&set("(a&b)|(a&c)")), Some(true));
        assert_eq!(evasive_by_read_once(&set("(x&y)|(y&z)|(x&z)")), None);
    }

    fn dnf(u: &VariableUniverse, terms: &[&[&str]]) -> MonotoneDnf {
        MonotoneDnf::from_names(u.clone(), terms).unwrap()
    }

    #[test]
    fn factoring() {
        let u = VariableUniverse::new(["a0", "r0", "e0", "r1", "e1", "r2", "e3"]).unwrap();
        let d = dnf(&u, &[&["a0", "r0", "e0"], &["a0", "r1", "e1"], &["a0", "r2", "e3"]]);
        let f = factor_read_once(&d).unwrap();
        assert_eq!(f.display(&u).to_string(), "(a0 & ((r0 & e0) | (r1 & e1) | (r2 & e3)))");
        assert!(is_read_once(&f));
        for bits in 0..1u64 << u.len() {
            let v = Valuation::from_bits(u.len(), bits);
            assert_eq!(f.evaluate(&v), d.evaluate(&v));
        }

        let u = VariableUniverse::new(["x", "y", "z"]).unwrap();
        assert_eq!(factor_read_once(&dnf(&u, &[&["x", "y"], &["y", "z"], &["x", "z"]])), None);
        assert_eq!(factor_read_once(&dnf(&u, &[&["x"]])), Some(Expression::Var(Var::new(0))));
        assert_eq!(factor_read_once(&MonotoneDnf::constant(u, false)), Some(Expression::Const(false)));
    }
}
