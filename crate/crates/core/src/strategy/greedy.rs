//! A polynomial-per-node heuristic strategy.
//!
//! At every node the probe is the occurring variable whose worse branch leaves
//! the fewest variables occurring in undetermined members. Ties go to the lowest
//! universe index. No optimality is claimed; the result is only guaranteed sound.

use std::collections::{BTreeSet, HashMap};

use super::{DecisionDiagram, DiagramBuilder};
use crate::boolexpr::{Expression, ExpressionSet, Var};
use crate::error::Result;

struct Greedy {
    builder: DiagramBuilder,
    shared: HashMap<Vec<Expression>, usize>,
}

/// Variables occurring in members that are not yet constant, or the labels
/// once every member is decided.
fn open_variables(members: &[Expression]) -> Result<std::result::Result<BTreeSet<Var>, Vec<bool>>> {
    let mut labels = Vec::with_capacity(members.len());
    let mut open = BTreeSet::new();
    for m in members {
        match m.is_constant()? {
            Some(b) => labels.push(b),
            None => m.for_each_occurrence(&mut |v| {
                open.insert(v);
            }),
        }
    }
    Ok(if open.is_empty() { Err(labels) } else { Ok(open) })
}

fn restrict_all(members: &[Expression], x: Var, value: bool) -> Vec<Expression> {
    members.iter().map(|m| m.restrict(x, value)).collect()
}

impl Greedy {
    fn node(&mut self, members: Vec<Expression>) -> Result<usize> {
        if let Some(&i) = self.shared.get(&members) {
            return Ok(i);
        }
        let open = match open_variables(&members)? {
            Err(labels) => return Ok(self.builder.leaf(labels)),
            Ok(open) => open,
        };
        let mut best: Option<(usize, Var)> = None;
        for &x in &open {
            let mut worst = 0;
            for value in [true, false] {
                let left = match open_variables(&restrict_all(&members, x, value))? {
                    Ok(o) => o.len(),
                    Err(_) => 0,
                };
                worst = worst.max(left);
            }
            if best.map_or(true, |(score, _)| worst < score) {
                best = Some((worst, x));
            }
        }
        let (_, x) = best.expect("at least one open variable");
        let on_true = self.node(restrict_all(&members, x, true))?;
        let on_false = self.node(restrict_all(&members, x, false))?;
        let i = self.builder.probe(x, on_true, on_false);
        self.shared.insert(members, i);
        Ok(i)
    }
}

/// Builds a sound, not necessarily optimal, strategy for `set`.
pub fn greedy_strategy(set: &ExpressionSet) -> Result<DecisionDiagram> {
    let mut g = Greedy { builder: DiagramBuilder::default(), shared: HashMap::new() };
    let members: Vec<Expression> = set.members().iter().map(Expression::simplify).collect();
    let root = g.node(members)?;
    g.builder.finish(set.universe().clone(), root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::Valuation;
    use crate::strategy::{optimal_depth, SearchConfig};

    #[test]
    fn greedy_is_sound_and_not_below_optimal() {
        for text in [
            "x&y\nx|z",
            "vars: w x y z\n(w&x)|(x&y)|(y&z)",
            "(a&!b)|(c&d)\n!(a|d)",
            "vars: p q\n1\np|!p",
            "x1&x2&x3",
        ] {
            let s = ExpressionSet::parse(text).unwrap();
            let d = greedy_strategy(&s).unwrap();
            assert!(d.labels_match(&s).unwrap(), "{text}");
            for bits in 0..1u64 << s.n() {
                let v = Valuation::from_bits(s.n(), bits);
                assert_eq!(d.follow(&v).0, s.evaluate(&v).as_slice());
            }
            let opt = optimal_depth(&s, &SearchConfig::default()).unwrap().depth;
            assert!(d.depth() >= opt);
            assert!(d.depth() <= s.n());
        }
    }

    #[test]
    fn greedy_handles_wide_monotone_input() {
        let names: Vec<String> = (0..30).map(|i| format!("v{i}")).collect();
        let s = ExpressionSet::parse(&names.join(" | ")).unwrap();
        let d = greedy_strategy(&s).unwrap();
        assert_eq!(d.depth(), 30);
    }
}
