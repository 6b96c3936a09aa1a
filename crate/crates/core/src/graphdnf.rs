//! Monotone 2-DNFs as graphs, and evasiveness of the acyclic ones through
//! non-evasiveness patterns.
//!
//! A variable `v` of a tree rooted somewhere is *special* when either it is a
//! leaf of the tree that is not a singleton term, or it has children and every
//! child `y` has a grandchild (a child of a child of `y`) that is special. A
//! connected acyclic graph DNF has a pattern iff some root is special.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use crate::boolexpr::{MonotoneDnf, Term, Var, VariableUniverse};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphDnf {
    universe: VariableUniverse,
    /// Each edge is stored with the smaller variable first.
    edges: BTreeSet<(Var, Var)>,
    singletons: BTreeSet<Var>,
}

impl GraphDnf {
    /// Reads binary terms as edges and unit terms as singletons. A singleton
    /// absorbs every edge incident to it.
    pub fn from_monotone_dnf(d: &MonotoneDnf) -> Result<GraphDnf> {
        let mut edges = BTreeSet::new();
        let mut singletons = BTreeSet::new();
        for term in d.terms() {
            let vars: Vec<Var> = term.iter().copied().collect();
            match vars[..] {
                [] => return Err(Error::ConstantFormula),
                [x] => {
                    singletons.insert(x);
                }
                [x, y] => {
                    edges.insert((x, y));
                }
                _ => return Err(Error::TermTooLarge { size: vars.len(), limit: 2 }),
            }
        }
        Ok(GraphDnf::new(d.universe().clone(), edges, singletons))
    }

    fn new(universe: VariableUniverse, edges: BTreeSet<(Var, Var)>, singletons: BTreeSet<Var>) -> GraphDnf {
        let edges = edges
            .into_iter()
            .map(|(x, y)| (x.min(y), x.max(y)))
            .filter(|(x, y)| !singletons.contains(x) && !singletons.contains(y))
            .collect();
        GraphDnf { universe, edges, singletons }
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn edges(&self) -> &BTreeSet<(Var, Var)> {
        &self.edges
    }

    pub fn singletons(&self) -> &BTreeSet<Var> {
        &self.singletons
    }

    /// Variables occurring in some term.
    pub fn term_variables(&self) -> BTreeSet<Var> {
        let mut out = self.singletons.clone();
        for &(x, y) in &self.edges {
            out.insert(x);
            out.insert(y);
        }
        out
    }

    pub fn to_dnf(&self) -> MonotoneDnf {
        let terms = self
            .edges
            .iter()
            .map(|&(x, y)| [x, y].into_iter().collect::<Term>())
            .chain(self.singletons.iter().map(|&x| std::iter::once(x).collect()));
        MonotoneDnf::new(self.universe.clone(), terms)
    }

    fn neighbours(&self) -> BTreeMap<Var, BTreeSet<Var>> {
        let mut adj: BTreeMap<Var, BTreeSet<Var>> = BTreeMap::new();
        for &(x, y) in &self.edges {
            adj.entry(x).or_default().insert(y);
            adj.entry(y).or_default().insert(x);
        }
        adj
    }

    pub fn is_acyclic(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.universe.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for &(x, y) in &self.edges {
            let (a, b) = (find(&mut parent, x.index()), find(&mut parent, y.index()));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    /// Connected components of the term graph, each a `GraphDnf` over the same
    /// universe, ordered by smallest variable; plus the variables in no term.
    pub fn components(&self) -> (Vec<GraphDnf>, BTreeSet<Var>) {
        let adj = self.neighbours();
        let used = self.term_variables();
        let mut seen = BTreeSet::new();
        let mut parts = Vec::new();
        for &start in &used {
            if !seen.insert(start) {
                continue;
            }
            let mut members = BTreeSet::from([start]);
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in adj.get(&v).into_iter().flatten() {
                    if seen.insert(w) {
                        members.insert(w);
                        stack.push(w);
                    }
                }
            }
            let edges = self.edges.iter().filter(|(x, _)| members.contains(x)).copied().collect();
            let singletons = self.singletons.intersection(&members).copied().collect();
            parts.push(GraphDnf { universe: self.universe.clone(), edges, singletons });
        }
        let free = self.universe.vars().filter(|v| !used.contains(v)).collect();
        (parts, free)
    }

    /// Graphviz rendering; singleton terms are double circles and `highlight`
    /// (typically a pattern's labels) is filled.
    pub fn to_dot(&self, highlight: &BTreeSet<Var>) -> String {
        let mut out = String::from("graph dnf {\n");
        for v in self.term_variables() {
            let shape = if self.singletons.contains(&v) { "doublecircle" } else { "circle" };
            let fill = if highlight.contains(&v) { ", style=filled, fillcolor=gold" } else { "" };
            let _ = writeln!(out, "  \"{}\" [shape={shape}{fill}];", self.universe.name(v));
        }
        for &(x, y) in &self.edges {
            let _ = writeln!(out, "  \"{}\" -- \"{}\";", self.universe.name(x), self.universe.name(y));
        }
        out.push_str("}\n");
        out
    }
}

/// A non-evasiveness pattern: a labeled tree whose root's children are the
/// witnesses chosen for each tree child of the root variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub label: Var,
    pub children: Vec<Pattern>,
}

impl Pattern {
    pub fn labels(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::from([self.label]);
        for c in &self.children {
            out.extend(c.labels());
        }
        out
    }

    /// Checks the recursive definition against `g` rooted at this pattern's label.
    pub fn verify(&self, g: &GraphDnf) -> bool {
        if !g.term_variables().contains(&self.label) {
            return false;
        }
        let tree = RootedTree::new(g, self.label);
        fn check(p: &Pattern, g: &GraphDnf, tree: &RootedTree) -> bool {
            let kids = &tree.children[&p.label];
            if kids.is_empty() {
                return p.children.is_empty() && !g.singletons.contains(&p.label);
            }
            p.children.len() == kids.len()
                && kids.iter().zip(&p.children).all(|(y, c)| {
                    tree.children[y].iter().any(|z| tree.children[z].contains(&c.label)) && check(c, g, tree)
                })
        }
        check(self, g, &tree)
    }

    pub fn display<'a>(&'a self, universe: &'a VariableUniverse) -> DisplayPattern<'a> {
        DisplayPattern { pattern: self, universe }
    }
}

/// Renders `w → z`, or `x → [a, b → c]` when a node has several children.
pub struct DisplayPattern<'a> {
    pattern: &'a Pattern,
    universe: &'a VariableUniverse,
}

impl fmt::Display for DisplayPattern<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |p| DisplayPattern { pattern: p, universe: self.universe };
        write!(f, "{}", self.universe.name(self.pattern.label))?;
        match &self.pattern.children[..] {
            [] => Ok(()),
            [only] => write!(f, " → {}", sub(only)),
            many => {
                write!(f, " → [")?;
                for (i, c) in many.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", sub(c))?;
                }
                write!(f, "]")
            }
        }
    }
}

struct RootedTree {
    /// Children sorted by universe index; every reachable variable has an entry.
    children: BTreeMap<Var, Vec<Var>>,
    /// Reachable variables, parents before children.
    order: Vec<Var>,
}

impl RootedTree {
    fn new(g: &GraphDnf, root: Var) -> RootedTree {
        let adj = g.neighbours();
        let mut children = BTreeMap::new();
        let mut order = vec![];
        let mut stack = vec![(root, None)];
        while let Some((v, parent)) = stack.pop() {
            order.push(v);
            let kids: Vec<Var> = adj.get(&v).into_iter().flatten().copied().filter(|&w| Some(w) != parent).collect();
            for &k in kids.iter().rev() {
                stack.push((k, Some(v)));
            }
            children.insert(v, kids);
        }
        RootedTree { children, order }
    }
}

fn check_shape(g: &GraphDnf) -> Result<()> {
    if !g.is_acyclic() {
        return Err(Error::Cyclic);
    }
    if g.components().0.len() > 1 {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// The pattern rooted at `root`, if `root` is special in `g` rooted there.
pub fn pattern_rooted_at(g: &GraphDnf, root: Var) -> Result<Option<Pattern>> {
    check_shape(g)?;
    if !g.term_variables().contains(&root) {
        return Ok(None);
    }
    Ok(rooted(g, root))
}

fn rooted(g: &GraphDnf, root: Var) -> Option<Pattern> {
    let tree = RootedTree::new(g, root);
    // Bottom-up: for each special node remember its witness grandchildren.
    let mut witness: BTreeMap<Var, Option<Vec<Var>>> = BTreeMap::new();
    for &v in tree.order.iter().rev() {
        let kids = &tree.children[&v];
        let entry = if kids.is_empty() {
            (!g.singletons.contains(&v)).then(Vec::new)
        } else {
            kids.iter()
                .map(|y| {
                    tree.children[y]
                        .iter()
                        .flat_map(|z| tree.children[z].iter().copied())
                        .filter(|w| matches!(witness.get(w), Some(Some(_))))
                        .min()
                })
                .collect::<Option<Vec<Var>>>()
        };
        witness.insert(v, entry);
    }
    fn build(v: Var, witness: &BTreeMap<Var, Option<Vec<Var>>>) -> Pattern {
        let picks = witness[&v].as_ref().expect("special node");
        Pattern { label: v, children: picks.iter().map(|&w| build(w, witness)).collect() }
    }
    witness[&root].as_ref().map(|_| build(root, &witness))
}

/// Tries every term variable as root, in universe order, and returns the first
/// pattern found. `g` must be connected and acyclic.
pub fn find_pattern(g: &GraphDnf) -> Result<Option<Pattern>> {
    check_shape(g)?;
    Ok(g.term_variables().into_iter().find_map(|root| rooted(g, root)))
}

/// Polynomial-time evasiveness for monotone acyclic DNFs with terms of size at most two.
pub fn decide_evasive_acyclic(d: &MonotoneDnf, universe: &VariableUniverse) -> Result<bool> {
    let d = d.remap(universe)?;
    if d.as_const().is_some() {
        return Ok(universe.is_empty());
    }
    let g = GraphDnf::from_monotone_dnf(&d)?;
    if !g.is_acyclic() {
        return Err(Error::Cyclic);
    }
    let (parts, free) = g.components();
    if !free.is_empty() {
        return Ok(false);
    }
    for part in &parts {
        if find_pattern(part)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolexpr::ExpressionSet;
    use crate::strategy::{is_evasive, SearchConfig};

    fn dnf(text: &str) -> MonotoneDnf {
        let s = ExpressionSet::parse(text).unwrap();
        s.members()[0].to_monotone_dnf(s.universe()).unwrap()
    }

    fn graph(text: &str) -> GraphDnf {
        GraphDnf::from_monotone_dnf(&dnf(text)).unwrap()
    }

    fn path(n: usize) -> String {
        let names: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
        let terms: Vec<String> = (0..n).map(|i| format!("({}&{})", names[i], names[i + 1])).collect();
        format!("vars: {}\n{}", names.join(" "), terms.join("|"))
    }

    #[test]
    fn graph_reading() {
        let g = graph("vars: w x y z\n(w&x)|(x&y)|(y&z)");
        assert_eq!(g.edges().len(), 3);
        assert!(g.singletons().is_empty());
        assert!(g.is_acyclic());

        let g = graph("x | (x&y)");
        assert!(g.edges().is_empty());
        assert_eq!(g.singletons().len(), 1);

        assert!(!graph("(x&y)|(y&z)|(x&z)").is_acyclic());
        assert!(graph("vars: x\nx").is_acyclic());

        assert!(matches!(
            GraphDnf::from_monotone_dnf(&dnf("a&b&c")),
            Err(Error::TermTooLarge { size: 3, limit: 2 })
        ));
    }

    #[test]
    fn singleton_absorbs_incident_edges() {
        let u = VariableUniverse::new(["x", "y", "z"]).unwrap();
        let [x, y, z] = [0, 1, 2].map(Var::new);
        let g = GraphDnf::new(u, BTreeSet::from([(x, y), (y, z)]), BTreeSet::from([x]));
        assert_eq!(g.edges(), &BTreeSet::from([(y, z)]));
    }

    #[test]
    fn component_split() {
        let (parts, free) = graph("(w&x)|(y&z)").components();
        assert_eq!(parts.len(), 2);
        assert!(free.is_empty());

        let (parts, free) = graph("vars: x y z q\nx|(y&z)").components();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].singletons().len(), 1);
        assert_eq!(parts[1].edges().len(), 1);
        assert_eq!(free, BTreeSet::from([Var::new(3)]));
    }

    #[test]
    fn psi0_pattern() {
        let g = graph("vars: w x y z\n(w&x)|(x&y)|(y&z)");
        let p = find_pattern(&g).unwrap().unwrap();
        assert_eq!(p.display(g.universe()).to_string(), "w → z");
        assert!(p.verify(&g));
        // x is not special: its child w has no grandchild.
        assert_eq!(pattern_rooted_at(&g, Var::new(1)).unwrap(), None);
        // Re-rooting the witness at its other label works.
        let back = pattern_rooted_at(&g, Var::new(3)).unwrap().unwrap();
        assert_eq!(back.display(g.universe()).to_string(), "z → w");
    }

    #[test]
    fn path_and_star() {
        assert_eq!(find_pattern(&graph(&path(4))).unwrap(), None);
        assert_eq!(find_pattern(&graph("(x&y1)|(x&y2)")).unwrap(), None);
        assert!(matches!(find_pattern(&graph("(x&y)|(y&z)|(x&z)")), Err(Error::Cyclic)));
        assert!(matches!(find_pattern(&graph("(w&x)|(y&z)")), Err(Error::Disconnected)));
    }

    #[test]
    fn path_rule_up_to_fifteen() {
        for n in 1..=15 {
            let g = graph(&path(n));
            assert_eq!(find_pattern(&g).unwrap().is_some(), n % 3 == 0, "n = {n}");
        }
    }

    #[test]
    fn evasiveness_examples() {
        let u = |t: &str| ExpressionSet::parse(t).unwrap().universe().clone();
        let t = "vars: w x y z\n(w&x)|(x&y)|(y&z)";
        assert!(!decide_evasive_acyclic(&dnf(t), &u(t)).unwrap());
        assert!(decide_evasive_acyclic(&dnf(&path(4)), &u(&path(4))).unwrap());
        assert!(decide_evasive_acyclic(&dnf("(w&x)|(y&z)"), &u("(w&x)|(y&z)")).unwrap());
        let t = "vars: x y z q\nx|(y&z)";
        assert!(!decide_evasive_acyclic(&dnf(t), &u(t)).unwrap());
        let t = "(x&y)|(y&z)|(x&z)";
        assert!(matches!(decide_evasive_acyclic(&dnf(t), &u(t)), Err(Error::Cyclic)));
        assert!(decide_evasive_acyclic(&dnf("x|y"), &u("x|y")).unwrap());
    }

    #[test]
    fn agrees_with_search_on_small_paths_and_stars() {
        let cfg = SearchConfig::default();
        for text in [path(1), path(2), path(3), path(5), "(x&y1)|(x&y2)|(x&y3)".into(), "a|(b&c)|(c&d)".into()] {
            let s = ExpressionSet::parse(&text).unwrap();
            let d = s.members()[0].to_monotone_dnf(s.universe()).unwrap();
            assert_eq!(decide_evasive_acyclic(&d, s.universe()).unwrap(), is_evasive(&s, &cfg).unwrap(), "{text}");
        }
    }

    #[test]
    fn dot_marks_singletons_and_highlights() {
        let g = graph("vars: a b c d e\na|(b&c)|(c&d)|(d&e)");
        let dot = g.to_dot(&BTreeSet::from([Var::new(1)]));
        assert!(dot.contains("\"a\" [shape=doublecircle];"));
        assert!(dot.contains("\"b\" [shape=circle, style=filled, fillcolor=gold];"));
        assert!(dot.contains("\"c\" -- \"d\";"));
    }
}
