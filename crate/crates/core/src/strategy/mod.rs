//! Probing strategies as decision diagrams, exact minimum-depth search and execution.

mod greedy;
mod search;
mod session;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boolexpr::{Expression, ExpressionSet, PartialValuation, Valuation, Var, VariableUniverse};
use crate::error::{Error, Result};

pub use greedy::greedy_strategy;
pub use search::{decide_depth_at_most, is_evasive, optimal_depth, DepthReport, SearchConfig};
pub use session::{run_session, Transcript};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Probe { var: Var, on_true: usize, on_false: usize },
    /// One label per member of the expression set, in member order.
    Leaf { labels: Vec<bool> },
}

/// A rooted DAG of probes and leaves.
///
/// Construction validates the structure, so a `DecisionDiagram` in hand is always
/// acyclic, fully reachable and never probes a variable twice on one path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionDiagram {
    universe: VariableUniverse,
    nodes: Vec<Node>,
    root: usize,
}

impl DecisionDiagram {
    pub fn new(universe: VariableUniverse, nodes: Vec<Node>, root: usize) -> Result<Self> {
        let d = DecisionDiagram { universe, nodes, root };
        d.validate()?;
        Ok(d)
    }

    pub fn leaf(universe: VariableUniverse, labels: Vec<bool>) -> Self {
        DecisionDiagram { universe, nodes: vec![Node::Leaf { labels }], root: 0 }
    }

    /// Renumbers nodes in preorder from the root (true branch first) and drops
    /// unreachable ones. Used by the builders so output is deterministic.
    pub(crate) fn canonical(universe: VariableUniverse, nodes: Vec<Node>, root: usize) -> Result<Self> {
        let mut order: HashMap<usize, usize> = HashMap::new();
        let mut seq = Vec::new();
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if order.contains_key(&i) {
                continue;
            }
            let node = nodes.get(i).ok_or_else(|| Error::MalformedDiagram(format!("dangling node index {i}")))?;
            order.insert(i, seq.len());
            seq.push(i);
            if let Node::Probe { on_true, on_false, .. } = node {
                stack.push(*on_false);
                stack.push(*on_true);
            }
        }
        let renumbered = seq
            .iter()
            .map(|&i| match &nodes[i] {
                Node::Probe { var, on_true, on_false } => {
                    Node::Probe { var: *var, on_true: order[on_true], on_false: order[on_false] }
                }
                leaf => leaf.clone(),
            })
            .collect();
        DecisionDiagram::new(universe, renumbered, 0)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedDiagram(m));
        if self.root >= self.nodes.len() {
            return bad(format!("root index {} out of range", self.root));
        }
        let mut width = None;
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Probe { var, on_true, on_false } => {
                    if var.index() >= self.universe.len() {
                        return bad(format!("node {i} probes an unknown variable"));
                    }
                    for c in [on_true, on_false] {
                        if *c >= self.nodes.len() {
                            return bad(format!("node {i} has dangling child {c}"));
                        }
                    }
                }
                Node::Leaf { labels } => {
                    if *width.get_or_insert(labels.len()) != labels.len() {
                        return bad(format!("leaf {i} has {} labels", labels.len()));
                    }
                }
            }
        }
        // DFS colouring for cycles; reachability falls out of the same walk.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let mut mark = vec![Mark::New; self.nodes.len()];
        let mut stack = vec![(self.root, false)];
        while let Some((i, leaving)) = stack.pop() {
            if leaving {
                mark[i] = Mark::Done;
                continue;
            }
            match mark[i] {
                Mark::Done => continue,
                Mark::Open => return bad(format!("cycle through node {i}")),
                Mark::New => {}
            }
            mark[i] = Mark::Open;
            stack.push((i, true));
            if let Node::Probe { on_true, on_false, .. } = self.nodes[i] {
                for c in [on_true, on_false] {
                    if mark[c] == Mark::Open {
                        return bad(format!("cycle through node {c}"));
                    }
                    if mark[c] == Mark::New {
                        stack.push((c, false));
                    }
                }
            }
        }
        if let Some(i) = mark.iter().position(|m| *m == Mark::New) {
            return bad(format!("node {i} is unreachable from the root"));
        }
        self.check_paths()
    }

    /// No variable may be probed twice on a root-to-leaf path. The set of
    /// variables probed above a node is tracked per path, so this walks paths.
    fn check_paths(&self) -> Result<()> {
        fn walk(d: &DecisionDiagram, i: usize, seen: &mut Vec<bool>) -> Result<()> {
            if let Node::Probe { var, on_true, on_false } = d.nodes[i] {
                if seen[var.index()] {
                    return Err(Error::MalformedDiagram(format!(
                        "variable `{}` probed twice on one path",
                        d.universe.name(var)
                    )));
                }
                seen[var.index()] = true;
                walk(d, on_true, seen)?;
                walk(d, on_false, seen)?;
                seen[var.index()] = false;
            }
            Ok(())
        }
        walk(self, self.root, &mut vec![false; self.universe.len()])
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_variable(&self) -> Option<&str> {
        match self.nodes[self.root] {
            Node::Probe { var, .. } => Some(self.universe.name(var)),
            Node::Leaf { .. } => None,
        }
    }

    /// Longest root-to-leaf edge count; 0 for a single leaf.
    pub fn depth(&self) -> usize {
        let mut memo = vec![None; self.nodes.len()];
        fn go(d: &DecisionDiagram, i: usize, memo: &mut Vec<Option<usize>>) -> usize {
            if let Some(v) = memo[i] {
                return v;
            }
            let v = match d.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Probe { on_true, on_false, .. } => 1 + go(d, on_true, memo).max(go(d, on_false, memo)),
            };
            memo[i] = Some(v);
            v
        }
        go(self, self.root, &mut memo)
    }

    /// Follows `v` from the root; returns the leaf labels and the number of probes made.
    pub fn follow(&self, v: &Valuation) -> (&[bool], usize) {
        let mut i = self.root;
        let mut probes = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { labels } => return (labels, probes),
                Node::Probe { var, on_true, on_false } => {
                    probes += 1;
                    i = if v.get(*var) { *on_true } else { *on_false };
                }
            }
        }
    }

    /// Checks every root-to-leaf path: each member restricted by the path's
    /// partial valuation must be the constant the leaf assigns to it.
    pub fn labels_match(&self, set: &ExpressionSet) -> Result<bool> {
        if set.universe() != &self.universe {
            return Ok(false);
        }
        fn walk(
            d: &DecisionDiagram,
            i: usize,
            members: &[Expression],
            path: &mut PartialValuation,
        ) -> Result<bool> {
            match &d.nodes[i] {
                Node::Leaf { labels } => {
                    if labels.len() != members.len() {
                        return Ok(false);
                    }
                    for (m, &label) in members.iter().zip(labels) {
                        if m.is_constant()? != Some(label) {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
                Node::Probe { var, on_true, on_false } => {
                    for (value, child) in [(true, *on_true), (false, *on_false)] {
                        let mut p = path.clone();
                        p.assign(*var, value);
                        let restricted: Vec<Expression> = members.iter().map(|m| m.restrict(*var, value)).collect();
                        if !walk(d, child, &restricted, &mut p)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
            }
        }
        walk(self, self.root, set.members(), &mut PartialValuation::empty(self.universe.len()))
    }

    /// Graphviz rendering: solid edges for `True`, dashed for `False`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph strategy {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Probe { var, .. } => {
                    let _ = writeln!(out, "  n{i} [label=\"{}\", shape=circle];", self.universe.name(*var));
                }
                Node::Leaf { labels } => {
                    let text: Vec<&str> = labels.iter().map(|&b| if b { "True" } else { "False" }).collect();
                    let _ = writeln!(out, "  n{i} [label=\"({})\", shape=box];", text.join(", "));
                }
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if let Node::Probe { on_true, on_false, .. } = node {
                let _ = writeln!(out, "  n{i} -> n{on_true} [style=solid];");
                let _ = writeln!(out, "  n{i} -> n{on_false} [style=dashed];");
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(id, node)| match node {
                Node::Probe { var, on_true, on_false } => NodeJson::Probe {
                    id,
                    probe: self.universe.name(*var).to_string(),
                    on_true: *on_true,
                    on_false: *on_false,
                },
                Node::Leaf { labels } => NodeJson::Leaf { id, leaf: labels.clone() },
            })
            .collect();
        let doc = DiagramJson {
            variables: self.universe.names().map(String::from).collect(),
            root: self.root,
            depth: Some(self.depth()),
            nodes,
        };
        serde_json::to_value(doc).expect("diagram serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DiagramJson = serde_json::from_str(text)?;
        let universe = VariableUniverse::new(doc.variables)?;
        let mut nodes = vec![None; doc.nodes.len()];
        for n in doc.nodes {
            let (id, node) = match n {
                NodeJson::Probe { id, probe, on_true, on_false } => {
                    (id, Node::Probe { var: universe.var(&probe)?, on_true, on_false })
                }
                NodeJson::Leaf { id, leaf } => (id, Node::Leaf { labels: leaf }),
            };
            let slot = nodes
                .get_mut(id)
                .ok_or_else(|| Error::MalformedDiagram(format!("node id {id} out of range")))?;
            if slot.replace(node).is_some() {
                return Err(Error::MalformedDiagram(format!("duplicate node id {id}")));
            }
        }
        let nodes = nodes.into_iter().map(|n| n.expect("ids are a permutation")).collect();
        DecisionDiagram::new(universe, nodes, doc.root)
    }
}

/// Longest root-to-leaf path of `d`.
pub fn diagram_depth(d: &DecisionDiagram) -> usize {
    d.depth()
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    variables: Vec<String>,
    root: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    depth: Option<usize>,
    nodes: Vec<NodeJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeJson {
    Probe {
        id: usize,
        probe: String,
        #[serde(rename = "true")]
        on_true: usize,
        #[serde(rename = "false")]
        on_false: usize,
    },
    Leaf {
        id: usize,
        leaf: Vec<bool>,
    },
}

/// Accumulates nodes with leaf sharing; finished diagrams are canonicalized.
#[derive(Default)]
pub(crate) struct DiagramBuilder {
    nodes: Vec<Node>,
    leaves: HashMap<Vec<bool>, usize>,
}

impl DiagramBuilder {
    pub(crate) fn leaf(&mut self, labels: Vec<bool>) -> usize {
        if let Some(&i) = self.leaves.get(&labels) {
            return i;
        }
        self.nodes.push(Node::Leaf { labels: labels.clone() });
        self.leaves.insert(labels, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub(crate) fn probe(&mut self, var: Var, on_true: usize, on_false: usize) -> usize {
        self.nodes.push(Node::Probe { var, on_true, on_false });
        self.nodes.len() - 1
    }

    pub(crate) fn finish(self, universe: VariableUniverse, root: usize) -> Result<DecisionDiagram> {
        DecisionDiagram::canonical(universe, self.nodes, root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> (ExpressionSet, DecisionDiagram) {
        let s = ExpressionSet::parse("x&y\nx|z").unwrap();
        let u = s.universe().clone();
        let [x, y, z] = [0, 1, 2].map(Var::new);
        let nodes = vec![
            Node::Probe { var: x, on_true: 1, on_false: 2 },
            Node::Probe { var: y, on_true: 3, on_false: 4 },
            Node::Probe { var: z, on_true: 5, on_false: 6 },
            Node::Leaf { labels: vec![true, true] },
            Node::Leaf { labels: vec![false, true] },
            Node::Leaf { labels: vec![false, true] },
            Node::Leaf { labels: vec![false, false] },
        ];
        (s, DecisionDiagram::new(u, nodes, 0).unwrap())
    }

    #[test]
    fn depths() {
        let u = VariableUniverse::new(["x"]).unwrap();
        assert_eq!(diagram_depth(&DecisionDiagram::leaf(u.clone(), vec![true])), 0);
        let d = DecisionDiagram::new(
            u,
            vec![
                Node::Probe { var: Var::new(0), on_true: 1, on_false: 2 },
                Node::Leaf { labels: vec![true] },
                Node::Leaf { labels: vec![false] },
            ],
            0,
        )
        .unwrap();
        assert_eq!(diagram_depth(&d), 1);
        assert_eq!(diagram_depth(&example1().1), 2);
    }

    #[test]
    fn example1_labels_are_sound() {
        let (s, d) = example1();
        assert!(d.labels_match(&s).unwrap());
        for bits in 0..8 {
            let v = Valuation::from_bits(3, bits);
            assert_eq!(d.follow(&v).0, s.evaluate(&v).as_slice());
        }
    }

    #[test]
    fn malformed_diagrams_are_rejected() {
        let u = VariableUniverse::new(["x", "y"]).unwrap();
        let x = Var::new(0);
        let cycle = vec![
            Node::Probe { var: x, on_true: 1, on_false: 2 },
            Node::Probe { var: Var::new(1), on_true: 0, on_false: 2 },
            Node::Leaf { labels: vec![true] },
        ];
        assert!(matches!(DecisionDiagram::new(u.clone(), cycle, 0), Err(Error::MalformedDiagram(_))));
        let dangling = vec![Node::Probe { var: x, on_true: 1, on_false: 7 }, Node::Leaf { labels: vec![true] }];
        assert!(matches!(DecisionDiagram::new(u.clone(), dangling, 0), Err(Error::MalformedDiagram(_))));
        let repeated = vec![
            Node::Probe { var: x, on_true: 1, on_false: 2 },
            Node::Probe { var: x, on_true: 2, on_false: 2 },
            Node::Leaf { labels: vec![true] },
        ];
        assert!(matches!(DecisionDiagram::new(u.clone(), repeated, 0), Err(Error::MalformedDiagram(_))));
        let unreachable = vec![Node::Leaf { labels: vec![true] }, Node::Leaf { labels: vec![false] }];
        assert!(matches!(DecisionDiagram::new(u, unreachable, 0), Err(Error::MalformedDiagram(_))));
    }

    #[test]
    fn json_round_trip_and_dot() {
        let (_, d) = example1();
        let text = d.to_json().to_string();
        assert_eq!(DecisionDiagram::from_json(&text).unwrap(), d);
        let dot = d.to_dot();
        assert!(dot.contains("n0 [label=\"x\", shape=circle];"));
        assert!(dot.contains("n0 -> n1 [style=solid];"));
        assert!(dot.contains("n0 -> n2 [style=dashed];"));
        assert!(dot.contains("(True, True)"));
    }
}
