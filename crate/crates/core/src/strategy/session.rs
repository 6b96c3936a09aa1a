//! Running a strategy against an answer source.

use super::{DecisionDiagram, Node};
use crate::boolexpr::Var;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    /// Probes in the order they were asked, with the answers received.
    pub probes: Vec<(Var, bool)>,
    pub labels: Vec<bool>,
}

/// Walks `d` from the root, asking `answer` for each probed variable. A `None`
/// answer aborts with [`Error::AnswersExhausted`].
pub fn run_session(d: &DecisionDiagram, mut answer: impl FnMut(Var) -> Option<bool>) -> Result<Transcript> {
    let mut probes = Vec::new();
    let mut i = d.root();
    loop {
        match &d.nodes()[i] {
            Node::Leaf { labels } => return Ok(Transcript { probes, labels: labels.clone() }),
            Node::Probe { var, on_true, on_false } => {
                let value = answer(*var).ok_or_else(|| Error::AnswersExhausted(d.universe().name(*var).to_string()))?;
                probes.push((*var, value));
                i = if value { *on_true } else { *on_false };
            }
        }
    }
}
