//! Named expression families and the recursive strategy for the `psi` family.
//!
//! `psi(0) = (w∧x) ∨ (x∧y) ∨ (y∧z)` and
//! `psi(i+1) = (u_i∧psi(i)) ∨ (u_i∧v_i) ∨ (v_i∧psi'(i))`, where `psi'(i)` is a
//! copy of `psi(i)` whose variable names all get the suffix `p<i>`. Terms of
//! `psi(i)` have `i + 2` variables and the recursive strategy has depth
//! `2(i + 2) - 1`, below the `6·2^i - 2` variables.

use std::fmt;
use std::str::FromStr;

use crate::boolexpr::{Expression, ExpressionSet, Var, VariableUniverse};
use crate::error::{Error, Result};
use crate::strategy::{DecisionDiagram, DiagramBuilder};

/// Largest supported `psi` level (382 variables).
pub const PSI_MAX: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Psi,
    Path,
    And,
    Or,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi" => Ok(FamilyKind::Psi),
            "path" => Ok(FamilyKind::Path),
            "and" => Ok(FamilyKind::And),
            "or" => Ok(FamilyKind::Or),
            other => Err(Error::FamilyParameter { family: other.to_string(), value: 0 }),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Psi => "psi",
            FamilyKind::Path => "path",
            FamilyKind::And => "and",
            FamilyKind::Or => "or",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Level for `psi`; edge count for `path`; arity for `and` and `or`.
    pub parameter: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, parameter: usize) -> Self {
        FamilySpec { kind, parameter }
    }
}

fn out_of_range(kind: FamilyKind, value: usize) -> Error {
    Error::FamilyParameter { family: kind.to_string(), value }
}

/// Variable names of `psi(i)` in universe order, each followed by `suffix`.
fn psi_names(i: usize, suffix: &str, out: &mut Vec<String>) {
    if i == 0 {
        out.extend(["w", "x", "y", "z"].map(|n| format!("{n}{suffix}")));
        return;
    }
    let j = i - 1;
    out.push(format!("u{j}{suffix}"));
    out.push(format!("v{j}{suffix}"));
    psi_names(j, suffix, out);
    psi_names(j, &format!("p{j}{suffix}"), out);
}

fn psi_expr(i: usize, suffix: &str, u: &VariableUniverse) -> Expression {
    let var = |name: String| Expression::Var(u.var(&name).expect("generated name"));
    if i == 0 {
        let [w, x, y, z] = ["w", "x", "y", "z"].map(|n| var(format!("{n}{suffix}")));
        return Expression::Or(vec![
            Expression::And(vec![w, x.clone()]),
            Expression::And(vec![x, y.clone()]),
            Expression::And(vec![y, z]),
        ]);
    }
    let j = i - 1;
    let (ui, vi) = (var(format!("u{j}{suffix}")), var(format!("v{j}{suffix}")));
    Expression::Or(vec![
        Expression::And(vec![ui.clone(), psi_expr(j, suffix, u)]),
        Expression::And(vec![ui, vi.clone()]),
        Expression::And(vec![vi, psi_expr(j, &format!("p{j}{suffix}"), u)]),
    ])
}

pub fn generate(spec: FamilySpec) -> Result<ExpressionSet> {
    let n = spec.parameter;
    match spec.kind {
        FamilyKind::Psi => {
            if n > PSI_MAX {
                return Err(out_of_range(spec.kind, n));
            }
            let mut names = Vec::new();
            psi_names(n, "", &mut names);
            let u = VariableUniverse::new(names)?;
            let e = psi_expr(n, "", &u);
            ExpressionSet::single(u, e)
        }
        FamilyKind::Path => {
            if n == 0 {
                return Err(out_of_range(spec.kind, n));
            }
            let u = VariableUniverse::new((0..=n).map(|i| format!("x{i}")))?;
            let e = Expression::or(
                (0..n)
                    .map(|i| Expression::And(vec![Expression::Var(Var::new(i)), Expression::Var(Var::new(i + 1))]))
                    .collect(),
            );
            ExpressionSet::single(u, e)
        }
        FamilyKind::And | FamilyKind::Or => {
            if n == 0 {
                return Err(out_of_range(spec.kind, n));
            }
            let u = VariableUniverse::new((1..=n).map(|i| format!("x{i}")))?;
            let vars = u.vars().map(Expression::Var).collect();
            let e = if spec.kind == FamilyKind::And { Expression::and(vars) } else { Expression::or(vars) };
            ExpressionSet::single(u, e)
        }
    }
}

pub fn psi(i: usize) -> Result<ExpressionSet> {
    generate(FamilySpec::new(FamilyKind::Psi, i))
}

/// The recursive strategy for `psi(i)`: probe `u`, then `v`; `u = v` settles the
/// value and otherwise the strategy continues on the copy that is still open.
pub fn psi_strategy(i: usize) -> Result<DecisionDiagram> {
    let set = psi(i)?;
    let u = set.universe();
    let mut b = DiagramBuilder::default();
    let (yes, no) = (b.leaf(vec![true]), b.leaf(vec![false]));

    fn build(i: usize, suffix: &str, u: &VariableUniverse, b: &mut DiagramBuilder, yes: usize, no: usize) -> usize {
        let var = |name: String| u.var(&name).expect("generated name");
        if i == 0 {
            let [w, x, y, z] = ["w", "x", "y", "z"].map(|n| var(format!("{n}{suffix}")));
            let y_then_yes = b.probe(y, yes, no);
            let w_node = b.probe(w, yes, y_then_yes);
            let z_node = b.probe(z, yes, no);
            let y_then_z = b.probe(y, z_node, no);
            return b.probe(x, w_node, y_then_z);
        }
        let j = i - 1;
        let (ui, vi) = (var(format!("u{j}{suffix}")), var(format!("v{j}{suffix}")));
        let own = build(j, suffix, u, b, yes, no);
        let copy = build(j, &format!("p{j}{suffix}"), u, b, yes, no);
        let after_true = b.probe(vi, yes, own);
        let after_false = b.probe(vi, copy, no);
        b.probe(ui, after_true, after_false)
    }

    let root = build(i, "", u, &mut b, yes, no);
    b.finish(u.clone(), root)
}
