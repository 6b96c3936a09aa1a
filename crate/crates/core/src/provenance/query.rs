//! The SPJU algebra and its provenance-tracking evaluator.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AnnotatedDatabase, ProvenancedResult, Row, Value};
use crate::boolexpr::MonotoneDnf;
use crate::error::{Error, Result};

/// A query tree. Scans qualify their columns as `alias.column`; the alias
/// defaults to the relation name. Column references may omit the qualifier
/// when the bare name is unambiguous.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Query {
    Scan {
        relation: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alias: Option<String>,
    },
    /// Keeps the rows satisfying every atom.
    Select { pred: Vec<Atom>, input: Box<Query> },
    /// Set-semantics projection: equal value tuples merge.
    Project { columns: Vec<String>, input: Box<Query> },
    Join { on: Vec<(String, String)>, left: Box<Query>, right: Box<Query> },
    /// Inputs must have the same arity; columns are named after the first input.
    Union { inputs: Vec<Query> },
}

impl Query {
    pub fn scan(relation: &str, alias: &str) -> Query {
        Query::Scan { relation: relation.to_string(), alias: Some(alias.to_string()) }
    }

    pub fn parse(text: &str) -> Result<Query> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "snake_case")]
pub enum Atom {
    Compare { lhs: Operand, op: CompareOp, rhs: Operand },
    /// Case-insensitive substring test on a string column.
    ContainsCi { column: String, literal: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operand {
    Col(String),
    Lit(Value),
    /// The leading four digits of a date string, as an integer.
    Year(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompareOp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=", alias = "≠", alias = "<>")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=", alias = "≤")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=", alias = "≥")]
    Ge,
}

impl CompareOp {
    fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CompareOp::Eq => ord == Equal,
            CompareOp::Ne => ord != Equal,
            CompareOp::Lt => ord == Less,
            CompareOp::Le => ord != Greater,
            CompareOp::Gt => ord == Greater,
            CompareOp::Ge => ord != Less,
        }
    }
}

struct Table {
    columns: Vec<String>,
    rows: BTreeMap<Vec<Value>, MonotoneDnf>,
}

impl Table {
    fn resolve(&self, name: &str) -> Result<usize> {
        if let Some(i) = self.columns.iter().position(|c| c == name) {
            return Ok(i);
        }
        let suffix = format!(".{name}");
        let hits: Vec<usize> = if name.contains('.') {
            Vec::new()
        } else {
            (0..self.columns.len()).filter(|&i| self.columns[i].ends_with(&suffix)).collect()
        };
        match hits[..] {
            [i] => Ok(i),
            [] => Err(Error::UnknownColumn(name.to_string())),
            _ => Err(Error::AmbiguousColumn(name.to_string())),
        }
    }

    fn insert(&mut self, values: Vec<Value>, annotation: MonotoneDnf) {
        match self.rows.get_mut(&values) {
            Some(existing) => *existing = existing.or(&annotation),
            None => {
                self.rows.insert(values, annotation);
            }
        }
    }
}

enum Resolved {
    Col(usize),
    Lit(Value),
    Year(usize),
}

fn resolve_operand(t: &Table, o: &Operand) -> Result<Resolved> {
    Ok(match o {
        Operand::Col(c) => Resolved::Col(t.resolve(c)?),
        Operand::Lit(v) => Resolved::Lit(v.clone()),
        Operand::Year(c) => Resolved::Year(t.resolve(c)?),
    })
}

fn operand_value(r: &Resolved, row: &[Value]) -> Result<Value> {
    Ok(match r {
        Resolved::Col(i) => row[*i].clone(),
        Resolved::Lit(v) => v.clone(),
        Resolved::Year(i) => match &row[*i] {
            Value::Str(s) if s.len() >= 4 && s.as_bytes()[..4].iter().all(u8::is_ascii_digit) => {
                Value::Int(s[..4].parse().expect("four digits"))
            }
            other => return Err(Error::TypeMismatch(format!("year() of `{other}`"))),
        },
    })
}

fn atom_holds(t: &Table, atom: &Atom, row: &[Value]) -> Result<bool> {
    match atom {
        Atom::Compare { lhs, op, rhs } => {
            let (l, r) = (
                operand_value(&resolve_operand(t, lhs)?, row)?,
                operand_value(&resolve_operand(t, rhs)?, row)?,
            );
            match (&l, &r) {
                (Value::Int(_), Value::Int(_)) | (Value::Str(_), Value::Str(_)) => Ok(op.holds(l.cmp(&r))),
                _ => Err(Error::TypeMismatch(format!("cannot compare `{l}` with `{r}`"))),
            }
        }
        Atom::ContainsCi { column, literal } => match &row[t.resolve(column)?] {
            Value::Str(s) => Ok(s.to_lowercase().contains(&literal.to_lowercase())),
            other => Err(Error::TypeMismatch(format!("substring test on `{other}`"))),
        },
    }
}

fn eval(db: &AnnotatedDatabase, q: &Query) -> Result<Table> {
    match q {
        Query::Scan { relation, alias } => {
            let r = db.relation(relation)?;
            let alias = alias.as_deref().unwrap_or(relation);
            let mut t = Table {
                columns: r.columns.iter().map(|c| format!("{alias}.{c}")).collect(),
                rows: BTreeMap::new(),
            };
            for tuple in &r.tuples {
                t.insert(tuple.values.clone(), MonotoneDnf::new(db.universe().clone(), [[tuple.annotation]]));
            }
            Ok(t)
        }
        Query::Select { pred, input } => {
            let mut t = eval(db, input)?;
            // Resolve every reference up front so bad columns fail on empty inputs too.
            for atom in pred {
                match atom {
                    Atom::Compare { lhs, rhs, .. } => {
                        resolve_operand(&t, lhs)?;
                        resolve_operand(&t, rhs)?;
                    }
                    Atom::ContainsCi { column, .. } => {
                        t.resolve(column)?;
                    }
                }
            }
            let mut kept = BTreeMap::new();
            for (values, ann) in std::mem::take(&mut t.rows) {
                let mut ok = true;
                for atom in pred {
                    if !atom_holds(&t, atom, &values)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    kept.insert(values, ann);
                }
            }
            t.rows = kept;
            Ok(t)
        }
        Query::Project { columns, input } => {
            let t = eval(db, input)?;
            let idx = columns.iter().map(|c| t.resolve(c)).collect::<Result<Vec<_>>>()?;
            let mut out = Table { columns: idx.iter().map(|&i| t.columns[i].clone()).collect(), rows: BTreeMap::new() };
            for (values, ann) in t.rows {
                out.insert(idx.iter().map(|&i| values[i].clone()).collect(), ann);
            }
            Ok(out)
        }
        Query::Join { on, left, right } => {
            let (l, r) = (eval(db, left)?, eval(db, right)?);
            let pairs = on
                .iter()
                .map(|(a, b)| match (l.resolve(a), r.resolve(b)) {
                    (Ok(i), Ok(j)) => Ok((i, j)),
                    // Allow the pair to be written in either order.
                    _ => Ok((l.resolve(b)?, r.resolve(a)?)),
                })
                .collect::<Result<Vec<_>>>()?;
            let mut out = Table {
                columns: l.columns.iter().chain(&r.columns).cloned().collect(),
                rows: BTreeMap::new(),
            };
            for (lv, la) in &l.rows {
                for (rv, ra) in &r.rows {
                    if pairs.iter().all(|&(i, j)| lv[i] == rv[j]) {
                        out.insert(lv.iter().chain(rv).cloned().collect(), la.and(ra));
                    }
                }
            }
            Ok(out)
        }
        Query::Union { inputs } => {
            let mut tables = inputs.iter().map(|q| eval(db, q));
            let mut out = tables.next().ok_or_else(|| Error::Schema("union of no inputs".into()))??;
            for t in tables {
                let t = t?;
                if t.columns.len() != out.columns.len() {
                    return Err(Error::Schema(format!(
                        "union of arities {} and {}",
                        out.columns.len(),
                        t.columns.len()
                    )));
                }
                for (values, ann) in t.rows {
                    out.insert(values, ann);
                }
            }
            Ok(out)
        }
    }
}

/// Evaluates `q` over `db`, annotating each distinct output tuple by its
/// monotone DNF provenance. Rows come out sorted by value.
pub fn eval_query(db: &AnnotatedDatabase, q: &Query) -> Result<ProvenancedResult> {
    let t = eval(db, q)?;
    Ok(ProvenancedResult {
        columns: t.columns,
        rows: t.rows.into_iter().map(|(values, annotation)| Row { values, annotation }).collect(),
    })
}

/// The most scans combined by joins along any path of `q`; bounds the term size
/// of every annotation in its result.
pub fn join_width(q: &Query) -> usize {
    match q {
        Query::Scan { .. } => 1,
        Query::Select { input, .. } | Query::Project { input, .. } => join_width(input),
        Query::Join { left, right, .. } => join_width(left) + join_width(right),
        Query::Union { inputs } => inputs.iter().map(join_width).max().unwrap_or(0),
    }
}
