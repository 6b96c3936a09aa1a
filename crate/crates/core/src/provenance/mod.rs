//! Annotated databases and SPJU queries with Boolean provenance.
//!
//! Every tuple carries a variable. Query results are sets of value tuples, each
//! annotated by a monotone DNF that is true under a valuation exactly when the
//! tuple is in the answer over the tuples whose variables are true.

mod construct;
mod query;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boolexpr::{MonotoneDnf, Valuation, Var, VariableUniverse};
use crate::error::{Error, Result};

pub use construct::dnf_to_database;
pub use query::{eval_query, join_width, Atom, CompareOp, Operand, Query};

/// The sample database of company acquisitions, roles and alumni.
pub const TABLE1_DB: &str = include_str!("../../fixtures/table1_db.json");
/// Companies acquired since 2017 with the institutes their founders attended.
pub const ACQUIRED_FOUNDERS_QUERY: &str = include_str!("../../fixtures/acquired_founders_query.json");

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple {
    pub values: Vec<Value>,
    pub annotation: Var,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub columns: Vec<String>,
    pub tuples: Vec<Tuple>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnotatedDatabase {
    universe: VariableUniverse,
    relations: Vec<Relation>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatabaseJson {
    relations: Vec<RelationJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationJson {
    name: String,
    columns: Vec<String>,
    tuples: Vec<TupleJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleJson {
    values: Vec<Value>,
    annotation: String,
}

impl AnnotatedDatabase {
    /// Checks arities and name uniqueness. Every annotation must be in `universe`.
    pub fn new(universe: VariableUniverse, relations: Vec<Relation>) -> Result<Self> {
        let mut names = BTreeSet::new();
        for r in &relations {
            if !names.insert(r.name.as_str()) {
                return Err(Error::Schema(format!("duplicate relation `{}`", r.name)));
            }
            let mut columns = BTreeSet::new();
            for c in &r.columns {
                if c.contains('.') || !columns.insert(c) {
                    return Err(Error::Schema(format!("bad or repeated column `{c}` in `{}`", r.name)));
                }
            }
            for (i, t) in r.tuples.iter().enumerate() {
                if t.values.len() != r.columns.len() {
                    return Err(Error::Schema(format!(
                        "tuple {i} of `{}` has {} values for {} columns",
                        r.name,
                        t.values.len(),
                        r.columns.len()
                    )));
                }
                if t.annotation.index() >= universe.len() {
                    return Err(Error::UnknownVariable(format!("#{}", t.annotation.index())));
                }
            }
        }
        Ok(AnnotatedDatabase { universe, relations })
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Result<&Relation> {
        self.relations
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(|r| r.tuples.len()).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = DatabaseJson {
            relations: self
                .relations
                .iter()
                .map(|r| RelationJson {
                    name: r.name.clone(),
                    columns: r.columns.clone(),
                    tuples: r
                        .tuples
                        .iter()
                        .map(|t| TupleJson {
                            values: t.values.clone(),
                            annotation: self.universe.name(t.annotation).to_string(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("database serializes")
    }
}

/// Parses the JSON database format. The universe lists annotation variables in
/// order of first appearance; a variable may annotate several tuples.
pub fn load_database(text: &str) -> Result<AnnotatedDatabase> {
    let doc: DatabaseJson = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let mut universe = VariableUniverse::default();
    let mut relations = Vec::with_capacity(doc.relations.len());
    for r in doc.relations {
        let tuples = r
            .tuples
            .into_iter()
            .map(|t| Ok(Tuple { values: t.values, annotation: universe.push(t.annotation)? }))
            .collect::<Result<_>>()?;
        relations.push(Relation { name: r.name, columns: r.columns, tuples });
    }
    AnnotatedDatabase::new(universe, relations)
}

/// The tuples whose annotation is true under `v`.
pub fn possible_world(db: &AnnotatedDatabase, v: &Valuation) -> AnnotatedDatabase {
    let relations = db
        .relations
        .iter()
        .map(|r| Relation {
            name: r.name.clone(),
            columns: r.columns.clone(),
            tuples: r.tuples.iter().filter(|t| v.get(t.annotation)).cloned().collect(),
        })
        .collect();
    AnnotatedDatabase { universe: db.universe.clone(), relations }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub values: Vec<Value>,
    pub annotation: MonotoneDnf,
}

/// Query output: distinct value tuples in sorted order with their provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProvenancedResult {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl ProvenancedResult {
    pub fn row(&self, values: &[Value]) -> Option<&Row> {
        self.rows.iter().find(|r| r.values == values)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| serde_json::json!({
                "values": r.values,
                "annotation": r.annotation.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Largest term over all row annotations.
pub fn max_term_size(r: &ProvenancedResult) -> usize {
    r.rows.iter().map(|row| row.annotation.max_term_size()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn table1() -> AnnotatedDatabase {
        load_database(TABLE1_DB).unwrap()
    }

    #[test]
    fn loads_table1() {
        let db = table1();
        assert_eq!(db.relations().len(), 3);
        assert_eq!(db.tuple_count(), 16);
        let names: Vec<&str> = db.universe().names().collect();
        assert_eq!(
            names,
            ["a0", "a1", "a2", "a3", "e0", "e1", "e2", "e3", "e4", "e5", "r0", "r1", "r2", "r3", "r4", "r5"]
        );
        let back = load_database(&db.to_json().to_string()).unwrap();
        assert_eq!(back, db);
    }

    #[test]
    fn load_edge_cases() {
        let db = load_database(r#"{"relations": []}"#).unwrap();
        assert_eq!(db.tuple_count(), 0);
        let shared = r#"{"relations": [{"name": "R", "columns": ["c"],
            "tuples": [{"values": [1], "annotation": "x"}, {"values": [2], "annotation": "x"}]}]}"#;
        assert_eq!(load_database(shared).unwrap().universe().len(), 1);
        let bad = r#"{"relations": [{"name": "R", "columns": ["c"], "tuples": [{"values": [1, 2], "annotation": "x"}]}]}"#;
        assert!(matches!(load_database(bad), Err(Error::Schema(_))));
        assert!(matches!(load_database(r#"{"relation": []}"#), Err(Error::Schema(_))));
    }

    #[test]
    fn possible_worlds() {
        let db = table1();
        let all = possible_world(&db, &Valuation::from_fn(16, |_| true));
        assert_eq!(all, db);
        let none = possible_world(&db, &Valuation::from_fn(16, |_| false));
        assert_eq!(none.tuple_count(), 0);
    }
}
