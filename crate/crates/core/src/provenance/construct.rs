//! Building a database and a fixed join query whose single answer has a given
//! monotone k-DNF as provenance.

use super::{AnnotatedDatabase, Query, Relation, Tuple, Value};
use crate::boolexpr::MonotoneDnf;
use crate::error::{Error, Result};

/// Encodes `d` (terms of size at most `k`) as relations `R(v)` and `S(c1..ck)`.
///
/// `R` holds one tuple per occurring variable, annotated by it. `S` holds one
/// tuple per term listing its variables, padded by repeating the first one, and
/// annotated by that first variable. Joining `S.ci = Ri.v` for every `i` and
/// projecting everything away leaves one empty row whose annotation is `d`: the
/// extra occurrence of each term's first variable is absorbed.
pub fn dnf_to_database(d: &MonotoneDnf, k: usize) -> Result<(AnnotatedDatabase, Query)> {
    match d.as_const() {
        Some(false) => return Err(Error::EmptyDnf),
        Some(true) => return Err(Error::ConstantFormula),
        None => {}
    }
    if k == 0 || d.max_term_size() > k {
        return Err(Error::TermTooLarge { size: d.max_term_size(), limit: k });
    }
    let u = d.universe();
    let name = |v| Value::Str(u.name(v).to_string());
    let r = Relation {
        name: "R".into(),
        columns: vec!["v".into()],
        tuples: d.variables().into_iter().map(|v| Tuple { values: vec![name(v)], annotation: v }).collect(),
    };
    let s = Relation {
        name: "S".into(),
        columns: (1..=k).map(|i| format!("c{i}")).collect(),
        tuples: d
            .terms()
            .iter()
            .map(|t| {
                let first = *t.iter().next().expect("non-empty term");
                let mut values: Vec<Value> = t.iter().map(|&v| name(v)).collect();
                values.resize(k, name(first));
                Tuple { values, annotation: first }
            })
            .collect(),
    };
    let db = AnnotatedDatabase::new(u.clone(), vec![r, s])?;
    let mut q = Query::scan("S", "s");
    for i in 1..=k {
        q = Query::Join {
            on: vec![(format!("s.c{i}"), format!("r{i}.v"))],
            left: Box::new(q),
            right: Box::new(Query::scan("R", &format!("r{i}"))),
        };
    }
    Ok((db, Query::Project { columns: vec![], input: Box::new(q) }))
}
