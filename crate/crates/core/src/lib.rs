//! Probing strategies for Boolean provenance.
//!
//! Given a set of Boolean expressions over a universe of variables, the
//! question is how few variables must be probed, in the worst case, before the
//! value of every expression is known. This crate computes that minimum depth
//! exactly for small universes, decides evasiveness (whether every variable
//! must be probed) for several structured classes, and builds provenance
//! expressions from annotated relational databases.

pub mod boolexpr;
pub mod error;
pub mod families;
pub mod graphdnf;
pub mod provenance;
pub mod random;
pub mod readonce;
pub mod strategy;

pub use boolexpr::{Expression, ExpressionSet, MonotoneDnf, TruthTable, Valuation, Var, VariableUniverse};
pub use error::{Error, Result};
pub use strategy::{DecisionDiagram, DepthReport, SearchConfig};
