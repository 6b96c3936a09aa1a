//! Boolean expressions over a declared variable universe.

mod dnf;
mod parse;
mod table;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;

use crate::error::{Error, Result};

pub use dnf::{minimal_transversals, MonotoneDnf, Term};
pub use table::TruthTable;

/// Default cap on the support size of an expression whose truth table is materialized.
pub const TRUTH_TABLE_CAP: usize = 20;

/// Index of a variable inside a [`VariableUniverse`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    pub fn new(index: usize) -> Self {
        Var(u32::try_from(index).expect("variable index overflow"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The ordered set `X` of variable names. Cloning is cheap.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct VariableUniverse {
    names: Arc<IndexSet<String>>,
}

impl VariableUniverse {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut universe = VariableUniverse::default();
        for name in names {
            let name = name.into();
            if universe.lookup(&name).is_some() {
                return Err(Error::DuplicateVariable(name));
            }
            universe.push(name)?;
        }
        Ok(universe)
    }

    /// Appends `name`, returning its variable. Existing names are returned unchanged.
    pub fn push(&mut self, name: impl Into<String>) -> Result<Var> {
        let name = name.into();
        if let Some(v) = self.lookup(&name) {
            return Ok(v);
        }
        if !is_identifier(&name) {
            return Err(Error::InvalidName(name));
        }
        let (index, _) = Arc::make_mut(&mut self.names).insert_full(name);
        Ok(Var::new(index))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.names[v.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.names.get_index_of(name).map(Var::new)
    }

    pub fn var(&self, name: &str) -> Result<Var> {
        self.lookup(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.len()).map(Var::new)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> + '_ {
        self.names.iter().map(String::as_str)
    }

    /// The universe with `x` removed; later variables shift down by one.
    pub fn without(&self, x: Var) -> VariableUniverse {
        let names = self
            .names
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != x.index())
            .map(|(_, n)| n.clone())
            .collect();
        VariableUniverse { names: Arc::new(names) }
    }
}

impl fmt::Debug for VariableUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names.iter()).finish()
    }
}

/// A total assignment of truth values to a universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valuation {
    values: Vec<bool>,
}

impl Valuation {
    pub fn new(values: Vec<bool>) -> Self {
        Valuation { values }
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> bool) -> Self {
        Valuation { values: (0..n).map(f).collect() }
    }

    /// Decodes `bits` little-endian: variable `i` gets bit `i`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Valuation::from_fn(n, |i| (bits >> i) & 1 == 1)
    }

    pub fn get(&self, v: Var) -> bool {
        self.values[v.index()]
    }

    pub fn set(&mut self, v: Var, value: bool) {
        self.values[v.index()] = value;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A partial assignment; unassigned variables are `None`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialValuation {
    values: Vec<Option<bool>>,
}

impl PartialValuation {
    pub fn empty(n: usize) -> Self {
        PartialValuation { values: vec![None; n] }
    }

    pub fn get(&self, v: Var) -> Option<bool> {
        self.values[v.index()]
    }

    /// Assigns `v`; returns false if it was already assigned.
    pub fn assign(&mut self, v: Var, value: bool) -> bool {
        let slot = &mut self.values[v.index()];
        if slot.is_some() {
            return false;
        }
        *slot = Some(value);
        true
    }

    pub fn assigned(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values.iter().enumerate().filter_map(|(i, v)| v.map(|b| (Var::new(i), b)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expression {
    Const(bool),
    Var(Var),
    Not(Box<Expression>),
    /// At least two children.
    And(Vec<Expression>),
    /// At least two children.
    Or(Vec<Expression>),
}

/// An expression's truth table over its sorted support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportTable {
    pub support: Vec<Var>,
    pub table: TruthTable,
}

impl Expression {
    pub fn var(v: Var) -> Self {
        Expression::Var(v)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expression) -> Self {
        Expression::Not(Box::new(e))
    }

    /// Conjunction; the empty conjunction is `True` and a single child is returned as is.
    pub fn and(mut children: Vec<Expression>) -> Self {
        match children.len() {
            0 => Expression::Const(true),
            1 => children.pop().unwrap(),
            _ => Expression::And(children),
        }
    }

    /// Disjunction; the empty disjunction is `False` and a single child is returned as is.
    pub fn or(mut children: Vec<Expression>) -> Self {
        match children.len() {
            0 => Expression::Const(false),
            1 => children.pop().unwrap(),
            _ => Expression::Or(children),
        }
    }

    pub fn evaluate(&self, v: &Valuation) -> bool {
        match self {
            Expression::Const(b) => *b,
            Expression::Var(x) => v.get(*x),
            Expression::Not(c) => !c.evaluate(v),
            Expression::And(cs) => cs.iter().all(|c| c.evaluate(v)),
            Expression::Or(cs) => cs.iter().any(|c| c.evaluate(v)),
        }
    }

    /// Calls `f` on every variable occurrence, in syntax order.
    pub fn for_each_occurrence(&self, f: &mut impl FnMut(Var)) {
        match self {
            Expression::Const(_) => {}
            Expression::Var(x) => f(*x),
            Expression::Not(c) => c.for_each_occurrence(f),
            Expression::And(cs) | Expression::Or(cs) => {
                cs.iter().for_each(|c| c.for_each_occurrence(f))
            }
        }
    }

    /// Occurring variables in universe order.
    pub fn support(&self) -> Vec<Var> {
        let mut set = BTreeSet::new();
        self.for_each_occurrence(&mut |v| {
            set.insert(v);
        });
        set.into_iter().collect()
    }

    pub fn is_negation_free(&self) -> bool {
        match self {
            Expression::Const(_) | Expression::Var(_) => true,
            Expression::Not(_) => false,
            Expression::And(cs) | Expression::Or(cs) => cs.iter().all(Expression::is_negation_free),
        }
    }

    pub fn contains_constant(&self) -> bool {
        match self {
            Expression::Const(_) => true,
            Expression::Var(_) => false,
            Expression::Not(c) => c.contains_constant(),
            Expression::And(cs) | Expression::Or(cs) => cs.iter().any(Expression::contains_constant),
        }
    }

    pub fn as_const(&self) -> Option<bool> {
        match self {
            Expression::Const(b) => Some(*b),
            _ => None,
        }
    }

    pub fn map_vars(&self, f: &impl Fn(Var) -> Var) -> Expression {
        match self {
            Expression::Const(b) => Expression::Const(*b),
            Expression::Var(x) => Expression::Var(f(*x)),
            Expression::Not(c) => Expression::not(c.map_vars(f)),
            Expression::And(cs) => Expression::And(cs.iter().map(|c| c.map_vars(f)).collect()),
            Expression::Or(cs) => Expression::Or(cs.iter().map(|c| c.map_vars(f)).collect()),
        }
    }

    /// Replaces every occurrence of `x` by the constant `value`, without simplifying.
    pub fn substitute(&self, x: Var, value: bool) -> Expression {
        match self {
            Expression::Var(y) if *y == x => Expression::Const(value),
            Expression::Const(_) | Expression::Var(_) => self.clone(),
            Expression::Not(c) => Expression::not(c.substitute(x, value)),
            Expression::And(cs) => Expression::And(cs.iter().map(|c| c.substitute(x, value)).collect()),
            Expression::Or(cs) => Expression::Or(cs.iter().map(|c| c.substitute(x, value)).collect()),
        }
    }

    /// `e` with `x` fixed to `value`, constants propagated.
    pub fn restrict(&self, x: Var, value: bool) -> Expression {
        self.substitute(x, value).simplify()
    }

    /// Propagates constants, removes double negations and flattens nested
    /// conjunctions and disjunctions. The result is constant-free unless it is
    /// itself a constant.
    pub fn simplify(&self) -> Expression {
        match self {
            Expression::Const(_) | Expression::Var(_) => self.clone(),
            Expression::Not(c) => match c.simplify() {
                Expression::Const(b) => Expression::Const(!b),
                Expression::Not(inner) => *inner,
                s => Expression::not(s),
            },
            Expression::And(cs) => simplify_nary(cs, true),
            Expression::Or(cs) => simplify_nary(cs, false),
        }
    }

    /// Truth table over `vars`, which must contain the support (position `j` of
    /// `vars` is index bit `j`).
    pub fn table_over(&self, vars: &[Var]) -> Result<TruthTable> {
        let arity = vars.len() as u32;
        Ok(match self {
            Expression::Const(b) => TruthTable::constant(arity, *b),
            Expression::Var(x) => {
                let pos = vars
                    .iter()
                    .position(|v| v == x)
                    .ok_or_else(|| Error::UnknownVariable(format!("#{}", x.index())))?;
                TruthTable::variable(arity, pos as u32)
            }
            Expression::Not(c) => c.table_over(vars)?.not(),
            Expression::And(cs) => {
                let mut acc = TruthTable::constant(arity, true);
                for c in cs {
                    acc = acc.and(&c.table_over(vars)?);
                }
                acc
            }
            Expression::Or(cs) => {
                let mut acc = TruthTable::constant(arity, false);
                for c in cs {
                    acc = acc.or(&c.table_over(vars)?);
                }
                acc
            }
        })
    }

    /// Truth table over the sorted support, with the default cap.
    pub fn truth_table(&self) -> Result<SupportTable> {
        self.truth_table_capped(TRUTH_TABLE_CAP)
    }

    pub fn truth_table_capped(&self, cap: usize) -> Result<SupportTable> {
        let support = self.support();
        if support.len() > cap {
            return Err(Error::SupportTooLarge { size: support.len(), cap });
        }
        let table = self.table_over(&support)?;
        Ok(SupportTable { support, table })
    }

    /// `Some(b)` when the expression evaluates to `b` under every valuation.
    pub fn is_constant(&self) -> Result<Option<bool>> {
        let simplified = self.simplify();
        if let Some(b) = simplified.as_const() {
            return Ok(Some(b));
        }
        // A constant-free, negation-free expression is never constant.
        if simplified.is_negation_free() {
            return Ok(None);
        }
        Ok(simplified.truth_table()?.table.constant_value())
    }

    pub fn display<'a>(&'a self, universe: &'a VariableUniverse) -> DisplayExpression<'a> {
        DisplayExpression { expr: self, universe }
    }
}

fn simplify_nary(children: &[Expression], conjunction: bool) -> Expression {
    let mut out = Vec::with_capacity(children.len());
    for c in children {
        match c.simplify() {
            // identity element
            Expression::Const(b) if b == conjunction => {}
            // annihilator
            Expression::Const(b) => return Expression::Const(b),
            Expression::And(gs) if conjunction => out.extend(gs),
            Expression::Or(gs) if !conjunction => out.extend(gs),
            s => out.push(s),
        }
    }
    if conjunction {
        Expression::and(out)
    } else {
        Expression::or(out)
    }
}

/// Prints an expression in the file grammar, parenthesizing every `&` and `|` node.
pub struct DisplayExpression<'a> {
    expr: &'a Expression,
    universe: &'a VariableUniverse,
}

impl fmt::Display for DisplayExpression<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expression::Const(b) => write!(f, "{}", if *b { "1" } else { "0" }),
            Expression::Var(x) => write!(f, "{}", self.universe.name(*x)),
            Expression::Not(c) => write!(f, "!{}", DisplayExpression { expr: c, universe: self.universe }),
            Expression::And(cs) | Expression::Or(cs) => {
                let op = if matches!(self.expr, Expression::And(_)) { " & " } else { " | " };
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{op}")?;
                    }
                    write!(f, "{}", DisplayExpression { expr: c, universe: self.universe })?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A non-empty ordered list of expressions over one universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpressionSet {
    universe: VariableUniverse,
    members: Vec<Expression>,
}

impl ExpressionSet {
    pub fn new(universe: VariableUniverse, members: Vec<Expression>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyInput);
        }
        for m in &members {
            let mut bad = None;
            m.for_each_occurrence(&mut |v| {
                if v.index() >= universe.len() {
                    bad = Some(v);
                }
            });
            if let Some(v) = bad {
                return Err(Error::UnknownVariable(format!("#{}", v.index())));
            }
        }
        Ok(ExpressionSet { universe, members })
    }

    pub fn single(universe: VariableUniverse, member: Expression) -> Result<Self> {
        ExpressionSet::new(universe, vec![member])
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse::parse_expressions(text)
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn members(&self) -> &[Expression] {
        &self.members
    }

    /// `n = |X|`.
    pub fn n(&self) -> usize {
        self.universe.len()
    }

    pub fn evaluate(&self, v: &Valuation) -> Vec<bool> {
        self.members.iter().map(|m| m.evaluate(v)).collect()
    }

    /// Member-wise restriction by name; the universe loses the variable.
    pub fn restrict(&self, name: &str, value: bool) -> Result<ExpressionSet> {
        let x = self.universe.var(name)?;
        Ok(self.restrict_var(x, value))
    }

    pub fn restrict_var(&self, x: Var, value: bool) -> ExpressionSet {
        let shift = |v: Var| if v > x { Var::new(v.index() - 1) } else { v };
        ExpressionSet {
            universe: self.universe.without(x),
            members: self.members.iter().map(|m| m.restrict(x, value).map_vars(&shift)).collect(),
        }
    }

    /// The same members over a larger universe that extends this one.
    pub fn with_universe(&self, universe: VariableUniverse) -> Result<ExpressionSet> {
        let map: Vec<Var> = self.universe.names().map(|n| universe.var(n)).collect::<Result<_>>()?;
        let members = self.members.iter().map(|m| m.map_vars(&|v| map[v.index()])).collect();
        ExpressionSet::new(universe, members)
    }

    /// The expression file text: a `vars:` header followed by one member per line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("vars:");
        for name in self.universe.names() {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
        for m in &self.members {
            out.push_str(&m.display(&self.universe).to_string());
            out.push('\n');
        }
        out
    }
}
