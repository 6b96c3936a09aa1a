//! Monotone DNFs kept in prime-implicant form.

use std::collections::BTreeSet;
use std::fmt;

use super::{Expression, Valuation, Var, VariableUniverse};
use crate::error::{Error, Result};

pub type Term = BTreeSet<Var>;

/// Upper bound on the size of any intermediate family in the transversal search.
const TRANSVERSAL_FAMILY_CAP: usize = 1 << 16;

/// A monotone DNF with idempotence and absorption applied.
///
/// `False` is the empty term set and `True` is the set holding the empty term.
#[derive(Clone, PartialEq, Eq)]
pub struct MonotoneDnf {
    universe: VariableUniverse,
    terms: BTreeSet<Term>,
}

/// Drops every term that is a strict superset of another.
fn absorb(terms: impl IntoIterator<Item = Term>) -> BTreeSet<Term> {
    let mut sorted: Vec<Term> = terms.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    sorted.sort_by_key(|t| t.len());
    let mut kept: Vec<Term> = Vec::with_capacity(sorted.len());
    for t in sorted {
        if !kept.iter().any(|k| k.is_subset(&t)) {
            kept.push(t);
        }
    }
    kept.into_iter().collect()
}

/// Minimal hitting sets of `edges` (Berge's incremental algorithm).
///
/// For the term sets of a monotone DNF these are exactly the prime implicates.
pub fn minimal_transversals(edges: &BTreeSet<Term>) -> Result<BTreeSet<Term>> {
    let mut edges: Vec<&Term> = edges.iter().collect();
    edges.sort_by_key(|e| e.len());
    let mut family: BTreeSet<Term> = BTreeSet::from([Term::new()]);
    for edge in edges {
        let mut next = Vec::new();
        for t in &family {
            if t.iter().any(|v| edge.contains(v)) {
                next.push(t.clone());
            } else {
                for &v in edge {
                    let mut grown = t.clone();
                    grown.insert(v);
                    next.push(grown);
                }
            }
        }
        if next.len() > TRANSVERSAL_FAMILY_CAP {
            return Err(Error::SupportTooLarge { size: next.len(), cap: TRANSVERSAL_FAMILY_CAP });
        }
        family = absorb(next);
    }
    Ok(family)
}

impl MonotoneDnf {
    pub fn new<T, I>(universe: VariableUniverse, terms: T) -> Self
    where
        T: IntoIterator<Item = I>,
        I: IntoIterator<Item = Var>,
    {
        let terms = absorb(terms.into_iter().map(|t| t.into_iter().collect()));
        MonotoneDnf { universe, terms }
    }

    pub fn from_names(universe: VariableUniverse, terms: &[&[&str]]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|t| t.iter().map(|n| universe.var(n)).collect::<Result<Term>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(MonotoneDnf::new(universe, terms))
    }

    pub fn constant(universe: VariableUniverse, value: bool) -> Self {
        let terms = if value { BTreeSet::from([Term::new()]) } else { BTreeSet::new() };
        MonotoneDnf { universe, terms }
    }

    pub fn from_expression(e: &Expression, universe: &VariableUniverse) -> Result<Self> {
        let terms = dnf_terms(e)?;
        Ok(MonotoneDnf { universe: universe.clone(), terms })
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn terms(&self) -> &BTreeSet<Term> {
        &self.terms
    }

    pub fn as_const(&self) -> Option<bool> {
        if self.terms.is_empty() {
            Some(false)
        } else if self.terms.contains(&Term::new()) {
            Some(true)
        } else {
            None
        }
    }

    /// The largest term size `k`.
    pub fn max_term_size(&self) -> usize {
        self.terms.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Occurring variables in universe order.
    pub fn variables(&self) -> Vec<Var> {
        self.terms.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn or(&self, other: &MonotoneDnf) -> MonotoneDnf {
        debug_assert!(self.universe == other.universe);
        let terms = absorb(self.terms.iter().chain(&other.terms).cloned());
        MonotoneDnf { universe: self.universe.clone(), terms }
    }

    pub fn and(&self, other: &MonotoneDnf) -> MonotoneDnf {
        debug_assert!(self.universe == other.universe);
        let terms = absorb(
            self.terms
                .iter()
                .flat_map(|a| other.terms.iter().map(move |b| a.union(b).copied().collect())),
        );
        MonotoneDnf { universe: self.universe.clone(), terms }
    }

    pub fn evaluate(&self, v: &Valuation) -> bool {
        self.terms.iter().any(|t| t.iter().all(|&x| v.get(x)))
    }

    /// The disjunction of term conjunctions, terms in sorted order.
    pub fn to_expression(&self) -> Expression {
        Expression::or(
            self.terms
                .iter()
                .map(|t| Expression::and(t.iter().map(|&v| Expression::Var(v)).collect()))
                .collect(),
        )
    }

    /// The same function over another universe containing every occurring name.
    pub fn remap(&self, universe: &VariableUniverse) -> Result<MonotoneDnf> {
        let terms = self
            .terms
            .iter()
            .map(|t| t.iter().map(|&v| universe.var(self.universe.name(v))).collect::<Result<Term>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(MonotoneDnf::new(universe.clone(), terms))
    }

    /// Prime implicates, i.e. the clauses of the minimal CNF.
    pub fn prime_implicates(&self) -> Result<BTreeSet<Term>> {
        minimal_transversals(&self.terms)
    }

    /// Largest prime implicant or prime implicate: certifying `True` needs a whole
    /// term, certifying `False` a whole clause, so no strategy is shallower.
    pub fn depth_lower_bound(&self) -> Result<usize> {
        let clause = self.prime_implicates()?.iter().map(BTreeSet::len).max().unwrap_or(0);
        Ok(self.max_term_size().max(clause))
    }
}

fn dnf_terms(e: &Expression) -> Result<BTreeSet<Term>> {
    Ok(match e {
        Expression::Const(false) => BTreeSet::new(),
        Expression::Const(true) => BTreeSet::from([Term::new()]),
        Expression::Var(v) => BTreeSet::from([Term::from([*v])]),
        Expression::Not(_) => return Err(Error::NotMonotone),
        Expression::Or(cs) => {
            let mut all = Vec::new();
            for c in cs {
                all.extend(dnf_terms(c)?);
            }
            absorb(all)
        }
        Expression::And(cs) => {
            let mut acc = BTreeSet::from([Term::new()]);
            for c in cs {
                let right = dnf_terms(c)?;
                acc = absorb(acc.iter().flat_map(|a| right.iter().map(move |b| a.union(b).copied().collect())));
            }
            acc
        }
    })
}

impl Expression {
    /// Monotone DNF of a negation-free expression.
    pub fn to_monotone_dnf(&self, universe: &VariableUniverse) -> Result<MonotoneDnf> {
        MonotoneDnf::from_expression(self, universe)
    }

    /// Largest prime implicant or prime implicate size.
    pub fn monotone_depth_lower_bound(&self, universe: &VariableUniverse) -> Result<usize> {
        self.to_monotone_dnf(universe)?.depth_lower_bound()
    }
}

impl fmt::Debug for MonotoneDnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<Vec<&str>> =
            self.terms.iter().map(|t| t.iter().map(|&v| self.universe.name(v)).collect()).collect();
        f.debug_tuple("MonotoneDnf").field(&terms).finish()
    }
}

impl fmt::Display for MonotoneDnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expression().display(&self.universe))
    }
}
