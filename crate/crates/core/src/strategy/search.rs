//! Exact minimum-depth search.
//!
//! A search state is the vector of member truth tables over the variables that
//! still matter. Variables no member depends on are projected away after every
//! restriction, so states reached by different probe orders (or differing only
//! by a renaming) share one memo entry keyed by the tables alone. The recursion
//!
//! ```text
//! D(Φ) = 0                                        if every member is constant
//! D(Φ) = min_x 1 + max(D(Φ[x=1]), D(Φ[x=0]))      otherwise
//! ```
//!
//! is evaluated with a strict upper limit: `solve(state, limit)` returns the exact
//! value when it is below `limit`, and otherwise some lower bound `>= limit`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use dashmap::DashMap;

use super::{DecisionDiagram, DiagramBuilder};
use crate::boolexpr::{ExpressionSet, TruthTable, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Largest universe accepted by the exact search.
    pub universe_cap: usize,
    /// Maximum number of expanded states; exceeding it is an error.
    pub budget: Option<u64>,
    /// Values above 1 evaluate the two branches of a probe concurrently.
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { universe_cap: 20, budget: None, threads: 1 }
    }
}

#[derive(Clone, Debug)]
pub struct DepthReport {
    pub depth: usize,
    pub n: usize,
    pub evasive: bool,
    pub diagram: DecisionDiagram,
    pub explored_states: u64,
}

#[derive(Clone, Debug)]
struct State {
    vars: Vec<Var>,
    tables: Vec<TruthTable>,
}

impl State {
    fn initial(set: &ExpressionSet) -> Result<State> {
        let mut vars: Vec<Var> = set.members().iter().flat_map(|m| m.support()).collect();
        vars.sort();
        vars.dedup();
        let tables = set.members().iter().map(|m| m.table_over(&vars)).collect::<Result<_>>()?;
        Ok(State { vars, tables }.pruned())
    }

    /// Drops every variable no member depends on.
    fn pruned(mut self) -> State {
        for pos in (0..self.vars.len()).rev() {
            let p = pos as u32;
            if !self.tables.iter().any(|t| t.depends_on(p)) {
                self.vars.remove(pos);
                for t in &mut self.tables {
                    *t = t.cofactor(p, false);
                }
            }
        }
        self
    }

    fn child(&self, pos: usize, value: bool) -> State {
        let mut vars = self.vars.clone();
        vars.remove(pos);
        let tables = self.tables.iter().map(|t| t.cofactor(pos as u32, value)).collect();
        State { vars, tables }.pruned()
    }

    fn is_terminal(&self) -> bool {
        self.vars.is_empty()
    }

    fn labels(&self) -> Vec<bool> {
        self.tables.iter().map(|t| t.constant_value().expect("terminal state")).collect()
    }

    /// At least one probe while anything is undetermined; for monotone members,
    /// the largest prime implicant or implicate.
    fn lower_bound(&self) -> u32 {
        self.tables
            .iter()
            .filter(|t| t.constant_value().is_none())
            .map(|t| if t.is_monotone() { t.monotone_certificate_bound().max(1) } else { 1 })
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    /// Exact value when `best` is set, otherwise a proven lower bound.
    value: u32,
    best: Option<u32>,
}

struct Solver {
    memo: DashMap<Vec<TruthTable>, Entry>,
    explored: AtomicU64,
    budget: Option<u64>,
    parallel: bool,
}

impl Solver {
    fn new(config: &SearchConfig) -> Self {
        Solver {
            memo: DashMap::new(),
            explored: AtomicU64::new(0),
            budget: config.budget,
            parallel: config.threads > 1,
        }
    }

    fn record(&self, key: &[TruthTable], entry: Entry) {
        // Idempotent merge: exact entries win, lower bounds only grow.
        self.memo
            .entry(key.to_vec())
            .and_modify(|e| {
                if e.best.is_none() && (entry.best.is_some() || entry.value > e.value) {
                    *e = entry;
                }
            })
            .or_insert(entry);
    }

    fn solve(&self, state: &State, limit: u32) -> Result<u32> {
        if state.is_terminal() {
            return Ok(0);
        }
        let known = self.memo.get(state.tables.as_slice()).map(|e| *e);
        if let Some(e) = known {
            if e.best.is_some() || e.value >= limit {
                return Ok(e.value);
            }
        }
        let explored = self.explored.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(budget) = self.budget {
            if explored > budget {
                return Err(Error::BudgetExhausted(budget));
            }
        }
        let lb = state.lower_bound().max(known.map_or(0, |e| e.value));
        if lb >= limit {
            self.record(&state.tables, Entry { value: lb, best: None });
            return Ok(lb);
        }

        let m = state.vars.len() as u32;
        // Probing every remaining variable always works, so the value is at most m.
        let mut best = limit.min(m + 1);
        let mut best_pos = None;
        for pos in 0..state.vars.len() {
            let bar = best - 1;
            let (on_false, on_true) = (state.child(pos, false), state.child(pos, true));
            let (v0, v1) = if self.parallel {
                let (a, b) = rayon::join(|| self.solve(&on_false, bar), || self.solve(&on_true, bar));
                (a?, b?)
            } else {
                let a = self.solve(&on_false, bar)?;
                if a >= bar {
                    continue;
                }
                (a, self.solve(&on_true, bar)?)
            };
            if v0 < bar && v1 < bar {
                best = 1 + v0.max(v1);
                best_pos = Some(pos as u32);
                if best <= lb {
                    break;
                }
            }
        }
        match best_pos {
            Some(pos) => {
                self.record(&state.tables, Entry { value: best, best: Some(pos) });
                Ok(best)
            }
            None => {
                let bound = lb.max(best);
                self.record(&state.tables, Entry { value: bound, best: None });
                Ok(bound)
            }
        }
    }

    fn best_probe(&self, state: &State) -> Result<usize> {
        if let Some(pos) = self.memo.get(state.tables.as_slice()).and_then(|e| e.best) {
            return Ok(pos as usize);
        }
        self.solve(state, u32::MAX)?;
        let pos = self.memo.get(state.tables.as_slice()).and_then(|e| e.best).expect("solved exactly");
        Ok(pos as usize)
    }

    /// Materializes the optimal strategy, sharing nodes between equal states.
    fn build(
        &self,
        state: &State,
        builder: &mut DiagramBuilder,
        shared: &mut HashMap<(Vec<Var>, Vec<TruthTable>), usize>,
    ) -> Result<usize> {
        if state.is_terminal() {
            return Ok(builder.leaf(state.labels()));
        }
        let key = (state.vars.clone(), state.tables.clone());
        if let Some(&i) = shared.get(&key) {
            return Ok(i);
        }
        let pos = self.best_probe(state)?;
        let on_true = self.build(&state.child(pos, true), builder, shared)?;
        let on_false = self.build(&state.child(pos, false), builder, shared)?;
        let i = builder.probe(state.vars[pos], on_true, on_false);
        shared.insert(key, i);
        Ok(i)
    }
}

fn with_pool<T: Send>(config: &SearchConfig, f: impl FnOnce() -> T + Send) -> T {
    if config.threads > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(config.threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    } else {
        f()
    }
}

fn check_cap(set: &ExpressionSet, config: &SearchConfig) -> Result<()> {
    if set.n() > config.universe_cap {
        return Err(Error::UniverseTooLarge { size: set.n(), cap: config.universe_cap });
    }
    Ok(())
}

/// Minimum depth over all strategies for `set`, with a witnessing diagram.
pub fn optimal_depth(set: &ExpressionSet, config: &SearchConfig) -> Result<DepthReport> {
    check_cap(set, config)?;
    let root = State::initial(set)?;
    let solver = Solver::new(config);
    let (depth, diagram) = with_pool(config, || -> Result<_> {
        let depth = solver.solve(&root, u32::MAX)?;
        let mut builder = DiagramBuilder::default();
        let top = solver.build(&root, &mut builder, &mut HashMap::new())?;
        Ok((depth as usize, builder.finish(set.universe().clone(), top)?))
    })?;
    debug_assert_eq!(depth, diagram.depth());
    Ok(DepthReport {
        depth,
        n: set.n(),
        evasive: depth == set.n(),
        diagram,
        explored_states: solver.explored.load(Ordering::Relaxed),
    })
}

/// Whether some strategy needs at most `k` probes. Branches that cannot beat
/// `k` are pruned rather than solved exactly.
pub fn decide_depth_at_most(set: &ExpressionSet, k: usize, config: &SearchConfig) -> Result<bool> {
    check_cap(set, config)?;
    let root = State::initial(set)?;
    let solver = Solver::new(config);
    let limit = u32::try_from(k).unwrap_or(u32::MAX - 1) + 1;
    Ok(with_pool(config, || solver.solve(&root, limit))? < limit)
}

/// Whether every strategy must probe all `n` variables in the worst case.
pub fn is_evasive(set: &ExpressionSet, config: &SearchConfig) -> Result<bool> {
    match set.n() {
        0 => Ok(true),
        n => Ok(!decide_depth_at_most(set, n - 1, config)?),
    }
}
