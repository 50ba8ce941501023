//! SLD resolution with backtracking, cut, negation-as-failure, arithmetic
//! and resource limits.
//!
//! One engine instance executes one query at a time; instances share
//! nothing. The solution stream is pull-based via [`QueryRun`]; [`Engine::solve`]
//! collects it into a [`SolveOutcome`] with choice-point status and step
//! accounting.

pub mod arith;
pub mod bindings;
mod machine;
pub mod stdlib;

use crate::syntax::{PredId, Program, SourceSpan, Term};
use machine::{Machine, MachineStep, Shared};
use serde::{Deserialize, Serialize};

pub use arith::{eval_arith, ArithError, ArithErrorKind, Num};
pub use bindings::{unify, Bindings};
pub use stdlib::stdlib;

/// Is this indicator one of the engine's built-in predicates?
pub fn is_builtin_pred(pred: &PredId) -> bool {
    machine::is_builtin(&pred.name, pred.arity)
}

/// Resource limits for a single query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineLimits {
    /// Resolution steps before the search is abandoned.
    pub max_steps: u64,
    /// Solutions enumerated before stopping with `ChoicePointsRemain`.
    pub max_solutions: usize,
    /// Call-stack depth before the search is abandoned.
    pub max_depth: usize,
}

impl Default for EngineLimits {
    fn default() -> Self {
        EngineLimits { max_steps: 1_000_000, max_solutions: 64, max_depth: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// The search space was fully explored.
    Exhausted,
    /// Enumeration stopped with untried alternatives remaining.
    ChoicePointsRemain,
    StepLimitReached,
    DepthLimitReached,
}

impl SolveStatus {
    pub fn is_limit(&self) -> bool {
        matches!(self, SolveStatus::StepLimitReached | SolveStatus::DepthLimitReached)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuntimeErrorKind {
    UnknownPredicate(PredId),
    Instantiation,
    Type(String),
    ZeroDivisor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeError {
    pub kind: RuntimeErrorKind,
    /// Span of the culprit goal or subterm.
    pub span: SourceSpan,
    /// Outermost-to-innermost user predicates active when the error arose.
    pub call_chain: Vec<PredId>,
}

impl std::fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            RuntimeErrorKind::UnknownPredicate(p) => write!(f, "unknown predicate {p}"),
            RuntimeErrorKind::Instantiation => write!(f, "arguments are not sufficiently instantiated"),
            RuntimeErrorKind::Type(msg) => write!(f, "type error: {msg}"),
            RuntimeErrorKind::ZeroDivisor => write!(f, "arithmetic error: division by zero"),
        }?;
        if !self.call_chain.is_empty() {
            let chain: Vec<String> = self.call_chain.iter().map(ToString::to_string).collect();
            write!(f, " (in {})", chain.join(" -> "))?;
        }
        Ok(())
    }
}

impl std::error::Error for RuntimeError {}

/// A call to a predicate that is neither user-defined nor built-in,
/// recorded once per indicator and then treated as failure.
#[derive(Debug, Clone, PartialEq)]
pub struct UnknownCall {
    pub pred: PredId,
    pub span: SourceSpan,
    pub call_chain: Vec<PredId>,
}

/// One answer substitution, restricted to the named query variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// `(variable name, resolved term)` in first-occurrence order.
    pub bindings: Vec<(String, Term)>,
    /// True when unexplored branches remained at the instant this solution
    /// was emitted (after first-argument-indexing pruning).
    pub open_alternatives: bool,
}

impl Solution {
    pub fn get(&self, name: &str) -> Option<&Term> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn render(&self) -> String {
        if self.bindings.is_empty() {
            return "true".to_string();
        }
        self.bindings
            .iter()
            .map(|(n, t)| format!("{} = {}", n, crate::syntax::term_to_string(t)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solutions: Vec<Solution>,
    pub status: SolveStatus,
    pub steps_used: u64,
    pub unknown_calls: Vec<UnknownCall>,
    /// When a limit stopped the search: the active call chain at that
    /// moment (outermost first).
    pub limit_chain: Vec<PredId>,
}

impl SolveOutcome {
    /// Per-solution open-choice-point flag; `None` when out of range.
    pub fn has_open_alternatives(&self, i: usize) -> Option<bool> {
        self.solutions.get(i).map(|s| s.open_alternatives)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TracePort {
    Call,
    Exit,
    Redo,
    Fail,
}

#[derive(Debug, Clone)]
pub struct TraceEvent {
    pub port: TracePort,
    pub goal: String,
    pub depth: usize,
}

impl std::fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let port = match self.port {
            TracePort::Call => "call",
            TracePort::Exit => "exit",
            TracePort::Redo => "redo",
            TracePort::Fail => "fail",
        };
        write!(f, "{:indent$}{} {}", "", port, self.goal, indent = self.depth * 2)
    }
}

/// An executable program: user clauses plus the standard library, with
/// limits and unification configuration.
#[derive(Debug, Clone)]
pub struct Engine {
    user: Program,
    limits: EngineLimits,
    occurs_check: bool,
}

impl Engine {
    pub fn new(user: Program) -> Self {
        Engine { user, limits: EngineLimits::default(), occurs_check: true }
    }

    pub fn with_limits(mut self, limits: EngineLimits) -> Self {
        self.limits = limits;
        self
    }

    /// Occurs-check defaults to on; turning it off matches mainstream
    /// interpreter defaults at the cost of unification termination.
    pub fn with_occurs_check(mut self, on: bool) -> Self {
        self.occurs_check = on;
        self
    }

    pub fn limits(&self) -> &EngineLimits {
        &self.limits
    }

    pub fn occurs_check(&self) -> bool {
        self.occurs_check
    }

    pub fn program(&self) -> &Program {
        &self.user
    }

    /// Start a pull-based run of `query`.
    pub fn run<'e>(&'e self, query: &Term) -> QueryRun<'e, 'static> {
        self.run_traced(query, None)
    }

    pub fn run_traced<'e, 't>(
        &'e self,
        query: &Term,
        trace: Option<&'t mut dyn FnMut(&TraceEvent)>,
    ) -> QueryRun<'e, 't> {
        let query_vars: Vec<(String, usize)> =
            query.variables().into_iter().filter(|(name, _)| !name.starts_with('_')).collect();
        let max_id = query.variables().iter().map(|(_, id)| *id).max().unwrap_or(0);
        let shared = Shared::new(self, Bindings::with_capacity_for(max_id), trace);
        let machine = Machine::for_query(query.clone());
        QueryRun { shared, machine, query_vars, status: None, limit_chain: Vec::new(), dead: false }
    }

    /// Run a query to completion (bounded by the limits) and collect the
    /// outcome.
    pub fn solve(&self, query: &Term) -> Result<SolveOutcome, RuntimeError> {
        self.solve_inner(query, None)
    }

    pub fn solve_traced(
        &self,
        query: &Term,
        trace: &mut dyn FnMut(&TraceEvent),
    ) -> Result<SolveOutcome, RuntimeError> {
        self.solve_inner(query, Some(trace))
    }

    fn solve_inner(
        &self,
        query: &Term,
        trace: Option<&mut dyn FnMut(&TraceEvent)>,
    ) -> Result<SolveOutcome, RuntimeError> {
        let mut run = self.run_traced(query, trace);
        let mut solutions = Vec::new();
        while solutions.len() < self.limits.max_solutions {
            match run.next_solution()? {
                Some(sol) => solutions.push(sol),
                None => break,
            }
        }
        let status = match run.status() {
            Some(s) => s,
            // Stopped by the solution cap: alternatives may remain.
            None => match solutions.last() {
                Some(last) if last.open_alternatives => SolveStatus::ChoicePointsRemain,
                _ => SolveStatus::Exhausted,
            },
        };
        Ok(SolveOutcome {
            solutions,
            status,
            steps_used: run.steps_used(),
            unknown_calls: run.take_unknown_calls(),
            limit_chain: run.limit_chain.clone(),
        })
    }
}

/// In-progress query execution; call [`QueryRun::next_solution`] to pull
/// answers one at a time.
pub struct QueryRun<'e, 't> {
    shared: Shared<'e, 't>,
    machine: Machine,
    query_vars: Vec<(String, usize)>,
    status: Option<SolveStatus>,
    limit_chain: Vec<PredId>,
    dead: bool,
}

impl<'e, 't> QueryRun<'e, 't> {
    pub fn next_solution(&mut self) -> Result<Option<Solution>, RuntimeError> {
        if self.dead || self.status.is_some() {
            return Ok(None);
        }
        match self.machine.next(&mut self.shared) {
            Ok(MachineStep::Solution { open }) => {
                let bindings = self
                    .query_vars
                    .iter()
                    .map(|(name, id)| {
                        let var = Term::var(name.clone(), *id, SourceSpan::synthetic());
                        (name.clone(), self.shared.store.resolve(&var))
                    })
                    .collect();
                Ok(Some(Solution { bindings, open_alternatives: open }))
            }
            Ok(MachineStep::Done) => {
                self.status = Some(SolveStatus::Exhausted);
                Ok(None)
            }
            Ok(MachineStep::Limit { status, chain }) => {
                self.status = Some(status);
                self.limit_chain = chain;
                Ok(None)
            }
            Err(e) => {
                self.dead = true;
                Err(e)
            }
        }
    }

    /// `None` while solutions may still be pulled.
    pub fn status(&self) -> Option<SolveStatus> {
        self.status
    }

    pub fn steps_used(&self) -> u64 {
        self.shared.steps_used
    }

    pub fn take_unknown_calls(&mut self) -> Vec<UnknownCall> {
        let map = std::mem::take(&mut self.shared.unknowns);
        map.into_values().collect()
    }

    pub fn limit_chain(&self) -> &[PredId] {
        &self.limit_chain
    }
}
