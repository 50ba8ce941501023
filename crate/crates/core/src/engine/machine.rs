//! Backtracking goal-stack machine.
//!
//! Goals live on a persistent cons list so choice points can capture the
//! continuation cheaply. Each frame carries the choice-point-stack height
//! its `!` cuts back to; clause bodies get the height captured on entry to
//! the call, which makes cut prune exactly the alternatives created since
//! then. Negation, if-then-else conditions and findall run in nested
//! sub-machines that share the binding store and step budget.

use super::arith::{eval_arith, ArithErrorKind, Num};
use super::bindings::{unify_with_trail, Bindings};
use super::stdlib::stdlib;
use super::{Engine, RuntimeError, RuntimeErrorKind, SolveStatus, TraceEvent, TracePort, UnknownCall};
use crate::syntax::{term_to_string, Clause, PredId, Term, TermKind};
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

type Chain = Option<Rc<ChainNode>>;

struct ChainNode {
    pred: PredId,
    parent: Chain,
}

// Deep recursion builds arbitrarily long chains; the default recursive
// drop would overflow the stack, so unlink iteratively instead.
impl Drop for ChainNode {
    fn drop(&mut self) {
        let mut next = self.parent.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut node) => next = node.parent.take(),
                Err(_) => break,
            }
        }
    }
}

fn chain_push(chain: &Chain, pred: PredId) -> Chain {
    Some(Rc::new(ChainNode { pred, parent: chain.clone() }))
}

/// Outermost-to-innermost predicate indicators.
fn chain_vec(chain: &Chain) -> Vec<PredId> {
    let mut out = Vec::new();
    let mut cur = chain;
    while let Some(node) = cur {
        out.push(node.pred.clone());
        cur = &node.parent;
    }
    out.reverse();
    out
}

#[derive(Clone, Copy, PartialEq)]
enum FrameKind {
    Goal,
    /// Marker emitting an `exit` trace event; never counts as a step.
    TraceExit,
}

#[derive(Clone)]
struct Frame {
    goal: Term,
    cut_level: usize,
    depth: usize,
    chain: Chain,
    kind: FrameKind,
}

impl Frame {
    fn derived(&self, goal: Term) -> Frame {
        Frame {
            goal,
            cut_level: self.cut_level,
            depth: self.depth,
            chain: self.chain.clone(),
            kind: FrameKind::Goal,
        }
    }
}

type Goals = Option<Rc<GoalNode>>;

struct GoalNode {
    frame: Frame,
    next: Goals,
}

impl Drop for GoalNode {
    fn drop(&mut self) {
        let mut next = self.next.take();
        while let Some(rc) = next {
            match Rc::try_unwrap(rc) {
                Ok(mut node) => next = node.next.take(),
                Err(_) => break,
            }
        }
    }
}

fn cons(frame: Frame, next: Goals) -> Goals {
    Some(Rc::new(GoalNode { frame, next }))
}

#[derive(Clone, Copy, PartialEq)]
enum ClauseSrc {
    User,
    Std,
}

enum Alt {
    Clauses {
        goal: Term,
        src: ClauseSrc,
        clauses: Vec<usize>,
        /// Choice-point-stack height for `!` inside the clause bodies.
        cut_level: usize,
        depth: usize,
        chain: Chain,
        tried: bool,
    },
    Disjunct {
        frame: Frame,
    },
    IntRange {
        var: Term,
        next: i64,
        hi: i64,
    },
}

struct ChoicePoint {
    alt: Alt,
    /// Continuation after the choice-creating goal.
    goals: Goals,
    trail_mark: usize,
}

pub(super) struct Shared<'e, 't> {
    pub engine: &'e Engine,
    pub store: Bindings,
    pub steps_used: u64,
    pub unknowns: BTreeMap<PredId, UnknownCall>,
    trace: Option<&'t mut dyn FnMut(&TraceEvent)>,
}

impl<'e, 't> Shared<'e, 't> {
    pub fn new(
        engine: &'e Engine,
        store: Bindings,
        trace: Option<&'t mut dyn FnMut(&TraceEvent)>,
    ) -> Self {
        Shared { engine, store, steps_used: 0, unknowns: BTreeMap::new(), trace }
    }

    fn trace_enabled(&self) -> bool {
        self.trace.is_some()
    }

    fn trace_event(&mut self, port: TracePort, goal: &Term, depth: usize) {
        if let Some(sink) = self.trace.as_mut() {
            let rendered = term_to_string(&self.store.resolve(goal));
            sink(&TraceEvent { port, goal: rendered, depth });
        }
    }
}

pub(super) enum MachineStep {
    Solution { open: bool },
    Done,
    Limit { status: SolveStatus, chain: Vec<PredId> },
}

enum Flow {
    Continue,
    Fail,
    Return(MachineStep),
}

enum SubProve {
    Proved,
    Failed,
    Limit { status: SolveStatus, chain: Vec<PredId> },
}

pub(super) struct Machine {
    goals: Goals,
    cps: Vec<ChoicePoint>,
    trail: Vec<usize>,
    after_solution: bool,
}

fn rt_err(kind: RuntimeErrorKind, span: crate::syntax::SourceSpan, chain: &Chain) -> RuntimeError {
    RuntimeError { kind, span, call_chain: chain_vec(chain) }
}

fn rename_term(t: &Term, map: &mut HashMap<usize, usize>, store: &mut Bindings) -> Term {
    match &t.kind {
        TermKind::Var(name, id) => {
            let fresh = *map.entry(*id).or_insert_with(|| store.fresh_var_id());
            Term::var(name.clone(), fresh, t.span)
        }
        TermKind::Compound(f, args) => Term {
            kind: TermKind::Compound(
                f.clone(),
                args.iter().map(|a| rename_term(a, map, store)).collect(),
            ),
            span: t.span,
        },
        _ => t.clone(),
    }
}

fn rename_clause(clause: &Clause, store: &mut Bindings) -> (Term, Vec<Term>) {
    let mut map = HashMap::new();
    let head = rename_term(&clause.head, &mut map, store);
    let body = clause.body.iter().map(|g| rename_term(g, &mut map, store)).collect();
    (head, body)
}

/// Resolve a term and rename its remaining unbound variables to fresh
/// ones (`copy_term` semantics, used by findall).
fn copy_resolved(sh: &mut Shared<'_, '_>, t: &Term) -> Term {
    let resolved = sh.store.resolve(t);
    let mut map = HashMap::new();
    rename_term(&resolved, &mut map, &mut sh.store)
}

fn lookup_clauses<'e>(engine: &'e Engine, pred: &PredId) -> Option<(ClauseSrc, &'e [usize])> {
    let user = engine.program().clause_positions(pred);
    if !user.is_empty() {
        return Some((ClauseSrc::User, user));
    }
    let std = stdlib().clause_positions(pred);
    if !std.is_empty() {
        return Some((ClauseSrc::Std, std));
    }
    None
}

fn clause_at(engine: &Engine, src: ClauseSrc, idx: usize) -> &Clause {
    match src {
        ClauseSrc::User => &engine.program().clauses[idx],
        ClauseSrc::Std => &stdlib().clauses[idx],
    }
}

/// First-argument indexing: can this clause head possibly unify with the
/// call, judging only by the first argument's principal functor?
fn clause_may_match(store: &Bindings, goal: &Term, clause: &Clause) -> bool {
    let gargs = goal.args();
    let hargs = clause.head.args();
    if gargs.is_empty() || hargs.is_empty() {
        return true;
    }
    let g0 = store.deref(&gargs[0]);
    let h0 = &hargs[0];
    match (&g0.kind, &h0.kind) {
        (TermKind::Var(..), _) | (_, TermKind::Var(..)) => true,
        (TermKind::Atom(a), TermKind::Atom(b)) => a == b,
        (TermKind::Int(a), TermKind::Int(b)) => a == b,
        (TermKind::Float(a), TermKind::Float(b)) => a == b,
        (TermKind::Compound(f, fa), TermKind::Compound(g, ga)) => f == g && fa.len() == ga.len(),
        _ => false,
    }
}

pub(super) fn is_builtin(name: &str, arity: usize) -> bool {
    matches!(
        (name, arity),
        ("true", 0)
            | ("fail", 0)
            | ("!", 0)
            | (",", 2)
            | (";", 2)
            | ("->", 2)
            | ("\\+", 1)
            | ("=", 2)
            | ("\\=", 2)
            | ("==", 2)
            | ("\\==", 2)
            | ("is", 2)
            | ("=:=", 2)
            | ("=\\=", 2)
            | ("<", 2)
            | (">", 2)
            | ("=<", 2)
            | (">=", 2)
            | ("findall", 3)
            | ("between", 3)
            | ("msort", 2)
    ) || (name == "call" && arity >= 1)
}

impl Machine {
    pub(super) fn for_query(query: Term) -> Self {
        let frame =
            Frame { goal: query, cut_level: 0, depth: 0, chain: None, kind: FrameKind::Goal };
        Machine { goals: cons(frame, None), cps: Vec::new(), trail: Vec::new(), after_solution: false }
    }

    fn from_frame(frame: Frame) -> Self {
        Machine { goals: cons(frame, None), cps: Vec::new(), trail: Vec::new(), after_solution: false }
    }

    pub(super) fn next(&mut self, sh: &mut Shared<'_, '_>) -> Result<MachineStep, RuntimeError> {
        if self.after_solution {
            self.after_solution = false;
            if !self.backtrack(sh) {
                return Ok(MachineStep::Done);
            }
        }
        loop {
            let node = match &self.goals {
                None => {
                    self.after_solution = true;
                    return Ok(MachineStep::Solution { open: !self.cps.is_empty() });
                }
                Some(node) => node.clone(),
            };
            self.goals = node.next.clone();
            let frame = node.frame.clone();
            if frame.kind == FrameKind::TraceExit {
                sh.trace_event(TracePort::Exit, &frame.goal, frame.depth);
                continue;
            }
            if sh.steps_used >= sh.engine.limits().max_steps {
                return Ok(MachineStep::Limit {
                    status: SolveStatus::StepLimitReached,
                    chain: chain_vec(&frame.chain),
                });
            }
            sh.steps_used += 1;
            let flow = self.dispatch(sh, &frame)?;
            match flow {
                Flow::Continue => {}
                Flow::Fail => {
                    if !self.backtrack(sh) {
                        return Ok(MachineStep::Done);
                    }
                }
                Flow::Return(step) => return Ok(step),
            }
        }
    }

    fn dispatch(&mut self, sh: &mut Shared<'_, '_>, frame: &Frame) -> Result<Flow, RuntimeError> {
        let goal = sh.store.deref(&frame.goal);
        let (name, arity) = match &goal.kind {
            TermKind::Var(..) => {
                return Err(rt_err(RuntimeErrorKind::Instantiation, goal.span, &frame.chain))
            }
            TermKind::Int(_) | TermKind::Float(_) => {
                return Err(rt_err(
                    RuntimeErrorKind::Type("callable expected".into()),
                    goal.span,
                    &frame.chain,
                ))
            }
            TermKind::Atom(a) => (a.as_str(), 0),
            TermKind::Compound(f, args) => (f.as_str(), args.len()),
        };
        let args = goal.args();
        match (name, arity) {
            ("true", 0) => Ok(Flow::Continue),
            ("fail", 0) => Ok(Flow::Fail),
            ("!", 0) => {
                self.cps.truncate(frame.cut_level);
                Ok(Flow::Continue)
            }
            (",", 2) => {
                let right = frame.derived(args[1].clone());
                let left = frame.derived(args[0].clone());
                self.goals = cons(left, cons(right, self.goals.clone()));
                Ok(Flow::Continue)
            }
            (";", 2) => {
                let lhs = sh.store.deref(&args[0]);
                if let TermKind::Compound(f, ct) = &lhs.kind {
                    if f == "->" && ct.len() == 2 {
                        return self.if_then_else(sh, frame, &ct[0], &ct[1], Some(&args[1]));
                    }
                }
                self.cps.push(ChoicePoint {
                    alt: Alt::Disjunct { frame: frame.derived(args[1].clone()) },
                    goals: self.goals.clone(),
                    trail_mark: self.trail.len(),
                });
                self.goals = cons(frame.derived(args[0].clone()), self.goals.clone());
                Ok(Flow::Continue)
            }
            ("->", 2) => self.if_then_else(sh, frame, &args[0], &args[1], None),
            ("\\+", 1) => {
                let inner = Frame {
                    goal: args[0].clone(),
                    cut_level: 0,
                    depth: frame.depth + 1,
                    chain: frame.chain.clone(),
                    kind: FrameKind::Goal,
                };
                match sub_prove(sh, inner, false, &mut self.trail)? {
                    SubProve::Proved => Ok(Flow::Fail),
                    SubProve::Failed => Ok(Flow::Continue),
                    SubProve::Limit { status, chain } => {
                        Ok(Flow::Return(MachineStep::Limit { status, chain }))
                    }
                }
            }
            ("call", n) if n >= 1 => {
                let target = sh.store.deref(&args[0]);
                let extra = &args[1..];
                let built = match &target.kind {
                    TermKind::Atom(a) => {
                        if extra.is_empty() {
                            target.clone()
                        } else {
                            Term::compound(a.clone(), extra.to_vec(), goal.span)
                        }
                    }
                    TermKind::Compound(f, inner) => {
                        let mut all = inner.clone();
                        all.extend(extra.iter().cloned());
                        Term::compound(f.clone(), all, goal.span)
                    }
                    TermKind::Var(..) => {
                        return Err(rt_err(RuntimeErrorKind::Instantiation, goal.span, &frame.chain))
                    }
                    _ => {
                        return Err(rt_err(
                            RuntimeErrorKind::Type("callable expected".into()),
                            goal.span,
                            &frame.chain,
                        ))
                    }
                };
                // Cut inside call/N is local to the called goal.
                self.goals = cons(
                    Frame {
                        goal: built,
                        cut_level: self.cps.len(),
                        depth: frame.depth + 1,
                        chain: frame.chain.clone(),
                        kind: FrameKind::Goal,
                    },
                    self.goals.clone(),
                );
                Ok(Flow::Continue)
            }
            ("=", 2) => {
                if unify_with_trail(
                    &mut sh.store,
                    &mut self.trail,
                    &args[0],
                    &args[1],
                    sh.engine.occurs_check(),
                ) {
                    Ok(Flow::Continue)
                } else {
                    Ok(Flow::Fail)
                }
            }
            ("\\=", 2) => {
                let mark = self.trail.len();
                let unified = unify_with_trail(
                    &mut sh.store,
                    &mut self.trail,
                    &args[0],
                    &args[1],
                    sh.engine.occurs_check(),
                );
                sh.store.undo_to(&mut self.trail, mark);
                if unified {
                    Ok(Flow::Fail)
                } else {
                    Ok(Flow::Continue)
                }
            }
            ("==", 2) => {
                if sh.store.identical(&args[0], &args[1]) {
                    Ok(Flow::Continue)
                } else {
                    Ok(Flow::Fail)
                }
            }
            ("\\==", 2) => {
                if sh.store.identical(&args[0], &args[1]) {
                    Ok(Flow::Fail)
                } else {
                    Ok(Flow::Continue)
                }
            }
            ("is", 2) => {
                let num = self.eval(sh, &args[1], frame)?;
                let result = num.to_term(goal.span);
                if unify_with_trail(
                    &mut sh.store,
                    &mut self.trail,
                    &args[0],
                    &result,
                    sh.engine.occurs_check(),
                ) {
                    Ok(Flow::Continue)
                } else {
                    Ok(Flow::Fail)
                }
            }
            ("=:=", 2) | ("=\\=", 2) | ("<", 2) | (">", 2) | ("=<", 2) | (">=", 2) => {
                let a = self.eval(sh, &args[0], frame)?;
                let b = self.eval(sh, &args[1], frame)?;
                let holds = match (a, b) {
                    (Num::Int(x), Num::Int(y)) => compare_ord(name, x.cmp(&y)),
                    (x, y) => {
                        let (x, y) = (x.as_f64(), y.as_f64());
                        match x.partial_cmp(&y) {
                            Some(ord) => compare_ord(name, ord),
                            None => false,
                        }
                    }
                };
                if holds {
                    Ok(Flow::Continue)
                } else {
                    Ok(Flow::Fail)
                }
            }
            ("findall", 3) => {
                let inner = Frame {
                    goal: args[1].clone(),
                    cut_level: 0,
                    depth: frame.depth + 1,
                    chain: frame.chain.clone(),
                    kind: FrameKind::Goal,
                };
                match sub_enumerate(sh, inner, &args[0])? {
                    Ok(items) => {
                        let list = Term::list(items, goal.span);
                        if unify_with_trail(
                            &mut sh.store,
                            &mut self.trail,
                            &args[2],
                            &list,
                            sh.engine.occurs_check(),
                        ) {
                            Ok(Flow::Continue)
                        } else {
                            Ok(Flow::Fail)
                        }
                    }
                    Err((status, chain)) => Ok(Flow::Return(MachineStep::Limit { status, chain })),
                }
            }
            ("between", 3) => self.between(sh, frame, &goal),
            ("msort", 2) => self.msort(sh, frame, &goal),
            _ => self.user_call(sh, frame, &goal),
        }
    }

    fn eval(&self, sh: &Shared<'_, '_>, term: &Term, frame: &Frame) -> Result<Num, RuntimeError> {
        eval_arith(term, &sh.store).map_err(|e| {
            let kind = match e.kind {
                ArithErrorKind::Instantiation => RuntimeErrorKind::Instantiation,
                ArithErrorKind::Type(msg) => RuntimeErrorKind::Type(msg),
                ArithErrorKind::ZeroDivisor => RuntimeErrorKind::ZeroDivisor,
            };
            rt_err(kind, e.span, &frame.chain)
        })
    }

    fn if_then_else(
        &mut self,
        sh: &mut Shared<'_, '_>,
        frame: &Frame,
        cond: &Term,
        then: &Term,
        els: Option<&Term>,
    ) -> Result<Flow, RuntimeError> {
        let cond_frame = Frame {
            goal: cond.clone(),
            cut_level: 0,
            depth: frame.depth + 1,
            chain: frame.chain.clone(),
            kind: FrameKind::Goal,
        };
        match sub_prove(sh, cond_frame, true, &mut self.trail)? {
            SubProve::Proved => {
                self.goals = cons(frame.derived(then.clone()), self.goals.clone());
                Ok(Flow::Continue)
            }
            SubProve::Failed => match els {
                Some(e) => {
                    self.goals = cons(frame.derived(e.clone()), self.goals.clone());
                    Ok(Flow::Continue)
                }
                None => Ok(Flow::Fail),
            },
            SubProve::Limit { status, chain } => Ok(Flow::Return(MachineStep::Limit { status, chain })),
        }
    }

    fn between(&mut self, sh: &mut Shared<'_, '_>, frame: &Frame, goal: &Term) -> Result<Flow, RuntimeError> {
        let args = goal.args();
        let bound = |t: &Term| -> Result<i64, RuntimeError> {
            let t = sh.store.deref(t);
            match t.kind {
                TermKind::Int(v) => Ok(v),
                TermKind::Var(..) => Err(rt_err(RuntimeErrorKind::Instantiation, t.span, &frame.chain)),
                _ => Err(rt_err(
                    RuntimeErrorKind::Type("integer expected in between/3".into()),
                    t.span,
                    &frame.chain,
                )),
            }
        };
        let lo = bound(&args[0])?;
        let hi = bound(&args[1])?;
        let x = sh.store.deref(&args[2]);
        match &x.kind {
            TermKind::Int(v) => {
                if lo <= *v && *v <= hi {
                    Ok(Flow::Continue)
                } else {
                    Ok(Flow::Fail)
                }
            }
            TermKind::Var(..) => {
                if lo > hi {
                    return Ok(Flow::Fail);
                }
                self.cps.push(ChoicePoint {
                    alt: Alt::IntRange { var: x.clone(), next: lo, hi },
                    goals: self.goals.clone(),
                    trail_mark: self.trail.len(),
                });
                Ok(Flow::Fail)
            }
            _ => Err(rt_err(
                RuntimeErrorKind::Type("integer expected in between/3".into()),
                x.span,
                &frame.chain,
            )),
        }
    }

    fn msort(&mut self, sh: &mut Shared<'_, '_>, frame: &Frame, goal: &Term) -> Result<Flow, RuntimeError> {
        let args = goal.args();
        let list = sh.store.resolve(&args[0]);
        let items = match list.as_list() {
            Some((items, None)) => items.into_iter().cloned().collect::<Vec<_>>(),
            Some((_, Some(tail))) if tail.is_var() => {
                return Err(rt_err(RuntimeErrorKind::Instantiation, list.span, &frame.chain))
            }
            _ if list.is_var() => {
                return Err(rt_err(RuntimeErrorKind::Instantiation, list.span, &frame.chain))
            }
            _ => {
                return Err(rt_err(
                    RuntimeErrorKind::Type("list expected in msort/2".into()),
                    list.span,
                    &frame.chain,
                ))
            }
        };
        let mut sorted = items;
        sorted.sort_by(|a, b| sh.store.compare(a, b));
        let result = Term::list(sorted, goal.span);
        if unify_with_trail(&mut sh.store, &mut self.trail, &args[1], &result, sh.engine.occurs_check())
        {
            Ok(Flow::Continue)
        } else {
            Ok(Flow::Fail)
        }
    }

    fn user_call(&mut self, sh: &mut Shared<'_, '_>, frame: &Frame, goal: &Term) -> Result<Flow, RuntimeError> {
        let pred = goal.indicator().expect("user goals are atoms or compounds");
        let Some((src, positions)) = lookup_clauses(sh.engine, &pred) else {
            debug_assert!(!is_builtin(&pred.name, pred.arity));
            sh.unknowns.entry(pred.clone()).or_insert_with(|| UnknownCall {
                pred: pred.clone(),
                span: goal.span,
                call_chain: chain_vec(&frame.chain),
            });
            sh.trace_event(TracePort::Fail, goal, frame.depth + 1);
            return Ok(Flow::Fail);
        };
        let child_depth = frame.depth + 1;
        if child_depth > sh.engine.limits().max_depth {
            let chain = chain_push(&frame.chain, pred);
            return Ok(Flow::Return(MachineStep::Limit {
                status: SolveStatus::DepthLimitReached,
                chain: chain_vec(&chain),
            }));
        }
        sh.trace_event(TracePort::Call, goal, child_depth);
        let filtered: Vec<usize> = positions
            .iter()
            .copied()
            .filter(|&i| clause_may_match(&sh.store, goal, clause_at(sh.engine, src, i)))
            .collect();
        if filtered.is_empty() {
            sh.trace_event(TracePort::Fail, goal, child_depth);
            return Ok(Flow::Fail);
        }
        let chain = chain_push(&frame.chain, pred);
        self.cps.push(ChoicePoint {
            alt: Alt::Clauses {
                goal: goal.clone(),
                src,
                clauses: filtered,
                cut_level: self.cps.len(),
                depth: child_depth,
                chain,
                tried: false,
            },
            goals: self.goals.clone(),
            trail_mark: self.trail.len(),
        });
        // Entering the choice point through the normal backtracking path
        // tries the first clause.
        Ok(Flow::Fail)
    }

    fn backtrack(&mut self, sh: &mut Shared<'_, '_>) -> bool {
        loop {
            let Some(top) = self.cps.last() else {
                sh.store.undo_to(&mut self.trail, 0);
                return false;
            };
            let trail_mark = top.trail_mark;
            sh.store.undo_to(&mut self.trail, trail_mark);
            let idx = self.cps.len() - 1;
            match &mut self.cps[idx].alt {
                Alt::Clauses { clauses, tried, .. } => {
                    if clauses.is_empty() {
                        self.cps.pop();
                        continue;
                    }
                    let clause_idx = clauses.remove(0);
                    let was_tried = *tried;
                    *tried = true;
                    let (goal, src, cut_level, depth, chain) = match &self.cps[idx].alt {
                        Alt::Clauses { goal, src, cut_level, depth, chain, .. } => {
                            (goal.clone(), *src, *cut_level, *depth, chain.clone())
                        }
                        _ => unreachable!(),
                    };
                    let continuation = self.cps[idx].goals.clone();
                    if was_tried {
                        sh.trace_event(TracePort::Redo, &goal, depth);
                    }
                    let clause = clause_at(sh.engine, src, clause_idx).clone();
                    let (head, body) = rename_clause(&clause, &mut sh.store);
                    if unify_with_trail(&mut sh.store, &mut self.trail, &goal, &head, sh.engine.occurs_check())
                    {
                        let exhausted = matches!(
                            &self.cps[idx].alt,
                            Alt::Clauses { clauses, .. } if clauses.is_empty()
                        );
                        if exhausted {
                            self.cps.pop();
                        }
                        let mut gl = continuation;
                        if sh.trace_enabled() {
                            gl = cons(
                                Frame {
                                    goal: goal.clone(),
                                    cut_level,
                                    depth,
                                    chain: chain.clone(),
                                    kind: FrameKind::TraceExit,
                                },
                                gl,
                            );
                        }
                        for g in body.into_iter().rev() {
                            gl = cons(
                                Frame {
                                    goal: g,
                                    cut_level,
                                    depth,
                                    chain: chain.clone(),
                                    kind: FrameKind::Goal,
                                },
                                gl,
                            );
                        }
                        self.goals = gl;
                        return true;
                    }
                    sh.store.undo_to(&mut self.trail, trail_mark);
                    // Try the next clause of the same choice point.
                }
                Alt::Disjunct { frame } => {
                    let frame = frame.clone();
                    let continuation = self.cps[idx].goals.clone();
                    self.cps.pop();
                    self.goals = cons(frame, continuation);
                    return true;
                }
                Alt::IntRange { var, next, hi } => {
                    let v = *next;
                    let var = var.clone();
                    let exhausted = v >= *hi;
                    *next = v + 1;
                    let continuation = self.cps[idx].goals.clone();
                    if exhausted {
                        self.cps.pop();
                    }
                    let id = match var.kind {
                        TermKind::Var(_, id) => id,
                        _ => unreachable!("between/3 only creates ranges over variables"),
                    };
                    sh.store.bind(id, Term::int(v, var.span), &mut self.trail);
                    self.goals = continuation;
                    return true;
                }
            }
        }
    }
}

fn compare_ord(op: &str, ord: std::cmp::Ordering) -> bool {
    use std::cmp::Ordering::*;
    match op {
        "=:=" => ord == Equal,
        "=\\=" => ord != Equal,
        "<" => ord == Less,
        ">" => ord == Greater,
        "=<" => ord != Greater,
        ">=" => ord != Less,
        _ => unreachable!(),
    }
}

/// Prove a goal once in a nested machine. With `keep_bindings` the
/// solution's bindings are merged onto the parent trail (if-then-else
/// conditions); otherwise they are undone (negation as failure).
fn sub_prove(
    sh: &mut Shared<'_, '_>,
    frame: Frame,
    keep_bindings: bool,
    parent_trail: &mut Vec<usize>,
) -> Result<SubProve, RuntimeError> {
    let mut m = Machine::from_frame(frame);
    match m.next(sh)? {
        MachineStep::Solution { .. } => {
            if keep_bindings {
                parent_trail.append(&mut m.trail);
            } else {
                sh.store.undo_to(&mut m.trail, 0);
            }
            Ok(SubProve::Proved)
        }
        MachineStep::Done => Ok(SubProve::Failed),
        MachineStep::Limit { status, chain } => {
            sh.store.undo_to(&mut m.trail, 0);
            Ok(SubProve::Limit { status, chain })
        }
    }
}

/// Enumerate every solution of a goal, collecting fresh copies of the
/// template (findall/3).
#[allow(clippy::type_complexity)]
fn sub_enumerate(
    sh: &mut Shared<'_, '_>,
    frame: Frame,
    template: &Term,
) -> Result<Result<Vec<Term>, (SolveStatus, Vec<PredId>)>, RuntimeError> {
    let mut m = Machine::from_frame(frame);
    let mut out = Vec::new();
    loop {
        match m.next(sh)? {
            MachineStep::Solution { .. } => out.push(copy_resolved(sh, template)),
            MachineStep::Done => return Ok(Ok(out)),
            MachineStep::Limit { status, chain } => {
                sh.store.undo_to(&mut m.trail, 0);
                return Ok(Err((status, chain)));
            }
        }
    }
}
