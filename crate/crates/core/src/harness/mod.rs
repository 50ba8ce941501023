//! plunit-style test suites: parsing `begin_tests`/`test`/`end_tests`
//! blocks and running them against a submission.
//!
//! Supported test options are `fail`, `nondet` and `all(Var == List)`;
//! anything else is rejected at parse time with a named error. Clauses
//! outside test blocks are helper program clauses available to all tests
//! in the file.

mod diff;

use crate::analyzers::calls;
use crate::engine::{Engine, EngineLimits, RuntimeError, UnknownCall};
use crate::syntax::{
    parse_program, Clause, PredId, Program, SourceSpan, SyntaxError, Term, TermKind,
};
use std::collections::{BTreeMap, BTreeSet};

pub use diff::{diff_outputs, AssertionDiff, Divergence};

#[derive(Debug, Clone, PartialEq)]
pub struct AllCheck {
    /// Name of the collected variable.
    pub var: String,
    /// The expected, ordered list of values.
    pub expected: Term,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TestOptions {
    pub fail: bool,
    pub nondet: bool,
    pub all: Option<AllCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub suite: String,
    pub name: String,
    /// Flattened body conjunction; empty for `test(label).` facts.
    pub body: Vec<Term>,
    pub options: TestOptions,
    /// Predicates the body calls directly (through control constructs),
    /// built-ins excluded.
    pub body_calls: BTreeSet<PredId>,
    pub span: SourceSpan,
}

impl TestCase {
    /// Stable identifier used in reports and pass-sets.
    pub fn id(&self) -> String {
        format!("{}:{}", self.suite, self.name)
    }

    /// The body as a single runnable goal.
    pub fn body_term(&self) -> Term {
        fold_conjunction(&self.body, self.span)
    }

    /// Which predicates this test targets: all submission predicates whose
    /// name matches the suite name take priority; otherwise the body's
    /// direct calls.
    pub fn target_predicates(&self, submission: &Program) -> BTreeSet<PredId> {
        let named: BTreeSet<PredId> =
            submission.predicates().filter(|p| p.name == self.suite).cloned().collect();
        if !named.is_empty() {
            return named;
        }
        self.body_calls.clone()
    }
}

fn fold_conjunction(goals: &[Term], span: SourceSpan) -> Term {
    let mut iter = goals.iter().rev().cloned();
    match iter.next() {
        None => Term::atom("true", span),
        Some(last) => iter.fold(last, |acc, g| {
            let span = g.span.cover(&acc.span);
            Term::compound(",", vec![g, acc], span)
        }),
    }
}

/// A parsed test file: cases in declaration order plus shared helper
/// clauses.
#[derive(Debug, Clone, Default)]
pub struct TestFile {
    pub cases: Vec<TestCase>,
    pub helpers: Vec<Clause>,
}

impl TestFile {
    pub fn test_ids(&self) -> BTreeSet<String> {
        self.cases.iter().map(TestCase::id).collect()
    }
}

pub fn parse_test_file(source: &str) -> Result<TestFile, Vec<SyntaxError>> {
    let (program, mut errors) = parse_program(source);
    enum Item<'a> {
        Clause(&'a Clause),
        Directive(&'a Term),
    }
    let mut items: Vec<(usize, Item)> = program
        .clauses
        .iter()
        .map(|c| (c.span.start_offset, Item::Clause(c)))
        .chain(program.directives.iter().map(|d| (d.span.start_offset, Item::Directive(d))))
        .collect();
    items.sort_by_key(|(off, _)| *off);

    let mut file = TestFile::default();
    let mut current: Option<(String, SourceSpan)> = None;
    let mut seen_labels: BTreeSet<(String, String)> = BTreeSet::new();
    for (_, item) in items {
        match item {
            Item::Directive(d) => match d.functor() {
                Some(("begin_tests", 1)) => {
                    let name = match &d.args()[0].kind {
                        TermKind::Atom(a) => Some(a.clone()),
                        _ => None,
                    };
                    match (name, &current) {
                        (None, _) => errors.push(SyntaxError::new(
                            source,
                            "begin_tests/1 expects an atom suite name",
                            d.span,
                        )),
                        (Some(_), Some((open, _))) => errors.push(SyntaxError::new(
                            source,
                            format!("begin_tests inside unterminated test suite `{open}`"),
                            d.span,
                        )),
                        (Some(n), None) => current = Some((n, d.span)),
                    }
                }
                Some(("end_tests", 1)) => {
                    let name = match &d.args()[0].kind {
                        TermKind::Atom(a) => a.clone(),
                        _ => String::new(),
                    };
                    match current.take() {
                        None => errors.push(SyntaxError::new(
                            source,
                            "end_tests/1 without a matching begin_tests",
                            d.span,
                        )),
                        Some((open, _)) if open != name => errors.push(SyntaxError::new(
                            source,
                            format!("end_tests({name}) does not match begin_tests({open})"),
                            d.span,
                        )),
                        Some(_) => {}
                    }
                }
                // Other directives (use_module and friends) are inert here.
                _ => {}
            },
            Item::Clause(clause) => {
                let is_test_head = matches!(clause.head.functor(), Some(("test", 1 | 2)));
                match (&current, is_test_head) {
                    (Some((suite, _)), true) => {
                        match parse_case(source, suite, clause, &mut seen_labels) {
                            Ok(case) => file.cases.push(case),
                            Err(errs) => errors.extend(errs),
                        }
                    }
                    _ => file.helpers.push(clause.clone()),
                }
            }
        }
    }
    if let Some((name, span)) = current {
        errors.push(SyntaxError::new(source, format!("unterminated test suite `{name}`"), span));
    }
    if errors.is_empty() {
        Ok(file)
    } else {
        errors.sort_by_key(|e| (e.span.start_offset, e.span.end_offset));
        Err(errors)
    }
}

fn parse_case(
    source: &str,
    suite: &str,
    clause: &Clause,
    seen: &mut BTreeSet<(String, String)>,
) -> Result<TestCase, Vec<SyntaxError>> {
    let mut errors = Vec::new();
    let head_args = clause.head.args();
    let name = match &head_args[0].kind {
        TermKind::Atom(a) => a.clone(),
        _ => {
            errors.push(SyntaxError::new(source, "test label must be an atom", head_args[0].span));
            String::new()
        }
    };
    if !name.is_empty() && !seen.insert((suite.to_string(), name.clone())) {
        errors.push(SyntaxError::new(
            source,
            format!("duplicate test label `{name}` in suite `{suite}`"),
            head_args[0].span,
        ));
    }
    let mut options = TestOptions::default();
    if head_args.len() == 2 {
        parse_options(source, &head_args[1], &mut options, &mut errors);
    }
    let body_vars: BTreeSet<String> =
        clause.body.iter().flat_map(|g| g.variables()).map(|(n, _)| n).collect();
    if let Some(all) = &options.all {
        if !body_vars.contains(&all.var) {
            errors.push(SyntaxError::new(
                source,
                format!("all/1 collects `{}`, which does not occur in the test body", all.var),
                head_args[1].span,
            ));
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let body_calls = calls::body_call_sites(&clause.body)
        .into_iter()
        .map(|s| s.callee)
        .filter(|p| !crate::engine::is_builtin_pred(p) && !crate::engine::stdlib().defines(p))
        .collect();
    Ok(TestCase {
        suite: suite.to_string(),
        name,
        body: clause.body.clone(),
        options,
        body_calls,
        span: clause.span,
    })
}

fn parse_options(
    source: &str,
    opts: &Term,
    options: &mut TestOptions,
    errors: &mut Vec<SyntaxError>,
) {
    let items = match opts.as_list() {
        Some((items, None)) => items,
        _ => {
            errors.push(SyntaxError::new(source, "test options must be a list", opts.span));
            return;
        }
    };
    for item in items {
        match item.functor() {
            Some(("fail", 0)) => options.fail = true,
            Some(("nondet", 0)) => options.nondet = true,
            Some(("all", 1)) => {
                let check = &item.args()[0];
                match check.functor() {
                    Some(("==", 2)) => {
                        let lhs = &check.args()[0];
                        let rhs = &check.args()[1];
                        let var = match &lhs.kind {
                            TermKind::Var(n, _) => n.clone(),
                            _ => {
                                errors.push(SyntaxError::new(
                                    source,
                                    "all/1 expects `Var == List`",
                                    lhs.span,
                                ));
                                continue;
                            }
                        };
                        if !matches!(rhs.as_list(), Some((_, None))) {
                            errors.push(SyntaxError::new(
                                source,
                                "all/1 expects the right-hand side to be a list",
                                rhs.span,
                            ));
                            continue;
                        }
                        options.all = Some(AllCheck { var, expected: rhs.clone() });
                    }
                    _ => errors.push(SyntaxError::new(
                        source,
                        "all/1 expects `Var == List`",
                        check.span,
                    )),
                }
            }
            Some((other, arity)) => errors.push(SyntaxError::new(
                source,
                format!("unsupported test option `{other}/{arity}`"),
                item.span,
            )),
            None => errors.push(SyntaxError::new(source, "unsupported test option", item.span)),
        }
    }
    if options.fail && options.all.is_some() {
        errors.push(SyntaxError::new(
            source,
            "options `fail` and `all/1` are mutually exclusive",
            opts.span,
        ));
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    Error(RuntimeError),
    Diverged,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Error(_) => "error",
            Verdict::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestResult {
    pub case: TestCase,
    pub verdict: Verdict,
    /// Present only for failed tests that carried an expectation.
    pub diff: Option<AssertionDiff>,
    pub open_choice_warning: bool,
    pub steps_used: u64,
    /// Rendered next answer, when an open choice point produced one.
    pub second_solution: Option<String>,
    /// Innermost predicate on the call chain when a limit was hit.
    pub diverged_in: Option<PredId>,
}

impl TestResult {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Results of running a whole test file, plus every unknown-predicate
/// call recorded across the tests.
#[derive(Debug, Clone)]
pub struct SuiteRun {
    pub results: Vec<TestResult>,
    pub unknown_calls: Vec<UnknownCall>,
}

impl SuiteRun {
    /// Ids of the passing tests, the basis for submission histories.
    pub fn pass_set(&self) -> BTreeSet<String> {
        self.results.iter().filter(|r| r.passed()).map(|r| r.case.id()).collect()
    }
}

/// Run every test against `submission` extended with the file's helper
/// clauses. Each test executes in isolation; verdicts do not depend on
/// test order.
pub fn run_suite(submission: &Program, tests: &TestFile, limits: EngineLimits) -> SuiteRun {
    run_suite_traced(submission, tests, limits, None)
}

/// As [`run_suite`], optionally streaming resolution trace events (the
/// trace never influences verdicts or step counts).
pub fn run_suite_traced(
    submission: &Program,
    tests: &TestFile,
    limits: EngineLimits,
    mut trace: Option<&mut dyn FnMut(&crate::engine::TraceEvent)>,
) -> SuiteRun {
    let mut clauses = submission.clauses.clone();
    clauses.extend(tests.helpers.iter().cloned());
    let merged = Program::from_clauses(clauses, Vec::new());
    let engine = Engine::new(merged).with_limits(limits);

    let mut results = Vec::new();
    let mut unknowns: BTreeMap<PredId, UnknownCall> = BTreeMap::new();
    for case in &tests.cases {
        let sink = trace.as_deref_mut().map(|t| t as &mut dyn FnMut(&crate::engine::TraceEvent));
        let result = run_case(&engine, case, &limits, &mut unknowns, sink);
        results.push(result);
    }
    SuiteRun { results, unknown_calls: unknowns.into_values().collect() }
}

fn run_case(
    engine: &Engine,
    case: &TestCase,
    limits: &EngineLimits,
    unknowns: &mut BTreeMap<PredId, UnknownCall>,
    trace: Option<&mut dyn FnMut(&crate::engine::TraceEvent)>,
) -> TestResult {
    let query = case.body_term();
    let mut run = engine.run_traced(&query, trace);
    let mut result = TestResult {
        case: case.clone(),
        verdict: Verdict::Pass,
        diff: None,
        open_choice_warning: false,
        steps_used: 0,
        second_solution: None,
        diverged_in: None,
    };

    if case.options.fail {
        match run.next_solution() {
            Err(e) => result.verdict = Verdict::Error(e),
            Ok(Some(_)) => result.verdict = Verdict::Fail,
            Ok(None) => {
                result.verdict = match run.status() {
                    Some(s) if s.is_limit() => Verdict::Diverged,
                    _ => Verdict::Pass,
                }
            }
        }
    } else if let Some(all) = &case.options.all {
        let mut values: Vec<Term> = Vec::new();
        let mut outcome = None;
        while values.len() < limits.max_solutions {
            match run.next_solution() {
                Err(e) => {
                    outcome = Some(Verdict::Error(e));
                    break;
                }
                Ok(Some(sol)) => {
                    let value = sol
                        .get(&all.var)
                        .cloned()
                        .unwrap_or_else(|| Term::var(all.var.clone(), 0, case.span));
                    values.push(value);
                }
                Ok(None) => break,
            }
        }
        result.verdict = match outcome {
            Some(v) => v,
            None => match run.status() {
                Some(s) if s.is_limit() => Verdict::Diverged,
                _ => {
                    let actual = Term::list(values, case.span);
                    let diff = diff_outputs(&all.expected, &actual);
                    if diff.is_empty() {
                        Verdict::Pass
                    } else {
                        result.diff = Some(diff);
                        Verdict::Fail
                    }
                }
            },
        };
    } else {
        match run.next_solution() {
            Err(e) => result.verdict = Verdict::Error(e),
            Ok(Some(sol)) => {
                result.verdict = Verdict::Pass;
                if sol.open_alternatives && !case.options.nondet {
                    result.open_choice_warning = true;
                    // Show the next answer when it is cheap to get.
                    if let Ok(Some(second)) = run.next_solution() {
                        result.second_solution = Some(second.render());
                    }
                }
            }
            Ok(None) => match run.status() {
                Some(s) if s.is_limit() => result.verdict = Verdict::Diverged,
                _ => {
                    result.verdict = Verdict::Fail;
                    result.diff = assertion_diff(engine, case);
                }
            },
        }
    }

    result.steps_used = run.steps_used();
    if matches!(result.verdict, Verdict::Diverged) {
        result.diverged_in = run.limit_chain().last().cloned();
    }
    for unknown in run.take_unknown_calls() {
        unknowns.entry(unknown.pred.clone()).or_insert(unknown);
    }
    result
}

/// Expected-vs-actual information for a failed default-mode test. When
/// the body ends in a `==`/`=` assertion, the call prefix is re-run and
/// both sides are compared under its first solution; otherwise the last
/// goal itself is the unmet expectation.
fn assertion_diff(engine: &Engine, case: &TestCase) -> Option<AssertionDiff> {
    let last = case.body.last()?;
    let assertion = match last.functor() {
        Some(("==", 2)) | Some(("=", 2)) => Some((&last.args()[0], &last.args()[1])),
        _ => None,
    };
    let Some((lhs, rhs)) = assertion else {
        return Some(AssertionDiff { expected: last.clone(), actual: None, divergence: None });
    };
    let prefix = fold_conjunction(&case.body[..case.body.len() - 1], case.span);
    let mut run = engine.run(&prefix);
    let solution = match run.next_solution() {
        Ok(Some(sol)) => sol,
        // No prefix solution (or the prefix itself misbehaves): report the
        // expected side with no actual value.
        _ => {
            let expected = if is_ground(rhs) || !is_ground(lhs) { rhs } else { lhs };
            return Some(AssertionDiff { expected: expected.clone(), actual: None, divergence: None });
        }
    };
    let map: BTreeMap<String, Term> = solution.bindings.into_iter().collect();
    let lhs_inst = substitute_named(lhs, &map);
    let rhs_inst = substitute_named(rhs, &map);
    // The side that was ground in the test source is the expectation.
    let (expected, actual) =
        if is_ground(rhs) || !is_ground(lhs) { (rhs_inst, lhs_inst) } else { (lhs_inst, rhs_inst) };
    let diff = diff_outputs(&expected, &actual);
    if diff.is_empty() {
        None
    } else {
        Some(diff)
    }
}

fn is_ground(t: &Term) -> bool {
    t.variables().is_empty()
}

fn substitute_named(t: &Term, map: &BTreeMap<String, Term>) -> Term {
    match &t.kind {
        TermKind::Var(name, _) => map.get(name).cloned().unwrap_or_else(|| t.clone()),
        TermKind::Compound(f, args) => Term {
            kind: TermKind::Compound(f.clone(), args.iter().map(|a| substitute_named(a, map)).collect()),
            span: t.span,
        },
        _ => t.clone(),
    }
}
