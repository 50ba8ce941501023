//! Suite execution: verdicts, divergence flags, open-choice warnings,
//! diffs and test isolation.

use prologian_core::engine::EngineLimits;
use prologian_core::harness::{parse_test_file, run_suite, SuiteRun, Verdict};
use prologian_core::syntax::{parse_program, Program};

const MULT_OK: &str =
    "mult([], _, []).\nmult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L2).";
const MULT_NO_BASE: &str = "mult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L2).";

const MULT_TESTS: &str = r#"
:- begin_tests(mult).
test(basic) :- mult([1, 2], 3, [3, 6]).
test(empty) :- mult([], 5, []).
test(neg, [fail]) :- mult([1], 2, [3]).
:- end_tests(mult).
"#;

fn submission(src: &str) -> Program {
    let (p, errs) = parse_program(src);
    assert!(errs.is_empty(), "{errs:?}");
    p
}

fn run(program_src: &str, tests_src: &str, limits: EngineLimits) -> SuiteRun {
    let tests = parse_test_file(tests_src).unwrap();
    run_suite(&submission(program_src), &tests, limits)
}

fn verdicts(run: &SuiteRun) -> Vec<&'static str> {
    run.results.iter().map(|r| r.verdict.label()).collect()
}

#[test]
fn correct_mult_passes_all() {
    let out = run(MULT_OK, MULT_TESTS, EngineLimits::default());
    assert_eq!(verdicts(&out), vec!["pass", "pass", "pass"]);
    assert!(out.unknown_calls.is_empty());
    assert_eq!(out.pass_set().len(), 3);
}

#[test]
fn missing_base_clause_fails_with_no_solution() {
    let out = run(MULT_NO_BASE, MULT_TESTS, EngineLimits::default());
    let empty = out.results.iter().find(|r| r.case.name == "empty").unwrap();
    assert_eq!(empty.verdict, Verdict::Fail);
    let diff = empty.diff.as_ref().expect("failing call carries a diff");
    assert!(diff.actual.is_none(), "actual is `no solution`");
    assert!(diff.render().contains("no solution"));
}

#[test]
fn step_limit_maps_to_diverged() {
    let limits = EngineLimits { max_steps: 10_000, ..Default::default() };
    let out = run(
        "loop :- loop.",
        ":- begin_tests(t).\ntest(t) :- loop.\n:- end_tests(t).",
        limits,
    );
    let r = &out.results[0];
    assert_eq!(r.verdict, Verdict::Diverged);
    assert_eq!(r.steps_used, 10_000);
    assert_eq!(r.diverged_in.as_ref().unwrap().to_string(), "loop/0");
}

#[test]
fn fail_option_semantics() {
    let out = run(MULT_OK, MULT_TESTS, EngineLimits::default());
    let neg = out.results.iter().find(|r| r.case.name == "neg").unwrap();
    assert_eq!(neg.verdict, Verdict::Pass);
    // And a fail-test whose body succeeds is a Fail.
    let out = run(
        MULT_OK,
        ":- begin_tests(t).\ntest(x, [fail]) :- mult([1], 2, [2]).\n:- end_tests(t).",
        EngineLimits::default(),
    );
    assert_eq!(out.results[0].verdict, Verdict::Fail);
}

#[test]
fn all_option_compares_ordered_solutions() {
    let tests = r#"
:- begin_tests(member).
test(ok, [all(X == [1, 2])]) :- member(X, [1, 2]).
test(wrong_order, [all(X == [2, 1])]) :- member(X, [1, 2]).
test(short, [all(X == [1, 2, 3])]) :- member(X, [1, 2]).
:- end_tests(member).
"#;
    let out = run("", tests, EngineLimits::default());
    assert_eq!(verdicts(&out), vec!["pass", "fail", "fail"]);
    let short = &out.results[2];
    let diff = short.diff.as_ref().unwrap();
    assert_eq!(diff.path_description().unwrap(), "list tail after index 1");
}

#[test]
fn open_choice_warning_and_second_answer() {
    let max_tests = ":- begin_tests(max).\ntest(q) :- max(3, 2, _M).\n:- end_tests(max).";
    let without_cut = "max(X, Y, X) :- X >= Y.\nmax(_, Y, Y).";
    let out = run(without_cut, max_tests, EngineLimits::default());
    assert!(out.results[0].open_choice_warning);

    let with_cut = "max(X, Y, X) :- X >= Y, !.\nmax(_, Y, Y).";
    let out = run(with_cut, max_tests, EngineLimits::default());
    assert!(!out.results[0].open_choice_warning);

    // With a named variable the next answer is rendered.
    let named = ":- begin_tests(max).\ntest(q) :- max(3, 2, M).\n:- end_tests(max).";
    let out = run(without_cut, named, EngineLimits::default());
    assert!(out.results[0].open_choice_warning);
    assert_eq!(out.results[0].second_solution.as_deref(), Some("M = 2"));
}

#[test]
fn nondet_option_suppresses_warning() {
    let out = run(
        "",
        ":- begin_tests(t).\ntest(m, [nondet]) :- member(_X, [1, 2]).\n:- end_tests(t).",
        EngineLimits::default(),
    );
    assert_eq!(out.results[0].verdict, Verdict::Pass);
    assert!(!out.results[0].open_choice_warning);
}

#[test]
fn assertion_diff_compares_generated_and_expected() {
    let buggy = "mult([], _, []).\nmult([E1 | L1], N, [E2 | L2]) :- E2 is E1 + N, mult(L1, N, L2).";
    let tests = ":- begin_tests(mult).\ntest(v) :- mult([2], 3, X), X == [6].\n:- end_tests(mult).";
    let out = run(buggy, tests, EngineLimits::default());
    let r = &out.results[0];
    assert_eq!(r.verdict, Verdict::Fail);
    let diff = r.diff.as_ref().unwrap();
    let rendered = diff.render();
    assert!(rendered.contains("expected [6]"), "{rendered}");
    assert!(rendered.contains("[5]"), "{rendered}");
}

#[test]
fn runtime_error_becomes_error_verdict() {
    let out = run(
        "bad(X) :- X is foo + 1.",
        ":- begin_tests(t).\ntest(e) :- bad(_X).\n:- end_tests(t).",
        EngineLimits::default(),
    );
    assert!(matches!(out.results[0].verdict, Verdict::Error(_)));
}

#[test]
fn unknown_calls_are_collected_across_tests() {
    let buggy = "mult([], _, []).\nmult([E | L], N, [F | M]) :- F is E * N, multiply(L, N, M).";
    let out = run(buggy, MULT_TESTS, EngineLimits::default());
    assert_eq!(out.unknown_calls.len(), 1);
    assert_eq!(out.unknown_calls[0].pred.to_string(), "multiply/3");
}

#[test]
fn helpers_are_available_to_tests() {
    let tests = r#"
expected([3, 6]).

:- begin_tests(mult).
test(via_helper) :- expected(E), mult([1, 2], 3, E).
:- end_tests(mult).
"#;
    let out = run(MULT_OK, tests, EngineLimits::default());
    assert_eq!(out.results[0].verdict, Verdict::Pass);
}

#[test]
fn test_order_does_not_change_verdicts() {
    let tests_a = parse_test_file(MULT_TESTS).unwrap();
    let mut tests_b = tests_a.clone();
    tests_b.cases.reverse();
    let sub = submission(MULT_OK);
    let run_a = run_suite(&sub, &tests_a, EngineLimits::default());
    let run_b = run_suite(&sub, &tests_b, EngineLimits::default());
    let mut by_id_a: Vec<(String, &'static str)> =
        run_a.results.iter().map(|r| (r.case.id(), r.verdict.label())).collect();
    let mut by_id_b: Vec<(String, &'static str)> =
        run_b.results.iter().map(|r| (r.case.id(), r.verdict.label())).collect();
    by_id_a.sort();
    by_id_b.sort();
    assert_eq!(by_id_a, by_id_b);
}

#[test]
fn all_option_verdict_matches_bruteforce_enumeration() {
    use prologian_core::engine::Engine;
    use prologian_core::syntax::{parse_query, Term};

    // For a spread of list fixtures, the all-option verdict must equal a
    // direct enumerate-then-compare check.
    let lists = ["[]", "[1]", "[1, 2]", "[2, 1]", "[1, 2, 3]", "[1, 1]"];
    for input in lists {
        for expected in lists {
            let tests_src = format!(
                ":- begin_tests(t).\ntest(a, [all(X == {expected})]) :- member(X, {input}).\n:- end_tests(t)."
            );
            let out = run("", &tests_src, EngineLimits::default());
            // Brute force: enumerate member/2 solutions, build the list,
            // compare structurally.
            let engine = Engine::new(submission(""));
            let outcome = engine.solve(&parse_query(&format!("member(X, {input})")).unwrap()).unwrap();
            let actual = Term::list(
                outcome.solutions.iter().map(|s| s.get("X").unwrap().clone()).collect(),
                prologian_core::syntax::SourceSpan::synthetic(),
            );
            let expected_term = parse_query(expected).unwrap();
            let should_pass = actual.source_eq(&expected_term);
            assert_eq!(
                out.results[0].verdict == Verdict::Pass,
                should_pass,
                "all({expected}) over member(X, {input})"
            );
        }
    }
}

#[test]
fn diverged_steps_equal_step_limit() {
    let limits = EngineLimits { max_steps: 5_000, ..Default::default() };
    let out = run(
        "gen(X) :- gen(X).",
        ":- begin_tests(t).\ntest(g, [all(X == [1])]) :- gen(X).\ntest(f, [fail]) :- gen(_).\n:- end_tests(t).",
        limits,
    );
    for r in &out.results {
        assert_eq!(r.verdict, Verdict::Diverged);
        assert_eq!(r.steps_used, 5_000);
    }
}
