//! Student-facing feedback report: markdown plus a structured document
//! that mirrors every field. Rendering is a pure function; identical
//! inputs produce byte-identical output.

use super::Scorecard;
use crate::analyzers::{SolutionTypeVerdict, TechniqueViolation, Warning, WarningKind};
use crate::harness::{TestResult, Verdict};
use crate::syntax::{render_error, term_to_string, Program, SyntaxError};
use serde::{Deserialize, Serialize};
use std::fmt::Write;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntaxErrorDoc {
    pub message: String,
    pub line: usize,
    pub col: usize,
    pub snippet: String,
    pub rendered: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffDoc {
    pub expected: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<String>,
    pub rendered: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestDoc {
    pub id: String,
    pub suite: String,
    pub name: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    pub steps_used: u64,
    pub open_choice_warning: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diff: Option<DiffDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diverged_in: Option<String>,
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarningDoc {
    pub kind: String,
    pub subject: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionTypeDoc {
    pub predicate: String,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationDoc {
    pub predicate: String,
    pub required: String,
    pub message: String,
}

/// Machine-readable mirror of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema_version: u32,
    pub assignment_id: String,
    pub syntax_errors: Vec<SyntaxErrorDoc>,
    pub tests: Vec<TestDoc>,
    pub warnings: Vec<WarningDoc>,
    pub solution_types: Vec<SolutionTypeDoc>,
    pub technique_violations: Vec<ViolationDoc>,
    pub scorecard: Scorecard,
}

pub struct ReportInputs<'a> {
    pub scorecard: &'a Scorecard,
    pub results: &'a [TestResult],
    pub warnings: &'a [Warning],
    pub syntax_errors: &'a [SyntaxError],
    /// Submission source text, used to render error snippets.
    pub source: &'a str,
    pub solution_types: &'a [SolutionTypeVerdict],
    pub violations: &'a [TechniqueViolation],
    pub reveal_bodies: bool,
    pub submission: &'a Program,
}

fn warning_kind_label(kind: WarningKind) -> &'static str {
    match kind {
        WarningKind::Divergence => "divergence",
        WarningKind::OpenChoicePoint => "open_choice_point",
        WarningKind::UnknownPredicate => "unknown_predicate",
    }
}

fn verdict_mark(verdict: &Verdict) -> &'static str {
    match verdict {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Error(_) => "ERROR",
        Verdict::Diverged => "DIVERGED",
    }
}

/// Render the report in its fixed section order: syntax errors, test
/// results, per-test differences, warnings, technique validation and the
/// scorecard table.
pub fn render_report(inputs: &ReportInputs) -> (String, ReportDoc) {
    let doc = build_doc(inputs);
    let mut md = String::new();
    let _ = writeln!(md, "# Evaluation report: {}", doc.assignment_id);
    let _ = writeln!(md);

    if !doc.syntax_errors.is_empty() {
        let _ = writeln!(md, "## Syntax errors");
        let _ = writeln!(md);
        for err in &doc.syntax_errors {
            let _ = writeln!(md, "```");
            let _ = write!(md, "{}", err.rendered);
            let _ = writeln!(md, "```");
            let _ = writeln!(md);
        }
    }

    let _ = writeln!(md, "## Test results");
    let _ = writeln!(md);
    let _ = writeln!(md, "| Test | Verdict | Steps |");
    let _ = writeln!(md, "|------|---------|-------|");
    for t in &doc.tests {
        let _ = writeln!(md, "| {} | {} | {} |", t.id, t.verdict, t.steps_used);
    }
    let _ = writeln!(md);
    for t in &doc.tests {
        if t.verdict == "PASS" {
            continue;
        }
        let _ = writeln!(md, "- `{}` {}", t.id, t.verdict);
        if let Some(err) = &t.error {
            let _ = writeln!(md, "  - error: {err}");
        }
        if let Some(body) = &t.body {
            let _ = writeln!(md, "  - test body: `{body}`");
        }
        if let Some(pred) = &t.diverged_in {
            let _ = writeln!(md, "  - possible infinite loop in {pred}");
        }
        if !t.targets.is_empty() {
            let _ = writeln!(md, "  - targets: {}", t.targets.join(", "));
        }
    }
    let _ = writeln!(md);

    let diffs: Vec<&TestDoc> = doc.tests.iter().filter(|t| t.diff.is_some()).collect();
    if !diffs.is_empty() {
        let _ = writeln!(md, "## Differences");
        let _ = writeln!(md);
        for t in diffs {
            let diff = t.diff.as_ref().unwrap();
            let _ = writeln!(md, "- `{}`: {}", t.id, diff.rendered);
        }
        let _ = writeln!(md);
    }

    if !doc.warnings.is_empty() {
        let _ = writeln!(md, "## Warnings");
        let _ = writeln!(md);
        for w in &doc.warnings {
            let _ = writeln!(md, "- [{}] {}", w.kind, w.message);
        }
        let _ = writeln!(md);
    }

    if !doc.solution_types.is_empty() || !doc.technique_violations.is_empty() {
        let _ = writeln!(md, "## Technique validation");
        let _ = writeln!(md);
        for s in &doc.solution_types {
            let _ = writeln!(md, "- {}: {}", s.predicate, s.verdict);
        }
        for v in &doc.technique_violations {
            let _ = writeln!(md, "- VIOLATION: {}", v.message);
        }
        let _ = writeln!(md);
    }

    let _ = writeln!(md, "## Scorecard");
    let _ = writeln!(md);
    let _ = writeln!(md, "| Predicate | Tests passed | Points |");
    let _ = writeln!(md, "|-----------|--------------|--------|");
    for p in &doc.scorecard.per_predicate {
        let _ = writeln!(
            md,
            "| {}/{} | {}/{} | {}/{} |",
            p.name, p.arity, p.tests_passed, p.tests_total, p.points_awarded, p.points_possible
        );
    }
    let _ = writeln!(md);
    let _ = writeln!(
        md,
        "**Total: {}/{} points, {}/{} tests passed, {} warning(s).**",
        doc.scorecard.total_points,
        doc.scorecard.possible_points,
        doc.scorecard.tests_passed,
        doc.scorecard.tests_total,
        doc.scorecard.warnings,
    );

    (md, doc)
}

fn build_doc(inputs: &ReportInputs) -> ReportDoc {
    let mut syntax_errors: Vec<&SyntaxError> = inputs.syntax_errors.iter().collect();
    syntax_errors.sort_by_key(|e| (e.span.start_offset, e.span.end_offset));
    let syntax_errors = syntax_errors
        .into_iter()
        .map(|e| SyntaxErrorDoc {
            message: e.message.clone(),
            line: e.span.start_line,
            col: e.span.start_col,
            snippet: e.snippet.clone(),
            rendered: render_error(inputs.source, e),
        })
        .collect();

    let tests = inputs
        .results
        .iter()
        .map(|r| {
            let diff = r.diff.as_ref().map(|d| DiffDoc {
                expected: term_to_string(&d.expected),
                actual: d.actual.as_ref().map(term_to_string),
                first_difference: d.divergence.as_ref().map(|div| {
                    let place = d
                        .path_description()
                        .map(|p| format!("at {p}: "))
                        .unwrap_or_default();
                    format!(
                        "{place}expected {}, actual {}",
                        term_to_string(&div.expected_sub),
                        term_to_string(&div.actual_sub)
                    )
                }),
                rendered: d.render(),
            });
            let show_body = inputs.reveal_bodies && r.verdict != Verdict::Pass;
            TestDoc {
                id: r.case.id(),
                suite: r.case.suite.clone(),
                name: r.case.name.clone(),
                verdict: verdict_mark(&r.verdict).to_string(),
                error: match &r.verdict {
                    Verdict::Error(e) => Some(e.to_string()),
                    _ => None,
                },
                body: show_body.then(|| term_to_string(&r.case.body_term())),
                steps_used: r.steps_used,
                open_choice_warning: r.open_choice_warning,
                diff,
                diverged_in: r.diverged_in.as_ref().map(ToString::to_string),
                targets: r
                    .case
                    .target_predicates(inputs.submission)
                    .iter()
                    .map(ToString::to_string)
                    .collect(),
            }
        })
        .collect();

    let warnings = inputs
        .warnings
        .iter()
        .map(|w| WarningDoc {
            kind: warning_kind_label(w.kind).to_string(),
            subject: w.subject.clone(),
            message: w.message.clone(),
        })
        .collect();

    let solution_types = inputs
        .solution_types
        .iter()
        .map(|v| SolutionTypeDoc {
            predicate: v.predicate.to_string(),
            verdict: v.verdict.to_string(),
        })
        .collect();

    let technique_violations = inputs
        .violations
        .iter()
        .map(|v| ViolationDoc {
            predicate: v.predicate.to_string(),
            required: v.required.to_string(),
            message: v.message.clone(),
        })
        .collect();

    ReportDoc {
        schema_version: REPORT_SCHEMA_VERSION,
        assignment_id: inputs.scorecard.assignment_id.clone(),
        syntax_errors,
        tests,
        warnings,
        solution_types,
        technique_violations,
        scorecard: inputs.scorecard.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzers::synthesize_warnings;
    use crate::engine::EngineLimits;
    use crate::harness::{parse_test_file, run_suite};
    use crate::scoring::{score_submission, AssignmentSpec};
    use crate::syntax::parse_program;
    use std::collections::BTreeSet;

    fn report_for(program_src: &str) -> (String, ReportDoc) {
        let (submission, syntax_errors) = parse_program(program_src);
        let tests = parse_test_file(
            ":- begin_tests(mult).\ntest(a) :- mult([1], 2, [2]).\n:- end_tests(mult).",
        )
        .unwrap();
        let run = run_suite(&submission, &tests, EngineLimits::default());
        let defined: BTreeSet<_> = submission.predicates().cloned().collect();
        let warnings = synthesize_warnings(&run.results, &run.unknown_calls, &defined);
        let spec = AssignmentSpec::from_json(
            r#"{"assignment_id": "m", "predicates": [{"name": "mult", "arity": 3, "points": 5, "suite": "mult"}]}"#,
        )
        .unwrap();
        let scorecard = score_submission(&run.results, &spec, warnings.len(), 0).unwrap();
        let inputs = ReportInputs {
            scorecard: &scorecard,
            results: &run.results,
            warnings: &warnings,
            syntax_errors: &syntax_errors,
            source: program_src,
            solution_types: &[],
            violations: &[],
            reveal_bodies: true,
            submission: &submission,
        };
        render_report(&inputs)
    }

    const OK: &str = "mult([], _, []).\nmult([E | L], N, [F | M]) :- F is E * N, mult(L, N, M).";

    #[test]
    fn clean_submission_report_has_no_warning_section() {
        let (md, doc) = report_for(OK);
        assert!(md.contains("| mult:a | PASS |"));
        assert!(!md.contains("## Warnings"));
        assert!(!md.contains("## Syntax errors"));
        assert_eq!(doc.scorecard.total_points, 5);
        assert_eq!(doc.schema_version, 1);
    }

    #[test]
    fn syntax_errors_come_first_and_scoring_continues() {
        let broken = "mult([], _, [).\nmult([E | L], N, [F | M]) :- F is E * N, mult(L, N, M).\nmult([], _, []).";
        let (md, doc) = report_for(broken);
        assert_eq!(doc.syntax_errors.len(), 1);
        let syntax_pos = md.find("## Syntax errors").unwrap();
        let tests_pos = md.find("## Test results").unwrap();
        assert!(syntax_pos < tests_pos);
        // The remaining clauses still score.
        assert_eq!(doc.scorecard.total_points, 5);
    }

    #[test]
    fn rendering_is_deterministic() {
        let (md1, doc1) = report_for(OK);
        let (md2, doc2) = report_for(OK);
        assert_eq!(md1, md2);
        assert_eq!(
            serde_json::to_string(&doc1).unwrap(),
            serde_json::to_string(&doc2).unwrap()
        );
    }

    #[test]
    fn reveal_bodies_false_hides_bodies() {
        let (submission, _) = parse_program("mult(a).");
        let tests = parse_test_file(
            ":- begin_tests(mult).\ntest(a) :- mult([1], 2, [2]).\n:- end_tests(mult).",
        )
        .unwrap();
        let run = run_suite(&submission, &tests, EngineLimits::default());
        let spec = AssignmentSpec::from_json(
            r#"{"assignment_id": "m", "reveal_bodies": false, "predicates": [{"name": "mult", "arity": 3, "points": 5, "suite": "mult"}]}"#,
        )
        .unwrap();
        let scorecard = score_submission(&run.results, &spec, 0, 0).unwrap();
        let inputs = ReportInputs {
            scorecard: &scorecard,
            results: &run.results,
            warnings: &[],
            syntax_errors: &[],
            source: "",
            solution_types: &[],
            violations: &[],
            reveal_bodies: false,
            submission: &submission,
        };
        let (md, doc) = render_report(&inputs);
        assert!(!md.contains("test body:"));
        assert!(doc.tests[0].body.is_none());
    }
}
