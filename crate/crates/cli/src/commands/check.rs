//! `prologian check`: the full grading pipeline for one submission.

use crate::color::Palette;
use crate::{exit, CheckArgs, CommandOutput};
use prologian_core::analyzers::{
    build_call_graph, check_required_technique, classify_solution_type, synthesize_warnings,
    SolutionTypeVerdict,
};
use prologian_core::harness::{parse_test_file, run_suite_traced, SuiteRun, TestFile, Verdict};
use prologian_core::scoring::{render_report, score_submission, AssignmentSpec, ReportInputs};
use prologian_core::syntax::{parse_program, render_errors, PredId, Program};
use std::collections::BTreeSet;
use std::fs;
use std::sync::mpsc;
use std::time::Duration;

fn read_input(path: &std::path::Path, what: &str) -> Result<String, CommandOutput> {
    fs::read_to_string(path)
        .map_err(|e| CommandOutput::input_error(format!("cannot read {what} {}: {e}", path.display())))
}

pub fn run(args: &CheckArgs) -> CommandOutput {
    let palette = Palette::from_choice(args.color);
    let source = match read_input(&args.program, "program") {
        Ok(s) => s,
        Err(out) => return out,
    };
    let spec_text = match read_input(&args.spec, "assignment spec") {
        Ok(s) => s,
        Err(out) => return out,
    };
    let tests_text = match read_input(&args.tests, "test file") {
        Ok(s) => s,
        Err(out) => return out,
    };

    let spec = match AssignmentSpec::from_json(&spec_text) {
        Ok(s) => s,
        Err(e) => return CommandOutput::input_error(e.to_string()),
    };
    let tests = match parse_test_file(&tests_text) {
        Ok(t) => t,
        Err(errors) => {
            return CommandOutput::input_error(format!(
                "test file {} does not parse:\n{}",
                args.tests.display(),
                render_errors(&tests_text, &errors)
            ))
        }
    };

    // Student submissions keep their cleanly-parsed clauses; errors go in
    // the report.
    let (submission, syntax_errors) = parse_program(&source);

    let mut limits = spec.limits;
    if let Some(max_steps) = args.max_steps {
        limits.max_steps = max_steps;
    }

    let run = match run_with_timeout(&submission, &tests, limits, args.trace, args.timeout) {
        Some(run) => run,
        None => {
            return CommandOutput {
                exit: exit::ISSUES,
                stdout: String::new(),
                stderr: format!(
                    "error: evaluation exceeded the {}s wall-clock budget; \
                     the submission likely diverges (possible infinite loop)\n",
                    args.timeout
                ),
            }
        }
    };

    // Analyses.
    let graph = build_call_graph(&submission);
    let mut solution_types: Vec<SolutionTypeVerdict> = Vec::new();
    for pred_spec in &spec.predicates {
        if let Ok(v) = classify_solution_type(&graph, &pred_spec.pred_id()) {
            solution_types.push(v);
        }
    }
    let violations = check_required_technique(&solution_types, &spec.required_techniques());
    let defined: BTreeSet<PredId> = submission
        .predicates()
        .cloned()
        .chain(
            prologian_core::engine::stdlib()
                .predicates()
                .filter(|p| !p.name.starts_with('$'))
                .cloned(),
        )
        .collect();
    let warnings = synthesize_warnings(&run.results, &run.unknown_calls, &defined);

    let timestamp = args.timestamp.unwrap_or_else(|| {
        std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.parse().ok()).unwrap_or(0)
    });
    let scorecard =
        match score_submission(&run.results, &spec, warnings.len(), timestamp) {
            Ok(card) => card,
            Err(e) => return CommandOutput::input_error(e.to_string()),
        };

    let inputs = ReportInputs {
        scorecard: &scorecard,
        results: &run.results,
        warnings: &warnings,
        syntax_errors: &syntax_errors,
        source: &source,
        solution_types: &solution_types,
        violations: &violations,
        reveal_bodies: spec.reveal_bodies,
        submission: &submission,
    };
    let (markdown, doc) = render_report(&inputs);

    let mut stderr = String::new();
    if !syntax_errors.is_empty() {
        // Highlight the marker lines when color is on; report files stay
        // escape-free.
        for line in render_errors(&source, &syntax_errors).lines() {
            let trimmed = line.trim_start();
            if trimmed.starts_with('^') || trimmed.starts_with('~') {
                stderr.push_str(&palette.bad(line));
            } else {
                stderr.push_str(line);
            }
            stderr.push('\n');
        }
    }

    if let Some(dir) = &args.report {
        if let Err(e) = fs::create_dir_all(dir) {
            return CommandOutput::input_error(format!(
                "cannot create report directory {}: {e}",
                dir.display()
            ));
        }
        let json = serde_json::to_string_pretty(&doc).expect("report serializes");
        if let Err(e) = fs::write(dir.join("report.md"), &markdown)
            .and_then(|_| fs::write(dir.join("report.json"), format!("{json}\n")))
        {
            return CommandOutput::input_error(format!(
                "cannot write report into {}: {e}",
                dir.display()
            ));
        }
    }

    let stdout = if args.json {
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("report serializes"))
    } else {
        colorize_summary(&markdown, &palette)
    };

    let clean = syntax_errors.is_empty()
        && run.results.iter().all(|r| r.verdict == Verdict::Pass)
        && warnings.is_empty()
        && violations.is_empty();
    CommandOutput { exit: if clean { exit::OK } else { exit::ISSUES }, stdout, stderr }
}

/// The report markdown doubles as the human summary; verdict words get
/// colored on terminals.
fn colorize_summary(markdown: &str, palette: &Palette) -> String {
    let mut out = String::with_capacity(markdown.len());
    for line in markdown.lines() {
        let colored = line
            .replace("| PASS |", &format!("| {} |", palette.good("PASS")))
            .replace("| FAIL |", &format!("| {} |", palette.bad("FAIL")))
            .replace("| ERROR |", &format!("| {} |", palette.bad("ERROR")))
            .replace("| DIVERGED |", &format!("| {} |", palette.warn("DIVERGED")));
        out.push_str(&colored);
        out.push('\n');
    }
    out
}

/// Run the suite on a worker thread so a diverging submission cannot hang
/// the caller past the wall-clock budget.
fn run_with_timeout(
    submission: &Program,
    tests: &TestFile,
    limits: prologian_core::engine::EngineLimits,
    trace: bool,
    timeout_secs: u64,
) -> Option<SuiteRun> {
    let (tx, rx) = mpsc::channel();
    let submission = submission.clone();
    let tests = tests.clone();
    std::thread::spawn(move || {
        let run = if trace {
            let mut sink = |ev: &prologian_core::engine::TraceEvent| eprintln!("{ev}");
            run_suite_traced(&submission, &tests, limits, Some(&mut sink))
        } else {
            run_suite_traced(&submission, &tests, limits, None)
        };
        let _ = tx.send(run);
    });
    rx.recv_timeout(Duration::from_secs(timeout_secs)).ok()
}
