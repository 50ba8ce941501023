//! `prologian history`, `classify-bug` and `stats`: corpus analytics.

use crate::{exit, ClassifyBugArgs, CommandOutput, HistoryArgs, StatsArgs};
use prologian_core::analytics::{
    classify_bug, classify_history, corpus_stats, diff_programs, group_histories, load_corpus,
    render_stats_table, PredicateChangeKind, Progress, SubmissionRecord,
};
use prologian_core::engine::EngineLimits;
use prologian_core::syntax::{parse_program, render_errors};
use serde_json::json;
use std::collections::BTreeMap;

pub fn history(args: &HistoryArgs) -> CommandOutput {
    let corpus = match load_corpus(&args.corpus, EngineLimits::default()) {
        Ok(c) => c,
        Err(e) => return CommandOutput::input_error(e.to_string()),
    };
    let Some(full_set) = corpus.full_sets.get(&args.assignment) else {
        return CommandOutput::input_error(format!(
            "assignment `{}` not found under {}",
            args.assignment,
            args.corpus.display()
        ));
    };
    let records: Vec<SubmissionRecord> = corpus
        .records
        .iter()
        .filter(|r| r.assignment == args.assignment)
        .cloned()
        .collect();
    if records.is_empty() {
        return CommandOutput::input_error(format!(
            "assignment `{}` has no submissions",
            args.assignment
        ));
    }

    let mut students = Vec::new();
    let mut totals: BTreeMap<(Progress, bool), usize> = BTreeMap::new();
    for ((_, student), history) in group_histories(&records) {
        let owned: Vec<SubmissionRecord> = history.iter().map(|r| (*r).clone()).collect();
        let labels = classify_history(&owned, full_set).expect("history is non-empty");
        for label in &labels {
            *totals.entry((label.progress, label.correct)).or_default() += 1;
        }
        students.push((student, owned, labels));
    }

    if args.json {
        let students_json: Vec<_> = students
            .iter()
            .map(|(student, history, labels)| {
                let submissions: Vec<_> = history
                    .iter()
                    .zip(labels)
                    .map(|(r, l)| {
                        json!({
                            "timestamp": r.timestamp,
                            "progress": l.progress,
                            "correct": l.correct,
                            "tests_passed": r.pass_set.len(),
                            "tests_total": full_set.len(),
                        })
                    })
                    .collect();
                json!({ "student": student, "submissions": submissions })
            })
            .collect();
        let categories: Vec<_> = totals
            .iter()
            .map(|((p, c), n)| json!({ "progress": p, "correct": c, "count": n }))
            .collect();
        let doc = json!({
            "assignment": args.assignment,
            "students": students_json,
            "categories": categories,
        });
        return CommandOutput {
            exit: exit::OK,
            stdout: format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
            stderr: String::new(),
        };
    }

    let mut out = format!("Assignment {}\n", args.assignment);
    for (student, history, labels) in &students {
        out.push_str(&format!("  {student}\n"));
        for (r, l) in history.iter().zip(labels) {
            out.push_str(&format!(
                "    {}  {:<16}  {:<9}  {}/{} tests\n",
                r.timestamp,
                l.progress.label(),
                if l.correct { "correct" } else { "incorrect" },
                r.pass_set.len(),
                full_set.len()
            ));
        }
    }
    out.push_str("Totals:\n");
    for ((progress, correct), count) in &totals {
        out.push_str(&format!(
            "  {:<16} {:<9} {count}\n",
            progress.label(),
            if *correct { "correct" } else { "incorrect" }
        ));
    }
    CommandOutput { exit: exit::OK, stdout: out, stderr: String::new() }
}

pub fn classify_bug_cmd(args: &ClassifyBugArgs) -> CommandOutput {
    let old_src = match std::fs::read_to_string(&args.old) {
        Ok(s) => s,
        Err(e) => {
            return CommandOutput::input_error(format!("cannot read {}: {e}", args.old.display()))
        }
    };
    let new_src = match std::fs::read_to_string(&args.new) {
        Ok(s) => s,
        Err(e) => {
            return CommandOutput::input_error(format!("cannot read {}: {e}", args.new.display()))
        }
    };
    let (old, old_errors) = parse_program(&old_src);
    if !old_errors.is_empty() {
        return CommandOutput::input_error(format!(
            "{} has syntax errors:\n{}",
            args.old.display(),
            render_errors(&old_src, &old_errors)
        ));
    }
    let (new, new_errors) = parse_program(&new_src);
    if !new_errors.is_empty() {
        return CommandOutput::input_error(format!(
            "{} has syntax errors:\n{}",
            args.new.display(),
            render_errors(&new_src, &new_errors)
        ));
    }

    let diffs = diff_programs(&old, &new);
    if diffs.is_empty() {
        let stdout = if args.json {
            format!("{}\n", json!({ "diffs": [], "labels": [] }))
        } else {
            "programs are identical\n".to_string()
        };
        return CommandOutput { exit: exit::OK, stdout, stderr: String::new() };
    }
    let labels = classify_bug(&diffs, &old, &new).expect("non-empty diff classifies");

    if args.json {
        let diffs_json: Vec<_> = diffs
            .iter()
            .map(|d| {
                json!({
                    "predicate": d.predicate.to_string(),
                    "kind": match d.kind {
                        PredicateChangeKind::Added => "added",
                        PredicateChangeKind::Removed => "removed",
                        PredicateChangeKind::Modified => "modified",
                    },
                    "summary": d.summary(),
                })
            })
            .collect();
        let labels_json: Vec<_> = labels
            .iter()
            .map(|l| {
                json!({
                    "bug_type": l.bug_type,
                    "subtype": l.subtype,
                    "label": l.render(),
                })
            })
            .collect();
        let doc = json!({ "diffs": diffs_json, "labels": labels_json });
        return CommandOutput {
            exit: exit::OK,
            stdout: format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
            stderr: String::new(),
        };
    }

    let mut out = String::from("Changes:\n");
    for d in &diffs {
        out.push_str(&format!("  {}\n", d.summary()));
    }
    out.push_str("Bug labels:\n");
    for l in &labels {
        out.push_str(&format!("  {}\n", l.render()));
    }
    CommandOutput { exit: exit::OK, stdout: out, stderr: String::new() }
}

pub fn stats(args: &StatsArgs) -> CommandOutput {
    let corpus = match load_corpus(&args.corpus, EngineLimits::default()) {
        Ok(c) => c,
        Err(e) => return CommandOutput::input_error(e.to_string()),
    };
    let doc = corpus_stats(&corpus.records, &corpus.full_sets);
    let stdout = if args.json {
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("stats serialize"))
    } else {
        let mut out = render_stats_table(&doc);
        out.push_str("\nSubmission categories:\n");
        for c in &doc.categories {
            out.push_str(&format!(
                "  {:<16} {:<9} {}\n",
                c.progress.label(),
                if c.correct { "correct" } else { "incorrect" },
                c.count
            ));
        }
        out
    };
    CommandOutput { exit: exit::OK, stdout, stderr: String::new() }
}
