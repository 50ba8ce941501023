//! Submission-history classification, structural program diffs, bug
//! taxonomy labeling and corpus statistics.

pub mod bugs;
pub mod corpus;
pub mod diff;
pub mod tree_diff;

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub use bugs::{classify_bug, AnalyticsError, BugLabel, BugSubtype, BugType};
pub use corpus::{load_corpus, LoadedCorpus};
pub use diff::{diff_programs, ClauseChange, PredicateChangeKind, PredicateDiff};
pub use tree_diff::{AtomicEdit, EditLoc};

/// One submission in a student's history for an assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmissionRecord {
    pub student: String,
    pub assignment: String,
    pub timestamp: u64,
    pub source: String,
    /// Ids of the tests this submission passes.
    pub pass_set: BTreeSet<String>,
    pub clause_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Progress {
    FirstSubmission,
    BugFixed,
    BugIntroduced,
    Mixed,
    NoChange,
}

impl Progress {
    pub fn label(&self) -> &'static str {
        match self {
            Progress::FirstSubmission => "First Submission",
            Progress::BugFixed => "Bug Fixed",
            Progress::BugIntroduced => "Bug Introduced",
            Progress::Mixed => "Mixed",
            Progress::NoChange => "No Change",
        }
    }

    pub const ALL: [Progress; 5] = [
        Progress::FirstSubmission,
        Progress::BugFixed,
        Progress::BugIntroduced,
        Progress::Mixed,
        Progress::NoChange,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryLabel {
    pub progress: Progress,
    /// True when the submission passes the full test set.
    pub correct: bool,
}

/// Compare consecutive pass-sets. Exactly one case applies to any pair:
/// strict superset, strict subset, equal, or incomparable changes in both
/// directions.
pub fn progress_between(prev: &BTreeSet<String>, cur: &BTreeSet<String>) -> Progress {
    if prev == cur {
        Progress::NoChange
    } else if cur.is_superset(prev) {
        Progress::BugFixed
    } else if cur.is_subset(prev) {
        Progress::BugIntroduced
    } else {
        Progress::Mixed
    }
}

/// Label a submission history. The first element is always
/// `FirstSubmission`. A later submission passing exactly the previous
/// pass-set is `NoChange`; otherwise "previously" counts every earlier
/// version: a submission that newly passes tests no earlier version
/// passed while dropping tests that used to pass is `Mixed`, pure gains
/// are `BugFixed`, pure losses `BugIntroduced`. When the history carries
/// no signal either way (e.g. regaining an earlier state), the plain
/// previous-version comparison decides.
pub fn classify_history(
    history: &[SubmissionRecord],
    full_set: &BTreeSet<String>,
) -> Result<Vec<HistoryLabel>, AnalyticsError> {
    if history.is_empty() {
        return Err(AnalyticsError::EmptyHistory);
    }
    debug_assert!(
        history.windows(2).all(|w| w[0].timestamp < w[1].timestamp),
        "history must be sorted by strictly increasing timestamp"
    );
    let mut labels = Vec::with_capacity(history.len());
    let mut ever_passed: BTreeSet<String> = BTreeSet::new();
    for (i, record) in history.iter().enumerate() {
        let cur = &record.pass_set;
        let progress = if i == 0 {
            Progress::FirstSubmission
        } else {
            let prev = &history[i - 1].pass_set;
            if cur == prev {
                Progress::NoChange
            } else {
                let gained_new = cur.difference(&ever_passed).next().is_some();
                let lost_old = ever_passed.difference(cur).next().is_some();
                match (gained_new, lost_old) {
                    (true, true) => Progress::Mixed,
                    (true, false) => Progress::BugFixed,
                    (false, true) => Progress::BugIntroduced,
                    (false, false) => progress_between(prev, cur),
                }
            }
        };
        labels.push(HistoryLabel { progress, correct: cur == full_set });
        ever_passed.extend(cur.iter().cloned());
    }
    Ok(labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentStats {
    pub assignment: String,
    pub correct: usize,
    pub incorrect: usize,
    pub total: usize,
    pub avg_clauses: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCount {
    pub progress: Progress,
    pub correct: bool,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsDoc {
    pub per_assignment: Vec<AssignmentStats>,
    /// Flow-style counts per (progress, correctness) over all records.
    pub categories: Vec<CategoryCount>,
    pub total_records: usize,
    pub total_correct: usize,
    pub total_incorrect: usize,
}

/// Group records into per-(assignment, student) histories, sorted by
/// timestamp.
pub fn group_histories(
    records: &[SubmissionRecord],
) -> BTreeMap<(String, String), Vec<&SubmissionRecord>> {
    let mut map: BTreeMap<(String, String), Vec<&SubmissionRecord>> = BTreeMap::new();
    for r in records {
        map.entry((r.assignment.clone(), r.student.clone())).or_default().push(r);
    }
    for history in map.values_mut() {
        history.sort_by_key(|r| r.timestamp);
    }
    map
}

/// Corpus-wide statistics: per-assignment correct/incorrect counts with
/// mean clause counts, plus category counts over all histories. Counts
/// are conserved: the categories sum to the number of records.
pub fn corpus_stats(
    records: &[SubmissionRecord],
    full_sets: &BTreeMap<String, BTreeSet<String>>,
) -> StatsDoc {
    let empty = BTreeSet::new();
    let mut per_assignment: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for r in records {
        let full = full_sets.get(&r.assignment).unwrap_or(&empty);
        let entry = per_assignment.entry(r.assignment.clone()).or_default();
        if &r.pass_set == full && !full.is_empty() {
            entry.0 += 1;
        } else {
            entry.1 += 1;
        }
        entry.2 += r.clause_count;
    }
    let per_assignment: Vec<AssignmentStats> = per_assignment
        .into_iter()
        .map(|(assignment, (correct, incorrect, clauses))| {
            let total = correct + incorrect;
            AssignmentStats {
                assignment,
                correct,
                incorrect,
                total,
                avg_clauses: if total == 0 { 0.0 } else { clauses as f64 / total as f64 },
            }
        })
        .collect();

    let mut category_map: BTreeMap<(Progress, bool), usize> = BTreeMap::new();
    for history in group_histories(records).values() {
        let owned: Vec<SubmissionRecord> = history.iter().map(|r| (*r).clone()).collect();
        let full = full_sets.get(&owned[0].assignment).unwrap_or(&empty);
        if let Ok(labels) = classify_history(&owned, full) {
            for label in labels {
                *category_map.entry((label.progress, label.correct)).or_default() += 1;
            }
        }
    }
    let mut categories = Vec::new();
    for progress in Progress::ALL {
        for correct in [true, false] {
            categories.push(CategoryCount {
                progress,
                correct,
                count: category_map.get(&(progress, correct)).copied().unwrap_or(0),
            });
        }
    }

    let total_correct = per_assignment.iter().map(|a| a.correct).sum();
    let total_incorrect = per_assignment.iter().map(|a| a.incorrect).sum();
    StatsDoc {
        per_assignment,
        categories,
        total_records: records.len(),
        total_correct,
        total_incorrect,
    }
}

/// Aligned-column text table over the per-assignment statistics.
pub fn render_stats_table(doc: &StatsDoc) -> String {
    let mut rows: Vec<[String; 5]> = vec![[
        "Assignment".into(),
        "Correct".into(),
        "Incorrect".into(),
        "Total".into(),
        "Avg. Clauses".into(),
    ]];
    for a in &doc.per_assignment {
        rows.push([
            a.assignment.clone(),
            a.correct.to_string(),
            a.incorrect.to_string(),
            a.total.to_string(),
            format!("{:.2}", a.avg_clauses),
        ]);
    }
    rows.push([
        "Total".into(),
        doc.total_correct.to_string(),
        doc.total_incorrect.to_string(),
        doc.total_records.to_string(),
        String::new(),
    ]);
    let widths: Vec<usize> = (0..5)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                line.push_str(&format!("{:<width$}", cell, width = widths[0]));
            } else {
                line.push_str(&format!("  {:>width$}", cell, width = widths[c]));
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if i == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}
