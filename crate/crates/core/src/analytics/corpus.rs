//! Corpus loading from the on-disk layout
//! `<corpus>/<assignment>/<student>/<unix-timestamp>.pl`, with one
//! `tests.plt` (or `tests.pl`) per assignment.

use super::SubmissionRecord;
use crate::engine::EngineLimits;
use crate::harness::{parse_test_file, run_suite, TestFile};
use crate::syntax::parse_program;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("assignment `{0}` has no tests.plt")]
    MissingTests(String),
    #[error("test file {path} has errors: {summary}")]
    TestFile { path: PathBuf, summary: String },
    #[error("submission filename {0} is not a unix timestamp")]
    BadTimestamp(PathBuf),
    #[error("no assignments found under {0}")]
    Empty(PathBuf),
}

#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub records: Vec<SubmissionRecord>,
    /// Full test-id set per assignment.
    pub full_sets: BTreeMap<String, BTreeSet<String>>,
}

fn read_dir_sorted(path: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| CorpusError::Io { path: path.to_path_buf(), source: e })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    Ok(entries)
}

fn load_tests(assignment_dir: &Path, assignment: &str) -> Result<TestFile, CorpusError> {
    for name in ["tests.plt", "tests.pl"] {
        let path = assignment_dir.join(name);
        if path.is_file() {
            let source = fs::read_to_string(&path)
                .map_err(|e| CorpusError::Io { path: path.clone(), source: e })?;
            return parse_test_file(&source).map_err(|errs| CorpusError::TestFile {
                path,
                summary: errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
            });
        }
    }
    Err(CorpusError::MissingTests(assignment.to_string()))
}

/// Load every submission in the corpus, computing pass-sets by running
/// each assignment's tests. Submissions with syntax errors keep their
/// cleanly-parsed clauses. Iteration order is sorted (assignment,
/// student, timestamp), so results are deterministic.
pub fn load_corpus(dir: &Path, limits: EngineLimits) -> Result<LoadedCorpus, CorpusError> {
    let mut records = Vec::new();
    let mut full_sets = BTreeMap::new();
    let mut found_assignment = false;
    for assignment_dir in read_dir_sorted(dir)? {
        if !assignment_dir.is_dir() {
            continue;
        }
        found_assignment = true;
        let assignment = assignment_dir
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .to_string();
        let tests = load_tests(&assignment_dir, &assignment)?;
        full_sets.insert(assignment.clone(), tests.test_ids());
        for student_dir in read_dir_sorted(&assignment_dir)? {
            if !student_dir.is_dir() {
                continue;
            }
            let student = student_dir
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_string();
            for file in read_dir_sorted(&student_dir)? {
                if file.extension().and_then(|e| e.to_str()) != Some("pl") {
                    continue;
                }
                let timestamp: u64 = file
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| CorpusError::BadTimestamp(file.clone()))?;
                let source = fs::read_to_string(&file)
                    .map_err(|e| CorpusError::Io { path: file.clone(), source: e })?;
                let (program, _errors) = parse_program(&source);
                let run = run_suite(&program, &tests, limits);
                records.push(SubmissionRecord {
                    student: student.clone(),
                    assignment: assignment.clone(),
                    timestamp,
                    clause_count: program.clause_count(),
                    pass_set: run.pass_set(),
                    source,
                });
            }
        }
    }
    if !found_assignment {
        return Err(CorpusError::Empty(dir.to_path_buf()));
    }
    records.sort_by(|a, b| {
        (&a.assignment, &a.student, a.timestamp).cmp(&(&b.assignment, &b.student, b.timestamp))
    });
    Ok(LoadedCorpus { records, full_sets })
}
