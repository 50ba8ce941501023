//! Assignment specifications, all-or-nothing predicate scoring and
//! scorecards.

pub mod leaderboard;
pub mod report;

use crate::analyzers::RequiredTechnique;
use crate::engine::EngineLimits;
use crate::harness::TestResult;
use crate::syntax::PredId;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub use leaderboard::{
    load_board, save_board, update_board_file, update_leaderboard, BoardError, LeaderboardEntry,
};
pub use report::{render_report, ReportDoc, ReportInputs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateSpec {
    pub name: String,
    pub arity: usize,
    /// Awarded in full when every test of the suite passes, else zero.
    pub points: u64,
    /// Test suite attributed to this predicate.
    pub suite: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_technique: Option<RequiredTechnique>,
}

impl PredicateSpec {
    pub fn pred_id(&self) -> PredId {
        PredId::new(self.name.clone(), self.arity)
    }
}

fn default_reveal_bodies() -> bool {
    true
}

/// Faculty-provided configuration for one assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSpec {
    pub assignment_id: String,
    #[serde(default = "default_reveal_bodies")]
    pub reveal_bodies: bool,
    #[serde(default)]
    pub limits: EngineLimits,
    pub predicates: Vec<PredicateSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("invalid assignment spec: {0}")]
    InvalidSpec(String),
    #[error("suite `{0}` from the assignment spec has no tests")]
    MissingSuite(String),
}

impl AssignmentSpec {
    pub fn from_json(json: &str) -> Result<Self, ScoreError> {
        let spec: AssignmentSpec =
            serde_json::from_str(json).map_err(|e| ScoreError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ScoreError> {
        if self.assignment_id.is_empty() {
            return Err(ScoreError::InvalidSpec("assignment_id must not be empty".into()));
        }
        if self.limits.max_steps == 0 || self.limits.max_solutions == 0 || self.limits.max_depth == 0
        {
            return Err(ScoreError::InvalidSpec("limits must all be positive".into()));
        }
        let mut seen = BTreeSet::new();
        for p in &self.predicates {
            if !seen.insert((p.name.clone(), p.arity)) {
                return Err(ScoreError::InvalidSpec(format!(
                    "duplicate predicate entry {}/{}",
                    p.name, p.arity
                )));
            }
        }
        Ok(())
    }

    pub fn required_techniques(&self) -> Vec<(PredId, RequiredTechnique)> {
        self.predicates
            .iter()
            .filter_map(|p| p.required_technique.map(|t| (p.pred_id(), t)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateScore {
    pub name: String,
    pub arity: usize,
    pub suite: String,
    pub tests_passed: usize,
    pub tests_total: usize,
    pub points_awarded: u64,
    pub points_possible: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scorecard {
    pub assignment_id: String,
    pub per_predicate: Vec<PredicateScore>,
    pub total_points: u64,
    pub possible_points: u64,
    pub tests_passed: usize,
    pub tests_total: usize,
    pub warnings: usize,
    pub timestamp: u64,
}

/// Apply the all-or-nothing rule: a predicate's points are awarded iff
/// every test in its suite passes. Tests not attributed to any spec
/// predicate still count toward the totals, for zero points.
///
/// A spec predicate whose suite has no tests is rejected: it would award
/// points vacuously.
pub fn score_submission(
    results: &[TestResult],
    spec: &AssignmentSpec,
    warnings: usize,
    timestamp: u64,
) -> Result<Scorecard, ScoreError> {
    spec.validate()?;
    let mut per_predicate = Vec::new();
    let mut total_points = 0u64;
    let mut possible_points = 0u64;
    for pred in &spec.predicates {
        let suite_results: Vec<&TestResult> =
            results.iter().filter(|r| r.case.suite == pred.suite).collect();
        if suite_results.is_empty() {
            return Err(ScoreError::MissingSuite(pred.suite.clone()));
        }
        let tests_total = suite_results.len();
        let tests_passed = suite_results.iter().filter(|r| r.passed()).count();
        let points_awarded = if tests_passed == tests_total { pred.points } else { 0 };
        total_points += points_awarded;
        possible_points += pred.points;
        per_predicate.push(PredicateScore {
            name: pred.name.clone(),
            arity: pred.arity,
            suite: pred.suite.clone(),
            tests_passed,
            tests_total,
            points_awarded,
            points_possible: pred.points,
        });
    }
    Ok(Scorecard {
        assignment_id: spec.assignment_id.clone(),
        per_predicate,
        total_points,
        possible_points,
        tests_passed: results.iter().filter(|r| r.passed()).count(),
        tests_total: results.len(),
        warnings,
        timestamp,
    })
}
