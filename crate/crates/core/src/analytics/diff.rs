//! Predicate-level structural diff between two versions of a program.

use super::tree_diff::{clause_edit_script, match_clauses, AtomicEdit, ClausePairing};
use crate::analyzers::levenshtein;
use crate::syntax::{Clause, PredId, Program};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateChangeKind {
    Added,
    Removed,
    Modified,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClauseChange {
    Added(Clause),
    Removed(Clause),
    Modified { old: Clause, new: Clause, edits: Vec<AtomicEdit> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateDiff {
    pub predicate: PredId,
    pub kind: PredicateChangeKind,
    pub clause_changes: Vec<ClauseChange>,
}

impl PredicateDiff {
    pub fn summary(&self) -> String {
        let verb = match self.kind {
            PredicateChangeKind::Added => "added",
            PredicateChangeKind::Removed => "removed",
            PredicateChangeKind::Modified => "modified",
        };
        let mut parts = Vec::new();
        let added = self.clause_changes.iter().filter(|c| matches!(c, ClauseChange::Added(_))).count();
        let removed =
            self.clause_changes.iter().filter(|c| matches!(c, ClauseChange::Removed(_))).count();
        let modified =
            self.clause_changes.iter().filter(|c| matches!(c, ClauseChange::Modified { .. })).count();
        if added > 0 {
            parts.push(format!("{added} clause(s) added"));
        }
        if removed > 0 {
            parts.push(format!("{removed} clause(s) removed"));
        }
        if modified > 0 {
            parts.push(format!("{modified} clause(s) modified"));
        }
        if parts.is_empty() {
            format!("{} {verb}", self.predicate)
        } else {
            format!("{} {verb}: {}", self.predicate, parts.join(", "))
        }
    }
}

fn diff_matched_predicate(
    pred: &PredId,
    old: &Program,
    new: &Program,
    new_name: Option<&PredId>,
) -> Option<PredicateDiff> {
    let old_clauses: Vec<&Clause> = old.clauses_for(pred).collect();
    let target = new_name.unwrap_or(pred);
    let new_clauses: Vec<&Clause> = new.clauses_for(target).collect();
    let mut changes = Vec::new();
    for pairing in match_clauses(&old_clauses, &new_clauses) {
        match pairing {
            ClausePairing::Matched(i, j) => {
                let (cost, edits) = clause_edit_script(old_clauses[i], new_clauses[j]);
                if cost > 0 {
                    changes.push(ClauseChange::Modified {
                        old: old_clauses[i].clone(),
                        new: new_clauses[j].clone(),
                        edits,
                    });
                }
            }
            ClausePairing::RemovedOld(i) => changes.push(ClauseChange::Removed(old_clauses[i].clone())),
            ClausePairing::AddedNew(j) => changes.push(ClauseChange::Added(new_clauses[j].clone())),
        }
    }
    if changes.is_empty() {
        return None;
    }
    Some(PredicateDiff {
        predicate: target.clone(),
        kind: PredicateChangeKind::Modified,
        clause_changes: changes,
    })
}

/// Diff two programs by predicate. Predicates are matched by (name,
/// arity); an unmatched removed/added pair with the same arity and a name
/// within two edits is treated as a rename and diffed clause-by-clause
/// (the head rename shows up in the edit script).
pub fn diff_programs(old: &Program, new: &Program) -> Vec<PredicateDiff> {
    let old_preds: BTreeSet<PredId> = old.predicates().cloned().collect();
    let new_preds: BTreeSet<PredId> = new.predicates().cloned().collect();

    let mut diffs = Vec::new();
    let mut removed: Vec<PredId> = old_preds.difference(&new_preds).cloned().collect();
    let mut added: Vec<PredId> = new_preds.difference(&old_preds).cloned().collect();

    for pred in old_preds.intersection(&new_preds) {
        if let Some(diff) = diff_matched_predicate(pred, old, new, None) {
            diffs.push(diff);
        }
    }

    // Rename detection.
    let mut renamed_pairs: Vec<(PredId, PredId)> = Vec::new();
    added.retain(|a| {
        let candidate = removed
            .iter()
            .filter(|r| r.arity == a.arity)
            .map(|r| (levenshtein(&r.name, &a.name), r.clone()))
            .filter(|(d, _)| *d <= 2)
            .min_by(|(d1, r1), (d2, r2)| d1.cmp(d2).then_with(|| r1.cmp(r2)));
        match candidate {
            Some((_, from)) => {
                removed.retain(|r| *r != from);
                renamed_pairs.push((from, a.clone()));
                false
            }
            None => true,
        }
    });
    for (from, to) in renamed_pairs {
        if let Some(diff) = diff_matched_predicate(&from, old, new, Some(&to)) {
            diffs.push(diff);
        }
    }

    for pred in removed {
        diffs.push(PredicateDiff {
            predicate: pred.clone(),
            kind: PredicateChangeKind::Removed,
            clause_changes: old.clauses_for(&pred).map(|c| ClauseChange::Removed(c.clone())).collect(),
        });
    }
    for pred in added {
        diffs.push(PredicateDiff {
            predicate: pred.clone(),
            kind: PredicateChangeKind::Added,
            clause_changes: new.clauses_for(&pred).map(|c| ClauseChange::Added(c.clone())).collect(),
        });
    }
    diffs.sort_by(|a, b| a.predicate.cmp(&b.predicate));
    diffs
}
