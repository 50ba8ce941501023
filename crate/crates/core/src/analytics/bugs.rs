//! Rule-based bug labeling of old-to-new (buggy-to-fixed) program diffs.
//!
//! Each atomic edit gets at most one label from the most specific
//! matching rule; a clause with more than three atomic edits (or a full
//! rewrite) falls back to Other, upgraded to Domain Logic Problem when at
//! least two clauses of a predicate were rewritten under an unchanged
//! head.

use super::diff::{ClauseChange, PredicateChangeKind, PredicateDiff};
use super::tree_diff::{AtomicEdit, EditLoc};
use crate::analyzers::levenshtein;
use crate::syntax::{parser::is_operator_functor, Clause, PredId, Program, SourceSpan, Term, TermKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BugType {
    Incomplete,
    WrongArgument,
    RuleGoalProblems,
    OperatorError,
    WrongPredicateName,
    DomainLogicProblem,
    CutProblem,
    WrongVariableConstant,
    Other,
}

impl BugType {
    pub fn label(&self) -> &'static str {
        match self {
            BugType::Incomplete => "Incomplete",
            BugType::WrongArgument => "Wrong Argument",
            BugType::RuleGoalProblems => "Rule Goal Problems",
            BugType::OperatorError => "Operator Error",
            BugType::WrongPredicateName => "Wrong Predicate Name",
            BugType::DomainLogicProblem => "Domain Logic Problem",
            BugType::CutProblem => "Cut Problem",
            BugType::WrongVariableConstant => "Wrong Variable/Constant",
            BugType::Other => "Other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BugSubtype {
    MissingPredicate,
    MissingClause,
    ArgumentOrderSwap,
    MissingArgument,
    ExtraArgument,
    ExtraGoal,
    MissingGoal,
    GoalOrderSwap,
    WrongOperator,
    ListTerminatorsIssue,
    MissingNegation,
    MissingCut,
    ExtraCut,
    WrongPlacement,
    WrongVariableName,
    WrongConstant,
    OtherSubtype,
}

impl BugSubtype {
    pub fn label(&self) -> &'static str {
        match self {
            BugSubtype::MissingPredicate => "Missing Predicate",
            BugSubtype::MissingClause => "Missing Clause",
            BugSubtype::ArgumentOrderSwap => "Argument Order Swap",
            BugSubtype::MissingArgument => "Missing Argument",
            BugSubtype::ExtraArgument => "Extra Argument",
            BugSubtype::ExtraGoal => "Extra Goal",
            BugSubtype::MissingGoal => "Missing Goal",
            BugSubtype::GoalOrderSwap => "Goal Order Swap",
            BugSubtype::WrongOperator => "Wrong Operator",
            BugSubtype::ListTerminatorsIssue => "List Terminators Issue",
            BugSubtype::MissingNegation => "Missing Negation",
            BugSubtype::MissingCut => "Missing Cut",
            BugSubtype::ExtraCut => "Extra Cut",
            BugSubtype::WrongPlacement => "Wrong Placement",
            BugSubtype::WrongVariableName => "Wrong Variable Name",
            BugSubtype::WrongConstant => "Wrong Constant",
            BugSubtype::OtherSubtype => "Other",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BugLabel {
    pub bug_type: BugType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subtype: Option<BugSubtype>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<SourceSpan>,
}

impl BugLabel {
    pub fn render(&self) -> String {
        match self.subtype {
            Some(sub) => format!("{} / {}", self.bug_type.label(), sub.label()),
            None => self.bug_type.label().to_string(),
        }
    }

    /// Is the subtype one the taxonomy defines for this type?
    pub fn is_legal(&self) -> bool {
        use BugSubtype::*;
        matches!(
            (self.bug_type, self.subtype),
            (BugType::Incomplete, Some(MissingPredicate | MissingClause))
                | (
                    BugType::WrongArgument,
                    Some(ArgumentOrderSwap | MissingArgument | ExtraArgument | OtherSubtype),
                )
                | (BugType::RuleGoalProblems, Some(ExtraGoal | MissingGoal | GoalOrderSwap))
                | (
                    BugType::OperatorError,
                    Some(WrongOperator | ListTerminatorsIssue | MissingNegation),
                )
                | (BugType::CutProblem, Some(MissingCut | ExtraCut | WrongPlacement))
                | (BugType::WrongVariableConstant, Some(WrongVariableName | WrongConstant))
                | (BugType::WrongPredicateName | BugType::DomainLogicProblem, None)
                | (BugType::Other, Some(OtherSubtype) | None)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("the two programs are identical; nothing to classify")]
    EmptyDiff,
    #[error("submission history is empty")]
    EmptyHistory,
}

struct Labels {
    map: BTreeMap<(BugType, Option<BugSubtype>), Option<SourceSpan>>,
}

impl Labels {
    fn new() -> Self {
        Labels { map: BTreeMap::new() }
    }

    fn add(&mut self, bug_type: BugType, subtype: Option<BugSubtype>, evidence: Option<SourceSpan>) {
        debug_assert!(
            (BugLabel { bug_type, subtype, evidence: None }).is_legal(),
            "illegal taxonomy pair {bug_type:?}/{subtype:?}"
        );
        self.map.entry((bug_type, subtype)).or_insert(evidence);
    }

    fn into_vec(self) -> Vec<BugLabel> {
        self.map
            .into_iter()
            .map(|((bug_type, subtype), evidence)| BugLabel { bug_type, subtype, evidence })
            .collect()
    }
}

fn is_cut(goal: &Term) -> bool {
    goal.is_atom("!")
}

fn is_negation(goal: &Term) -> bool {
    matches!(goal.functor(), Some(("\\+", 1)))
}

/// Leaves of a term with list structure (cons cells and nil) stripped,
/// rendered for multiset comparison.
fn non_list_leaves(term: &Term, out: &mut Vec<String>) {
    match &term.kind {
        TermKind::Compound(f, args) if f == "." && args.len() == 2 => {
            for a in args {
                non_list_leaves(a, out);
            }
        }
        TermKind::Atom(a) if a == "[]" => {}
        TermKind::Compound(_, args) => {
            out.push(crate::syntax::term_to_string(term));
            let _ = args;
        }
        TermKind::Var(name, _) => out.push(name.clone()),
        _ => out.push(crate::syntax::term_to_string(term)),
    }
}

/// `[X|Xs]` vs `[X,Xs]`-style confusion: the same leaves arranged in a
/// different cons/nil skeleton.
fn is_list_terminator_change(old: &Term, new: &Term) -> bool {
    let involves_list = |t: &Term| {
        let mut found = false;
        t.walk(&mut |sub| {
            if sub.is_nil() || matches!(sub.functor(), Some((".", 2))) {
                found = true;
            }
        });
        found
    };
    if !involves_list(old) && !involves_list(new) {
        return false;
    }
    let mut old_leaves = Vec::new();
    let mut new_leaves = Vec::new();
    non_list_leaves(old, &mut old_leaves);
    non_list_leaves(new, &mut new_leaves);
    if old_leaves.is_empty() {
        return false;
    }
    old_leaves.sort();
    new_leaves.sort();
    old_leaves == new_leaves
}

fn is_constant(t: &Term) -> bool {
    matches!(t.kind, TermKind::Atom(_) | TermKind::Int(_) | TermKind::Float(_))
}

/// How often a variable name occurs in a clause.
fn var_occurrences(clause: &Clause, name: &str) -> usize {
    let mut count = 0;
    let mut visit = |t: &Term| {
        if let TermKind::Var(n, _) = &t.kind {
            if n == name {
                count += 1;
            }
        }
    };
    clause.head.walk(&mut visit);
    for goal in &clause.body {
        goal.walk(&mut visit);
    }
    count
}

fn classify_replace(old_term: &Term, new_term: &Term, old_clause: &Clause, labels: &mut Labels) {
    let evidence = Some(new_term.span);
    if is_list_terminator_change(old_term, new_term) {
        labels.add(BugType::OperatorError, Some(BugSubtype::ListTerminatorsIssue), evidence);
        return;
    }
    match (&old_term.kind, &new_term.kind) {
        (TermKind::Var(old_name, _), TermKind::Var(..)) => {
            // A variable that also occurs elsewhere in the clause carried
            // data; replacing it rewires an argument rather than fixing a
            // name.
            if var_occurrences(old_clause, old_name) >= 2 {
                labels.add(BugType::WrongArgument, Some(BugSubtype::OtherSubtype), evidence);
            } else {
                labels.add(
                    BugType::WrongVariableConstant,
                    Some(BugSubtype::WrongVariableName),
                    evidence,
                );
            }
        }
        _ if is_constant(old_term) && is_constant(new_term) => {
            labels.add(BugType::WrongVariableConstant, Some(BugSubtype::WrongConstant), evidence);
        }
        _ => labels.add(BugType::WrongArgument, Some(BugSubtype::OtherSubtype), evidence),
    }
}

fn classify_clause_edits(old: &Clause, new: &Clause, edits: &[AtomicEdit], labels: &mut Labels) {
    // Pair inserted goals with removed ones to spot moves.
    let mut inserted: Vec<(usize, &Term)> = Vec::new();
    let mut removed: Vec<(usize, &Term)> = Vec::new();
    for (i, edit) in edits.iter().enumerate() {
        match edit {
            AtomicEdit::GoalInserted { goal, .. } => inserted.push((i, goal)),
            AtomicEdit::GoalRemoved { goal, .. } => removed.push((i, goal)),
            _ => {}
        }
    }
    let mut moved: Vec<usize> = Vec::new();
    for (ii, ig) in &inserted {
        if let Some(pos) = removed.iter().position(|(_, rg)| rg.source_eq(ig)) {
            let (ri, _) = removed.remove(pos);
            moved.push(*ii);
            moved.push(ri);
            if is_cut(ig) {
                labels.add(BugType::CutProblem, Some(BugSubtype::WrongPlacement), Some(ig.span));
            } else {
                labels.add(BugType::RuleGoalProblems, Some(BugSubtype::GoalOrderSwap), Some(ig.span));
            }
        }
    }

    for (i, edit) in edits.iter().enumerate() {
        if moved.contains(&i) {
            continue;
        }
        match edit {
            AtomicEdit::GoalInserted { goal, .. } => {
                if is_cut(goal) {
                    labels.add(BugType::CutProblem, Some(BugSubtype::MissingCut), Some(goal.span));
                } else if is_negation(goal) {
                    labels.add(
                        BugType::OperatorError,
                        Some(BugSubtype::MissingNegation),
                        Some(goal.span),
                    );
                } else {
                    labels.add(
                        BugType::RuleGoalProblems,
                        Some(BugSubtype::MissingGoal),
                        Some(goal.span),
                    );
                }
            }
            AtomicEdit::GoalRemoved { goal, .. } => {
                if is_cut(goal) {
                    labels.add(BugType::CutProblem, Some(BugSubtype::ExtraCut), Some(goal.span));
                } else {
                    labels.add(
                        BugType::RuleGoalProblems,
                        Some(BugSubtype::ExtraGoal),
                        Some(goal.span),
                    );
                }
            }
            AtomicEdit::GoalsReordered { perm, goals } => {
                let cut_moved = goals
                    .iter()
                    .enumerate()
                    .any(|(i, g)| is_cut(g) && perm.get(i) != Some(&i));
                if cut_moved {
                    labels.add(BugType::CutProblem, Some(BugSubtype::WrongPlacement), None);
                } else {
                    labels.add(BugType::RuleGoalProblems, Some(BugSubtype::GoalOrderSwap), None);
                }
            }
            AtomicEdit::FunctorRenamed { old: o, new: n, .. } => {
                if is_operator_functor(o) && is_operator_functor(n) {
                    labels.add(BugType::OperatorError, Some(BugSubtype::WrongOperator), None);
                } else {
                    labels.add(BugType::WrongPredicateName, None, None);
                }
            }
            AtomicEdit::ArgsPermuted { .. } => {
                labels.add(BugType::WrongArgument, Some(BugSubtype::ArgumentOrderSwap), None);
            }
            AtomicEdit::ArgInserted { arg, .. } => {
                labels.add(BugType::WrongArgument, Some(BugSubtype::MissingArgument), Some(arg.span));
            }
            AtomicEdit::ArgRemoved { arg, .. } => {
                labels.add(BugType::WrongArgument, Some(BugSubtype::ExtraArgument), Some(arg.span));
            }
            AtomicEdit::Replaced { loc, path, old: o, new: n } => {
                // A whole-goal replacement acts like remove+insert.
                if matches!(loc, EditLoc::Goal { .. }) && path.is_empty() {
                    labels.add(BugType::RuleGoalProblems, Some(BugSubtype::MissingGoal), Some(n.span));
                    labels.add(BugType::RuleGoalProblems, Some(BugSubtype::ExtraGoal), Some(o.span));
                } else {
                    classify_replace(o, n, old, labels);
                }
            }
        }
    }
    let _ = new;
}

/// Is this modification effectively a rewrite of the clause?
fn is_rewrite(old: &Clause, edits: &[AtomicEdit]) -> bool {
    if edits.len() > 3 {
        return true;
    }
    let removed = edits.iter().filter(|e| matches!(e, AtomicEdit::GoalRemoved { .. })).count();
    let inserted = edits.iter().filter(|e| matches!(e, AtomicEdit::GoalInserted { .. })).count();
    !old.body.is_empty() && removed == old.body.len() && inserted > 0
}

fn head_changed(edits: &[AtomicEdit]) -> bool {
    edits.iter().any(|e| {
        matches!(
            e,
            AtomicEdit::FunctorRenamed { loc: EditLoc::Head, .. }
                | AtomicEdit::ArgInserted { loc: EditLoc::Head, .. }
                | AtomicEdit::ArgRemoved { loc: EditLoc::Head, .. }
                | AtomicEdit::ArgsPermuted { loc: EditLoc::Head, .. }
                | AtomicEdit::Replaced { loc: EditLoc::Head, .. }
        )
    })
}

/// Call site of `pred` in clauses of other predicates, if any.
fn call_site_span(program: &Program, pred: &PredId) -> Option<SourceSpan> {
    for clause in &program.clauses {
        if clause.indicator() == *pred {
            continue;
        }
        for site in crate::analyzers::calls::body_call_sites(&clause.body) {
            if site.callee == *pred {
                return Some(site.span);
            }
        }
    }
    None
}

/// Classify a buggy-to-fixed diff into the bug taxonomy. Returns one or
/// more labels; a single submission may contain multiple bugs.
pub fn classify_bug(
    diffs: &[PredicateDiff],
    old: &Program,
    new: &Program,
) -> Result<Vec<BugLabel>, AnalyticsError> {
    if diffs.is_empty() {
        return Err(AnalyticsError::EmptyDiff);
    }
    let mut labels = Labels::new();

    // Pair added predicates with removed ones of the same arity whose
    // names are similar (the same threshold the suggestion engine uses):
    // those are renames of whole predicates.
    let added: Vec<&PredicateDiff> =
        diffs.iter().filter(|d| d.kind == PredicateChangeKind::Added).collect();
    let removed: Vec<&PredicateDiff> =
        diffs.iter().filter(|d| d.kind == PredicateChangeKind::Removed).collect();
    let mut consumed_removed: Vec<&PredId> = Vec::new();
    let mut consumed_added: Vec<&PredId> = Vec::new();
    for a in &added {
        let candidate = removed.iter().find(|r| {
            let longer =
                a.predicate.name.chars().count().max(r.predicate.name.chars().count());
            let threshold = 2usize.max(longer.div_ceil(2));
            r.predicate.arity == a.predicate.arity
                && !consumed_removed.contains(&&r.predicate)
                && levenshtein(&r.predicate.name, &a.predicate.name) <= threshold
        });
        if let Some(r) = candidate {
            consumed_removed.push(&r.predicate);
            consumed_added.push(&a.predicate);
            let evidence = new.clauses_for(&a.predicate).next().map(|c| c.head.span);
            labels.add(BugType::WrongPredicateName, None, evidence);
        }
    }

    for diff in diffs {
        match diff.kind {
            PredicateChangeKind::Added => {
                if consumed_added.contains(&&diff.predicate) {
                    continue;
                }
                // The whole predicate was missing from the buggy version;
                // point at a call site when one exists (checking the old
                // version first, where the call dangled), else the new
                // definition.
                let evidence = call_site_span(old, &diff.predicate)
                    .or_else(|| call_site_span(new, &diff.predicate))
                    .or_else(|| new.clauses_for(&diff.predicate).next().map(|c| c.head.span));
                labels.add(BugType::Incomplete, Some(BugSubtype::MissingPredicate), evidence);
            }
            PredicateChangeKind::Removed => {
                if consumed_removed.contains(&&diff.predicate) {
                    continue;
                }
                let evidence = old.clauses_for(&diff.predicate).next().map(|c| c.span);
                labels.add(BugType::Other, Some(BugSubtype::OtherSubtype), evidence);
            }
            PredicateChangeKind::Modified => {
                let mut rewritten_with_same_head = 0usize;
                for change in &diff.clause_changes {
                    match change {
                        ClauseChange::Added(clause) => {
                            labels.add(
                                BugType::Incomplete,
                                Some(BugSubtype::MissingClause),
                                Some(clause.span),
                            );
                        }
                        ClauseChange::Removed(_) => {
                            labels.add(BugType::Other, Some(BugSubtype::OtherSubtype), None);
                        }
                        ClauseChange::Modified { old: oc, new: nc, edits } => {
                            if is_rewrite(oc, edits) {
                                if !head_changed(edits) {
                                    rewritten_with_same_head += 1;
                                } else {
                                    labels.add(BugType::Other, Some(BugSubtype::OtherSubtype), Some(nc.span));
                                }
                            } else {
                                classify_clause_edits(oc, nc, edits, &mut labels);
                            }
                        }
                    }
                }
                if rewritten_with_same_head >= 2 {
                    labels.add(BugType::DomainLogicProblem, None, None);
                } else if rewritten_with_same_head == 1 {
                    labels.add(BugType::Other, Some(BugSubtype::OtherSubtype), None);
                }
            }
        }
    }
    Ok(labels.into_vec())
}
