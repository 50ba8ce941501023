//! Static and dynamic analyses behind the non-test feedback: call graphs,
//! solution-type validation, unknown-name suggestions and warning
//! synthesis.

pub(crate) mod calls;
pub mod suggest;

use crate::harness::{TestResult, Verdict};
use crate::syntax::{PredId, Program, SourceSpan};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub use calls::CallSite;
pub use suggest::{levenshtein, suggest_predicates, Suggestion};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallEdge {
    pub caller: PredId,
    pub callee: PredId,
    pub span: SourceSpan,
    /// Routed through call/N, maplist or foldl.
    pub higher_order: bool,
}

/// Caller/callee relation over a program, one edge per syntactic call
/// site. Built-in and library callees are kept as nodes but are never
/// expanded (their definitions are not part of the program).
#[derive(Debug, Clone, Default)]
pub struct CallGraph {
    pub nodes: BTreeSet<PredId>,
    pub user_defined: BTreeSet<PredId>,
    pub builtins: BTreeSet<PredId>,
    pub edges: Vec<CallEdge>,
}

impl CallGraph {
    pub fn edges_from<'g>(&'g self, pred: &PredId) -> impl Iterator<Item = &'g CallEdge> {
        let pred = pred.clone();
        self.edges.iter().filter(move |e| e.caller == pred)
    }

    /// User-defined predicates reachable from `pred` through one or more
    /// edges.
    pub fn reachable_from(&self, pred: &PredId) -> BTreeSet<PredId> {
        let mut seen = BTreeSet::new();
        let mut work: Vec<PredId> = self
            .edges_from(pred)
            .filter(|e| self.user_defined.contains(&e.callee))
            .map(|e| e.callee.clone())
            .collect();
        while let Some(p) = work.pop() {
            if !seen.insert(p.clone()) {
                continue;
            }
            for e in self.edges_from(&p) {
                if self.user_defined.contains(&e.callee) && !seen.contains(&e.callee) {
                    work.push(e.callee.clone());
                }
            }
        }
        seen
    }
}

pub fn build_call_graph(program: &Program) -> CallGraph {
    let mut graph = CallGraph::default();
    for pred in program.predicates() {
        graph.user_defined.insert(pred.clone());
        graph.nodes.insert(pred.clone());
    }
    for clause in &program.clauses {
        let caller = clause.indicator();
        for site in calls::body_call_sites(&clause.body) {
            if !graph.user_defined.contains(&site.callee) {
                if crate::engine::is_builtin_pred(&site.callee) {
                    graph.builtins.insert(site.callee.clone());
                }
                graph.nodes.insert(site.callee.clone());
            }
            graph.edges.push(CallEdge {
                caller: caller.clone(),
                callee: site.callee,
                span: site.span,
                higher_order: site.higher_order,
            });
        }
    }
    graph
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionType {
    Recursive,
    NonRecursive,
    HigherOrder,
}

impl std::fmt::Display for SolutionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolutionType::Recursive => write!(f, "recursive"),
            SolutionType::NonRecursive => write!(f, "non-recursive"),
            SolutionType::HigherOrder => write!(f, "higher-order"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTypeVerdict {
    pub predicate: PredId,
    pub verdict: SolutionType,
    /// Self-call sites (recursive) or meta-call sites (higher-order).
    pub evidence: Vec<SourceSpan>,
    /// Higher-order call sites, kept even when the verdict is Recursive.
    pub higher_order_evidence: Vec<SourceSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyzerError {
    #[error("predicate {0} is not defined in the program")]
    UnknownPredicate(PredId),
}

/// Classify how a predicate is implemented: `Recursive` when it lies on a
/// call-graph cycle (possibly through helpers), `HigherOrder` when its
/// clauses route goals through meta predicates, otherwise `NonRecursive`.
/// Both can co-occur; recursion wins and the higher-order evidence rides
/// along.
pub fn classify_solution_type(
    graph: &CallGraph,
    pred: &PredId,
) -> Result<SolutionTypeVerdict, AnalyzerError> {
    if !graph.user_defined.contains(pred) {
        return Err(AnalyzerError::UnknownPredicate(pred.clone()));
    }
    let higher_order_evidence: Vec<SourceSpan> =
        graph.edges_from(pred).filter(|e| e.higher_order).map(|e| e.span).collect();
    let on_cycle = graph.reachable_from(pred).contains(pred);
    if on_cycle {
        // Evidence: call sites in this predicate that lead back to it.
        let mut evidence = Vec::new();
        for edge in graph.edges_from(pred) {
            if !graph.user_defined.contains(&edge.callee) {
                continue;
            }
            if edge.callee == *pred || graph.reachable_from(&edge.callee).contains(pred) {
                evidence.push(edge.span);
            }
        }
        return Ok(SolutionTypeVerdict {
            predicate: pred.clone(),
            verdict: SolutionType::Recursive,
            evidence,
            higher_order_evidence,
        });
    }
    if !higher_order_evidence.is_empty() {
        return Ok(SolutionTypeVerdict {
            predicate: pred.clone(),
            verdict: SolutionType::HigherOrder,
            evidence: higher_order_evidence.clone(),
            higher_order_evidence,
        });
    }
    Ok(SolutionTypeVerdict {
        predicate: pred.clone(),
        verdict: SolutionType::NonRecursive,
        evidence: Vec::new(),
        higher_order_evidence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequiredTechnique {
    Recursive,
    HigherOrder,
}

impl std::fmt::Display for RequiredTechnique {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RequiredTechnique::Recursive => write!(f, "recursion"),
            RequiredTechnique::HigherOrder => write!(f, "higher-order predicates"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TechniqueViolation {
    pub predicate: PredId,
    pub required: RequiredTechnique,
    pub message: String,
}

/// Check spec-required techniques against the computed verdicts. A
/// predicate missing from `verdicts` (not defined in the submission) is
/// reported too, since the requirement cannot hold.
pub fn check_required_technique(
    verdicts: &[SolutionTypeVerdict],
    required: &[(PredId, RequiredTechnique)],
) -> Vec<TechniqueViolation> {
    let by_pred: BTreeMap<&PredId, &SolutionTypeVerdict> =
        verdicts.iter().map(|v| (&v.predicate, v)).collect();
    let mut out = Vec::new();
    for (pred, req) in required {
        let Some(verdict) = by_pred.get(pred) else {
            out.push(TechniqueViolation {
                predicate: pred.clone(),
                required: *req,
                message: format!("{pred} must use {req}, but it is not defined"),
            });
            continue;
        };
        match req {
            RequiredTechnique::Recursive => {
                if verdict.verdict == SolutionType::NonRecursive {
                    out.push(TechniqueViolation {
                        predicate: pred.clone(),
                        required: *req,
                        message: format!(
                            "{pred} must use recursion, but no recursive call was found"
                        ),
                    });
                }
            }
            RequiredTechnique::HigherOrder => {
                if verdict.higher_order_evidence.is_empty() {
                    out.push(TechniqueViolation {
                        predicate: pred.clone(),
                        required: *req,
                        message: format!(
                            "{pred} must use higher-order predicates, but none were found"
                        ),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    Divergence,
    OpenChoicePoint,
    UnknownPredicate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub kind: WarningKind,
    /// Test id or predicate indicator the warning is about.
    pub subject: String,
    pub message: String,
    pub suggestion: Option<Suggestion>,
}

/// Turn test results and recorded unknown calls into the student-facing
/// warning list: deduplicated by (kind, subject) and deterministically
/// ordered. Warnings are informational and never affect verdicts or
/// scores.
pub fn synthesize_warnings(
    results: &[TestResult],
    unknowns: &[crate::engine::UnknownCall],
    defined: &BTreeSet<PredId>,
) -> Vec<Warning> {
    let mut map: BTreeMap<(WarningKind, String), Warning> = BTreeMap::new();
    for result in results {
        if result.open_choice_warning {
            let subject = result.case.id();
            let mut message = format!(
                "test {subject} succeeded with an open choice point; \
                 backtracking may produce further answers"
            );
            if let Some(second) = &result.second_solution {
                message.push_str(&format!(" (next answer: {second})"));
            }
            map.entry((WarningKind::OpenChoicePoint, subject.clone())).or_insert(Warning {
                kind: WarningKind::OpenChoicePoint,
                subject,
                message,
                suggestion: None,
            });
        }
        if result.verdict == Verdict::Diverged {
            let subject = result.case.id();
            let culprit = result
                .diverged_in
                .as_ref()
                .map(|p| format!(" in {p}"))
                .unwrap_or_default();
            let message = format!(
                "test {subject} exceeded the execution limits; possible infinite loop{culprit}"
            );
            map.entry((WarningKind::Divergence, subject.clone())).or_insert(Warning {
                kind: WarningKind::Divergence,
                subject,
                message,
                suggestion: None,
            });
        }
    }
    for unknown in unknowns {
        let subject = unknown.pred.to_string();
        let suggestion = suggest_predicates(&unknown.pred, defined);
        let message = if suggestion.is_empty() {
            format!("unknown predicate {subject}")
        } else {
            format!("unknown predicate {subject}; {}", suggestion.render())
        };
        map.entry((WarningKind::UnknownPredicate, subject.clone())).or_insert(Warning {
            kind: WarningKind::UnknownPredicate,
            subject,
            message,
            suggestion: Some(suggestion),
        });
    }
    map.into_values().collect()
}
