//! Minimal edit scripts between terms, goal sequences and clauses.
//!
//! Scripts are lists of atomic edits (replacements, argument
//! insertions/deletions, functor renames, goal insertions/deletions and
//! order swaps) with positions, in the old-to-new direction. Costs drive
//! the clause-matching assignment; the edits feed the bug classifier.

use crate::syntax::{Clause, Term, TermKind};
use std::collections::HashMap;

/// Where an edit happened inside a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditLoc {
    Head,
    /// Aligned goal pair (old position, new position), 0-based.
    Goal { old_index: usize, new_index: usize },
}

/// One atomic difference. Paths are 1-based argument trails; term-level
/// edits address positions in the old term (the new term for pure
/// insertions).
#[derive(Debug, Clone, PartialEq)]
pub enum AtomicEdit {
    GoalInserted { index: usize, goal: Term },
    GoalRemoved { index: usize, goal: Term },
    /// Both bodies hold the same goals, permuted: `perm[i]` is the old
    /// position of the goal now at position `i`.
    GoalsReordered { perm: Vec<usize>, goals: Vec<Term> },
    FunctorRenamed { loc: EditLoc, path: Vec<usize>, old: String, new: String },
    ArgInserted { loc: EditLoc, path: Vec<usize>, index: usize, arg: Term },
    ArgRemoved { loc: EditLoc, path: Vec<usize>, index: usize, arg: Term },
    /// Same functor and arity, arguments permuted.
    ArgsPermuted { loc: EditLoc, path: Vec<usize>, perm: Vec<usize> },
    Replaced { loc: EditLoc, path: Vec<usize>, old: Term, new: Term },
}

/// Edit cost between two terms, with the script appended to `out`.
pub(crate) fn term_edit_script(
    old: &Term,
    new: &Term,
    loc: EditLoc,
    path: &mut Vec<usize>,
    out: &mut Vec<AtomicEdit>,
) -> usize {
    if old.source_eq(new) {
        return 0;
    }
    match (&old.kind, &new.kind) {
        (TermKind::Compound(f, fa), TermKind::Compound(g, ga)) => {
            if fa.len() == ga.len() {
                // Pure argument permutation?
                if f == g && fa.len() >= 2 {
                    if let Some(perm) = permutation_of(fa, ga) {
                        out.push(AtomicEdit::ArgsPermuted { loc, path: path.clone(), perm });
                        return 1;
                    }
                }
                let mut cost = 0;
                if f != g {
                    out.push(AtomicEdit::FunctorRenamed {
                        loc,
                        path: path.clone(),
                        old: f.clone(),
                        new: g.clone(),
                    });
                    cost += 1;
                }
                for (i, (a, b)) in fa.iter().zip(ga).enumerate() {
                    path.push(i + 1);
                    cost += term_edit_script(a, b, loc, path, out);
                    path.pop();
                }
                cost
            } else if f == g {
                arg_alignment(fa, ga, loc, path, out)
            } else {
                out.push(AtomicEdit::Replaced {
                    loc,
                    path: path.clone(),
                    old: old.clone(),
                    new: new.clone(),
                });
                replace_cost(old, new)
            }
        }
        _ => {
            out.push(AtomicEdit::Replaced {
                loc,
                path: path.clone(),
                old: old.clone(),
                new: new.clone(),
            });
            replace_cost(old, new)
        }
    }
}

fn replace_cost(old: &Term, new: &Term) -> usize {
    // Leaf-for-leaf swaps cost one; structural replacements cost their
    // combined size.
    if old.args().is_empty() && new.args().is_empty() {
        1
    } else {
        old.size() + new.size()
    }
}

/// Greedy permutation finder handling duplicate arguments.
fn permutation_of(old: &[Term], new: &[Term]) -> Option<Vec<usize>> {
    let mut used = vec![false; old.len()];
    let mut perm = Vec::with_capacity(new.len());
    for n in new {
        let mut found = None;
        for (i, o) in old.iter().enumerate() {
            if !used[i] && o.source_eq(n) {
                found = Some(i);
                break;
            }
        }
        let i = found?;
        used[i] = true;
        perm.push(i);
    }
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        None // identity is not a permutation edit
    } else {
        Some(perm)
    }
}

/// Same functor, different arity: align the argument sequences.
fn arg_alignment(
    old: &[Term],
    new: &[Term],
    loc: EditLoc,
    path: &mut Vec<usize>,
    out: &mut Vec<AtomicEdit>,
) -> usize {
    let ops = align(old, new);
    let mut cost = 0;
    for op in ops {
        match op {
            AlignOp::Match(i, j) => {
                path.push(i + 1);
                cost += term_edit_script(&old[i], &new[j], loc, path, out);
                path.pop();
            }
            AlignOp::Delete(i) => {
                out.push(AtomicEdit::ArgRemoved {
                    loc,
                    path: path.clone(),
                    index: i + 1,
                    arg: old[i].clone(),
                });
                cost += old[i].size();
            }
            AlignOp::Insert(j) => {
                out.push(AtomicEdit::ArgInserted {
                    loc,
                    path: path.clone(),
                    index: j + 1,
                    arg: new[j].clone(),
                });
                cost += new[j].size();
            }
        }
    }
    cost
}

#[derive(Debug, Clone, Copy)]
enum AlignOp {
    Match(usize, usize),
    Delete(usize),
    Insert(usize),
}

/// Sequence alignment minimizing total edit cost, with deterministic
/// tie-breaking (match preferred, then delete).
fn align(old: &[Term], new: &[Term]) -> Vec<AlignOp> {
    let (n, m) = (old.len(), new.len());
    let mut cost = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            cost[i][j] = match (i == n, j == m) {
                (true, true) => 0,
                (true, false) => new[j].size() + cost[i][j + 1],
                (false, true) => old[i].size() + cost[i + 1][j],
                (false, false) => {
                    let mtc = pair_cost(&old[i], &new[j]) + cost[i + 1][j + 1];
                    let del = old[i].size() + cost[i + 1][j];
                    let ins = new[j].size() + cost[i][j + 1];
                    mtc.min(del).min(ins)
                }
            };
        }
    }
    let mut ops = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m {
            let mtc = pair_cost(&old[i], &new[j]) + cost[i + 1][j + 1];
            if mtc == cost[i][j] {
                ops.push(AlignOp::Match(i, j));
                i += 1;
                j += 1;
                continue;
            }
        }
        if i < n && old[i].size() + cost[i + 1][j] == cost[i][j] {
            ops.push(AlignOp::Delete(i));
            i += 1;
            continue;
        }
        ops.push(AlignOp::Insert(j));
        j += 1;
    }
    ops
}

fn pair_cost(old: &Term, new: &Term) -> usize {
    let mut scratch = Vec::new();
    let mut path = Vec::new();
    term_edit_script(old, new, EditLoc::Head, &mut path, &mut scratch)
}

/// Edit script between two goal sequences (clause bodies).
pub(crate) fn body_edit_script(old: &[Term], new: &[Term], out: &mut Vec<AtomicEdit>) -> usize {
    if old.len() == new.len() && old.iter().zip(new).all(|(a, b)| a.source_eq(b)) {
        return 0;
    }
    // Same goals in a different order: one conceptual edit.
    if old.len() == new.len() {
        if let Some(perm) = permutation_of(old, new) {
            out.push(AtomicEdit::GoalsReordered { perm, goals: new.to_vec() });
            return 1;
        }
    }
    let ops = align(old, new);
    let mut cost = 0;
    for op in ops {
        match op {
            AlignOp::Match(i, j) => {
                let mut path = Vec::new();
                cost += term_edit_script(
                    &old[i],
                    &new[j],
                    EditLoc::Goal { old_index: i, new_index: j },
                    &mut path,
                    out,
                );
            }
            AlignOp::Delete(i) => {
                out.push(AtomicEdit::GoalRemoved { index: i, goal: old[i].clone() });
                cost += old[i].size();
            }
            AlignOp::Insert(j) => {
                out.push(AtomicEdit::GoalInserted { index: j, goal: new[j].clone() });
                cost += new[j].size();
            }
        }
    }
    cost
}

/// Edit script between two whole clauses.
pub(crate) fn clause_edit_script(old: &Clause, new: &Clause) -> (usize, Vec<AtomicEdit>) {
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut cost = term_edit_script(&old.head, &new.head, EditLoc::Head, &mut path, &mut out);
    cost += body_edit_script(&old.body, &new.body, &mut out);
    (cost, out)
}

pub(crate) fn clause_size(clause: &Clause) -> usize {
    clause.head.size() + clause.body.iter().map(Term::size).sum::<usize>()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum ClausePairing {
    Matched(usize, usize),
    RemovedOld(usize),
    AddedNew(usize),
}

/// Minimal-cost assignment between old and new clauses of one predicate.
/// Unmatched clauses cost their size; ties prefer earlier (source-order)
/// matches. Exact bitmask search up to 12 clauses on the smaller side,
/// greedy beyond that.
pub(crate) fn match_clauses(old: &[&Clause], new: &[&Clause]) -> Vec<ClausePairing> {
    if new.len() <= 12 {
        exact_match(old, new)
    } else {
        greedy_match(old, new)
    }
}

fn exact_match(old: &[&Clause], new: &[&Clause]) -> Vec<ClausePairing> {
    let n = old.len();
    let m = new.len();
    let costs: Vec<Vec<usize>> = old
        .iter()
        .map(|o| new.iter().map(|w| clause_edit_script(o, w).0).collect())
        .collect();
    let new_sizes: Vec<usize> = new.iter().map(|c| clause_size(c)).collect();
    let old_sizes: Vec<usize> = old.iter().map(|c| clause_size(c)).collect();

    // best(i, mask) = minimal cost for old[i..] with `mask` of new already
    // taken; unmatched new clauses are charged at the end.
    let mut memo: HashMap<(usize, u32), (usize, Option<usize>)> = HashMap::new();
    #[allow(clippy::too_many_arguments)]
    fn solve(
        i: usize,
        mask: u32,
        n: usize,
        m: usize,
        costs: &[Vec<usize>],
        old_sizes: &[usize],
        new_sizes: &[usize],
        memo: &mut HashMap<(usize, u32), (usize, Option<usize>)>,
    ) -> usize {
        if i == n {
            return (0..m).filter(|j| mask & (1 << j) == 0).map(|j| new_sizes[j]).sum();
        }
        if let Some(&(c, _)) = memo.get(&(i, mask)) {
            return c;
        }
        let mut best = old_sizes[i]
            + solve(i + 1, mask, n, m, costs, old_sizes, new_sizes, memo);
        let mut choice: Option<usize> = None;
        for j in 0..m {
            if mask & (1 << j) != 0 {
                continue;
            }
            let c = costs[i][j]
                + solve(i + 1, mask | (1 << j), n, m, costs, old_sizes, new_sizes, memo);
            if c < best {
                best = c;
                choice = Some(j);
            }
        }
        memo.insert((i, mask), (best, choice));
        best
    }
    solve(0, 0, n, m, &costs, &old_sizes, &new_sizes, &mut memo);

    let mut pairings = Vec::new();
    let mut mask = 0u32;
    for i in 0..n {
        // Recompute the choice recorded for this state.
        solve(i, mask, n, m, &costs, &old_sizes, &new_sizes, &mut memo);
        match memo.get(&(i, mask)).and_then(|&(_, c)| c) {
            Some(j) => {
                pairings.push(ClausePairing::Matched(i, j));
                mask |= 1 << j;
            }
            None => pairings.push(ClausePairing::RemovedOld(i)),
        }
    }
    for j in 0..m {
        if mask & (1 << j) == 0 {
            pairings.push(ClausePairing::AddedNew(j));
        }
    }
    pairings
}

fn greedy_match(old: &[&Clause], new: &[&Clause]) -> Vec<ClausePairing> {
    let mut used = vec![false; new.len()];
    let mut pairings = Vec::new();
    for (i, o) in old.iter().enumerate() {
        let mut best: Option<(usize, usize)> = None;
        for (j, w) in new.iter().enumerate() {
            if used[j] {
                continue;
            }
            let cost = clause_edit_script(o, w).0;
            if best.map(|(_, c)| cost < c).unwrap_or(true) {
                best = Some((j, cost));
            }
        }
        match best {
            Some((j, cost)) if cost < clause_size(o) + clause_size(new[j]) => {
                used[j] = true;
                pairings.push(ClausePairing::Matched(i, j));
            }
            _ => pairings.push(ClausePairing::RemovedOld(i)),
        }
    }
    for (j, u) in used.iter().enumerate() {
        if !u {
            pairings.push(ClausePairing::AddedNew(j));
        }
    }
    pairings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn clause(src: &str) -> Clause {
        let (p, errs) = parse_program(src);
        assert!(errs.is_empty(), "{errs:?}");
        p.clauses[0].clone()
    }

    #[test]
    fn identical_clauses_have_zero_cost() {
        let c = clause("mult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L2).");
        let (cost, edits) = clause_edit_script(&c, &c);
        assert_eq!(cost, 0);
        assert!(edits.is_empty());
    }

    #[test]
    fn variable_swap_is_a_leaf_replace() {
        let old = clause("mult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L1).");
        let new = clause("mult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L2).");
        let (cost, edits) = clause_edit_script(&old, &new);
        assert_eq!(cost, 1);
        assert_eq!(edits.len(), 1);
        match &edits[0] {
            AtomicEdit::Replaced { loc: EditLoc::Goal { old_index: 1, .. }, path, old, new } => {
                assert_eq!(path, &vec![3]);
                assert!(old.is_var() && new.is_var());
            }
            other => panic!("unexpected edit {other:?}"),
        }
    }

    #[test]
    fn operator_change_is_a_functor_rename() {
        let old = clause("m([E | L], N, [F | M]) :- F = E * N, m(L, N, M).");
        let new = clause("m([E | L], N, [F | M]) :- F is E * N, m(L, N, M).");
        let (cost, edits) = clause_edit_script(&old, &new);
        assert_eq!(cost, 1);
        assert!(matches!(
            &edits[0],
            AtomicEdit::FunctorRenamed { old, new, .. } if old == "=" && new == "is"
        ));
    }

    #[test]
    fn goal_insertion_detected() {
        let old = clause("m([E | L], N, [F | M]) :- F is E * N.");
        let new = clause("m([E | L], N, [F | M]) :- F is E * N, m(L, N, M).");
        let (_, edits) = clause_edit_script(&old, &new);
        assert_eq!(edits.len(), 1);
        assert!(matches!(
            &edits[0],
            AtomicEdit::GoalInserted { index: 1, goal } if goal.functor() == Some(("m", 3))
        ));
    }

    #[test]
    fn goal_reorder_is_one_edit() {
        let old = clause("p(X) :- a(X), b(X).");
        let new = clause("p(X) :- b(X), a(X).");
        let (cost, edits) = clause_edit_script(&old, &new);
        assert_eq!(cost, 1);
        assert!(matches!(&edits[0], AtomicEdit::GoalsReordered { perm, .. } if perm == &vec![1, 0]));
    }

    #[test]
    fn argument_permutation_detected() {
        let old = clause("p :- q(X, Y, Z).");
        let new = clause("p :- q(Y, X, Z).");
        let (cost, edits) = clause_edit_script(&old, &new);
        assert_eq!(cost, 1);
        assert!(matches!(&edits[0], AtomicEdit::ArgsPermuted { perm, .. } if perm == &vec![1, 0, 2]));
    }

    #[test]
    fn arity_change_yields_arg_insertion() {
        let old = clause("p :- q(X, Z).");
        let new = clause("p :- q(X, Y, Z).");
        let (_, edits) = clause_edit_script(&old, &new);
        let inserted: Vec<_> =
            edits.iter().filter(|e| matches!(e, AtomicEdit::ArgInserted { .. })).collect();
        assert_eq!(inserted.len(), 1);
    }

    #[test]
    fn clause_matching_prefers_identity() {
        let a1 = clause("mult([], _, []).");
        let a2 = clause("mult([E | L], N, [F | M]) :- F is E * N, mult(L, N, M).");
        let new2 = clause("mult([E | L], N, [F | M]) :- F is E * N, mult(L, N, M).");
        let new0 = clause("mult([], _, []).");
        let pairings = match_clauses(&[&a1, &a2], &[&new0, &new2]);
        assert_eq!(
            pairings,
            vec![ClausePairing::Matched(0, 0), ClausePairing::Matched(1, 1)]
        );
    }

    #[test]
    fn added_clause_is_unmatched() {
        let rec = clause("mult([E | L], N, [F | M]) :- F is E * N, mult(L, N, M).");
        let base = clause("mult([], _, []).");
        let rec2 = clause("mult([E | L], N, [F | M]) :- F is E * N, mult(L, N, M).");
        let pairings = match_clauses(&[&rec], &[&base, &rec2]);
        assert!(pairings.contains(&ClausePairing::Matched(0, 1)));
        assert!(pairings.contains(&ClausePairing::AddedNew(0)));
    }
}
