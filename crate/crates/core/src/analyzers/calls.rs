//! Syntactic call-site extraction from clause bodies.

use crate::syntax::{PredId, SourceSpan, Term, TermKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallSite {
    pub callee: PredId,
    pub span: SourceSpan,
    /// Routed through call/N, maplist or foldl (partial application).
    pub higher_order: bool,
}

/// Collect every syntactic call site in a goal, traversing control
/// constructs. Targets in meta-argument position get their arity adjusted
/// by the number of appended arguments.
pub(crate) fn goal_call_sites(goal: &Term, out: &mut Vec<CallSite>) {
    match &goal.kind {
        TermKind::Compound(f, args) => match (f.as_str(), args.len()) {
            (",", 2) | (";", 2) | ("->", 2) => {
                goal_call_sites(&args[0], out);
                goal_call_sites(&args[1], out);
            }
            ("\\+", 1) => goal_call_sites(&args[0], out),
            ("findall", 3) => meta_site(&args[1], 0, goal.span, out),
            ("call", n) if n >= 1 => meta_site(&args[0], n - 1, goal.span, out),
            ("maplist", n @ 2..=4) | ("foldl", n @ 4..=6) => {
                meta_site(&args[0], n - 1, goal.span, out)
            }
            (_, n) => out.push(CallSite {
                callee: PredId::new(f.clone(), n),
                span: goal.span,
                higher_order: false,
            }),
        },
        TermKind::Atom(a) => {
            out.push(CallSite { callee: PredId::new(a.clone(), 0), span: goal.span, higher_order: false })
        }
        // Variable or numeric goals have no static callee.
        _ => {}
    }
}

/// A goal in meta-argument position, called with `appended` extra
/// arguments.
fn meta_site(target: &Term, appended: usize, _span: SourceSpan, out: &mut Vec<CallSite>) {
    if appended == 0 {
        // call/1 and findall/3 route a goal through unchanged. Control
        // constructs inside are traversed as usual; a direct target is a
        // higher-order use.
        match target.functor() {
            Some((",", 2)) | Some((";", 2)) | Some(("->", 2)) | Some(("\\+", 1)) => {
                goal_call_sites(target, out)
            }
            Some((name, arity)) => out.push(CallSite {
                callee: PredId::new(name, arity),
                span: target.span,
                higher_order: true,
            }),
            None => {}
        }
        return;
    }
    match &target.kind {
        TermKind::Atom(a) => out.push(CallSite {
            callee: PredId::new(a.clone(), appended),
            span: target.span,
            higher_order: true,
        }),
        TermKind::Compound(f, args) => out.push(CallSite {
            callee: PredId::new(f.clone(), args.len() + appended),
            span: target.span,
            higher_order: true,
        }),
        // Unbound meta target: nothing statically known.
        _ => {}
    }
}

/// All predicates a goal sequence calls, in call-site order.
pub(crate) fn body_call_sites(body: &[Term]) -> Vec<CallSite> {
    let mut out = Vec::new();
    for goal in body {
        goal_call_sites(goal, &mut out);
    }
    out
}
