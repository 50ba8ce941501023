//! Structural expected-vs-actual diffs for failed assertions.

use crate::syntax::{term_to_string, Term, TermKind, CONS};

/// Where two terms first diverge: a trail of 1-based argument positions
/// into the expected term, with the mismatching subterms.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub path: Vec<usize>,
    pub expected_sub: Term,
    pub actual_sub: Term,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssertionDiff {
    pub expected: Term,
    /// `None` means the call produced no solution at all.
    pub actual: Option<Term>,
    pub divergence: Option<Divergence>,
}

impl AssertionDiff {
    /// No divergence found (identical terms).
    pub fn is_empty(&self) -> bool {
        self.actual.is_some() && self.divergence.is_none()
    }

    /// Human-readable description of the mismatch position, list-aware:
    /// walking into cons cells reports list indices rather than raw
    /// argument positions.
    pub fn path_description(&self) -> Option<String> {
        let div = self.divergence.as_ref()?;
        let mut segments = Vec::new();
        let mut cur = &self.expected;
        let mut i = 0;
        while i < div.path.len() {
            match &cur.kind {
                TermKind::Compound(f, args) if f == CONS && args.len() == 2 => {
                    // Count how far down the spine the path goes.
                    let mut index = 0usize;
                    while i < div.path.len() {
                        match (&cur.kind, div.path[i]) {
                            (TermKind::Compound(f, args), 2) if f == CONS && args.len() == 2 => {
                                index += 1;
                                cur = &args[1];
                                i += 1;
                            }
                            (TermKind::Compound(f, args), 1) if f == CONS && args.len() == 2 => {
                                segments.push(format!("list index {index}"));
                                cur = &args[0];
                                i += 1;
                                index = usize::MAX; // flag: descended into element
                                break;
                            }
                            _ => break,
                        }
                    }
                    if index != usize::MAX {
                        segments.push(format!("list tail after index {}", index.saturating_sub(1)));
                    }
                }
                TermKind::Compound(f, args) => {
                    let pos = div.path[i];
                    segments.push(format!("argument {pos} of {f}"));
                    cur = &args[pos - 1];
                    i += 1;
                }
                _ => break,
            }
        }
        if segments.is_empty() {
            None
        } else {
            Some(segments.join(", "))
        }
    }

    pub fn render(&self) -> String {
        let expected = term_to_string(&self.expected);
        match (&self.actual, &self.divergence) {
            (None, _) => format!("expected {expected}, but the goal produced no solution"),
            (Some(actual), None) => {
                format!("expected {expected}, got {} (no difference)", term_to_string(actual))
            }
            (Some(actual), Some(div)) => {
                let place = self
                    .path_description()
                    .map(|p| format!(" at {p}"))
                    .unwrap_or_default();
                format!(
                    "expected {expected}, got {}; first difference{place}: expected {}, actual {}",
                    term_to_string(actual),
                    term_to_string(&div.expected_sub),
                    term_to_string(&div.actual_sub),
                )
            }
        }
    }
}

/// Simultaneous structural walk reporting the first mismatching position.
/// Variables compare by name, which matches how the ground terms used in
/// assertions behave.
pub fn diff_outputs(expected: &Term, actual: &Term) -> AssertionDiff {
    let mut path = Vec::new();
    let divergence = walk(expected, actual, &mut path);
    AssertionDiff { expected: expected.clone(), actual: Some(actual.clone()), divergence }
}

fn walk(expected: &Term, actual: &Term, path: &mut Vec<usize>) -> Option<Divergence> {
    let mismatch = |path: &[usize]| {
        Some(Divergence {
            path: path.to_vec(),
            expected_sub: expected.clone(),
            actual_sub: actual.clone(),
        })
    };
    match (&expected.kind, &actual.kind) {
        (TermKind::Atom(a), TermKind::Atom(b)) if a == b => None,
        (TermKind::Int(a), TermKind::Int(b)) if a == b => None,
        (TermKind::Float(a), TermKind::Float(b)) if a == b => None,
        (TermKind::Var(a, _), TermKind::Var(b, _)) if a == b => None,
        (TermKind::Compound(f, fa), TermKind::Compound(g, ga)) => {
            if f != g || fa.len() != ga.len() {
                return mismatch(path);
            }
            for (i, (x, y)) in fa.iter().zip(ga).enumerate() {
                path.push(i + 1);
                if let Some(d) = walk(x, y, path) {
                    return Some(d);
                }
                path.pop();
            }
            None
        }
        _ => mismatch(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_query;

    fn term(src: &str) -> Term {
        parse_query(src).unwrap()
    }

    #[test]
    fn identical_terms_have_empty_diff() {
        let d = diff_outputs(&term("f(a, [1, 2])"), &term("f(a, [1, 2])"));
        assert!(d.is_empty());
    }

    #[test]
    fn truncated_list_reports_tail_divergence() {
        let d = diff_outputs(&term("[2, 4, 6]"), &term("[2, 4]"));
        let div = d.divergence.as_ref().unwrap();
        assert_eq!(div.path, vec![2, 2]);
        assert_eq!(crate::syntax::term_to_string(&div.expected_sub), "[6]");
        assert_eq!(crate::syntax::term_to_string(&div.actual_sub), "[]");
        assert_eq!(d.path_description().unwrap(), "list tail after index 1");
    }

    #[test]
    fn argument_mismatch_reports_position() {
        let d = diff_outputs(&term("f(a, b)"), &term("f(a, c)"));
        let div = d.divergence.as_ref().unwrap();
        assert_eq!(div.path, vec![2]);
        assert!(d.path_description().unwrap().contains("argument 2 of f"));
        assert!(d.render().contains("expected b, actual c"));
    }

    #[test]
    fn list_element_mismatch_uses_list_index() {
        let d = diff_outputs(&term("[1, 2, 3]"), &term("[1, 9, 3]"));
        assert_eq!(d.path_description().unwrap(), "list index 1");
    }

    #[test]
    fn divergence_path_addresses_real_subterm() {
        let expected = term("f([a, g(b)], h(c))");
        let actual = term("f([a, g(x)], h(c))");
        let d = diff_outputs(&expected, &actual);
        let div = d.divergence.unwrap();
        let mut cur = &expected;
        for pos in &div.path {
            cur = &cur.args()[pos - 1];
        }
        assert!(cur.source_eq(&div.expected_sub));
    }
}
