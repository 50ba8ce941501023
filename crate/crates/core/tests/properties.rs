//! Property tests over generated terms and programs.

use prologian_core::analytics::diff_programs;
use prologian_core::engine::{unify, Bindings};
use prologian_core::harness::diff_outputs;
use prologian_core::syntax::{
    clause_to_string, parse_program, parse_query, term_to_string, SourceSpan, Term, TermKind,
};
use proptest::prelude::*;
use std::collections::HashMap;

fn sp() -> SourceSpan {
    SourceSpan::synthetic()
}

/// Arbitrary terms, biased toward the shapes student code uses: atoms,
/// integers, floats, variables, compounds and lists.
fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        4 => "[a-z][a-z0-9_]{0,5}".prop_map(|s| Term::atom(s, sp())),
        1 => "[ -~&&[^'\\\\]]{0,6}".prop_map(|s| Term::atom(s, sp())),
        3 => any::<i32>().prop_map(|v| Term::int(v as i64, sp())),
        1 => (-1000i64..1000, 1u32..6).prop_map(|(m, d)| Term::float(m as f64 / d as f64, sp())),
        3 => "[A-Z][a-z0-9]{0,3}".prop_map(|s| Term::var(s, 0, sp())),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            ("[a-z][a-z0-9_]{0,5}", prop::collection::vec(inner.clone(), 1..4))
                .prop_map(|(f, args)| Term::compound(f, args, sp())),
            prop::collection::vec(inner, 0..4).prop_map(|items| Term::list(items, sp())),
        ]
    })
}

/// Rebind variable ids consistently by name, so shared names unify as the
/// same variable.
fn index_vars(term: &Term, map: &mut HashMap<String, usize>) -> Term {
    match &term.kind {
        TermKind::Var(name, _) => {
            let next = map.len();
            let id = *map.entry(name.clone()).or_insert(next);
            Term::var(name.clone(), id, sp())
        }
        TermKind::Compound(f, args) => Term::compound(
            f.clone(),
            args.iter().map(|a| index_vars(a, map)).collect(),
            sp(),
        ),
        _ => term.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Pretty-printing then re-parsing reproduces the term structurally.
    #[test]
    fn print_parse_round_trip(term in term_strategy()) {
        let printed = term_to_string(&term);
        let reparsed = parse_query(&printed)
            .unwrap_or_else(|e| panic!("printed term does not parse: {printed}\n{e}"));
        prop_assert!(term.source_eq(&reparsed), "{printed} changed shape");
    }

    /// A successful unification makes both terms equal under the
    /// resulting substitution.
    #[test]
    fn unify_makes_terms_equal(a in term_strategy(), b in term_strategy()) {
        let mut map = HashMap::new();
        let a = index_vars(&a, &mut map);
        let b = index_vars(&b, &mut map);
        let mut bindings = Bindings::with_capacity_for(map.len() + 1);
        if unify(&a, &b, &mut bindings, true) {
            let ra = bindings.resolve(&a);
            let rb = bindings.resolve(&b);
            prop_assert!(ra.source_eq(&rb), "{} vs {}", term_to_string(&ra), term_to_string(&rb));
        }
    }

    /// Failed unifications leave the substitution untouched.
    #[test]
    fn failed_unify_leaves_no_bindings(a in term_strategy(), b in term_strategy()) {
        let mut map = HashMap::new();
        let a = index_vars(&a, &mut map);
        let b = index_vars(&b, &mut map);
        let mut bindings = Bindings::with_capacity_for(map.len() + 1);
        if !unify(&a, &b, &mut bindings, true) {
            for id in map.values() {
                prop_assert!(bindings.lookup(*id).is_none());
            }
        }
    }

    /// diff_outputs of a term against itself reports no divergence.
    #[test]
    fn self_diff_is_empty(term in term_strategy()) {
        prop_assert!(diff_outputs(&term, &term).is_empty());
    }

    /// A reported divergence path addresses a real subterm of expected.
    #[test]
    fn divergence_path_is_real(a in term_strategy(), b in term_strategy()) {
        let diff = diff_outputs(&a, &b);
        if let Some(div) = &diff.divergence {
            let mut cur = &a;
            for pos in &div.path {
                prop_assert!(*pos >= 1 && *pos <= cur.args().len());
                cur = &cur.args()[pos - 1];
            }
            prop_assert!(cur.source_eq(&div.expected_sub));
        }
    }
}

/// Small random programs: a few facts and rules over a fixed signature.
fn program_strategy() -> impl Strategy<Value = String> {
    let fact = ("[pqr]", 0i64..5).prop_map(|(name, c)| format!("{name}({c})."));
    let rule = ("[pqr]", "[pqr]", "[XY]").prop_map(|(h, b, v)| format!("{h}({v}) :- {b}({v})."));
    prop::collection::vec(prop_oneof![fact, rule], 1..6).prop_map(|clauses| clauses.join("\n"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// A program diffed against itself is always empty.
    #[test]
    fn self_program_diff_is_empty(src in program_strategy()) {
        let (program, errors) = parse_program(&src);
        prop_assert!(errors.is_empty());
        prop_assert!(diff_programs(&program, &program).is_empty(), "{src}");
    }

    /// Error recovery never drops a syntactically valid clause delimited
    /// by `.` at depth zero.
    #[test]
    fn recovery_keeps_valid_clauses(
        before in program_strategy(),
        after in program_strategy(),
        corrupt in prop::sample::select(vec!["p(a.", "42.", "X.", ")x.", "f(].", "g(a,)."]),
    ) {
        let (clean, errors) = parse_program(&format!("{before}\n{after}"));
        prop_assert!(errors.is_empty());
        let source = format!("{before}\n{corrupt}\n{after}");
        let (recovered, errors) = parse_program(&source);
        prop_assert!(!errors.is_empty(), "corrupt fragment must error: {source}");
        prop_assert_eq!(
            recovered.clauses.len(),
            clean.clauses.len(),
            "valid clauses dropped in: {}", source
        );
    }

    /// Pretty-printed clauses re-parse to the same clause.
    #[test]
    fn clause_round_trip(src in program_strategy()) {
        let (program, _) = parse_program(&src);
        for clause in &program.clauses {
            let printed = clause_to_string(clause);
            let (reparsed, errors) = parse_program(&printed);
            prop_assert!(errors.is_empty(), "{printed}");
            prop_assert!(reparsed.clauses[0].source_eq(clause), "{printed}");
        }
    }
}
