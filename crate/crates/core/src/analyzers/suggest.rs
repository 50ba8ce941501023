//! Name suggestions for unknown predicates, based on edit distance.

use crate::syntax::PredId;
use std::collections::BTreeSet;

/// Plain Levenshtein distance (insertions, deletions, substitutions),
/// computed over characters with a rolling row.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Similar-name candidates for an unknown predicate, ranked by
/// (distance, name, arity) and capped at three.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Suggestion {
    pub unknown: PredId,
    /// `(candidate, distance)` sorted best-first.
    pub candidates: Vec<(PredId, usize)>,
}

impl Suggestion {
    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// `did you mean ...?` fragment, empty when there are no candidates.
    pub fn render(&self) -> String {
        if self.candidates.is_empty() {
            return String::new();
        }
        let names: Vec<String> = self.candidates.iter().map(|(p, _)| p.to_string()).collect();
        format!("did you mean {}?", names.join(" or "))
    }
}

/// A candidate qualifies when its name is within `max(2, ceil(len/2))`
/// edits of the unknown name, and either the arity matches or the name is
/// off by at most one edit.
pub fn suggest_predicates(unknown: &PredId, defined: &BTreeSet<PredId>) -> Suggestion {
    let len = unknown.name.chars().count();
    let threshold = 2usize.max(len.div_ceil(2));
    let mut candidates: Vec<(PredId, usize)> = defined
        .iter()
        .filter(|cand| *cand != unknown)
        .filter_map(|cand| {
            let dist = levenshtein(&unknown.name, &cand.name);
            let arity_ok = cand.arity == unknown.arity || dist <= 1;
            (dist <= threshold && arity_ok).then(|| (cand.clone(), dist))
        })
        .collect();
    candidates.sort_by(|(a, da), (b, db)| {
        da.cmp(db).then_with(|| a.name.cmp(&b.name)).then_with(|| a.arity.cmp(&b.arity))
    });
    candidates.truncate(3);
    Suggestion { unknown: unknown.clone(), candidates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn defined(preds: &[(&str, usize)]) -> BTreeSet<PredId> {
        preds.iter().map(|(n, a)| PredId::new(*n, *a)).collect()
    }

    #[test]
    fn multiply_suggests_mult() {
        let s = suggest_predicates(&PredId::new("multiply", 3), &defined(&[("mult", 3), ("append", 3)]));
        assert_eq!(s.candidates, vec![(PredId::new("mult", 3), 4)]);
    }

    #[test]
    fn lenght_suggests_length() {
        let s = suggest_predicates(&PredId::new("lenght", 2), &defined(&[("length", 2), ("last", 2)]));
        assert_eq!(s.candidates, vec![(PredId::new("length", 2), 2)]);
    }

    #[test]
    fn distant_names_are_not_suggested() {
        let s = suggest_predicates(&PredId::new("foo", 1), &defined(&[("bar", 2)]));
        assert!(s.is_empty());
    }

    #[test]
    fn arity_mismatch_requires_distance_one() {
        // Same name, different arity: distance 0 passes the dist<=1 rule.
        let s = suggest_predicates(&PredId::new("add", 2), &defined(&[("add", 3)]));
        assert_eq!(s.candidates, vec![(PredId::new("add", 3), 0)]);
        // Two edits away with a different arity: rejected.
        let s = suggest_predicates(&PredId::new("add", 2), &defined(&[("adXY", 3)]));
        assert!(s.is_empty());
    }

    #[test]
    fn ranking_and_cap() {
        let s = suggest_predicates(
            &PredId::new("sum", 2),
            &defined(&[("sun", 2), ("sem", 2), ("su", 2), ("um", 2), ("sum", 3)]),
        );
        assert!(s.candidates.len() <= 3);
        assert_eq!(s.candidates[0].0, PredId::new("sum", 3));
        let dists: Vec<usize> = s.candidates.iter().map(|(_, d)| *d).collect();
        let mut sorted = dists.clone();
        sorted.sort_unstable();
        assert_eq!(dists, sorted);
    }

    /// Reference implementation: the naive exponential recursion.
    fn lev_slow(a: &[char], b: &[char]) -> usize {
        match (a.split_first(), b.split_first()) {
            (None, _) => b.len(),
            (_, None) => a.len(),
            (Some((ca, ra)), Some((cb, rb))) => {
                if ca == cb {
                    lev_slow(ra, rb)
                } else {
                    1 + lev_slow(ra, b).min(lev_slow(a, rb)).min(lev_slow(ra, rb))
                }
            }
        }
    }

    proptest! {
        #[test]
        fn matches_bruteforce_on_short_strings(a in "[a-c]{0,6}", b in "[a-c]{0,6}") {
            let av: Vec<char> = a.chars().collect();
            let bv: Vec<char> = b.chars().collect();
            prop_assert_eq!(levenshtein(&a, &b), lev_slow(&av, &bv));
        }

        #[test]
        fn distance_is_symmetric(a in "[a-d]{0,8}", b in "[a-d]{0,8}") {
            prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        }

        #[test]
        fn never_suggests_the_unknown_itself(name in "[a-z]{1,6}", arity in 0usize..4) {
            let unknown = PredId::new(name.clone(), arity);
            let mut defined = BTreeSet::new();
            defined.insert(unknown.clone());
            defined.insert(PredId::new(name, arity + 1));
            let s = suggest_predicates(&unknown, &defined);
            prop_assert!(s.candidates.iter().all(|(c, _)| c != &unknown));
        }
    }
}
