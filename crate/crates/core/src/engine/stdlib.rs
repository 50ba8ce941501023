//! List-library predicates loaded as Prolog source into every engine.
//!
//! Helper predicates carry a `$` prefix so they cannot collide with
//! student code (the lexer only produces them from quoted atoms).

use crate::syntax::{parse_program, Program};
use std::sync::OnceLock;

pub const STDLIB_SOURCE: &str = r#"
append([], L, L).
append([H | T], L, [H | R]) :- append(T, L, R).

member(X, [X | _]).
member(X, [_ | T]) :- member(X, T).

length(L, N) :- '$length'(L, 0, N).
'$length'([], N, N).
% The guard stops the generator once a bound length is passed, keeping
% length(L, N) terminating for integer N.
'$length'([_ | T], A, N) :- A \== N, A1 is A + 1, '$length'(T, A1, N).

reverse(L, R) :- '$reverse'(L, [], R).
'$reverse'([], A, A).
'$reverse'([X | Xs], A, R) :- '$reverse'(Xs, [X | A], R).

nth0(I, L, E) :- '$nth'(L, 0, I, E).
nth1(I, L, E) :- '$nth'(L, 1, I, E).
'$nth'([H | _], I, I, H).
'$nth'([_ | T], A, I, E) :- A1 is A + 1, '$nth'(T, A1, I, E).

last([X], X).
last([_ | T], X) :- last(T, X).

maplist(_, []).
maplist(G, [X | Xs]) :- call(G, X), maplist(G, Xs).
maplist(_, [], []).
maplist(G, [X | Xs], [Y | Ys]) :- call(G, X, Y), maplist(G, Xs, Ys).
maplist(_, [], [], []).
maplist(G, [X | Xs], [Y | Ys], [Z | Zs]) :- call(G, X, Y, Z), maplist(G, Xs, Ys, Zs).

foldl(_, [], A, A).
foldl(G, [X | Xs], A0, A) :- call(G, X, A0, A1), foldl(G, Xs, A1, A).
foldl(_, [], [], A, A).
foldl(G, [X | Xs], [Y | Ys], A0, A) :- call(G, X, Y, A0, A1), foldl(G, Xs, Ys, A1, A).
foldl(_, [], [], [], A, A).
foldl(G, [X | Xs], [Y | Ys], [Z | Zs], A0, A) :- call(G, X, Y, Z, A0, A1), foldl(G, Xs, Ys, Zs, A1, A).

sum_list(L, S) :- '$sum_list'(L, 0, S).
'$sum_list'([], S, S).
'$sum_list'([X | Xs], A, S) :- A1 is A + X, '$sum_list'(Xs, A1, S).
"#;

static STDLIB: OnceLock<Program> = OnceLock::new();

pub fn stdlib() -> &'static Program {
    STDLIB.get_or_init(|| {
        let (program, errors) = parse_program(STDLIB_SOURCE);
        assert!(errors.is_empty(), "standard library must parse cleanly: {errors:?}");
        program
    })
}
