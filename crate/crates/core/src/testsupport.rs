//! Reference oracle and program/query generators for differential tests.
//!
//! The oracle is a deliberately naive meta-interpreter: it composes
//! substitutions functionally and searches recursively, sharing no code
//! with the engine's goal-stack machine, trail or indexing. It covers the
//! generated subset only (conjunction, disjunction, unification,
//! arithmetic, comparisons and user predicates).

use crate::syntax::{parse_program, parse_query, Program, Term, TermKind};
use std::collections::HashMap;

/// Canonical rendering of one solution row. Unbound variables are
/// renamed to `_G0`, `_G1`, … in first-occurrence order so that two
/// implementations with different internal variable numbering still
/// compare equal.
pub fn canonical_solution(bindings: &[(String, Term)]) -> Vec<(String, String)> {
    let mut names: HashMap<usize, String> = HashMap::new();
    bindings
        .iter()
        .map(|(name, term)| (name.clone(), canonical_with(term, &mut names)))
        .collect()
}

fn canonical_with(term: &Term, names: &mut HashMap<usize, String>) -> String {
    match &term.kind {
        TermKind::Var(_, id) => {
            let next = format!("_G{}", names.len());
            names.entry(*id).or_insert(next).clone()
        }
        TermKind::Compound(f, args) if f == "." && args.len() == 2 => {
            let mut out = String::from("[");
            let mut cur = term;
            let mut first = true;
            loop {
                match &cur.kind {
                    TermKind::Compound(f, args) if f == "." && args.len() == 2 => {
                        if !first {
                            out.push(',');
                        }
                        out.push_str(&canonical_with(&args[0], names));
                        first = false;
                        cur = &args[1];
                    }
                    TermKind::Atom(a) if a == "[]" => break,
                    _ => {
                        out.push('|');
                        out.push_str(&canonical_with(cur, names));
                        break;
                    }
                }
            }
            out.push(']');
            out
        }
        TermKind::Compound(f, args) => {
            let rendered: Vec<String> = args.iter().map(|a| canonical_with(a, names)).collect();
            format!("{}({})", f, rendered.join(","))
        }
        _ => canonical_term(term),
    }
}

/// Compact, whitespace-free rendering shared with the external
/// cross-check script (matches `writeq` output for the generated subset).
pub fn canonical_term(term: &Term) -> String {
    match &term.kind {
        TermKind::Atom(a) => a.clone(),
        TermKind::Int(v) => v.to_string(),
        TermKind::Float(v) => format!("{v:?}"),
        TermKind::Var(name, id) => format!("_{name}{id}"),
        TermKind::Compound(f, args) if f == "." && args.len() == 2 => {
            let mut out = String::from("[");
            let mut cur = term;
            let mut first = true;
            loop {
                match &cur.kind {
                    TermKind::Compound(f, args) if f == "." && args.len() == 2 => {
                        if !first {
                            out.push(',');
                        }
                        out.push_str(&canonical_term(&args[0]));
                        first = false;
                        cur = &args[1];
                    }
                    TermKind::Atom(a) if a == "[]" => break,
                    _ => {
                        out.push('|');
                        out.push_str(&canonical_term(cur));
                        break;
                    }
                }
            }
            out.push(']');
            out
        }
        TermKind::Compound(f, args) => {
            let rendered: Vec<String> = args.iter().map(canonical_term).collect();
            format!("{}({})", f, rendered.join(","))
        }
    }
}

pub mod oracle {
    use super::*;

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum OracleStop {
        OutOfFuel,
        Unsupported(String),
    }

    type Subst = HashMap<usize, Term>;

    fn walk(term: &Term, subst: &Subst) -> Term {
        let mut cur = term.clone();
        while let TermKind::Var(_, id) = &cur.kind {
            match subst.get(id) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn apply(term: &Term, subst: &Subst) -> Term {
        let t = walk(term, subst);
        match &t.kind {
            TermKind::Compound(f, args) => Term {
                kind: TermKind::Compound(f.clone(), args.iter().map(|a| apply(a, subst)).collect()),
                span: t.span,
            },
            _ => t,
        }
    }

    fn unify(a: &Term, b: &Term, subst: &Subst) -> Option<Subst> {
        let (ta, tb) = (walk(a, subst), walk(b, subst));
        match (&ta.kind, &tb.kind) {
            (TermKind::Var(_, i), TermKind::Var(_, j)) if i == j => Some(subst.clone()),
            (TermKind::Var(_, i), _) => {
                let mut s = subst.clone();
                s.insert(*i, tb);
                Some(s)
            }
            (_, TermKind::Var(_, j)) => {
                let mut s = subst.clone();
                s.insert(*j, ta);
                Some(s)
            }
            (TermKind::Atom(x), TermKind::Atom(y)) => (x == y).then(|| subst.clone()),
            (TermKind::Int(x), TermKind::Int(y)) => (x == y).then(|| subst.clone()),
            (TermKind::Float(x), TermKind::Float(y)) => (x == y).then(|| subst.clone()),
            (TermKind::Compound(f, fa), TermKind::Compound(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                let mut s = subst.clone();
                for (x, y) in fa.iter().zip(ga) {
                    s = unify(x, y, &s)?;
                }
                Some(s)
            }
            _ => None,
        }
    }

    fn eval(term: &Term, subst: &Subst) -> Result<i64, OracleStop> {
        let t = walk(term, subst);
        match &t.kind {
            TermKind::Int(v) => Ok(*v),
            TermKind::Compound(f, args) if args.len() == 2 => {
                let a = eval(&args[0], subst)?;
                let b = eval(&args[1], subst)?;
                match f.as_str() {
                    "+" => Ok(a + b),
                    "-" => Ok(a - b),
                    "*" => Ok(a * b),
                    other => Err(OracleStop::Unsupported(format!("arith {other}"))),
                }
            }
            other => Err(OracleStop::Unsupported(format!("arith term {other:?}"))),
        }
    }

    fn rename(term: &Term, map: &mut HashMap<usize, usize>, counter: &mut usize) -> Term {
        match &term.kind {
            TermKind::Var(name, id) => {
                let fresh = *map.entry(*id).or_insert_with(|| {
                    *counter += 1;
                    *counter
                });
                Term::var(name.clone(), fresh, term.span)
            }
            TermKind::Compound(f, args) => Term {
                kind: TermKind::Compound(
                    f.clone(),
                    args.iter().map(|a| rename(a, map, counter)).collect(),
                ),
                span: term.span,
            },
            _ => term.clone(),
        }
    }

    /// All solutions of a single goal, independent of any continuation.
    fn solutions_of(
        program: &Program,
        goal: &Term,
        subst: &Subst,
        counter: &mut usize,
        fuel: &mut u64,
    ) -> Result<Vec<Subst>, OracleStop> {
        let mut out = Vec::new();
        prove(program, std::slice::from_ref(goal), subst, counter, fuel, &mut out)?;
        Ok(out)
    }

    fn prove(
        program: &Program,
        goals: &[Term],
        subst: &Subst,
        counter: &mut usize,
        fuel: &mut u64,
        out: &mut Vec<Subst>,
    ) -> Result<(), OracleStop> {
        if *fuel == 0 {
            return Err(OracleStop::OutOfFuel);
        }
        *fuel -= 1;
        let Some((goal, rest)) = goals.split_first() else {
            out.push(subst.clone());
            return Ok(());
        };
        let goal = walk(goal, subst);
        match &goal.kind {
            TermKind::Atom(a) if a == "true" => prove(program, rest, subst, counter, fuel, out),
            TermKind::Atom(a) if a == "fail" => Ok(()),
            TermKind::Compound(f, args) if f == "," && args.len() == 2 => {
                let mut expanded = vec![args[0].clone(), args[1].clone()];
                expanded.extend(rest.iter().cloned());
                prove(program, &expanded, subst, counter, fuel, out)
            }
            TermKind::Compound(f, args) if f == ";" && args.len() == 2 => {
                // If-then-else commits to the condition's first solution.
                let lhs = walk(&args[0], subst);
                if let TermKind::Compound(g, ct) = &lhs.kind {
                    if g == "->" && ct.len() == 2 {
                        let conds = solutions_of(program, &ct[0], subst, counter, fuel)?;
                        return match conds.first() {
                            Some(s) => {
                                let mut then = vec![ct[1].clone()];
                                then.extend(rest.iter().cloned());
                                prove(program, &then, s, counter, fuel, out)
                            }
                            None => {
                                let mut els = vec![args[1].clone()];
                                els.extend(rest.iter().cloned());
                                prove(program, &els, subst, counter, fuel, out)
                            }
                        };
                    }
                }
                let mut left = vec![args[0].clone()];
                left.extend(rest.iter().cloned());
                prove(program, &left, subst, counter, fuel, out)?;
                let mut right = vec![args[1].clone()];
                right.extend(rest.iter().cloned());
                prove(program, &right, subst, counter, fuel, out)
            }
            TermKind::Compound(f, args) if f == "->" && args.len() == 2 => {
                let conds = solutions_of(program, &args[0], subst, counter, fuel)?;
                match conds.first() {
                    Some(s) => {
                        let mut then = vec![args[1].clone()];
                        then.extend(rest.iter().cloned());
                        prove(program, &then, s, counter, fuel, out)
                    }
                    None => Ok(()),
                }
            }
            TermKind::Compound(f, args) if f == "\\+" && args.len() == 1 => {
                if solutions_of(program, &args[0], subst, counter, fuel)?.is_empty() {
                    prove(program, rest, subst, counter, fuel, out)
                } else {
                    Ok(())
                }
            }
            TermKind::Compound(f, args) if f == "findall" && args.len() == 3 => {
                let solutions = solutions_of(program, &args[1], subst, counter, fuel)?;
                let items: Vec<Term> =
                    solutions.iter().map(|s| apply(&args[0], s)).collect();
                let list = Term::list(items, goal.span);
                match unify(&args[2], &list, subst) {
                    Some(s) => prove(program, rest, &s, counter, fuel, out),
                    None => Ok(()),
                }
            }
            TermKind::Compound(f, args) if f == "=" && args.len() == 2 => {
                match unify(&args[0], &args[1], subst) {
                    Some(s) => prove(program, rest, &s, counter, fuel, out),
                    None => Ok(()),
                }
            }
            TermKind::Compound(f, args) if f == "is" && args.len() == 2 => {
                let value = eval(&args[1], subst)?;
                let value = Term::int(value, goal.span);
                match unify(&args[0], &value, subst) {
                    Some(s) => prove(program, rest, &s, counter, fuel, out),
                    None => Ok(()),
                }
            }
            TermKind::Compound(f, args)
                if args.len() == 2
                    && matches!(f.as_str(), "<" | ">" | "=<" | ">=" | "=:=" | "=\\=") =>
            {
                let a = eval(&args[0], subst)?;
                let b = eval(&args[1], subst)?;
                let holds = match f.as_str() {
                    "<" => a < b,
                    ">" => a > b,
                    "=<" => a <= b,
                    ">=" => a >= b,
                    "=:=" => a == b,
                    "=\\=" => a != b,
                    _ => unreachable!(),
                };
                if holds {
                    prove(program, rest, subst, counter, fuel, out)
                } else {
                    Ok(())
                }
            }
            TermKind::Atom(_) | TermKind::Compound(..) => {
                let pred = goal.indicator().unwrap();
                for clause in program.clauses_for(&pred) {
                    let mut map = HashMap::new();
                    let head = rename(&clause.head, &mut map, counter);
                    if let Some(s) = unify(&goal, &head, subst) {
                        let mut body: Vec<Term> =
                            clause.body.iter().map(|g| rename(g, &mut map, counter)).collect();
                        body.extend(rest.iter().cloned());
                        prove(program, &body, &s, counter, fuel, out)?;
                    }
                }
                Ok(())
            }
            other => Err(OracleStop::Unsupported(format!("goal {other:?}"))),
        }
    }

    /// All solutions for a query, as canonically rendered bindings of the
    /// named query variables, in discovery order.
    pub fn solve_all(
        program_src: &str,
        query_src: &str,
        fuel: u64,
    ) -> Result<Vec<Vec<(String, String)>>, OracleStop> {
        let (program, errors) = parse_program(program_src);
        assert!(errors.is_empty(), "oracle inputs must parse cleanly: {errors:?}");
        let query = parse_query(query_src).expect("oracle query must parse");
        let vars: Vec<(String, usize)> =
            query.variables().into_iter().filter(|(n, _)| !n.starts_with('_')).collect();
        // Clause variable ids from the parser may collide with query ids;
        // rename the query apart first.
        let mut counter = 1_000_000;
        let mut map = HashMap::new();
        let query = rename(&query, &mut map, &mut counter);
        let vars: Vec<(String, usize)> =
            vars.into_iter().map(|(n, id)| (n, *map.get(&id).unwrap())).collect();
        let mut fuel = fuel;
        let mut raw = Vec::new();
        prove(&program, &[query], &HashMap::new(), &mut counter, &mut fuel, &mut raw)?;
        Ok(raw
            .into_iter()
            .map(|s| {
                let row: Vec<(String, Term)> = vars
                    .iter()
                    .map(|(name, id)| {
                        let var =
                            Term::var(name.clone(), *id, crate::syntax::SourceSpan::synthetic());
                        (name.clone(), apply(&var, &s))
                    })
                    .collect();
                super::canonical_solution(&row)
            })
            .collect())
    }
}

pub mod gen {
    /// xorshift64*: deterministic, dependency-free.
    pub struct Rng(u64);

    impl Rng {
        pub fn new(seed: u64) -> Self {
            Rng(seed.wrapping_mul(2685821657736338717).max(1))
        }

        pub fn next_u64(&mut self) -> u64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            self.0
        }

        pub fn below(&mut self, n: u64) -> u64 {
            self.next_u64() % n
        }

        pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
            lo + (self.below((hi - lo + 1) as u64) as i64)
        }

        pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
            &items[self.below(items.len() as u64) as usize]
        }
    }

    #[derive(Debug, Clone)]
    pub struct GeneratedPair {
        pub program: String,
        pub query: String,
    }

    const ATOMS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

    fn int_list(rng: &mut Rng, max_len: u64) -> String {
        let len = rng.below(max_len + 1);
        let items: Vec<String> = (0..len).map(|_| rng.int(-5, 9).to_string()).collect();
        format!("[{}]", items.join(","))
    }

    fn atom_list(rng: &mut Rng, max_len: u64) -> String {
        let len = rng.below(max_len + 1);
        let items: Vec<String> = (0..len).map(|_| rng.pick(&ATOMS).to_string()).collect();
        format!("[{}]", items.join(","))
    }

    /// One (program, query) pair in the differential subset: at most six
    /// clauses, terminating queries, no occurs-check sensitivity, integer
    /// arithmetic only.
    pub fn pair(seed: u64) -> GeneratedPair {
        let mut rng = Rng::new(seed.wrapping_add(0x9e3779b97f4a7c15));
        match rng.below(10) {
            0 => {
                // Fact enumeration, possibly with duplicates.
                let n = rng.below(5) + 1;
                let mut program = String::new();
                for _ in 0..n {
                    program.push_str(&format!(
                        "p({}, {}).\n",
                        rng.pick(&ATOMS),
                        rng.int(0, 9)
                    ));
                }
                let query = match rng.below(3) {
                    0 => "p(X, Y)".to_string(),
                    1 => format!("p({}, Y)", rng.pick(&ATOMS)),
                    _ => format!("p(X, {})", rng.int(0, 9)),
                };
                GeneratedPair { program, query }
            }
            1 => {
                // Join through a shared variable.
                let mut program = String::new();
                for _ in 0..rng.below(3) + 1 {
                    program.push_str(&format!("e({}, {}).\n", rng.pick(&ATOMS), rng.pick(&ATOMS)));
                }
                for _ in 0..rng.below(3) + 1 {
                    program.push_str(&format!("f({}, {}).\n", rng.pick(&ATOMS), rng.pick(&ATOMS)));
                }
                program.push_str("j(X, Z) :- e(X, Y), f(Y, Z).\n");
                GeneratedPair { program, query: "j(X, Z)".to_string() }
            }
            2 => {
                // Structural list map with arithmetic.
                let op = *rng.pick(&["+", "*", "-"]);
                let k = rng.int(1, 4);
                let program = format!(
                    "m([], []).\nm([X | Xs], [Y | Ys]) :- Y is X {op} {k}, m(Xs, Ys).\n"
                );
                let query = format!("m({}, R)", int_list(&mut rng, 5));
                GeneratedPair { program, query }
            }
            3 => {
                // append in splitting mode: several solutions, fixed order.
                let program =
                    "app([], L, L).\napp([H | T], L, [H | R]) :- app(T, L, R).\n".to_string();
                let query = format!("app(X, Y, {})", atom_list(&mut rng, 5));
                GeneratedPair { program, query }
            }
            4 => {
                // membership with duplicates.
                let program =
                    "mem(X, [X | _]).\nmem(X, [_ | T]) :- mem(X, T).\n".to_string();
                let query = match rng.below(2) {
                    0 => format!("mem(X, {})", int_list(&mut rng, 6)),
                    _ => format!("mem({}, {})", rng.int(-5, 9), int_list(&mut rng, 6)),
                };
                GeneratedPair { program, query }
            }
            5 => {
                // Accumulator sum.
                let program = "sum([], A, A).\nsum([X | Xs], A, S) :- A1 is A + X, sum(Xs, A1, S).\n"
                    .to_string();
                let query = format!("sum({}, 0, S)", int_list(&mut rng, 5));
                GeneratedPair { program, query }
            }
            6 => {
                // Guarded clauses (no cut) plus a disjunctive query.
                let program = "g(X, Y, small) :- X < Y.\ng(X, Y, big) :- X >= Y.\n".to_string();
                let a = rng.int(-5, 9);
                let b = rng.int(-5, 9);
                let query = match rng.below(2) {
                    0 => format!("g({a}, {b}, R)"),
                    _ => format!("(g({a}, {b}, R) ; R = both)"),
                };
                GeneratedPair { program, query }
            }
            7 => {
                // Negation as failure over list membership.
                let program = "mem(X, [X | _]).\nmem(X, [_ | T]) :- mem(X, T).\nout(X, L) :- \\+ mem(X, L).\n"
                    .to_string();
                let query =
                    format!("out({}, {})", rng.int(-5, 9), int_list(&mut rng, 5));
                GeneratedPair { program, query }
            }
            8 => {
                // If-then-else classification, sometimes nested in a
                // disjunctive query.
                let program =
                    "mem(X, [X | _]).\nmem(X, [_ | T]) :- mem(X, T).\ncls(X, L, R) :- (mem(X, L) -> R = seen ; R = fresh).\n"
                        .to_string();
                let x = rng.int(-5, 9);
                let list = int_list(&mut rng, 5);
                let query = match rng.below(2) {
                    0 => format!("cls({x}, {list}, R)"),
                    _ => format!("(cls({x}, {list}, R) ; R = extra)"),
                };
                GeneratedPair { program, query }
            }
            _ => {
                // findall over a generate-and-transform goal.
                let k = rng.int(1, 4);
                let program = format!(
                    "mem(X, [X | _]).\nmem(X, [_ | T]) :- mem(X, T).\nsquares(L, R) :- findall(Y, (mem(X, L), Y is X * {k}), R).\n"
                );
                let query = format!("squares({}, R)", int_list(&mut rng, 5));
                GeneratedPair { program, query }
            }
        }
    }
}
