use criterion::{black_box, criterion_group, criterion_main, Criterion};
use prologian_core::analytics::diff_programs;
use prologian_core::analyzers::levenshtein;
use prologian_core::engine::{Engine, EngineLimits};
use prologian_core::harness::{parse_test_file, run_suite};
use prologian_core::syntax::{parse_program, parse_query};

const MULT: &str =
    "mult([], _, []).\nmult([E1 | L1], N, [E2 | L2]) :- E2 is E1 * N, mult(L1, N, L2).";

const NREV: &str = "
nrev([], []).
nrev([H | T], R) :- nrev(T, RT), append(RT, [H], R).
";

fn int_list(n: usize) -> String {
    let items: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    format!("[{}]", items.join(","))
}

fn bench_parser(c: &mut Criterion) {
    let source = MULT.to_string()
        + &(0..50).map(|i| format!("fact({i}, f(g(h({i})), [a, b | T{i}])).\n")).collect::<String>();
    c.bench_function("parse_program_52_clauses", |b| {
        b.iter(|| parse_program(black_box(&source)))
    });
}

fn bench_engine(c: &mut Criterion) {
    let (mult, _) = parse_program(MULT);
    let mult_engine = Engine::new(mult);
    let mult_query = parse_query(&format!("mult({}, 3, X)", int_list(50))).unwrap();
    c.bench_function("solve_mult_50", |b| {
        b.iter(|| mult_engine.solve(black_box(&mult_query)).unwrap())
    });

    let (nrev, _) = parse_program(NREV);
    let nrev_engine = Engine::new(nrev);
    let nrev_query = parse_query(&format!("nrev({}, R)", int_list(30))).unwrap();
    c.bench_function("solve_nrev_30", |b| {
        b.iter(|| nrev_engine.solve(black_box(&nrev_query)).unwrap())
    });

    let (empty, _) = parse_program("");
    let append_engine = Engine::new(empty);
    let split_query = parse_query(&format!("append(X, Y, {})", int_list(20))).unwrap();
    c.bench_function("solve_append_splits_20", |b| {
        b.iter(|| append_engine.solve(black_box(&split_query)).unwrap())
    });
}

fn bench_harness(c: &mut Criterion) {
    let (submission, _) = parse_program(MULT);
    let tests = parse_test_file(
        ":- begin_tests(mult).
test(a) :- mult([1, 2, 3], 2, [2, 4, 6]).
test(b) :- mult([], 9, []).
test(c, [all(X == [[3, 6]])]) :- mult([1, 2], 3, X).
:- end_tests(mult).",
    )
    .unwrap();
    c.bench_function("run_suite_3_tests", |b| {
        b.iter(|| run_suite(black_box(&submission), black_box(&tests), EngineLimits::default()))
    });
}

fn bench_analytics(c: &mut Criterion) {
    let (old, _) = parse_program(
        "mult([], _, []).\nmult([E1 | L1], N, [E2 | L2]) :- E2 = E1 * N, multiply(L1, N, L1).",
    );
    let (new, _) = parse_program(MULT);
    c.bench_function("diff_programs_mult", |b| {
        b.iter(|| diff_programs(black_box(&old), black_box(&new)))
    });

    c.bench_function("levenshtein_multiply_mult", |b| {
        b.iter(|| levenshtein(black_box("multiply"), black_box("mult")))
    });
}

criterion_group!(benches, bench_parser, bench_engine, bench_harness, bench_analytics);
criterion_main!(benches);
