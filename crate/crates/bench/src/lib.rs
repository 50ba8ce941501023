//! Benchmarks live in benches/; see `cargo bench -p prologian-bench`.
