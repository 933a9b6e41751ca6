//! Benchmarks only; run `cargo bench -p cfinsler-bench`.
