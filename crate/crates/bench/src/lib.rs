//! Criterion benchmarks for the core pipelines live in `benches/`.
