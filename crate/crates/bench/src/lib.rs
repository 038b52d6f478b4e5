//! Criterion benchmarks for kleene-core; see `benches/`.
