//! Criterion benchmarks for scheme-forge live in `benches/`.
