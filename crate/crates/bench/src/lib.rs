//! Criterion benchmarks for patentflow; see `benches/`.
