//! Criterion benchmarks for the counting kernels live in `benches/`.
