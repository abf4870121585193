//! Criterion benchmarks for besselkit live under `benches/`.
