//! Criterion benchmarks for the entx kernels; see `benches/`.
