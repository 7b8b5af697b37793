//! Criterion benchmarks for the fqx kernels; see `benches/kernels.rs`.
