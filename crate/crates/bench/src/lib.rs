//! Criterion benchmarks of the hot kernels; see `benches/kernels.rs`.
