//! Criterion benchmarks for the density pipeline; see `benches/density.rs`.
