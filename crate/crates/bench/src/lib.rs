//! Criterion benchmarks for frame-lab; see `benches/`.
