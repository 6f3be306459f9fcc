//! Criterion benchmarks for `otfs-core` live under `benches/`.
