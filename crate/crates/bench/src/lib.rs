//! Criterion benchmarks for `trispin-core`; see `benches/`.
