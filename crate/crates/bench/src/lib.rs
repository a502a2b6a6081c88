//! Criterion benchmarks for the qcomb pipeline live in `benches/`.
