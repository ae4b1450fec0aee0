//! Criterion benchmarks for the `ammtax` engine live in `benches/`.
