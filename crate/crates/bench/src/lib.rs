//! Criterion benchmarks for `imres-core`; see `benches/`.
