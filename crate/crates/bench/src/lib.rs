//! Criterion benchmarks for `icbox-core`; see `benches/`.
