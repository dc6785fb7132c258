//! Criterion benchmarks for `hpquad`; see `benches/`.
