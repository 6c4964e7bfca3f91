//! Criterion benchmarks for `isopoly-core`; see `benches/polygons.rs`.
