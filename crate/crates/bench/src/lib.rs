//! Criterion benchmarks for the synthesis pipeline and the decision engine;
//! see `benches/failsafe.rs`.
