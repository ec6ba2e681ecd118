//! Benchmark-only crate; see the `benches/` targets.

pub use leakage_core;
