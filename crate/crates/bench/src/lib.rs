//! Benchmark-only crate; see `benches/radii.rs`.
