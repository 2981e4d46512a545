//! Benchmark-only crate; see `benches/hotspots.rs`.
