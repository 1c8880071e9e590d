//! Bench-only crate; see `benches/core_paths.rs`.
