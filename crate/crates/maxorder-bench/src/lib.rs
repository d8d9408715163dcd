//! Benchmark-only crate; see benches/maxorder.rs.
