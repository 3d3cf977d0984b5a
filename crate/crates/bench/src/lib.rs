//! Benchmark harness for the factorization pipeline; see `benches/`.
