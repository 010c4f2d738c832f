//! Benchmarks for the epdyn kernels live in `benches/`.
