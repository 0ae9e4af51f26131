//! Empty library crate; it exists to host the criterion benchmarks in
//! `benches/`. Run them with `cargo bench -p apasp-bench`.
