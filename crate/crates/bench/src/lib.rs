//! Criterion benchmarks for `quadchain`; see `benches/`.
