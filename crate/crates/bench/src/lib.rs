//! Benchmarks for the core kernels; see `benches/kernels.rs`.

use ecx_core::{BitString, ProcessModel};

/// A sampled Markov flip-1/10 string, the usual benchmark input.
pub fn markov_string(n: usize, seed: u64) -> BitString {
    let model: ProcessModel = "markov:flip=1/10".parse().expect("valid model");
    model.sample(n, seed).expect("sampling")
}
