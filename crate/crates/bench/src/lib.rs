//! Fixed-seed inputs shared by the benchmarks in `benches/`.

use forge_core::graphs::named;
use forge_core::sampling::{sample_biregular, sample_regular, RngStream};
use forge_core::{BipartiteGraph, Graph};

pub const SEED: u64 = 7;

/// Random simple `d`-regular graph on `n` vertices.
pub fn regular(n: usize, d: usize) -> Graph {
    sample_regular(n, d, &mut RngStream::new(SEED, 0).rng(), None).expect("regular fixture")
}

/// Random `(c, d)`-biregular graph with `d k` left and `c k` right vertices.
pub fn biregular(c: usize, d: usize, k: usize) -> BipartiteGraph {
    sample_biregular(d * k, c * k, c, d, &mut RngStream::new(SEED, 1).rng(), None).expect("biregular fixture")
}

/// 3-regular gadget on 8 vertices.
pub fn gadget() -> Graph {
    named::octagon_with_diagonals()
}
