//! Construction and certification of unique-neighbor expanders: random and algebraic base
//! graphs, line products with small gadgets, and exact or sampled checks of the spectral,
//! cycle and expansion properties the constructions rely on.

pub mod cayley;
pub mod cycles;
pub mod expansion;
pub mod graphs;
pub mod pipelines;
pub mod products;
pub mod report;
pub mod sampling;
pub mod spectral;

pub use graphs::{BipartiteGraph, Graph, GraphError, GraphFile, MiddleOrder, ParseError, Side, TripartiteBase, VertexSet};
pub use report::{CertificateReport, Check, Status};

use thiserror::Error;

/// Any error raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Sampling(#[from] sampling::SamplingError),
    #[error(transparent)]
    Cayley(#[from] cayley::CayleyError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Expansion(#[from] expansion::ExpansionError),
    #[error(transparent)]
    Cycles(#[from] cycles::CyclesError),
    #[error(transparent)]
    Product(#[from] products::ProductError),
}
