//! Erasure-aware decoding on detector graphs.

pub mod graph;
pub mod ml;
pub mod peeling;
pub mod union_find;

pub use graph::{
    build_decoding_graph, build_decoding_graph_with, edge_weight, reweight_for_erasure,
    DecodingGraph, Edge, Fault, FaultKind, GraphOptions,
};
pub use ml::{ml_decode_bruteforce, ErrorPrior, MlResult, ML_MAX_QUBITS};
pub use peeling::{peel_decode, Peeler};
pub use union_find::{union_find_decode, UnionFind};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Edges heralded in one shot, sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErasureSet {
    edges: Vec<usize>,
}

impl ErasureSet {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Self { edges }
    }

    /// Union of the edges heralded by the given check ids.
    pub fn from_flags(graph: &DecodingGraph, flags: &[usize]) -> Self {
        let edges = flags
            .iter()
            .filter_map(|&id| graph.check_edges.get(id))
            .flatten()
            .copied()
            .collect();
        Self::new(edges)
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }
}

/// Selected edges and the observable flips they imply.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Correction {
    pub edges: Vec<usize>,
    pub obs_mask: u64,
}

impl Correction {
    pub fn from_edges(graph: &DecodingGraph, edges: Vec<usize>) -> Self {
        let obs_mask = edges.iter().fold(0, |m, &e| m ^ graph.edges[e].obs_mask);
        Self { edges, obs_mask }
    }

    pub fn flips(&self, observable: usize) -> bool {
        self.obs_mask >> observable & 1 == 1
    }
}

/// Decoder choice in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    /// Peeling, falling back to union-find when the syndrome leaves the erasure.
    Peeling,
    UnionFind,
}

impl DecoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::Peeling => "peeling",
            DecoderKind::UnionFind => "union_find",
        }
    }

    pub fn build(self) -> Box<dyn Decoder + Send> {
        match self {
            DecoderKind::Peeling => Box::new(PeelingWithFallback::default()),
            DecoderKind::UnionFind => Box::new(UnionFind::default()),
        }
    }
}

/// Common interface for graph decoders; also the attachment point for an
/// external matching decoder fed by [`reweight_for_erasure`].
pub trait Decoder {
    /// `syndrome` has one entry per detector.
    fn decode(
        &mut self,
        graph: &DecodingGraph,
        erasure: &ErasureSet,
        syndrome: &[bool],
    ) -> Result<Correction>;
}

/// Peeling on covered syndromes, union-find otherwise.
#[derive(Debug, Default)]
pub struct PeelingWithFallback {
    peeler: Peeler,
    uf: UnionFind,
    /// Number of decodes that needed the fallback.
    pub fallbacks: u64,
}

impl Decoder for PeelingWithFallback {
    fn decode(
        &mut self,
        graph: &DecodingGraph,
        erasure: &ErasureSet,
        syndrome: &[bool],
    ) -> Result<Correction> {
        match self.peeler.decode(graph, erasure, syndrome) {
            Err(crate::Error::NotCovered(_)) => {
                self.fallbacks += 1;
                self.uf.decode(graph, erasure, syndrome)
            }
            other => other,
        }
    }
}
