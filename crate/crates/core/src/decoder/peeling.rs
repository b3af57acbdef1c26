//! Peeling decoder for syndromes supported on erased edges.

use std::collections::VecDeque;

use super::{Correction, Decoder, DecodingGraph, ErasureSet};
use crate::error::{Error, Result};

const NO_EDGE: usize = usize::MAX;

/// Reusable scratch space for peeling.
#[derive(Debug, Default)]
pub struct Peeler {
    in_set: Vec<bool>,
    touched: Vec<bool>,
    visited: Vec<bool>,
    parent_edge: Vec<usize>,
    order: Vec<usize>,
    roots: Vec<usize>,
    syn: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Peeler {
    /// Selects edges from `edges` whose boundary is `syndrome`.
    ///
    /// Builds a breadth-first spanning forest of the subgraph, rooted at the
    /// boundary vertex when it is present and otherwise at the lowest vertex of
    /// each component, then peels leaves towards the roots.
    pub fn peel(&mut self, graph: &DecodingGraph, edges: &[usize], syndrome: &[bool]) -> Result<Vec<usize>> {
        let nv = graph.num_vertices();
        let boundary = graph.boundary();
        if syndrome.len() != graph.num_detectors {
            return Err(Error::Dimension {
                expected: graph.num_detectors,
                actual: syndrome.len(),
            });
        }
        self.in_set.clear();
        self.in_set.resize(graph.num_edges(), false);
        self.touched.clear();
        self.touched.resize(nv, false);
        for &e in edges {
            let edge = graph.edges.get(e).ok_or_else(|| {
                Error::InvalidArgument(format!("edge {e} is not in the graph"))
            })?;
            self.in_set[e] = true;
            self.touched[edge.u] = true;
            self.touched[edge.v] = true;
        }
        if let Some(v) = (0..graph.num_detectors).find(|&v| syndrome[v] && !self.touched[v]) {
            return Err(Error::NotCovered(v));
        }

        self.visited.clear();
        self.visited.resize(nv, false);
        self.parent_edge.clear();
        self.parent_edge.resize(nv, NO_EDGE);
        self.order.clear();
        self.roots.clear();
        let candidates = std::iter::once(boundary).chain(0..graph.num_detectors);
        for root in candidates {
            if !self.touched[root] || self.visited[root] {
                continue;
            }
            self.visited[root] = true;
            self.roots.push(root);
            self.queue.push_back(root);
            while let Some(v) = self.queue.pop_front() {
                self.order.push(v);
                for &e in &graph.adjacency[v] {
                    if !self.in_set[e] {
                        continue;
                    }
                    let edge = &graph.edges[e];
                    let w = if edge.u == v { edge.v } else { edge.u };
                    if !self.visited[w] {
                        self.visited[w] = true;
                        self.parent_edge[w] = e;
                        self.queue.push_back(w);
                    }
                }
            }
        }

        self.syn.clear();
        self.syn.extend_from_slice(syndrome);
        self.syn.push(false);
        let mut selected = Vec::new();
        for &v in self.order.iter().rev() {
            let e = self.parent_edge[v];
            if e == NO_EDGE || !self.syn[v] {
                continue;
            }
            selected.push(e);
            let edge = &graph.edges[e];
            let w = if edge.u == v { edge.v } else { edge.u };
            self.syn[v] = false;
            self.syn[w] ^= true;
        }
        if let Some(&r) = self.roots.iter().find(|&&r| r != boundary && self.syn[r]) {
            return Err(Error::NotCovered(r));
        }
        selected.sort_unstable();
        Ok(selected)
    }
}

impl Decoder for Peeler {
    fn decode(
        &mut self,
        graph: &DecodingGraph,
        erasure: &ErasureSet,
        syndrome: &[bool],
    ) -> Result<Correction> {
        let edges = self.peel(graph, erasure.edges(), syndrome)?;
        Ok(Correction::from_edges(graph, edges))
    }
}

/// Decodes a syndrome that lies inside the erased subgraph.
pub fn peel_decode(graph: &DecodingGraph, erasure: &ErasureSet, syndrome: &[bool]) -> Result<Correction> {
    Peeler::default().decode(graph, erasure, syndrome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_code_capacity_circuit, CheckSpec, SiteNoise};
    use crate::code::{build_rotated_surface_code, CheckBasis};
    use crate::decoder::build_decoding_graph;

    fn graph() -> DecodingGraph {
        let code = build_rotated_surface_code(3).unwrap();
        let c = build_code_capacity_circuit(
            &code,
            &SiteNoise::new(0.1, 0.0).unwrap(),
            &CheckSpec::PERFECT,
            CheckBasis::X,
        )
        .unwrap();
        build_decoding_graph(&c).unwrap()
    }

    #[test]
    fn empty_in_empty_out() {
        let g = graph();
        let c = peel_decode(&g, &ErasureSet::default(), &[false; 8]).unwrap();
        assert!(c.edges.is_empty());
        assert_eq!(c.obs_mask, 0);
    }

    #[test]
    fn single_erased_edge_is_selected() {
        let g = graph();
        let e = g.edges.iter().position(|e| e.v != g.boundary()).unwrap();
        let mut syn = vec![false; 8];
        syn[g.edges[e].u] = true;
        syn[g.edges[e].v] = true;
        let c = peel_decode(&g, &ErasureSet::new(vec![e]), &syn).unwrap();
        assert_eq!(c.edges, vec![e]);
        assert!(g.is_valid(&c, &syn));
    }

    #[test]
    fn uncovered_syndrome_is_reported() {
        let g = graph();
        let mut syn = vec![false; 8];
        syn[0] = true;
        assert!(matches!(
            peel_decode(&g, &ErasureSet::default(), &syn),
            Err(Error::NotCovered(0))
        ));
    }

    #[test]
    fn peeling_all_edges_is_valid() {
        let g = graph();
        let all = ErasureSet::new((0..g.num_edges()).collect());
        for mask in 0u32..256 {
            let syn: Vec<bool> = (0..8).map(|i| mask >> i & 1 == 1).collect();
            let c = peel_decode(&g, &all, &syn).unwrap();
            assert!(g.is_valid(&c, &syn));
        }
    }
}
