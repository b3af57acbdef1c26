//! Union-find decoder with erased edges grown in advance.
//!
//! Clusters start at syndrome vertices. Erased edges are fully grown before
//! the first round, which merges the clusters they touch at no cost. Each
//! round, the smallest clusters with odd parity that do not touch the boundary
//! grow all of their frontier edges by half an edge; edges that become fully
//! grown fuse their endpoints' clusters. The grown subgraph is then peeled.

use super::peeling::Peeler;
use super::{Correction, Decoder, DecodingGraph, ErasureSet};
use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    size: Vec<usize>,
    odd: Vec<bool>,
    at_boundary: Vec<bool>,
    frontier: Vec<Vec<usize>>,
    support: Vec<u8>,
    grown: Vec<usize>,
    fused: Vec<usize>,
    active: Vec<usize>,
    stamp: Vec<u32>,
    round: u32,
    peeler: Peeler,
}

impl UnionFind {
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            let gp = self.parent[self.parent[v]];
            self.parent[v] = gp;
            v = gp;
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
        self.size[ra] += self.size[rb];
        self.odd[ra] ^= self.odd[rb];
        self.at_boundary[ra] |= self.at_boundary[rb];
        let mut moved = std::mem::take(&mut self.frontier[rb]);
        if moved.len() > self.frontier[ra].len() {
            std::mem::swap(&mut moved, &mut self.frontier[ra]);
        }
        self.frontier[ra].extend(moved);
    }

    fn reset(&mut self, graph: &DecodingGraph, syndrome: &[bool]) {
        let nv = graph.num_vertices();
        self.parent.clear();
        self.parent.extend(0..nv);
        self.rank.clear();
        self.rank.resize(nv, 0);
        self.size.clear();
        self.size.resize(nv, 1);
        self.odd.clear();
        self.odd.extend_from_slice(syndrome);
        self.odd.push(false);
        self.at_boundary.clear();
        self.at_boundary.resize(nv, false);
        self.at_boundary[graph.boundary()] = true;
        self.frontier.resize_with(nv, Vec::new);
        for (v, f) in self.frontier.iter_mut().enumerate().take(nv) {
            f.clear();
            f.push(v);
        }
        self.support.clear();
        self.support.resize(graph.num_edges(), 0);
        self.grown.clear();
        self.stamp.clear();
        self.stamp.resize(nv, 0);
        self.round = 0;
    }

    /// Grows clusters until none is odd and isolated; returns the grown edges.
    fn grow(&mut self, graph: &DecodingGraph, erasure: &ErasureSet, syndrome: &[bool]) -> Result<()> {
        self.reset(graph, syndrome);
        for &e in erasure.edges() {
            let edge = graph.edges.get(e).ok_or_else(|| {
                Error::InvalidArgument(format!("edge {e} is not in the graph"))
            })?;
            if self.support[e] < 2 {
                self.support[e] = 2;
                self.grown.push(e);
                self.union(edge.u, edge.v);
            }
        }
        let defects: Vec<usize> = (0..graph.num_detectors).filter(|&v| syndrome[v]).collect();
        loop {
            self.round += 1;
            self.active.clear();
            for &v in &defects {
                let r = self.find(v);
                if self.odd[r] && !self.at_boundary[r] && self.stamp[r] != self.round {
                    self.stamp[r] = self.round;
                    self.active.push(r);
                }
            }
            if self.active.is_empty() {
                return Ok(());
            }
            let smallest = self.active.iter().map(|&r| self.size[r]).min().unwrap_or(0);
            let size = &self.size;
            self.active.retain(|&r| size[r] == smallest);
            self.fused.clear();
            let mut progressed = false;
            for i in 0..self.active.len() {
                let r = self.active[i];
                let mut old = std::mem::take(&mut self.frontier[r]);
                old.retain(|&v| {
                    let mut open = false;
                    for &e in &graph.adjacency[v] {
                        match self.support[e] {
                            2 => {}
                            s => {
                                progressed = true;
                                self.support[e] = s + 1;
                                if s + 1 == 2 {
                                    self.fused.push(e);
                                } else {
                                    open = true;
                                }
                            }
                        }
                    }
                    open
                });
                self.frontier[r] = old;
            }
            if !progressed {
                return Err(Error::NotCovered(self.active[0]));
            }
            for i in 0..self.fused.len() {
                let e = self.fused[i];
                self.grown.push(e);
                let edge = &graph.edges[e];
                self.union(edge.u, edge.v);
            }
        }
    }
}

impl Decoder for UnionFind {
    fn decode(
        &mut self,
        graph: &DecodingGraph,
        erasure: &ErasureSet,
        syndrome: &[bool],
    ) -> Result<Correction> {
        if syndrome.len() != graph.num_detectors {
            return Err(Error::Dimension {
                expected: graph.num_detectors,
                actual: syndrome.len(),
            });
        }
        self.grow(graph, erasure, syndrome)?;
        let grown = std::mem::take(&mut self.grown);
        let edges = self.peeler.peel(graph, &grown, syndrome);
        self.grown = grown;
        Ok(Correction::from_edges(graph, edges?))
    }
}

pub fn union_find_decode(graph: &DecodingGraph, erasure: &ErasureSet, syndrome: &[bool]) -> Result<Correction> {
    UnionFind::default().decode(graph, erasure, syndrome)
}
