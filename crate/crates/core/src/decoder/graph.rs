//! Detector graph extraction.
//!
//! Every elementary fault of a circuit is pushed through a clean Pauli frame
//! to find the detectors and observables it flips. Pauli noise splits into
//! independent X and Z components, so the X-type and Z-type detectors form
//! separate components of one graph sharing a single boundary vertex.
//!
//! Erasure-derived faults are placed where the sampler applies them: the
//! conversion Pauli at the check that heralds, and a random Pauli on the
//! partner of a CX with a marked qubit. The probability that a qubit is marked
//! is tracked along the circuit to set their priors.

use std::collections::HashMap;

use super::Correction;
use crate::channel::{ConversionMode, ResetProtocol};
use crate::circuit::{Circuit, Gate, Instruction};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Edge probabilities are clamped to this before taking weights.
pub const MIN_EDGE_PROB: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaultKind {
    /// Pauli component at a noise site.
    Noise,
    /// Conversion Pauli applied by a flagged check.
    Conversion,
    /// Random Pauli on the partner of a CX with a marked qubit.
    Partner,
    /// Flipped measurement from an `MFLIP` instruction.
    MeasureFlip,
    /// Random readout of a marked qubit.
    LeakedReadout,
}

/// One independent fault mechanism of the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Fault {
    pub kind: FaultKind,
    pub instr: usize,
    pub qubit: usize,
    /// X or Z; identity for measurement flips.
    pub pauli: Pauli,
    pub prob: f64,
    /// Check whose flag reveals this fault.
    pub herald: Option<usize>,
}

impl Fault {
    fn leak_induced(&self) -> bool {
        matches!(self.kind, FaultKind::Partner | FaultKind::LeakedReadout)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    /// Second endpoint; equal to the boundary vertex for boundary edges.
    pub v: usize,
    pub prob: f64,
    /// `ln((1 - p) / p)`, zero for `p >= 1/2`.
    pub weight: f64,
    pub obs_mask: u64,
    /// Instruction indices of the faults merged into this edge.
    pub source_ids: Vec<usize>,
}

pub fn edge_weight(p: f64) -> f64 {
    let p = p.clamp(MIN_EDGE_PROB, 0.5);
    ((1.0 - p) / p).ln().max(0.0)
}

/// Weighted detector graph with one boundary vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingGraph {
    pub num_detectors: usize,
    pub num_observables: usize,
    pub edges: Vec<Edge>,
    /// Edge indices heralded by each check id.
    pub check_edges: Vec<Vec<usize>>,
    /// Incident edge indices per vertex, boundary last.
    pub adjacency: Vec<Vec<usize>>,
    /// Total probability of faults that flip an observable but no detector.
    pub undetectable_logical: f64,
    /// Leak-induced faults that flip three or more detectors and were dropped.
    pub dropped_hyperedges: usize,
}

impl DecodingGraph {
    pub fn boundary(&self) -> usize {
        self.num_detectors
    }

    pub fn num_vertices(&self) -> usize {
        self.num_detectors + 1
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Detector parity produced by a set of edges.
    pub fn syndrome_of_edges(&self, edges: &[usize]) -> Vec<bool> {
        let mut s = vec![false; self.num_detectors];
        for &e in edges {
            let edge = &self.edges[e];
            for v in [edge.u, edge.v] {
                if v < self.num_detectors {
                    s[v] ^= true;
                }
            }
        }
        s
    }

    /// Whether `correction` reproduces `syndrome`.
    pub fn is_valid(&self, correction: &Correction, syndrome: &[bool]) -> bool {
        self.syndrome_of_edges(&correction.edges) == syndrome
    }

    fn rebuild_adjacency(&mut self) {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.u].push(i);
            if e.v != e.u {
                adj[e.v].push(i);
            }
        }
        self.adjacency = adj;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphOptions {
    /// Include faults caused by marked qubits that are not heralded in time.
    pub leak_faults: bool,
}

impl Default for GraphOptions {
    fn default() -> Self {
        Self { leak_faults: true }
    }
}

pub fn build_decoding_graph(circuit: &Circuit) -> Result<DecodingGraph> {
    build_decoding_graph_with(circuit, &GraphOptions::default())
}

pub fn build_decoding_graph_with(circuit: &Circuit, options: &GraphOptions) -> Result<DecodingGraph> {
    let faults = enumerate_faults(circuit, options);
    let effects = propagate_faults(circuit, &faults);
    let boundary = circuit.num_detectors();

    let mut graph = DecodingGraph {
        num_detectors: circuit.num_detectors(),
        num_observables: circuit.num_observables(),
        edges: Vec::new(),
        check_edges: vec![Vec::new(); circuit.num_checks()],
        adjacency: Vec::new(),
        undetectable_logical: 0.0,
        dropped_hyperedges: 0,
    };
    let mut index: HashMap<(usize, usize, u64), usize> = HashMap::new();
    for (fault, (dets, obs)) in faults.iter().zip(effects) {
        let (u, v) = match dets.len() {
            0 => {
                if obs != 0 {
                    graph.undetectable_logical = xor_prob(graph.undetectable_logical, fault.prob);
                }
                continue;
            }
            1 => (dets[0], boundary),
            2 => (dets[0].min(dets[1]), dets[0].max(dets[1])),
            k if fault.leak_induced() => {
                let _ = k;
                graph.dropped_hyperedges += 1;
                continue;
            }
            k => return Err(Error::Hyperedge(k)),
        };
        let e = *index.entry((u, v, obs)).or_insert_with(|| {
            graph.edges.push(Edge {
                u,
                v,
                prob: 0.0,
                weight: 0.0,
                obs_mask: obs,
                source_ids: Vec::new(),
            });
            graph.edges.len() - 1
        });
        let edge = &mut graph.edges[e];
        edge.prob = xor_prob(edge.prob, fault.prob);
        if !edge.source_ids.contains(&fault.instr) {
            edge.source_ids.push(fault.instr);
        }
        if let Some(id) = fault.herald {
            let list = &mut graph.check_edges[id];
            if !list.contains(&e) {
                list.push(e);
            }
        }
    }
    for edge in &mut graph.edges {
        edge.weight = edge_weight(edge.prob);
        edge.source_ids.sort_unstable();
    }
    for list in &mut graph.check_edges {
        list.sort_unstable();
    }
    graph.rebuild_adjacency();
    Ok(graph)
}

/// Probability that exactly one of two independent events happens.
fn xor_prob(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

fn conversion_components(mode: ConversionMode) -> [(Pauli, f64); 2] {
    match mode {
        ConversionMode::Mixed => [(Pauli::X, 0.5), (Pauli::Z, 0.5)],
        ConversionMode::Biased => [(Pauli::X, 0.0), (Pauli::Z, 0.5)],
    }
}

/// Next check on `qubit` strictly after `instr`, unless a reset comes first.
fn next_herald(circuit: &Circuit, instr: usize, qubit: usize) -> Option<usize> {
    for ins in &circuit.instructions()[instr + 1..] {
        match ins {
            Instruction::ErasureCheck { qubit: q, id, .. } if *q == qubit => return Some(*id),
            Instruction::Gate {
                gate: Gate::Reset,
                targets,
            } if targets.contains(&qubit) => return None,
            _ => {}
        }
    }
    None
}

/// Lists the fault mechanisms with their priors.
pub fn enumerate_faults(circuit: &Circuit, options: &GraphOptions) -> Vec<Fault> {
    let n = circuit.num_qubits();
    let mut marked = vec![0.0f64; n];
    let mut mode = vec![None::<ConversionMode>; n];
    for ins in circuit.instructions() {
        if let Instruction::ErasureCheck { qubit, spec, .. } = ins {
            mode[*qubit].get_or_insert(spec.conversion);
        }
    }
    let mode: Vec<ConversionMode> = mode
        .into_iter()
        .map(|m| m.unwrap_or(ConversionMode::Mixed))
        .collect();

    let mut faults = Vec::new();
    let push = |faults: &mut Vec<Fault>, kind, instr, qubit, pauli, prob: f64, herald| {
        if prob > 0.0 {
            faults.push(Fault {
                kind,
                instr,
                qubit,
                pauli,
                prob,
                herald,
            });
        }
    };
    for (idx, ins) in circuit.instructions().iter().enumerate() {
        match ins {
            Instruction::Noise {
                qubit,
                erasure,
                pauli,
            } => {
                let q = *qubit;
                push(&mut faults, FaultKind::Noise, idx, q, Pauli::X, pauli.p_x + pauli.p_y, None);
                push(&mut faults, FaultKind::Noise, idx, q, Pauli::Z, pauli.p_z + pauli.p_y, None);
                marked[q] += (1.0 - marked[q]) * erasure;
            }
            Instruction::ErasureCheck { qubit, spec, id } => {
                let q = *qubit;
                let m = marked[q];
                let mut converted = m * (1.0 - spec.f_neg);
                if spec.reset == ResetProtocol::OneWay {
                    converted += (1.0 - m) * spec.f_pos;
                }
                for (p, w) in conversion_components(spec.conversion) {
                    push(&mut faults, FaultKind::Conversion, idx, q, p, converted * w, Some(*id));
                }
                marked[q] = m * spec.f_neg
                    + match spec.reset {
                        ResetProtocol::Unitary => (1.0 - m) * spec.f_pos,
                        ResetProtocol::OneWay => 0.0,
                    };
            }
            Instruction::MeasureFlip { qubit, p } => {
                push(&mut faults, FaultKind::MeasureFlip, idx, *qubit, Pauli::I, *p, None);
            }
            Instruction::Gate { gate, targets } => match gate {
                Gate::CX => {
                    if !options.leak_faults {
                        continue;
                    }
                    for pair in targets.chunks_exact(2) {
                        for (leaky, partner) in [(pair[0], pair[1]), (pair[1], pair[0])] {
                            let prob = marked[leaky] * (1.0 - marked[partner]);
                            if prob == 0.0 {
                                continue;
                            }
                            let herald = next_herald(circuit, idx, leaky);
                            for (p, w) in conversion_components(mode[leaky]) {
                                push(&mut faults, FaultKind::Partner, idx, partner, p, prob * w, herald);
                            }
                        }
                    }
                }
                Gate::Reset => {
                    for &q in targets {
                        marked[q] = 0.0;
                    }
                }
                Gate::MeasureZ => {
                    if options.leak_faults {
                        for &q in targets {
                            push(&mut faults, FaultKind::LeakedReadout, idx, q, Pauli::I, marked[q] / 2.0, None);
                        }
                    }
                }
                Gate::H => {}
            },
            _ => {}
        }
    }
    faults
}

/// Detectors (ascending) and observable mask flipped by each fault.
///
/// Faults are simulated 64 at a time, one per bit lane.
pub fn propagate_faults(circuit: &Circuit, faults: &[Fault]) -> Vec<(Vec<usize>, u64)> {
    let n = circuit.num_qubits();
    let num_instr = circuit.instructions().len();
    let mut out = Vec::with_capacity(faults.len());
    let mut x = vec![0u64; n];
    let mut z = vec![0u64; n];
    let mut pending = vec![0u64; n];
    let mut meas: Vec<u64> = Vec::with_capacity(circuit.num_measurements());
    let mut dets: Vec<u64> = Vec::with_capacity(circuit.num_detectors());
    let mut obs = vec![0u64; circuit.num_observables()];
    // Per-instruction injections for the current batch: (qubit, lane bit, fault).
    let mut inject: Vec<Vec<(usize, u64, usize)>> = vec![Vec::new(); num_instr];

    for batch in faults.chunks(64) {
        x.fill(0);
        z.fill(0);
        pending.fill(0);
        meas.clear();
        dets.clear();
        obs.fill(0);
        for list in inject.iter_mut() {
            list.clear();
        }
        for (lane, f) in batch.iter().enumerate() {
            inject[f.instr].push((f.qubit, 1u64 << lane, lane));
        }
        for (idx, ins) in circuit.instructions().iter().enumerate() {
            // Readout flips act before the measurement they corrupt.
            if let Instruction::Gate {
                gate: Gate::MeasureZ,
                ..
            } = ins
            {
                for &(q, bit, _) in &inject[idx] {
                    pending[q] ^= bit;
                }
            }
            match ins {
                Instruction::Gate { gate, targets } => match gate {
                    Gate::CX => {
                        for pair in targets.chunks_exact(2) {
                            let (c, t) = (pair[0], pair[1]);
                            x[t] ^= x[c];
                            z[c] ^= z[t];
                        }
                    }
                    Gate::H => {
                        for &q in targets {
                            std::mem::swap(&mut x[q], &mut z[q]);
                        }
                    }
                    Gate::Reset => {
                        for &q in targets {
                            x[q] = 0;
                            z[q] = 0;
                            pending[q] = 0;
                        }
                    }
                    Gate::MeasureZ => {
                        for &q in targets {
                            meas.push(x[q] ^ pending[q]);
                            pending[q] = 0;
                        }
                    }
                },
                Instruction::Detector { measurements } => {
                    dets.push(measurements.iter().fold(0, |acc, &m| acc ^ meas[m]));
                }
                Instruction::Observable {
                    index,
                    measurements,
                } => {
                    obs[*index] ^= measurements.iter().fold(0, |acc, &m| acc ^ meas[m]);
                }
                _ => {}
            }
            // Everything else acts after the instruction.
            if !matches!(
                ins,
                Instruction::Gate {
                    gate: Gate::MeasureZ,
                    ..
                }
            ) {
                for &(q, bit, lane) in &inject[idx] {
                    match batch[lane].pauli {
                        Pauli::I => pending[q] ^= bit,
                        p => {
                            if p.x_bit() {
                                x[q] ^= bit;
                            }
                            if p.z_bit() {
                                z[q] ^= bit;
                            }
                        }
                    }
                }
            }
        }
        let mut lanes: Vec<(Vec<usize>, u64)> = vec![(Vec::new(), 0); batch.len()];
        for (d, &mask) in dets.iter().enumerate() {
            let mut m = mask;
            while m != 0 {
                let lane = m.trailing_zeros() as usize;
                lanes[lane].0.push(d);
                m &= m - 1;
            }
        }
        for (o, &mask) in obs.iter().enumerate() {
            let mut m = mask;
            while m != 0 {
                let lane = m.trailing_zeros() as usize;
                lanes[lane].1 |= 1 << o;
                m &= m - 1;
            }
        }
        out.extend(lanes);
    }
    out
}

/// Copy of `graph` in which every erased edge has probability 1/2 and weight 0.
pub fn reweight_for_erasure(graph: &DecodingGraph, erasure: &super::ErasureSet) -> DecodingGraph {
    let mut g = graph.clone();
    for &e in erasure.edges() {
        if let Some(edge) = g.edges.get_mut(e) {
            edge.prob = 0.5;
            edge.weight = 0.0;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::PauliChannel;
    use crate::circuit::{build_code_capacity_circuit, CheckSpec, SiteNoise};
    use crate::code::{build_rotated_surface_code, syndrome_of, CheckBasis};
    use crate::pauli::PauliOp;
    use std::collections::BTreeSet;

    #[test]
    fn noiseless_circuit_has_no_edges() {
        let code = build_rotated_surface_code(3).unwrap();
        let c = build_code_capacity_circuit(&code, &SiteNoise::NONE, &CheckSpec::PERFECT, CheckBasis::Z)
            .unwrap();
        let g = build_decoding_graph(&c).unwrap();
        assert!(g.edges.is_empty());
        assert_eq!(g.num_vertices(), 9);
    }

    #[test]
    fn bit_flip_graph_matches_syndrome_enumeration() {
        let code = build_rotated_surface_code(3).unwrap();
        let noise = SiteNoise::with_pauli(0.0, 0.1, 0.0, 0.0).unwrap();
        let c = build_code_capacity_circuit(&code, &noise, &CheckSpec::PERFECT, CheckBasis::Z)
            .unwrap();
        let g = build_decoding_graph(&c).unwrap();

        // Oracle: one edge per distinct (syndrome, logical flip) of single X faults.
        let mut want = BTreeSet::new();
        for q in 0..9 {
            let e = PauliOp::single(9, q, Pauli::X);
            let s: Vec<usize> = syndrome_of(&code, &e)
                .unwrap()
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect();
            let flips = code.logical_z.anticommutes(&e).unwrap() as u64;
            let (u, v) = match s.len() {
                1 => (s[0], 8),
                2 => (s[0], s[1]),
                _ => unreachable!(),
            };
            want.insert((u, v, flips));
        }
        let got: BTreeSet<_> = g.edges.iter().map(|e| (e.u, e.v, e.obs_mask)).collect();
        assert_eq!(got, want);
        assert!(g.edges.iter().all(|e| e.u >= 4 && e.u < 8));
    }

    #[test]
    fn parallel_faults_merge() {
        let mut c = Circuit::new(2);
        c.gate(Gate::Reset, &[0, 1]).unwrap();
        let ch = PauliChannel::new(0.9, 0.1, 0.0, 0.0).unwrap();
        c.noise(0, 0.0, ch).unwrap();
        c.noise(0, 0.0, ch).unwrap();
        c.gate(Gate::CX, &[0, 1]).unwrap();
        let m = c.measure(&[1]).unwrap();
        c.detector(&m).unwrap();
        let g = build_decoding_graph(&c).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert!((g.edges[0].prob - 2.0 * 0.1 * 0.9).abs() < 1e-15);
        assert_eq!(g.edges[0].source_ids, vec![1, 2]);
    }

    #[test]
    fn checks_map_to_their_edges() {
        let code = build_rotated_surface_code(3).unwrap();
        let noise = SiteNoise::new(0.1, 0.0).unwrap();
        let c = build_code_capacity_circuit(&code, &noise, &CheckSpec::PERFECT, CheckBasis::X)
            .unwrap();
        let g = build_decoding_graph(&c).unwrap();
        assert_eq!(g.check_edges.len(), 9);
        for (q, edges) in g.check_edges.iter().enumerate() {
            // Both conversion components are detected, one per check type.
            assert_eq!(edges.len(), 2, "qubit {q}");
        }
        for e in &g.edges {
            assert!(e.prob >= 0.05 - 1e-15);
        }
    }

    #[test]
    fn weights() {
        assert_eq!(edge_weight(0.5), 0.0);
        assert_eq!(edge_weight(0.7), 0.0);
        assert!((edge_weight(0.1) - 9f64.ln()).abs() < 1e-15);
        assert!(edge_weight(0.0).is_finite());
    }
}
