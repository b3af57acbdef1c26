//! Comparison of missed erasures, Pauli errors and heralded erasures at equal
//! rates.

use serde::{Deserialize, Serialize};

use super::experiment::{derive_seed, estimate_logical_error, EstimateRow, NoiseModel, NoisePoint};
use super::stats::binomial_sigma;
use crate::circuit::{run_forced, Circuit, ErrorAssignment, Gate, Instruction};
use crate::code::CheckBasis;
use crate::decoder::{build_decoding_graph, DecoderKind, DecodingGraph, ErasureSet};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyReport {
    pub d: usize,
    pub rate: f64,
    /// Erasures that no check ever flags.
    pub missed: EstimateRow,
    pub pauli: EstimateRow,
    /// Erasures flagged by every check.
    pub heralded: EstimateRow,
    /// `(p_missed - p_pauli) / sigma` with the two errors added in quadrature.
    pub gap_missed_pauli: f64,
    pub gap_pauli_heralded: f64,
}

impl HierarchyReport {
    /// Strict ordering with both gaps at least `sigmas`.
    pub fn ordered(&self, sigmas: f64) -> bool {
        self.gap_missed_pauli >= sigmas && self.gap_pauli_heralded >= sigmas
    }
}

fn gap(a: &EstimateRow, b: &EstimateRow) -> f64 {
    let s = binomial_sigma(a.failures, a.shots).hypot(binomial_sigma(b.failures, b.shots));
    let diff = a.p_l - b.p_l;
    if s == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    } else {
        diff / s
    }
}

/// The three code-capacity points sharing `d`, `rate` and decoder.
pub fn hierarchy_points(d: usize, rate: f64, decoder: DecoderKind) -> [NoisePoint; 3] {
    let base = NoisePoint {
        model: NoiseModel::CodeCapacity,
        d,
        decoder,
        ..Default::default()
    };
    [
        NoisePoint {
            e: rate,
            f_neg: 1.0,
            ..base
        },
        NoisePoint { p: rate, ..base },
        NoisePoint { e: rate, ..base },
    ]
}

/// Estimates all three points with `shots` each.
pub fn hierarchy_experiment(
    d: usize,
    rate: f64,
    shots: u64,
    seed: u64,
    decoder: DecoderKind,
) -> Result<HierarchyReport> {
    let [a, b, c] = hierarchy_points(d, rate, decoder);
    let missed = estimate_logical_error(&a, shots, derive_seed(seed, 0))?;
    let pauli = estimate_logical_error(&b, shots, derive_seed(seed, 1))?;
    let heralded = estimate_logical_error(&c, shots, derive_seed(seed, 2))?;
    Ok(HierarchyReport {
        d,
        rate,
        gap_missed_pauli: gap(&missed, &pauli),
        gap_pauli_heralded: gap(&pauli, &heralded),
        missed,
        pauli,
        heralded,
    })
}

/// Outcome counts for one class of single injected events.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    pub events: u64,
    /// A detector fired or a check flagged.
    pub detected: u64,
    /// The decoded observable disagrees with the actual one.
    pub failures: u64,
    /// Nothing fired, yet the logical observable flipped.
    pub undetected_failures: u64,
}

/// Single-event census on one data-noise site per data qubit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub heralded: EventCounts,
    pub pauli: EventCounts,
    pub missed: EventCounts,
}

fn tally(counts: &mut EventCounts, graph: &DecodingGraph, decoder: DecoderKind, shot: &crate::circuit::ShotRecord) -> Result<()> {
    counts.events += 1;
    let fired = !shot.flags.is_empty() || shot.detectors.iter().any(|&b| b);
    if fired {
        counts.detected += 1;
    } else if shot.observables[0] {
        counts.undetected_failures += 1;
    }
    let erasure = ErasureSet::from_flags(graph, &shot.flags);
    let correction = decoder.build().decode(graph, &erasure, &shot.detectors)?;
    counts.failures += (correction.flips(0) != shot.observables[0]) as u64;
    Ok(())
}

/// Every `(instruction, partner)` CX slot and `(instruction, qubit)` readout
/// touched by `qubit` after instruction `from`, up to its next check.
fn leak_slots(circuit: &Circuit, qubit: usize, from: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let mut cx = Vec::new();
    let mut reads = Vec::new();
    for (idx, instr) in circuit.instructions().iter().enumerate().skip(from + 1) {
        match instr {
            Instruction::Gate { gate: Gate::CX, targets } => {
                for pair in targets.chunks_exact(2) {
                    if pair[0] == qubit {
                        cx.push((idx, pair[1]));
                    } else if pair[1] == qubit {
                        cx.push((idx, pair[0]));
                    }
                }
            }
            Instruction::Gate { gate: Gate::MeasureZ, targets } if targets.contains(&qubit) => {
                reads.push((idx, qubit));
            }
            Instruction::Gate { gate: Gate::Reset, targets } if targets.contains(&qubit) => break,
            _ => {}
        }
    }
    (cx, reads)
}

/// Injects one event at each data-noise site of the four-qubit code in the
/// given memory basis and decodes it:
/// - a heralded erasure with every conversion Pauli;
/// - each of X, Y and Z;
/// - a missed erasure with every choice of partner Paulis and leaked readouts.
pub fn d2_single_event_census(basis: CheckBasis, decoder: DecoderKind) -> Result<Census> {
    let point = NoisePoint {
        model: NoiseModel::CodeCapacity,
        d: 2,
        e: 0.05,
        p: 0.05,
        f_neg: 0.1,
        basis,
        decoder,
        ..Default::default()
    };
    let circuit = point.circuit()?;
    let graph = build_decoding_graph(&circuit)?;
    let mut census = Census::default();
    let sites: Vec<(usize, usize)> = circuit
        .instructions()
        .iter()
        .enumerate()
        .filter_map(|(i, instr)| match instr {
            Instruction::Noise { qubit, .. } => Some((i, *qubit)),
            _ => None,
        })
        .collect();
    let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for &(site, q) in &sites {
        let check = circuit
            .instructions()
            .iter()
            .enumerate()
            .skip(site)
            .find_map(|(i, instr)| match instr {
                Instruction::ErasureCheck { qubit, .. } if *qubit == q => Some(i),
                _ => None,
            })
            .ok_or_else(|| Error::Precondition(format!("no check follows noise site {site}")))?;

        for p in paulis {
            let mut a = ErrorAssignment::default();
            a.erasures.insert(site);
            a.conversions.insert((check, q), p);
            tally(&mut census.heralded, &graph, decoder, &run_forced(&circuit, &a, 0))?;
        }
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let mut a = ErrorAssignment::default();
            a.paulis.insert(site, p);
            tally(&mut census.pauli, &graph, decoder, &run_forced(&circuit, &a, 0))?;
        }
        let (cx, reads) = leak_slots(&circuit, q, check);
        let combos = 4usize.pow(cx.len() as u32) << reads.len();
        for k in 0..combos {
            let mut a = ErrorAssignment::default();
            a.erasures.insert(site);
            a.missed_checks.insert(check);
            let mut rest = k;
            for &slot in &reads {
                if rest & 1 == 1 {
                    a.leaked_ones.insert(slot);
                }
                rest >>= 1;
            }
            for &slot in &cx {
                a.conversions.insert(slot, paulis[rest % 4]);
                rest /= 4;
            }
            tally(&mut census.missed, &graph, decoder, &run_forced(&circuit, &a, 0))?;
        }
    }
    Ok(census)
}
