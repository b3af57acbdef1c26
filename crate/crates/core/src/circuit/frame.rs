//! Pauli-frame sampling with erasure marks.
//!
//! Each shot tracks the difference between the noisy run and the noiseless
//! reference as one X and one Z bit per qubit. Detectors and observables are
//! parities of measurement flips, which is exact whenever the noiseless
//! circuit makes them deterministic.
//!
//! Erasure model:
//! - a noise-site erasure marks the qubit; the frame is left alone;
//! - a CX with exactly one marked qubit does nothing to the frames and applies
//!   a random Pauli from the conversion channel to the unmarked partner;
//! - a marked qubit reads out a uniformly random bit;
//! - a check that heralds a marked qubit emits its id, applies the conversion
//!   channel and clears the mark; a missed erasure stays marked;
//! - a false positive emits the id and either applies the conversion channel
//!   (one-way reset) or marks the good qubit (unitary reset);
//! - `R` clears the mark.

use std::collections::BTreeSet;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ir::{CheckSpec, Circuit, Gate, Instruction};
use crate::channel::{ConversionMode, PauliChannel, ResetProtocol};
use crate::error::Result;
use crate::pauli::Pauli;

/// Result of one noise site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseEvent {
    None,
    Erase,
    Pauli(Pauli),
}

/// Supplies every stochastic decision the frame simulator makes.
pub trait FaultSource {
    fn noise(&mut self, instr: usize, erasure: f64, pauli: &PauliChannel) -> NoiseEvent;
    /// Whether the check at `instr` raises its flag.
    fn check(&mut self, instr: usize, spec: &CheckSpec, marked: bool) -> bool;
    /// Pauli applied by erasure conversion on `qubit` at `instr`.
    fn conversion(&mut self, instr: usize, qubit: usize, mode: ConversionMode) -> Pauli;
    fn measure_flip(&mut self, instr: usize, p: f64) -> bool;
    /// Readout of a marked qubit, relative to the noiseless outcome.
    fn leaked_readout(&mut self, instr: usize, qubit: usize) -> bool;
    /// Gauge bit with no effect on deterministic detectors.
    fn coin(&mut self) -> bool;
}

/// Counter-based RNG stream for one shot.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Faults drawn from the circuit's probabilities.
pub struct RandomFaults<R> {
    rng: R,
    bits: u64,
    left: u32,
}

impl<R: RngCore> RandomFaults<R> {
    pub fn new(rng: R) -> Self {
        Self {
            rng,
            bits: 0,
            left: 0,
        }
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

impl<R: RngCore> FaultSource for RandomFaults<R> {
    fn noise(&mut self, _instr: usize, erasure: f64, pauli: &PauliChannel) -> NoiseEvent {
        let rate = pauli.error_rate();
        if erasure == 0.0 && rate == 0.0 {
            return NoiseEvent::None;
        }
        let u = self.uniform();
        if u < erasure {
            return NoiseEvent::Erase;
        }
        match pauli.sample(u - erasure) {
            Pauli::I => NoiseEvent::None,
            p => NoiseEvent::Pauli(p),
        }
    }

    fn check(&mut self, _instr: usize, spec: &CheckSpec, marked: bool) -> bool {
        let threshold = if marked { 1.0 - spec.f_neg } else { spec.f_pos };
        if threshold <= 0.0 {
            false
        } else if threshold >= 1.0 {
            true
        } else {
            self.uniform() < threshold
        }
    }

    fn conversion(&mut self, _instr: usize, _qubit: usize, mode: ConversionMode) -> Pauli {
        match mode {
            ConversionMode::Mixed => Pauli::from_bits(self.coin(), self.coin()),
            ConversionMode::Biased => Pauli::from_bits(false, self.coin()),
        }
    }

    fn measure_flip(&mut self, _instr: usize, p: f64) -> bool {
        p > 0.0 && self.uniform() < p
    }

    fn leaked_readout(&mut self, _instr: usize, _qubit: usize) -> bool {
        self.coin()
    }

    fn coin(&mut self) -> bool {
        if self.left == 0 {
            self.bits = self.rng.next_u64();
            self.left = 64;
        }
        let b = self.bits & 1 == 1;
        self.bits >>= 1;
        self.left -= 1;
        b
    }
}

/// Explicit fault placement, keyed by instruction index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErrorAssignment {
    /// Pauli applied at a noise site.
    pub paulis: std::collections::BTreeMap<usize, Pauli>,
    /// Noise sites that erase their qubit.
    pub erasures: BTreeSet<usize>,
    /// Pauli chosen by erasure conversion at a check or a CX partner, keyed by
    /// `(instruction, qubit)`. Missing entries mean identity.
    pub conversions: std::collections::BTreeMap<(usize, usize), Pauli>,
    /// `MFLIP` instructions that fire.
    pub flips: BTreeSet<usize>,
    /// Checks that miss a marked qubit.
    pub missed_checks: BTreeSet<usize>,
    /// Checks that flag a good qubit.
    pub false_flags: BTreeSet<usize>,
    /// Measurements `(instruction, qubit)` of marked qubits that read 1.
    pub leaked_ones: BTreeSet<(usize, usize)>,
}

impl ErrorAssignment {
    pub fn is_pauli_only(&self) -> bool {
        self.erasures.is_empty() && self.false_flags.is_empty()
    }
}

/// Replays an [`ErrorAssignment`]; gauge coins come from a seeded stream.
pub struct ForcedFaults<'a> {
    assignment: &'a ErrorAssignment,
    coins: RandomFaults<ChaCha8Rng>,
}

impl<'a> ForcedFaults<'a> {
    pub fn new(assignment: &'a ErrorAssignment, gauge_seed: u64) -> Self {
        Self {
            assignment,
            coins: RandomFaults::new(ChaCha8Rng::seed_from_u64(gauge_seed)),
        }
    }
}

impl FaultSource for ForcedFaults<'_> {
    fn noise(&mut self, instr: usize, _erasure: f64, _pauli: &PauliChannel) -> NoiseEvent {
        if self.assignment.erasures.contains(&instr) {
            return NoiseEvent::Erase;
        }
        match self.assignment.paulis.get(&instr) {
            Some(&p) if p != Pauli::I => NoiseEvent::Pauli(p),
            _ => NoiseEvent::None,
        }
    }

    fn check(&mut self, instr: usize, _spec: &CheckSpec, marked: bool) -> bool {
        if marked {
            !self.assignment.missed_checks.contains(&instr)
        } else {
            self.assignment.false_flags.contains(&instr)
        }
    }

    fn conversion(&mut self, instr: usize, qubit: usize, _mode: ConversionMode) -> Pauli {
        self.assignment
            .conversions
            .get(&(instr, qubit))
            .copied()
            .unwrap_or(Pauli::I)
    }

    fn measure_flip(&mut self, instr: usize, _p: f64) -> bool {
        self.assignment.flips.contains(&instr)
    }

    fn leaked_readout(&mut self, instr: usize, qubit: usize) -> bool {
        self.assignment.leaked_ones.contains(&(instr, qubit))
    }

    fn coin(&mut self) -> bool {
        self.coins.coin()
    }
}

/// Detector bits, heralded check ids and observable bits of one shot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShotRecord {
    pub detectors: Vec<bool>,
    /// Ids of checks that flagged, ascending.
    pub flags: Vec<usize>,
    pub observables: Vec<bool>,
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn string_to_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

/// JSONL form of a shot: `{"shot":i,"detectors":"011…","flags":[…],"obs":"0"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotLine {
    pub shot: u64,
    pub detectors: String,
    pub flags: Vec<usize>,
    pub obs: String,
}

impl ShotRecord {
    /// Indices of detectors that fired.
    pub fn fired(&self) -> Vec<usize> {
        self.detectors
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    pub fn to_line(&self, shot: u64) -> ShotLine {
        ShotLine {
            shot,
            detectors: bits_to_string(&self.detectors),
            flags: self.flags.clone(),
            obs: bits_to_string(&self.observables),
        }
    }

    pub fn from_line(line: &ShotLine) -> Option<ShotRecord> {
        Some(ShotRecord {
            detectors: string_to_bits(&line.detectors)?,
            flags: line.flags.clone(),
            observables: string_to_bits(&line.obs)?,
        })
    }
}

/// Reusable per-worker frame state for one circuit.
pub struct FrameSimulator<'c> {
    circuit: &'c Circuit,
    partner_mode: Vec<ConversionMode>,
    forced_flags: Vec<bool>,
    x: Vec<bool>,
    z: Vec<bool>,
    marked: Vec<bool>,
    pending_flip: Vec<bool>,
    meas: Vec<bool>,
}

impl<'c> FrameSimulator<'c> {
    pub fn new(circuit: &'c Circuit) -> Self {
        let n = circuit.num_qubits();
        let mut partner_mode: Vec<Option<ConversionMode>> = vec![None; n];
        for instr in circuit.instructions() {
            if let Instruction::ErasureCheck { qubit, spec, .. } = instr {
                partner_mode[*qubit].get_or_insert(spec.conversion);
            }
        }
        Self {
            circuit,
            partner_mode: partner_mode
                .into_iter()
                .map(|m| m.unwrap_or(ConversionMode::Mixed))
                .collect(),
            forced_flags: vec![false; circuit.num_checks()],
            x: vec![false; n],
            z: vec![false; n],
            marked: vec![false; n],
            pending_flip: vec![false; n],
            meas: Vec::with_capacity(circuit.num_measurements()),
        }
    }

    /// Checks listed here always flag, as if their qubit had just been erased.
    pub fn force_flags(&mut self, ids: &BTreeSet<usize>) {
        for &id in ids {
            if id < self.forced_flags.len() {
                self.forced_flags[id] = true;
            }
        }
    }

    fn apply(&mut self, q: usize, p: Pauli) {
        self.x[q] ^= p.x_bit();
        self.z[q] ^= p.z_bit();
    }

    pub fn run<F: FaultSource>(&mut self, src: &mut F) -> ShotRecord {
        let circuit = self.circuit;
        self.x.fill(false);
        self.z.fill(false);
        self.marked.fill(false);
        self.pending_flip.fill(false);
        self.meas.clear();
        let mut out = ShotRecord {
            detectors: Vec::with_capacity(circuit.num_detectors()),
            flags: Vec::new(),
            observables: vec![false; circuit.num_observables()],
        };
        for (idx, instr) in circuit.instructions().iter().enumerate() {
            match instr {
                Instruction::Gate { gate, targets } => match gate {
                    Gate::CX => {
                        for pair in targets.chunks_exact(2) {
                            let (c, t) = (pair[0], pair[1]);
                            match (self.marked[c], self.marked[t]) {
                                (false, false) => {
                                    self.x[t] ^= self.x[c];
                                    self.z[c] ^= self.z[t];
                                }
                                (true, false) => {
                                    let p = src.conversion(idx, t, self.partner_mode[c]);
                                    self.apply(t, p);
                                }
                                (false, true) => {
                                    let p = src.conversion(idx, c, self.partner_mode[t]);
                                    self.apply(c, p);
                                }
                                (true, true) => {}
                            }
                        }
                    }
                    Gate::H => {
                        for &q in targets {
                            std::mem::swap(&mut self.x[q], &mut self.z[q]);
                        }
                    }
                    Gate::Reset => {
                        for &q in targets {
                            self.x[q] = false;
                            self.z[q] = src.coin();
                            self.marked[q] = false;
                            self.pending_flip[q] = false;
                        }
                    }
                    Gate::MeasureZ => {
                        for &q in targets {
                            let mut bit = self.x[q] ^ self.pending_flip[q];
                            if self.marked[q] {
                                bit = src.leaked_readout(idx, q);
                            }
                            self.pending_flip[q] = false;
                            self.meas.push(bit);
                            self.z[q] ^= src.coin();
                        }
                    }
                },
                Instruction::Noise {
                    qubit,
                    erasure,
                    pauli,
                } => match src.noise(idx, *erasure, pauli) {
                    NoiseEvent::None => {}
                    NoiseEvent::Erase => self.marked[*qubit] = true,
                    NoiseEvent::Pauli(p) => self.apply(*qubit, p),
                },
                Instruction::ErasureCheck { qubit, spec, id } => {
                    let q = *qubit;
                    let marked = self.marked[q] || self.forced_flags[*id];
                    let flagged = self.forced_flags[*id] || src.check(idx, spec, marked);
                    if !flagged {
                        continue;
                    }
                    out.flags.push(*id);
                    if marked || spec.reset == ResetProtocol::OneWay {
                        let p = src.conversion(idx, q, spec.conversion);
                        self.apply(q, p);
                        self.marked[q] = false;
                    } else {
                        self.marked[q] = true;
                    }
                }
                Instruction::MeasureFlip { qubit, p } => {
                    if src.measure_flip(idx, *p) {
                        self.pending_flip[*qubit] ^= true;
                    }
                }
                Instruction::Detector { measurements } => {
                    let bit = measurements.iter().fold(false, |acc, &m| acc ^ self.meas[m]);
                    out.detectors.push(bit);
                }
                Instruction::Observable {
                    index,
                    measurements,
                } => {
                    let bit = measurements.iter().fold(false, |acc, &m| acc ^ self.meas[m]);
                    out.observables[*index] ^= bit;
                }
            }
        }
        out
    }
}

/// Samples `n_shots` shots; shot `i` uses the stream [`shot_rng`]`(seed, i)`.
pub fn sample_shots(circuit: &Circuit, n_shots: usize, seed: u64) -> Result<Vec<ShotRecord>> {
    let mut sim = FrameSimulator::new(circuit);
    Ok((0..n_shots as u64)
        .map(|i| sim.run(&mut RandomFaults::new(shot_rng(seed, i))))
        .collect())
}

/// Runs one shot with explicitly placed faults.
pub fn run_forced(circuit: &Circuit, assignment: &ErrorAssignment, gauge_seed: u64) -> ShotRecord {
    FrameSimulator::new(circuit).run(&mut ForcedFaults::new(assignment, gauge_seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build::{build_code_capacity_circuit, SiteNoise};
    use crate::code::{build_d2_surface_code, build_rotated_surface_code, CheckBasis};

    #[test]
    fn noiseless_shots_are_silent() {
        let code = build_rotated_surface_code(3).unwrap();
        let c = build_code_capacity_circuit(&code, &SiteNoise::NONE, &CheckSpec::PERFECT, CheckBasis::Z)
            .unwrap();
        for shot in sample_shots(&c, 200, 1).unwrap() {
            assert!(shot.detectors.iter().all(|&b| !b));
            assert!(shot.flags.is_empty());
            assert_eq!(shot.observables, vec![false]);
        }
    }

    #[test]
    fn injected_x_on_d1_gives_010() {
        let code = build_d2_surface_code();
        let c = build_code_capacity_circuit(&code, &SiteNoise::NONE, &CheckSpec::PERFECT, CheckBasis::Z)
            .unwrap();
        let site = c
            .instructions()
            .iter()
            .position(|i| matches!(i, Instruction::Noise { qubit: 0, .. }))
            .unwrap();
        let mut a = ErrorAssignment::default();
        a.paulis.insert(site, Pauli::X);
        let rec = run_forced(&c, &a, 3);
        assert_eq!(rec.detectors, vec![false, true, false]);
    }

    #[test]
    fn same_seed_same_stream() {
        let code = build_rotated_surface_code(3).unwrap();
        let c = build_code_capacity_circuit(
            &code,
            &SiteNoise::new(0.2, 0.05).unwrap(),
            &CheckSpec::PERFECT,
            CheckBasis::X,
        )
        .unwrap();
        let a = sample_shots(&c, 300, 99).unwrap();
        let b = sample_shots(&c, 300, 99).unwrap();
        assert_eq!(a, b);
        let other = sample_shots(&c, 300, 100).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn forced_flag_always_present() {
        let code = build_rotated_surface_code(3).unwrap();
        let c = build_code_capacity_circuit(&code, &SiteNoise::NONE, &CheckSpec::PERFECT, CheckBasis::X)
            .unwrap();
        let mut sim = FrameSimulator::new(&c);
        sim.force_flags(&BTreeSet::from([4]));
        for i in 0..50 {
            let rec = sim.run(&mut RandomFaults::new(shot_rng(5, i)));
            assert_eq!(rec.flags, vec![4]);
        }
    }

    #[test]
    fn shot_line_round_trip() {
        let rec = ShotRecord {
            detectors: vec![false, true, true],
            flags: vec![2, 7],
            observables: vec![true],
        };
        let line = rec.to_line(12);
        let json = serde_json::to_string(&line).unwrap();
        assert_eq!(
            json,
            r#"{"shot":12,"detectors":"011","flags":[2,7],"obs":"1"}"#
        );
        let back: ShotLine = serde_json::from_str(&json).unwrap();
        assert_eq!(ShotRecord::from_line(&back).unwrap(), rec);
    }
}
