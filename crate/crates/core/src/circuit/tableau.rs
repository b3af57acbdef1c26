//! Aaronson–Gottesman stabilizer tableau, used as a slow reference for the
//! frame sampler.
//!
//! Unlike the frame sampler this tracks the full state, so detector values are
//! absolute rather than relative to a noiseless run. Random measurement
//! outcomes are drawn from a seeded stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::frame::ErrorAssignment;
use super::ir::{Circuit, Gate, Instruction};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Rows `0..n` are destabilizers, `n..2n` stabilizers, `2n` is scratch.
struct Tableau {
    n: usize,
    x: Vec<Vec<bool>>,
    z: Vec<Vec<bool>>,
    r: Vec<bool>,
}

impl Tableau {
    fn new(n: usize) -> Self {
        let mut x = vec![vec![false; n]; 2 * n + 1];
        let mut z = vec![vec![false; n]; 2 * n + 1];
        for i in 0..n {
            x[i][i] = true;
            z[n + i][i] = true;
        }
        Self {
            n,
            x,
            z,
            r: vec![false; 2 * n + 1],
        }
    }

    fn cx(&mut self, a: usize, b: usize) {
        for i in 0..2 * self.n {
            let (xa, xb, za, zb) = (self.x[i][a], self.x[i][b], self.z[i][a], self.z[i][b]);
            self.r[i] ^= xa & zb & !(xb ^ za);
            self.x[i][b] = xb ^ xa;
            self.z[i][a] = za ^ zb;
        }
    }

    fn h(&mut self, a: usize) {
        for i in 0..2 * self.n {
            self.r[i] ^= self.x[i][a] & self.z[i][a];
            std::mem::swap(&mut self.x[i][a], &mut self.z[i][a]);
        }
    }

    fn pauli(&mut self, a: usize, p: Pauli) {
        for i in 0..2 * self.n {
            if p.x_bit() {
                self.r[i] ^= self.z[i][a];
            }
            if p.z_bit() {
                self.r[i] ^= self.x[i][a];
            }
        }
    }

    /// Phase exponent contribution of multiplying single-qubit Paulis.
    fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
        match (x1, z1) {
            (false, false) => 0,
            (true, true) => z2 as i32 - x2 as i32,
            (true, false) => (z2 as i32) * (2 * x2 as i32 - 1),
            (false, true) => (x2 as i32) * (1 - 2 * z2 as i32),
        }
    }

    /// Row `h` <- row `i` * row `h`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut sum = 2 * self.r[h] as i32 + 2 * self.r[i] as i32;
        for j in 0..self.n {
            sum += Self::g(self.x[i][j], self.z[i][j], self.x[h][j], self.z[h][j]);
        }
        self.r[h] = sum.rem_euclid(4) == 2;
        for j in 0..self.n {
            let (xi, zi) = (self.x[i][j], self.z[i][j]);
            self.x[h][j] ^= xi;
            self.z[h][j] ^= zi;
        }
    }

    fn measure(&mut self, a: usize, rng: &mut ChaCha8Rng) -> bool {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&p| self.x[p][a]) {
            for i in 0..2 * n {
                if i != p && self.x[i][a] {
                    self.rowsum(i, p);
                }
            }
            self.x[p - n] = self.x[p].clone();
            self.z[p - n] = self.z[p].clone();
            self.r[p - n] = self.r[p];
            self.x[p].fill(false);
            self.z[p].fill(false);
            self.z[p][a] = true;
            let outcome = rng.random::<bool>();
            self.r[p] = outcome;
            outcome
        } else {
            let s = 2 * n;
            self.x[s].fill(false);
            self.z[s].fill(false);
            self.r[s] = false;
            for i in 0..n {
                if self.x[i][a] {
                    self.rowsum(s, i + n);
                }
            }
            self.r[s]
        }
    }

    fn reset(&mut self, a: usize, rng: &mut ChaCha8Rng) {
        if self.measure(a, rng) {
            self.pauli(a, Pauli::X);
        }
    }
}

/// Absolute detector and observable values of one tableau run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableauOutcome {
    pub measurements: Vec<bool>,
    pub detectors: Vec<bool>,
    pub observables: Vec<bool>,
}

/// Runs `circuit` with the Pauli faults and measurement flips of `assignment`.
///
/// Erasures have no tableau meaning and are refused, as are false flags.
/// Erasure checks are otherwise no-ops since no qubit is ever marked.
pub fn tableau_reference_sim(
    circuit: &Circuit,
    assignment: &ErrorAssignment,
    seed: u64,
) -> Result<TableauOutcome> {
    if !assignment.is_pauli_only() {
        return Err(Error::Unsupported(
            "the tableau reference only supports Pauli faults and measurement flips".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tableau::new(circuit.num_qubits());
    let mut pending = vec![false; circuit.num_qubits()];
    let mut out = TableauOutcome {
        measurements: Vec::with_capacity(circuit.num_measurements()),
        detectors: Vec::with_capacity(circuit.num_detectors()),
        observables: vec![false; circuit.num_observables()],
    };
    for (idx, instr) in circuit.instructions().iter().enumerate() {
        match instr {
            Instruction::Gate { gate, targets } => match gate {
                Gate::CX => {
                    for pair in targets.chunks_exact(2) {
                        t.cx(pair[0], pair[1]);
                    }
                }
                Gate::H => targets.iter().for_each(|&q| t.h(q)),
                Gate::Reset => {
                    for &q in targets {
                        t.reset(q, &mut rng);
                        pending[q] = false;
                    }
                }
                Gate::MeasureZ => {
                    for &q in targets {
                        let bit = t.measure(q, &mut rng) ^ pending[q];
                        pending[q] = false;
                        out.measurements.push(bit);
                    }
                }
            },
            Instruction::Noise { qubit, .. } => {
                if let Some(&p) = assignment.paulis.get(&idx) {
                    t.pauli(*qubit, p);
                }
            }
            Instruction::ErasureCheck { .. } => {}
            Instruction::MeasureFlip { qubit, .. } => {
                if assignment.flips.contains(&idx) {
                    pending[*qubit] ^= true;
                }
            }
            Instruction::Detector { measurements } => {
                let bit = measurements
                    .iter()
                    .fold(false, |acc, &m| acc ^ out.measurements[m]);
                out.detectors.push(bit);
            }
            Instruction::Observable {
                index,
                measurements,
            } => {
                let bit = measurements
                    .iter()
                    .fold(false, |acc, &m| acc ^ out.measurements[m]);
                out.observables[*index] ^= bit;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build::{build_phenomenological_circuit, SiteNoise};
    use crate::circuit::ir::CheckSpec;
    use crate::code::{build_rotated_surface_code, syndrome_of, CheckBasis};
    use crate::pauli::PauliOp;

    #[test]
    fn bell_pair_measurements_agree() {
        let mut c = Circuit::new(2);
        c.gate(Gate::Reset, &[0, 1]).unwrap();
        c.gate(Gate::H, &[0]).unwrap();
        c.gate(Gate::CX, &[0, 1]).unwrap();
        let m = c.measure(&[0, 1]).unwrap();
        c.detector(&m).unwrap();
        for seed in 0..20 {
            let out = tableau_reference_sim(&c, &ErrorAssignment::default(), seed).unwrap();
            assert_eq!(out.detectors, vec![false]);
        }
    }

    #[test]
    fn y_flips_z_measurement() {
        let mut c = Circuit::new(1);
        c.gate(Gate::Reset, &[0]).unwrap();
        c.noise(0, 0.0, crate::channel::PauliChannel::IDENTITY).unwrap();
        c.measure(&[0]).unwrap();
        let mut a = ErrorAssignment::default();
        a.paulis.insert(1, Pauli::Y);
        let out = tableau_reference_sim(&c, &a, 0).unwrap();
        assert_eq!(out.measurements, vec![true]);
    }

    #[test]
    fn x_on_center_flips_two_z_detectors() {
        let code = build_rotated_surface_code(3).unwrap();
        let c = build_phenomenological_circuit(
            &code,
            3,
            &SiteNoise::new(0.0, 0.3).unwrap(),
            &CheckSpec::PERFECT,
            0.0,
            CheckBasis::Z,
        )
        .unwrap();
        let site = c
            .instructions()
            .iter()
            .position(|i| matches!(i, Instruction::Noise { qubit: 4, .. }))
            .unwrap();
        let mut a = ErrorAssignment::default();
        a.paulis.insert(site, Pauli::X);
        let out = tableau_reference_sim(&c, &a, 4).unwrap();
        let m = code.num_stabilizers();
        let expected = syndrome_of(&code, &PauliOp::single(9, 4, Pauli::X)).unwrap();
        assert_eq!(out.detectors[..m], expected[..]);
        assert!(out.detectors[m..].iter().all(|&b| !b));
        assert_eq!(expected.iter().filter(|&&b| b).count(), 2);
    }

    #[test]
    fn erasures_refused() {
        let c = Circuit::new(1);
        let mut a = ErrorAssignment::default();
        a.erasures.insert(0);
        assert!(tableau_reference_sim(&c, &a, 0).is_err());
    }
}
