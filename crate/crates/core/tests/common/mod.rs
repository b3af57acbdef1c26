#![allow(dead_code)]

use erasure_qec::circuit::{build_code_capacity_circuit, run_forced, CheckSpec, Circuit, ErrorAssignment, Instruction, ShotRecord, SiteNoise};
use erasure_qec::code::{build_d2_surface_code, build_rotated_surface_code, CheckBasis, StabilizerCode};
use erasure_qec::decoder::{build_decoding_graph, DecodingGraph};
use erasure_qec::pauli::{Pauli, PauliOp};

/// Code-capacity circuit with fault locations indexed by data qubit.
pub struct Bench {
    pub code: StabilizerCode,
    pub basis: CheckBasis,
    pub circuit: Circuit,
    pub graph: DecodingGraph,
    /// Noise instruction of each data qubit.
    pub noise: Vec<usize>,
    /// `(instruction, check id)` of each data qubit's erasure check.
    pub check: Vec<(usize, usize)>,
}

impl Bench {
    pub fn new(d: usize, basis: CheckBasis, e: f64, p: f64) -> Self {
        let code = if d == 2 {
            build_d2_surface_code()
        } else {
            build_rotated_surface_code(d).unwrap()
        };
        let circuit =
            build_code_capacity_circuit(&code, &SiteNoise::new(e, p).unwrap(), &CheckSpec::PERFECT, basis).unwrap();
        let graph = build_decoding_graph(&circuit).unwrap();
        let mut noise = vec![usize::MAX; code.n];
        let mut check = vec![(usize::MAX, usize::MAX); code.n];
        for (i, instr) in circuit.instructions().iter().enumerate() {
            match instr {
                Instruction::Noise { qubit, .. } if *qubit < code.n => noise[*qubit] = i,
                Instruction::ErasureCheck { qubit, id, .. } if *qubit < code.n => check[*qubit] = (i, *id),
                _ => {}
            }
        }
        assert!(noise.iter().all(|&i| i != usize::MAX));
        Self {
            code,
            basis,
            circuit,
            graph,
            noise,
            check,
        }
    }

    /// Shot for Pauli `error` with the qubits in `erased` heralded; erased
    /// qubits carry their part of `error` as the conversion outcome.
    pub fn shot(&self, error: &PauliOp, erased: &[usize]) -> ShotRecord {
        let mut a = ErrorAssignment::default();
        for q in 0..self.code.n {
            let p = error.get(q);
            if erased.contains(&q) {
                a.erasures.insert(self.noise[q]);
                a.conversions.insert((self.check[q].0, q), p);
            } else if p != Pauli::I {
                a.paulis.insert(self.noise[q], p);
            }
        }
        run_forced(&self.circuit, &a, 0)
    }

    /// Whether `error` flips the memory observable.
    pub fn flips_observable(&self, error: &PauliOp) -> bool {
        self.code.logical(self.basis).anticommutes(error).unwrap()
    }

    /// Whether some operator supported on `erased` commutes with every
    /// stabilizer and flips the observable.
    pub fn span_contains_logical(&self, erased: &[usize]) -> bool {
        let k = erased.len();
        (1u64..1 << (2 * k)).any(|mask| {
            let mut op = PauliOp::identity(self.code.n);
            for (i, &q) in erased.iter().enumerate() {
                op.set(q, Pauli::from_bits(mask >> (2 * i) & 1 == 1, mask >> (2 * i + 1) & 1 == 1));
            }
            self.code.stabilizers.iter().all(|s| s.op.commutes(&op).unwrap()) && self.flips_observable(&op)
        })
    }
}

pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|&q| m >> q & 1 == 1).collect())
}

/// Pearson statistic of `counts` against a uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

/// Upper 1% point of the chi-square distribution with 3 degrees of freedom.
pub const CHI2_3DOF_P01: f64 = 11.345;
