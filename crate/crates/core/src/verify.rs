//! Exhaustive small-instance checks run by `erasure-qec verify`.
//!
//! Every suite that decodes takes a decoder factory, so a deliberately broken
//! decoder can be swapped in to confirm the suite notices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::PauliChannel;
use crate::circuit::{
    build_code_capacity_circuit, run_forced, tableau_reference_sim, CheckSpec, Circuit,
    ErrorAssignment, Gate, Instruction, SiteNoise,
};
use crate::code::{build_d2_surface_code, build_rotated_surface_code, syndrome_of, CheckBasis, StabilizerCode};
use crate::decoder::{
    build_decoding_graph, ml_decode_bruteforce, Correction, Decoder, DecoderKind, DecodingGraph,
    ErasureSet, ErrorPrior, Peeler,
};
use crate::error::Result;
use crate::pauli::{Pauli, PauliOp};

pub type DecoderFactory = dyn Fn() -> Box<dyn Decoder + Send> + Sync;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: u64,
    pub failures: u64,
    pub detail: String,
}

impl SuiteResult {
    fn new(name: &'static str, cases: u64, failures: u64, detail: String) -> Self {
        Self {
            name,
            passed: failures == 0,
            cases,
            failures,
            detail,
        }
    }
}

/// One line of the four-qubit code's single-error syndrome table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyndromeRow {
    /// 1-based data qubit.
    pub qubit: usize,
    pub pauli: char,
    /// Ancilla outcomes `a1 a2 a3`.
    pub syndrome: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub syndrome_table: Vec<SyndromeRow>,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.suites.iter().filter(|s| !s.passed).map(|s| s.name).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random circuits in the frame-versus-tableau corpus.
    pub random_circuits: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            random_circuits: 1000,
        }
    }
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn d2_syndrome_table() -> Vec<SyndromeRow> {
    let code = build_d2_surface_code();
    let mut rows = Vec::new();
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        for q in 0..4 {
            let syn = syndrome_of(&code, &PauliOp::single(4, q, p)).expect("single-qubit error");
            rows.push(SyndromeRow {
                qubit: q + 1,
                pauli: p.as_char(),
                syndrome: bits(&syn),
            });
        }
    }
    rows
}

/// Z errors light `a1` or `a3`, X errors light `a2`, Y errors light `a2` and
/// one of the others; every syndrome is shared by at least two qubits.
pub fn check_d2_syndrome_table(table: &[SyndromeRow]) -> SuiteResult {
    let mut bad = Vec::new();
    for row in table {
        let allowed: &[&str] = match row.pauli {
            'X' => &["010"],
            'Y' => &["110", "011"],
            'Z' => &["100", "001"],
            _ => &[],
        };
        if !allowed.contains(&row.syndrome.as_str()) {
            bad.push(format!("{}{}->{}", row.pauli, row.qubit, row.syndrome));
        }
        let shared = table
            .iter()
            .filter(|r| r.pauli == row.pauli && r.syndrome == row.syndrome)
            .count();
        if shared < 2 {
            bad.push(format!("{}{} has a unique syndrome", row.pauli, row.qubit));
        }
    }
    SuiteResult::new("d2_syndrome_table", table.len() as u64, bad.len() as u64, bad.join(", "))
}

/// Code-capacity circuit with the data-noise site and check of each qubit.
struct ErasureBench {
    circuit: Circuit,
    graph: DecodingGraph,
    /// `(noise instruction, check instruction)` per data qubit.
    sites: Vec<(usize, usize)>,
}

impl ErasureBench {
    fn new(code: &StabilizerCode, basis: CheckBasis) -> Result<Self> {
        let circuit = build_code_capacity_circuit(code, &SiteNoise::new(0.1, 0.0)?, &CheckSpec::PERFECT, basis)?;
        let graph = build_decoding_graph(&circuit)?;
        let instr = circuit.instructions();
        let mut sites = vec![(usize::MAX, usize::MAX); code.n];
        for (i, ins) in instr.iter().enumerate() {
            match ins {
                Instruction::Noise { qubit, .. } if *qubit < code.n => sites[*qubit].0 = i,
                Instruction::ErasureCheck { qubit, .. } if *qubit < code.n => sites[*qubit].1 = i,
                _ => {}
            }
        }
        Ok(Self { circuit, graph, sites })
    }

    /// Forced shot with the listed qubits erased and converted to `paulis`.
    fn run(&self, erased: &[usize], paulis: &[Pauli]) -> crate::circuit::ShotRecord {
        let mut a = ErrorAssignment::default();
        for (&q, &p) in erased.iter().zip(paulis) {
            let (noise, check) = self.sites[q];
            a.erasures.insert(noise);
            a.conversions.insert((check, q), p);
        }
        run_forced(&self.circuit, &a, 0)
    }

    fn decode(&self, decoder: &mut dyn Decoder, shot: &crate::circuit::ShotRecord) -> Result<Correction> {
        let erasure = ErasureSet::from_flags(&self.graph, &shot.flags);
        decoder.decode(&self.graph, &erasure, &shot.detectors)
    }
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (1u32..1 << n)
        .filter(|m| (m.count_ones() as usize) <= max)
        .map(|m| (0..n).filter(|&q| m >> q & 1 == 1).collect())
        .collect()
}

fn assignments(k: usize) -> impl Iterator<Item = Vec<Pauli>> {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (0..4usize.pow(k as u32)).map(move |mut m| {
        (0..k)
            .map(|_| {
                let p = ALL[m % 4];
                m /= 4;
                p
            })
            .collect()
    })
}

/// Every erasure pattern of weight below the distance, with every conversion
/// Pauli, must decode to the right logical: on the distance-3 code with one
/// or two erasures, and on the four-qubit code with one.
pub fn erasure_exhaustive(factory: &DecoderFactory) -> Result<SuiteResult> {
    let mut cases = 0;
    let mut failures = 0;
    let mut first = None;
    let codes = [(build_rotated_surface_code(3)?, 2usize), (build_d2_surface_code(), 1)];
    for (code, max) in &codes {
        for basis in [CheckBasis::X, CheckBasis::Z] {
            let bench = ErasureBench::new(code, basis)?;
            let mut decoder = factory();
            for erased in subsets(code.n, *max) {
                for paulis in assignments(erased.len()) {
                    let shot = bench.run(&erased, &paulis);
                    let corr = bench.decode(decoder.as_mut(), &shot)?;
                    cases += 1;
                    if corr.flips(0) != shot.observables[0] {
                        failures += 1;
                        first.get_or_insert(format!("n={} {basis:?} erased {erased:?} as {paulis:?}", code.n));
                    }
                }
            }
        }
    }
    Ok(SuiteResult::new("erasure_exhaustive", cases, failures, first.unwrap_or_default()))
}

/// On every pure-erasure pattern of the distance-3 code, the graph decoder's
/// observable prediction must agree with the maximum-likelihood marginal
/// whenever that marginal is decisive.
pub fn peeling_vs_ml(factory: &DecoderFactory) -> Result<SuiteResult> {
    let code = build_rotated_surface_code(3)?;
    let prior = ErrorPrior::uniform(code.n, 0.5, 0.0);
    let mut cases = 0;
    let mut failures = 0;
    let mut ambiguous = 0;
    let mut first = None;
    for basis in [CheckBasis::X, CheckBasis::Z] {
        let bench = ErasureBench::new(&code, basis)?;
        let mut decoder = factory();
        // The observable only sees the component that anticommutes with it.
        let active = match basis {
            CheckBasis::X => Pauli::Z,
            CheckBasis::Z => Pauli::X,
        };
        let flips_obs = |label: Pauli| match basis {
            CheckBasis::X => label.z_bit(),
            CheckBasis::Z => label.x_bit(),
        };
        for mask in 0u32..1 << code.n {
            let erased: Vec<usize> = (0..code.n).filter(|&q| mask >> q & 1 == 1).collect();
            for sub in 0u32..1 << erased.len() {
                let paulis: Vec<Pauli> = (0..erased.len())
                    .map(|i| if sub >> i & 1 == 1 { active } else { Pauli::I })
                    .collect();
                let shot = bench.run(&erased, &paulis);
                let corr = bench.decode(decoder.as_mut(), &shot)?;
                let error = PauliOp::from_sparse(code.n, &erased.iter().copied().zip(paulis.iter().copied()).collect::<Vec<_>>());
                let syn = syndrome_of(&code, &error)?;
                let ml = ml_decode_bruteforce(&code, &prior, &erased, &syn)?;
                // Coset labels are relative to the ML pure error t. The actual
                // error sits in label `class(error * correction) * coset`, so
                // t flips the observable iff that label and the error disagree.
                let mut p_flip = 0.0;
                for label in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
                    if flips_obs(label) {
                        p_flip += ml.probabilities[label as usize];
                    }
                }
                let residual = error.mul(&ml.correction)?;
                let actual_label = crate::code::logical_class(&code, &residual)?.mul(ml.coset);
                let error_flips = code.logical(basis).anticommutes(&error)?;
                let t_flips = flips_obs(actual_label) ^ error_flips;
                let p_actual = if t_flips { 1.0 - p_flip } else { p_flip };
                cases += 1;
                if (p_actual - 0.5).abs() < 1e-9 {
                    ambiguous += 1;
                    continue;
                }
                let ml_says = p_actual > 0.5;
                if ml_says != shot.observables[0] || corr.flips(0) != shot.observables[0] {
                    failures += 1;
                    first.get_or_insert(format!("{basis:?} erased {erased:?} as {paulis:?}"));
                }
            }
        }
    }
    let detail = first.unwrap_or_else(|| format!("{ambiguous} patterns leave the logical undetermined"));
    Ok(SuiteResult::new("peeling_vs_ml", cases, failures, detail))
}

/// Random circuit followed by its mirror image, so the noiseless outcomes
/// are all zero, with Pauli faults and measurement flips sprinkled in.
pub fn random_mirror_circuit(rng: &mut ChaCha8Rng) -> Result<(Circuit, ErrorAssignment)> {
    let n = rng.random_range(1..=6);
    let depth = rng.random_range(1..=12);
    let mut layers: Vec<(Gate, Vec<usize>)> = Vec::new();
    for _ in 0..depth {
        if n >= 2 && rng.random_bool(0.5) {
            let c = rng.random_range(0..n);
            let mut t = rng.random_range(0..n - 1);
            if t >= c {
                t += 1;
            }
            layers.push((Gate::CX, vec![c, t]));
        } else {
            layers.push((Gate::H, vec![rng.random_range(0..n)]));
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n);
    let mut a = ErrorAssignment::default();
    c.gate(Gate::Reset, &all)?;
    let sequence: Vec<&(Gate, Vec<usize>)> = layers.iter().chain(layers.iter().rev()).collect();
    let noise = PauliChannel::depolarizing(0.1)?;
    for (gate, targets) in sequence {
        c.gate(*gate, targets)?;
        if rng.random_bool(0.3) {
            let q = rng.random_range(0..n);
            let p = [Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..3)];
            a.paulis.insert(c.instructions().len(), p);
            c.noise(q, 0.0, noise)?;
        }
    }
    for q in 0..n {
        if rng.random_bool(0.2) {
            a.flips.insert(c.instructions().len());
            c.push(Instruction::MeasureFlip { qubit: q, p: 0.1 })?;
        }
    }
    let m = c.measure(&all)?;
    for &i in &m {
        c.detector(&[i])?;
    }
    c.observable(0, &m)?;
    Ok((c, a))
}

/// Frame sampler against the tableau simulator on random mirror circuits.
pub fn frame_vs_tableau(count: usize, seed: u64) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut first = None;
    for i in 0..count {
        let (c, a) = random_mirror_circuit(&mut rng)?;
        let frame = run_forced(&c, &a, i as u64);
        let tab = tableau_reference_sim(&c, &a, i as u64)?;
        if frame.detectors != tab.detectors || frame.observables != tab.observables {
            failures += 1;
            first.get_or_insert(format!("circuit {i}:\n{}", c.to_text()));
        }
    }
    Ok(SuiteResult::new("frame_vs_tableau", count as u64, failures, first.unwrap_or_default()))
}

/// Runs every suite with decoders from `factory`.
pub fn run_verify_with(opts: &VerifyOptions, factory: &DecoderFactory) -> Result<VerifyReport> {
    let table = d2_syndrome_table();
    let suites = vec![
        check_d2_syndrome_table(&table),
        erasure_exhaustive(factory)?,
        peeling_vs_ml(factory)?,
        frame_vs_tableau(opts.random_circuits, opts.seed)?,
    ];
    Ok(VerifyReport {
        syndrome_table: table,
        suites,
    })
}

/// Runs every suite with the peeling decoder.
pub fn run_verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    run_verify_with(opts, &|| Box::new(Peeler::default()) as Box<dyn Decoder + Send>)
}

/// Decoder that reports the opposite observable flip of the one it wraps.
pub struct CorruptedDecoder(pub Box<dyn Decoder + Send>);

impl Decoder for CorruptedDecoder {
    fn decode(&mut self, graph: &DecodingGraph, erasure: &ErasureSet, syndrome: &[bool]) -> Result<Correction> {
        let mut corr = self.0.decode(graph, erasure, syndrome)?;
        corr.obs_mask ^= 1;
        Ok(corr)
    }
}

pub fn corrupted_factory() -> Box<DecoderFactory> {
    Box::new(|| Box::new(CorruptedDecoder(DecoderKind::UnionFind.build())))
}
