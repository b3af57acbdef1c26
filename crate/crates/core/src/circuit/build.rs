//! Memory-experiment circuit builders.
//!
//! Qubit layout: data qubits keep their code indices `0..n`; the ancilla for
//! each measured stabilizer follows, in stabilizer order. X-type checks use
//! `H`, then the ancilla as CX control, then `H`; Z-type checks use the ancilla
//! as CX target. The CX layers follow each stabilizer's schedule.
//!
//! The code-capacity and phenomenological builders open with a noiseless
//! round that projects onto the code space, so every stabilizer has a
//! deterministic detector from the first noisy round on. The circuit-level
//! builder instead compares the first round only for stabilizers of the
//! memory basis against their initialization value.

use serde::{Deserialize, Serialize};

use super::ir::{CheckSpec, Circuit, Gate};
use crate::channel::{DualRailParams, PauliChannel};
use crate::code::{CheckBasis, StabilizerCode, CX_LAYERS};
use crate::error::{Error, Result};

/// Per-location noise: erasure with probability `erasure`, else a Pauli.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteNoise {
    pub erasure: f64,
    pub pauli: PauliChannel,
}

impl SiteNoise {
    pub const NONE: SiteNoise = SiteNoise {
        erasure: 0.0,
        pauli: PauliChannel::IDENTITY,
    };

    /// Erasure rate `e` and depolarizing rate `p` split evenly over X, Y, Z.
    pub fn new(e: f64, p: f64) -> Result<Self> {
        Self::with_pauli(e, p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn with_pauli(e: f64, px: f64, py: f64, pz: f64) -> Result<Self> {
        for (name, v) in [("e", e), ("px", px), ("py", py), ("pz", pz)] {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        let rate = px + py + pz;
        if e + rate > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "e + p must not exceed 1 (got {e} + {rate})"
            )));
        }
        Ok(Self {
            erasure: e,
            pauli: PauliChannel {
                p_i: (1.0 - rate).max(0.0),
                p_x: px,
                p_y: py,
                p_z: pz,
            },
        })
    }

    pub fn is_zero(&self) -> bool {
        self.erasure == 0.0 && self.pauli.error_rate() == 0.0
    }
}

/// Where erasure checks go in a circuit-level memory experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// After every CX layer, on every qubit.
    EveryGate,
    /// Once per round on every qubit, just before the ancillas are measured.
    EveryRound,
    /// After every `n`-th CX layer, counted across rounds.
    EveryN(usize),
    /// One check per qubit just before the final data measurement.
    EndOnly,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if let Schedule::EveryN(0) = self {
            return Err(Error::InvalidArgument("EveryN needs n >= 1".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            Schedule::EveryGate => "every_gate".into(),
            Schedule::EveryRound => "every_round".into(),
            Schedule::EveryN(n) => format!("every_{n}"),
            Schedule::EndOnly => "end_only".into(),
        }
    }
}

/// Which stabilizers a circuit-level memory experiment measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilizerSelection {
    All,
    /// Only stabilizers of the memory basis, as in a single-type extraction.
    BasisOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryLayout {
    /// Basis of the prepared and measured logical state.
    pub basis: CheckBasis,
    pub selection: StabilizerSelection,
}

impl Default for MemoryLayout {
    fn default() -> Self {
        Self {
            basis: CheckBasis::X,
            selection: StabilizerSelection::All,
        }
    }
}

struct Layout<'a> {
    code: &'a StabilizerCode,
    /// Measured stabilizer indices with their ancilla qubit.
    checks: Vec<(usize, usize)>,
    num_qubits: usize,
}

impl<'a> Layout<'a> {
    fn new(code: &'a StabilizerCode, selection: StabilizerSelection, basis: CheckBasis) -> Self {
        let checks: Vec<(usize, usize)> = code
            .stabilizers
            .iter()
            .enumerate()
            .filter(|(_, s)| selection == StabilizerSelection::All || s.basis == basis)
            .map(|(i, _)| i)
            .enumerate()
            .map(|(k, i)| (i, code.n + k))
            .collect();
        let num_qubits = code.n + checks.len();
        Self {
            code,
            checks,
            num_qubits,
        }
    }

    fn data(&self) -> Vec<usize> {
        (0..self.code.n).collect()
    }

    fn ancillas(&self) -> Vec<usize> {
        self.checks.iter().map(|&(_, a)| a).collect()
    }

    fn x_ancillas(&self) -> Vec<usize> {
        self.checks
            .iter()
            .filter(|&&(i, _)| self.code.stabilizers[i].basis == CheckBasis::X)
            .map(|&(_, a)| a)
            .collect()
    }

    fn all_qubits(&self) -> Vec<usize> {
        (0..self.num_qubits).collect()
    }

    fn cx_layer(&self, layer: usize) -> Vec<usize> {
        let mut targets = Vec::new();
        for &(i, anc) in &self.checks {
            let s = &self.code.stabilizers[i];
            if let Some(q) = s.schedule[layer] {
                match s.basis {
                    CheckBasis::X => targets.extend([anc, q]),
                    CheckBasis::Z => targets.extend([q, anc]),
                }
            }
        }
        targets
    }
}

/// Hook invoked after each layer of a stabilizer round.
enum LayerKind {
    Reset,
    Hadamard,
    Cx,
}

/// Appends one stabilizer round and returns the record index per measured check.
fn stabilizer_round(
    c: &mut Circuit,
    layout: &Layout,
    after: &mut dyn FnMut(&mut Circuit, LayerKind) -> Result<()>,
    before_measure: &mut dyn FnMut(&mut Circuit) -> Result<()>,
) -> Result<Vec<usize>> {
    let anc = layout.ancillas();
    let xanc = layout.x_ancillas();
    c.gate(Gate::Reset, &anc)?;
    after(c, LayerKind::Reset)?;
    if !xanc.is_empty() {
        c.gate(Gate::H, &xanc)?;
        after(c, LayerKind::Hadamard)?;
    }
    for layer in 0..CX_LAYERS {
        let t = layout.cx_layer(layer);
        if t.is_empty() {
            continue;
        }
        c.gate(Gate::CX, &t)?;
        after(c, LayerKind::Cx)?;
    }
    if !xanc.is_empty() {
        c.gate(Gate::H, &xanc)?;
        after(c, LayerKind::Hadamard)?;
    }
    before_measure(c)?;
    c.measure(&anc)
}

fn noiseless_round(c: &mut Circuit, layout: &Layout) -> Result<Vec<usize>> {
    stabilizer_round(c, layout, &mut |_, _| Ok(()), &mut |_| Ok(()))
}

fn prepare_data(c: &mut Circuit, layout: &Layout, basis: CheckBasis) -> Result<()> {
    let data = layout.data();
    c.gate(Gate::Reset, &data)?;
    if basis == CheckBasis::X {
        c.gate(Gate::H, &data)?;
    }
    Ok(())
}

/// Measures the data in `basis` and returns the record index per data qubit.
fn measure_data(c: &mut Circuit, layout: &Layout, basis: CheckBasis) -> Result<Vec<usize>> {
    let data = layout.data();
    if basis == CheckBasis::X {
        c.gate(Gate::H, &data)?;
    }
    c.measure(&data)
}

fn logical_observable(
    c: &mut Circuit,
    code: &StabilizerCode,
    basis: CheckBasis,
    data_records: &[usize],
) -> Result<()> {
    let records: Vec<usize> = code
        .logical(basis)
        .support()
        .into_iter()
        .map(|q| data_records[q])
        .collect();
    c.observable(0, &records)
}

fn noisy_data_step(
    c: &mut Circuit,
    layout: &Layout,
    noise: &SiteNoise,
    check: &CheckSpec,
) -> Result<()> {
    for q in layout.data() {
        c.noise(q, noise.erasure, noise.pauli)?;
        c.erasure_check(q, *check)?;
    }
    Ok(())
}

/// One round of data noise, heralded by an erasure check per data qubit, then
/// one perfect measurement of every stabilizer.
///
/// Detector `i` is stabilizer `i`. The single observable is the logical
/// operator of `basis`, read off a final transversal data measurement.
pub fn build_code_capacity_circuit(
    code: &StabilizerCode,
    noise: &SiteNoise,
    check: &CheckSpec,
    basis: CheckBasis,
) -> Result<Circuit> {
    let layout = Layout::new(code, StabilizerSelection::All, basis);
    let mut c = Circuit::new(layout.num_qubits);
    prepare_data(&mut c, &layout, basis)?;
    let m0 = noiseless_round(&mut c, &layout)?;
    noisy_data_step(&mut c, &layout, noise, check)?;
    let m1 = noiseless_round(&mut c, &layout)?;
    for (a, b) in m1.iter().zip(&m0) {
        c.detector(&[*a, *b])?;
    }
    let md = measure_data(&mut c, &layout, basis)?;
    logical_observable(&mut c, code, basis, &md)?;
    Ok(c)
}

/// `rounds` rounds of data noise followed by stabilizer measurements whose
/// outcomes flip with probability `q`, then one perfect round.
///
/// Detectors compare consecutive rounds, stabilizer-major within a round, for
/// `num_stabilizers * (rounds + 1)` detectors in total.
pub fn build_phenomenological_circuit(
    code: &StabilizerCode,
    rounds: usize,
    noise: &SiteNoise,
    check: &CheckSpec,
    q: f64,
    basis: CheckBasis,
) -> Result<Circuit> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "q must lie in [0, 1], got {q}"
        )));
    }
    let layout = Layout::new(code, StabilizerSelection::All, basis);
    let mut c = Circuit::new(layout.num_qubits);
    prepare_data(&mut c, &layout, basis)?;
    let mut prev = noiseless_round(&mut c, &layout)?;
    let anc = layout.ancillas();
    for _ in 0..rounds {
        noisy_data_step(&mut c, &layout, noise, check)?;
        let m = stabilizer_round(&mut c, &layout, &mut |_, _| Ok(()), &mut |c| {
            for &a in &anc {
                c.push(super::Instruction::MeasureFlip { qubit: a, p: q })?;
            }
            Ok(())
        })?;
        for (a, b) in m.iter().zip(&prev) {
            c.detector(&[*a, *b])?;
        }
        prev = m;
    }
    let last = noiseless_round(&mut c, &layout)?;
    for (a, b) in last.iter().zip(&prev) {
        c.detector(&[*a, *b])?;
    }
    let md = measure_data(&mut c, &layout, basis)?;
    logical_observable(&mut c, code, basis, &md)?;
    Ok(c)
}

/// Circuit-level memory experiment driven by dual-rail parameters.
///
/// Every layer is followed by a noise site on every qubit with erasure rate
/// `gamma` and dephasing `phi`; checks use `f_pos`, `f_neg`, the conversion mode
/// and the reset protocol of `params`.
pub fn build_memory_circuit(
    code: &StabilizerCode,
    rounds: usize,
    params: &DualRailParams,
    schedule: Schedule,
    layout: MemoryLayout,
) -> Result<Circuit> {
    params.validate()?;
    let noise = SiteNoise::with_pauli(params.gamma, 0.0, 0.0, params.phi)?;
    let check = CheckSpec {
        f_pos: params.f_pos,
        f_neg: params.f_neg,
        conversion: params.conversion,
        reset: params.reset,
    };
    build_memory_circuit_with(code, rounds, &noise, &check, schedule, layout)
}

/// [`build_memory_circuit`] with an explicit per-site noise model.
pub fn build_memory_circuit_with(
    code: &StabilizerCode,
    rounds: usize,
    noise: &SiteNoise,
    check: &CheckSpec,
    schedule: Schedule,
    memory: MemoryLayout,
) -> Result<Circuit> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be >= 1".into()));
    }
    schedule.validate()?;
    let layout = Layout::new(code, memory.selection, memory.basis);
    let mut c = Circuit::new(layout.num_qubits);
    let everyone = layout.all_qubits();

    let noise_all = |c: &mut Circuit| -> Result<()> {
        if noise.is_zero() {
            return Ok(());
        }
        for &q in &everyone {
            c.noise(q, noise.erasure, noise.pauli)?;
        }
        Ok(())
    };
    let check_all = |c: &mut Circuit| -> Result<()> {
        for &q in &everyone {
            c.erasure_check(q, *check)?;
        }
        Ok(())
    };

    let data = layout.data();
    c.gate(Gate::Reset, &data)?;
    noise_all(&mut c)?;
    if memory.basis == CheckBasis::X {
        c.gate(Gate::H, &data)?;
        noise_all(&mut c)?;
    }

    let mut cx_count = 0usize;
    let mut prev: Option<Vec<usize>> = None;
    for _ in 0..rounds {
        let m = stabilizer_round(
            &mut c,
            &layout,
            &mut |c, kind| {
                noise_all(c)?;
                if let LayerKind::Cx = kind {
                    cx_count += 1;
                    let due = match schedule {
                        Schedule::EveryGate => true,
                        Schedule::EveryN(n) => cx_count.is_multiple_of(n),
                        Schedule::EveryRound | Schedule::EndOnly => false,
                    };
                    if due {
                        check_all(c)?;
                    }
                }
                Ok(())
            },
            &mut |c| {
                if schedule == Schedule::EveryRound {
                    check_all(c)?;
                }
                Ok(())
            },
        )?;
        match &prev {
            None => {
                for (k, &(i, _)) in layout.checks.iter().enumerate() {
                    if code.stabilizers[i].basis == memory.basis {
                        c.detector(&[m[k]])?;
                    }
                }
            }
            Some(p) => {
                for (a, b) in m.iter().zip(p) {
                    c.detector(&[*a, *b])?;
                }
            }
        }
        prev = Some(m);
    }
    if schedule == Schedule::EndOnly {
        check_all(&mut c)?;
    }

    let md = measure_data(&mut c, &layout, memory.basis)?;
    let last = prev.expect("rounds >= 1");
    for (k, &(i, _)) in layout.checks.iter().enumerate() {
        let s = &code.stabilizers[i];
        if s.basis == memory.basis {
            let mut recs: Vec<usize> = s.op.support().into_iter().map(|q| md[q]).collect();
            recs.push(last[k]);
            c.detector(&recs)?;
        }
    }
    logical_observable(&mut c, code, memory.basis, &md)?;
    Ok(c)
}
