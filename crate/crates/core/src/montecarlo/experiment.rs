//! Logical error estimation for single noise points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::wilson_interval;
use crate::channel::{ConversionMode, ResetProtocol};
use crate::circuit::{
    build_code_capacity_circuit, build_memory_circuit_with, build_phenomenological_circuit, shot_rng,
    CheckSpec, Circuit, FrameSimulator, MemoryLayout, RandomFaults, Schedule, SiteNoise,
    StabilizerSelection,
};
use crate::code::{build_d2_surface_code, build_rotated_surface_code, CheckBasis, StabilizerCode};
use crate::decoder::{build_decoding_graph, DecoderKind, DecodingGraph, ErasureSet};
use crate::error::{Error, Result};

/// Shots decoded per parallel work item.
pub const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// One noisy data step between two perfect stabilizer rounds.
    CodeCapacity,
    /// Noisy data and flipped measurements for several rounds.
    Phenomenological,
    /// Noise after every gate layer of the extraction circuit.
    Circuit,
}

impl NoiseModel {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseModel::CodeCapacity => "code_capacity",
            NoiseModel::Phenomenological => "phenomenological",
            NoiseModel::Circuit => "circuit",
        }
    }
}

/// Every coordinate of one simulated point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisePoint {
    pub model: NoiseModel,
    /// Odd distance of a rotated code, or 2 for the four-qubit example code.
    pub d: usize,
    /// Noisy rounds; ignored for code capacity.
    pub rounds: usize,
    /// Erasure probability per noise site.
    pub e: f64,
    /// Depolarizing probability per noise site.
    pub p: f64,
    /// Measurement flip probability (phenomenological).
    pub q: f64,
    pub f_pos: f64,
    pub f_neg: f64,
    pub conversion: ConversionMode,
    pub reset: ResetProtocol,
    pub schedule: Schedule,
    /// Memory basis; failures are counted on this logical observable.
    pub basis: CheckBasis,
    /// Measured stabilizers of circuit-level points.
    pub selection: StabilizerSelection,
    pub decoder: DecoderKind,
}

impl Default for NoisePoint {
    fn default() -> Self {
        Self {
            model: NoiseModel::CodeCapacity,
            d: 3,
            rounds: 1,
            e: 0.0,
            p: 0.0,
            q: 0.0,
            f_pos: 0.0,
            f_neg: 0.0,
            conversion: ConversionMode::Mixed,
            reset: ResetProtocol::OneWay,
            schedule: Schedule::EveryRound,
            basis: CheckBasis::X,
            selection: StabilizerSelection::All,
            decoder: DecoderKind::UnionFind,
        }
    }
}

impl NoisePoint {
    pub fn code(&self) -> Result<StabilizerCode> {
        if self.d == 2 {
            Ok(build_d2_surface_code())
        } else {
            build_rotated_surface_code(self.d)
        }
    }

    pub fn check_spec(&self) -> CheckSpec {
        CheckSpec {
            f_pos: self.f_pos,
            f_neg: self.f_neg,
            conversion: self.conversion,
            reset: self.reset,
        }
    }

    pub fn circuit(&self) -> Result<Circuit> {
        let code = self.code()?;
        let noise = SiteNoise::new(self.e, self.p)?;
        let check = self.check_spec();
        for (name, v) in [("f_pos", self.f_pos), ("f_neg", self.f_neg)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        match self.model {
            NoiseModel::CodeCapacity => build_code_capacity_circuit(&code, &noise, &check, self.basis),
            NoiseModel::Phenomenological => {
                build_phenomenological_circuit(&code, self.rounds, &noise, &check, self.q, self.basis)
            }
            NoiseModel::Circuit => build_memory_circuit_with(
                &code,
                self.rounds,
                &noise,
                &check,
                self.schedule,
                MemoryLayout {
                    basis: self.basis,
                    selection: self.selection,
                },
            ),
        }
    }

    /// Value of the CSV `schedule` column: the noise model, or the check
    /// schedule for circuit-level points.
    pub fn schedule_label(&self) -> String {
        match self.model {
            NoiseModel::Circuit => self.schedule.label(),
            m => m.as_str().to_string(),
        }
    }
}

/// One CSV row. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub d: usize,
    pub e: f64,
    pub p: f64,
    pub q: f64,
    pub f_pos: f64,
    pub f_neg: f64,
    pub conversion: String,
    pub reset: String,
    pub schedule: String,
    pub decoder: String,
    pub shots: u64,
    pub failures: u64,
    pub p_l: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

impl EstimateRow {
    pub fn new(point: &NoisePoint, shots: u64, failures: u64, seed: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(failures, shots);
        Self {
            d: point.d,
            e: point.e,
            p: point.p,
            q: point.q,
            f_pos: point.f_pos,
            f_neg: point.f_neg,
            conversion: point.conversion.as_str().into(),
            reset: point.reset.as_str().into(),
            schedule: point.schedule_label(),
            decoder: point.decoder.as_str().into(),
            shots,
            failures,
            p_l: if shots == 0 { 0.0 } else { failures as f64 / shots as f64 },
            ci_lo,
            ci_hi,
            seed,
        }
    }
}

/// Circuit and decoding graph of a point, built once and shared by workers.
pub struct PreparedPoint {
    pub point: NoisePoint,
    pub circuit: Circuit,
    pub graph: DecodingGraph,
}

impl PreparedPoint {
    pub fn new(point: &NoisePoint) -> Result<Self> {
        let circuit = point.circuit()?;
        let graph = build_decoding_graph(&circuit)?;
        Ok(Self {
            point: *point,
            circuit,
            graph,
        })
    }

    /// Failures among shots `range`, each on stream `shot_rng(seed, i)`.
    pub fn count_failures(&self, seed: u64, range: std::ops::Range<u64>) -> Result<u64> {
        let mut sim = FrameSimulator::new(&self.circuit);
        let mut decoder = self.point.decoder.build();
        let mut failures = 0;
        for i in range {
            let shot = sim.run(&mut RandomFaults::new(shot_rng(seed, i)));
            if shot.flags.is_empty() && shot.detectors.iter().all(|&b| !b) {
                failures += shot.observables[0] as u64;
                continue;
            }
            let erasure = ErasureSet::from_flags(&self.graph, &shot.flags);
            let correction = decoder.decode(&self.graph, &erasure, &shot.detectors)?;
            failures += (correction.flips(0) != shot.observables[0]) as u64;
        }
        Ok(failures)
    }

    /// Failures among shots `start..end`, split into parallel chunks.
    pub fn count_failures_par(&self, seed: u64, start: u64, end: u64) -> Result<u64> {
        let chunks: Vec<(u64, u64)> = (start..end)
            .step_by(CHUNK as usize)
            .map(|s| (s, (s + CHUNK).min(end)))
            .collect();
        chunks
            .into_par_iter()
            .map(|(a, b)| self.count_failures(seed, a..b))
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }
}

/// Fixed or adaptive shot budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotBudget {
    pub shots: u64,
    /// When set, keep sampling in blocks of `shots` until `min_failures` is
    /// reached or this many shots have been taken.
    pub max_shots: Option<u64>,
    pub min_failures: u64,
}

impl ShotBudget {
    pub fn fixed(shots: u64) -> Self {
        Self {
            shots,
            max_shots: None,
            min_failures: 0,
        }
    }
}

/// Samples, decodes and counts failures of `point` with a fixed shot count.
pub fn estimate_logical_error(point: &NoisePoint, shots: u64, seed: u64) -> Result<EstimateRow> {
    estimate_with_budget(point, &ShotBudget::fixed(shots), seed)
}

pub fn estimate_with_budget(point: &NoisePoint, budget: &ShotBudget, seed: u64) -> Result<EstimateRow> {
    if budget.shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let prepared = PreparedPoint::new(point)?;
    let mut taken = 0;
    let mut failures = prepared.count_failures_par(seed, 0, budget.shots)?;
    taken += budget.shots;
    if let Some(max) = budget.max_shots {
        while failures < budget.min_failures && taken < max {
            let next = (taken + budget.shots).min(max);
            failures += prepared.count_failures_par(seed, taken, next)?;
            taken = next;
        }
    }
    Ok(EstimateRow::new(point, taken, failures, seed))
}

/// Seed of point `index` derived from a base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    // SplitMix64 finalizer over the combined input.
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `f` on a rayon pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}
