//! Run configuration: TOML with every table closed to unknown keys.
//!
//! ```toml
//! seed = 7
//! workers = 1
//!
//! [[experiment]]
//! name = "pure_erasure"
//! model = "code_capacity"
//! distances = [5, 9, 13]
//! axis = "e"
//! rates = [0.40, 0.45, 0.50, 0.55]
//! decoder = "peeling"
//! shots = 100000
//! ```
//!
//! Each experiment sweeps `rates` along `axis`, keeping every other noise
//! field at its configured value. The optional `[hierarchy]` and `[sample]`
//! tables drive the commands of the same name.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{ConversionMode, ResetProtocol};
use crate::circuit::{Schedule, StabilizerSelection};
use crate::code::CheckBasis;
use crate::decoder::DecoderKind;
use crate::error::{Error, Result};
use crate::montecarlo::{NoiseModel, NoisePoint, ShotBudget};

/// Noise parameter set by the swept rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateAxis {
    /// Erasure probability `e`.
    E,
    /// Depolarizing probability `p`.
    P,
    /// Measurement flip probability `q`.
    Q,
    /// Damping probability: an erasure when `heralded`, otherwise its
    /// twirled form, depolarizing with `p = 3/4` of the rate.
    Damping,
}

fn default_shots() -> u64 {
    10_000
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub model: NoiseModel,
    pub distances: Vec<usize>,
    /// Noisy rounds; defaults to the distance.
    #[serde(default)]
    pub rounds: Option<usize>,
    pub axis: RateAxis,
    pub rates: Vec<f64>,
    #[serde(default)]
    pub e: f64,
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub f_pos: f64,
    #[serde(default)]
    pub f_neg: f64,
    #[serde(default = "default_conversion")]
    pub conversion: ConversionMode,
    #[serde(default = "default_reset")]
    pub reset: ResetProtocol,
    #[serde(default = "default_schedule")]
    pub schedule: Schedule,
    #[serde(default = "default_basis")]
    pub basis: CheckBasis,
    #[serde(default = "default_true")]
    pub heralded: bool,
    #[serde(default = "default_decoder")]
    pub decoder: DecoderKind,
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Keep sampling in blocks of `shots` up to this total until
    /// `min_failures` is reached.
    #[serde(default)]
    pub max_shots: Option<u64>,
    #[serde(default)]
    pub min_failures: u64,
    /// Known threshold; scaling fits use rates up to half of it.
    #[serde(default)]
    pub threshold: Option<f64>,
}

fn default_conversion() -> ConversionMode {
    ConversionMode::Mixed
}

fn default_reset() -> ResetProtocol {
    ResetProtocol::OneWay
}

fn default_schedule() -> Schedule {
    Schedule::EveryRound
}

fn default_basis() -> CheckBasis {
    CheckBasis::X
}

fn default_decoder() -> DecoderKind {
    DecoderKind::UnionFind
}

fn default_selection() -> StabilizerSelection {
    StabilizerSelection::All
}

impl ExperimentConfig {
    fn base_point(&self, d: usize) -> NoisePoint {
        NoisePoint {
            model: self.model,
            d,
            rounds: self.rounds.unwrap_or(d.max(1)),
            e: self.e,
            p: self.p,
            q: self.q,
            f_pos: self.f_pos,
            f_neg: self.f_neg,
            conversion: self.conversion,
            reset: self.reset,
            schedule: self.schedule,
            basis: self.basis,
            selection: StabilizerSelection::All,
            decoder: self.decoder,
        }
    }

    /// The point at distance `d` and swept rate `rate`.
    pub fn point(&self, d: usize, rate: f64) -> NoisePoint {
        let mut pt = self.base_point(d);
        match self.axis {
            RateAxis::E => pt.e = rate,
            RateAxis::P => pt.p = rate,
            RateAxis::Q => pt.q = rate,
            RateAxis::Damping if self.heralded => pt.e = rate,
            RateAxis::Damping => pt.p = 0.75 * rate,
        }
        pt
    }

    /// Grid in distance-major, rate-ascending order.
    pub fn grid(&self) -> Vec<(usize, f64, NoisePoint)> {
        let mut rates = self.rates.clone();
        rates.sort_by(f64::total_cmp);
        let mut ds = self.distances.clone();
        ds.sort_unstable();
        ds.iter()
            .flat_map(|&d| rates.iter().map(move |&r| (d, r)))
            .map(|(d, r)| (d, r, self.point(d, r)))
            .collect()
    }

    pub fn budget(&self) -> ShotBudget {
        ShotBudget {
            shots: self.shots,
            max_shots: self.max_shots,
            min_failures: self.min_failures,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("experiment '{}': {msg}", self.name)));
        if self.distances.is_empty() || self.rates.is_empty() {
            return bad("needs at least one distance and one rate".into());
        }
        for &d in &self.distances {
            if d != 2 && (d < 3 || d % 2 == 0) {
                return bad(format!("distance {d} must be odd and >= 3, or 2"));
            }
        }
        if self.shots == 0 {
            return bad("shots must be >= 1".into());
        }
        if let Some(max) = self.max_shots {
            if max < self.shots {
                return bad("max_shots must be >= shots".into());
            }
        }
        if self.rounds == Some(0) {
            return bad("rounds must be >= 1".into());
        }
        self.schedule.validate().map_err(|e| Error::Config(e.to_string()))?;
        for (d, r, pt) in self.grid() {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("rate {r} outside [0, 1]"));
            }
            if pt.e + pt.p > 1.0 + 1e-12 || pt.f_pos > 1.0 || pt.f_neg > 1.0 || pt.q > 1.0 {
                return bad(format!("invalid noise at d={d}, rate={r}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchyConfig {
    pub d: usize,
    pub rate: f64,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_decoder")]
    pub decoder: DecoderKind,
}

/// One circuit for `sample` and `decode`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub model: NoiseModel,
    pub d: usize,
    #[serde(default)]
    pub rounds: Option<usize>,
    #[serde(default)]
    pub e: f64,
    #[serde(default)]
    pub p: f64,
    #[serde(default)]
    pub q: f64,
    #[serde(default)]
    pub f_pos: f64,
    #[serde(default)]
    pub f_neg: f64,
    #[serde(default = "default_conversion")]
    pub conversion: ConversionMode,
    #[serde(default = "default_reset")]
    pub reset: ResetProtocol,
    #[serde(default = "default_schedule")]
    pub schedule: Schedule,
    #[serde(default = "default_basis")]
    pub basis: CheckBasis,
    #[serde(default = "default_selection")]
    pub selection: StabilizerSelection,
    #[serde(default = "default_decoder")]
    pub decoder: DecoderKind,
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Check ids that flag in every shot.
    #[serde(default)]
    pub force_flags: BTreeSet<usize>,
}

impl SampleConfig {
    pub fn point(&self) -> NoisePoint {
        NoisePoint {
            model: self.model,
            d: self.d,
            rounds: self.rounds.unwrap_or(self.d.max(1)),
            e: self.e,
            p: self.p,
            q: self.q,
            f_pos: self.f_pos,
            f_neg: self.f_neg,
            conversion: self.conversion,
            reset: self.reset,
            schedule: self.schedule,
            basis: self.basis,
            selection: self.selection,
            decoder: self.decoder,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub experiment: Vec<ExperimentConfig>,
    #[serde(default)]
    pub hierarchy: Option<HierarchyConfig>,
    #[serde(default)]
    pub sample: Option<SampleConfig>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for exp in &self.experiment {
            if !names.insert(exp.name.as_str()) {
                return Err(Error::Config(format!("duplicate experiment name '{}'", exp.name)));
            }
            exp.validate()?;
        }
        if let Some(h) = &self.hierarchy {
            if h.shots == 0 || !(0.0..=0.5).contains(&h.rate) {
                return Err(Error::Config("hierarchy needs shots >= 1 and rate in [0, 0.5]".into()));
            }
        }
        if let Some(s) = &self.sample {
            if s.shots == 0 {
                return Err(Error::Config("sample needs shots >= 1".into()));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }

    /// Replaces every shot count, keeping adaptive budgets proportional.
    pub fn override_shots(&mut self, shots: u64) {
        for exp in &mut self.experiment {
            if let Some(max) = exp.max_shots {
                exp.max_shots = Some((max / exp.shots.max(1)).max(1) * shots);
            }
            exp.shots = shots;
        }
        if let Some(h) = &mut self.hierarchy {
            h.shots = shots;
        }
        if let Some(s) = &mut self.sample {
            s.shots = shots;
        }
    }
}
