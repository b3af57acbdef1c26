//! Command implementations behind the `erasure-qec` binary.
//!
//! Standard output carries only machine-readable results (JSON or JSONL);
//! progress goes to standard error. Files written under `--out`:
//!
//! | command     | files                                   |
//! |-------------|-----------------------------------------|
//! | `sample`    | `shots.jsonl`                           |
//! | `decode`    | `decoded.jsonl`                         |
//! | `threshold` | `threshold.csv`, `threshold.json`       |
//! | `scaling`   | `scaling.csv`, `scaling.json`           |
//! | `hierarchy` | `hierarchy.csv`, `hierarchy.json`       |
//! | `verify`    | `verify.json`                           |
//!
//! CSV columns: `d,e,p,q,f_pos,f_neg,conversion,reset,schedule,decoder,shots,failures,p_l,ci_lo,ci_hi,seed`.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::channel::{dual_rail_step, ConversionMode, DualRailParams, ResetProtocol};
use crate::circuit::{shot_rng, FrameSimulator, RandomFaults, ShotLine, ShotRecord};
use crate::config::{ExperimentConfig, RunConfig};
use crate::decoder::{build_decoding_graph, ErasureSet};
use crate::error::{Error, Result};
use crate::montecarlo::{
    d2_single_event_census, derive_seed, estimate_with_budget, find_threshold, fit_scaling_exponent,
    hierarchy_experiment, with_workers, Census, EstimateRow, HierarchyReport, RatePoint, ScalingFit,
    ThresholdReport,
};
use crate::verify::{corrupted_factory, run_verify, run_verify_with, VerifyOptions, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_STATS: i32 = 4;

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) | Error::Parse { .. } => EXIT_USAGE,
        Error::Io(_) => EXIT_IO,
        Error::InsufficientStatistics(_) => EXIT_STATS,
        _ => EXIT_FAILURE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "erasure-qec", version, about = "Erasure-qubit error correction experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Shots per point; overrides the config.
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Worker threads; overrides the config.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Effective per-step channel of a dual-rail qubit as JSON.
    Channel(ChannelArgs),
    /// Sample shots of the `[sample]` circuit as JSONL.
    Sample,
    /// Decode a JSONL shot file against the `[sample]` circuit.
    Decode {
        /// Shot file written by `sample`.
        #[arg(long)]
        input: PathBuf,
    },
    /// Run every experiment grid and locate the curve crossings.
    Threshold,
    /// Run every experiment grid and fit sub-threshold exponents.
    Scaling,
    /// Missed erasure, Pauli and heralded erasure at one rate.
    Hierarchy,
    /// Exhaustive small-instance checks.
    Verify {
        /// Random circuits in the frame-versus-tableau corpus.
        #[arg(long, default_value_t = 1000)]
        circuits: usize,
        /// Replace the decoder with one that flips every prediction.
        #[arg(long, hide = true)]
        corrupt_decoder: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub f_pos: f64,
    #[arg(long, default_value_t = 0.0)]
    pub f_neg: f64,
    #[arg(long, value_parser = parse_conversion, default_value = "mixed")]
    pub conversion: ConversionMode,
    #[arg(long, value_parser = parse_reset, default_value = "one_way")]
    pub reset: ResetProtocol,
}

fn parse_conversion(s: &str) -> std::result::Result<ConversionMode, String> {
    match s {
        "mixed" => Ok(ConversionMode::Mixed),
        "biased" => Ok(ConversionMode::Biased),
        _ => Err(format!("unknown conversion '{s}' (mixed|biased)")),
    }
}

fn parse_reset(s: &str) -> std::result::Result<ResetProtocol, String> {
    match s {
        "one_way" => Ok(ResetProtocol::OneWay),
        "unitary" => Ok(ResetProtocol::Unitary),
        _ => Err(format!("unknown reset '{s}' (one_way|unitary)")),
    }
}

/// JSON form of the effective channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelJson {
    pub e: f64,
    pub leak: f64,
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

/// One line of `decode` output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct DecodeLine {
    pub predicted_obs: String,
    pub actual_obs: String,
    pub fail: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentThreshold {
    pub name: String,
    pub report: ThresholdReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentScaling {
    pub name: String,
    pub fits: Vec<ScalingFit>,
    /// Distances whose fit was refused, with the reason.
    pub refused: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyJson {
    pub report: HierarchyReport,
    pub d2_census: Census,
}

/// Resolved settings of one invocation.
pub struct Session {
    pub config: RunConfig,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

impl Session {
    pub fn new(global: &GlobalArgs, needs_config: bool) -> Result<Self> {
        let mut config = match &global.config {
            Some(path) => RunConfig::load(path).map_err(|e| match e {
                Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
                other => other,
            })?,
            None if needs_config => return Err(Error::Config("this command needs --config".into())),
            None => RunConfig::parse("")?,
        };
        if let Some(shots) = global.shots {
            if shots == 0 {
                return Err(Error::Config("--shots must be >= 1".into()));
            }
            config.override_shots(shots);
        }
        let workers = global.workers.or(config.workers).unwrap_or(1);
        if workers == 0 {
            return Err(Error::Config("--workers must be >= 1".into()));
        }
        Ok(Self {
            seed: global.seed.unwrap_or(config.seed),
            out: global.out.clone().or_else(|| config.out.clone()),
            workers,
            config,
        })
    }

    fn out_file(&self, name: &str) -> Result<Option<PathBuf>> {
        match &self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                Ok(Some(dir.join(name)))
            }
            None => Ok(None),
        }
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<String> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))? + "\n";
        if let Some(path) = self.out_file(name)? {
            std::fs::write(path, &text)?;
        }
        Ok(text)
    }

    fn write_csv(&self, name: &str, rows: &[EstimateRow]) -> Result<()> {
        if let Some(path) = self.out_file(name)? {
            std::fs::write(path, rows_to_csv(rows)?)?;
        }
        Ok(())
    }
}

pub fn rows_to_csv(rows: &[EstimateRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record([
            "d", "e", "p", "q", "f_pos", "f_neg", "conversion", "reset", "schedule", "decoder", "shots",
            "failures", "p_l", "ci_lo", "ci_hi", "seed",
        ])
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    for row in rows {
        w.serialize(row).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn channel_json(args: &ChannelArgs) -> Result<ChannelJson> {
    let ch = dual_rail_step(&DualRailParams {
        gamma: args.gamma,
        phi: args.phi,
        f_pos: args.f_pos,
        f_neg: args.f_neg,
        conversion: args.conversion,
        reset: args.reset,
    })?;
    Ok(ChannelJson {
        e: ch.e,
        leak: ch.leak,
        p_i: ch.pauli.p_i,
        p_x: ch.pauli.p_x,
        p_y: ch.pauli.p_y,
        p_z: ch.pauli.p_z,
    })
}

/// Rows of one experiment grid, in grid order, with `(d, rate)` per row.
pub fn run_grid(exp: &ExperimentConfig, seed: u64) -> Result<Vec<(RatePoint, EstimateRow)>> {
    let grid = exp.grid();
    let total = grid.len();
    let mut out = Vec::with_capacity(total);
    for (i, (d, rate, point)) in grid.into_iter().enumerate() {
        let row = estimate_with_budget(&point, &exp.budget(), derive_seed(seed, i as u64))?;
        eprintln!(
            "[{}] {}/{} d={d} rate={rate} p_L={:.3e} ({}/{})",
            exp.name,
            i + 1,
            total,
            row.p_l,
            row.failures,
            row.shots
        );
        out.push((
            RatePoint {
                d,
                rate,
                shots: row.shots,
                failures: row.failures,
            },
            row,
        ));
    }
    Ok(out)
}

fn experiment_seed(base: u64, index: usize) -> u64 {
    derive_seed(base, 1_000_000 + index as u64)
}

fn run_all_grids(s: &Session) -> Result<Vec<Vec<(RatePoint, EstimateRow)>>> {
    if s.config.experiment.is_empty() {
        return Err(Error::Config("config has no [[experiment]] entries".into()));
    }
    s.config
        .experiment
        .iter()
        .enumerate()
        .map(|(i, exp)| run_grid(exp, experiment_seed(s.seed, i)))
        .collect()
}

pub fn cmd_threshold(s: &Session) -> Result<(Vec<ExperimentThreshold>, String)> {
    let grids = with_workers(s.workers, || run_all_grids(s))??;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (i, (exp, grid)) in s.config.experiment.iter().zip(&grids).enumerate() {
        let points: Vec<RatePoint> = grid.iter().map(|g| g.0).collect();
        rows.extend(grid.iter().map(|g| g.1.clone()));
        let report = find_threshold(&points, experiment_seed(s.seed, i) ^ 0xB007);
        match report.threshold {
            Some(t) => eprintln!(
                "[{}] crossing {t:.4} (95% CI {:.4}..{:.4})",
                exp.name,
                report.ci_lo.unwrap_or(f64::NAN),
                report.ci_hi.unwrap_or(f64::NAN)
            ),
            None => eprintln!("[{}] no crossing in the grid", exp.name),
        }
        reports.push(ExperimentThreshold {
            name: exp.name.clone(),
            report,
        });
    }
    s.write_csv("threshold.csv", &rows)?;
    let json = s.write_json("threshold.json", &reports)?;
    Ok((reports, json))
}

pub fn cmd_scaling(s: &Session) -> Result<(Vec<ExperimentScaling>, String)> {
    for exp in &s.config.experiment {
        if exp.threshold.is_none() {
            return Err(Error::Config(format!("experiment '{}' needs a threshold for scaling", exp.name)));
        }
    }
    let grids = with_workers(s.workers, || run_all_grids(s))??;
    let mut rows = Vec::new();
    let mut out = Vec::new();
    for (exp, grid) in s.config.experiment.iter().zip(&grids) {
        let points: Vec<RatePoint> = grid.iter().map(|g| g.0).collect();
        rows.extend(grid.iter().map(|g| g.1.clone()));
        let mut ds = exp.distances.clone();
        ds.sort_unstable();
        ds.dedup();
        let mut fits = Vec::new();
        let mut refused = Vec::new();
        for d in ds {
            match fit_scaling_exponent(&points, d, exp.threshold.unwrap_or(1.0), exp.min_failures.max(10)) {
                Ok(fit) => {
                    eprintln!("[{}] d={d} slope {:.3} (r2 {:.4})", exp.name, fit.slope, fit.r2);
                    fits.push(fit);
                }
                Err(e) => {
                    eprintln!("[{}] d={d}: {e}", exp.name);
                    refused.push((d, e.to_string()));
                }
            }
        }
        out.push(ExperimentScaling {
            name: exp.name.clone(),
            fits,
            refused,
        });
    }
    s.write_csv("scaling.csv", &rows)?;
    let json = s.write_json("scaling.json", &out)?;
    if let Some(bad) = out.iter().find(|e| !e.refused.is_empty()) {
        return Err(Error::InsufficientStatistics(format!("{}: {}", bad.name, bad.refused[0].1)));
    }
    Ok((out, json))
}

pub fn cmd_hierarchy(s: &Session) -> Result<(HierarchyJson, String)> {
    let h = s
        .config
        .hierarchy
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [hierarchy] table".into()))?;
    let report = with_workers(s.workers, || hierarchy_experiment(h.d, h.rate, h.shots, s.seed, h.decoder))??;
    eprintln!(
        "missed {:.3e}  pauli {:.3e}  heralded {:.3e}  gaps {:.1} sigma, {:.1} sigma",
        report.missed.p_l, report.pauli.p_l, report.heralded.p_l, report.gap_missed_pauli, report.gap_pauli_heralded
    );
    let census = d2_single_event_census(crate::code::CheckBasis::X, h.decoder)?;
    s.write_csv(
        "hierarchy.csv",
        &[report.missed.clone(), report.pauli.clone(), report.heralded.clone()],
    )?;
    let out = HierarchyJson {
        report,
        d2_census: census,
    };
    let json = s.write_json("hierarchy.json", &out)?;
    Ok((out, json))
}

fn sample_config(s: &Session) -> Result<&crate::config::SampleConfig> {
    s.config
        .sample
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [sample] table".into()))
}

/// JSONL text of the sampled shots.
pub fn cmd_sample(s: &Session) -> Result<String> {
    let cfg = sample_config(s)?;
    let circuit = cfg.point().circuit()?;
    let mut sim = FrameSimulator::new(&circuit);
    sim.force_flags(&cfg.force_flags);
    let mut text = String::new();
    for i in 0..cfg.shots {
        let shot = sim.run(&mut RandomFaults::new(shot_rng(s.seed, i)));
        text.push_str(&serde_json::to_string(&shot.to_line(i)).map_err(|e| Error::InvalidArgument(e.to_string()))?);
        text.push('\n');
    }
    eprintln!("sampled {} shots", cfg.shots);
    if let Some(path) = s.out_file("shots.jsonl")? {
        std::fs::write(path, &text)?;
    }
    Ok(text)
}

/// JSONL text of decoded shots read from `input`.
pub fn cmd_decode(s: &Session, input: &Path) -> Result<String> {
    let cfg = sample_config(s)?;
    let circuit = cfg.point().circuit()?;
    let graph = build_decoding_graph(&circuit)?;
    let mut decoder = cfg.decoder.build();
    let reader = std::io::BufReader::new(std::fs::File::open(input)?);
    let mut text = String::new();
    let mut fails = 0u64;
    let mut count = 0u64;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ShotLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: n + 1,
            msg: e.to_string(),
        })?;
        let shot = ShotRecord::from_line(&parsed)
            .filter(|r| r.detectors.len() == graph.num_detectors && !r.observables.is_empty())
            .ok_or_else(|| Error::Parse {
                line: n + 1,
                msg: "shot does not match the configured circuit".into(),
            })?;
        let erasure = ErasureSet::from_flags(&graph, &shot.flags);
        let corr = decoder.decode(&graph, &erasure, &shot.detectors)?;
        let predicted: String = (0..shot.observables.len())
            .map(|i| if corr.flips(i) { '1' } else { '0' })
            .collect();
        let fail = predicted != parsed.obs;
        fails += fail as u64;
        count += 1;
        let out = DecodeLine {
            predicted_obs: predicted,
            actual_obs: parsed.obs,
            fail,
        };
        text.push_str(&serde_json::to_string(&out).map_err(|e| Error::InvalidArgument(e.to_string()))?);
        text.push('\n');
    }
    eprintln!("decoded {count} shots, {fails} failures");
    if let Some(path) = s.out_file("decoded.jsonl")? {
        std::fs::write(path, &text)?;
    }
    Ok(text)
}

pub fn cmd_verify(s: &Session, circuits: usize, corrupt: bool) -> Result<(VerifyReport, String)> {
    let opts = VerifyOptions {
        seed: s.seed,
        random_circuits: circuits,
    };
    let report = if corrupt {
        run_verify_with(&opts, corrupted_factory().as_ref())?
    } else {
        run_verify(&opts)?
    };
    for row in &report.syndrome_table {
        eprintln!("{}{} -> {}", row.pauli, row.qubit, row.syndrome);
    }
    for suite in &report.suites {
        eprintln!(
            "{} {} ({} cases, {} failures){}",
            if suite.passed { "PASS" } else { "FAIL" },
            suite.name,
            suite.cases,
            suite.failures,
            if suite.passed || suite.detail.is_empty() {
                String::new()
            } else {
                format!(": {}", suite.detail.lines().next().unwrap_or(""))
            }
        );
    }
    let json = s.write_json("verify.json", &report)?;
    Ok((report, json))
}

/// Runs a parsed command line, writing results to `stdout`; returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> i32 {
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let needs_config = !matches!(cli.command, Command::Channel(_) | Command::Verify { .. });
    let s = Session::new(&cli.global, needs_config)?;
    let text = match &cli.command {
        Command::Channel(args) => {
            serde_json::to_string(&channel_json(args)?).map_err(|e| Error::InvalidArgument(e.to_string()))? + "\n"
        }
        Command::Sample => cmd_sample(&s)?,
        Command::Decode { input } => cmd_decode(&s, input)?,
        Command::Threshold => cmd_threshold(&s)?.1,
        Command::Scaling => cmd_scaling(&s)?.1,
        Command::Hierarchy => cmd_hierarchy(&s)?.1,
        Command::Verify {
            circuits,
            corrupt_decoder,
        } => {
            let (report, json) = cmd_verify(&s, *circuits, *corrupt_decoder)?;
            stdout.write_all(json.as_bytes())?;
            if !report.passed() {
                eprintln!("failing suites: {}", report.failing().join(", "));
                return Ok(EXIT_FAILURE);
            }
            return Ok(EXIT_OK);
        }
    };
    stdout.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}
