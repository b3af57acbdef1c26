//! Acceptance criteria, one PASS/FAIL line each. Runs the bundled configs at
//! full shot counts; expect a few minutes in release mode.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Parser;
use erasure_qec::channel::{amplitude_damping_channel, pauli_twirl};
use erasure_qec::cli::{self, Cli, GlobalArgs, Session};
use erasure_qec::decoder::{Decoder, DecoderKind};
use erasure_qec::verify::{erasure_exhaustive, frame_vs_tableau, peeling_vs_ml};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn session(name: &str) -> Session {
    let global = GlobalArgs {
        config: Some(config(name)),
        ..Default::default()
    };
    Session::new(&global, true).expect("bundled config loads")
}

fn threshold_of(name: &str, experiment: &str) -> Option<(f64, f64, f64)> {
    let (reports, _) = cli::cmd_threshold(&session(name)).ok()?;
    let r = &reports.iter().find(|r| r.name == experiment)?.report;
    Some((r.threshold?, r.ci_lo?, r.ci_hi?))
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn erasure_threshold() -> Outcome {
    match threshold_of("erasure_threshold.cfg", "erasure_code_capacity") {
        Some((t, lo, hi)) => Outcome {
            pass: (t - 0.50).abs() <= 0.02,
            detail: format!("peeling crossing {t:.4} (95% CI {lo:.4}..{hi:.4}), target 0.50 +- 0.02"),
        },
        None => Outcome {
            pass: false,
            detail: "no crossing".into(),
        },
    }
}

fn depolarizing_threshold() -> Outcome {
    match threshold_of("pauli_threshold.cfg", "depolarizing_code_capacity") {
        Some((t, lo, hi)) => Outcome {
            pass: (0.12..=0.19).contains(&t),
            detail: format!("union-find crossing {t:.4} (95% CI {lo:.4}..{hi:.4}), target [0.12, 0.19]"),
        },
        None => Outcome {
            pass: false,
            detail: "no crossing".into(),
        },
    }
}

fn small_erasures_corrected() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for kind in [DecoderKind::Peeling, DecoderKind::UnionFind] {
        let res = erasure_exhaustive(&move || kind.build()).expect("suite runs");
        pass &= res.failures == 0;
        parts.push(format!("{}: {} failures in {} cases", kind.as_str(), res.failures, res.cases));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn scaling_exponents() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (file, d) in [("scaling_d3.cfg", 3usize), ("scaling_d5.cfg", 5)] {
        let fits = match cli::cmd_scaling(&session(file)) {
            Ok((fits, _)) => fits,
            Err(e) => {
                pass = false;
                parts.push(format!("d={d}: {e}"));
                continue;
            }
        };
        for exp in fits {
            let Some(fit) = exp.fits.iter().find(|f| f.d == d) else {
                pass = false;
                parts.push(format!("{}: no fit", exp.name));
                continue;
            };
            let target = if exp.name.starts_with("erasure") { d as f64 } else { d.div_ceil(2) as f64 };
            pass &= (fit.slope - target).abs() <= 0.5;
            parts.push(format!("{} slope {:.2} (target {target} +- 0.5)", exp.name, fit.slope));
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn error_hierarchy() -> Outcome {
    match cli::cmd_hierarchy(&session("hierarchy.cfg")) {
        Ok((h, _)) => {
            let r = &h.report;
            Outcome {
                pass: r.ordered(3.0),
                detail: format!(
                    "missed {:.3e} > pauli {:.3e} > heralded {:.3e}, gaps {:.1} and {:.1} sigma (need 3)",
                    r.missed.p_l, r.pauli.p_l, r.heralded.p_l, r.gap_missed_pauli, r.gap_pauli_heralded
                ),
            }
        }
        Err(e) => Outcome {
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn reference_agreement() -> Outcome {
    let frame = frame_vs_tableau(1000, 20240507).expect("suite runs");
    let ml = peeling_vs_ml(&|| DecoderKind::Peeling.build() as Box<dyn Decoder + Send>).expect("suite runs");
    let twirl_err = (0..=1000)
        .map(|i| {
            let g = i as f64 / 1000.0;
            let t = pauli_twirl(&amplitude_damping_channel(g).unwrap()).unwrap();
            let pz = (1.0 - g / 2.0 - (1.0 - g).sqrt()) / 2.0;
            [t.p_x - g / 4.0, t.p_y - g / 4.0, t.p_z - pz].iter().fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .fold(0.0, f64::max);
    Outcome {
        pass: frame.passed && ml.passed && twirl_err <= 1e-12,
        detail: format!(
            "frame vs tableau {}/{} agree; peeling vs ML {} disagreements in {} cases; twirl max error {twirl_err:.1e}",
            frame.cases - frame.failures,
            frame.cases,
            ml.failures,
            ml.cases
        ),
    }
}

fn heralding_gain() -> Outcome {
    let Ok((reports, _)) = cli::cmd_threshold(&session("heralding_memory.cfg")) else {
        return Outcome {
            pass: false,
            detail: "threshold run failed".into(),
        };
    };
    let get = |name: &str| reports.iter().find(|r| r.name == name).and_then(|r| r.report.threshold);
    match (get("heralded_damping"), get("unheralded_damping")) {
        (Some(h), Some(u)) => Outcome {
            pass: h / u >= 1.3,
            detail: format!("heralded crossing {h:.4}, unheralded {u:.4}, ratio {:.2} (need 1.3)", h / u),
        },
        (h, u) => Outcome {
            pass: false,
            detail: format!("missing crossing: heralded {h:?}, unheralded {u:?}"),
        },
    }
}

/// Every output file of `args`, keyed by name.
fn run_outputs(args: &[&str], out: &Path) -> (i32, BTreeMap<String, Vec<u8>>) {
    let mut argv = vec!["erasure-qec"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let cli = Cli::parse_from(argv);
    let mut stdout = Vec::new();
    let code = cli::run(&cli, &mut stdout);
    let mut files = BTreeMap::new();
    files.insert("stdout".to_string(), stdout);
    if let Ok(dir) = std::fs::read_dir(out) {
        for entry in dir.flatten() {
            files.insert(entry.file_name().to_string_lossy().into_owned(), std::fs::read(entry.path()).unwrap());
        }
    }
    (code, files)
}

fn worker_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let shots = "1000";
    let mut jobs: Vec<(&str, Vec<String>)> = Vec::new();
    for (cmd, file) in [
        ("threshold", "erasure_threshold.cfg"),
        ("threshold", "pauli_threshold.cfg"),
        ("threshold", "heralding_memory.cfg"),
        ("scaling", "scaling_d3.cfg"),
        ("scaling", "scaling_d5.cfg"),
        ("hierarchy", "hierarchy.cfg"),
        ("sample", "d2_fig3_sample.cfg"),
    ] {
        jobs.push((file, vec![cmd.into(), "--config".into(), config(file).to_string_lossy().into_owned()]));
    }
    let mut differing = Vec::new();
    let mut compared = 0;
    for (file, args) in &jobs {
        let mut results = Vec::new();
        for workers in ["1", "3"] {
            let out = tmp.path().join(format!("{file}-{workers}"));
            let mut a: Vec<&str> = args.iter().map(String::as_str).collect();
            a.extend_from_slice(&["--shots", shots, "--workers", workers]);
            results.push(run_outputs(&a, &out));
        }
        compared += results[0].1.len();
        if results[0] != results[1] {
            differing.push(file.to_string());
        }
    }
    // Decoding the sampled shots must not depend on workers either.
    let shots_file = tmp.path().join("d2_fig3_sample.cfg-1").join("shots.jsonl");
    let sample_cfg = config("d2_fig3_sample.cfg");
    let decode: Vec<_> = ["1", "3"]
        .iter()
        .map(|w| {
            run_outputs(
                &[
                    "decode",
                    "--config",
                    sample_cfg.to_str().unwrap(),
                    "--input",
                    shots_file.to_str().unwrap(),
                    "--workers",
                    w,
                ],
                &tmp.path().join(format!("decode-{w}")),
            )
        })
        .collect();
    compared += decode[0].1.len();
    if decode[0] != decode[1] {
        differing.push("decode".into());
    }
    Outcome {
        pass: differing.is_empty(),
        detail: if differing.is_empty() {
            format!("{compared} outputs byte-identical at 1 and 3 workers")
        } else {
            format!("outputs differ for {}", differing.join(", "))
        },
    }
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; a name filter
    // that matches nothing here skips the suite.
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filters.is_empty() && !filters.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("erasure threshold", erasure_threshold),
        ("depolarizing threshold", depolarizing_threshold),
        ("small erasures corrected", small_erasures_corrected),
        ("scaling exponents", scaling_exponents),
        ("error hierarchy", error_hierarchy),
        ("reference agreement", reference_agreement),
        ("heralding gain", heralding_gain),
        ("worker determinism", worker_determinism),
    ];
    let mut lines = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let line = format!("{} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        println!("{line}");
        lines.push((o.pass, line));
    }
    println!();
    for (_, line) in &lines {
        println!("{line}");
    }
    if lines.iter().any(|(p, _)| !p) {
        std::process::exit(1);
    }
}
