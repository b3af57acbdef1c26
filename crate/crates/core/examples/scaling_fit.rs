//! Sub-threshold exponents at d = 3: erasures against depolarizing noise.

use erasure_qec::decoder::DecoderKind;
use erasure_qec::montecarlo::{estimate_with_budget, fit_scaling_exponent, NoisePoint, RatePoint, ShotBudget};

fn main() -> erasure_qec::Result<()> {
    let budget = ShotBudget {
        shots: 20_000,
        max_shots: Some(1_000_000),
        min_failures: 50,
    };
    for (label, rates, threshold) in [("erasure", [0.05, 0.08, 0.12, 0.16], 0.5), ("pauli", [0.01, 0.02, 0.04, 0.06], 0.13)] {
        let mut points = Vec::new();
        for r in rates {
            let point = if label == "erasure" {
                NoisePoint { e: r, decoder: DecoderKind::Peeling, ..Default::default() }
            } else {
                NoisePoint { p: r, ..Default::default() }
            };
            let row = estimate_with_budget(&point, &budget, 11)?;
            points.push(RatePoint { d: 3, rate: r, shots: row.shots, failures: row.failures });
        }
        let fit = fit_scaling_exponent(&points, 3, threshold, 10)?;
        println!("{label}: slope {:.2} over {:?} (r2 {:.4})", fit.slope, fit.range, fit.r2);
    }
    Ok(())
}
