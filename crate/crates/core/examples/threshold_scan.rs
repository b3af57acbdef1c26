//! Small pure-erasure threshold scan with a bootstrap interval.

use erasure_qec::decoder::DecoderKind;
use erasure_qec::montecarlo::{derive_seed, estimate_logical_error, find_threshold, NoisePoint, RatePoint};

fn main() -> erasure_qec::Result<()> {
    let mut points = Vec::new();
    for d in [3, 5, 7] {
        for (i, e) in [0.40, 0.45, 0.50, 0.55].into_iter().enumerate() {
            let point = NoisePoint {
                d,
                e,
                decoder: DecoderKind::Peeling,
                ..Default::default()
            };
            let row = estimate_logical_error(&point, 20_000, derive_seed(d as u64, i as u64))?;
            println!("d={d} e={e:.2} p_L={:.4} [{:.4}, {:.4}]", row.p_l, row.ci_lo, row.ci_hi);
            points.push(RatePoint {
                d,
                rate: e,
                shots: row.shots,
                failures: row.failures,
            });
        }
    }
    let rep = find_threshold(&points, 1);
    match rep.threshold {
        Some(t) => println!("crossing {t:.3} (95% CI {:.3}..{:.3})", rep.ci_lo.unwrap(), rep.ci_hi.unwrap()),
        None => println!("no crossing in the grid"),
    }
    Ok(())
}
