//! Circuit-level memory at d = 3 and 5 under damping, heralded by checks after
//! every gate or replaced by its twirled Pauli channel.

use erasure_qec::circuit::Schedule;
use erasure_qec::montecarlo::{estimate_logical_error, NoiseModel, NoisePoint};

fn main() -> erasure_qec::Result<()> {
    for gamma in [0.004, 0.01, 0.02] {
        for d in [3, 5] {
            let base = NoisePoint {
                model: NoiseModel::Circuit,
                d,
                rounds: d,
                schedule: Schedule::EveryGate,
                ..Default::default()
            };
            let heralded = estimate_logical_error(&NoisePoint { e: gamma, ..base }, 5_000, 1)?;
            let twirled = estimate_logical_error(&NoisePoint { p: 0.75 * gamma, ..base }, 5_000, 1)?;
            println!("gamma={gamma} d={d}: heralded {:.4}  unheralded {:.4}", heralded.p_l, twirled.p_l);
        }
    }
    Ok(())
}
