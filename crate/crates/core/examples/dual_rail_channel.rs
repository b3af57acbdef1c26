//! Effective per-step channel of a dual-rail qubit for a few damping rates,
//! with and without imperfect erasure checks.

use erasure_qec::channel::{dual_rail_step, DualRailParams};

fn main() -> erasure_qec::Result<()> {
    println!("{:>8} {:>6} {:>10} {:>10} {:>10} {:>10}", "gamma", "f_neg", "e", "leak", "p_z", "flag");
    for gamma in [1e-3, 1e-2, 5e-2] {
        for f_neg in [0.0, 0.1] {
            let ch = dual_rail_step(&DualRailParams {
                gamma,
                phi: 1e-4,
                f_pos: 1e-3,
                f_neg,
                ..Default::default()
            })?;
            println!(
                "{gamma:>8.0e} {f_neg:>6.2} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}",
                ch.e,
                ch.leak,
                ch.pauli.p_z,
                ch.herald_probability()
            );
        }
    }
    Ok(())
}
