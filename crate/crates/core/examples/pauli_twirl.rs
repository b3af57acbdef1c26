//! Pauli twirl of single-qubit amplitude damping against its closed form.

use erasure_qec::channel::{amplitude_damping_channel, pauli_twirl};

fn main() -> erasure_qec::Result<()> {
    for gamma in [0.01, 0.1, 0.5] {
        let t = pauli_twirl(&amplitude_damping_channel(gamma)?)?;
        let s = (1.0 - gamma).sqrt();
        println!(
            "gamma={gamma}: p_x={:.6} (closed form {:.6}), p_z={:.6} (closed form {:.6})",
            t.p_x,
            gamma / 4.0,
            t.p_z,
            (1.0 - gamma / 2.0 - s) / 2.0
        );
    }
    Ok(())
}
