//! Samples the four-qubit code's extraction circuit with an erasure check
//! after every gate and prints shots as JSON lines.

use erasure_qec::circuit::{build_memory_circuit_with, sample_shots, CheckSpec, MemoryLayout, Schedule, SiteNoise, StabilizerSelection};
use erasure_qec::code::{build_d2_surface_code, CheckBasis};

fn main() -> erasure_qec::Result<()> {
    let code = build_d2_surface_code();
    let circuit = build_memory_circuit_with(
        &code,
        1,
        &SiteNoise::new(0.02, 0.002)?,
        &CheckSpec::PERFECT,
        Schedule::EveryGate,
        MemoryLayout {
            basis: CheckBasis::Z,
            selection: StabilizerSelection::BasisOnly,
        },
    )?;
    println!("# {} qubits, {} checks, {} detectors", circuit.num_qubits(), circuit.num_checks(), circuit.num_detectors());
    for (i, shot) in sample_shots(&circuit, 10, 1)?.iter().enumerate() {
        println!("{}", serde_json::to_string(&shot.to_line(i as u64)).expect("serializable"));
    }
    Ok(())
}
