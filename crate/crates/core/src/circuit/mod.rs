//! Circuit IR, memory-experiment builders, Pauli-frame sampling and a
//! stabilizer-tableau reference simulator.

pub mod build;
pub mod frame;
pub mod ir;
pub mod tableau;

pub use build::{
    build_code_capacity_circuit, build_memory_circuit, build_memory_circuit_with,
    build_phenomenological_circuit, MemoryLayout, Schedule, SiteNoise, StabilizerSelection,
};
pub use frame::{
    run_forced, sample_shots, shot_rng, ErrorAssignment, FaultSource, ForcedFaults,
    FrameSimulator, NoiseEvent, RandomFaults, ShotLine, ShotRecord,
};
pub use ir::{CheckSpec, Circuit, Gate, Instruction};
pub use tableau::{tableau_reference_sim, TableauOutcome};
