//! Exact small-system channel calculus for the dual-rail inner code.

mod dense;
mod dual_rail;
mod pauli;

pub use dense::{
    amplitude_damping_channel, compose, dephasing_channel, validate_cptp, CMatrix, DenseChannel,
    CPTP_TOL,
};
pub use dual_rail::{
    dual_rail_physical_channel, dual_rail_step, DualRailParams, EffectiveChannel, ResetProtocol,
};
pub use pauli::{conversion_channel, pauli_twirl, ConversionMode, PauliChannel, PROB_TOL};
