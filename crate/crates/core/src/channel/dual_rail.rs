//! Dual-rail inner code: one excitation shared between two damped rails.
//!
//! Basis ordering on the two-rail space is `|00>, |01>, |10>, |11>` (index
//! `2 * a + b` for rail occupations `a`, `b`). Logical `|0>` is `|01>` and logical
//! `|1>` is `|10>`; `|00>` is the erased state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dense::{amplitude_damping_channel, compose, CMatrix, DenseChannel};
use super::pauli::{pauli_twirl, ConversionMode, PauliChannel};
use crate::error::{Error, Result};

/// Reset protocol used when an erasure check flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetProtocol {
    /// Sends any state into the computational subspace.
    OneWay,
    /// Swaps the erased and computational subspaces; a good qubit that is
    /// falsely flagged ends up outside the subspace.
    Unitary,
}

impl ResetProtocol {
    pub fn as_str(self) -> &'static str {
        match self {
            ResetProtocol::OneWay => "one_way",
            ResetProtocol::Unitary => "unitary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualRailParams {
    /// Per-step probability that the excitation decays.
    pub gamma: f64,
    /// Per-step probability of a relative phase flip between the rails.
    pub phi: f64,
    /// Probability that a check flags a qubit that was not erased.
    pub f_pos: f64,
    /// Probability that a check misses an erased qubit.
    pub f_neg: f64,
    pub conversion: ConversionMode,
    pub reset: ResetProtocol,
}

impl Default for DualRailParams {
    fn default() -> Self {
        Self {
            gamma: 0.0,
            phi: 0.0,
            f_pos: 0.0,
            f_neg: 0.0,
            conversion: ConversionMode::Mixed,
            reset: ResetProtocol::OneWay,
        }
    }
}

impl DualRailParams {
    /// Decay probability for a step of length `dt` given relaxation time `t1`.
    pub fn gamma_from_t1(t1: f64, dt: f64) -> Result<f64> {
        if t1 <= 0.0 || dt < 0.0 || !t1.is_finite() || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "need t1 > 0 and dt >= 0, got t1={t1}, dt={dt}"
            )));
        }
        Ok(1.0 - (-dt / t1).exp())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("phi", self.phi),
            ("f_pos", self.f_pos),
            ("f_neg", self.f_neg),
        ] {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-step noise seen by the outer code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveChannel {
    /// Probability of a true erasure that the check heralds.
    pub e: f64,
    /// Pauli error on the unflagged, in-subspace branch.
    pub pauli: PauliChannel,
    /// Probability of an erasure the check misses.
    pub leak: f64,
    /// Probability that a good qubit is flagged.
    pub false_flag: f64,
}

impl EffectiveChannel {
    /// Probability that the check raises a flag at all.
    pub fn herald_probability(&self) -> f64 {
        self.e + self.false_flag
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Two-rail channel: independent damping on each rail, then relative dephasing.
pub fn dual_rail_physical_channel(gamma: f64, phi: f64) -> Result<DenseChannel> {
    let ad = amplitude_damping_channel(gamma)?;
    let both = ad.tensor(&ad);
    if !(0.0..=1.0).contains(&phi) {
        return Err(Error::InvalidArgument(format!(
            "phi must lie in [0, 1], got {phi}"
        )));
    }
    let flip = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.0),
        c(1.0),
        c(-1.0),
        c(1.0),
    ]));
    let dephase = DenseChannel::new(vec![
        CMatrix::identity(4, 4) * c((1.0 - phi).sqrt()),
        flip * c(phi.sqrt()),
    ])?;
    compose(&both, &dephase)
}

const SUBSPACE: [usize; 2] = [1, 2];

fn restrict(k: &CMatrix) -> CMatrix {
    DMatrix::from_fn(2, 2, |r, col| k[(SUBSPACE[r], SUBSPACE[col])])
}

/// One time step of a dual-rail qubit followed by an erasure check.
///
/// The decay branch is read off the two-rail Kraus operators: the weight that
/// leaves the `{|01>, |10>}` subspace is the erasure probability, and the
/// in-subspace blocks, renormalized, give the residual channel whose Pauli
/// twirl is reported.
pub fn dual_rail_step(params: &DualRailParams) -> Result<EffectiveChannel> {
    params.validate()?;
    let ch = dual_rail_physical_channel(params.gamma, params.phi)?;

    // Out-of-subspace weight per logical basis state: <i| K^dag P_out K |i>.
    let mut out_weight = [0.0f64; 2];
    let mut blocks = Vec::with_capacity(ch.kraus_ops().len());
    for k in ch.kraus_ops() {
        for (slot, &col) in out_weight.iter_mut().zip(&SUBSPACE) {
            *slot += (0..4)
                .filter(|r| !SUBSPACE.contains(r))
                .map(|r| k[(r, col)].norm_sqr())
                .sum::<f64>();
        }
        blocks.push(restrict(k));
    }
    if (out_weight[0] - out_weight[1]).abs() > 1e-12 {
        return Err(Error::Precondition(
            "decay probability depends on the logical state".into(),
        ));
    }
    let decay = out_weight[0];

    let pauli = if decay < 1.0 {
        let norm = c((1.0 - decay).sqrt().recip());
        let kept: Vec<CMatrix> = blocks
            .into_iter()
            .filter(|b| b.iter().any(|z| z.norm() > 0.0))
            .map(|b| b * norm)
            .collect();
        if kept.is_empty() {
            PauliChannel::IDENTITY
        } else {
            pauli_twirl(&DenseChannel::new(kept)?)?
        }
    } else {
        PauliChannel::IDENTITY
    };

    Ok(EffectiveChannel {
        e: decay * (1.0 - params.f_neg),
        pauli,
        leak: decay * params.f_neg,
        false_flag: (1.0 - decay) * params.f_pos,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma: f64, phi: f64, f_pos: f64, f_neg: f64) -> DualRailParams {
        DualRailParams {
            gamma,
            phi,
            f_pos,
            f_neg,
            ..Default::default()
        }
    }

    #[test]
    fn perfect_checks_herald_every_decay() {
        let eff = dual_rail_step(&params(0.01, 0.0, 0.0, 0.0)).unwrap();
        assert!((eff.e - 0.01).abs() < 1e-15);
        assert_eq!(eff.leak, 0.0);
        assert!((eff.pauli.p_i - 1.0).abs() < 1e-12);
        assert!(eff.pauli.error_rate() < 1e-12);
    }

    #[test]
    fn blind_checks_leak_every_decay() {
        let eff = dual_rail_step(&params(0.01, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(eff.e, 0.0);
        assert!((eff.leak - 0.01).abs() < 1e-15);
    }

    #[test]
    fn pure_dephasing_passes_through() {
        let eff = dual_rail_step(&params(0.0, 0.02, 0.0, 0.0)).unwrap();
        assert_eq!(eff.e, 0.0);
        let p = eff.pauli.probs();
        let want = [0.98, 0.0, 0.0, 0.02];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn false_positives_are_flags_not_erasures() {
        let eff = dual_rail_step(&params(0.1, 0.0, 0.05, 0.2)).unwrap();
        assert!((eff.e - 0.08).abs() < 1e-15);
        assert!((eff.leak - 0.02).abs() < 1e-15);
        assert!((eff.false_flag - 0.045).abs() < 1e-15);
        assert!(eff.e + eff.leak <= 0.1 + 1e-15);
        assert!((eff.herald_probability() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn full_decay_is_all_erasure() {
        let eff = dual_rail_step(&params(1.0, 0.3, 0.0, 0.0)).unwrap();
        assert!((eff.e - 1.0).abs() < 1e-15);
        assert_eq!(eff.pauli, PauliChannel::IDENTITY);
    }

    #[test]
    fn gamma_from_t1() {
        let g = DualRailParams::gamma_from_t1(100.0, 1.0).unwrap();
        assert!((g - (1.0 - (-0.01f64).exp())).abs() < 1e-15);
        assert!(DualRailParams::gamma_from_t1(0.0, 1.0).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(dual_rail_step(&params(1.2, 0.0, 0.0, 0.0)).is_err());
        assert!(dual_rail_step(&params(0.1, 0.0, -0.1, 0.0)).is_err());
    }
}
