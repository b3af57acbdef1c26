use serde::{Deserialize, Serialize};

use super::dense::{pauli_matrices, DenseChannel, CPTP_TOL};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Probability normalization tolerance.
pub const PROB_TOL: f64 = 1e-12;

/// Single-qubit Pauli channel `rho -> sum_P p_P P rho P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel {
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
}

impl PauliChannel {
    pub const IDENTITY: PauliChannel = PauliChannel {
        p_i: 1.0,
        p_x: 0.0,
        p_y: 0.0,
        p_z: 0.0,
    };

    pub fn new(p_i: f64, p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let ch = Self { p_i, p_x, p_y, p_z };
        ch.validate()?;
        Ok(ch)
    }

    /// Nontrivial Pauli with total probability `p`, split evenly.
    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(1.0 - p, p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn dephasing(phi: f64) -> Result<Self> {
        Self::new(1.0 - phi, 0.0, 0.0, phi)
    }

    pub fn validate(&self) -> Result<()> {
        let probs = self.probs();
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArgument(format!(
                "Pauli probabilities must lie in [0, 1]: {probs:?}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidArgument(format!(
                "Pauli probabilities sum to {sum}, not 1"
            )));
        }
        Ok(())
    }

    /// `[p_i, p_x, p_y, p_z]`.
    pub fn probs(&self) -> [f64; 4] {
        [self.p_i, self.p_x, self.p_y, self.p_z]
    }

    pub fn prob(&self, p: Pauli) -> f64 {
        match p {
            Pauli::I => self.p_i,
            Pauli::X => self.p_x,
            Pauli::Y => self.p_y,
            Pauli::Z => self.p_z,
        }
    }

    /// Total probability of a nontrivial Pauli.
    pub fn error_rate(&self) -> f64 {
        self.p_x + self.p_y + self.p_z
    }

    /// Channel applying `self` then `other`; Pauli products convolve over XOR.
    pub fn then(&self, other: &PauliChannel) -> PauliChannel {
        let mut out = [0.0; 4];
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                out[a.mul(b) as usize] += self.prob(a) * other.prob(b);
            }
        }
        PauliChannel {
            p_i: out[0],
            p_x: out[1],
            p_y: out[2],
            p_z: out[3],
        }
    }

    /// Samples a Pauli from a uniform draw in `[0, 1)`.
    pub fn sample(&self, u: f64) -> Pauli {
        let mut acc = self.p_x;
        if u < acc {
            return Pauli::X;
        }
        acc += self.p_y;
        if u < acc {
            return Pauli::Y;
        }
        acc += self.p_z;
        if u < acc {
            return Pauli::Z;
        }
        Pauli::I
    }
}

/// Pauli-twirled approximation of a single-qubit channel.
///
/// Uses the diagonal of the process matrix in the Pauli basis:
/// `p_P = sum_k |tr(P K_k)|^2 / 4`.
pub fn pauli_twirl(ch: &DenseChannel) -> Result<PauliChannel> {
    if ch.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            actual: ch.dim(),
        });
    }
    let dev = ch.trace_deviation();
    if dev > CPTP_TOL {
        return Err(Error::NotCptp(dev));
    }
    let paulis = pauli_matrices();
    let mut p = [0.0; 4];
    for (slot, pm) in p.iter_mut().zip(&paulis) {
        *slot = ch
            .kraus_ops()
            .iter()
            .map(|k| (pm.adjoint() * k).trace().norm_sqr() / 4.0)
            .sum();
    }
    Ok(PauliChannel {
        p_i: p[0],
        p_x: p[1],
        p_y: p[2],
        p_z: p[3],
    })
}

/// How a heralded erasure is returned to the computational subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConversionMode {
    /// Re-prepared in the maximally mixed state: uniform over I, X, Y, Z.
    Mixed,
    /// Reset to the basis state it decayed from: dephasing, I or Z with 1/2 each.
    Biased,
}

impl ConversionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ConversionMode::Mixed => "mixed",
            ConversionMode::Biased => "biased",
        }
    }
}

/// Pauli channel induced by erasure conversion.
pub fn conversion_channel(mode: ConversionMode) -> PauliChannel {
    match mode {
        ConversionMode::Mixed => PauliChannel {
            p_i: 0.25,
            p_x: 0.25,
            p_y: 0.25,
            p_z: 0.25,
        },
        ConversionMode::Biased => PauliChannel {
            p_i: 0.5,
            p_x: 0.0,
            p_y: 0.0,
            p_z: 0.5,
        },
    }
}
