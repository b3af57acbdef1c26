use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Trace-preservation tolerance for Kraus sets.
pub const CPTP_TOL: f64 = 1e-10;

/// A channel in Kraus form on a `dim`-dimensional Hilbert space.
#[derive(Debug, Clone)]
pub struct DenseChannel {
    dim: usize,
    kraus: Vec<CMatrix>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl DenseChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let dim = kraus
            .first()
            .map(|k| k.nrows())
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        for k in &kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    actual: k.nrows().max(k.ncols()),
                });
            }
        }
        Ok(Self { dim, kraus })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![CMatrix::identity(dim, dim)],
        }
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Largest entry of `sum K^dagger K - I` in absolute value.
    pub fn trace_deviation(&self) -> f64 {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            acc += k.adjoint() * k;
        }
        acc -= CMatrix::identity(self.dim, self.dim);
        acc.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                actual: rho.nrows(),
            });
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        Ok(out)
    }

    /// Tensor product channel on `dim_a * dim_b` dimensions.
    pub fn tensor(&self, other: &DenseChannel) -> DenseChannel {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kronecker(b)))
            .collect();
        DenseChannel {
            dim: self.dim * other.dim,
            kraus,
        }
    }
}

/// True when `sum K^dagger K = I` to within [`CPTP_TOL`].
pub fn validate_cptp(ch: &DenseChannel) -> bool {
    ch.trace_deviation() <= CPTP_TOL
}

/// Applies `first`, then `second`.
pub fn compose(first: &DenseChannel, second: &DenseChannel) -> Result<DenseChannel> {
    if first.dim != second.dim {
        return Err(Error::Dimension {
            expected: first.dim,
            actual: second.dim,
        });
    }
    let kraus = second
        .kraus
        .iter()
        .flat_map(|b| first.kraus.iter().map(move |a| b * a))
        .collect();
    Ok(DenseChannel {
        dim: first.dim,
        kraus,
    })
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::InvalidArgument(format!(
            "{name} must lie in [0, 1], got {v}"
        )));
    }
    Ok(())
}

/// Single-qubit amplitude damping: `|1> -> |0>` with probability `gamma`.
pub fn amplitude_damping_channel(gamma: f64) -> Result<DenseChannel> {
    check_prob("gamma", gamma)?;
    let k0 = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c((1.0 - gamma).sqrt())]);
    let k1 = CMatrix::from_row_slice(2, 2, &[c(0.0), c(gamma.sqrt()), c(0.0), c(0.0)]);
    DenseChannel::new(vec![k0, k1])
}

/// Phase flip with probability `phi`.
pub fn dephasing_channel(phi: f64) -> Result<DenseChannel> {
    check_prob("phi", phi)?;
    let k0 = CMatrix::identity(2, 2) * c((1.0 - phi).sqrt());
    let k1 = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]) * c(phi.sqrt());
    DenseChannel::new(vec![k0, k1])
}

pub(crate) fn pauli_matrices() -> [CMatrix; 4] {
    let z0 = c(0.0);
    let one = c(1.0);
    let i = Complex64::new(0.0, 1.0);
    [
        CMatrix::identity(2, 2),
        CMatrix::from_row_slice(2, 2, &[z0, one, one, z0]),
        CMatrix::from_row_slice(2, 2, &[z0, -i, i, z0]),
        CMatrix::from_row_slice(2, 2, &[one, z0, z0, -one]),
    ]
}
