//! Brute-force maximum-likelihood decoding for small codes.

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOp};

pub const ML_MAX_QUBITS: usize = 16;

/// Independent per-qubit prior: erasure with probability `e[q]`, after which
/// the qubit is uniformly random; otherwise depolarizing with rate `p[q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorPrior {
    pub e: Vec<f64>,
    pub p: Vec<f64>,
}

impl ErrorPrior {
    pub fn uniform(n: usize, e: f64, p: f64) -> Self {
        Self {
            e: vec![e; n],
            p: vec![p; n],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlResult {
    /// Representative of the most likely coset.
    pub correction: PauliOp,
    /// Logical class of the chosen coset relative to the pure error.
    pub coset: Pauli,
    /// Normalized coset probabilities, indexed by `Pauli as usize`.
    pub probabilities: [f64; 4],
}

fn anticommute(ax: u64, az: u64, bx: u64, bz: u64) -> bool {
    ((ax & bz) ^ (az & bx)).count_ones() & 1 == 1
}

/// Some Pauli with the given syndrome, by Gaussian elimination over GF(2).
fn pure_error(n: usize, stabs: &[(u64, u64)], syndrome: &[bool]) -> Result<(u64, u64)> {
    // Unknown bit q is x_q, bit n + q is z_q.
    let mut rows: Vec<(u64, bool)> = stabs
        .iter()
        .zip(syndrome)
        .map(|(&(sx, sz), &s)| (sz | (sx << n), s))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..2 * n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i].0 >> col & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i].0 >> col & 1 == 1 {
                rows[i].0 ^= rows[r].0;
                rows[i].1 ^= rows[r].1;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|&(_, s)| s) {
        return Err(Error::InvalidArgument("syndrome is inconsistent with the stabilizers".into()));
    }
    let mut v = 0u64;
    for (i, &col) in pivots.iter().enumerate() {
        if rows[i].1 {
            v |= 1 << col;
        }
    }
    let mask = (1u64 << n) - 1;
    Ok((v & mask, v >> n))
}

/// Sums the prior over every error in each logical coset consistent with
/// `syndrome` and returns the heaviest coset. Ties go to I, then X, Z, Y.
pub fn ml_decode_bruteforce(
    code: &StabilizerCode,
    prior: &ErrorPrior,
    erased: &[usize],
    syndrome: &[bool],
) -> Result<MlResult> {
    let n = code.n;
    if n > ML_MAX_QUBITS {
        return Err(Error::Refused(format!(
            "brute-force decoding is limited to {ML_MAX_QUBITS} qubits, code has {n}"
        )));
    }
    if prior.e.len() != n || prior.p.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: prior.e.len().min(prior.p.len()),
        });
    }
    if syndrome.len() != code.num_stabilizers() {
        return Err(Error::Dimension {
            expected: code.num_stabilizers(),
            actual: syndrome.len(),
        });
    }
    let mut is_erased = vec![false; n];
    for &q in erased {
        if q >= n {
            return Err(Error::InvalidArgument(format!("erased qubit {q} out of range")));
        }
        is_erased[q] = true;
    }
    // table[q][pauli as usize]
    let table: Vec<[f64; 4]> = (0..n)
        .map(|q| {
            if is_erased[q] {
                [prior.e[q] / 4.0; 4]
            } else {
                let keep = 1.0 - prior.e[q];
                let p = prior.p[q];
                [keep * (1.0 - p), keep * p / 3.0, keep * p / 3.0, keep * p / 3.0]
            }
        })
        .collect();
    let weight = |x: u64, z: u64| -> f64 {
        (0..n)
            .map(|q| table[q][Pauli::from_bits(x >> q & 1 == 1, z >> q & 1 == 1) as usize])
            .product()
    };

    let stabs: Vec<(u64, u64)> = code.stabilizers.iter().map(|s| s.op.to_masks()).collect();
    let (tx, tz) = pure_error(n, &stabs, syndrome)?;
    let (lxx, lxz) = code.logical_x.to_masks();
    let (lzx, lzz) = code.logical_z.to_masks();
    debug_assert!(anticommute(lxx, lxz, lzx, lzz));
    let reps = [
        (Pauli::I, tx, tz),
        (Pauli::X, tx ^ lxx, tz ^ lxz),
        (Pauli::Y, tx ^ lxx ^ lzx, tz ^ lxz ^ lzz),
        (Pauli::Z, tx ^ lzx, tz ^ lzz),
    ];

    let m = stabs.len();
    let mut sums = [0.0f64; 4];
    let (mut gx, mut gz) = (0u64, 0u64);
    for k in 0u64..(1u64 << m) {
        if k > 0 {
            // Gray code: flip the generator at the lowest set bit of k.
            let j = k.trailing_zeros() as usize;
            gx ^= stabs[j].0;
            gz ^= stabs[j].1;
        }
        for &(label, rx, rz) in &reps {
            sums[label as usize] += weight(rx ^ gx, rz ^ gz);
        }
    }
    let total: f64 = sums.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument(
            "syndrome and erasure pattern have zero probability under the prior".into(),
        ));
    }
    let probabilities = sums.map(|s| s / total);
    let mut best = Pauli::I;
    for cand in [Pauli::X, Pauli::Z, Pauli::Y] {
        if probabilities[cand as usize] > probabilities[best as usize] * (1.0 + 1e-12) {
            best = cand;
        }
    }
    let (_, cx, cz) = reps.iter().find(|r| r.0 == best).copied().unwrap();
    Ok(MlResult {
        correction: PauliOp::from_masks(n, cx, cz),
        coset: best,
        probabilities,
    })
}
