//! Phase-free Pauli operators in symplectic form.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Product up to phase.
    pub fn mul(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit())
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// An n-qubit Pauli operator with the phase dropped.
///
/// Stored as two packed bit-vectors: bit `q` of `x` (resp. `z`) is set when the
/// operator has an X (resp. Z) component on qubit `q`. Y sets both.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOp {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: vec![0; words_for(n)],
            z: vec![0; words_for(n)],
        }
    }

    /// Weight-one operator `p` on qubit `q`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(q, p);
        op
    }

    /// Builds an operator from `(qubit, pauli)` pairs; later entries multiply earlier ones.
    pub fn from_sparse(n: usize, terms: &[(usize, Pauli)]) -> Self {
        let mut op = Self::identity(n);
        for &(q, p) in terms {
            let cur = op.get(q);
            op.set(q, cur.mul(p));
        }
        op
    }

    /// Same Pauli on every listed qubit.
    pub fn uniform(n: usize, qubits: &[usize], p: Pauli) -> Self {
        let mut op = Self::identity(n);
        for &q in qubits {
            op.set(q, p);
        }
        op
    }

    pub fn from_bools(x: &[bool], z: &[bool]) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Dimension {
                expected: x.len(),
                actual: z.len(),
            });
        }
        let mut op = Self::identity(x.len());
        for q in 0..x.len() {
            op.set(q, Pauli::from_bits(x[q], z[q]));
        }
        Ok(op)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize) -> Pauli {
        assert!(q < self.n, "qubit {q} out of range for {}-qubit Pauli", self.n);
        let (w, b) = (q / WORD, q % WORD);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {}-qubit Pauli", self.n);
        let (w, b) = (q / WORD, q % WORD);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((p.x_bit() as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((p.z_bit() as u64) << b);
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.get(q).x_bit()
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.get(q).z_bit()
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Qubits on which the operator acts non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    /// Non-identity `(qubit, pauli)` terms, ascending by qubit.
    pub fn terms(&self) -> Vec<(usize, Pauli)> {
        (0..self.n)
            .map(|q| (q, self.get(q)))
            .filter(|&(_, p)| p != Pauli::I)
            .collect()
    }

    fn check_dims(&self, other: &PauliOp) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(())
    }

    /// Symplectic inner product: `true` when the operators anticommute.
    pub fn anticommutes(&self, other: &PauliOp) -> Result<bool> {
        self.check_dims(other)?;
        let parity: u32 = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((ax, az), (bx, bz))| ((ax & bz) ^ (az & bx)).count_ones())
            .sum();
        Ok(parity % 2 == 1)
    }

    pub fn commutes(&self, other: &PauliOp) -> Result<bool> {
        Ok(!self.anticommutes(other)?)
    }

    /// Product up to phase.
    pub fn mul(&self, other: &PauliOp) -> Result<PauliOp> {
        let mut out = self.clone();
        out.mul_assign(other)?;
        Ok(out)
    }

    pub fn mul_assign(&mut self, other: &PauliOp) -> Result<()> {
        self.check_dims(other)?;
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
        Ok(())
    }

    /// Sparse text form with 1-based indices, e.g. `X1 X3`. Identity renders as `I`.
    pub fn to_sparse_string(&self) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "I".to_string();
        }
        terms
            .iter()
            .map(|(q, p)| format!("{}{}", p, q + 1))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses the sparse form produced by [`PauliOp::to_sparse_string`].
    pub fn parse_sparse(n: usize, s: &str) -> Result<PauliOp> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let mut terms = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let p = chars
                .next()
                .and_then(Pauli::from_char)
                .ok_or_else(|| bad(format!("bad Pauli term '{tok}'")))?;
            let idx: usize = chars
                .as_str()
                .parse()
                .map_err(|_| bad(format!("bad qubit index in '{tok}'")))?;
            if idx == 0 || idx > n {
                return Err(bad(format!("qubit index {idx} out of range 1..={n}")));
            }
            terms.push((idx - 1, p));
        }
        Ok(PauliOp::from_sparse(n, &terms))
    }

    /// Packs into `(x_mask, z_mask)` words; only valid for `n <= 64`.
    pub(crate) fn to_masks(&self) -> (u64, u64) {
        debug_assert!(self.n <= 64);
        (
            self.x.first().copied().unwrap_or(0),
            self.z.first().copied().unwrap_or(0),
        )
    }

    pub(crate) fn from_masks(n: usize, x: u64, z: u64) -> PauliOp {
        debug_assert!(n <= 64);
        let mut op = PauliOp::identity(n);
        if n > 0 {
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            op.x[0] = x & mask;
            op.z[0] = z & mask;
        }
        op
    }
}

/// Dense form, one character per qubit: `XIZY`.
impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut op = PauliOp::identity(s.chars().count());
        for (q, c) in s.chars().enumerate() {
            let p = Pauli::from_char(c).ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("unexpected character '{c}' in Pauli string"),
            })?;
            op.set(q, p);
        }
        Ok(op)
    }
}

/// Checks two Paulis for commutation, rejecting size mismatches.
pub fn pauli_commutes(a: &PauliOp, b: &PauliOp) -> Result<bool> {
    a.commutes(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn matrix(p: Pauli) -> [[C; 2]; 2] {
        let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
        match p {
            Pauli::I => [[o, z], [z, o]],
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[o, z], [z, -o]],
        }
    }

    fn kron(a: [[C; 2]; 2], b: [[C; 2]; 2]) -> [[C; 4]; 4] {
        let mut out = [[C::new(0.0, 0.0); 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = a[r / 2][c / 2] * b[r % 2][c % 2];
            }
        }
        out
    }

    fn matmul(a: &[[C; 4]; 4], b: &[[C; 4]; 4]) -> [[C; 4]; 4] {
        let mut out = [[C::new(0.0, 0.0); 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
            }
        }
        out
    }

    /// Matrix-product oracle: `AB == BA` on the explicit 4x4 operators.
    fn commute_by_matrices(a: (Pauli, Pauli), b: (Pauli, Pauli)) -> bool {
        let ma = kron(matrix(a.0), matrix(a.1));
        let mb = kron(matrix(b.0), matrix(b.1));
        let ab = matmul(&ma, &mb);
        let ba = matmul(&mb, &ma);
        (0..4).all(|r| (0..4).all(|c| (ab[r][c] - ba[r][c]).norm() < 1e-12))
    }

    #[test]
    fn commutation_examples() {
        let xi: PauliOp = "XI".parse().unwrap();
        assert!(pauli_commutes(&xi, &xi).unwrap());
        let x0 = PauliOp::single(1, 0, Pauli::X);
        let z0 = PauliOp::single(1, 0, Pauli::Z);
        assert!(!pauli_commutes(&x0, &z0).unwrap());
        let xx: PauliOp = "XX".parse().unwrap();
        let zz: PauliOp = "ZZ".parse().unwrap();
        assert!(commute_by_matrices((Pauli::X, Pauli::X), (Pauli::Z, Pauli::Z)));
        assert!(pauli_commutes(&xx, &zz).unwrap());
    }

    #[test]
    fn symplectic_matches_matrix_oracle_on_all_two_qubit_pairs() {
        for &a0 in &Pauli::ALL {
            for &a1 in &Pauli::ALL {
                for &b0 in &Pauli::ALL {
                    for &b1 in &Pauli::ALL {
                        let a = PauliOp::from_sparse(2, &[(0, a0), (1, a1)]);
                        let b = PauliOp::from_sparse(2, &[(0, b0), (1, b1)]);
                        assert_eq!(
                            a.commutes(&b).unwrap(),
                            commute_by_matrices((a0, a1), (b0, b1)),
                            "{a} vs {b}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let a = PauliOp::identity(2);
        let b = PauliOp::identity(3);
        assert!(matches!(a.commutes(&b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn weight_and_sparse_text() {
        let p: PauliOp = "XIYZ".parse().unwrap();
        assert_eq!(p.weight(), 3);
        assert_eq!(p.to_sparse_string(), "X1 Y3 Z4");
        assert_eq!(PauliOp::parse_sparse(4, "X1 Y3 Z4").unwrap(), p);
        assert_eq!(PauliOp::identity(3).to_sparse_string(), "I");
    }

    #[test]
    fn wide_operators_span_words() {
        let mut p = PauliOp::identity(130);
        p.set(0, Pauli::X);
        p.set(129, Pauli::Z);
        let q = PauliOp::single(130, 129, Pauli::X);
        assert!(p.anticommutes(&q).unwrap());
        assert_eq!(p.weight(), 2);
    }
}
