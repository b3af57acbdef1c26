//! Stabilizer codes: the four-qubit example code and rotated surface codes.
//!
//! Rotated surface code layout: data qubit `(row, col)` of the `d x d` grid has
//! index `row * d + col`. Stabilizer faces sit at `(i, j)` for `i, j in 0..=d`
//! and touch the data qubits at their four corners `(i-1, j-1)`, `(i-1, j)`,
//! `(i, j-1)`, `(i, j)` that lie inside the grid. Faces with `i + j` even are
//! X-type; weight-2 X faces run along the top and bottom edges, weight-2 Z faces
//! along the left and right edges. Generators are ordered X-type first, then
//! Z-type, each row-major over face position.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOp};

/// Basis of a CSS stabilizer generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckBasis {
    X,
    Z,
}

impl CheckBasis {
    pub fn pauli(self) -> Pauli {
        match self {
            CheckBasis::X => Pauli::X,
            CheckBasis::Z => Pauli::Z,
        }
    }
}

/// Number of CX layers used by the syndrome-extraction schedule.
pub const CX_LAYERS: usize = 4;

/// One stabilizer generator with its basis and CX schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizer {
    pub op: PauliOp,
    pub basis: CheckBasis,
    /// Data qubit touched in each CX layer, if any.
    pub schedule: [Option<usize>; CX_LAYERS],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    pub stabilizers: Vec<Stabilizer>,
    pub logical_x: PauliOp,
    pub logical_z: PauliOp,
    pub distance: usize,
}

fn css_stabilizer(
    n: usize,
    basis: CheckBasis,
    schedule: [Option<usize>; CX_LAYERS],
) -> Stabilizer {
    let qubits: Vec<usize> = schedule.iter().flatten().copied().collect();
    Stabilizer {
        op: PauliOp::uniform(n, &qubits, basis.pauli()),
        basis,
        schedule,
    }
}

/// The four-qubit distance-2 surface code with checks `X1X3`, `Z1Z2Z3Z4`, `X2X4`.
///
/// Data qubits `d1..d4` map to indices `0..4`; the generators correspond to the
/// ancillas `a1`, `a2`, `a3` in that order.
pub fn build_d2_surface_code() -> StabilizerCode {
    let n = 4;
    // Z check touches d1..d4 in order; X checks are placed so that every
    // shared qubit sees the Z check first.
    let stabilizers = vec![
        css_stabilizer(n, CheckBasis::X, [None, Some(0), None, Some(2)]),
        css_stabilizer(n, CheckBasis::Z, [Some(0), Some(1), Some(2), Some(3)]),
        css_stabilizer(n, CheckBasis::X, [Some(1), None, Some(3), None]),
    ];
    StabilizerCode {
        name: "surface_d2".to_string(),
        n,
        stabilizers,
        logical_x: PauliOp::uniform(n, &[0, 1], Pauli::X),
        logical_z: PauliOp::uniform(n, &[0, 2], Pauli::Z),
        distance: 2,
    }
}

/// Rotated surface code of odd distance `d >= 3`.
pub fn build_rotated_surface_code(d: usize) -> Result<StabilizerCode> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "rotated surface code distance must be odd and >= 3, got {d}"
        )));
    }
    let n = d * d;
    let data = |r: isize, c: isize| -> Option<usize> {
        (r >= 0 && c >= 0 && (r as usize) < d && (c as usize) < d)
            .then(|| r as usize * d + c as usize)
    };

    let mut x_checks = Vec::new();
    let mut z_checks = Vec::new();
    for i in 0..=d as isize {
        for j in 0..=d as isize {
            let basis = if (i + j) % 2 == 0 {
                CheckBasis::X
            } else {
                CheckBasis::Z
            };
            let on_top_bottom = i == 0 || i == d as isize;
            let on_left_right = j == 0 || j == d as isize;
            if on_top_bottom && on_left_right {
                continue;
            }
            if on_top_bottom && basis != CheckBasis::X {
                continue;
            }
            if on_left_right && basis != CheckBasis::Z {
                continue;
            }
            let nw = data(i - 1, j - 1);
            let ne = data(i - 1, j);
            let sw = data(i, j - 1);
            let se = data(i, j);
            let schedule = match basis {
                CheckBasis::X => [nw, ne, sw, se],
                CheckBasis::Z => [nw, sw, ne, se],
            };
            let stab = css_stabilizer(n, basis, schedule);
            match basis {
                CheckBasis::X => x_checks.push(stab),
                CheckBasis::Z => z_checks.push(stab),
            }
        }
    }
    let mut stabilizers = x_checks;
    stabilizers.extend(z_checks);

    let row: Vec<usize> = (0..d).collect();
    let col: Vec<usize> = (0..d).map(|r| r * d).collect();
    let commutes_with_all = |op: &PauliOp| {
        stabilizers
            .iter()
            .all(|s| s.op.commutes(op).expect("same size"))
    };
    let pick = |p: Pauli| -> PauliOp {
        [&row, &col]
            .into_iter()
            .map(|qs| PauliOp::uniform(n, qs, p))
            .find(|op| commutes_with_all(op))
            .expect("a boundary-to-boundary line is always a logical")
    };
    let logical_x = pick(Pauli::X);
    let logical_z = pick(Pauli::Z);

    Ok(StabilizerCode {
        name: format!("rotated_surface_d{d}"),
        n,
        stabilizers,
        logical_x,
        logical_z,
        distance: d,
    })
}

/// Bit `i` is set when `error` anticommutes with stabilizer `i`.
pub fn syndrome_of(code: &StabilizerCode, error: &PauliOp) -> Result<Vec<bool>> {
    code.stabilizers
        .iter()
        .map(|s| s.op.anticommutes(error))
        .collect()
}

/// Logical coset of an operator that commutes with every stabilizer.
///
/// The label records which logical Pauli the operator implements: an X
/// component anticommutes with `logical_z`, a Z component with `logical_x`.
pub fn logical_class(code: &StabilizerCode, pauli: &PauliOp) -> Result<Pauli> {
    let syndrome = syndrome_of(code, pauli)?;
    if let Some(i) = syndrome.iter().position(|&b| b) {
        return Err(Error::Precondition(format!(
            "operator {pauli} violates stabilizer {i}"
        )));
    }
    let has_x = pauli.anticommutes(&code.logical_z)?;
    let has_z = pauli.anticommutes(&code.logical_x)?;
    Ok(Pauli::from_bits(has_x, has_z))
}

impl StabilizerCode {
    pub fn num_stabilizers(&self) -> usize {
        self.stabilizers.len()
    }

    pub fn stabilizers_of(&self, basis: CheckBasis) -> impl Iterator<Item = (usize, &Stabilizer)> {
        self.stabilizers
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.basis == basis)
    }

    /// Logical operator measured by a memory experiment in `basis`.
    pub fn logical(&self, basis: CheckBasis) -> &PauliOp {
        match basis {
            CheckBasis::X => &self.logical_x,
            CheckBasis::Z => &self.logical_z,
        }
    }

    /// Plain-text description.
    ///
    /// ```text
    /// # rotated_surface_d3
    /// qubits 9
    /// distance 3
    /// X2 X3
    /// ...
    /// logical_x X1 X2 X3
    /// logical_z Z1 Z4 Z7
    /// ```
    ///
    /// Every line that does not start with `#` or a keyword is one stabilizer in
    /// sparse 1-based form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.name);
        let _ = writeln!(out, "qubits {}", self.n);
        let _ = writeln!(out, "distance {}", self.distance);
        for s in &self.stabilizers {
            let _ = writeln!(out, "{}", s.op.to_sparse_string());
        }
        let _ = writeln!(out, "logical_x {}", self.logical_x.to_sparse_string());
        let _ = writeln!(out, "logical_z {}", self.logical_z.to_sparse_string());
        out
    }

    /// Parses [`StabilizerCode::to_text`] output.
    ///
    /// CX schedules are not part of the text form; stabilizers parsed here get a
    /// schedule that visits their support in ascending order, one qubit per layer.
    pub fn from_text(text: &str) -> Result<StabilizerCode> {
        let mut name = String::from("custom");
        let mut n = None;
        let mut distance = None;
        let mut stab_lines = Vec::new();
        let mut lx = None;
        let mut lz = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let perr = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                name = rest.trim().to_string();
                continue;
            }
            let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
            match head {
                "qubits" => {
                    n = Some(rest.trim().parse().map_err(|_| perr("bad qubit count".into()))?)
                }
                "distance" => {
                    distance = Some(rest.trim().parse().map_err(|_| perr("bad distance".into()))?)
                }
                "logical_x" => lx = Some((lineno + 1, rest.to_string())),
                "logical_z" => lz = Some((lineno + 1, rest.to_string())),
                _ => stab_lines.push((lineno + 1, line.to_string())),
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing {what}"),
        };
        let n: usize = n.ok_or_else(|| missing("qubits"))?;
        let parse_at = |(line, s): (usize, String)| {
            PauliOp::parse_sparse(n, &s).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line, msg },
                other => other,
            })
        };
        let mut stabilizers = Vec::new();
        for entry in stab_lines {
            let line = entry.0;
            let op = parse_at(entry)?;
            let terms = op.terms();
            let basis = if terms.iter().all(|&(_, p)| p == Pauli::X) {
                CheckBasis::X
            } else if terms.iter().all(|&(_, p)| p == Pauli::Z) {
                CheckBasis::Z
            } else {
                return Err(Error::Parse {
                    line,
                    msg: "only CSS stabilizers are supported".into(),
                });
            };
            if terms.len() > CX_LAYERS {
                return Err(Error::Parse {
                    line,
                    msg: format!("stabilizer weight above {CX_LAYERS}"),
                });
            }
            let mut schedule = [None; CX_LAYERS];
            for (slot, &(q, _)) in schedule.iter_mut().zip(&terms) {
                *slot = Some(q);
            }
            stabilizers.push(Stabilizer {
                op,
                basis,
                schedule,
            });
        }
        Ok(StabilizerCode {
            name,
            n,
            stabilizers,
            logical_x: parse_at(lx.ok_or_else(|| missing("logical_x"))?)?,
            logical_z: parse_at(lz.ok_or_else(|| missing("logical_z"))?)?,
            distance: distance.ok_or_else(|| missing("distance"))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syndrome_string(code: &StabilizerCode, e: &PauliOp) -> String {
        syndrome_of(code, e)
            .unwrap()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    /// Smallest weight of a nontrivial logical, by exhaustive search up to `max_weight`.
    fn min_logical_weight(code: &StabilizerCode, max_weight: usize) -> Option<usize> {
        let n = code.n;
        for w in 1..=max_weight {
            let mut found = false;
            for_each_subset(n, w, &mut |qs| {
                if found {
                    return;
                }
                let mut assign = vec![0usize; w];
                loop {
                    let terms: Vec<_> = qs
                        .iter()
                        .zip(&assign)
                        .map(|(&q, &a)| (q, [Pauli::X, Pauli::Y, Pauli::Z][a]))
                        .collect();
                    let op = PauliOp::from_sparse(n, &terms);
                    if let Ok(c) = logical_class(code, &op) {
                        if c != Pauli::I {
                            found = true;
                            return;
                        }
                    }
                    let mut k = 0;
                    while k < w {
                        assign[k] += 1;
                        if assign[k] < 3 {
                            break;
                        }
                        assign[k] = 0;
                        k += 1;
                    }
                    if k == w {
                        break;
                    }
                }
            });
            if found {
                return Some(w);
            }
        }
        None
    }

    fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
            if cur.len() == k {
                f(cur);
                return;
            }
            for q in start..n {
                cur.push(q);
                rec(q + 1, n, k, cur, f);
                cur.pop();
            }
        }
        rec(0, n, k, &mut Vec::new(), f);
    }

    fn assert_code_invariants(code: &StabilizerCode) {
        for a in &code.stabilizers {
            for b in &code.stabilizers {
                assert!(a.op.commutes(&b.op).unwrap());
            }
            assert!(a.op.commutes(&code.logical_x).unwrap());
            assert!(a.op.commutes(&code.logical_z).unwrap());
        }
        assert!(code.logical_x.anticommutes(&code.logical_z).unwrap());
        for s in &code.stabilizers {
            assert!(syndrome_of(code, &s.op).unwrap().iter().all(|&b| !b));
        }
    }

    #[test]
    fn d2_code_shape_and_syndrome_table() {
        let code = build_d2_surface_code();
        assert_eq!(code.n, 4);
        assert_eq!(code.num_stabilizers(), 3);
        assert_code_invariants(&code);
        let single = |q, p| PauliOp::single(4, q, p);
        assert_eq!(syndrome_string(&code, &PauliOp::identity(4)), "000");
        assert_eq!(syndrome_string(&code, &single(0, Pauli::Z)), "100");
        assert_eq!(syndrome_string(&code, &single(1, Pauli::Z)), "001");
        for q in 0..4 {
            assert_eq!(syndrome_string(&code, &single(q, Pauli::X)), "010");
        }
        assert_eq!(syndrome_string(&code, &single(0, Pauli::Y)), "110");
        assert_eq!(syndrome_string(&code, &single(1, Pauli::Y)), "011");
    }

    #[test]
    fn d2_minimum_logical_weight_is_two_over_all_paulis() {
        // Full enumeration of all 4^4 operators.
        let code = build_d2_surface_code();
        let mut best = usize::MAX;
        for idx in 0..256usize {
            let terms: Vec<_> = (0..4).map(|q| (q, Pauli::ALL[(idx >> (2 * q)) & 3])).collect();
            let op = PauliOp::from_sparse(4, &terms);
            if let Ok(c) = logical_class(&code, &op) {
                if c != Pauli::I {
                    best = best.min(op.weight());
                }
            }
        }
        assert_eq!(best, 2);
    }

    #[test]
    fn rotated_code_sizes() {
        let c3 = build_rotated_surface_code(3).unwrap();
        assert_eq!(c3.n, 9);
        assert_eq!(c3.num_stabilizers(), 8);
        assert_eq!(c3.stabilizers_of(CheckBasis::X).count(), 4);
        assert_eq!(c3.stabilizers_of(CheckBasis::Z).count(), 4);
        // X-type first.
        assert!(c3.stabilizers[..4].iter().all(|s| s.basis == CheckBasis::X));
        let c5 = build_rotated_surface_code(5).unwrap();
        assert_eq!((c5.n, c5.num_stabilizers()), (25, 24));
        for d in [3, 5, 7, 9] {
            assert_code_invariants(&build_rotated_surface_code(d).unwrap());
        }
    }

    #[test]
    fn rotated_code_rejects_bad_distance() {
        for d in [0, 1, 2, 4, 6] {
            assert!(matches!(
                build_rotated_surface_code(d),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn rotated_d3_distance_is_three() {
        let code = build_rotated_surface_code(3).unwrap();
        assert_eq!(min_logical_weight(&code, 3), Some(3));
    }

    #[test]
    fn cx_schedule_has_no_layer_conflicts() {
        for code in [build_d2_surface_code(), build_rotated_surface_code(5).unwrap()] {
            for layer in 0..CX_LAYERS {
                let mut used = vec![false; code.n];
                for s in &code.stabilizers {
                    if let Some(q) = s.schedule[layer] {
                        assert!(!used[q], "{} layer {layer} reuses qubit {q}", code.name);
                        used[q] = true;
                    }
                }
            }
        }
    }

    #[test]
    fn logical_class_examples() {
        let code = build_rotated_surface_code(3).unwrap();
        assert_eq!(logical_class(&code, &code.stabilizers[0].op).unwrap(), Pauli::I);
        assert_eq!(logical_class(&code, &code.logical_x).unwrap(), Pauli::X);
        assert_eq!(logical_class(&code, &code.logical_z).unwrap(), Pauli::Z);
        let y = code.logical_x.mul(&code.logical_z).unwrap();
        assert_eq!(logical_class(&code, &y).unwrap(), Pauli::Y);
        let xs = code.logical_x.mul(&code.stabilizers[5].op).unwrap();
        assert_eq!(logical_class(&code, &xs).unwrap(), Pauli::X);
        let bad = PauliOp::single(9, 4, Pauli::X);
        assert!(matches!(logical_class(&code, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn text_round_trip() {
        for code in [build_d2_surface_code(), build_rotated_surface_code(3).unwrap()] {
            let text = code.to_text();
            let back = StabilizerCode::from_text(&text).unwrap();
            assert_eq!(back.n, code.n);
            assert_eq!(back.distance, code.distance);
            assert_eq!(back.logical_x, code.logical_x);
            assert_eq!(back.logical_z, code.logical_z);
            let ops: Vec<_> = back.stabilizers.iter().map(|s| s.op.clone()).collect();
            let orig: Vec<_> = code.stabilizers.iter().map(|s| s.op.clone()).collect();
            assert_eq!(ops, orig);
        }
        let d2 = build_d2_surface_code().to_text();
        assert!(d2.lines().any(|l| l == "X1 X3"));
    }
}
