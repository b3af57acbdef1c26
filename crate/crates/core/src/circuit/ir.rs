use std::collections::HashSet;
use std::fmt::Write as _;

use crate::channel::{ConversionMode, PauliChannel, ResetProtocol};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Targets are `(control, target)` pairs.
    CX,
    H,
    /// Prepare `|0>`.
    Reset,
    MeasureZ,
}

impl Gate {
    fn keyword(self) -> &'static str {
        match self {
            Gate::CX => "CX",
            Gate::H => "H",
            Gate::Reset => "R",
            Gate::MeasureZ => "M",
        }
    }
}

/// Erasure-check parameters shared by every check of a circuit region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSpec {
    pub f_pos: f64,
    pub f_neg: f64,
    pub conversion: ConversionMode,
    pub reset: ResetProtocol,
}

impl CheckSpec {
    pub const PERFECT: CheckSpec = CheckSpec {
        f_pos: 0.0,
        f_neg: 0.0,
        conversion: ConversionMode::Mixed,
        reset: ResetProtocol::OneWay,
    };
}

impl Default for CheckSpec {
    fn default() -> Self {
        Self::PERFECT
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Gate { gate: Gate, targets: Vec<usize> },
    /// Mutually exclusive events: erasure with probability `erasure`, or the
    /// Pauli `P` with probability `pauli.prob(P)`.
    Noise {
        qubit: usize,
        erasure: f64,
        pauli: PauliChannel,
    },
    ErasureCheck {
        qubit: usize,
        spec: CheckSpec,
        id: usize,
    },
    /// Flips the next measurement of `qubit` with probability `p`.
    MeasureFlip { qubit: usize, p: f64 },
    /// Parity of the listed measurement-record indices.
    Detector { measurements: Vec<usize> },
    Observable { index: usize, measurements: Vec<usize> },
}

/// Instruction list over `num_qubits` qubits with derived counts.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    instructions: Vec<Instruction>,
    num_measurements: usize,
    num_detectors: usize,
    num_observables: usize,
    num_checks: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            ..Default::default()
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn num_measurements(&self) -> usize {
        self.num_measurements
    }

    pub fn num_detectors(&self) -> usize {
        self.num_detectors
    }

    pub fn num_observables(&self) -> usize {
        self.num_observables
    }

    pub fn num_checks(&self) -> usize {
        self.num_checks
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "qubit {q} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    fn check_prob(name: &str, p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "{name} must lie in [0, 1], got {p}"
            )));
        }
        Ok(())
    }

    /// Appends an instruction after validating it against the current state.
    pub fn push(&mut self, instr: Instruction) -> Result<()> {
        match &instr {
            Instruction::Gate { gate, targets } => {
                for &q in targets {
                    self.check_qubit(q)?;
                }
                match gate {
                    Gate::CX => {
                        if targets.len() % 2 != 0 {
                            return Err(Error::InvalidArgument(
                                "CX needs an even number of targets".into(),
                            ));
                        }
                        if targets.chunks(2).any(|p| p[0] == p[1]) {
                            return Err(Error::InvalidArgument(
                                "CX control equals target".into(),
                            ));
                        }
                    }
                    Gate::MeasureZ => self.num_measurements += targets.len(),
                    Gate::H | Gate::Reset => {}
                }
            }
            Instruction::Noise {
                qubit,
                erasure,
                pauli,
            } => {
                self.check_qubit(*qubit)?;
                Self::check_prob("erasure rate", *erasure)?;
                pauli.validate()?;
                if erasure + pauli.error_rate() > 1.0 + 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "erasure + Pauli rate exceeds 1 at qubit {qubit}"
                    )));
                }
            }
            Instruction::ErasureCheck { qubit, spec, id } => {
                self.check_qubit(*qubit)?;
                Self::check_prob("f_pos", spec.f_pos)?;
                Self::check_prob("f_neg", spec.f_neg)?;
                if *id != self.num_checks {
                    return Err(Error::InvalidArgument(format!(
                        "erasure check ids must be sequential: expected {}, got {id}",
                        self.num_checks
                    )));
                }
                self.num_checks += 1;
            }
            Instruction::MeasureFlip { qubit, p } => {
                self.check_qubit(*qubit)?;
                Self::check_prob("measurement flip", *p)?;
            }
            Instruction::Detector { measurements } => {
                self.check_records(measurements)?;
                self.num_detectors += 1;
            }
            Instruction::Observable {
                index,
                measurements,
            } => {
                self.check_records(measurements)?;
                self.num_observables = self.num_observables.max(index + 1);
            }
        }
        self.instructions.push(instr);
        Ok(())
    }

    fn check_records(&self, ms: &[usize]) -> Result<()> {
        if let Some(&m) = ms.iter().find(|&&m| m >= self.num_measurements) {
            return Err(Error::InvalidArgument(format!(
                "record {m} referenced before it was measured ({} so far)",
                self.num_measurements
            )));
        }
        Ok(())
    }

    pub fn gate(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        if targets.is_empty() {
            return Ok(());
        }
        self.push(Instruction::Gate {
            gate,
            targets: targets.to_vec(),
        })
    }

    /// Measures `targets` and returns their record indices.
    pub fn measure(&mut self, targets: &[usize]) -> Result<Vec<usize>> {
        let start = self.num_measurements;
        self.gate(Gate::MeasureZ, targets)?;
        Ok((start..start + targets.len()).collect())
    }

    pub fn noise(&mut self, qubit: usize, erasure: f64, pauli: PauliChannel) -> Result<()> {
        self.push(Instruction::Noise {
            qubit,
            erasure,
            pauli,
        })
    }

    /// Appends a check with the next free id and returns that id.
    pub fn erasure_check(&mut self, qubit: usize, spec: CheckSpec) -> Result<usize> {
        let id = self.num_checks;
        self.push(Instruction::ErasureCheck { qubit, spec, id })?;
        Ok(id)
    }

    pub fn detector(&mut self, measurements: &[usize]) -> Result<()> {
        self.push(Instruction::Detector {
            measurements: measurements.to_vec(),
        })
    }

    pub fn observable(&mut self, index: usize, measurements: &[usize]) -> Result<()> {
        self.push(Instruction::Observable {
            index,
            measurements: measurements.to_vec(),
        })
    }

    /// True when the circuit has no noise of any kind.
    pub fn is_noiseless(&self) -> bool {
        self.instructions.iter().all(|i| match i {
            Instruction::Noise { erasure, pauli, .. } => *erasure == 0.0 && pauli.error_rate() == 0.0,
            Instruction::ErasureCheck { spec, .. } => spec.f_pos == 0.0,
            Instruction::MeasureFlip { p, .. } => *p == 0.0,
            _ => true,
        })
    }

    /// Line-oriented text form, one instruction per line.
    ///
    /// ```text
    /// QUBITS 5
    /// R 0 1 2 3 4
    /// H 4
    /// CX 0 4 1 4
    /// NOISE 0 0.01 0 0 0.001        qubit erasure px py pz
    /// CHECK 0 0 0.001 0.01 mixed one_way   id qubit f_pos f_neg conversion reset
    /// MFLIP 4 0.01
    /// M 4
    /// DETECTOR 0
    /// OBSERVABLE 0 1 2
    /// ```
    ///
    /// `OBSERVABLE` takes the observable index followed by record indices.
    /// Blank lines and text after `#` are ignored.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "QUBITS {}", self.num_qubits);
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        for instr in &self.instructions {
            let _ = match instr {
                Instruction::Gate { gate, targets } => {
                    writeln!(out, "{} {}", gate.keyword(), join(targets))
                }
                Instruction::Noise {
                    qubit,
                    erasure,
                    pauli,
                } => writeln!(
                    out,
                    "NOISE {qubit} {erasure} {} {} {}",
                    pauli.p_x, pauli.p_y, pauli.p_z
                ),
                Instruction::ErasureCheck { qubit, spec, id } => writeln!(
                    out,
                    "CHECK {id} {qubit} {} {} {} {}",
                    spec.f_pos,
                    spec.f_neg,
                    spec.conversion.as_str(),
                    spec.reset.as_str()
                ),
                Instruction::MeasureFlip { qubit, p } => writeln!(out, "MFLIP {qubit} {p}"),
                Instruction::Detector { measurements } => {
                    writeln!(out, "DETECTOR {}", join(measurements))
                }
                Instruction::Observable {
                    index,
                    measurements,
                } => writeln!(out, "OBSERVABLE {index} {}", join(measurements)),
            };
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse {
                line: lineno + 1,
                msg,
            };
            let mut toks = line.split_whitespace();
            let head = toks.next().unwrap_or_default();
            let rest: Vec<&str> = toks.collect();
            let ints = |v: &[&str]| -> Result<Vec<usize>> {
                v.iter()
                    .map(|t| t.parse().map_err(|_| perr(format!("bad integer '{t}'"))))
                    .collect()
            };
            let float = |t: &str| -> Result<f64> {
                t.parse().map_err(|_| perr(format!("bad number '{t}'")))
            };
            if head == "QUBITS" {
                if circuit.is_some() {
                    return Err(perr("duplicate QUBITS line".into()));
                }
                let n = ints(&rest)?;
                if n.len() != 1 {
                    return Err(perr("QUBITS takes one argument".into()));
                }
                circuit = Some(Circuit::new(n[0]));
                continue;
            }
            let c = circuit
                .as_mut()
                .ok_or_else(|| perr("first instruction must be QUBITS".into()))?;
            let arity = |n: usize| -> Result<()> {
                if rest.len() != n {
                    return Err(perr(format!("{head} takes {n} arguments")));
                }
                Ok(())
            };
            let instr = match head {
                "CX" | "H" | "R" | "M" => Instruction::Gate {
                    gate: match head {
                        "CX" => Gate::CX,
                        "H" => Gate::H,
                        "R" => Gate::Reset,
                        _ => Gate::MeasureZ,
                    },
                    targets: ints(&rest)?,
                },
                "NOISE" => {
                    arity(5)?;
                    let (px, py, pz) = (float(rest[2])?, float(rest[3])?, float(rest[4])?);
                    Instruction::Noise {
                        qubit: ints(&rest[..1])?[0],
                        erasure: float(rest[1])?,
                        pauli: PauliChannel::new(1.0 - px - py - pz, px, py, pz)
                            .map_err(|e| perr(e.to_string()))?,
                    }
                }
                "CHECK" => {
                    arity(6)?;
                    let ids = ints(&rest[..2])?;
                    let conversion = match rest[4] {
                        "mixed" => ConversionMode::Mixed,
                        "biased" => ConversionMode::Biased,
                        other => return Err(perr(format!("unknown conversion '{other}'"))),
                    };
                    let reset = match rest[5] {
                        "one_way" => ResetProtocol::OneWay,
                        "unitary" => ResetProtocol::Unitary,
                        other => return Err(perr(format!("unknown reset '{other}'"))),
                    };
                    Instruction::ErasureCheck {
                        id: ids[0],
                        qubit: ids[1],
                        spec: CheckSpec {
                            f_pos: float(rest[2])?,
                            f_neg: float(rest[3])?,
                            conversion,
                            reset,
                        },
                    }
                }
                "MFLIP" => {
                    arity(2)?;
                    Instruction::MeasureFlip {
                        qubit: ints(&rest[..1])?[0],
                        p: float(rest[1])?,
                    }
                }
                "DETECTOR" => Instruction::Detector {
                    measurements: ints(&rest)?,
                },
                "OBSERVABLE" => {
                    let v = ints(&rest)?;
                    let (&index, ms) = v
                        .split_first()
                        .ok_or_else(|| perr("OBSERVABLE needs an index".into()))?;
                    Instruction::Observable {
                        index,
                        measurements: ms.to_vec(),
                    }
                }
                other => {
                    return Err(Error::Unsupported(format!(
                        "line {}: unknown instruction '{other}'",
                        lineno + 1
                    )))
                }
            };
            c.push(instr).map_err(|e| match e {
                Error::InvalidArgument(msg) => perr(msg),
                other => other,
            })?;
        }
        circuit.ok_or_else(|| Error::Parse {
            line: 0,
            msg: "empty circuit".into(),
        })
    }

    /// Qubit touched by each erasure check, indexed by check id.
    pub fn check_qubits(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_checks];
        for instr in &self.instructions {
            if let Instruction::ErasureCheck { qubit, id, .. } = instr {
                out[*id] = *qubit;
            }
        }
        out
    }

    /// Checks the structural invariants; [`Circuit::push`] already enforces them
    /// incrementally, so this is only needed for hand-assembled instruction lists.
    pub fn validate(&self) -> Result<()> {
        let mut rebuilt = Circuit::new(self.num_qubits);
        let mut seen = HashSet::new();
        for instr in &self.instructions {
            if let Instruction::ErasureCheck { id, .. } = instr {
                if !seen.insert(*id) {
                    return Err(Error::InvalidArgument(format!("duplicate check id {id}")));
                }
            }
            rebuilt.push(instr.clone())?;
        }
        Ok(())
    }
}
