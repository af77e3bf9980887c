//! Random gate-sequence ensembles and their realization as full operators.
//!
//! Qubit `q` of an `n`-qubit register is bit `n - 1 - q` of the basis-state
//! index, so qubit 0 is the most significant bit. A circuit `G_1, ..., G_ng`
//! realizes to `G_ng ... G_2 G_1`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::haar::U2Params;
use crate::{
    ComplexSquareMatrix, Error, OrthogonalOperator, RandomStream, Result, UnitaryOperator,
};

/// Largest register realized by default: `2^12 x 2^12` complex entries is 256 MiB.
pub const DEFAULT_QUBIT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    SingleQubitUnitary { target: usize, params: U2Params },
    Hadamard { target: usize },
    Cnot { control: usize, target: usize },
    Toffoli { controls: [usize; 2], target: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::SingleQubitUnitary { target, .. } | Gate::Hadamard { target } => vec![target],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Toffoli { controls, target } => vec![controls[0], controls[1], target],
        }
    }

    pub fn is_single_qubit(&self) -> bool {
        matches!(
            self,
            Gate::SingleQubitUnitary { .. } | Gate::Hadamard { .. }
        )
    }

    pub fn validate(&self, qubits: usize) -> Result<()> {
        let used = self.qubits();
        for (k, &q) in used.iter().enumerate() {
            if q >= qubits {
                return Err(Error::QubitIndex { index: q, qubits });
            }
            if used[..k].contains(&q) {
                return Err(Error::RepeatedQubit { index: q });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Hadamard { target } => write!(f, "H {target}"),
            Gate::SingleQubitUnitary { target, params } => write!(
                f,
                "U2 {target} {} {} {} {}",
                params.alpha, params.psi, params.chi, params.phi
            ),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Toffoli { controls, target } => {
                write!(f, "TOFF {} {} {target}", controls[0], controls[1])
            }
        }
    }
}

impl FromStr for Gate {
    type Err = String;

    fn from_str(line: &str) -> std::result::Result<Self, String> {
        let mut fields = line.split_whitespace();
        let name = fields.next().ok_or("empty gate line")?;
        let rest: Vec<&str> = fields.collect();
        let index = |k: usize| -> std::result::Result<usize, String> {
            rest.get(k)
                .ok_or_else(|| format!("{name}: missing operand {}", k + 1))?
                .parse()
                .map_err(|e| format!("{name}: operand {}: {e}", k + 1))
        };
        let angle = |k: usize| -> std::result::Result<f64, String> {
            rest.get(k)
                .ok_or_else(|| format!("{name}: missing operand {}", k + 1))?
                .parse()
                .map_err(|e| format!("{name}: operand {}: {e}", k + 1))
        };
        let arity = match name {
            "H" => 1,
            "U2" => 5,
            "CNOT" => 2,
            "TOFF" => 3,
            other => return Err(format!("unknown gate `{other}`")),
        };
        if rest.len() != arity {
            return Err(format!("{name} takes {arity} operands, got {}", rest.len()));
        }
        Ok(match name {
            "H" => Gate::Hadamard { target: index(0)? },
            "U2" => Gate::SingleQubitUnitary {
                target: index(0)?,
                params: U2Params {
                    alpha: angle(1)?,
                    psi: angle(2)?,
                    chi: angle(3)?,
                    phi: angle(4)?,
                },
            },
            "CNOT" => Gate::Cnot {
                control: index(0)?,
                target: index(1)?,
            },
            _ => Gate::Toffoli {
                controls: [index(0)?, index(1)?],
                target: index(2)?,
            },
        })
    }
}

/// An ordered gate list on `qubits` qubits; gate 0 acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        for gate in &gates {
            gate.validate(qubits)?;
        }
        Ok(Self { qubits, gates })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.qubits != other.qubits {
            return Err(Error::Config(
                "cannot concatenate circuits of different width".into(),
            ));
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Ok(Circuit {
            qubits: self.qubits,
            gates,
        })
    }

    pub fn is_real(&self) -> bool {
        self.gates.iter().all(|g| {
            matches!(
                g,
                Gate::Hadamard { .. } | Gate::Cnot { .. } | Gate::Toffoli { .. }
            )
        })
    }

    pub fn realize(&self) -> Result<UnitaryOperator> {
        self.realize_with_cap(DEFAULT_QUBIT_CAP)
    }

    /// Multiplies the gates out into a `2^n x 2^n` unitary.
    pub fn realize_with_cap(&self, cap: usize) -> Result<UnitaryOperator> {
        check_cap(self.qubits, cap)?;
        let mut acc = ComplexSquareMatrix::identity(self.dim());
        for gate in &self.gates {
            apply_gate_in_place(&mut acc, gate, self.qubits)?;
        }
        Ok(UnitaryOperator::from_trusted(acc))
    }

    /// Real arithmetic realization for Hadamard/CNOT/Toffoli circuits.
    ///
    /// Bit-identical to the real parts of [`Circuit::realize`].
    pub fn realize_real(&self) -> Result<OrthogonalOperator> {
        check_cap(self.qubits, DEFAULT_QUBIT_CAP)?;
        let n = self.dim();
        let mut acc = vec![0.0f64; n * n];
        for i in 0..n {
            acc[i * n + i] = 1.0;
        }
        for gate in &self.gates {
            gate.validate(self.qubits)?;
            match *gate {
                Gate::Hadamard { target } => {
                    let mask = bit_mask(self.qubits, target);
                    for r0 in (0..n).filter(|r| r & mask == 0) {
                        let r1 = r0 | mask;
                        let (lo, hi) = acc.split_at_mut(r1 * n);
                        let row0 = &mut lo[r0 * n..(r0 + 1) * n];
                        let row1 = &mut hi[..n];
                        for (a, b) in row0.iter_mut().zip(row1.iter_mut()) {
                            let (x, y) = (*a, *b);
                            *a = (x + y) * FRAC_1_SQRT_2;
                            *b = (x - y) * FRAC_1_SQRT_2;
                        }
                    }
                }
                Gate::Cnot { .. } | Gate::Toffoli { .. } => {
                    for (r0, r1) in permutation_pairs(gate, self.qubits) {
                        for k in 0..n {
                            acc.swap(r0 * n + k, r1 * n + k);
                        }
                    }
                }
                Gate::SingleQubitUnitary { .. } => {
                    return Err(Error::Config(
                        "random U(2) gates have no real realization".into(),
                    ))
                }
            }
        }
        Ok(OrthogonalOperator::from_trusted(n, acc))
    }

    /// One line per gate, preceded by a `# qubits=n` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits={}\n", self.qubits);
        for gate in &self.gates {
            out.push_str(&gate.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`Circuit::to_text`]. `qubits` is taken
    /// from the header when present, otherwise from `default_qubits`.
    pub fn from_text(text: &str, default_qubits: Option<usize>) -> Result<Self> {
        let mut qubits = default_qubits;
        let mut gates = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(value) = comment.trim().strip_prefix("qubits=") {
                    qubits = Some(value.trim().parse().map_err(|e| Error::GateParse {
                        line: k + 1,
                        reason: format!("qubits: {e}"),
                    })?);
                }
                continue;
            }
            gates.push(line.parse::<Gate>().map_err(|reason| Error::GateParse {
                line: k + 1,
                reason,
            })?);
        }
        let qubits =
            qubits.ok_or_else(|| Error::Config("circuit text lacks a qubit count".into()))?;
        Circuit::new(qubits, gates)
    }
}

fn check_cap(qubits: usize, cap: usize) -> Result<()> {
    if qubits > cap {
        return Err(Error::DimensionCap { qubits, cap });
    }
    Ok(())
}

fn bit_mask(qubits: usize, q: usize) -> usize {
    1 << (qubits - 1 - q)
}

/// Row pairs exchanged by a CNOT or Toffoli.
fn permutation_pairs(gate: &Gate, qubits: usize) -> impl Iterator<Item = (usize, usize)> {
    let (control_mask, target_mask) = match *gate {
        Gate::Cnot { control, target } => (bit_mask(qubits, control), bit_mask(qubits, target)),
        Gate::Toffoli { controls, target } => (
            bit_mask(qubits, controls[0]) | bit_mask(qubits, controls[1]),
            bit_mask(qubits, target),
        ),
        _ => (0, 0),
    };
    debug_assert!(target_mask != 0);
    (0..1usize << qubits)
        .filter(move |r| r & control_mask == control_mask && r & target_mask == 0)
        .map(move |r| (r, r | target_mask))
}

/// `acc <- G · acc` for the full-register embedding `G` of `gate`, without
/// forming `G`.
pub fn apply_gate_in_place(
    acc: &mut ComplexSquareMatrix,
    gate: &Gate,
    qubits: usize,
) -> Result<()> {
    if acc.dim() != 1 << qubits {
        return Err(Error::Config(format!(
            "accumulator of dimension {} does not match {qubits} qubits",
            acc.dim()
        )));
    }
    gate.validate(qubits)?;
    let n = acc.dim();
    match *gate {
        Gate::Hadamard { target } => {
            let h = FRAC_1_SQRT_2;
            for_row_pairs(acc, bit_mask(qubits, target), |a, b| {
                let (x, y) = (*a, *b);
                *a = (x + y) * h;
                *b = (x - y) * h;
            });
        }
        Gate::SingleQubitUnitary { target, params } => {
            let [[g00, g01], [g10, g11]] = params.entries();
            for_row_pairs(acc, bit_mask(qubits, target), |a, b| {
                let (x, y) = (*a, *b);
                *a = g00 * x + g01 * y;
                *b = g10 * x + g11 * y;
            });
        }
        Gate::Cnot { .. } | Gate::Toffoli { .. } => {
            let data = acc.as_mut_slice();
            for (r0, r1) in permutation_pairs(gate, qubits) {
                let (lo, hi) = data.split_at_mut(r1 * n);
                lo[r0 * n..(r0 + 1) * n].swap_with_slice(&mut hi[..n]);
            }
        }
    }
    Ok(())
}

fn for_row_pairs(
    acc: &mut ComplexSquareMatrix,
    mask: usize,
    mut update: impl FnMut(&mut Complex64, &mut Complex64),
) {
    let n = acc.dim();
    let data = acc.as_mut_slice();
    for r0 in (0..n).filter(|r| r & mask == 0) {
        let r1 = r0 | mask;
        let (lo, hi) = data.split_at_mut(r1 * n);
        let row0 = &mut lo[r0 * n..(r0 + 1) * n];
        for (a, b) in row0.iter_mut().zip(hi[..n].iter_mut()) {
            update(a, b);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircuitKind {
    /// Random U(2) single-qubit gates and CNOTs.
    Uce,
    /// Hadamards and Toffolis.
    Oce,
}

impl CircuitKind {
    pub fn min_qubits(self) -> usize {
        match self {
            CircuitKind::Uce => 2,
            CircuitKind::Oce => 3,
        }
    }
}

/// Parameters of a random circuit ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitEnsembleConfig {
    pub kind: CircuitKind,
    pub qubits: usize,
    pub gates: usize,
    /// Probability of a single-qubit gate at each position.
    pub p: f64,
    pub realizations: usize,
    pub seed: u64,
}

impl CircuitEnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        let min = self.kind.min_qubits();
        if self.qubits < min {
            return Err(Error::Config(format!(
                "{:?} circuits need at least {min} qubits, got {}",
                self.kind, self.qubits
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Config(format!(
                "probability {} outside [0, 1]",
                self.p
            )));
        }
        Ok(())
    }
}

/// Draws one circuit: each gate is independently a single-qubit gate on a
/// uniform qubit with probability `p` (random U(2) for UCE, Hadamard for OCE),
/// otherwise a CNOT (UCE) or Toffoli (OCE) on a uniform ordered tuple of
/// distinct qubits.
pub fn draw_circuit(config: &CircuitEnsembleConfig, stream: &mut RandomStream) -> Result<Circuit> {
    config.validate()?;
    let n = config.qubits;
    let gates = (0..config.gates)
        .map(|_| {
            let single = stream.uniform() < config.p;
            match (config.kind, single) {
                (CircuitKind::Uce, true) => {
                    let target = stream.below(n);
                    Gate::SingleQubitUnitary {
                        target,
                        params: U2Params::draw(stream),
                    }
                }
                (CircuitKind::Oce, true) => Gate::Hadamard {
                    target: stream.below(n),
                },
                (CircuitKind::Uce, false) => {
                    let q = stream.distinct(n, 2);
                    Gate::Cnot {
                        control: q[0],
                        target: q[1],
                    }
                }
                (CircuitKind::Oce, false) => {
                    let q = stream.distinct(n, 3);
                    Gate::Toffoli {
                        controls: [q[0], q[1]],
                        target: q[2],
                    }
                }
            }
        })
        .collect();
    Ok(Circuit { qubits: n, gates })
}
