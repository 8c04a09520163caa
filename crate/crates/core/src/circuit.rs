//! JSON circuit descriptions.
//!
//! ```json
//! {"n": 3, "gates": [
//!   {"type": "H", "q": [0]},
//!   {"type": "CX", "q": [0, 1]},
//!   {"type": "CP", "q": [0, 2], "pauli": "Y", "basis": "X"},
//!   {"type": "RZ", "q": [2], "theta": 0.7853981633974483},
//!   {"type": "RP", "pauli": "XIZ", "theta": 0.39269908169872414},
//!   {"type": "RANDOM_CLIFFORD"}
//! ]}
//! ```
//!
//! Rotations follow the gate convention `R_P(θ) = exp(-iθP/2)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordGate, GateKind};
use crate::error::{CtnError, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
struct RawGate {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    q: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pauli: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RawCircuit {
    n: usize,
    gates: Vec<RawGate>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Operation {
    Clifford(CliffordGate),
    /// `exp(-iθP/2)`.
    Rotation { pauli: PauliString, theta: f64 },
    /// A uniformly random Clifford on all qubits, drawn when the circuit runs.
    RandomClifford,
}

impl Operation {
    pub fn is_rotation(&self) -> bool {
        matches!(self, Operation::Rotation { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub ops: Vec<Operation>,
}

fn letter(text: &str, gate: usize) -> Result<Pauli> {
    let mut chars = text.chars();
    match (chars.next().and_then(Pauli::from_char), chars.next()) {
        (Some(p), None) if !p.is_identity() => Ok(p),
        _ => Err(CtnError::InvalidGate(format!("gate {gate}: expected a single X, Y or Z letter, found '{text}'"))),
    }
}

fn convert(n: usize, index: usize, g: &RawGate) -> Result<Operation> {
    let bad = |msg: String| CtnError::InvalidGate(format!("gate {index} ({}): {msg}", g.kind));
    let theta = || g.theta.ok_or_else(|| bad("missing theta".into()));
    let simple = |kind: GateKind| -> Result<Operation> {
        let gate = CliffordGate::new(kind, g.q.clone());
        gate.validate(n).map_err(|e| bad(e.to_string()))?;
        Ok(Operation::Clifford(gate))
    };
    match g.kind.to_ascii_uppercase().as_str() {
        "H" => simple(GateKind::H),
        "S" => simple(GateKind::S),
        "SDG" => simple(GateKind::Sdg),
        "X" => simple(GateKind::X),
        "Y" => simple(GateKind::Y),
        "Z" => simple(GateKind::Z),
        "CX" | "CNOT" => simple(GateKind::CX),
        "CZ" => simple(GateKind::CZ),
        "SWAP" => simple(GateKind::SWAP),
        "CP" => {
            let pauli = letter(g.pauli.as_deref().ok_or_else(|| bad("missing pauli".into()))?, index)?;
            let basis = letter(g.basis.as_deref().unwrap_or("Z"), index)?;
            simple(GateKind::CP { pauli, basis })
        }
        "RX" | "RY" | "RZ" => {
            let axis = Pauli::from_char(g.kind.to_ascii_uppercase().chars().nth(1).expect("three-letter name")).expect("X, Y or Z");
            let [site] = g.q[..] else {
                return Err(bad(format!("expects one site, got {}", g.q.len())));
            };
            if site >= n {
                return Err(CtnError::SiteOutOfRange { site, n });
            }
            Ok(Operation::Rotation { pauli: PauliString::single(n, site, axis), theta: theta()? })
        }
        "RP" => {
            let text = g.pauli.as_deref().ok_or_else(|| bad("missing pauli".into()))?;
            let pauli: PauliString = text.parse()?;
            if pauli.n() != n {
                return Err(CtnError::Dimension { expected: n, found: pauli.n() });
            }
            if !pauli.is_hermitian() {
                return Err(bad(format!("{pauli} is not Hermitian")));
            }
            Ok(Operation::Rotation { pauli, theta: theta()? })
        }
        "RANDOM_CLIFFORD" => Ok(Operation::RandomClifford),
        _ => Err(bad("unknown gate type".into())),
    }
}

impl Circuit {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawCircuit = serde_json::from_str(text)?;
        if raw.n < 2 {
            return Err(CtnError::InvalidArgument(format!("circuits need at least 2 qubits, got {}", raw.n)));
        }
        let ops = raw.gates.iter().enumerate().map(|(i, g)| convert(raw.n, i, g)).collect::<Result<_>>()?;
        Ok(Circuit { n: raw.n, ops })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CtnError::io(format!("reading {}", path.display()), e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        let gates = self
            .ops
            .iter()
            .map(|op| match op {
                Operation::Clifford(g) => {
                    let (pauli, basis) = match g.kind {
                        GateKind::CP { pauli, basis } => (Some(pauli.to_string()), Some(basis.to_string())),
                        _ => (None, None),
                    };
                    RawGate { kind: g.kind.name().to_string(), q: g.sites.clone(), pauli, basis, theta: None }
                }
                Operation::Rotation { pauli, theta } => {
                    RawGate { kind: "RP".into(), pauli: Some(pauli.to_string()), theta: Some(*theta), ..RawGate::default() }
                }
                Operation::RandomClifford => RawGate { kind: "RANDOM_CLIFFORD".into(), ..RawGate::default() },
            })
            .collect();
        Ok(serde_json::to_string(&RawCircuit { n: self.n, gates })?)
    }

    pub fn rotation_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_rotation()).count()
    }
}
