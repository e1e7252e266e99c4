//! Gate-level circuits, depth accounting, and basis-gate decomposition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::device::CouplingMap;
use crate::pubo::VarId;

#[derive(Error, Debug, PartialEq)]
pub enum CircuitError {
    #[error("gate {gate} at index {index} acts on non-coupled qubits {a} and {b}")]
    ConnectivityViolation {
        index: usize,
        gate: String,
        a: u32,
        b: u32,
    },
    #[error("gate at index {index} addresses qubit {qubit} beyond register size {num_qubits}")]
    QubitOutOfRange {
        index: usize,
        qubit: u32,
        num_qubits: u32,
    },
    #[error("unknown gate name {0:?}")]
    UnknownGate(String),
    #[error("gate {0:?} expects {1} qubit operands, got {2}")]
    BadArity(String, usize, usize),
    #[error("gate {0:?} {1} a parameter")]
    BadParameter(String, &'static str),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H { q: u32 },
    X { q: u32 },
    Sx { q: u32 },
    Rz { q: u32, theta: f64 },
    Rx { q: u32, theta: f64 },
    Cz { a: u32, b: u32 },
    Rzz { a: u32, b: u32, theta: f64 },
    Swap { a: u32, b: u32 },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H { .. } => "h",
            Gate::X { .. } => "x",
            Gate::Sx { .. } => "sx",
            Gate::Rz { .. } => "rz",
            Gate::Rx { .. } => "rx",
            Gate::Cz { .. } => "cz",
            Gate::Rzz { .. } => "rzz",
            Gate::Swap { .. } => "swap",
        }
    }

    pub fn qubits(&self) -> Vec<u32> {
        match *self {
            Gate::H { q } | Gate::X { q } | Gate::Sx { q } => vec![q],
            Gate::Rz { q, .. } | Gate::Rx { q, .. } => vec![q],
            Gate::Cz { a, b } | Gate::Swap { a, b } => vec![a, b],
            Gate::Rzz { a, b, .. } => vec![a, b],
        }
    }

    pub fn param(&self) -> Option<f64> {
        match *self {
            Gate::Rz { theta, .. } | Gate::Rx { theta, .. } | Gate::Rzz { theta, .. } => {
                Some(theta)
            }
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cz { .. } | Gate::Rzz { .. } | Gate::Swap { .. })
    }

    fn from_parts(g: &str, q: &[u32], p: Option<f64>) -> Result<Gate, CircuitError> {
        let arity = match g {
            "h" | "x" | "sx" | "rz" | "rx" => 1,
            "cz" | "rzz" | "swap" => 2,
            other => return Err(CircuitError::UnknownGate(other.to_string())),
        };
        if q.len() != arity {
            return Err(CircuitError::BadArity(g.to_string(), arity, q.len()));
        }
        let needs_param = matches!(g, "rz" | "rx" | "rzz");
        match (needs_param, p) {
            (true, None) => return Err(CircuitError::BadParameter(g.to_string(), "requires")),
            (false, Some(_)) => {
                return Err(CircuitError::BadParameter(g.to_string(), "does not take"))
            }
            _ => {}
        }
        Ok(match g {
            "h" => Gate::H { q: q[0] },
            "x" => Gate::X { q: q[0] },
            "sx" => Gate::Sx { q: q[0] },
            "rz" => Gate::Rz { q: q[0], theta: p.unwrap() },
            "rx" => Gate::Rx { q: q[0], theta: p.unwrap() },
            "cz" => Gate::Cz { a: q[0], b: q[1] },
            "rzz" => Gate::Rzz { a: q[0], b: q[1], theta: p.unwrap() },
            "swap" => Gate::Swap { a: q[0], b: q[1] },
            _ => unreachable!(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    g: String,
    q: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
}

impl Serialize for Gate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GateJson {
            g: self.name().to_string(),
            q: self.qubits(),
            p: self.param(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = GateJson::deserialize(deserializer)?;
        Gate::from_parts(&json.g, &json.q, json.p).map_err(D::Error::custom)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        if let Some(theta) = self.param() {
            write!(f, "({theta})")?;
        }
        let qubits = self.qubits();
        write!(f, " q{}", qubits[0])?;
        for q in &qubits[1..] {
            write!(f, ", q{q}")?;
        }
        Ok(())
    }
}

/// Variable-to-physical-qubit assignment. Keys render as variable names in
/// the JSON form.
pub type Layout = BTreeMap<VarId, u32>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: u32,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    pub gates: Vec<Gate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub depth: usize,
    pub width: usize,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    pub swap_count: usize,
}

impl Circuit {
    pub fn new(num_qubits: u32) -> Self {
        Circuit {
            num_qubits,
            initial_layout: Layout::new(),
            final_layout: Layout::new(),
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    /// ASAP depth: every gate lands on the earliest layer after all gates
    /// sharing one of its qubits.
    pub fn depth(&self) -> usize {
        let mut frontier: BTreeMap<u32, usize> = BTreeMap::new();
        let mut depth = 0;
        for gate in &self.gates {
            let layer = gate
                .qubits()
                .iter()
                .map(|q| frontier.get(q).copied().unwrap_or(0))
                .max()
                .unwrap_or(0)
                + 1;
            for q in gate.qubits() {
                frontier.insert(q, layer);
            }
            depth = depth.max(layer);
        }
        depth
    }

    /// Number of distinct physical qubits touched by gates or carrying a
    /// variable in the initial layout.
    pub fn width(&self) -> usize {
        let mut used: BTreeSet<u32> = self.initial_layout.values().copied().collect();
        for gate in &self.gates {
            used.extend(gate.qubits());
        }
        used.len()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn swap_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Swap { .. }))
            .count()
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            depth: self.depth(),
            width: self.width(),
            gate_count: self.gates.len(),
            two_qubit_count: self.two_qubit_count(),
            swap_count: self.swap_count(),
        }
    }

    /// Checks every two-qubit gate against the device coupling map and every
    /// operand against the register size.
    pub fn check_connectivity(&self, map: &CouplingMap) -> Result<(), Vec<CircuitError>> {
        let mut violations = Vec::new();
        for (index, gate) in self.gates.iter().enumerate() {
            let qubits = gate.qubits();
            for &q in &qubits {
                if q >= self.num_qubits {
                    violations.push(CircuitError::QubitOutOfRange {
                        index,
                        qubit: q,
                        num_qubits: self.num_qubits,
                    });
                }
            }
            if qubits.len() == 2 && !map.is_edge(qubits[0], qubits[1]) {
                violations.push(CircuitError::ConnectivityViolation {
                    index,
                    gate: gate.name().to_string(),
                    a: qubits[0],
                    b: qubits[1],
                });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Rewrites every SWAP into the native sequence
    /// `[cz; sx a; sx b] * 3`, which equals SWAP up to a global phase.
    pub fn decompose_swaps(&self) -> Circuit {
        let mut out = Circuit {
            num_qubits: self.num_qubits,
            initial_layout: self.initial_layout.clone(),
            final_layout: self.final_layout.clone(),
            gates: Vec::with_capacity(self.gates.len()),
        };
        for gate in &self.gates {
            match *gate {
                Gate::Swap { a, b } => out.gates.extend(swap_template(a, b)),
                ref g => out.gates.push(g.clone()),
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("qubits {}\n", self.num_qubits);
        for gate in &self.gates {
            s.push_str(&gate.to_string());
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }
}

/// The CZ+SX realization of SWAP on qubits `a`, `b`. Nine gates, three CZ,
/// ASAP depth six.
pub fn swap_template(a: u32, b: u32) -> [Gate; 9] {
    [
        Gate::Cz { a, b },
        Gate::Sx { q: a },
        Gate::Sx { q: b },
        Gate::Cz { a, b },
        Gate::Sx { q: a },
        Gate::Sx { q: b },
        Gate::Cz { a, b },
        Gate::Sx { q: a },
        Gate::Sx { q: b },
    ]
}
