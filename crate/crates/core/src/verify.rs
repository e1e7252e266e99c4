//! Independent brute-force and gate-level oracles.
//!
//! Nothing here calls into the quadratizer or compiler internals; the
//! checks consume polynomials and circuits as black boxes so they can catch
//! bugs in either producer.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::compiler::ANGLE_CONVENTION_SCALE;
use crate::pubo::{Polynomial, VarId};
use crate::quadratizer::QuadratizedProblem;

pub const VALUE_TOLERANCE: f64 = 1e-9;
pub const PHASE_TOLERANCE: f64 = 1e-6;

const MAX_ENUM_VARS: usize = 24;
const MAX_ORACLE_QUBITS: usize = 20;

#[derive(Error, Debug, PartialEq)]
pub enum VerifyError {
    #[error("{0} variables exceed the enumeration limit of {1}")]
    TooManyVariables(usize, usize),
    #[error("non-diagonal gate {0:?} in phase-oracle input; pass the cost layer only")]
    NonDiagonalGate(String),
}

/// Outcome of the oracle checks. `None` fields were not computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub minima_preserved: bool,
    pub min_original: f64,
    pub min_qubo: f64,
    /// For every assignment of the original variables, minimizing the QUBO
    /// over auxiliaries reproduces the original value.
    pub extension_faithful: bool,
    pub argmin_projection_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_phase_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connectivity_ok: Option<bool>,
}

impl VerificationReport {
    pub fn all_ok(&self) -> bool {
        self.minima_preserved
            && self.extension_faithful
            && self.argmin_projection_ok
            && self.phase_ok.unwrap_or(true)
            && self.connectivity_ok.unwrap_or(true)
    }
}

/// Polynomial compiled to bitmask terms over a fixed variable ordering;
/// variable `order[i]` is bit `i`.
pub struct MaskedPoly {
    pub order: Vec<VarId>,
    terms: Vec<(u32, f64)>,
}

impl MaskedPoly {
    pub fn build(poly: &Polynomial, order: &[VarId]) -> Result<Self, VerifyError> {
        if order.len() > MAX_ENUM_VARS {
            return Err(VerifyError::TooManyVariables(order.len(), MAX_ENUM_VARS));
        }
        let index: BTreeMap<VarId, u32> = order
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let mut terms = Vec::new();
        for (m, c) in poly.terms() {
            let mut mask = 0u32;
            for &v in m.vars() {
                let &bit = index
                    .get(&v)
                    .unwrap_or_else(|| panic!("variable {v} missing from ordering"));
                mask |= 1 << bit;
            }
            terms.push((mask, c));
        }
        Ok(MaskedPoly {
            order: order.to_vec(),
            terms,
        })
    }

    #[inline]
    pub fn eval(&self, state: u32) -> f64 {
        self.terms
            .iter()
            .filter(|&&(mask, _)| state & mask == mask)
            .map(|&(_, c)| c)
            .sum()
    }
}

fn fold_min(states: u32, eval: impl Fn(u32) -> f64 + Sync + Send) -> f64 {
    #[cfg(feature = "parallel")]
    {
        (0..states)
            .into_par_iter()
            .map(eval)
            .reduce(|| f64::INFINITY, f64::min)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..states).map(eval).fold(f64::INFINITY, f64::min)
    }
}

/// Exhaustive minimum of a polynomial over all binary assignments, with
/// every assignment within `VALUE_TOLERANCE` of the minimum.
pub fn brute_force_min(
    poly: &Polynomial,
) -> Result<(f64, Vec<BTreeMap<VarId, bool>>), VerifyError> {
    let order: Vec<VarId> = poly.variables().into_iter().collect();
    let masked = MaskedPoly::build(poly, &order)?;
    let states = 1u32 << order.len();
    let min = fold_min(states, |s| masked.eval(s));
    let argmins = (0..states)
        .filter(|&s| masked.eval(s) <= min + VALUE_TOLERANCE)
        .map(|s| {
            order
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, s >> i & 1 == 1))
                .collect()
        })
        .collect();
    Ok((min, argmins))
}

/// Checks that a quadratization preserves minima, extends the original
/// faithfully, and that every QUBO argmin satisfies all substitution and
/// duplicate-equality constraints. Duplicates are enumerated as free
/// binaries; the penalties must force them back.
pub fn check_quadratization(
    original: &Polynomial,
    problem: &QuadratizedProblem,
) -> Result<VerificationReport, VerifyError> {
    let x_vars: Vec<VarId> = original.variables().into_iter().collect();
    let free_vars: Vec<VarId> = problem
        .qubo
        .variables()
        .into_iter()
        .filter(|v| !x_vars.contains(v))
        .collect();
    // Free variables occupy the low bits so each original assignment owns a
    // contiguous block of QUBO states.
    let mut order = free_vars.clone();
    order.extend(&x_vars);
    let q = MaskedPoly::build(&problem.qubo, &order)?;
    let c = MaskedPoly::build(original, &x_vars)?;
    let n = x_vars.len() as u32;
    let m = free_vars.len() as u32;
    let min_original = fold_min(1 << n, |s| c.eval(s));
    let per_x = |x_state: u32| -> (f64, bool) {
        let mut best = f64::INFINITY;
        for f in 0..1u32 << m {
            best = best.min(q.eval(x_state << m | f));
        }
        (best, (best - c.eval(x_state)).abs() <= VALUE_TOLERANCE)
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<(f64, bool)> = (0..1u32 << n).into_par_iter().map(per_x).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<(f64, bool)> = (0..1u32 << n).map(per_x).collect();
    let min_qubo = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let extension_faithful = rows.iter().all(|r| r.1);
    let minima_preserved = (min_qubo - min_original).abs() <= VALUE_TOLERANCE;

    let index: BTreeMap<VarId, u32> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let bit = |state: u32, v: VarId| state >> index[&v] & 1;
    let argmin_projection_ok = (0..1u64 << (n + m)).all(|s| {
        let s = s as u32;
        if q.eval(s) > min_qubo + VALUE_TOLERANCE {
            return true;
        }
        problem
            .substitutions
            .iter()
            .all(|sub| bit(s, sub.aux) == bit(s, sub.factor_a) * bit(s, sub.factor_b))
            && problem
                .duplicates
                .iter()
                .all(|&(a, b)| bit(s, a) == bit(s, b))
    });

    Ok(VerificationReport {
        minima_preserved,
        min_original,
        min_qubo,
        extension_faithful,
        argmin_projection_ok,
        phase_ok: None,
        max_phase_error: None,
        connectivity_ok: None,
    })
}

/// Collapses native SWAP templates back into SWAP gates and rejects
/// anything non-diagonal that remains.
fn normalize_diagonal(gates: &[Gate]) -> Result<Vec<Gate>, VerifyError> {
    let mut out = Vec::with_capacity(gates.len());
    let mut i = 0;
    while i < gates.len() {
        if let Gate::Cz { a, b } = gates[i] {
            let template = crate::circuit::swap_template(a, b);
            if gates.len() - i >= 9 && gates[i..i + 9] == template {
                out.push(Gate::Swap { a, b });
                i += 9;
                continue;
            }
        }
        match &gates[i] {
            Gate::Rz { .. } | Gate::Rzz { .. } | Gate::Cz { .. } | Gate::Swap { .. } => {
                out.push(gates[i].clone())
            }
            g => return Err(VerifyError::NonDiagonalGate(g.name().to_string())),
        }
        i += 1;
    }
    Ok(out)
}

/// Exact per-basis-state check that a cost-layer circuit applies phases
/// `-SCALE * gamma * E(s)` relative to the all-zeros state, and that its
/// SWAP permutation realizes `final_layout`. Returns `(pass, max_error)`.
pub fn phase_oracle_check(
    circuit: &Circuit,
    qubo: &Polynomial,
    gamma: f64,
) -> Result<(bool, f64), VerifyError> {
    let vars: Vec<VarId> = circuit.initial_layout.keys().copied().collect();
    if vars.len() > MAX_ORACLE_QUBITS {
        return Err(VerifyError::TooManyVariables(vars.len(), MAX_ORACLE_QUBITS));
    }
    let gates = normalize_diagonal(&circuit.gates)?;
    let masked = MaskedPoly::build(qubo, &vars)?;

    let run_state = |s: u32| -> (f64, bool) {
        // Bits live on physical qubits; untracked qubits stay zero.
        let mut bits = vec![0u8; circuit.num_qubits as usize];
        for (i, v) in vars.iter().enumerate() {
            bits[circuit.initial_layout[v] as usize] = (s >> i & 1) as u8;
        }
        let mut phase = 0.0;
        for gate in &gates {
            match *gate {
                Gate::Rz { q, theta } => {
                    phase -= theta / 2.0 * (1.0 - 2.0 * bits[q as usize] as f64);
                }
                Gate::Rzz { a, b, theta } => {
                    let za = 1.0 - 2.0 * bits[a as usize] as f64;
                    let zb = 1.0 - 2.0 * bits[b as usize] as f64;
                    phase -= theta / 2.0 * za * zb;
                }
                Gate::Cz { a, b } => {
                    if bits[a as usize] & bits[b as usize] == 1 {
                        phase += std::f64::consts::PI;
                    }
                }
                Gate::Swap { a, b } => bits.swap(a as usize, b as usize),
                _ => unreachable!("normalized gate list is diagonal"),
            }
        }
        let permutation_ok = vars
            .iter()
            .enumerate()
            .all(|(i, v)| bits[circuit.final_layout[v] as usize] == (s >> i & 1) as u8);
        (phase, permutation_ok)
    };

    let (phase0, perm0) = run_state(0);
    let e0 = masked.eval(0);
    let states = 1u32 << vars.len();
    let per_state = |s: u32| -> (f64, bool) {
        let (phase, perm_ok) = run_state(s);
        let expected = -ANGLE_CONVENTION_SCALE * gamma * (masked.eval(s) - e0);
        ((phase - phase0 - expected).abs(), perm_ok)
    };
    #[cfg(feature = "parallel")]
    let (max_error, perms_ok) = (0..states)
        .into_par_iter()
        .map(per_state)
        .reduce(|| (0.0, true), |a, b| (a.0.max(b.0), a.1 && b.1));
    #[cfg(not(feature = "parallel"))]
    let (max_error, perms_ok) = (0..states)
        .map(per_state)
        .fold((0.0f64, true), |a, b| (a.0.max(b.0), a.1 && b.1));
    Ok((max_error < PHASE_TOLERANCE && perms_ok && perm0, max_error))
}
