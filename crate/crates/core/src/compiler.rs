//! Chain-to-hardware mapping and QAOA circuit emission.
//!
//! Chains are packed contiguously along a hardware path. The cost layer runs
//! in five steps per chain segment: even direct pairs, odd direct pairs,
//! even indirect pairs (swap in, rzz, swap back), odd indirect pairs (swap
//! in, rzz, leave permuted), then single-qubit phases. Quadratic terms that
//! fall outside this pattern are routed greedily with permanent SWAPs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, Layout, Metrics};
use crate::device::{longest_nn_path, CouplingMap, DeviceError, HardwarePath};
use crate::graph::{
    build_interaction_graph, chains_independent, extract_chains, ordered, GraphError,
    TriangleChain,
};
use crate::pubo::{Polynomial, VarId};
use crate::quadratizer::{QuadratizedProblem, Strategy};

/// The cost layer applies `exp(-i * SCALE * gamma * E(x))` up to a global
/// phase, where E is the QUBO without its constant term. The factor comes
/// from the rzz(2c gamma) / rz(2b gamma) angle convention.
pub const ANGLE_CONVENTION_SCALE: f64 = 4.0;

#[derive(Error, Debug, PartialEq)]
pub enum CompileError {
    #[error("problem needs {needed} qubits but the device path offers {available}")]
    CapacityExceeded { needed: usize, available: usize },
    #[error("chains share variables; split them before compiling")]
    OverlappingChains,
    #[error("parameter lists must match reps: {0}")]
    BadParams(String),
    #[error("cannot route interaction between {0} and {1}: no coupling path")]
    Unroutable(VarId, VarId),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Device(#[from] DeviceError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub reps: usize,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, CompileError> {
        if gammas.is_empty() || gammas.len() != betas.len() {
            return Err(CompileError::BadParams(format!(
                "{} gammas, {} betas",
                gammas.len(),
                betas.len()
            )));
        }
        Ok(QaoaParams {
            reps: gammas.len(),
            gammas,
            betas,
        })
    }

    pub fn single(gamma: f64, beta: f64) -> Self {
        QaoaParams {
            reps: 1,
            gammas: vec![gamma],
            betas: vec![beta],
        }
    }
}

/// Variable placement along a hardware path. `slots[i]` is the physical
/// qubit of path slot `i`; `segments` are `(offset, len)` slot ranges, one
/// per chain, that the stepped scheduler operates on.
#[derive(Clone, Debug, PartialEq)]
pub struct PathLayout {
    pub layout: Layout,
    pub slots: Vec<u32>,
    pub segments: Vec<(usize, usize)>,
}

/// Concatenates chains along the path in chain_id order, one variable per
/// slot, then appends any remaining variables in canonical order.
/// Cross-chain slot adjacency carries no gate, so packing without gaps is
/// safe.
pub fn map_chains_to_path(
    chains: &[TriangleChain],
    all_vars: &BTreeSet<VarId>,
    path: &HardwarePath,
) -> Result<PathLayout, CompileError> {
    let mut layout = Layout::new();
    let mut slots = Vec::new();
    let mut segments = Vec::new();
    let mut chains: Vec<&TriangleChain> = chains.iter().collect();
    chains.sort_by_key(|c| c.chain_id);
    for chain in chains {
        let offset = slots.len();
        for &v in &chain.path {
            place(&mut layout, &mut slots, path, v)?;
        }
        segments.push((offset, chain.path.len()));
    }
    // Variables outside every chain form one trailing segment so their
    // slot-local interactions still get the stepped schedule; anything
    // further apart is routed as extraneous.
    let offset = slots.len();
    for &v in all_vars {
        if !layout.contains_key(&v) {
            place(&mut layout, &mut slots, path, v)?;
        }
    }
    if slots.len() - offset >= 2 {
        segments.push((offset, slots.len() - offset));
    }
    Ok(PathLayout {
        layout,
        slots,
        segments,
    })
}

/// Baseline placement: every variable in canonical order on consecutive
/// path slots, no chain segments.
pub fn line_layout(
    all_vars: &BTreeSet<VarId>,
    path: &HardwarePath,
) -> Result<PathLayout, CompileError> {
    let mut layout = Layout::new();
    let mut slots = Vec::new();
    for &v in all_vars {
        place(&mut layout, &mut slots, path, v)?;
    }
    Ok(PathLayout {
        layout,
        slots,
        segments: Vec::new(),
    })
}

fn place(
    layout: &mut Layout,
    slots: &mut Vec<u32>,
    path: &HardwarePath,
    v: VarId,
) -> Result<(), CompileError> {
    let idx = slots.len();
    let &qubit = path
        .qubits
        .get(idx)
        .ok_or(CompileError::CapacityExceeded {
            needed: idx + 1,
            available: path.qubits.len(),
        })?;
    layout.insert(v, qubit);
    slots.push(qubit);
    Ok(())
}

/// Mutable gate emitter tracking the logical-to-physical permutation.
struct Emitter<'a> {
    map: &'a CouplingMap,
    gates: Vec<Gate>,
    pos: BTreeMap<VarId, u32>,
    occupant: BTreeMap<u32, VarId>,
    /// SWAPs that were not undone, in emission order. Drained per layer for
    /// layout restoration between repetitions.
    permanent_swaps: Vec<(u32, u32)>,
}

impl<'a> Emitter<'a> {
    fn new(map: &'a CouplingMap, layout: &Layout) -> Self {
        Emitter {
            map,
            gates: Vec::new(),
            pos: layout.clone(),
            occupant: layout.iter().map(|(&v, &q)| (q, v)).collect(),
            permanent_swaps: Vec::new(),
        }
    }

    fn swap(&mut self, a: u32, b: u32, permanent: bool) {
        self.gates.push(Gate::Swap { a, b });
        let va = self.occupant.remove(&a);
        let vb = self.occupant.remove(&b);
        if let Some(v) = va {
            self.occupant.insert(b, v);
            self.pos.insert(v, b);
        }
        if let Some(v) = vb {
            self.occupant.insert(a, v);
            self.pos.insert(v, a);
        }
        if permanent {
            self.permanent_swaps.push((a, b));
        }
    }

    fn rzz(&mut self, a: u32, b: u32, theta: f64) {
        self.gates.push(Gate::Rzz { a, b, theta });
    }

    fn layout(&self) -> Layout {
        self.pos.clone()
    }
}

/// Quadratic and linear coefficient tables of a QUBO.
struct CoefTables {
    quad: BTreeMap<(VarId, VarId), f64>,
    linear: BTreeMap<VarId, f64>,
    constant: f64,
}

impl CoefTables {
    fn build(qubo: &Polynomial) -> Self {
        let mut quad = BTreeMap::new();
        let mut linear = BTreeMap::new();
        let mut constant = 0.0;
        for (m, c) in qubo.terms() {
            match m.degree() {
                0 => constant += c,
                1 => {
                    linear.insert(m.vars()[0], c);
                }
                2 => {
                    quad.insert((m.vars()[0], m.vars()[1]), c);
                }
                d => panic!("degree-{d} term in a QUBO"),
            }
        }
        CoefTables {
            quad,
            linear,
            constant,
        }
    }

    fn pair(&self, a: VarId, b: VarId) -> Option<f64> {
        self.quad.get(&ordered(a, b)).copied()
    }

    /// rz prefactor: b_v = -2 c_v - sum_j c_vj.
    fn rz_coef(&self, v: VarId) -> f64 {
        let c_v = self.linear.get(&v).copied().unwrap_or(0.0);
        let row: f64 = self
            .quad
            .iter()
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, &c)| c)
            .sum();
        -2.0 * c_v - row
    }
}

/// Emits cost-layer steps 1 through 4 for every chain segment plus step 5
/// on every variable. Returns the set of quadratic pairs the stepped
/// schedule covered; the rest must be routed as extraneous.
fn emit_stepped_layer(
    em: &mut Emitter,
    coefs: &CoefTables,
    pl: &PathLayout,
    gamma: f64,
) -> BTreeSet<(VarId, VarId)> {
    let mut covered = BTreeSet::new();
    // Slot occupants at layer start; step-4 swaps must not shift the pair
    // selection, so this snapshot drives every lookup.
    let seg_vars: Vec<Vec<VarId>> = pl
        .segments
        .iter()
        .map(|&(off, len)| {
            pl.slots[off..off + len]
                .iter()
                .map(|q| em.occupant[q])
                .collect()
        })
        .collect();
    let mut direct = |em: &mut Emitter, start: usize| {
        for (&(off, len), vars) in pl.segments.iter().zip(&seg_vars) {
            let mut s = start;
            while s + 1 < len {
                if let Some(c) = coefs.pair(vars[s], vars[s + 1]) {
                    em.rzz(pl.slots[off + s], pl.slots[off + s + 1], 2.0 * c * gamma);
                    covered.insert(ordered(vars[s], vars[s + 1]));
                }
                s += 2;
            }
        }
    };
    // Step 1: even direct pairs. Step 2: odd direct pairs.
    direct(em, 0);
    direct(em, 1);
    // Step 3: indirect pairs at slots (4i, 4i+2). The higher endpoint swaps
    // inward and back, restoring the layout.
    for (&(off, len), vars) in pl.segments.iter().zip(&seg_vars) {
        let mut s = 0;
        while s + 2 < len {
            if let Some(c) = coefs.pair(vars[s], vars[s + 2]) {
                let (qa, qb, qc) = (pl.slots[off + s], pl.slots[off + s + 1], pl.slots[off + s + 2]);
                em.swap(qb, qc, false);
                em.rzz(qa, qb, 2.0 * c * gamma);
                em.swap(qb, qc, false);
                covered.insert(ordered(vars[s], vars[s + 2]));
            }
            s += 4;
        }
    }
    // Step 4: indirect pairs at slots (4i+2, 4i+4). The lower endpoint
    // swaps inward and stays, leaving the layout permuted for this layer.
    for (&(off, len), vars) in pl.segments.iter().zip(&seg_vars) {
        let mut s = 2;
        while s + 2 < len {
            if let Some(c) = coefs.pair(vars[s], vars[s + 2]) {
                let (qa, qb, qc) = (pl.slots[off + s], pl.slots[off + s + 1], pl.slots[off + s + 2]);
                em.swap(qa, qb, true);
                em.rzz(qb, qc, 2.0 * c * gamma);
                covered.insert(ordered(vars[s], vars[s + 2]));
            }
            s += 4;
        }
    }
    // Step 5: single-qubit phases at current positions.
    for &v in coefs_vars(coefs).iter() {
        let q = em.pos[&v];
        em.gates.push(Gate::Rz {
            q,
            theta: 2.0 * coefs.rz_coef(v) * gamma,
        });
    }
    covered
}

fn coefs_vars(coefs: &CoefTables) -> BTreeSet<VarId> {
    let mut vars: BTreeSet<VarId> = coefs.linear.keys().copied().collect();
    for &(a, b) in coefs.quad.keys() {
        vars.insert(a);
        vars.insert(b);
    }
    vars
}

/// Routes quadratic terms the stepped schedule did not cover. Pairs go in
/// ascending current-physical-distance order; one endpoint walks a shortest
/// coupling path until adjacency, the moves are kept (layout updated).
fn emit_extraneous(
    em: &mut Emitter,
    extraneous: &[(VarId, VarId, f64)],
    gamma: f64,
) -> Result<(), CompileError> {
    let mut remaining: Vec<(VarId, VarId, f64)> = extraneous.to_vec();
    while !remaining.is_empty() {
        let mut best: Option<(usize, usize, Vec<u32>)> = None;
        for (i, &(a, b, _)) in remaining.iter().enumerate() {
            let route = em
                .map
                .shortest_path(em.pos[&a], em.pos[&b])
                .ok_or(CompileError::Unroutable(a, b))?;
            if best.as_ref().is_none_or(|(d, _, _)| route.len() < *d) {
                best = Some((route.len(), i, route));
            }
        }
        let (_, i, route) = best.unwrap();
        let (_, _, c) = remaining.remove(i);
        let mut cur = route[0];
        for &next in &route[1..route.len() - 1] {
            em.swap(cur, next, true);
            cur = next;
        }
        em.rzz(cur, *route.last().unwrap(), 2.0 * c * gamma);
    }
    Ok(())
}

/// One mixer layer: RX(2 beta) on every variable's current qubit.
pub fn mixer_layer(positions: &Layout, beta: f64) -> Vec<Gate> {
    positions
        .values()
        .map(|&q| Gate::Rx {
            q,
            theta: 2.0 * beta,
        })
        .collect()
}

/// Stepped cost layer only (steps 1 through 5, no extraneous routing), as a
/// standalone circuit. Panics if the layout has no chain segments.
pub fn schedule_cost_layer(qubo: &Polynomial, pl: &PathLayout, map: &CouplingMap, gamma: f64) -> Circuit {
    let coefs = CoefTables::build(qubo);
    let mut em = Emitter::new(map, &pl.layout);
    emit_stepped_layer(&mut em, &coefs, pl, gamma);
    let mut c = Circuit::new(map.num_qubits);
    c.initial_layout = pl.layout.clone();
    c.final_layout = em.layout();
    c.gates = em.gates;
    c
}

/// A compiled cost layer plus the constant-term energy offset the circuit
/// drops (global phase only).
#[derive(Clone, Debug)]
pub struct CostLayer {
    pub circuit: Circuit,
    pub energy_offset: f64,
}

/// Builds the layout for a problem under the given strategy.
pub fn build_layout(
    problem: &QuadratizedProblem,
    path: &HardwarePath,
    strategy: Strategy,
) -> Result<PathLayout, CompileError> {
    let vars = problem.qubo.variables();
    match strategy {
        Strategy::Chain => {
            let graph = build_interaction_graph(&problem.qubo)?;
            let chains = extract_chains(&graph, &problem.substitutions)?;
            if !chains_independent(&chains) {
                return Err(CompileError::OverlappingChains);
            }
            map_chains_to_path(&chains, &vars, path)
        }
        Strategy::Baseline => line_layout(&vars, path),
    }
}

/// Compiles one cost layer, including extraneous routing, with SWAPs left
/// abstract. Used by the gate-level oracle and the depth acceptance checks.
pub fn cost_layer_circuit(
    problem: &QuadratizedProblem,
    map: &CouplingMap,
    gamma: f64,
    strategy: Strategy,
) -> Result<CostLayer, CompileError> {
    let path = longest_nn_path(map)?;
    let pl = build_layout(problem, &path, strategy)?;
    let coefs = CoefTables::build(&problem.qubo);
    let mut em = Emitter::new(map, &pl.layout);
    let covered = emit_cost_layer(&mut em, &coefs, &pl, gamma, strategy)?;
    debug_assert!(covered.len() <= coefs.quad.len());
    let mut circuit = Circuit::new(map.num_qubits);
    circuit.initial_layout = pl.layout.clone();
    circuit.final_layout = em.layout();
    circuit.gates = em.gates;
    Ok(CostLayer {
        circuit,
        energy_offset: coefs.constant,
    })
}

/// Full cost layer for one repetition: stepped schedule plus extraneous
/// routing for the chain strategy, greedy routing of every interaction plus
/// the phase step for the baseline.
fn emit_cost_layer(
    em: &mut Emitter,
    coefs: &CoefTables,
    pl: &PathLayout,
    gamma: f64,
    strategy: Strategy,
) -> Result<BTreeSet<(VarId, VarId)>, CompileError> {
    match strategy {
        Strategy::Chain => {
            let covered = emit_stepped_layer(em, coefs, pl, gamma);
            let extraneous: Vec<(VarId, VarId, f64)> = coefs
                .quad
                .iter()
                .filter(|(pair, _)| !covered.contains(*pair))
                .map(|(&(a, b), &c)| (a, b, c))
                .collect();
            emit_extraneous(em, &extraneous, gamma)?;
            Ok(covered)
        }
        Strategy::Baseline => {
            let all: Vec<(VarId, VarId, f64)> = coefs
                .quad
                .iter()
                .map(|(&(a, b), &c)| (a, b, c))
                .collect();
            emit_extraneous(em, &all, gamma)?;
            for &v in coefs_vars(coefs).iter() {
                let q = em.pos[&v];
                em.gates.push(Gate::Rz {
                    q,
                    theta: 2.0 * coefs.rz_coef(v) * gamma,
                });
            }
            Ok(BTreeSet::new())
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompilationResult {
    pub circuit: Circuit,
    pub metrics: Metrics,
    /// Logical-to-physical map after each repetition.
    pub layout_history: Vec<Layout>,
    pub strategy: Strategy,
    pub energy_offset: f64,
}

/// Compiles the full QAOA circuit: Hadamard preparation, then per
/// repetition a cost layer, extraneous routing, and a mixer. Layers after
/// the first are preceded by the reversed permanent SWAPs of the previous
/// layer so every repetition starts from the same layout. SWAPs are
/// decomposed into the native CZ+SX sequence at the end.
pub fn compile_qaoa(
    problem: &QuadratizedProblem,
    map: &CouplingMap,
    params: &QaoaParams,
    strategy: Strategy,
) -> Result<CompilationResult, CompileError> {
    if params.reps == 0
        || params.gammas.len() != params.reps
        || params.betas.len() != params.reps
    {
        return Err(CompileError::BadParams(format!(
            "reps={}, {} gammas, {} betas",
            params.reps,
            params.gammas.len(),
            params.betas.len()
        )));
    }
    let path = longest_nn_path(map)?;
    let pl = build_layout(problem, &path, strategy)?;
    let coefs = CoefTables::build(&problem.qubo);
    let mut em = Emitter::new(map, &pl.layout);
    for &q in pl.layout.values() {
        em.gates.push(Gate::H { q });
    }
    let mut layout_history = Vec::with_capacity(params.reps);
    for k in 0..params.reps {
        if k > 0 {
            let undo = std::mem::take(&mut em.permanent_swaps);
            for &(a, b) in undo.iter().rev() {
                em.swap(a, b, false);
            }
        }
        emit_cost_layer(&mut em, &coefs, &pl, params.gammas[k], strategy)?;
        let positions = em.layout();
        em.gates.extend(mixer_layer(&positions, params.betas[k]));
        layout_history.push(positions);
    }
    let mut circuit = Circuit::new(map.num_qubits);
    circuit.initial_layout = pl.layout.clone();
    circuit.final_layout = em.layout();
    circuit.gates = em.gates;
    let circuit = circuit.decompose_swaps();
    let metrics = circuit.metrics();
    Ok(CompilationResult {
        circuit,
        metrics,
        layout_history,
        strategy,
        energy_offset: coefs.constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pubo::parse_polynomial;
    use crate::quadratizer::{product_polynomial, quadratize, TieBreak};

    fn complete_map(n: u32) -> CouplingMap {
        let edges: Vec<(u32, u32)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        CouplingMap::new("complete", n, edges).unwrap()
    }

    fn torino() -> CouplingMap {
        crate::device::ibm_torino()
    }

    fn chain_problem(n: u32) -> QuadratizedProblem {
        quadratize(
            &product_polynomial(n),
            Strategy::Chain,
            None,
            TieBreak::Canonical,
        )
        .unwrap()
    }

    #[test]
    fn pure_product_cost_layer_depth_23() {
        for n in [4u32, 6, 8, 12, 16] {
            let layer =
                cost_layer_circuit(&chain_problem(n), &torino(), 0.4, Strategy::Chain).unwrap();
            assert_eq!(
                layer.circuit.decompose_swaps().depth(),
                23,
                "native cost-layer depth for N={n}"
            );
        }
    }

    #[test]
    fn quadratic_only_depth_at_most_3() {
        let poly = parse_polynomial("x1 x2 + x2 x3 - x3 x4 + x1").unwrap();
        let problem = quadratize(&poly, Strategy::Chain, None, TieBreak::Canonical).unwrap();
        assert_eq!(problem.aux_count(), 0);
        // No chains; the line layout is one segment and every term sits on
        // adjacent slots, so steps 1, 2 and 5 cover everything.
        let layer = cost_layer_circuit(&problem, &torino(), 0.3, Strategy::Chain).unwrap();
        assert!(layer.circuit.decompose_swaps().depth() <= 3);
        assert_eq!(layer.circuit.swap_count(), 0);
    }

    #[test]
    fn rzz_angle_convention() {
        let poly = parse_polynomial("x1 x2").unwrap();
        let problem = quadratize(&poly, Strategy::Chain, None, TieBreak::Canonical).unwrap();
        let layer = cost_layer_circuit(&problem, &torino(), 0.7, Strategy::Chain).unwrap();
        let rzz: Vec<&Gate> = layer
            .circuit
            .gates
            .iter()
            .filter(|g| matches!(g, Gate::Rzz { .. }))
            .collect();
        assert_eq!(rzz.len(), 1);
        assert!((rzz[0].param().unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn example_one_gate_census() {
        let problem = quadratize(
            &parse_polynomial("x1 x2 x3 x4").unwrap(),
            Strategy::Baseline,
            None,
            TieBreak::Canonical,
        )
        .unwrap();
        let result = compile_qaoa(
            &problem,
            &complete_map(6),
            &QaoaParams::single(0.3, 0.5),
            Strategy::Baseline,
        )
        .unwrap();
        let count = |name: &str| {
            result
                .circuit
                .gates
                .iter()
                .filter(|g| g.name() == name)
                .count()
        };
        assert_eq!(count("h"), 6);
        assert_eq!(count("rzz"), 7);
        assert_eq!(count("rz"), 6);
        assert_eq!(count("rx"), 6);
        assert_eq!(result.circuit.swap_count(), 0);
        assert_eq!(count("cz"), 0);
    }

    #[test]
    fn compiled_circuit_respects_connectivity() {
        let map = torino();
        for n in [6u32, 9, 12] {
            let problem = chain_problem(n);
            let result = compile_qaoa(
                &problem,
                &map,
                &QaoaParams::single(0.3, 0.5),
                Strategy::Chain,
            )
            .unwrap();
            assert!(result.circuit.check_connectivity(&map).is_ok());
        }
    }

    #[test]
    fn layout_soundness() {
        let map = torino();
        let layer = cost_layer_circuit(&chain_problem(10), &map, 0.4, Strategy::Chain).unwrap();
        // Replay the SWAPs on the initial layout and compare.
        let mut pos = layer.circuit.initial_layout.clone();
        for gate in &layer.circuit.gates {
            if let Gate::Swap { a, b } = *gate {
                for q in pos.values_mut() {
                    if *q == a {
                        *q = b;
                    } else if *q == b {
                        *q = a;
                    }
                }
            }
        }
        assert_eq!(pos, layer.circuit.final_layout);
    }

    #[test]
    fn interaction_completeness() {
        // Every quadratic term receives exactly one rzz with angle 2 c gamma,
        // identified by tracking the permutation at each gate.
        let gamma = 0.37;
        let problem = chain_problem(9);
        let map = torino();
        let layer = cost_layer_circuit(&problem, &map, gamma, Strategy::Chain).unwrap();
        let mut occupant: BTreeMap<u32, VarId> = layer
            .circuit
            .initial_layout
            .iter()
            .map(|(&v, &q)| (q, v))
            .collect();
        let mut seen: BTreeMap<(VarId, VarId), f64> = BTreeMap::new();
        for gate in &layer.circuit.gates {
            match *gate {
                Gate::Swap { a, b } => {
                    let va = occupant.remove(&a);
                    let vb = occupant.remove(&b);
                    if let Some(v) = va {
                        occupant.insert(b, v);
                    }
                    if let Some(v) = vb {
                        occupant.insert(a, v);
                    }
                }
                Gate::Rzz { a, b, theta } => {
                    let pair = ordered(occupant[&a], occupant[&b]);
                    *seen.entry(pair).or_insert(0.0) += theta;
                }
                _ => {}
            }
        }
        let expected: BTreeMap<(VarId, VarId), f64> = problem
            .qubo
            .terms()
            .filter(|(m, _)| m.degree() == 2)
            .map(|(m, c)| ((m.vars()[0], m.vars()[1]), 2.0 * c * gamma))
            .collect();
        assert_eq!(seen.len(), expected.len());
        for (pair, angle) in expected {
            assert!((seen[&pair] - angle).abs() < 1e-12, "pair {pair:?}");
        }
    }

    #[test]
    fn second_rep_restores_layout() {
        let problem = chain_problem(8);
        let map = torino();
        let params = QaoaParams::new(vec![0.3, 0.6], vec![0.5, 0.2]).unwrap();
        let result = compile_qaoa(&problem, &map, &params, Strategy::Chain).unwrap();
        assert_eq!(result.layout_history.len(), 2);
        // Both repetitions end in the same permuted layout because the
        // second starts from the restored initial layout.
        assert_eq!(result.layout_history[0], result.layout_history[1]);
        assert_ne!(result.layout_history[0], result.circuit.initial_layout);
        assert_eq!(*result.layout_history.last().unwrap(), result.circuit.final_layout);
        assert!(result.circuit.check_connectivity(&map).is_ok());
    }

    #[test]
    fn capacity_error() {
        let small = CouplingMap::new("line4", 4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let err = cost_layer_circuit(&chain_problem(8), &small, 0.3, Strategy::Chain).unwrap_err();
        assert!(matches!(err, CompileError::CapacityExceeded { .. }));
    }

    #[test]
    fn step_parallelism_within_segments() {
        // Steps 1 and 2 each fit one layer; the undecomposed stepped layer
        // of a long pure chain has depth 1+1+3+2+1.
        let problem = chain_problem(16);
        let map = torino();
        let path = longest_nn_path(&map).unwrap();
        let pl = build_layout(&problem, &path, Strategy::Chain).unwrap();
        let c = schedule_cost_layer(&problem.qubo, &pl, &map, 0.4);
        assert_eq!(c.depth(), 8);
    }

    #[test]
    fn bad_params_rejected() {
        let err = compile_qaoa(
            &chain_problem(6),
            &torino(),
            &QaoaParams {
                reps: 2,
                gammas: vec![0.1],
                betas: vec![0.2, 0.3],
            },
            Strategy::Chain,
        )
        .unwrap_err();
        assert!(matches!(err, CompileError::BadParams(_)));
    }
}
