//! Variable interaction graphs and triangle-chain recovery.
//!
//! A QUBO maps to an undirected graph with one vertex per variable and one
//! weighted edge per quadratic term. Chain quadratization produces chains of
//! triangles in this graph; the traversal path of each chain determines how
//! its variables are laid out on a line of physical qubits.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pubo::{Monomial, Polynomial, VarId};
use crate::quadratizer::Substitution;

#[derive(Error, Debug, PartialEq)]
pub enum GraphError {
    #[error("polynomial has degree {0}, expected at most 2")]
    DegreeTooHigh(usize),
    #[error("substitution list inconsistent with graph: {0}")]
    InconsistentSubstitutions(String),
}

/// Undirected weighted graph over QUBO variables. Edge keys are ordered
/// pairs `(lo, hi)` in canonical variable order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionGraph {
    pub vertices: BTreeSet<VarId>,
    pub edges: BTreeMap<(VarId, VarId), f64>,
}

impl InteractionGraph {
    pub fn degree(&self, v: VarId) -> usize {
        self.edges.keys().filter(|(a, b)| *a == v || *b == v).count()
    }

    pub fn neighbors(&self, v: VarId) -> impl Iterator<Item = VarId> + '_ {
        self.edges.keys().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn has_edge(&self, a: VarId, b: VarId) -> bool {
        self.edges.contains_key(&ordered(a, b))
    }

    /// Graphviz DOT rendering for visual inspection.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph interactions {\n");
        for v in &self.vertices {
            out.push_str(&format!("  \"{v}\";\n"));
        }
        for ((a, b), w) in &self.edges {
            out.push_str(&format!("  \"{a}\" -- \"{b}\" [label=\"{w}\"];\n"));
        }
        out.push_str("}\n");
        out
    }
}

pub fn ordered(a: VarId, b: VarId) -> (VarId, VarId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Builds the interaction graph of a QUBO: one vertex per variable, one
/// weighted edge per quadratic term.
pub fn build_interaction_graph(qubo: &Polynomial) -> Result<InteractionGraph, GraphError> {
    if qubo.degree() > 2 {
        return Err(GraphError::DegreeTooHigh(qubo.degree()));
    }
    let mut edges = BTreeMap::new();
    for (m, c) in qubo.terms() {
        if m.degree() == 2 {
            edges.insert((m.vars()[0], m.vars()[1]), c);
        }
    }
    Ok(InteractionGraph {
        vertices: qubo.variables(),
        edges,
    })
}

/// One chain of substitution triangles and its linear traversal path.
///
/// The path visits every chain vertex once; consecutive path vertices share
/// an edge and every remaining triangle edge connects vertices at path
/// distance exactly 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleChain {
    pub chain_id: u32,
    pub path: Vec<VarId>,
    /// Triangles as (aux, factor_a, factor_b), in substitution order.
    pub triangles: Vec<(VarId, VarId, VarId)>,
}

impl TriangleChain {
    pub fn vertex_set(&self) -> BTreeSet<VarId> {
        self.triangles
            .iter()
            .flat_map(|&(a, b, c)| [a, b, c])
            .collect()
    }

    /// All edges inside this chain's triangles, plus the pendant edge when a
    /// terminal vertex was appended to the path.
    pub fn chain_edges(&self) -> BTreeSet<(VarId, VarId)> {
        let mut edges: BTreeSet<(VarId, VarId)> = self
            .triangles
            .iter()
            .flat_map(|&(aux, fa, fb)| {
                [ordered(fa, fb), ordered(fa, aux), ordered(fb, aux)]
            })
            .collect();
        if let (Some(&last), Some(&(aux, _, _))) = (self.path.last(), self.triangles.last()) {
            if last != aux {
                edges.insert(ordered(aux, last));
            }
        }
        edges
    }
}

/// Rebuilds the traversal path of every chain from its substitution records.
///
/// The path starts at the lower-canonical factor of the chain's first
/// substitution, then alternates fresh factor and auxiliary vertex. A
/// degree-1 vertex hanging off the final auxiliary (the last remaining
/// problem variable of a pure product) is appended as a terminal.
pub fn extract_chains(
    graph: &InteractionGraph,
    subs: &[Substitution],
) -> Result<Vec<TriangleChain>, GraphError> {
    let mut by_chain: BTreeMap<u32, Vec<&Substitution>> = BTreeMap::new();
    for s in subs {
        by_chain.entry(s.chain_id).or_default().push(s);
    }
    let mut chains = Vec::new();
    for (chain_id, subs) in by_chain {
        let first = subs[0];
        let (lo, hi) = ordered(first.factor_a, first.factor_b);
        let mut path = vec![lo, hi, first.aux];
        let mut triangles = vec![(first.aux, first.factor_a, first.factor_b)];
        let mut prev_aux = first.aux;
        for s in &subs[1..] {
            let fresh = if s.factor_a == prev_aux {
                s.factor_b
            } else if s.factor_b == prev_aux {
                s.factor_a
            } else {
                return Err(GraphError::InconsistentSubstitutions(format!(
                    "substitution for {} does not extend auxiliary {}",
                    s.aux, prev_aux
                )));
            };
            path.push(fresh);
            path.push(s.aux);
            triangles.push((s.aux, s.factor_a, s.factor_b));
            prev_aux = s.aux;
        }
        chains.push(TriangleChain {
            chain_id,
            path,
            triangles,
        });
    }
    // Append pendant terminals: a degree-1 neighbor of the final auxiliary
    // that belongs to no chain.
    let chain_vertices: BTreeSet<VarId> = chains
        .iter()
        .flat_map(|c| c.vertex_set())
        .collect();
    for chain in &mut chains {
        let last_aux = *chain.path.last().unwrap();
        let pendant = graph
            .neighbors(last_aux)
            .filter(|&v| graph.degree(v) == 1 && !chain_vertices.contains(&v))
            .min();
        if let Some(p) = pendant {
            chain.path.push(p);
        }
    }
    Ok(chains)
}

/// Relation between a pair of chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainRelation {
    /// Disjoint vertex sets.
    Independent,
    /// Exactly one shared vertex, an auxiliary of the earlier chain.
    Bifurcation,
    /// Two or more shared vertices, or a shared problem-variable selection.
    Overlap,
}

/// Classifies every unordered pair of chains. `duplicates` lists variable
/// splits already applied; split pairs count as disjoint.
pub fn classify_chains(
    chains: &[TriangleChain],
    _duplicates: &[(VarId, VarId)],
) -> BTreeMap<(u32, u32), ChainRelation> {
    let sets: Vec<(u32, BTreeSet<VarId>)> = chains
        .iter()
        .map(|c| (c.chain_id, c.vertex_set()))
        .collect();
    let mut out = BTreeMap::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let (id_a, set_a) = &sets[i];
            let (id_b, set_b) = &sets[j];
            let shared: Vec<VarId> = set_a.intersection(set_b).copied().collect();
            let (first, _second) = if id_a < id_b {
                (&chains[i], &chains[j])
            } else {
                (&chains[j], &chains[i])
            };
            let relation = match shared.len() {
                0 => ChainRelation::Independent,
                1 => {
                    let v = shared[0];
                    let first_aux = first.triangles.iter().any(|&(aux, _, _)| aux == v);
                    if first_aux {
                        ChainRelation::Bifurcation
                    } else {
                        ChainRelation::Overlap
                    }
                }
                _ => ChainRelation::Overlap,
            };
            let key = (*id_a.min(id_b), *id_a.max(id_b));
            out.insert(key, relation);
        }
    }
    out
}

/// True when no pair of chains shares a vertex.
pub fn chains_independent(chains: &[TriangleChain]) -> bool {
    classify_chains(chains, &[])
        .values()
        .all(|&r| r == ChainRelation::Independent)
}

/// Partition of the interaction graph's edges into chain edges (inside some
/// triangle, or a pendant attachment) and extraneous edges that need ad-hoc
/// routing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeClassification {
    pub chain_edges: BTreeSet<(VarId, VarId)>,
    pub extraneous_edges: BTreeSet<(VarId, VarId)>,
}

pub fn classify_edges(graph: &InteractionGraph, chains: &[TriangleChain]) -> EdgeClassification {
    let chain_edges: BTreeSet<(VarId, VarId)> = chains
        .iter()
        .flat_map(|c| c.chain_edges())
        .filter(|&(a, b)| graph.has_edge(a, b))
        .collect();
    let extraneous_edges = graph
        .edges
        .keys()
        .filter(|e| !chain_edges.contains(*e))
        .copied()
        .collect();
    EdgeClassification {
        chain_edges,
        extraneous_edges,
    }
}

/// JSON form of the interaction graph used by the CLI: vertex names plus
/// `[u, v, weight]` triples.
#[derive(Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, f64)>,
}

impl From<&InteractionGraph> for GraphJson {
    fn from(g: &InteractionGraph) -> Self {
        GraphJson {
            vertices: g.vertices.iter().map(|v| v.to_string()).collect(),
            edges: g
                .edges
                .iter()
                .map(|(&(a, b), &w)| (a.to_string(), b.to_string(), w))
                .collect(),
        }
    }
}

/// Quadratic monomial for an edge key.
pub fn edge_monomial(a: VarId, b: VarId) -> Monomial {
    Monomial::pair(a, b)
}
