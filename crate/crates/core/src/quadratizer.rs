//! Reduction of higher-order polynomials to quadratic (QUBO) form.
//!
//! Two strategies are provided. The baseline repeatedly substitutes the
//! globally most frequent variable pair, minimizing the number of auxiliary
//! variables. The chain strategy instead extends the previous auxiliary with
//! one fresh variable per step, so the interaction graph of the result is a
//! chain of triangles that maps onto a line of physical qubits.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::TriangleChain;
use crate::pubo::{
    equality_penalty, pair_frequencies, penalty_term, Monomial, Polynomial, PuboError, VarId,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Chain,
    Baseline,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Strategy::Chain => write!(f, "chain"),
            Strategy::Baseline => write!(f, "baseline"),
        }
    }
}

/// Tie-breaking rule when several candidates are equally frequent.
///
/// `Canonical` is deterministic: the baseline strategy takes the lowest pair
/// in canonical variable order, while the chain strategy takes the highest,
/// which reproduces the published worked examples for both.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub enum TieBreak {
    #[default]
    Canonical,
    Random { seed: u64 },
}

/// One auxiliary substitution `aux = factor_a * factor_b` and the penalty
/// factor applied to its constraint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Substitution {
    pub aux: VarId,
    pub factor_a: VarId,
    pub factor_b: VarId,
    pub penalty_factor: f64,
    pub chain_id: u32,
}

/// The outcome of quadratization: a degree-2 polynomial plus the records
/// needed to interpret, verify, and compile it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratizedProblem {
    pub qubo: Polynomial,
    pub substitutions: Vec<Substitution>,
    pub original: Polynomial,
    /// The image of the original polynomial under all substitutions, before
    /// any penalty terms are added.
    pub remainder: Polynomial,
    pub penalty_factor: f64,
    /// Pairs (original variable, duplicate) created by chain splitting.
    pub duplicates: Vec<(VarId, VarId)>,
    /// Equality edges (x, x') whose penalty must be routed as extraneous
    /// interactions.
    pub extraneous_equalities: Vec<(VarId, VarId)>,
}

impl QuadratizedProblem {
    pub fn aux_count(&self) -> usize {
        self.substitutions.len()
    }
}

#[derive(Error, Debug)]
pub enum QuadratizeError {
    #[error(transparent)]
    Pubo(#[from] PuboError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Penalty factor `1 + sum of |c|` over all non-constant terms.
///
/// Violating any single substitution constraint costs at least this factor,
/// while no assignment can gain more than the sum of coefficient magnitudes,
/// so the minima of the original cost function are preserved.
pub fn select_penalty_factor(poly: &Polynomial) -> f64 {
    1.0 + poly
        .terms()
        .filter(|(m, _)| !m.is_constant())
        .map(|(_, c)| c.abs())
        .sum::<f64>()
}

/// Substitutes `a*b -> y` everywhere except in `protected` monomials.
///
/// The protected set holds the quadratic monomials of the original input:
/// those keep their own interaction edge (merging with a coinciding penalty
/// edge), while image terms produced by earlier substitutions reduce
/// further, matching the published running example.
fn substitute_except(
    poly: &Polynomial,
    a: VarId,
    b: VarId,
    y: VarId,
    protected: &BTreeSet<Monomial>,
) -> Result<Polynomial, PuboError> {
    if poly.variables().contains(&y) {
        return Err(PuboError::AuxAlreadyPresent(y));
    }
    Ok(Polynomial::from_terms(poly.terms().map(|(m, c)| {
        if protected.contains(m) {
            (m.clone(), c)
        } else {
            (m.substitute_pair(a, b, y), c)
        }
    })))
}

/// Degree-2 and lower monomials of the original input, exempt from
/// substitution.
fn protected_monomials(poly: &Polynomial) -> BTreeSet<Monomial> {
    poly.terms()
        .filter(|(m, _)| m.degree() <= 2)
        .map(|(m, _)| m.clone())
        .collect()
}

fn fresh_aux(used: &mut u32) -> VarId {
    *used += 1;
    VarId::aux(*used)
}

fn next_aux_start(poly: &Polynomial) -> u32 {
    poly.variables()
        .iter()
        .filter_map(|v| match v {
            VarId::Auxiliary(i) => Some(*i),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

fn pick<T: Ord + Copy>(candidates: Vec<T>, take_highest: bool, rng: Option<&mut ChaCha12Rng>) -> T {
    debug_assert!(!candidates.is_empty());
    match rng {
        Some(rng) => candidates[rng.gen_range(0..candidates.len())],
        None if take_highest => *candidates.iter().max().unwrap(),
        None => *candidates.iter().min().unwrap(),
    }
}

/// Most frequent pair among terms of degree >= 3, with ties resolved by
/// `tie`. Returns `None` when no higher-order terms remain.
fn most_frequent_pair(
    poly: &Polynomial,
    take_highest: bool,
    rng: Option<&mut ChaCha12Rng>,
) -> Option<(VarId, VarId)> {
    let freqs = pair_frequencies(poly, 3);
    let best = *freqs.values().max()?;
    let tied: Vec<(VarId, VarId)> = freqs
        .into_iter()
        .filter(|&(_, c)| c == best)
        .map(|(p, _)| p)
        .collect();
    Some(pick(tied, take_highest, rng))
}

/// Conventional quadratization: repeatedly substitute the globally most
/// frequent pair until the polynomial is quadratic.
pub fn quadratize_baseline(
    poly: &Polynomial,
    penalty: Option<f64>,
    tie: TieBreak,
) -> Result<QuadratizedProblem, QuadratizeError> {
    let penalty_factor = penalty.unwrap_or_else(|| select_penalty_factor(poly));
    let mut rng = match tie {
        TieBreak::Random { seed } => Some(ChaCha12Rng::seed_from_u64(seed)),
        TieBreak::Canonical => None,
    };
    let mut remainder = poly.clone();
    let protected = protected_monomials(poly);
    let mut aux_counter = next_aux_start(poly);
    let mut substitutions = Vec::new();
    let mut penalties = Polynomial::new();
    while remainder.degree() > 2 {
        let (a, b) = most_frequent_pair(&remainder, false, rng.as_mut())
            .ok_or_else(|| QuadratizeError::Internal("degree > 2 but no pairs".into()))?;
        let aux = fresh_aux(&mut aux_counter);
        remainder = substitute_except(&remainder, a, b, aux, &protected)?;
        penalties += &penalty_term(a, b, aux, penalty_factor)?;
        substitutions.push(Substitution {
            aux,
            factor_a: a,
            factor_b: b,
            penalty_factor,
            chain_id: substitutions.len() as u32,
        });
    }
    let qubo = remainder.clone() + penalties;
    Ok(QuadratizedProblem {
        qubo,
        substitutions,
        original: poly.clone(),
        remainder,
        penalty_factor,
        duplicates: Vec::new(),
        extraneous_equalities: Vec::new(),
    })
}

/// Variables co-occurring with `anchor` in terms of degree >= 3, counted by
/// term, excluding anything in `excluded`.
fn cooccurrence_counts(
    poly: &Polynomial,
    anchor: VarId,
    excluded: &BTreeSet<VarId>,
) -> Vec<(VarId, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for (m, _) in poly.terms() {
        if m.degree() < 3 || !m.contains(anchor) {
            continue;
        }
        for &v in m.vars() {
            if v != anchor && !excluded.contains(&v) {
                *counts.entry(v).or_insert(0usize) += 1;
            }
        }
    }
    counts.into_iter().collect()
}

/// Hardware-efficient quadratization: greedily build chains of triangles.
///
/// Each chain starts at the most frequent pair among the higher-order terms
/// and is extended by substituting `(y_i, x_j)` where `x_j` is the variable
/// that most often co-occurs with the latest auxiliary `y_i`. When no
/// continuation exists but higher-order terms remain, a new chain starts
/// over the enlarged variable set.
pub fn quadratize_chain(
    poly: &Polynomial,
    penalty: Option<f64>,
    tie: TieBreak,
) -> Result<QuadratizedProblem, QuadratizeError> {
    let penalty_factor = penalty.unwrap_or_else(|| select_penalty_factor(poly));
    let mut rng = match tie {
        TieBreak::Random { seed } => Some(ChaCha12Rng::seed_from_u64(seed)),
        TieBreak::Canonical => None,
    };
    let mut remainder = poly.clone();
    let protected = protected_monomials(poly);
    let mut aux_counter = next_aux_start(poly);
    let mut substitutions = Vec::new();
    let mut penalties = Polynomial::new();
    let mut chain_id = 0u32;
    while remainder.degree() > 2 {
        // Start a new chain at the most frequent pair.
        let (a, b) = most_frequent_pair(&remainder, true, rng.as_mut())
            .ok_or_else(|| QuadratizeError::Internal("degree > 2 but no pairs".into()))?;
        let mut current = fresh_aux(&mut aux_counter);
        remainder = substitute_except(&remainder, a, b, current, &protected)?;
        penalties += &penalty_term(a, b, current, penalty_factor)?;
        substitutions.push(Substitution {
            aux: current,
            factor_a: a,
            factor_b: b,
            penalty_factor,
            chain_id,
        });
        // Variables already consumed by this chain, plus its own auxiliaries;
        // selecting one again would fold the chain onto itself.
        let mut blocked: BTreeSet<VarId> = [a, b, current].into_iter().collect();
        loop {
            let counts = cooccurrence_counts(&remainder, current, &blocked);
            let Some(&best) = counts.iter().map(|(_, c)| c).max() else {
                break;
            };
            let tied: Vec<VarId> = counts
                .iter()
                .filter(|&&(_, c)| c == best)
                .map(|&(v, _)| v)
                .collect();
            let partner = pick(tied, true, rng.as_mut());
            let aux = fresh_aux(&mut aux_counter);
            remainder = substitute_except(&remainder, current, partner, aux, &protected)?;
            penalties += &penalty_term(current, partner, aux, penalty_factor)?;
            substitutions.push(Substitution {
                aux,
                factor_a: current,
                factor_b: partner,
                penalty_factor,
                chain_id,
            });
            blocked.insert(partner);
            blocked.insert(aux);
            current = aux;
        }
        chain_id += 1;
    }
    let qubo = remainder.clone() + penalties;
    Ok(QuadratizedProblem {
        qubo,
        substitutions,
        original: poly.clone(),
        remainder,
        penalty_factor,
        duplicates: Vec::new(),
        extraneous_equalities: Vec::new(),
    })
}

/// Splits chains that share vertices into independent chains.
///
/// Every variable used by two chains keeps its identity in the
/// lowest-numbered chain; later chains receive a duplicate `x'` tied to the
/// original by the quadratic penalty `c_P (x + x' - 2 x x')`. The resulting
/// equality edge is recorded as an extraneous interaction.
pub fn split_shared_variables(
    problem: &QuadratizedProblem,
    chains: &[TriangleChain],
) -> Result<QuadratizedProblem, QuadratizeError> {
    // Owner of each vertex: the lowest chain_id whose triangles use it.
    let mut owner = std::collections::BTreeMap::new();
    for chain in chains {
        for &(aux, fa, fb) in &chain.triangles {
            for v in [aux, fa, fb] {
                owner.entry(v).or_insert(chain.chain_id);
            }
        }
    }
    let mut substitutions = problem.substitutions.clone();
    let mut duplicates = problem.duplicates.clone();
    let mut extraneous_equalities = problem.extraneous_equalities.clone();
    let mut copy_counts = std::collections::BTreeMap::new();
    for (orig, dup) in &duplicates {
        if let VarId::Duplicate { copy, .. } = dup {
            let e = copy_counts.entry(*orig).or_insert(0u32);
            *e = (*e).max(*copy);
        }
    }
    let mut equality_terms = Polynomial::new();
    for chain in chains {
        let mut rewires = std::collections::BTreeMap::new();
        for &(_, fa, fb) in &chain.triangles {
            for v in [fa, fb] {
                if owner.get(&v) == Some(&chain.chain_id) || rewires.contains_key(&v) {
                    continue;
                }
                let copy = copy_counts.entry(v).or_insert(0);
                *copy += 1;
                let dup = VarId::duplicate_of(v, *copy);
                rewires.insert(v, dup);
                duplicates.push((v, dup));
                extraneous_equalities.push((v, dup));
                equality_terms += &equality_penalty(v, dup, problem.penalty_factor)?;
            }
        }
        if rewires.is_empty() {
            continue;
        }
        for sub in substitutions
            .iter_mut()
            .filter(|s| s.chain_id == chain.chain_id)
        {
            if let Some(&dup) = rewires.get(&sub.factor_a) {
                sub.factor_a = dup;
            }
            if let Some(&dup) = rewires.get(&sub.factor_b) {
                sub.factor_b = dup;
            }
        }
    }
    // Rebuild the QUBO from the (unchanged) remainder and the updated
    // penalty terms.
    let mut qubo = problem.remainder.clone();
    for sub in &substitutions {
        qubo += &penalty_term(sub.factor_a, sub.factor_b, sub.aux, sub.penalty_factor)?;
    }
    qubo += &equality_terms;
    Ok(QuadratizedProblem {
        qubo,
        substitutions,
        original: problem.original.clone(),
        remainder: problem.remainder.clone(),
        penalty_factor: problem.penalty_factor,
        duplicates,
        extraneous_equalities,
    })
}

/// Quadratizes with the given strategy; for the chain strategy, shared
/// vertices between chains are split so the result is compile-ready.
pub fn quadratize(
    poly: &Polynomial,
    strategy: Strategy,
    penalty: Option<f64>,
    tie: TieBreak,
) -> Result<QuadratizedProblem, QuadratizeError> {
    match strategy {
        Strategy::Baseline => quadratize_baseline(poly, penalty, tie),
        Strategy::Chain => {
            let problem = quadratize_chain(poly, penalty, tie)?;
            let graph = crate::graph::build_interaction_graph(&problem.qubo)
                .map_err(|e| QuadratizeError::Internal(e.to_string()))?;
            let chains = crate::graph::extract_chains(&graph, &problem.substitutions)
                .map_err(|e| QuadratizeError::Internal(e.to_string()))?;
            if crate::graph::chains_independent(&chains) {
                Ok(problem)
            } else {
                split_shared_variables(&problem, &chains)
            }
        }
    }
}

/// Pure product cost function `x1 x2 ... xN`, the running example.
pub fn product_polynomial(n: u32) -> Polynomial {
    Polynomial::from_terms([(
        Monomial::new((1..=n).map(VarId::problem).collect()),
        1.0,
    )])
}
