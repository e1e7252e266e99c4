//! Randomized invariants for the polynomial algebra and the quadratizers.

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::strategy::Strategy as _;

use quadchain::pubo::{parse_polynomial, penalty_term, Monomial, Polynomial, VarId};
use quadchain::quadratizer::{quadratize, Strategy, TieBreak};
use quadchain::verify::{brute_force_min, check_quadratization};

const NUM_VARS: u32 = 6;

/// Random polynomial over x1..x6 with nonzero integer coefficients; terms
/// may repeat so accumulation and cancellation paths get exercised too.
fn poly_strategy() -> impl proptest::strategy::Strategy<Value = Polynomial> {
    let term = (
        proptest::collection::btree_set(1..=NUM_VARS, 1..=4),
        prop_oneof![(-9i32..=9).prop_filter("nonzero", |c| *c != 0)],
    );
    proptest::collection::vec(term, 1..6).prop_map(|terms| {
        let mut poly = Polynomial::new();
        for (vars, c) in terms {
            let m = Monomial::new(vars.into_iter().map(VarId::problem).collect());
            poly.add_term(m, f64::from(c));
        }
        poly
    })
}

fn all_assignments(vars: &[VarId]) -> Vec<BTreeMap<VarId, bool>> {
    (0u32..1 << vars.len())
        .map(|state| {
            vars.iter()
                .enumerate()
                .map(|(i, &v)| (v, state >> i & 1 == 1))
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_parse_round_trip(poly in poly_strategy()) {
        let reparsed = parse_polynomial(&poly.to_string()).unwrap();
        prop_assert_eq!(reparsed, poly);
    }

    #[test]
    fn quadratized_output_is_quadratic(poly in poly_strategy()) {
        for strategy in [Strategy::Chain, Strategy::Baseline] {
            let q = quadratize(&poly, strategy, None, TieBreak::Canonical).unwrap();
            prop_assert!(q.qubo.degree() <= 2, "{strategy}: degree {}", q.qubo.degree());
        }
    }

    #[test]
    fn quadratization_preserves_minima(poly in poly_strategy()) {
        for strategy in [Strategy::Chain, Strategy::Baseline] {
            let q = quadratize(&poly, strategy, None, TieBreak::Canonical).unwrap();
            let report = check_quadratization(&poly, &q).unwrap();
            prop_assert!(report.all_ok(), "{strategy}: {report:?}");
        }
    }

    #[test]
    fn penalty_vanishes_exactly_on_consistent_states(
        c_p in 1.0f64..50.0,
    ) {
        let (a, b, y) = (VarId::problem(1), VarId::problem(2), VarId::aux(1));
        let penalty = penalty_term(a, b, y, c_p).unwrap();
        for assignment in all_assignments(&[a, b, y]) {
            let value = penalty.evaluate(&assignment).unwrap();
            let consistent = assignment[&y] == (assignment[&a] && assignment[&b]);
            if consistent {
                prop_assert_eq!(value, 0.0);
            } else {
                prop_assert!(value >= c_p - 1e-9, "violated state scored {value} < {c_p}");
            }
        }
    }

    #[test]
    fn brute_force_min_matches_direct_scan(poly in poly_strategy()) {
        let vars: Vec<VarId> = poly.variables().into_iter().collect();
        let (min, argmins) = brute_force_min(&poly).unwrap();
        let direct = all_assignments(&vars)
            .iter()
            .map(|a| poly.evaluate(a).unwrap())
            .fold(f64::INFINITY, f64::min);
        prop_assert_eq!(min, direct);
        prop_assert!(!argmins.is_empty());
    }
}
