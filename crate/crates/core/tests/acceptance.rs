//! Acceptance gate: one check per release criterion, each printing a
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the summary.

use quadchain::bench::{generate_instance, run_benchmark, BenchConfig, InstanceConfig};
use quadchain::circuit::{Circuit, Gate};
use quadchain::compiler::cost_layer_circuit;
use quadchain::device::{ibm_torino, longest_nn_path};
use quadchain::pubo::{parse_polynomial, penalty_term, VarId};
use quadchain::quadratizer::{
    product_polynomial, quadratize, quadratize_baseline, quadratize_chain, Strategy, TieBreak,
};
use quadchain::verify::{check_quadratization, phase_oracle_check, PHASE_TOLERANCE};

struct Gate10 {
    failures: Vec<String>,
}

impl Gate10 {
    fn check(&mut self, id: u32, label: &str, result: Result<String, String>) {
        match result {
            Ok(detail) => println!("criterion {id:2} PASS  {label}: {detail}"),
            Err(detail) => {
                println!("criterion {id:2} FAIL  {label}: {detail}");
                self.failures.push(format!("{id}: {label}: {detail}"));
            }
        }
    }
}

fn criterion_1() -> Result<String, String> {
    let map = ibm_torino();
    for n in [8u32, 12, 16, 24, 40] {
        let problem = quadratize(&product_polynomial(n), Strategy::Chain, None, TieBreak::Canonical)
            .map_err(|e| e.to_string())?;
        let layer = cost_layer_circuit(&problem, &map, 0.4, Strategy::Chain)
            .map_err(|e| e.to_string())?;
        let depth = layer.circuit.decompose_swaps().depth();
        if depth != 23 {
            return Err(format!("N={n}: native cost-layer depth {depth}, expected 23"));
        }
    }
    Ok("native cost-layer depth 23 for N in {8,12,16,24,40}".to_string())
}

fn criterion_2() -> Result<String, String> {
    let mut c = Circuit::new(2);
    c.push(Gate::Swap { a: 0, b: 1 });
    let native = c.decompose_swaps();
    let cz = native.gates.iter().filter(|g| g.name() == "cz").count();
    let sx = native.gates.iter().filter(|g| g.name() == "sx").count();
    if cz == 3 && sx == 6 && native.depth() == 6 {
        Ok("SWAP = 3 CZ + 6 SX at depth 6".to_string())
    } else {
        Err(format!("{cz} CZ, {sx} SX, depth {}", native.depth()))
    }
}

fn criterion_3() -> Result<String, String> {
    let mut checked = 0u32;
    let mut seed = 0u64;
    while checked < 200 {
        seed += 1;
        let n = 4 + (seed % 5) as u32; // N in 4..=8
        let cfg = InstanceConfig {
            num_vars: n,
            num_terms: 2 + (seed / 5 % 4) as u32,
            max_term_degree: 3 + (seed / 20 % 3).min((n - 3) as u64) as u32,
            coef_range: (-10.0, 10.0),
            seed,
        };
        let poly = generate_instance(&cfg).map_err(|e| e.to_string())?;
        let mut fits = true;
        let mut problems = Vec::new();
        for strategy in [Strategy::Chain, Strategy::Baseline] {
            let problem =
                quadratize(&poly, strategy, None, TieBreak::Canonical).map_err(|e| e.to_string())?;
            if problem.qubo.variables().len() > 20 {
                fits = false;
                break;
            }
            problems.push((strategy, problem));
        }
        if !fits {
            continue;
        }
        for (strategy, problem) in problems {
            let report = check_quadratization(&poly, &problem).map_err(|e| e.to_string())?;
            if !report.all_ok() {
                return Err(format!("seed {seed} {strategy}: {report:?}"));
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} instances, both strategies, oracle clean"))
}

fn criterion_4() -> Result<String, String> {
    let map = ibm_torino();
    let mut checked = 0u32;
    let mut seed = 1000u64;
    let mut worst: f64 = 0.0;
    while checked < 50 {
        seed += 1;
        let n = 5 + (seed % 4) as u32; // N in 5..=8
        let cfg = InstanceConfig {
            num_vars: n,
            num_terms: 2 + (seed / 4 % 3) as u32,
            max_term_degree: 4.min(n),
            coef_range: (-10.0, 10.0),
            seed,
        };
        let poly = generate_instance(&cfg).map_err(|e| e.to_string())?;
        let gamma = 0.1 + (seed % 7) as f64 * 0.1;
        let problem =
            quadratize(&poly, Strategy::Chain, None, TieBreak::Canonical).map_err(|e| e.to_string())?;
        if problem.qubo.variables().len() > 16 {
            continue;
        }
        let layer = cost_layer_circuit(&problem, &map, gamma, Strategy::Chain)
            .map_err(|e| e.to_string())?;
        let native = layer.circuit.decompose_swaps();
        let (ok, err) =
            phase_oracle_check(&native, &problem.qubo, gamma).map_err(|e| e.to_string())?;
        if !ok {
            return Err(format!("seed {seed}: max phase error {err}"));
        }
        worst = worst.max(err);
        checked += 1;
    }
    if worst < PHASE_TOLERANCE {
        Ok(format!("{checked} native cost layers, worst phase error {worst:.2e} rad"))
    } else {
        Err(format!("worst phase error {worst:.2e} rad"))
    }
}

fn criterion_5() -> Result<String, String> {
    let map = ibm_torino();
    let cfg = BenchConfig::new((8..=16).collect(), 25, 77);
    let out = run_benchmark(&cfg, &map);
    if !out.summary.errors.is_empty() {
        return Err(format!("harness errors: {:?}", out.summary.errors));
    }
    if out.summary.connectivity_violations == 0 && out.summary.quadratization_failures == 0 {
        Ok(format!(
            "{} records, zero connectivity violations",
            out.records.len()
        ))
    } else {
        Err(format!(
            "{} connectivity violations, {} oracle failures",
            out.summary.connectivity_violations, out.summary.quadratization_failures
        ))
    }
}

fn criterion_6() -> Result<String, String> {
    let map = ibm_torino();
    let path = longest_nn_path(&map).map_err(|e| e.to_string())?;
    let start = path.qubits[0];
    if path.len() < 100 {
        return Err(format!("path length {} < 100", path.len()));
    }
    if map.degree(start) != 1 {
        return Err(format!("start qubit {start} has degree {}", map.degree(start)));
    }
    if path.len() != 112 {
        return Err(format!("path length {}, goal 112", path.len()));
    }
    Ok(format!("length 112 starting at degree-1 qubit {start}"))
}

fn criterion_7() -> Result<String, String> {
    for n in 4..=20u32 {
        let q = quadratize_chain(&product_polynomial(n), None, TieBreak::Canonical)
            .map_err(|e| e.to_string())?;
        if q.aux_count() != (n - 2) as usize {
            return Err(format!("N={n}: {} auxiliaries, expected {}", q.aux_count(), n - 2));
        }
        if !q.substitutions.iter().all(|s| s.chain_id == 0) {
            return Err(format!("N={n}: product split into multiple chains"));
        }
    }
    let q = quadratize_baseline(&product_polynomial(4), None, TieBreak::Canonical)
        .map_err(|e| e.to_string())?;
    let subs = &q.substitutions;
    let pair = |i: usize| (subs[i].factor_a, subs[i].factor_b);
    if q.aux_count() != 2
        || pair(0) != (VarId::problem(1), VarId::problem(2))
        || pair(1) != (VarId::problem(3), VarId::problem(4))
    {
        return Err(format!("baseline N=4 substitutions: {subs:?}"));
    }
    Ok("chain: N-2 auxiliaries in one chain for 4..=20; baseline N=4 matches".to_string())
}

fn criteria_8_and_9() -> (Result<String, String>, Result<String, String>) {
    let map = ibm_torino();
    let cfg = BenchConfig::new(vec![16], 100, 2024);
    let out = run_benchmark(&cfg, &map);
    if !out.summary.errors.is_empty() {
        let e = Err(format!("harness errors: {:?}", out.summary.errors));
        return (e.clone(), e);
    }
    let mean = |strategy: Strategy, width: bool| -> Option<f64> {
        out.summary
            .per_size
            .iter()
            .find(|s| s.n == 16 && s.strategy == strategy)
            .map(|s| if width { s.mean_width } else { s.mean_depth })
    };
    let (Some(chain_d), Some(base_d), Some(chain_w), Some(base_w)) = (
        mean(Strategy::Chain, false),
        mean(Strategy::Baseline, false),
        mean(Strategy::Chain, true),
        mean(Strategy::Baseline, true),
    ) else {
        let e = Err("missing summary rows".to_string());
        return (e.clone(), e);
    };
    let reduction = (base_d - chain_d) / base_d;
    let c8 = if reduction >= 0.20 {
        Ok(format!(
            "mean depth {chain_d:.1} vs {base_d:.1}, reduction {:.1}%",
            reduction * 100.0
        ))
    } else {
        Err(format!(
            "mean depth {chain_d:.1} vs {base_d:.1}, reduction {:.1}% < 20%",
            reduction * 100.0
        ))
    };
    let c9 = if chain_w > base_w {
        Ok(format!("mean width {chain_w:.1} > {base_w:.1}"))
    } else {
        Err(format!("mean width {chain_w:.1} <= {base_w:.1}"))
    };
    (c8, c9)
}

fn criterion_10() -> Result<String, String> {
    let c = parse_polynomial("x1 x2 x3 x4 x5 + x1 x2 x3 x4 + x2 x3 x4").unwrap();
    let q = quadratize_chain(&c, None, TieBreak::Canonical).map_err(|e| e.to_string())?;
    let x = VarId::problem;
    let y = VarId::aux;
    let cp = q.penalty_factor;
    if cp != 4.0 {
        return Err(format!("penalty factor {cp}, expected 4"));
    }
    let mut expected = parse_polynomial("x1 y3 + x1 y2 + y2").unwrap();
    expected += &penalty_term(x(3), x(4), y(1), cp).unwrap();
    expected += &penalty_term(y(1), x(2), y(2), cp).unwrap();
    expected += &penalty_term(y(2), x(5), y(3), cp).unwrap();
    if q.qubo == expected {
        Ok("Q = x1y3 + x1y2 + y2 + P1(x3,x4) + P2(y1,x2) + P3(y2,x5)".to_string())
    } else {
        Err(format!("got {}", q.qubo))
    }
}

#[test]
fn acceptance_gate() {
    let mut gate = Gate10 { failures: Vec::new() };
    gate.check(1, "constant-depth cost layer", criterion_1());
    gate.check(2, "SWAP decomposition", criterion_2());
    gate.check(3, "quadratization soundness", criterion_3());
    gate.check(4, "gate-level equivalence", criterion_4());
    gate.check(5, "connectivity compliance", criterion_5());
    gate.check(6, "path extraction", criterion_6());
    gate.check(7, "chain structure", criterion_7());
    let (c8, c9) = criteria_8_and_9();
    gate.check(8, "directional depth advantage", c8);
    gate.check(9, "width trade-off", c9);
    gate.check(10, "worked-example regression", criterion_10());
    assert!(gate.failures.is_empty(), "failed criteria: {:#?}", gate.failures);
}
