//! Random instance generation, head-to-head compilation runs, and CSV
//! reporting.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::compiler::{compile_qaoa, cost_layer_circuit, QaoaParams};
use crate::device::CouplingMap;
use crate::pubo::{Monomial, Polynomial, VarId};
use crate::quadratizer::{product_polynomial, quadratize, Strategy, TieBreak};
use crate::verify::check_quadratization;

/// Variable count above which the brute-force quadratization oracle is
/// skipped during benchmark runs.
pub const ORACLE_VAR_LIMIT: usize = 20;

const BENCH_GAMMA: f64 = 0.4;
const BENCH_BETA: f64 = 0.3;

#[derive(Error, Debug, PartialEq)]
pub enum BenchError {
    #[error("invalid instance config: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub num_vars: u32,
    pub num_terms: u32,
    pub max_term_degree: u32,
    pub coef_range: (f64, f64),
    pub seed: u64,
}

impl InstanceConfig {
    /// Defaults per instance size: one term per variable, degrees up to 6,
    /// coefficients in [-10, 10].
    pub fn defaults(num_vars: u32, seed: u64) -> Self {
        InstanceConfig {
            num_vars,
            num_terms: num_vars,
            max_term_degree: 6,
            coef_range: (-10.0, 10.0),
            seed,
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        if self.num_vars < 2 {
            return Err(BenchError::InvalidConfig("need at least 2 variables".into()));
        }
        if self.max_term_degree < 2 {
            return Err(BenchError::InvalidConfig("max degree must be >= 2".into()));
        }
        if self.coef_range.0 > self.coef_range.1 {
            return Err(BenchError::InvalidConfig("empty coefficient range".into()));
        }
        if self.coef_range.1 < 0.5 && self.coef_range.0 > -0.5 {
            return Err(BenchError::InvalidConfig(
                "coefficient range excludes |c| >= 0.5".into(),
            ));
        }
        Ok(())
    }
}

/// Draws a random cost function: `num_terms` terms, each a uniformly random
/// variable subset of size uniform in `[2, max_term_degree]` (clamped to N)
/// with a coefficient uniform in `coef_range`, redrawn while |c| < 0.5.
/// Terms over the same subset merge by coefficient addition.
pub fn generate_instance(cfg: &InstanceConfig) -> Result<Polynomial, BenchError> {
    cfg.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let max_deg = cfg.max_term_degree.min(cfg.num_vars) as usize;
    let mut poly = Polynomial::new();
    for _ in 0..cfg.num_terms {
        let degree = rng.gen_range(2..=max_deg);
        let mut pool: Vec<u32> = (1..=cfg.num_vars).collect();
        let mut vars = Vec::with_capacity(degree);
        for _ in 0..degree {
            let i = rng.gen_range(0..pool.len());
            vars.push(VarId::problem(pool.swap_remove(i)));
        }
        let coef = loop {
            let c: f64 = rng.gen_range(cfg.coef_range.0..=cfg.coef_range.1);
            if c.abs() >= 0.5 {
                break c;
            }
        };
        poly.add_term(Monomial::new(vars), coef);
    }
    Ok(poly)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub seed: u64,
    pub n: u32,
    pub strategy: Strategy,
    pub aux_count: usize,
    pub depth: usize,
    pub width: usize,
    pub two_qubit_count: usize,
    pub swap_count: usize,
    pub compile_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub n: u32,
    pub strategy: Strategy,
    pub samples: usize,
    pub mean_depth: f64,
    pub mean_width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub per_size: Vec<SizeSummary>,
    /// Per size: (baseline mean depth - chain mean depth) / baseline mean.
    pub depth_reduction: BTreeMap<u32, f64>,
    pub connectivity_violations: usize,
    pub quadratization_failures: usize,
    /// Native cost-layer depth of the pure-product control instance per
    /// size, chain strategy. Expected constant.
    pub control_chain_depth: BTreeMap<u32, usize>,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<u32>,
    pub samples: u32,
    /// None means one term per variable.
    pub num_terms: Option<u32>,
    pub max_term_degree: u32,
    pub coef_range: (f64, f64),
    pub seed: u64,
}

impl BenchConfig {
    pub fn new(sizes: Vec<u32>, samples: u32, seed: u64) -> Self {
        BenchConfig {
            sizes,
            samples,
            num_terms: None,
            max_term_degree: 6,
            coef_range: (-10.0, 10.0),
            seed,
        }
    }

    fn instance(&self, n: u32, seed: u64) -> InstanceConfig {
        InstanceConfig {
            num_vars: n,
            num_terms: self.num_terms.unwrap_or(n),
            max_term_degree: self.max_term_degree,
            coef_range: self.coef_range,
            seed,
        }
    }
}

pub struct BenchOutput {
    pub records: Vec<BenchRecord>,
    pub summary: Summary,
}

struct InstanceOutcome {
    records: Vec<BenchRecord>,
    connectivity_violations: usize,
    quadratization_failures: usize,
    errors: Vec<String>,
}

fn run_instance(cfg: InstanceConfig, map: &CouplingMap) -> InstanceOutcome {
    let mut out = InstanceOutcome {
        records: Vec::new(),
        connectivity_violations: 0,
        quadratization_failures: 0,
        errors: Vec::new(),
    };
    let poly = match generate_instance(&cfg) {
        Ok(p) => p,
        Err(e) => {
            out.errors.push(format!("seed {}: {e}", cfg.seed));
            return out;
        }
    };
    for strategy in [Strategy::Chain, Strategy::Baseline] {
        let start = Instant::now();
        let compiled = quadratize(&poly, strategy, None, TieBreak::Canonical)
            .map_err(|e| format!("{e}"))
            .and_then(|problem| {
                compile_qaoa(
                    &problem,
                    map,
                    &QaoaParams::single(BENCH_GAMMA, BENCH_BETA),
                    strategy,
                )
                .map(|r| (problem, r))
                .map_err(|e| format!("{e}"))
            });
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        match compiled {
            Ok((problem, result)) => {
                if result.circuit.check_connectivity(map).is_err() {
                    out.connectivity_violations += 1;
                }
                if problem.qubo.variables().len() <= ORACLE_VAR_LIMIT {
                    match check_quadratization(&poly, &problem) {
                        Ok(report) if report.all_ok() => {}
                        Ok(_) => out.quadratization_failures += 1,
                        Err(e) => out.errors.push(format!(
                            "seed {} {strategy}: oracle error {e}",
                            cfg.seed
                        )),
                    }
                }
                out.records.push(BenchRecord {
                    seed: cfg.seed,
                    n: cfg.num_vars,
                    strategy,
                    aux_count: problem.aux_count(),
                    depth: result.metrics.depth,
                    width: result.metrics.width,
                    two_qubit_count: result.metrics.two_qubit_count,
                    swap_count: result.metrics.swap_count,
                    compile_time_ms: elapsed,
                });
            }
            Err(e) => out
                .errors
                .push(format!("seed {} {strategy}: {e}", cfg.seed)),
        }
    }
    out
}

/// Compiles `samples` random instances per size with both strategies,
/// verifying connectivity always and quadratization whenever the variable
/// count permits. Records are sorted by (N, seed, strategy) so output is
/// deterministic regardless of scheduling.
pub fn run_benchmark(cfg: &BenchConfig, map: &CouplingMap) -> BenchOutput {
    // Instance seeds come from a master stream in fixed order.
    let mut master = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut tasks: Vec<InstanceConfig> = Vec::new();
    for &n in &cfg.sizes {
        for _ in 0..cfg.samples {
            tasks.push(cfg.instance(n, master.gen()));
        }
    }
    #[cfg(feature = "parallel")]
    let outcomes: Vec<InstanceOutcome> =
        tasks.into_par_iter().map(|t| run_instance(t, map)).collect();
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<InstanceOutcome> =
        tasks.into_iter().map(|t| run_instance(t, map)).collect();

    let mut records = Vec::new();
    let mut connectivity_violations = 0;
    let mut quadratization_failures = 0;
    let mut errors = Vec::new();
    for o in outcomes {
        records.extend(o.records);
        connectivity_violations += o.connectivity_violations;
        quadratization_failures += o.quadratization_failures;
        errors.extend(o.errors);
    }
    records.sort_by(|a, b| {
        (a.n, a.seed, a.strategy.to_string()).cmp(&(b.n, b.seed, b.strategy.to_string()))
    });

    let mut per_size = Vec::new();
    let mut depth_reduction = BTreeMap::new();
    for &n in &cfg.sizes {
        let mut means = BTreeMap::new();
        for strategy in [Strategy::Baseline, Strategy::Chain] {
            let group: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.n == n && r.strategy == strategy)
                .collect();
            if group.is_empty() {
                continue;
            }
            let mean_depth =
                group.iter().map(|r| r.depth as f64).sum::<f64>() / group.len() as f64;
            let mean_width =
                group.iter().map(|r| r.width as f64).sum::<f64>() / group.len() as f64;
            means.insert(strategy.to_string(), mean_depth);
            per_size.push(SizeSummary {
                n,
                strategy,
                samples: group.len(),
                mean_depth,
                mean_width,
            });
        }
        if let (Some(&b), Some(&c)) = (means.get("baseline"), means.get("chain")) {
            depth_reduction.insert(n, (b - c) / b);
        }
    }

    let mut control_chain_depth = BTreeMap::new();
    for &n in &cfg.sizes {
        if n < 4 {
            continue;
        }
        let depth = quadratize(&product_polynomial(n), Strategy::Chain, None, TieBreak::Canonical)
            .map_err(|e| format!("{e}"))
            .and_then(|p| {
                cost_layer_circuit(&p, map, BENCH_GAMMA, Strategy::Chain)
                    .map_err(|e| format!("{e}"))
            })
            .map(|layer| layer.circuit.decompose_swaps().depth());
        match depth {
            Ok(d) => {
                control_chain_depth.insert(n, d);
            }
            Err(e) => errors.push(format!("control N={n}: {e}")),
        }
    }

    BenchOutput {
        records,
        summary: Summary {
            per_size,
            depth_reduction,
            connectivity_violations,
            quadratization_failures,
            control_chain_depth,
            errors,
        },
    }
}

/// CSV rendering with the generator and configuration recorded as comment
/// lines for reproducibility.
pub fn to_csv(cfg: &BenchConfig, records: &[BenchRecord]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# generator: chacha12, seed: {}", cfg.seed);
    let _ = writeln!(
        s,
        "# sizes: {:?}, samples: {}, terms: {}, max_degree: {}, coef_range: [{}, {}]",
        cfg.sizes,
        cfg.samples,
        cfg.num_terms
            .map_or("auto".to_string(), |t| t.to_string()),
        cfg.max_term_degree,
        cfg.coef_range.0,
        cfg.coef_range.1
    );
    s.push_str("seed,N,strategy,aux_count,depth,width,two_qubit_count,swap_count,compile_time_ms\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{:.3}",
            r.seed,
            r.n,
            r.strategy,
            r.aux_count,
            r.depth,
            r.width,
            r.two_qubit_count,
            r.swap_count,
            r.compile_time_ms
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::ibm_torino;

    #[test]
    fn generation_is_deterministic() {
        let cfg = InstanceConfig::defaults(8, 42);
        assert_eq!(generate_instance(&cfg).unwrap(), generate_instance(&cfg).unwrap());
    }

    #[test]
    fn generated_terms_respect_bounds() {
        let cfg = InstanceConfig::defaults(8, 7);
        let poly = generate_instance(&cfg).unwrap();
        for (m, c) in poly.terms() {
            assert!(m.degree() >= 2 && m.degree() <= 6);
            assert!(c.abs() <= 10.0 + 1e-12);
            // Merged terms can dip below 0.5 in magnitude, lone ones cannot;
            // eight degree-capped draws over eight variables rarely collide,
            // so just check the magnitude floor loosely.
            assert!(c != 0.0);
        }
        assert!(poly.num_terms() <= 8);
    }

    #[test]
    fn quadratic_only_instances() {
        let mut cfg = InstanceConfig::defaults(6, 3);
        cfg.max_term_degree = 2;
        let poly = generate_instance(&cfg).unwrap();
        assert_eq!(poly.degree(), 2);
        let problem = quadratize(&poly, Strategy::Chain, None, TieBreak::Canonical).unwrap();
        assert_eq!(problem.aux_count(), 0);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = InstanceConfig::defaults(8, 0);
        cfg.coef_range = (-0.3, 0.3);
        assert!(generate_instance(&cfg).is_err());
        let mut cfg = InstanceConfig::defaults(1, 0);
        cfg.num_vars = 1;
        assert!(generate_instance(&cfg).is_err());
    }

    #[test]
    fn small_benchmark_run() {
        let cfg = BenchConfig::new(vec![6, 8], 2, 11);
        let map = ibm_torino();
        let out = run_benchmark(&cfg, &map);
        assert_eq!(out.records.len(), 8);
        assert_eq!(out.summary.connectivity_violations, 0);
        assert_eq!(out.summary.quadratization_failures, 0);
        assert!(out.summary.errors.is_empty(), "{:?}", out.summary.errors);
        assert_eq!(out.summary.control_chain_depth[&6], 23);
        assert_eq!(out.summary.control_chain_depth[&8], 23);
        // Summary means match the records.
        for s in &out.summary.per_size {
            let group: Vec<&BenchRecord> = out
                .records
                .iter()
                .filter(|r| r.n == s.n && r.strategy == s.strategy)
                .collect();
            let mean = group.iter().map(|r| r.depth as f64).sum::<f64>() / group.len() as f64;
            assert!((mean - s.mean_depth).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_is_deterministic_modulo_timing() {
        let cfg = BenchConfig::new(vec![6], 2, 5);
        let map = ibm_torino();
        let strip = |csv: String| -> Vec<String> {
            csv.lines()
                .map(|l| l.rsplit_once(',').map_or(l.to_string(), |(head, _)| head.to_string()))
                .collect()
        };
        let a = strip(to_csv(&cfg, &run_benchmark(&cfg, &map).records));
        let b = strip(to_csv(&cfg, &run_benchmark(&cfg, &map).records));
        assert_eq!(a, b);
    }

    #[test]
    fn csv_header_columns() {
        let cfg = BenchConfig::new(vec![6], 1, 1);
        let csv = to_csv(&cfg, &[]);
        let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(
            header,
            "seed,N,strategy,aux_count,depth,width,two_qubit_count,swap_count,compile_time_ms"
        );
    }
}
