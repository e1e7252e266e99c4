use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quadchain::bench::{run_benchmark, to_csv, BenchConfig};
use quadchain::circuit::Circuit;
use quadchain::compiler::{compile_qaoa, QaoaParams};
use quadchain::device::{heavy_hex, ibm_torino, load_coupling_map, longest_nn_path, CouplingMap};
use quadchain::graph::{build_interaction_graph, GraphJson};
use quadchain::pubo::{parse_polynomial, Polynomial};
use quadchain::quadratizer::{quadratize, QuadratizedProblem, Strategy, TieBreak};
use quadchain::verify::{check_quadratization, phase_oracle_check};

#[derive(Parser)]
#[command(
    name = "quadchain",
    about = "Quadratize higher-order binary cost functions and compile constant-depth QAOA circuits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quadratize a polynomial and print the result as JSON.
    Quadratize(QuadratizeArgs),
    /// Print the interaction graph of a QUBO as JSON or DOT.
    Graph(GraphArgs),
    /// Device inspection.
    Device(DeviceArgs),
    /// Quadratize and compile a full QAOA circuit.
    Compile(CompileArgs),
    /// Run the oracles against a quadratized problem and optional circuit.
    Verify(VerifyArgs),
    /// Random-instance benchmark comparing both strategies.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Chain,
    Baseline,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Chain => Strategy::Chain,
            StrategyArg::Baseline => Strategy::Baseline,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    Canonical,
    Random,
}

#[derive(Args)]
struct PolyInput {
    /// Polynomial text, e.g. "2 x1 x2 x3 - x4".
    poly: Option<String>,
    /// Read the polynomial from a file instead (text grammar, or JSON when
    /// the content starts with '{').
    #[arg(long, conflicts_with = "poly")]
    input: Option<PathBuf>,
}

impl PolyInput {
    fn read(&self) -> Result<Polynomial, String> {
        let text = match (&self.poly, &self.input) {
            (Some(p), None) => p.clone(),
            (None, Some(path)) => fs::read_to_string(path).map_err(|e| e.to_string())?,
            _ => return Err("provide a polynomial or --input".into()),
        };
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            serde_json::from_str(trimmed).map_err(|e| e.to_string())
        } else {
            parse_polynomial(trimmed).map_err(|e| e.to_string())
        }
    }
}

#[derive(Args)]
struct QuadratizeArgs {
    #[command(flatten)]
    poly: PolyInput,
    #[arg(long, value_enum, default_value = "chain")]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value = "canonical")]
    tie_break: TieBreakArg,
    /// Seed for the random tie-break.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// "auto" or a positive real.
    #[arg(long, default_value = "auto")]
    penalty_factor: String,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    poly: PolyInput,
    /// Emit Graphviz DOT instead of JSON.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct DeviceArgs {
    #[command(subcommand)]
    command: DeviceCommand,
}

#[derive(Subcommand)]
enum DeviceCommand {
    /// Print the greedy nearest-neighbor path of a device.
    Path {
        #[arg(long, default_value = "builtin:ibm_torino")]
        device: String,
    },
    /// Print the coupling map JSON of a device.
    Show {
        #[arg(long, default_value = "builtin:ibm_torino")]
        device: String,
    },
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    poly: PolyInput,
    #[arg(long, value_enum, default_value = "chain")]
    strategy: StrategyArg,
    #[arg(long, default_value = "builtin:ibm_torino")]
    device: String,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Comma-separated gamma values, one per repetition.
    #[arg(long, default_value = "0.4", value_delimiter = ',')]
    gamma: Vec<f64>,
    /// Comma-separated beta values, one per repetition.
    #[arg(long, default_value = "0.3", value_delimiter = ',')]
    beta: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    emit: EmitArg,
    #[arg(long, default_value = "auto")]
    penalty_factor: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitArg {
    Json,
    Qasm,
    Metrics,
}

#[derive(Args)]
struct VerifyArgs {
    /// Original polynomial (text grammar or JSON file via @path).
    #[arg(long)]
    original: String,
    /// QuadratizedProblem JSON file.
    #[arg(long)]
    problem: PathBuf,
    /// Optional cost-layer circuit JSON to run the phase oracle against.
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Gamma used when the circuit was compiled.
    #[arg(long, default_value_t = 0.4)]
    gamma: f64,
    /// Coupling map for the connectivity check of the circuit.
    #[arg(long, default_value = "builtin:ibm_torino")]
    device: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Sizes as a range "8..16" (inclusive) or comma-separated list.
    #[arg(long, default_value = "8..16")]
    sizes: String,
    #[arg(long, default_value_t = 25)]
    samples: u32,
    #[arg(long, default_value = "builtin:ibm_torino")]
    device: String,
    /// Terms per instance; "auto" means one per variable.
    #[arg(long, default_value = "auto")]
    terms: String,
    #[arg(long, default_value_t = 6)]
    max_degree: u32,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write aggregate statistics as JSON to this path.
    #[arg(long)]
    summary_json: Option<PathBuf>,
}

fn load_device(spec: &str) -> Result<CouplingMap, String> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return match name {
            "ibm_torino" => Ok(ibm_torino()),
            other => Err(format!("unknown builtin device {other:?}")),
        };
    }
    if let Some(dims) = spec.strip_prefix("heavy-hex:") {
        let (r, c) = dims
            .split_once(',')
            .ok_or_else(|| format!("expected heavy-hex:R,C, got {spec:?}"))?;
        let rows = r.trim().parse::<u32>().map_err(|e| e.to_string())?;
        let cols = c.trim().parse::<u32>().map_err(|e| e.to_string())?;
        return heavy_hex(rows, cols).map_err(|e| e.to_string());
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let bytes = fs::read(path).map_err(|e| e.to_string())?;
        return load_coupling_map(&bytes).map_err(|e| e.to_string());
    }
    Err(format!(
        "device spec {spec:?} must be builtin:<name>, heavy-hex:R,C or file:<path>"
    ))
}

fn parse_penalty(text: &str) -> Result<Option<f64>, String> {
    if text == "auto" {
        return Ok(None);
    }
    let v = text
        .parse::<f64>()
        .map_err(|_| format!("penalty factor must be \"auto\" or a real, got {text:?}"))?;
    Ok(Some(v))
}

fn parse_sizes(text: &str) -> Result<Vec<u32>, String> {
    if let Some((lo, hi)) = text.split_once("..") {
        let lo = lo.trim().parse::<u32>().map_err(|e| e.to_string())?;
        let hi = hi.trim().parse::<u32>().map_err(|e| e.to_string())?;
        if lo > hi {
            return Err(format!("empty size range {text:?}"));
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse::<u32>().map_err(|e| e.to_string()))
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Quadratize(args) => {
            let poly = args.poly.read()?;
            let tie = match args.tie_break {
                TieBreakArg::Canonical => TieBreak::Canonical,
                TieBreakArg::Random => TieBreak::Random { seed: args.seed },
            };
            let problem = quadratize(
                &poly,
                args.strategy.into(),
                parse_penalty(&args.penalty_factor)?,
                tie,
            )
            .map_err(|e| e.to_string())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&problem).map_err(|e| e.to_string())?
            );
        }
        Command::Graph(args) => {
            let poly = args.poly.read()?;
            let graph = build_interaction_graph(&poly).map_err(|e| e.to_string())?;
            if args.dot {
                print!("{}", graph.to_dot());
            } else {
                let json = GraphJson::from(&graph);
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?
                );
            }
        }
        Command::Device(args) => match args.command {
            DeviceCommand::Path { device } => {
                let map = load_device(&device)?;
                let path = longest_nn_path(&map).map_err(|e| e.to_string())?;
                println!("device: {} ({} qubits)", map.name, map.num_qubits);
                println!("path length: {}", path.len());
                println!(
                    "path: {}",
                    path.qubits
                        .iter()
                        .map(|q| q.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                );
            }
            DeviceCommand::Show { device } => {
                println!("{}", load_device(&device)?.to_json());
            }
        },
        Command::Compile(args) => {
            let poly = args.poly.read()?;
            let map = load_device(&args.device)?;
            let strategy: Strategy = args.strategy.into();
            let problem = quadratize(
                &poly,
                strategy,
                parse_penalty(&args.penalty_factor)?,
                TieBreak::Canonical,
            )
            .map_err(|e| e.to_string())?;
            if args.gamma.len() != args.reps || args.beta.len() != args.reps {
                return Err(format!(
                    "--reps {} needs {} gamma and beta values",
                    args.reps, args.reps
                ));
            }
            let params =
                QaoaParams::new(args.gamma.clone(), args.beta.clone()).map_err(|e| e.to_string())?;
            let result =
                compile_qaoa(&problem, &map, &params, strategy).map_err(|e| e.to_string())?;
            match args.emit {
                EmitArg::Json => println!("{}", result.circuit.to_json()),
                EmitArg::Qasm => print!("{}", result.circuit.to_text()),
                EmitArg::Metrics => println!(
                    "{}",
                    serde_json::to_string_pretty(&result.metrics).map_err(|e| e.to_string())?
                ),
            }
        }
        Command::Verify(args) => {
            let original = if let Some(path) = args.original.strip_prefix('@') {
                let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
                parse_polynomial(text.trim()).map_err(|e| e.to_string())?
            } else {
                parse_polynomial(&args.original).map_err(|e| e.to_string())?
            };
            let problem: QuadratizedProblem = serde_json::from_slice(
                &fs::read(&args.problem).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            let mut report = check_quadratization(&original, &problem).map_err(|e| e.to_string())?;
            if let Some(path) = &args.circuit {
                let circuit = Circuit::from_json(&fs::read(path).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                let map = load_device(&args.device)?;
                report.connectivity_ok = Some(circuit.check_connectivity(&map).is_ok());
                let (ok, err) = phase_oracle_check(&circuit, &problem.qubo, args.gamma)
                    .map_err(|e| e.to_string())?;
                report.phase_ok = Some(ok);
                report.max_phase_error = Some(err);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
            );
            if !report.all_ok() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Bench(args) => {
            let map = load_device(&args.device)?;
            let mut cfg = BenchConfig::new(parse_sizes(&args.sizes)?, args.samples, args.seed);
            cfg.max_term_degree = args.max_degree;
            if args.terms != "auto" {
                cfg.num_terms = Some(args.terms.parse::<u32>().map_err(|e| e.to_string())?);
            }
            let out = run_benchmark(&cfg, &map);
            let csv = to_csv(&cfg, &out.records);
            match &args.out {
                Some(path) => fs::write(path, csv).map_err(|e| e.to_string())?,
                None => print!("{csv}"),
            }
            if let Some(path) = &args.summary_json {
                fs::write(
                    path,
                    serde_json::to_string_pretty(&out.summary).map_err(|e| e.to_string())?,
                )
                .map_err(|e| e.to_string())?;
            } else {
                eprintln!(
                    "{}",
                    serde_json::to_string_pretty(&out.summary).map_err(|e| e.to_string())?
                );
            }
            if out.summary.connectivity_violations > 0
                || out.summary.quadratization_failures > 0
                || !out.summary.errors.is_empty()
            {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
