//! `univnc`: generate networks, transform them, run codes and checks.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 a decoding
//! failure that a deterministic design must not produce, 4 a Monte Carlo
//! failure rate above its tolerance.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use univnc::algebra::BinaryPoly;
use univnc::codes::{vg_registry, Design, DesignParams};
use univnc::network::{butterfly, combination, lower_bound, random_dag, LowerBoundMode, Network};
use univnc::sim::{self, ChurnEvent, McResult};
use univnc::szcheck::sz_corpus;
use univnc::transform::VirtualGraph;

#[derive(Parser)]
#[command(name = "univnc", version, about = "Convolutional network codes over F2(z)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Butterfly,
    Random,
    Lowerbound,
    Combination,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    ManySinks,
    OneSink,
}

#[derive(Clone, Copy, ValueEnum)]
enum DesignArg {
    Wup,
    Sup,
    R2d2,
    C3p0,
}

impl From<DesignArg> for Design {
    fn from(d: DesignArg) -> Self {
        match d {
            DesignArg::Wup => Design::Wup,
            DesignArg::Sup => Design::Sup,
            DesignArg::R2d2 => Design::R2d2,
            DesignArg::C3p0 => Design::C3p0,
        }
    }
}

#[derive(clap::Args)]
struct CodeArgs {
    #[arg(long, value_enum)]
    design: DesignArg,
    #[arg(long, default_value_t = 2)]
    rate: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Master seed. Required by the random designs.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a network from one of the built-in families.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 8)]
        nodes: usize,
        #[arg(long, default_value_t = 0.4)]
        edge_prob: f64,
        #[arg(long, default_value_t = 2)]
        sinks: usize,
        #[arg(long, default_value_t = 2)]
        min_cut: usize,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        #[arg(long, value_enum, default_value = "many-sinks")]
        mode: Mode,
        /// Forwarding-node pair `i,j` for `--mode one-sink`.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        pair: Option<Vec<usize>>,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Replace every node by its gadget and write the virtual graph.
    Transform {
        net: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Code, encode and decode once; write the run report.
    Run {
        net: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        /// One message per source stream, as `0x…` polynomials.
        #[arg(long, num_args = 1..)]
        messages: Option<Vec<String>>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Estimate the failure probability over many coefficient draws.
    Montecarlo {
        net: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value = "mc.csv")]
        csv: PathBuf,
        #[arg(long, default_value = "summary.json")]
        summary: PathBuf,
    },
    /// Check the sampling bound exactly on random small instances.
    Szcheck {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Apply a join/leave script and report after every event.
    Churn {
        net: PathBuf,
        script: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Invalid(String),
    Undecodable(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Undecodable(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invalid(m) | Failure::Undecodable(m) => m,
        }
    }
}

type Outcome = Result<u8, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(|e| invalid(format!("{e:#}")))
}

fn load_network(path: &Path) -> Result<Network, Failure> {
    Network::from_json(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(|e| usage(format!("{e:#}"))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn params(code: &CodeArgs, net: &Network) -> Result<(Design, DesignParams), Failure> {
    let design = Design::from(code.design);
    if !design.is_deterministic() && code.seed.is_none() {
        return Err(usage(format!("--seed is required for {design}")));
    }
    let p = DesignParams::new(code.rate, code.epsilon, net.sinks.len(), code.seed.unwrap_or(0));
    Ok((design, p))
}

/// Messages from the command line, or drawn from the seed. Without a seed
/// the draw uses seed 0, which keeps the run reproducible.
fn messages(given: Option<&[String]>, rate: usize, seed: Option<u64>) -> Result<Vec<BinaryPoly>, Failure> {
    match given {
        Some(list) => {
            if list.len() != rate {
                return Err(usage(format!("expected {rate} messages, got {}", list.len())));
            }
            list.iter().map(|m| m.parse::<BinaryPoly>().map_err(usage)).collect()
        }
        None => Ok(sim::random_messages(seed.unwrap_or(0), rate, 64)),
    }
}

fn cmd_gen(cmd: &Cmd) -> Outcome {
    let Cmd::Gen { family, seed, nodes, edge_prob, sinks, min_cut, depth, mode, pair, n, k, out } = cmd else {
        unreachable!()
    };
    let net = match family {
        Family::Butterfly => butterfly(),
        Family::Random => {
            let seed = seed.ok_or_else(|| usage("--seed is required for the random family"))?;
            random_dag(seed, *nodes, *edge_prob, *sinks, *min_cut).map_err(usage)?
        }
        Family::Lowerbound => {
            let m = match (mode, pair.as_deref()) {
                (Mode::ManySinks, _) => LowerBoundMode::ManySinks,
                (Mode::OneSink, Some([i, j])) => LowerBoundMode::OneSink(*i, *j),
                (Mode::OneSink, _) => return Err(usage("--mode one-sink needs --pair i,j")),
            };
            lower_bound(*depth, m).map_err(usage)?
        }
        Family::Combination => combination(*n, *k).map_err(usage)?,
    };
    emit(&net.to_json(), out.as_deref())?;
    Ok(0)
}

fn cmd_run(net: &Path, code: &CodeArgs, msgs: Option<&[String]>, out: Option<&Path>) -> Outcome {
    let net = load_network(net)?;
    let (design, p) = params(code, &net)?;
    let x = messages(msgs, code.rate, code.seed)?;
    let report = sim::run(&net, design, p, &x).map_err(|e| match e {
        sim::SimError::Codes(c) => usage(c),
        other => Failure::Undecodable(other.to_string()),
    })?;
    emit(&report.to_json(), out)?;
    let bad: Vec<&str> = report
        .sinks
        .iter()
        .filter(|s| s.min_cut >= code.rate && !(s.decodable && s.decode_ok))
        .map(|s| s.id.as_str())
        .collect();
    if design.is_deterministic() && !bad.is_empty() {
        return Err(Failure::Undecodable(format!("{design} failed at sinks {bad:?} despite sufficient min-cut")));
    }
    Ok(0)
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(flatten)]
    result: &'a McResult,
    epsilon: f64,
    threshold: f64,
    within_bound: bool,
}

fn cmd_montecarlo(net: &Path, code: &CodeArgs, trials: usize, csv: &Path, summary: &Path) -> Outcome {
    if trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let seed = code.seed.ok_or_else(|| usage("--seed is required"))?;
    let net = load_network(net)?;
    let (design, p) = params(code, &net)?;
    let vg = VirtualGraph::transform(&net);
    let reg = vg_registry(&vg);
    let result = sim::monte_carlo(&vg, &reg, design, p, trials, seed).map_err(|e| match e {
        sim::SimError::Codes(c) => usage(c),
        other => Failure::Undecodable(other.to_string()),
    })?;
    let threshold = code.epsilon + 3.0 * result.ci95;
    let within_bound = result.rate <= threshold;
    let s = Summary { result: &result, epsilon: code.epsilon, threshold, within_bound };
    emit(&result.to_csv(), Some(csv))?;
    emit(&serde_json::to_string_pretty(&s).expect("summary serializes"), Some(summary))?;
    Ok(if within_bound { 0 } else { 4 })
}

fn cmd_szcheck(instances: usize, trials: u64, seed: u64, out: Option<&Path>) -> Outcome {
    if trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let report = sz_corpus(instances, 4, 3, &[2, 4, 8], trials, seed).map_err(usage)?;
    emit(&report.to_json(), out)?;
    if report.violations > 0 {
        return Err(Failure::Undecodable(format!("{} bound violations", report.violations)));
    }
    Ok(0)
}

fn cmd_churn(net: &Path, script: &Path, code: &CodeArgs, out: Option<&Path>) -> Outcome {
    let net = load_network(net)?;
    let events: Vec<ChurnEvent> =
        serde_json::from_str(&read(script)?).map_err(|e| invalid(format!("{}: {e}", script.display())))?;
    let (design, p) = params(code, &net)?;
    let x = messages(None, code.rate, code.seed)?;
    let steps = sim::robustness_scenario(&net, design, p, &x, &events).map_err(|e| match e {
        sim::SimError::Codes(c) => usage(c),
        sim::SimError::Transform(t) => invalid(t),
        other => Failure::Undecodable(other.to_string()),
    })?;
    emit(&serde_json::to_string_pretty(&steps).expect("steps serialize"), out)?;
    for (i, s) in steps.iter().enumerate() {
        if !s.changed.is_empty() {
            return Err(Failure::Undecodable(format!("step {i} altered existing coefficients")));
        }
        if design.is_deterministic() && s.min_cut >= code.rate && !s.report.all_decoded() {
            return Err(Failure::Undecodable(format!("step {i} is not decodable despite min-cut {}", s.min_cut)));
        }
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> Outcome {
    match &cli.cmd {
        c @ Cmd::Gen { .. } => cmd_gen(c),
        Cmd::Transform { net, out } => {
            let vg = VirtualGraph::transform(&load_network(net)?);
            emit(&vg.to_json(), out.as_deref())?;
            Ok(0)
        }
        Cmd::Run { net, code, messages, out } => cmd_run(net, code, messages.as_deref(), out.as_deref()),
        Cmd::Montecarlo { net, code, trials, csv, summary } => cmd_montecarlo(net, code, *trials, csv, summary),
        Cmd::Szcheck { instances, trials, seed, out } => cmd_szcheck(*instances, *trials, *seed, out.as_deref()),
        Cmd::Churn { net, script, code, out } => cmd_churn(net, script, code, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
