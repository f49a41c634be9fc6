//! The `majn` command-line driver.
//!
//! Exit codes: 0 on success, 1 when the answer is negative (inequivalent,
//! unsatisfiable), 2 on usage, parse or I/O errors.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::frontend::{expr_network, export_dot, parse_expr, parse_netlist, save_netlist, write_netlist};
use crate::net::{Network, DEFAULT_MAX_ARITY};
use crate::optimize::{alg1_optimize, rebalance_late_input, OptimizeConfig, Target, Verification};
use crate::oracle::{check_equiv, check_self_dual, simulate, Equivalence};
use crate::sat::{classify_constants, solve};

pub const ARITY_ENV: &str = "MAJN_MAX_ARITY";

#[derive(Parser, Debug)]
#[command(name = "majn", version, about = "Majority-inverter network toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize a network for a cost target
    Optimize {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// size, depth, fanin or minv
        #[arg(long, default_value = "size")]
        target: Target,
        /// Largest majority arity (odd); defaults to $MAJN_MAX_ARITY or 9
        #[arg(long)]
        max_arity: Option<usize>,
        #[arg(long, default_value_t = 8)]
        effort: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print every rewrite applied
        #[arg(long)]
        trace: bool,
    },
    /// Check that two networks compute the same outputs
    CheckEquiv { a: PathBuf, b: PathBuf },
    /// Decide satisfiability of an output
    Sat {
        input: PathBuf,
        /// Print a satisfying assignment
        #[arg(long)]
        witness: bool,
        /// Output to check (default: the first)
        #[arg(long)]
        output: Option<String>,
        #[arg(long)]
        trace: bool,
    },
    /// Print metrics and truth tables
    Stats { input: PathBuf },
    /// Shorten the paths from a late-arriving input
    Rebalance {
        input: PathBuf,
        #[arg(long)]
        late: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Export Graphviz DOT
    Dot {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Parse `.mign` netlist text, or text holding a single majority expression
/// (exposed as output `f`).
pub fn parse_network(text: &str) -> Result<Network, String> {
    match parse_netlist(text) {
        Ok(net) => Ok(net),
        Err(netlist_err) => {
            let expr_text: String = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect::<Vec<_>>().join("\n");
            match parse_expr(&expr_text) {
                Ok(e) => expr_network(&e, "f").map_err(|e| e.to_string()),
                Err(_) => Err(netlist_err.to_string()),
            }
        }
    }
}

pub fn load_network(path: &Path) -> Result<Network, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_network(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn env_arity() -> Result<Option<usize>, String> {
    match std::env::var(ARITY_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| format!("{ARITY_ENV}: `{v}` is not a number")),
        Err(_) => Ok(None),
    }
}

fn write_or_print(net: &Network, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => save_netlist(net, p)?,
        None => print!("{}", write_netlist(net)),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Optimize { input, output, target, max_arity, effort, seed, trace } => {
            let net = load_network(&input)?;
            let max_arity = match max_arity {
                Some(n) => n,
                None => env_arity()?.unwrap_or(DEFAULT_MAX_ARITY),
            };
            let config = OptimizeConfig { target, max_arity, effort_rounds: effort, seed, trace };
            config.validate()?;
            let report = alg1_optimize(&net, &config);
            if trace {
                for ev in &report.trace {
                    println!("{ev}");
                }
            }
            if report.verification == Verification::Reverted {
                eprintln!("warning: optimized network failed verification; input kept");
            }
            println!("{target} {} -> {}", target.value(&report.before), target.value(&report.after));
            println!("before: {}", report.before);
            println!("after:  {}", report.after);
            if let Some(p) = output {
                save_netlist(&report.network, p)?;
            }
            Ok(0)
        }
        Command::CheckEquiv { a, b } => {
            let na = load_network(&a)?;
            let nb = load_network(&b)?;
            let mut names_a: Vec<&str> = na.outputs().iter().map(|(n, _)| n.as_str()).collect();
            let mut names_b: Vec<&str> = nb.outputs().iter().map(|(n, _)| n.as_str()).collect();
            names_a.sort_unstable();
            names_b.sort_unstable();
            if names_a != names_b {
                return Err(Failure(format!("output names differ: {names_a:?} vs {names_b:?}")));
            }
            for (name, ea) in na.outputs() {
                let eb = nb.output(name).expect("same output names");
                if let Equivalence::Counterexample(cex) = check_equiv(&na, *ea, &nb, eb)? {
                    let cex: Vec<String> = cex.iter().map(|(n, v)| format!("{n}={}", u8::from(*v))).collect();
                    println!("not equivalent: output {name} differs at {}", cex.join(" "));
                    return Ok(1);
                }
            }
            println!("equivalent");
            Ok(0)
        }
        Command::Sat { input, witness, output, trace } => {
            let net = load_network(&input)?;
            let root = match &output {
                Some(name) => net.output(name).ok_or_else(|| Failure(format!("no output named `{name}`")))?,
                None => net.outputs().first().map(|o| o.1).ok_or_else(|| Failure("network has no outputs".into()))?,
            };
            let result = solve(&net, root);
            if trace {
                for ev in &result.trace {
                    println!("c {ev}");
                }
            }
            let s = result.stats;
            println!("c branches={} simplifications={} simulations={}", s.branches, s.simplifications, s.simulations);
            print!("{}", result.report(witness));
            Ok(if result.is_sat() { 0 } else { 1 })
        }
        Command::Stats { input } => {
            let net = load_network(&input)?;
            let names: Vec<&str> = net.input_names().collect();
            println!("inputs:  {} ({})", names.len(), names.join(" "));
            println!("outputs: {}", net.outputs().len());
            println!("{}", net.output_metrics());
            for (name, e) in net.outputs() {
                let class = classify_constants(&net, *e);
                let m = net.metrics(&[*e]);
                print!("{name}: size={} depth={} {class}", m.size, m.depth);
                if net.inputs().len() <= 16 {
                    let t = simulate(&net, *e)?;
                    print!(" table={} self-dual={}", t.to_hex(), check_self_dual(&net, *e)?);
                }
                println!();
            }
            Ok(0)
        }
        Command::Rebalance { input, late, output } => {
            let mut net = load_network(&input)?;
            for i in 0..net.outputs().len() {
                let (name, root) = net.outputs()[i].clone();
                let r = rebalance_late_input(&net, root, &late)?;
                println!("{name}: late-input depth {} -> {}", r.before, r.after);
                net = r.network;
            }
            write_or_print(&net, output.as_deref())?;
            Ok(0)
        }
        Command::Dot { input, output } => {
            let net = load_network(&input)?;
            export_dot(&net, output)?;
            Ok(0)
        }
    }
}

/// Run the CLI on `args` (including the program name) and return the exit
/// code.
pub fn cli_main(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
