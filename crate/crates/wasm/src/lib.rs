//! Browser bindings for the `majn` toolkit.
//!
//! Every export takes netlist or expression text and returns a JSON string.
//! Failures come back as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use majn::cli::parse_network;
use majn::frontend::{to_dot, write_netlist};
use majn::optimize::{alg1_optimize, OptimizeConfig, Target};
use majn::oracle::{is_self_dual, simulate};
use majn::sat::{classify_constants, solve, SatStatus};
use majn::{CostMetrics, Network};

#[derive(Serialize)]
struct Metrics {
    size: usize,
    depth: usize,
    fanin: usize,
    inverters: usize,
}

impl From<CostMetrics> for Metrics {
    fn from(m: CostMetrics) -> Self {
        Metrics { size: m.size, depth: m.depth, fanin: m.fanin_sum, inverters: m.inverter_count }
    }
}

#[derive(Serialize)]
struct OutputInfo {
    name: String,
    size: usize,
    depth: usize,
    constants: String,
    table: Option<String>,
    self_dual: Option<bool>,
}

#[derive(Serialize)]
struct Analysis {
    inputs: Vec<String>,
    metrics: Metrics,
    outputs: Vec<OutputInfo>,
    dot: String,
}

#[derive(Serialize)]
struct Optimized {
    target: String,
    before: Metrics,
    after: Metrics,
    moves: usize,
    trace: Vec<String>,
    netlist: String,
    dot: String,
}

#[derive(Serialize)]
struct Satisfiability {
    output: String,
    satisfiable: bool,
    witness: Option<Vec<(String, bool)>>,
    branches: usize,
    trace: Vec<String>,
}

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn json<T: Serialize>(r: Result<T, String>) -> String {
    let out = match r {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    };
    out.expect("plain data serializes")
}

fn analysis(net: &Network) -> Result<Analysis, String> {
    let small = net.inputs().len() <= 16;
    let mut outputs = Vec::new();
    for (name, e) in net.outputs() {
        let m = net.metrics(&[*e]);
        let table = if small { Some(simulate(net, *e).map_err(|e| e.to_string())?) } else { None };
        outputs.push(OutputInfo {
            name: name.clone(),
            size: m.size,
            depth: m.depth,
            constants: classify_constants(net, *e).to_string(),
            self_dual: table.as_ref().map(is_self_dual),
            table: table.map(|t| t.to_hex()),
        });
    }
    Ok(Analysis {
        inputs: net.input_names().map(str::to_owned).collect(),
        metrics: net.output_metrics().into(),
        outputs,
        dot: to_dot(net),
    })
}

fn optimized(net: &Network, target: &str, max_arity: usize, seed: u64) -> Result<Optimized, String> {
    let target: Target = target.parse().map_err(|e: <Target as std::str::FromStr>::Err| e.to_string())?;
    let config = OptimizeConfig { target, max_arity, seed, ..OptimizeConfig::default() };
    config.validate().map_err(|e| e.to_string())?;
    let r = alg1_optimize(net, &config);
    Ok(Optimized {
        target: target.name().to_owned(),
        before: r.before.into(),
        after: r.after.into(),
        moves: r.moves,
        trace: r.trace.iter().map(ToString::to_string).collect(),
        netlist: write_netlist(&r.network),
        dot: to_dot(&r.network),
    })
}

fn satisfiability(net: &Network) -> Result<Satisfiability, String> {
    let (name, root) = net.outputs().first().cloned().ok_or("network has no outputs")?;
    let r = solve(net, root);
    Ok(Satisfiability {
        output: name,
        satisfiable: r.status == SatStatus::Sat,
        witness: r.witness,
        branches: r.stats.branches,
        trace: r.trace.iter().map(ToString::to_string).collect(),
    })
}

/// Metrics, truth tables and DOT for a network.
#[wasm_bindgen]
pub fn analyze(source: &str) -> String {
    json(parse_network(source).and_then(|n| analysis(&n)))
}

/// Optimize for `target` (size, depth, fanin or minv).
#[wasm_bindgen]
pub fn optimize(source: &str, target: &str, max_arity: usize, seed: u32) -> String {
    json(parse_network(source).and_then(|n| optimized(&n, target, max_arity, u64::from(seed))))
}

/// Satisfiability of the first output.
#[wasm_bindgen]
pub fn sat(source: &str) -> String {
    json(parse_network(source).and_then(|n| satisfiability(&n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const FULL_ADDER: &str = "\
.inputs a b cin
.outputs cout=m sum=s
m = MAJ(a, b, cin)
p = MAJ(!a, b, cin)
s = MAJ(a, !m, p)
";

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn analyze_full_adder() {
        let v = parse(analyze(FULL_ADDER));
        assert_eq!(v["metrics"]["size"], 3);
        assert_eq!(v["outputs"][0]["table"], "e8");
        assert_eq!(v["outputs"][1]["table"], "96");
        assert_eq!(v["outputs"][1]["self_dual"], true);
        assert!(v["dot"].as_str().unwrap().starts_with("digraph mig {"));
    }

    #[test]
    fn optimize_full_adder() {
        let v = parse(optimize(FULL_ADDER, "size", 9, 0));
        assert_eq!(v["before"]["size"], 3);
        assert_eq!(v["after"]["size"], 2);
        assert!(v["netlist"].as_str().unwrap().contains(".outputs"));
        let v = parse(optimize(FULL_ADDER, "speed", 9, 0));
        assert!(v["error"].is_string());
    }

    #[test]
    fn sat_expressions() {
        let v = parse(sat("M3(a, b, 0)"));
        assert_eq!(v["satisfiable"], true);
        assert_eq!(v["witness"], serde_json::json!([["a", true], ["b", true]]));
        let v = parse(sat("M5(M3(a,b,c), M5(M5(a,b,c,0,0),!b,c,0,0), !a, !b, 0)"));
        assert_eq!(v["satisfiable"], false);
        assert!(parse(sat("M3(a, b")).get("error").is_some());
    }
}
