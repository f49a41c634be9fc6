//! The `.mign` netlist format.
//!
//! ```text
//! # full adder
//! .inputs a b cin
//! .outputs sum=n2 cout=n1
//! n1 = MAJ(a, b, cin)
//! n2 = MAJ(a, !n1, !n1, b, cin)
//! ```
//!
//! * `#` starts a comment; blank lines are ignored.
//! * `.inputs` declares inputs in order; it may be repeated.
//! * `.outputs` lists `name=edge` pairs; it may be repeated.
//! * A node line is `label = MAJ(edge, ...)` with an odd number (≥ 3) of
//!   operands. Node lines may appear in any order.
//! * An edge is an input or node label, `0` or `1`, optionally preceded by
//!   `!` (or `¬`) for complementation.
//! * `.model` and `.end` lines are accepted and ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::expr::{is_ident, Cursor};
use super::FrontendError;
use crate::net::{Edge, Network, Node, NodeId};

#[derive(Clone, Debug)]
struct EdgeRef {
    name: String,
    negated: bool,
    line: usize,
    column: usize,
}

struct NodeDef {
    args: Vec<EdgeRef>,
    line: usize,
}

fn parse_edge(cur: &mut Cursor) -> Result<EdgeRef, FrontendError> {
    let negs = cur.negations();
    let (line, column) = cur.position();
    match cur.word() {
        Some(w) if w == "0" || w == "1" || is_ident(&w) => Ok(EdgeRef { name: w, negated: negs % 2 == 1, line, column }),
        Some(w) => Err(cur.syntax(format!("invalid edge `{w}`")).into()),
        None => Err(cur.syntax("expected an edge").into()),
    }
}

/// Parse `.mign` text into a network. Nodes are created exactly as written
/// (hashed, not simplified).
pub fn parse_netlist(text: &str) -> Result<Network, FrontendError> {
    let mut inputs: Vec<(String, usize)> = Vec::new();
    let mut outputs: Vec<(String, EdgeRef)> = Vec::new();
    let mut defs: HashMap<String, NodeDef> = HashMap::new();
    let mut def_order: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::at(content, line_no, 1);
        if cur.eat('.') {
            let directive = cur.word().unwrap_or_default();
            match directive.as_str() {
                "inputs" => {
                    while let Some(w) = cur.word() {
                        if !is_ident(&w) {
                            return Err(cur.syntax(format!("invalid input name `{w}`")).into());
                        }
                        inputs.push((w, line_no));
                    }
                }
                "outputs" => {
                    while !cur.at_end() {
                        let name = match cur.word() {
                            Some(w) if is_ident(&w) => w,
                            _ => return Err(cur.syntax("expected output name").into()),
                        };
                        cur.expect('=')?;
                        outputs.push((name, parse_edge(&mut cur)?));
                    }
                }
                "model" | "end" => continue,
                other => return Err(cur.syntax(format!("unknown directive `.{other}`")).into()),
            }
            if !cur.at_end() {
                return Err(cur.syntax("unexpected trailing text").into());
            }
            continue;
        }
        let label = match cur.word() {
            Some(w) if is_ident(&w) => w,
            _ => return Err(cur.syntax("expected a node label or directive").into()),
        };
        cur.expect('=')?;
        match cur.word() {
            Some(w) if w == "MAJ" => {}
            _ => return Err(cur.syntax("expected `MAJ(`").into()),
        }
        cur.expect('(')?;
        let mut args = vec![parse_edge(&mut cur)?];
        while cur.eat(',') {
            args.push(parse_edge(&mut cur)?);
        }
        cur.expect(')')?;
        if !cur.at_end() {
            return Err(cur.syntax("unexpected trailing text").into());
        }
        if defs.contains_key(&label) {
            return Err(FrontendError::Netlist { line: line_no, message: format!("node `{label}` defined twice") });
        }
        def_order.push(label.clone());
        defs.insert(label, NodeDef { args, line: line_no });
    }

    let max_arity = defs.values().map(|d| d.args.len()).max().unwrap_or(0);
    let mut net = Network::new();
    if max_arity > net.max_arity() && max_arity % 2 == 1 {
        net.set_max_arity(max_arity)?;
    }
    for (name, line) in &inputs {
        if defs.contains_key(name) {
            return Err(FrontendError::Netlist { line: *line, message: format!("`{name}` is both an input and a node") });
        }
        net.add_input(name).map_err(|e| FrontendError::Netlist { line: *line, message: e.to_string() })?;
    }

    let mut built: HashMap<String, Edge> = HashMap::new();
    for label in &def_order {
        resolve(&mut net, &defs, &mut built, label)?;
    }
    for (name, r) in &outputs {
        let e = edge_of(&net, &built, r)?;
        net.add_output(name, e)?;
    }
    Ok(net)
}

fn edge_of(net: &Network, built: &HashMap<String, Edge>, r: &EdgeRef) -> Result<Edge, FrontendError> {
    let base = match r.name.as_str() {
        "0" => Edge::ZERO,
        "1" => Edge::ONE,
        name => match net.input(name).or_else(|| built.get(name).copied()) {
            Some(e) => e,
            None => {
                return Err(FrontendError::Dangling { name: name.to_string(), line: r.line, column: r.column });
            }
        },
    };
    Ok(base.xor(r.negated))
}

/// Build `label` after its operands, detecting cycles with an explicit
/// DFS stack.
fn resolve(
    net: &mut Network,
    defs: &HashMap<String, NodeDef>,
    built: &mut HashMap<String, Edge>,
    label: &str,
) -> Result<(), FrontendError> {
    let mut on_stack: Vec<String> = Vec::new();
    let mut stack: Vec<(String, bool)> = vec![(label.to_string(), false)];
    while let Some((name, expanded)) = stack.pop() {
        if built.contains_key(&name) {
            continue;
        }
        let def = &defs[&name];
        if expanded {
            let ch = def.args.iter().map(|r| edge_of(net, built, r)).collect::<Result<Vec<_>, _>>()?;
            let e = net
                .make_maj_exact(&ch)
                .map_err(|err| FrontendError::Netlist { line: def.line, message: err.to_string() })?;
            built.insert(name.clone(), e);
            on_stack.retain(|n| n != &name);
            continue;
        }
        if on_stack.contains(&name) {
            return Err(FrontendError::Cycle { name, line: def.line });
        }
        on_stack.push(name.clone());
        stack.push((name.clone(), true));
        for r in &def.args {
            if net.input(&r.name).is_some() || built.contains_key(&r.name) || r.name == "0" || r.name == "1" {
                continue;
            }
            if !defs.contains_key(&r.name) {
                return Err(FrontendError::Dangling { name: r.name.clone(), line: r.line, column: r.column });
            }
            if on_stack.contains(&r.name) {
                return Err(FrontendError::Cycle { name: r.name.clone(), line: def.line });
            }
            stack.push((r.name.clone(), false));
        }
    }
    Ok(())
}

pub fn load_netlist(path: impl AsRef<Path>) -> Result<Network, FrontendError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| FrontendError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_netlist(&text)
}

/// Serialize the nodes reachable from the outputs. Labels are regenerated
/// in topological order.
pub fn write_netlist(net: &Network) -> String {
    let names: Vec<&str> = net.input_names().collect();
    let mut prefix = String::from("n");
    while names.iter().any(|n| n.strip_prefix(prefix.as_str()).is_some_and(|r| r.chars().all(|c| c.is_ascii_digit()))) {
        prefix.insert(0, '_');
    }
    let cone = net.maj_cone(&net.output_edges());
    let labels: HashMap<NodeId, String> =
        cone.iter().enumerate().map(|(i, &id)| (id, format!("{prefix}{}", i + 1))).collect();
    let edge = |e: Edge| -> String {
        let base = match net.node(e.node()) {
            Node::ConstZero => return if e.is_complemented() { "1".into() } else { "0".into() },
            Node::Input(name) => name.clone(),
            Node::Maj(_) => labels[&e.node()].clone(),
        };
        if e.is_complemented() {
            format!("!{base}")
        } else {
            base
        }
    };

    let mut out = String::new();
    if !names.is_empty() {
        let _ = writeln!(out, ".inputs {}", names.join(" "));
    }
    if !net.outputs().is_empty() {
        let outs: Vec<String> = net.outputs().iter().map(|(n, e)| format!("{n}={}", edge(*e))).collect();
        let _ = writeln!(out, ".outputs {}", outs.join(" "));
    }
    for id in cone {
        let args: Vec<String> = net.children(id).iter().map(|&c| edge(c)).collect();
        let _ = writeln!(out, "{} = MAJ({})", labels[&id], args.join(", "));
    }
    out
}

pub fn save_netlist(net: &Network, path: impl AsRef<Path>) -> Result<(), FrontendError> {
    std::fs::write(path.as_ref(), write_netlist(net))
        .map_err(|e| FrontendError::Io(format!("{}: {e}", path.as_ref().display())))
}
