//! Graphviz export. Complemented edges are dotted with a bubble arrowhead.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::FrontendError;
use crate::net::{Network, Node, NodeId};

pub fn to_dot(net: &Network) -> String {
    let roots = net.output_edges();
    let mut out_labels: HashMap<NodeId, Vec<String>> = HashMap::new();
    for (name, e) in net.outputs() {
        let label = if e.is_complemented() { format!("!{name}") } else { name.clone() };
        out_labels.entry(e.node()).or_default().push(label);
    }

    let mut s = String::from("digraph mig {\n");
    if !roots.is_empty() {
        s.push_str("  rankdir=BT;\n");
    }
    let cone = net.cone(&roots);
    for &id in &cone {
        let (label, shape) = match net.node(id) {
            Node::ConstZero => ("0".to_string(), "box"),
            Node::Input(name) => (name.clone(), "box"),
            Node::Maj(ch) => (format!("M{}", ch.len()), "circle"),
        };
        let _ = write!(s, "  {id} [label=\"{label}\", shape={shape}");
        if let Some(outs) = out_labels.get(&id) {
            let _ = write!(s, ", peripheries=2, xlabel=\"{}\"", outs.join(" "));
        }
        s.push_str("];\n");
    }
    for &id in &cone {
        for c in net.children(id) {
            let _ = write!(s, "  {} -> {id}", c.node());
            if c.is_complemented() {
                s.push_str(" [style=dotted, arrowhead=odot]");
            }
            s.push_str(";\n");
        }
    }
    s.push_str("}\n");
    s
}

pub fn export_dot(net: &Network, path: impl AsRef<Path>) -> Result<(), FrontendError> {
    std::fs::write(path.as_ref(), to_dot(net)).map_err(|e| FrontendError::Io(format!("{}: {e}", path.as_ref().display())))
}
