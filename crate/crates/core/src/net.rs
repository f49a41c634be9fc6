//! The majority-inverter network: node arena, complemented edges, structural
//! hashing and cost metrics.
//!
//! Nodes are immutable once created. Every majority node only references
//! nodes with a smaller identifier, so identifier order is a topological
//! order and the arena can never contain a cycle. Rewrites build new nodes
//! and redirect references with [`Network::substitute`]; nodes that become
//! unreachable stay in the arena until [`Network::compact`] is called.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Not;

use thiserror::Error;

use crate::trace::{RuleTag, TraceEvent};

/// Largest majority arity accepted unless configured otherwise.
pub const DEFAULT_MAX_ARITY: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    /// The single constant-zero node every network owns.
    pub const CONST0: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_index(i: usize) -> NodeId {
        NodeId(u32::try_from(i).expect("network exceeds u32 nodes"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// A reference to a node together with a complementation flag.
///
/// The derived ordering (node first, then flag) is the canonical child order
/// used for structural hashing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    node: NodeId,
    complemented: bool,
}

impl Edge {
    pub const ZERO: Edge = Edge { node: NodeId::CONST0, complemented: false };
    pub const ONE: Edge = Edge { node: NodeId::CONST0, complemented: true };

    pub fn new(node: NodeId, complemented: bool) -> Edge {
        Edge { node, complemented }
    }

    pub fn node(self) -> NodeId {
        self.node
    }

    pub fn is_complemented(self) -> bool {
        self.complemented
    }

    pub fn negate(self) -> Edge {
        Edge { node: self.node, complemented: !self.complemented }
    }

    /// Complement the edge when `flag` is set.
    pub fn xor(self, flag: bool) -> Edge {
        Edge { node: self.node, complemented: self.complemented ^ flag }
    }

    pub fn is_constant(self) -> bool {
        self.node == NodeId::CONST0
    }
}

impl From<NodeId> for Edge {
    fn from(node: NodeId) -> Edge {
        Edge::new(node, false)
    }
}

impl Not for Edge {
    type Output = Edge;

    fn not(self) -> Edge {
        self.negate()
    }
}

/// Complement an edge. `negate(negate(e)) == e`.
pub fn negate(e: Edge) -> Edge {
    e.negate()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    ConstZero,
    Input(String),
    /// Majority of an odd number (at least three) of children, kept in
    /// canonical order. Repeated children each count as one vote.
    Maj(Vec<Edge>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetError {
    #[error("input `{0}` is already declared")]
    DuplicateInput(String),
    #[error("unknown input `{0}`")]
    UnknownInput(String),
    #[error("majority arity {arity} is invalid (must be odd, at least 3 and at most {max})")]
    Arity { arity: usize, max: usize },
    #[error("edge refers to missing node {0}")]
    DanglingEdge(NodeId),
    #[error("maximum arity {0} must be odd and at least 3")]
    InvalidMaxArity(usize),
    #[error("network invariant violated: {0}")]
    Invariant(String),
}

/// Cost of the cone reachable from a set of roots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CostMetrics {
    /// Number of reachable majority nodes.
    pub size: usize,
    /// Longest root-to-input path counted in majority nodes.
    pub depth: usize,
    /// Sum of arities of reachable majority nodes.
    pub fanin_sum: usize,
    /// Complemented edges between reachable nodes, root edges included.
    /// Complemented constants are not inverters and are not counted.
    pub inverter_count: usize,
    pub size_times_inv: usize,
}

impl fmt::Display for CostMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "size={} depth={} fanin={} inverters={} size*inv={}",
            self.size, self.depth, self.fanin_sum, self.inverter_count, self.size_times_inv
        )
    }
}

#[derive(Clone, Debug)]
pub struct Network {
    nodes: Vec<Node>,
    inputs: Vec<NodeId>,
    input_index: HashMap<String, NodeId>,
    outputs: Vec<(String, Edge)>,
    strash: HashMap<Vec<Edge>, NodeId>,
    max_arity: usize,
    trace: Option<Vec<TraceEvent>>,
}

impl Default for Network {
    fn default() -> Self {
        Network::new()
    }
}

fn check_max_arity(max: usize) -> Result<(), NetError> {
    if max < 3 || max.is_multiple_of(2) {
        return Err(NetError::InvalidMaxArity(max));
    }
    Ok(())
}

impl Network {
    pub fn new() -> Network {
        Network {
            nodes: vec![Node::ConstZero],
            inputs: Vec::new(),
            input_index: HashMap::new(),
            outputs: Vec::new(),
            strash: HashMap::new(),
            max_arity: DEFAULT_MAX_ARITY,
            trace: None,
        }
    }

    pub fn with_max_arity(max_arity: usize) -> Result<Network, NetError> {
        check_max_arity(max_arity)?;
        Ok(Network { max_arity, ..Network::new() })
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    /// Raise or lower the arity cap. Existing nodes are not checked.
    pub fn set_max_arity(&mut self, max_arity: usize) -> Result<(), NetError> {
        check_max_arity(max_arity)?;
        self.max_arity = max_arity;
        Ok(())
    }

    pub fn constant(&self, value: bool) -> Edge {
        if value {
            Edge::ONE
        } else {
            Edge::ZERO
        }
    }

    /// Declare a new primary input. Inputs keep declaration order.
    pub fn add_input(&mut self, name: &str) -> Result<Edge, NetError> {
        if self.input_index.contains_key(name) {
            return Err(NetError::DuplicateInput(name.to_string()));
        }
        let id = self.push(Node::Input(name.to_string()));
        self.inputs.push(id);
        self.input_index.insert(name.to_string(), id);
        Ok(id.into())
    }

    /// Existing input with this name, or a freshly declared one.
    pub fn input_or_add(&mut self, name: &str) -> Edge {
        match self.input(name) {
            Some(e) => e,
            None => self.add_input(name).expect("name checked above"),
        }
    }

    pub fn input(&self, name: &str) -> Option<Edge> {
        self.input_index.get(name).map(|&id| id.into())
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn input_names(&self) -> impl Iterator<Item = &str> + '_ {
        self.inputs.iter().map(move |&id| self.input_name(id).expect("inputs are Input nodes"))
    }

    pub fn input_name(&self, id: NodeId) -> Option<&str> {
        match self.nodes.get(id.index()) {
            Some(Node::Input(name)) => Some(name),
            _ => None,
        }
    }

    /// Position of an input in declaration order.
    pub fn input_position(&self, id: NodeId) -> Option<usize> {
        self.inputs.iter().position(|&i| i == id)
    }

    pub fn outputs(&self) -> &[(String, Edge)] {
        &self.outputs
    }

    pub fn output(&self, name: &str) -> Option<Edge> {
        self.outputs.iter().find(|(n, _)| n == name).map(|&(_, e)| e)
    }

    pub fn output_edges(&self) -> Vec<Edge> {
        self.outputs.iter().map(|&(_, e)| e).collect()
    }

    pub fn add_output(&mut self, name: &str, edge: Edge) -> Result<(), NetError> {
        self.check_edge(edge)?;
        self.outputs.push((name.to_string(), edge));
        Ok(())
    }

    pub fn set_output_edge(&mut self, index: usize, edge: Edge) -> Result<(), NetError> {
        self.check_edge(edge)?;
        self.outputs[index].1 = edge;
        Ok(())
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    /// Number of arena slots, dead nodes included.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_maj(&self, id: NodeId) -> bool {
        matches!(self.node(id), Node::Maj(_))
    }

    pub fn is_input(&self, id: NodeId) -> bool {
        matches!(self.node(id), Node::Input(_))
    }

    /// Children of a majority node; empty for inputs and the constant.
    pub fn children(&self, id: NodeId) -> &[Edge] {
        match self.node(id) {
            Node::Maj(ch) => ch,
            _ => &[],
        }
    }

    pub fn arity(&self, id: NodeId) -> usize {
        self.children(id).len()
    }

    fn push(&mut self, node: Node) -> NodeId {
        let id = NodeId::from_index(self.nodes.len());
        self.nodes.push(node);
        id
    }

    pub fn check_edge(&self, e: Edge) -> Result<(), NetError> {
        if e.node().index() < self.nodes.len() {
            Ok(())
        } else {
            Err(NetError::DanglingEdge(e.node()))
        }
    }

    fn check_children(&self, children: &[Edge]) -> Result<(), NetError> {
        let n = children.len();
        if n < 3 || n.is_multiple_of(2) || n > self.max_arity {
            return Err(NetError::Arity { arity: n, max: self.max_arity });
        }
        children.iter().try_for_each(|&e| self.check_edge(e))
    }

    /// Majority node over `children`, structurally hashed, with no
    /// simplification. The children are stored in canonical order.
    pub fn make_maj_exact(&mut self, children: &[Edge]) -> Result<Edge, NetError> {
        self.check_children(children)?;
        let mut key = children.to_vec();
        key.sort_unstable();
        Ok(self.hashed(key))
    }

    fn hashed(&mut self, sorted: Vec<Edge>) -> Edge {
        if let Some(&id) = self.strash.get(&sorted) {
            return id.into();
        }
        let id = self.push(Node::Maj(sorted.clone()));
        self.strash.insert(sorted, id);
        id.into()
    }

    /// Majority node over `children`.
    ///
    /// Before hashing, the two majority reductions are applied greedily: a
    /// child occurring at least ⌈n/2⌉ times is returned directly, and a
    /// complementary pair (including a 0/1 constant pair) is removed. The
    /// result may therefore be an existing node or a plain input edge.
    pub fn make_maj(&mut self, children: &[Edge]) -> Result<Edge, NetError> {
        self.check_children(children)?;
        let mut ch = children.to_vec();
        ch.sort_unstable();
        loop {
            if ch.len() == 1 {
                return Ok(ch[0]);
            }
            if let Some(e) = threshold_edge(&ch) {
                if self.trace.is_some() {
                    let detail =
                        format!("{} reaches threshold in {}", self.edge_label(e), self.list_label(&ch));
                    self.record(RuleTag::MajThreshold, None, detail);
                }
                return Ok(e);
            }
            match complementary_pair(&ch) {
                Some(i) => {
                    if self.trace.is_some() {
                        let detail = format!(
                            "annihilate {}/{} in {}",
                            self.edge_label(ch[i]),
                            self.edge_label(ch[i + 1]),
                            self.list_label(&ch)
                        );
                        self.record(RuleTag::MajAnnihilate, None, detail);
                    }
                    ch.drain(i..i + 2);
                }
                None => break,
            }
        }
        Ok(self.hashed(ch))
    }

    /// a ∧ b as an n-ary majority: ⌊n/2⌋ zeros, `a`, `b`, and copies of `a`
    /// to fill the remaining slots.
    pub fn emulate_and(&mut self, a: Edge, b: Edge, n: usize) -> Result<Edge, NetError> {
        self.emulate_padded(a, b, n, Edge::ZERO)
    }

    /// a ∨ b as an n-ary majority padded with ⌊n/2⌋ ones.
    pub fn emulate_or(&mut self, a: Edge, b: Edge, n: usize) -> Result<Edge, NetError> {
        self.emulate_padded(a, b, n, Edge::ONE)
    }

    fn emulate_padded(&mut self, a: Edge, b: Edge, n: usize, pad: Edge) -> Result<Edge, NetError> {
        if n < 3 || n.is_multiple_of(2) || n > self.max_arity {
            return Err(NetError::Arity { arity: n, max: self.max_arity });
        }
        let mut ch = vec![pad; n / 2];
        ch.push(a);
        ch.push(b);
        while ch.len() < n {
            ch.push(a);
        }
        self.make_maj_exact(&ch)
    }

    /// Nodes reachable from `roots`, children before parents.
    pub fn cone(&self, roots: &[Edge]) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = roots.iter().map(|e| e.node()).collect();
        let mut out = Vec::new();
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.index()], true) {
                continue;
            }
            out.push(id);
            stack.extend(self.children(id).iter().map(|e| e.node()));
        }
        out.sort_unstable();
        out
    }

    /// Majority nodes reachable from `roots`, children before parents.
    pub fn maj_cone(&self, roots: &[Edge]) -> Vec<NodeId> {
        let mut cone = self.cone(roots);
        cone.retain(|&id| self.is_maj(id));
        cone
    }

    /// Inputs reachable from `roots`, in declaration order.
    pub fn support(&self, roots: &[Edge]) -> Vec<NodeId> {
        let reach: HashSet<NodeId> = self.cone(roots).into_iter().collect();
        self.inputs.iter().copied().filter(|i| reach.contains(i)).collect()
    }

    /// True if `node` lies in the cone of `root`.
    pub fn depends_on(&self, root: Edge, node: NodeId) -> bool {
        if root.node() < node {
            return false;
        }
        self.cone(&[root]).binary_search(&node).is_ok()
    }

    pub fn metrics(&self, roots: &[Edge]) -> CostMetrics {
        let cone = self.cone(roots);
        let mut level = vec![0usize; self.nodes.len()];
        let mut m = CostMetrics::default();
        for &id in &cone {
            if let Node::Maj(ch) = self.node(id) {
                m.size += 1;
                m.fanin_sum += ch.len();
                m.inverter_count += ch.iter().filter(|e| e.is_complemented() && !e.is_constant()).count();
                level[id.index()] = 1 + ch.iter().map(|e| level[e.node().index()]).max().unwrap_or(0);
            }
        }
        m.inverter_count += roots.iter().filter(|e| e.is_complemented() && !e.is_constant()).count();
        m.depth = roots.iter().map(|e| level[e.node().index()]).max().unwrap_or(0);
        m.size_times_inv = m.size * m.inverter_count;
        m
    }

    /// Metrics over the cone of all outputs.
    pub fn output_metrics(&self) -> CostMetrics {
        self.metrics(&self.output_edges())
    }

    /// Number of majority nodes on the longest path from `input` to `root`;
    /// `None` if `root` does not depend on `input`.
    pub fn path_depth_from(&self, root: Edge, input: NodeId) -> Option<usize> {
        let mut depth: HashMap<NodeId, usize> = HashMap::new();
        depth.insert(input, 0);
        for id in self.cone(&[root]) {
            if id == input {
                continue;
            }
            let best = self.children(id).iter().filter_map(|e| depth.get(&e.node())).max().copied();
            if let Some(d) = best {
                depth.insert(id, d + 1);
            }
        }
        depth.get(&root.node()).copied()
    }

    /// Short label: input name, `0`/`1`, or the node id, with `!` for
    /// complemented edges.
    pub fn edge_label(&self, e: Edge) -> String {
        let base = match self.node(e.node()) {
            Node::ConstZero => return if e.is_complemented() { "1".into() } else { "0".into() },
            Node::Input(name) => name.clone(),
            Node::Maj(_) => e.node().to_string(),
        };
        if e.is_complemented() {
            format!("!{base}")
        } else {
            base
        }
    }

    fn list_label(&self, ch: &[Edge]) -> String {
        let parts: Vec<String> = ch.iter().map(|&e| self.edge_label(e)).collect();
        format!("M{}({})", ch.len(), parts.join(","))
    }

    /// One-level description of a node, e.g. `M3(a,!b,n7)`.
    pub fn node_label(&self, id: NodeId) -> String {
        match self.node(id) {
            Node::Maj(ch) => self.list_label(ch),
            _ => self.edge_label(id.into()),
        }
    }

    /// Rebuild the cones of `roots` with every node in `map` replaced by
    /// its image. Images are used as given and are not themselves
    /// rewritten. Rebuilt nodes go through [`Network::make_maj`].
    pub fn rebuild(&mut self, roots: &[Edge], map: &HashMap<NodeId, Edge>) -> Result<Vec<Edge>, NetError> {
        let cone = self.cone(roots);
        let mut image: HashMap<NodeId, Edge> = HashMap::with_capacity(cone.len());
        for id in cone {
            let new = if let Some(&e) = map.get(&id) {
                e
            } else if let Node::Maj(ch) = self.node(id) {
                let mut changed = false;
                let ch: Vec<Edge> = ch
                    .iter()
                    .map(|&c| match image.get(&c.node()) {
                        Some(&img) if img != Edge::from(c.node()) => {
                            changed = true;
                            img.xor(c.is_complemented())
                        }
                        _ => c,
                    })
                    .collect();
                if changed {
                    self.make_maj(&ch)?
                } else {
                    id.into()
                }
            } else {
                id.into()
            };
            image.insert(id, new);
        }
        Ok(roots.iter().map(|r| image[&r.node()].xor(r.is_complemented())).collect())
    }

    /// Redirect every reference to `old` (from outputs, through rebuilt
    /// fanout cones) to `new`.
    pub fn substitute(&mut self, old: NodeId, new: Edge) -> Result<(), NetError> {
        self.check_edge(new)?;
        let map = HashMap::from([(old, new)]);
        self.substitute_many(&map)
    }

    pub fn substitute_many(&mut self, map: &HashMap<NodeId, Edge>) -> Result<(), NetError> {
        let roots = self.output_edges();
        let new_roots = self.rebuild(&roots, map)?;
        for (slot, e) in self.outputs.iter_mut().zip(new_roots) {
            slot.1 = e;
        }
        Ok(())
    }

    /// Rebuild every reachable node through [`Network::make_maj`], applying
    /// the threshold and annihilation reductions everywhere.
    pub fn resimplify(&mut self) -> Result<(), NetError> {
        let roots = self.output_edges();
        let cone = self.maj_cone(&roots);
        let mut image: HashMap<NodeId, Edge> = HashMap::new();
        for id in cone {
            let ch: Vec<Edge> = self
                .children(id)
                .iter()
                .map(|&c| image.get(&c.node()).map_or(c, |img| img.xor(c.is_complemented())))
                .collect();
            let e = self.make_maj(&ch)?;
            image.insert(id, e);
        }
        for slot in self.outputs.iter_mut() {
            if let Some(img) = image.get(&slot.1.node()) {
                slot.1 = img.xor(slot.1.is_complemented());
            }
        }
        Ok(())
    }

    /// Copy of the network holding only the nodes reachable from outputs.
    /// Inputs (all of them, in order), outputs, the arity cap and the
    /// tracing mode are preserved.
    pub fn compact(&self) -> Network {
        let (net, _) = self.compact_with_roots(&[]);
        net
    }

    /// Like [`Network::compact`], additionally keeping the cones of `extra`
    /// roots alive and returning their images.
    pub fn compact_with_roots(&self, extra: &[Edge]) -> (Network, Vec<Edge>) {
        let mut net = Network { max_arity: self.max_arity, ..Network::new() };
        if self.trace.is_some() {
            net.trace = Some(Vec::new());
        }
        let mut image: HashMap<NodeId, Edge> = HashMap::new();
        image.insert(NodeId::CONST0, Edge::ZERO);
        for &id in &self.inputs {
            let name = self.input_name(id).expect("inputs are Input nodes");
            image.insert(id, net.add_input(name).expect("names are unique"));
        }
        let mut roots = self.output_edges();
        roots.extend_from_slice(extra);
        for id in self.maj_cone(&roots) {
            let ch: Vec<Edge> =
                self.children(id).iter().map(|c| image[&c.node()].xor(c.is_complemented())).collect();
            let e = net.make_maj_exact(&ch).expect("copied node is well-formed");
            image.insert(id, e);
        }
        let map = |e: &Edge| image[&e.node()].xor(e.is_complemented());
        for (name, e) in &self.outputs {
            net.outputs.push((name.clone(), map(e)));
        }
        let extra = extra.iter().map(map).collect();
        (net, extra)
    }

    /// Copy `root`'s cone from `other` into this network, matching inputs by
    /// name (declaring missing ones).
    pub fn import_cone(&mut self, other: &Network, root: Edge) -> Result<Edge, NetError> {
        let mut image: HashMap<NodeId, Edge> = HashMap::new();
        for id in other.cone(&[root]) {
            let e = match other.node(id) {
                Node::ConstZero => Edge::ZERO,
                Node::Input(name) => self.input_or_add(name),
                Node::Maj(ch) => {
                    let ch: Vec<Edge> = ch.iter().map(|c| image[&c.node()].xor(c.is_complemented())).collect();
                    self.make_maj_exact(&ch)?
                }
            };
            image.insert(id, e);
        }
        Ok(image[&root.node()].xor(root.is_complemented()))
    }

    /// Verify the structural invariants: a single constant node, odd
    /// arities of at least three, children referencing earlier nodes, and
    /// inputs/outputs referencing live nodes.
    pub fn check_invariants(&self) -> Result<(), NetError> {
        let bad = |msg: String| Err(NetError::Invariant(msg));
        if self.nodes.first() != Some(&Node::ConstZero) {
            return bad("node 0 is not the constant".into());
        }
        for (i, node) in self.nodes.iter().enumerate().skip(1) {
            match node {
                Node::ConstZero => return bad(format!("second constant at n{i}")),
                Node::Input(_) => {}
                Node::Maj(ch) => {
                    if ch.len() < 3 || ch.len() % 2 == 0 {
                        return bad(format!("n{i} has arity {}", ch.len()));
                    }
                    if ch.iter().any(|e| e.node().index() >= i) {
                        return bad(format!("n{i} references a later node"));
                    }
                    if ch.windows(2).any(|w| w[0] > w[1]) {
                        return bad(format!("n{i} children are not canonical"));
                    }
                }
            }
        }
        if let Some(&id) = self.inputs.iter().find(|&&id| !self.is_input(id)) {
            return bad(format!("{id} listed as input is not an input"));
        }
        for (_, e) in &self.outputs {
            self.check_edge(*e)?;
        }
        Ok(())
    }

    pub fn enable_trace(&mut self) {
        if self.trace.is_none() {
            self.trace = Some(Vec::new());
        }
    }

    pub fn tracing(&self) -> bool {
        self.trace.is_some()
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        self.trace.as_mut().map(std::mem::take).unwrap_or_default()
    }

    pub fn record(&mut self, rule: RuleTag, node: Option<NodeId>, detail: String) {
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceEvent { rule, node, detail });
        }
    }
}

/// An edge occurring at least ⌈n/2⌉ times in a canonically sorted list.
pub(crate) fn threshold_edge(sorted: &[Edge]) -> Option<Edge> {
    let need = sorted.len().div_ceil(2);
    let mut run = 0;
    for (i, &e) in sorted.iter().enumerate() {
        run = if i > 0 && sorted[i - 1] == e { run + 1 } else { 1 };
        if run >= need {
            return Some(e);
        }
    }
    None
}

/// Index `i` such that `sorted[i]` and `sorted[i + 1]` are complements.
pub(crate) fn complementary_pair(sorted: &[Edge]) -> Option<usize> {
    sorted.windows(2).position(|w| w[0].node() == w[1].node() && w[0].is_complemented() != w[1].is_complemented())
}
