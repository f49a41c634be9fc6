//! Satisfiability of majority networks.
//!
//! [`solve`] simplifies with the majority and associativity rules, answers
//! directly when the cone is constant-free (such a function is self-dual,
//! hence never constant), and otherwise branches on the most frequent
//! variable.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::frontend::MajExpression;
use crate::net::{Edge, NetError, Network, Node, NodeId};
use crate::optimize::assoc_simplify;
use crate::oracle::evaluate;
use crate::trace::{RuleTag, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SatStats {
    pub branches: usize,
    pub simplifications: usize,
    pub simulations: usize,
}

#[derive(Clone, Debug)]
pub struct SatResult {
    pub status: SatStatus,
    /// Value of every declared input, in declaration order, when SAT.
    pub witness: Option<Vec<(String, bool)>>,
    pub stats: SatStats,
    pub trace: Vec<TraceEvent>,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        self.status == SatStatus::Sat
    }

    /// `s SATISFIABLE` / `s UNSATISFIABLE`, followed by `v name=0/1` lines
    /// when `witness` is set.
    pub fn report(&self, witness: bool) -> String {
        let mut out = String::new();
        match self.status {
            SatStatus::Sat => out.push_str("s SATISFIABLE\n"),
            SatStatus::Unsat => out.push_str("s UNSATISFIABLE\n"),
        }
        if witness {
            for (name, v) in self.witness.iter().flatten() {
                out.push_str(&format!("v {name}={}\n", u8::from(*v)));
            }
        }
        out
    }
}

/// Single-output copy of `root`'s cone declaring all of `net`'s inputs in
/// order.
fn isolate(net: &Network, root: Edge) -> Network {
    let mut w = Network::with_max_arity(net.max_arity()).expect("valid cap");
    for name in net.input_names() {
        w.add_input(name).expect("unique names");
    }
    let r = w.import_cone(net, root).expect("well-formed cone");
    w.add_output("f", r).expect("fresh output");
    w
}

fn has_constant(net: &Network, root: Edge) -> bool {
    net.cone(&[root]).binary_search(&NodeId::CONST0).is_ok()
}

fn named(net: &Network, values: &[bool]) -> Vec<(String, bool)> {
    net.input_names().map(String::from).zip(values.iter().copied()).collect()
}

/// Self-duality shortcut for constant-free cones: if the all-zero
/// assignment fails, its complement satisfies. `None` when a constant is
/// reachable.
pub fn constant_free_fast_path(net: &Network, root: Edge) -> Option<SatResult> {
    if has_constant(net, root) {
        return None;
    }
    let mut stats = SatStats::default();
    let mut values = vec![false; net.inputs().len()];
    stats.simulations += 1;
    if !evaluate(net, root, &values) {
        values.iter_mut().for_each(|v| *v = true);
        stats.simulations += 1;
        assert!(evaluate(net, root, &values), "constant-free function must be self-dual");
    }
    Some(SatResult { status: SatStatus::Sat, witness: Some(named(net, &values)), stats, trace: Vec::new() })
}

/// Replace input `var` by `value` in `root`'s cone and simplify. Returns a
/// single-output network (output `f`) and its root.
pub fn cofactor(net: &Network, root: Edge, var: &str, value: bool) -> Result<(Network, Edge), NetError> {
    let id = net.input(var).ok_or_else(|| NetError::UnknownInput(var.to_string()))?.node();
    let mut w = isolate(net, root);
    cofactor_in_place(&mut w, id, value)?;
    let w = crate::optimize::simplify_pass(&w);
    let r = w.outputs()[0].1;
    Ok((w, r))
}

fn cofactor_in_place(w: &mut Network, var: NodeId, value: bool) -> Result<(), NetError> {
    if w.tracing() {
        let name = w.input_name(var).unwrap_or("?").to_string();
        w.record(RuleTag::Cofactor, Some(var), format!("{name}={}", u8::from(value)));
    }
    let root = w.outputs()[0].1;
    let r = w.rebuild(&[root], &HashMap::from([(var, Edge::ZERO.xor(value))]))?[0];
    w.set_output_edge(0, r)
}

/// Variable with the most operand occurrences in the cone; ties go to the
/// earliest declared.
fn branch_variable(net: &Network, root: Edge) -> Option<NodeId> {
    let mut count: HashMap<NodeId, usize> = HashMap::new();
    for id in net.maj_cone(&[root]) {
        for c in net.children(id) {
            if net.is_input(c.node()) {
                *count.entry(c.node()).or_default() += 1;
            }
        }
    }
    if net.is_input(root.node()) {
        *count.entry(root.node()).or_default() += 1;
    }
    let mut best: Option<(usize, NodeId)> = None;
    for &id in net.inputs() {
        if let Some(&c) = count.get(&id) {
            if best.is_none_or(|(b, _)| c > b) {
                best = Some((c, id));
            }
        }
    }
    best.map(|(_, id)| id)
}

struct Search {
    assign: Vec<Option<bool>>,
    stats: SatStats,
    trace: Vec<TraceEvent>,
}

impl Search {
    fn run(&mut self, work: &Network) -> bool {
        let mut events = Vec::new();
        let w = assoc_simplify(work, &mut events);
        self.stats.simplifications += events
            .iter()
            .filter(|e| matches!(e.rule, RuleTag::MajThreshold | RuleTag::MajAnnihilate | RuleTag::AssocSwap))
            .count();
        self.trace.extend(events);
        let root = w.outputs()[0].1;
        if root == Edge::ONE {
            return true;
        }
        if root == Edge::ZERO {
            return false;
        }
        if !has_constant(&w, root) {
            let support = w.support(&[root]);
            let mut values: Vec<bool> = self.assign.iter().map(|a| a.unwrap_or(false)).collect();
            for &v in &support {
                values[w.input_position(v).expect("input")] = false;
            }
            self.stats.simulations += 1;
            let mut polarity = false;
            if !evaluate(&w, root, &values) {
                for &v in &support {
                    values[w.input_position(v).expect("input")] = true;
                }
                self.stats.simulations += 1;
                assert!(evaluate(&w, root, &values), "constant-free function must be self-dual");
                polarity = true;
            }
            for &v in &support {
                self.assign[w.input_position(v).expect("input")] = Some(polarity);
            }
            return true;
        }
        let var = branch_variable(&w, root).expect("non-constant root has support");
        let pos = w.input_position(var).expect("input");
        for value in [false, true] {
            self.stats.branches += 1;
            let mut next = w.clone();
            cofactor_in_place(&mut next, var, value).expect("constants fit every arity");
            self.assign[pos] = Some(value);
            if self.run(&next) {
                return true;
            }
            self.assign[pos] = None;
        }
        false
    }
}

/// Decide satisfiability of `root`. A returned witness has been checked
/// against `net`.
pub fn solve(net: &Network, root: Edge) -> SatResult {
    let mut work = isolate(net, root);
    work.enable_trace();
    let mut search = Search { assign: vec![None; net.inputs().len()], stats: SatStats::default(), trace: Vec::new() };
    let sat = search.run(&work);
    let Search { assign, mut stats, trace } = search;
    if !sat {
        return SatResult { status: SatStatus::Unsat, witness: None, stats, trace };
    }
    let values: Vec<bool> = assign.iter().map(|a| a.unwrap_or(false)).collect();
    stats.simulations += 1;
    assert!(evaluate(net, root, &values), "witness must satisfy the original network");
    SatResult { status: SatStatus::Sat, witness: Some(named(net, &values)), stats, trace }
}

/// Operand of an MNF majority: a literal or a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MnfLiteral {
    Var { name: String, negated: bool },
    Const(bool),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MnfArg {
    Leaf(MnfLiteral),
    Maj(Vec<MnfLiteral>),
}

/// A majority of majorities fed with literals and constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MnfFormula {
    pub top: Vec<MnfArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstantClass {
    ConstantFree,
    SinglePolarity,
    Mixed,
}

impl fmt::Display for ConstantClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstantClass::ConstantFree => "constant-free",
            ConstantClass::SinglePolarity => "single-polarity constants",
            ConstantClass::Mixed => "mixed constants",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MnfError {
    #[error("majority arity {0} must be odd and at least 3")]
    Arity(usize),
    #[error("not a two-level majority form: {0}")]
    Shape(String),
}

fn literal(e: &MajExpression) -> Result<MnfLiteral, MnfError> {
    match e {
        MajExpression::Var(name) => Ok(MnfLiteral::Var { name: name.clone(), negated: false }),
        MajExpression::Const(b) => Ok(MnfLiteral::Const(*b)),
        MajExpression::Not(inner) => Ok(match literal(inner)? {
            MnfLiteral::Var { name, negated } => MnfLiteral::Var { name, negated: !negated },
            MnfLiteral::Const(b) => MnfLiteral::Const(!b),
        }),
        MajExpression::Maj(_) => Err(MnfError::Shape(format!("{e} is not a literal"))),
    }
}

fn check_arity(n: usize) -> Result<(), MnfError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(MnfError::Arity(n));
    }
    Ok(())
}

impl MnfFormula {
    pub fn from_expr(e: &MajExpression) -> Result<MnfFormula, MnfError> {
        let MajExpression::Maj(args) = e else {
            return Err(MnfError::Shape("top level must be a majority".into()));
        };
        let top = args
            .iter()
            .map(|a| match a {
                MajExpression::Maj(inner) => Ok(MnfArg::Maj(inner.iter().map(literal).collect::<Result<_, _>>()?)),
                other => literal(other).map(MnfArg::Leaf),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MnfFormula { top })
    }

    /// Build the formula as a network, declaring variables in order of
    /// first occurrence.
    pub fn to_network(&self) -> Result<(Network, Edge), NetError> {
        let mut net = Network::new();
        let mut max = self.top.len();
        for a in &self.top {
            if let MnfArg::Maj(inner) = a {
                max = max.max(inner.len());
            }
        }
        if max > net.max_arity() && max % 2 == 1 {
            net.set_max_arity(max)?;
        }
        let lit = |net: &mut Network, l: &MnfLiteral| match l {
            MnfLiteral::Var { name, negated } => net.input_or_add(name).xor(*negated),
            MnfLiteral::Const(b) => Edge::ZERO.xor(*b),
        };
        let mut top = Vec::with_capacity(self.top.len());
        for a in &self.top {
            top.push(match a {
                MnfArg::Leaf(l) => lit(&mut net, l),
                MnfArg::Maj(inner) => {
                    let ch: Vec<Edge> = inner.iter().map(|l| lit(&mut net, l)).collect();
                    net.make_maj_exact(&ch)?
                }
            });
        }
        let root = net.make_maj_exact(&top)?;
        net.add_output("f", root)?;
        Ok((net, root))
    }
}

fn class_of(zeros: bool, ones: bool) -> ConstantClass {
    match (zeros, ones) {
        (false, false) => ConstantClass::ConstantFree,
        (true, true) => ConstantClass::Mixed,
        _ => ConstantClass::SinglePolarity,
    }
}

/// Classify an MNF formula by the constants it contains.
pub fn to_mnf_check(f: &MnfFormula) -> Result<ConstantClass, MnfError> {
    check_arity(f.top.len())?;
    let (mut zeros, mut ones) = (false, false);
    let mut see = |l: &MnfLiteral| {
        if let MnfLiteral::Const(b) = l {
            if *b {
                ones = true;
            } else {
                zeros = true;
            }
        }
    };
    for a in &f.top {
        match a {
            MnfArg::Leaf(l) => see(l),
            MnfArg::Maj(inner) => {
                check_arity(inner.len())?;
                inner.iter().for_each(&mut see);
            }
        }
    }
    Ok(class_of(zeros, ones))
}

/// The same classification for the cone of any network root.
pub fn classify_constants(net: &Network, root: Edge) -> ConstantClass {
    let (mut zeros, mut ones) = (false, false);
    for id in net.maj_cone(&[root]) {
        for c in net.children(id) {
            if matches!(net.node(c.node()), Node::ConstZero) {
                if c.is_complemented() {
                    ones = true;
                } else {
                    zeros = true;
                }
            }
        }
    }
    class_of(zeros, ones)
}
