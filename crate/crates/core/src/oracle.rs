//! Ground-truth semantics: exhaustive truth tables, equivalence and
//! self-duality checks, and seeded random simulation.
//!
//! Truth-table bit `v` holds the function value under assignment `v`, where
//! input `i` (declaration order) is bit `i` of `v`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::net::{Edge, NetError, Network, Node, NodeId};

/// Default limit on the number of inputs simulated exhaustively.
pub const EXHAUSTIVE_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{inputs} inputs exceed the exhaustive simulation cap of {cap}; use random_simulate")]
    TooManyInputs { inputs: usize, cap: usize },
    #[error("input signatures differ: {0}")]
    Signature(String),
    #[error("node {0} depends on an input outside the simulated support")]
    OutsideSupport(NodeId),
    #[error(transparent)]
    Net(#[from] NetError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    num_inputs: usize,
    words: Vec<u64>,
}

fn word_count(k: usize) -> usize {
    if k <= 6 {
        1
    } else {
        1 << (k - 6)
    }
}

fn tail_mask(k: usize) -> u64 {
    if k >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << k)) - 1
    }
}

const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Exhaustive simulation pattern of variable `i` among `k`.
fn var_pattern(i: usize, k: usize) -> Vec<u64> {
    let words = word_count(k);
    let mask = tail_mask(k);
    if i < 6 {
        vec![LOW_PATTERNS[i] & mask; words]
    } else {
        (0..words).map(|w| if (w >> (i - 6)) & 1 == 1 { u64::MAX } else { 0 }).collect()
    }
}

impl TruthTable {
    pub fn zero(num_inputs: usize) -> TruthTable {
        TruthTable { num_inputs, words: vec![0; word_count(num_inputs)] }
    }

    /// Table of an arbitrary predicate over assignments.
    pub fn from_fn(num_inputs: usize, f: impl Fn(usize) -> bool) -> TruthTable {
        let mut t = TruthTable::zero(num_inputs);
        for v in 0..t.len() {
            if f(v) {
                t.words[v / 64] |= 1 << (v % 64);
            }
        }
        t
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    /// Number of rows, `2^num_inputs`.
    pub fn len(&self) -> usize {
        1 << self.num_inputs
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, assignment: usize) -> bool {
        (self.words[assignment / 64] >> (assignment % 64)) & 1 == 1
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_const(&self, value: bool) -> bool {
        let ones = self.count_ones();
        if value {
            ones == self.len()
        } else {
            ones == 0
        }
    }

    /// First assignment where the two tables differ.
    pub fn first_difference(&self, other: &TruthTable) -> Option<usize> {
        assert_eq!(self.num_inputs, other.num_inputs);
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(i, (a, b))| i * 64 + (a ^ b).trailing_zeros() as usize)
    }

    /// Hexadecimal digits, most significant assignment first.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4)
                    .filter(|b| d * 4 + b < self.len() && self.get(d * 4 + b))
                    .fold(0u32, |acc, b| acc | 1 << b);
                char::from_digit(nibble, 16).expect("nibble < 16")
            })
            .collect()
    }

    /// Binary digits, most significant assignment first.
    pub fn to_binary(&self) -> String {
        (0..self.len()).rev().map(|v| if self.get(v) { '1' } else { '0' }).collect()
    }

    fn from_words(num_inputs: usize, mut words: Vec<u64>) -> TruthTable {
        let mask = tail_mask(num_inputs);
        for w in words.iter_mut() {
            *w &= mask;
        }
        TruthTable { num_inputs, words }
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({}: {})", self.num_inputs, self.to_hex())
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Bitwise "at least `t` of these are set", one bit lane per assignment.
pub(crate) fn threshold_word(children: &[u64], t: usize) -> u64 {
    let mut at_least = vec![0u64; t + 1];
    at_least[0] = u64::MAX;
    for &x in children {
        for j in (1..=t).rev() {
            at_least[j] |= at_least[j - 1] & x;
        }
    }
    at_least[t]
}

/// Per-node simulation words, indexed densely by node id.
#[derive(Clone, Debug, Default)]
pub(crate) struct NodeWords {
    slots: Vec<Option<Vec<u64>>>,
}

impl NodeWords {
    fn with_len(n: usize) -> Self {
        NodeWords { slots: vec![None; n] }
    }

    pub(crate) fn get(&self, id: &NodeId) -> Option<&Vec<u64>> {
        self.slots.get(id.index()).and_then(|s| s.as_ref())
    }

    pub(crate) fn contains_key(&self, id: &NodeId) -> bool {
        self.get(id).is_some()
    }

    fn insert(&mut self, id: NodeId, w: Vec<u64>) {
        self.slots[id.index()] = Some(w);
    }
}

impl std::ops::Index<&NodeId> for NodeWords {
    type Output = Vec<u64>;

    fn index(&self, id: &NodeId) -> &Vec<u64> {
        self.get(id).expect("node was simulated")
    }
}

/// Bit-parallel simulation of the cones of `roots`. `vars[i]` is driven by
/// `patterns[i]`; every input reached must be among `vars`. Returns the
/// words of every node in the cone.
pub(crate) fn simulate_cone(
    net: &Network,
    roots: &[Edge],
    vars: &[NodeId],
    patterns: &[Vec<u64>],
    words: usize,
) -> Result<NodeWords, OracleError> {
    let mut values = NodeWords::with_len(net.node_count());
    for (&v, p) in vars.iter().zip(patterns) {
        values.insert(v, p.clone());
    }
    let mut scratch = Vec::new();
    for id in net.cone(roots) {
        if values.contains_key(&id) {
            continue;
        }
        let w = match net.node(id) {
            Node::ConstZero => vec![0; words],
            Node::Input(_) => return Err(OracleError::OutsideSupport(id)),
            Node::Maj(ch) => {
                let t = ch.len().div_ceil(2);
                (0..words)
                    .map(|wi| {
                        scratch.clear();
                        scratch.extend(ch.iter().map(|c| {
                            let x = values[&c.node()][wi];
                            if c.is_complemented() {
                                !x
                            } else {
                                x
                            }
                        }));
                        threshold_word(&scratch, t)
                    })
                    .collect()
            }
        };
        values.insert(id, w);
    }
    Ok(values)
}

fn edge_words(values: &NodeWords, e: Edge) -> Vec<u64> {
    let w = &values[&e.node()];
    if e.is_complemented() {
        w.iter().map(|x| !x).collect()
    } else {
        w.clone()
    }
}

/// Exhaustive tables of `roots` over the variables `vars` (which must cover
/// their support). Variable `i` of the tables is `vars[i]`.
pub fn tables_over(net: &Network, roots: &[Edge], vars: &[NodeId]) -> Result<Vec<TruthTable>, OracleError> {
    let values = node_tables_over(net, roots, vars)?;
    Ok(roots.iter().map(|&r| TruthTable::from_words(vars.len(), edge_words(&values, r))).collect())
}

/// Exhaustive words of every node in the cones of `roots` over `vars`.
pub(crate) fn node_tables_over(
    net: &Network,
    roots: &[Edge],
    vars: &[NodeId],
) -> Result<NodeWords, OracleError> {
    let k = vars.len();
    if k > EXHAUSTIVE_CAP {
        return Err(OracleError::TooManyInputs { inputs: k, cap: EXHAUSTIVE_CAP });
    }
    let patterns: Vec<Vec<u64>> = (0..k).map(|i| var_pattern(i, k)).collect();
    simulate_cone(net, roots, vars, &patterns, word_count(k))
}

/// Truth table of `root` over all declared inputs of `net`.
pub fn simulate(net: &Network, root: Edge) -> Result<TruthTable, OracleError> {
    Ok(simulate_many(net, &[root])?.remove(0))
}

pub fn simulate_many(net: &Network, roots: &[Edge]) -> Result<Vec<TruthTable>, OracleError> {
    tables_over(net, roots, net.inputs())
}

/// Value of `root` under one assignment given in input declaration order.
pub fn evaluate(net: &Network, root: Edge, assignment: &[bool]) -> bool {
    assert_eq!(assignment.len(), net.inputs().len(), "assignment must cover every input");
    let patterns: Vec<Vec<u64>> = assignment.iter().map(|&b| vec![if b { 1 } else { 0 }]).collect();
    let values = simulate_cone(net, &[root], net.inputs(), &patterns, 1).expect("all inputs are driven");
    edge_words(&values, root)[0] & 1 == 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// A distinguishing assignment, by input name.
    Counterexample(Vec<(String, bool)>),
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

/// Exhaustive equivalence of two roots. Both networks must declare the same
/// set of input names; assignments are indexed in `a`'s declaration order.
pub fn check_equiv(a: &Network, root_a: Edge, b: &Network, root_b: Edge) -> Result<Equivalence, OracleError> {
    let names_a: Vec<&str> = a.input_names().collect();
    let mut sorted_a = names_a.clone();
    let mut sorted_b: Vec<&str> = b.input_names().collect();
    sorted_a.sort_unstable();
    sorted_b.sort_unstable();
    if sorted_a != sorted_b {
        return Err(OracleError::Signature(format!("[{}] vs [{}]", sorted_a.join(","), sorted_b.join(","))));
    }
    let vars_b: Vec<NodeId> = names_a.iter().map(|n| b.input(n).expect("same names").node()).collect();
    let ta = simulate(a, root_a)?;
    let tb = tables_over(b, &[root_b], &vars_b)?.remove(0);
    Ok(match ta.first_difference(&tb) {
        None => Equivalence::Equivalent,
        Some(v) => Equivalence::Counterexample(
            names_a.iter().enumerate().map(|(i, n)| (n.to_string(), (v >> i) & 1 == 1)).collect(),
        ),
    })
}

/// True iff f(¬x) = ¬f(x) for every assignment x.
pub fn check_self_dual(net: &Network, root: Edge) -> Result<bool, OracleError> {
    Ok(is_self_dual(&simulate(net, root)?))
}

pub fn is_self_dual(t: &TruthTable) -> bool {
    let last = t.len() - 1;
    (0..t.len()).all(|v| t.get(v) != t.get(last ^ v))
}

/// Seeded random simulation result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomSimulation {
    pub num_vectors: usize,
    /// One bit row per declared input.
    pub inputs: Vec<Vec<u64>>,
    /// One bit row per root.
    pub outputs: Vec<Vec<u64>>,
}

impl RandomSimulation {
    pub fn output_bit(&self, root: usize, vector: usize) -> bool {
        (self.outputs[root][vector / 64] >> (vector % 64)) & 1 == 1
    }

    pub fn input_bit(&self, input: usize, vector: usize) -> bool {
        (self.inputs[input][vector / 64] >> (vector % 64)) & 1 == 1
    }

    /// The assignment used for `vector`, as a truth-table row index.
    pub fn assignment(&self, vector: usize) -> usize {
        (0..self.inputs.len()).filter(|&i| self.input_bit(i, vector)).fold(0, |acc, i| acc | 1 << i)
    }
}

/// Simulate `roots` on `num_vectors` pseudo-random assignments drawn from
/// `seed`. Deterministic for a given network input count and seed.
pub fn random_simulate(net: &Network, roots: &[Edge], num_vectors: usize, seed: u64) -> RandomSimulation {
    let words = num_vectors.div_ceil(64).max(1);
    let tail = if num_vectors.is_multiple_of(64) { u64::MAX } else { (1u64 << (num_vectors % 64)) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<Vec<u64>> = net
        .inputs()
        .iter()
        .map(|_| {
            let mut row: Vec<u64> = (0..words).map(|_| rng.gen()).collect();
            *row.last_mut().expect("at least one word") &= tail;
            row
        })
        .collect();
    let values = simulate_cone(net, roots, net.inputs(), &inputs, words).expect("all inputs are driven");
    let outputs = roots
        .iter()
        .map(|&r| {
            let mut row = edge_words(&values, r);
            *row.last_mut().expect("at least one word") &= tail;
            row
        })
        .collect();
    RandomSimulation { num_vectors, inputs, outputs }
}
