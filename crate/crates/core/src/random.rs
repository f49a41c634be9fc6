//! Seeded random networks for property tests and demos.
//!
//! Generated networks favour reuse of recent nodes and sometimes plant
//! siblings sharing n−1 operands, so that associativity and distributivity
//! patterns actually occur.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frontend::MajExpression;
use crate::net::{Edge, Network};

#[derive(Clone, Debug)]
pub struct RandomConfig {
    pub min_inputs: usize,
    pub max_inputs: usize,
    /// Upper bound on the number of majority nodes created.
    pub max_size: usize,
    pub arities: Vec<usize>,
    /// Allow constant operands.
    pub constants: bool,
    pub max_outputs: usize,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            min_inputs: 1,
            max_inputs: 10,
            max_size: 30,
            arities: vec![3, 5, 7, 9],
            constants: true,
            max_outputs: 2,
        }
    }
}

impl RandomConfig {
    pub fn constant_free() -> Self {
        RandomConfig { constants: false, ..RandomConfig::default() }
    }
}

fn pick_operand(rng: &mut ChaCha8Rng, pool: &[Edge], num_inputs: usize, constants: bool) -> Edge {
    if constants && rng.gen_bool(0.1) {
        return if rng.gen_bool(0.5) { Edge::ONE } else { Edge::ZERO };
    }
    let base = if pool.len() > num_inputs && rng.gen_bool(0.5) {
        // recent nodes
        let lo = num_inputs.max(pool.len().saturating_sub(4));
        pool[rng.gen_range(lo..pool.len())]
    } else {
        pool[rng.gen_range(0..pool.len())]
    };
    base.xor(rng.gen_bool(0.3))
}

/// A random network built with exact (unsimplified) construction. Every
/// output is a majority node or an edge derived from one.
pub fn random_network(config: &RandomConfig, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_arity = config.arities.iter().copied().max().unwrap_or(3).max(3);
    let mut net = Network::with_max_arity(max_arity | 1).expect("odd arity cap");
    let k = rng.gen_range(config.min_inputs.max(1)..=config.max_inputs.max(config.min_inputs.max(1)));
    let mut pool: Vec<Edge> = (0..k).map(|i| net.add_input(&format!("x{i}")).expect("fresh name")).collect();
    let mut majs: Vec<Edge> = Vec::new();
    let size = rng.gen_range(1..=config.max_size.max(1));

    for _ in 0..size {
        let n = *config.arities.choose(&mut rng).unwrap_or(&3);
        let planted = majs.iter().copied().filter(|e| net.arity(e.node()) == n).collect::<Vec<_>>();
        let children: Vec<Edge> = if !planted.is_empty() && rng.gen_bool(0.25) {
            // sibling sharing n-1 operands with an earlier node
            let base = *planted.choose(&mut rng).expect("non-empty");
            let mut ch = net.children(base.node()).to_vec();
            let slot = rng.gen_range(0..n);
            ch[slot] = pick_operand(&mut rng, &pool, k, config.constants);
            ch
        } else if !planted.is_empty() && rng.gen_bool(0.2) {
            // outer node over an earlier node and n-2 of its operands
            let inner = *planted.choose(&mut rng).expect("non-empty");
            let mut ch: Vec<Edge> = net.children(inner.node()).to_vec();
            ch.shuffle(&mut rng);
            ch.truncate(n - 2);
            ch.push(pick_operand(&mut rng, &pool, k, config.constants));
            ch.push(inner);
            ch
        } else {
            (0..n).map(|_| pick_operand(&mut rng, &pool, k, config.constants)).collect()
        };
        let e = net.make_maj_exact(&children).expect("arity within cap");
        if !majs.contains(&e) {
            majs.push(e);
            pool.push(e);
        }
    }

    let last = *majs.last().expect("at least one node");
    net.add_output("f", last.xor(rng.gen_bool(0.2))).expect("fresh name");
    let extra = rng.gen_range(1..=config.max_outputs.max(1)) - 1;
    for i in 0..extra {
        let e = *majs.choose(&mut rng).expect("non-empty");
        net.add_output(&format!("g{i}"), e.xor(rng.gen_bool(0.3))).expect("fresh name");
    }
    net
}

/// A random tree-shaped expression with at most `config.max_size`
/// majority applications. Negations (including doubled ones) may wrap any
/// subterm.
pub fn random_expression(config: &RandomConfig, seed: u64) -> MajExpression {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(config.min_inputs.max(1)..=config.max_inputs.max(config.min_inputs.max(1)));
    let mut budget = rng.gen_range(1..=config.max_size.max(1));
    expression(&mut rng, config, k, &mut budget, 0)
}

fn expression(rng: &mut ChaCha8Rng, config: &RandomConfig, k: usize, budget: &mut usize, depth: usize) -> MajExpression {
    let leaf = depth > 0 && (*budget == 0 || rng.gen_bool(0.45));
    let e = if leaf {
        if config.constants && rng.gen_bool(0.1) {
            MajExpression::Const(rng.gen_bool(0.5))
        } else {
            MajExpression::var(&format!("x{}", rng.gen_range(0..k)))
        }
    } else {
        *budget = budget.saturating_sub(1);
        let n = *config.arities.choose(rng).unwrap_or(&3);
        MajExpression::Maj((0..n).map(|_| expression(rng, config, k, budget, depth + 1)).collect())
    };
    match rng.gen_range(0..10) {
        0..=1 => MajExpression::not(e),
        2 => MajExpression::not(MajExpression::not(e)),
        _ => e,
    }
}
