//! Cost-driven optimization.
//!
//! [`alg1_optimize`] visits majority nodes in topological order and tries
//! three kinds of local move at each one:
//!
//! * equalize: inflate smaller majority children that share all but one
//!   operand to the parent's arity, unwrap distributed children, deflate;
//! * inflate and resubstitute: inflate the node with one of its children as
//!   filler, replace majority children by cheaper edges when the node's
//!   function over its support is unchanged, deflate;
//! * associativity, relevance and distributivity rewrites, with one step of
//!   lookahead.
//!
//! A move is kept only if it strictly improves the cost key of the target.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::axioms::{applicable_rules, arity_inflate, distribute_in_keeping, distribute_out, inv_propagate, RewriteRule};
use crate::net::{CostMetrics, Edge, NetError, Network, NodeId, DEFAULT_MAX_ARITY};
use crate::oracle::{node_tables_over, NodeWords, random_simulate, simulate_many, threshold_word};
use crate::trace::{RuleTag, TraceEvent};

/// Largest support over which resubstitution computes exact local tables.
const RESUB_SUPPORT_CAP: usize = 16;
/// Inputs beyond which the final check uses random simulation.
const VERIFY_EXHAUSTIVE_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Target {
    #[default]
    Size,
    Depth,
    FaninSum,
    SizeTimesInv,
}

impl Target {
    /// Lexicographic cost key; smaller is better.
    pub fn key(self, m: &CostMetrics) -> [usize; 4] {
        match self {
            Target::Size => [m.size, m.fanin_sum, m.inverter_count, m.depth],
            Target::Depth => [m.depth, m.fanin_sum, m.inverter_count, m.size],
            Target::FaninSum => [m.fanin_sum, m.size, m.inverter_count, m.depth],
            Target::SizeTimesInv => [m.size_times_inv, m.size, m.fanin_sum, m.depth],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::Size => "size",
            Target::Depth => "depth",
            Target::FaninSum => "fanin",
            Target::SizeTimesInv => "minv",
        }
    }

    pub fn value(self, m: &CostMetrics) -> usize {
        self.key(m)[0]
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "size" => Ok(Target::Size),
            "depth" => Ok(Target::Depth),
            "fanin" | "fanin_sum" => Ok(Target::FaninSum),
            "minv" | "size_times_inv" => Ok(Target::SizeTimesInv),
            _ => Err(format!("unknown target `{s}` (expected size, depth, fanin or minv)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizeConfig {
    pub target: Target,
    pub max_arity: usize,
    pub effort_rounds: usize,
    pub seed: u64,
    pub trace: bool,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig { target: Target::Size, max_arity: DEFAULT_MAX_ARITY, effort_rounds: 8, seed: 0, trace: false }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<(), NetError> {
        if self.max_arity < 3 || self.max_arity.is_multiple_of(2) {
            return Err(NetError::InvalidMaxArity(self.max_arity));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verification {
    Exhaustive,
    RandomSimulation,
    /// The result failed the final check and the input was returned.
    Reverted,
}

#[derive(Clone, Debug)]
pub struct OptimizeReport {
    pub network: Network,
    pub before: CostMetrics,
    pub after: CostMetrics,
    pub rounds: usize,
    pub moves: usize,
    pub verification: Verification,
    pub trace: Vec<TraceEvent>,
}

type Candidate = (Network, Vec<TraceEvent>);

fn key_of(net: &Network, target: Target) -> [usize; 4] {
    target.key(&net.output_metrics())
}

/// Deflate and drop dead nodes, returning the events recorded so far.
fn finish(mut w: Network) -> Candidate {
    w.resimplify().expect("rebuilt nodes keep their arity");
    let events = w.take_trace();
    (w.compact(), events)
}

/// Threshold reductions applied everywhere, dead nodes removed.
pub fn simplify_pass(net: &Network) -> Network {
    finish(net.clone()).0
}

/// [`simplify_pass`] plus associativity swaps that lower the majority
/// count, repeated to a fixpoint.
pub fn simplify_with_assoc(net: &Network) -> Network {
    let mut events = Vec::new();
    assoc_simplify(net, &mut events)
}

pub(crate) fn assoc_simplify(net: &Network, events: &mut Vec<TraceEvent>) -> Network {
    let (mut cur, ev) = finish(net.clone());
    events.extend(ev);
    'outer: for _ in 0..256 {
        let size = cur.output_metrics().size;
        for v in cur.maj_cone(&cur.output_edges()) {
            for rule in applicable_rules(&cur, v) {
                if !matches!(rule, RewriteRule::AssocSwap { .. }) {
                    continue;
                }
                let mut w = cur.clone();
                let Ok(e) = rule.apply(&mut w, v) else { continue };
                if e == Edge::from(v) || w.substitute(v, e).is_err() {
                    continue;
                }
                let (w, ev) = finish(w);
                if w.output_metrics().size < size {
                    events.extend(ev);
                    cur = w;
                    continue 'outer;
                }
            }
        }
        break;
    }
    cur
}

/// Words of `e` from a node-table map.
fn words_of(tables: &NodeWords, words: usize, e: Edge) -> Vec<u64> {
    let zero = vec![0; words];
    let w = if e.node() == NodeId::CONST0 { &zero } else { &tables[&e.node()] };
    if e.is_complemented() {
        w.iter().map(|x| !x).collect()
    } else {
        w.clone()
    }
}

fn maj_words(children: &[Vec<u64>]) -> Vec<u64> {
    let t = children.len().div_ceil(2);
    let words = children[0].len();
    let mut scratch = Vec::with_capacity(children.len());
    (0..words)
        .map(|wi| {
            scratch.clear();
            scratch.extend(children.iter().map(|c| c[wi]));
            threshold_word(&scratch, t)
        })
        .collect()
}

struct Optimizer {
    target: Target,
    rng: ChaCha8Rng,
}

impl Optimizer {
    fn better(&self, w: &Network, than: [usize; 4]) -> bool {
        key_of(w, self.target) < than
    }

    /// Inflate majority children of lower arity sharing all but one operand
    /// so that the distributivity unwrap applies, then deflate.
    fn equalize(&self, cur: &Network, v: NodeId) -> Option<Candidate> {
        let ch = cur.children(v).to_vec();
        let n = ch.len();
        let small: Vec<Edge> = ch
            .iter()
            .copied()
            .filter(|e| !e.is_complemented() && cur.is_maj(e.node()) && cur.arity(e.node()) < n)
            .collect();
        let mut best: Option<(Vec<Edge>, Edge)> = None;
        for &s in &small {
            let sc = cur.children(s.node());
            let m = sc.len();
            for r in 0..m {
                let mut shared = sc.to_vec();
                let residual = shared.remove(r);
                let members: Vec<Edge> = small
                    .iter()
                    .copied()
                    .filter(|e| cur.arity(e.node()) == m)
                    .filter(|e| crate::axioms::multiset_minus(cur.children(e.node()), &shared).is_some())
                    .collect();
                if best.as_ref().is_none_or(|b| members.len() > b.0.len()) {
                    best = Some((members, residual));
                }
            }
        }
        let (members, filler) = best?;
        if members.len() <= n.div_ceil(2) {
            return None;
        }
        let mut w = cur.clone();
        let mut new_ch = ch.clone();
        for slot in new_ch.iter_mut() {
            if !members.contains(slot) {
                continue;
            }
            let mut e = *slot;
            while w.arity(e.node()) < n {
                e = arity_inflate(&mut w, e.node(), filler).ok()?;
            }
            *slot = e;
        }
        let mut top = w.make_maj_exact(&new_ch).ok()?;
        let mut peeled = false;
        while w.is_maj(top.node()) && !top.is_complemented() {
            match distribute_out(&mut w, top.node()) {
                Ok(e) => {
                    top = e;
                    peeled = true;
                }
                Err(_) => break,
            }
        }
        if !peeled {
            return None;
        }
        w.substitute(v, top).ok()?;
        Some(finish(w))
    }

    /// Optionally inflate `v` with `filler`, then greedily replace majority
    /// children by inputs, constants or fanin nodes while the local
    /// function is preserved, then deflate.
    fn resubstitute(&self, cur: &Network, v: NodeId, filler: Option<Edge>) -> Option<Candidate> {
        let mut ch = cur.children(v).to_vec();
        if let Some(f) = filler {
            if ch.len() + 2 > cur.max_arity() {
                return None;
            }
            ch.push(f);
            ch.push(!f);
        }
        let root = Edge::from(v);
        let support = cur.support(&[root]);
        if support.len() > RESUB_SUPPORT_CAP {
            return None;
        }
        let tables = node_tables_over(cur, &[root], &support).ok()?;
        let words = tables[&v].len();
        let goal = words_of(&tables, words, root);

        let mut candidates: Vec<Edge> = Vec::new();
        let sibling_nodes: Vec<NodeId> = ch.iter().map(|e| e.node()).collect();
        let (fresh, seen): (Vec<NodeId>, Vec<NodeId>) = support.iter().partition(|i| !sibling_nodes.contains(i));
        for id in fresh.into_iter().chain(seen) {
            candidates.extend([Edge::from(id), !Edge::from(id)]);
        }
        candidates.extend([Edge::ZERO, Edge::ONE]);
        for id in cur.maj_cone(&[root]) {
            if id != v {
                candidates.extend([Edge::from(id), !Edge::from(id)]);
            }
        }

        let mut values: Vec<Vec<u64>> = ch.iter().map(|&e| words_of(&tables, words, e)).collect();
        let mut replaced = Vec::new();
        for _ in 0..3 {
            let before = replaced.len();
            for pos in 0..ch.len() {
                if !cur.is_maj(ch[pos].node()) {
                    continue;
                }
                for &cand in &candidates {
                    if cand.node() == ch[pos].node()
                        || ch.contains(&!cand)
                        || replaced.iter().any(|&(old, _)| old == cand)
                    {
                        continue;
                    }
                    let saved = std::mem::replace(&mut values[pos], words_of(&tables, words, cand));
                    if maj_words(&values) == goal {
                        replaced.push((ch[pos], cand));
                        ch[pos] = cand;
                        break;
                    }
                    values[pos] = saved;
                }
            }
            if replaced.len() == before {
                break;
            }
        }
        if replaced.is_empty() {
            return None;
        }
        let mut w = cur.clone();
        if w.tracing() {
            if let Some(f) = filler {
                let detail = format!("{} with filler {}", w.node_label(v), w.edge_label(f));
                w.record(RuleTag::ArityInflate, Some(v), detail);
            }
            for (old, new) in &replaced {
                let detail = format!("{} -> {}", w.edge_label(*old), w.edge_label(*new));
                w.record(RuleTag::Resubstitute, Some(v), detail);
            }
        }
        let e = w.make_maj(&ch).ok()?;
        w.substitute(v, e).ok()?;
        Some(finish(w))
    }

    fn rewrite_moves(net: &Network, v: NodeId) -> Vec<RewriteRule> {
        if !net.is_maj(v) {
            return Vec::new();
        }
        applicable_rules(net, v)
            .into_iter()
            .filter(|r| {
                matches!(
                    r,
                    RewriteRule::AssocSwap { .. }
                        | RewriteRule::RelevanceSubst { .. }
                        | RewriteRule::DistributeOut { factor: false }
                )
            })
            .collect()
    }

    fn apply_rule(cur: &Network, v: NodeId, rule: &RewriteRule) -> Option<(Network, Edge)> {
        let mut w = cur.clone();
        let e = rule.apply(&mut w, v).ok()?;
        if e == Edge::from(v) {
            return None;
        }
        w.substitute(v, e).ok()?;
        Some((w, e))
    }

    /// Rewrite moves, each followed by at most one more rewrite at the
    /// resulting node.
    fn rewrite(&self, cur: &Network, v: NodeId, bound: [usize; 4]) -> Vec<Candidate> {
        let mut out = Vec::new();
        for rule in Self::rewrite_moves(cur, v) {
            let Some((mut w, e)) = Self::apply_rule(cur, v, &rule) else { continue };
            let ev = w.take_trace();
            let (w, roots) = w.compact_with_roots(&[e]);
            if self.better(&w, bound) {
                out.push((w, ev));
                continue;
            }
            let e = roots[0];
            for second in Self::rewrite_moves(&w, e.node()) {
                let Some((w2, _)) = Self::apply_rule(&w, e.node(), &second) else { continue };
                let (w2, ev2) = finish(w2);
                if self.better(&w2, bound) {
                    let mut all = ev.clone();
                    all.extend(ev2);
                    out.push((w2, all));
                    break;
                }
            }
        }
        out
    }

    /// Best strictly improving move at `v`. Ties prefer the axiom moves
    /// (equalize, then rewrites) over resubstitution; the seed decides
    /// among the rest.
    fn best_move(&mut self, cur: &Network, v: NodeId) -> Option<Candidate> {
        let bound = key_of(cur, self.target);
        let mut found: Vec<(usize, Candidate)> = Vec::new();
        found.extend(self.equalize(cur, v).map(|c| (0, c)));
        found.extend(self.rewrite(cur, v, bound).into_iter().map(|c| (1, c)));
        let mut fillers: Vec<Option<Edge>> = vec![None];
        let mut seen = Vec::new();
        for &c in cur.children(v) {
            if !seen.contains(&c.node()) {
                seen.push(c.node());
                fillers.push(Some(c));
            }
        }
        for filler in fillers {
            found.extend(self.resubstitute(cur, v, filler).map(|c| (2, c)));
        }

        found.retain(|(_, (w, _))| self.better(w, bound));
        let best = found.iter().map(|(rank, (w, _))| (key_of(w, self.target), *rank)).min()?;
        let mut ties: Vec<Candidate> = found
            .into_iter()
            .filter(|(rank, (w, _))| (key_of(w, self.target), *rank) == best)
            .map(|(_, c)| c)
            .collect();
        ties.shuffle(&mut self.rng);
        ties.pop()
    }
}

fn verify(a: &Network, b: &Network) -> Option<Verification> {
    let (ra, rb) = (a.output_edges(), b.output_edges());
    if a.inputs().len() <= VERIFY_EXHAUSTIVE_CAP {
        let ok = simulate_many(a, &ra).ok()? == simulate_many(b, &rb).ok()?;
        ok.then_some(Verification::Exhaustive)
    } else {
        let sa = random_simulate(a, &ra, 4096, 0x5eed);
        let sb = random_simulate(b, &rb, 4096, 0x5eed);
        (sa.outputs == sb.outputs).then_some(Verification::RandomSimulation)
    }
}

/// Inflate, simplify and deflate until no move improves the target or the
/// round budget is spent. The result is never worse than the input under
/// the target, and is checked against the input before being returned.
pub fn alg1_optimize(net: &Network, config: &OptimizeConfig) -> OptimizeReport {
    let mut cur = net.compact();
    let existing = cur.maj_cone(&cur.output_edges()).iter().map(|&id| cur.arity(id)).max().unwrap_or(3);
    let cap = config.max_arity.max(existing) | 1;
    cur.set_max_arity(cap).expect("odd cap");
    if config.trace {
        cur.enable_trace();
    }
    let before = cur.output_metrics();
    let mut opt = Optimizer { target: config.target, rng: ChaCha8Rng::seed_from_u64(config.seed) };
    let mut trace = Vec::new();
    let mut moves = 0;
    let mut rounds = 0;

    let (simple, ev) = finish(cur.clone());
    if opt.better(&simple, key_of(&cur, config.target)) {
        cur = simple;
        trace.extend(ev);
        moves += 1;
    }

    for _ in 0..config.effort_rounds.max(1) {
        rounds += 1;
        let mut changed = false;
        let mut idx = 0;
        loop {
            let cone = cur.maj_cone(&cur.output_edges());
            let Some(&v) = cone.get(idx) else { break };
            match opt.best_move(&cur, v) {
                Some((w, ev)) => {
                    cur = w;
                    trace.extend(ev);
                    moves += 1;
                    changed = true;
                }
                None => idx += 1,
            }
        }
        if !changed {
            break;
        }
    }

    let mut result = cur;
    let verification = match verify(net, &result) {
        Some(v) => v,
        None => {
            result = net.compact();
            Verification::Reverted
        }
    };
    result.set_max_arity(cap).expect("odd cap");
    let after = result.output_metrics();
    OptimizeReport { network: result, before, after, rounds, moves, verification, trace }
}

#[derive(Clone, Debug)]
pub struct Rebalanced {
    pub network: Network,
    pub root: Edge,
    /// Majority nodes on the longest path from the late input to the root,
    /// before and after.
    pub before: usize,
    pub after: usize,
}

fn late_depth(net: &Network, root: Edge, late: NodeId) -> usize {
    net.path_depth_from(root, late).unwrap_or(0)
}

/// One distributivity step at `v` pulling the late input up through the
/// majority child at `pos`.
fn pull_up(w: &mut Network, v: NodeId, pos: usize, late: NodeId) -> Option<Edge> {
    let n = w.arity(v);
    let mut ch = w.children(v).to_vec();
    let mut child = ch[pos];
    if !w.is_maj(child.node()) || w.arity(child.node()) != n {
        return None;
    }
    if child.is_complemented() {
        child = inv_propagate(w, child).ok()?;
        if !w.is_maj(child.node()) || w.arity(child.node()) != n || child.is_complemented() {
            return None;
        }
    }
    ch[pos] = child;
    let outer = w.make_maj_exact(&ch).ok()?;
    let pos = w.children(outer.node()).iter().position(|&c| c == child)?;
    let inner = w.children(child.node()).to_vec();
    let mut keep: Vec<usize> = (0..n).filter(|&i| w.depends_on(inner[i], late)).collect();
    if keep.is_empty() || keep.len() > n / 2 {
        return None;
    }
    for i in (0..n).rev() {
        if keep.len() == n / 2 {
            break;
        }
        if !keep.contains(&i) {
            keep.push(i);
        }
    }
    distribute_in_keeping(w, outer.node(), pos, &keep).ok()
}

/// Reduce the number of majority nodes between `late` and `root` with
/// distributivity, keeping the late operand outside the distributed copies.
/// Only steps that lower the late-input depth are kept.
pub fn rebalance_late_input(net: &Network, root: Edge, late: &str) -> Result<Rebalanced, NetError> {
    let late_edge = net.input(late).ok_or_else(|| NetError::UnknownInput(late.to_string()))?;
    let late_id = late_edge.node();
    let mut cur = net.clone();
    let mut root_now = root;
    let before = late_depth(&cur, root_now, late_id);
    let mut depth = before;

    'search: while depth > 1 {
        let mut path: Vec<NodeId> = cur
            .maj_cone(&[root_now])
            .into_iter()
            .filter(|&id| cur.path_depth_from(id.into(), late_id).is_some_and(|d| d >= 2))
            .collect();
        path.reverse();
        for v in path {
            for pos in 0..cur.arity(v) {
                let c = cur.children(v)[pos];
                if !cur.depends_on(c, late_id) {
                    continue;
                }
                let mut w = cur.clone();
                let Some(e) = pull_up(&mut w, v, pos, late_id) else { continue };
                let new_root = if v == root_now.node() {
                    e.xor(root_now.is_complemented())
                } else {
                    let Ok(r) = w.rebuild(&[root_now], &HashMap::from([(v, e)])) else { continue };
                    r[0]
                };
                let d = late_depth(&w, new_root, late_id);
                if d < depth {
                    cur = w;
                    root_now = new_root;
                    depth = d;
                    continue 'search;
                }
            }
        }
        break;
    }

    for i in 0..cur.outputs().len() {
        if cur.outputs()[i].1 == root {
            cur.set_output_edge(i, root_now)?;
        }
    }
    let (network, roots) = cur.compact_with_roots(&[root_now]);
    Ok(Rebalanced { network, root: roots[0], before, after: depth })
}
