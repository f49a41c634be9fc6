//! Oriented, local rewrite rules over majority nodes.
//!
//! Each rule takes a node (or an edge for inverter propagation) and returns
//! an edge computing the same function, or reports that its pattern does not
//! match. Rules never redirect references themselves; callers apply a result
//! with [`Network::substitute`]. Pattern matching is syntactic: two operands
//! are "equal" when they are the same [`Edge`].

use std::collections::HashMap;

use thiserror::Error;

use crate::net::{complementary_pair, threshold_edge, Edge, NetError, Network, NodeId};
use crate::trace::RuleTag;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

pub type RewriteResult = Result<Edge, RewriteError>;

fn not_applicable<T>(why: impl Into<String>) -> Result<T, RewriteError> {
    Err(RewriteError::NotApplicable(why.into()))
}

/// A rule instance: the rule family plus the parameters selecting one match.
/// Child positions refer to the canonical child order of the node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RewriteRule {
    Commute,
    MajThreshold,
    MajAnnihilate,
    ArityInflate { filler: Edge },
    ArityDeflate,
    AssocSwap { inner: usize, x: usize, y: usize },
    DistributeIn { inner: usize, wrap_count: usize },
    /// Unwrap one distributed child (`factor == false`) or factor the whole
    /// distributed group back into a single inner majority.
    DistributeOut { factor: bool },
    InvPropagate,
    RelevanceSubst { target: usize, pivot: usize, replaced: usize },
}

impl RewriteRule {
    pub fn tag(&self) -> RuleTag {
        match self {
            RewriteRule::Commute => RuleTag::Commute,
            RewriteRule::MajThreshold => RuleTag::MajThreshold,
            RewriteRule::MajAnnihilate => RuleTag::MajAnnihilate,
            RewriteRule::ArityInflate { .. } => RuleTag::ArityInflate,
            RewriteRule::ArityDeflate => RuleTag::ArityDeflate,
            RewriteRule::AssocSwap { .. } => RuleTag::AssocSwap,
            RewriteRule::DistributeIn { .. } => RuleTag::DistributeIn,
            RewriteRule::DistributeOut { .. } => RuleTag::DistributeOut,
            RewriteRule::InvPropagate => RuleTag::InvPropagate,
            RewriteRule::RelevanceSubst { .. } => RuleTag::RelevanceSubst,
        }
    }

    /// Apply this instance at `node`; the result computes the node's
    /// function.
    pub fn apply(&self, net: &mut Network, node: NodeId) -> RewriteResult {
        match *self {
            RewriteRule::Commute => commute_canonicalize(net, node),
            RewriteRule::MajThreshold => maj_threshold(net, node),
            RewriteRule::MajAnnihilate => maj_annihilate(net, node),
            RewriteRule::ArityInflate { filler } => arity_inflate(net, node, filler),
            RewriteRule::ArityDeflate => arity_deflate(net, node),
            RewriteRule::AssocSwap { inner, x, y } => assoc_swap(net, node, inner, x, y),
            RewriteRule::DistributeIn { inner, wrap_count } => distribute_in(net, node, inner, wrap_count),
            RewriteRule::DistributeOut { factor: false } => distribute_out(net, node),
            RewriteRule::DistributeOut { factor: true } => distribute_factor(net, node),
            RewriteRule::InvPropagate => {
                if !net.is_maj(node) {
                    return not_applicable("inverter propagation needs a majority node");
                }
                Ok(!inv_propagate(net, Edge::new(node, true))?)
            }
            RewriteRule::RelevanceSubst { target, pivot, replaced } => {
                relevance_subst(net, node, target, pivot, replaced)
            }
        }
    }
}

fn maj_children(net: &Network, node: NodeId) -> Result<Vec<Edge>, RewriteError> {
    if !net.is_maj(node) {
        return not_applicable(format!("{node} is not a majority node"));
    }
    Ok(net.children(node).to_vec())
}

fn note(net: &mut Network, rule: RuleTag, node: NodeId, result: Edge) {
    if net.tracing() {
        let detail = format!("{} -> {}", net.node_label(node), describe(net, result));
        net.record(rule, Some(node), detail);
    }
}

fn describe(net: &Network, e: Edge) -> String {
    if net.is_maj(e.node()) {
        let s = net.node_label(e.node());
        if e.is_complemented() {
            format!("!{s}")
        } else {
            s
        }
    } else {
        net.edge_label(e)
    }
}

/// Remove the sorted multiset `b` from the sorted multiset `a`; `None` if
/// `b` is not contained in `a`.
pub(crate) fn multiset_minus(a: &[Edge], b: &[Edge]) -> Option<Vec<Edge>> {
    let mut out = Vec::with_capacity(a.len().saturating_sub(b.len()));
    let mut j = 0;
    for &x in a {
        if j < b.len() && b[j] == x {
            j += 1;
        } else if j < b.len() && b[j] < x {
            return None;
        } else {
            out.push(x);
        }
    }
    (j == b.len()).then_some(out)
}

fn without(ch: &[Edge], positions: &[usize]) -> Vec<Edge> {
    ch.iter().enumerate().filter(|(i, _)| !positions.contains(i)).map(|(_, &e)| e).collect()
}

/// Children in canonical order. Nodes are always stored canonically, so the
/// result is the node itself; the rule exists for completeness of the rule
/// set.
pub fn commute_canonicalize(net: &mut Network, node: NodeId) -> RewriteResult {
    let mut ch = maj_children(net, node)?;
    ch.sort_unstable();
    Ok(net.make_maj_exact(&ch)?)
}

/// `M_n(x)` where ⌈n/2⌉ operands are the same edge `y` → `y`.
pub fn maj_threshold(net: &mut Network, node: NodeId) -> RewriteResult {
    let ch = maj_children(net, node)?;
    match threshold_edge(&ch) {
        Some(e) => {
            note(net, RuleTag::MajThreshold, node, e);
            Ok(e)
        }
        None => not_applicable("no operand reaches the threshold"),
    }
}

/// Remove one complementary operand pair: `M_n → M_{n-2}`, and
/// `M_3(x, y, ¬y) → x` at the boundary.
pub fn maj_annihilate(net: &mut Network, node: NodeId) -> RewriteResult {
    let mut ch = maj_children(net, node)?;
    let Some(i) = complementary_pair(&ch) else {
        return not_applicable("no complementary operand pair");
    };
    ch.drain(i..i + 2);
    let e = if ch.len() == 1 { ch[0] } else { net.make_maj_exact(&ch)? };
    note(net, RuleTag::MajAnnihilate, node, e);
    Ok(e)
}

/// `M_n(x) → M_{n+2}(x, filler, ¬filler)`.
pub fn arity_inflate(net: &mut Network, node: NodeId, filler: Edge) -> RewriteResult {
    let mut ch = maj_children(net, node)?;
    net.check_edge(filler)?;
    if ch.len() + 2 > net.max_arity() {
        return Err(NetError::Arity { arity: ch.len() + 2, max: net.max_arity() }.into());
    }
    ch.push(filler);
    ch.push(!filler);
    let e = net.make_maj_exact(&ch)?;
    note(net, RuleTag::ArityInflate, node, e);
    Ok(e)
}

/// Remove complementary pairs until none is left.
pub fn arity_deflate(net: &mut Network, node: NodeId) -> RewriteResult {
    let mut ch = maj_children(net, node)?;
    let before = ch.len();
    while let Some(i) = complementary_pair(&ch) {
        ch.drain(i..i + 2);
        if ch.len() == 1 {
            break;
        }
    }
    if ch.len() == before {
        return not_applicable("no complementary operand pair");
    }
    let e = if ch.len() == 1 { ch[0] } else { net.make_maj_exact(&ch)? };
    note(net, RuleTag::ArityDeflate, node, e);
    Ok(e)
}

/// The inner majority child at `inner`, which must be an uncomplemented
/// majority of the same arity as `outer`.
fn same_arity_inner(net: &Network, outer: &[Edge], inner: usize) -> Result<Vec<Edge>, RewriteError> {
    let Some(&e) = outer.get(inner) else {
        return not_applicable(format!("no child at position {inner}"));
    };
    if e.is_complemented() || !net.is_maj(e.node()) || net.arity(e.node()) != outer.len() {
        return not_applicable("inner child is not an uncomplemented majority of the same arity");
    }
    Ok(net.children(e.node()).to_vec())
}

/// `M_n(z, y, M_n(z, x, w)) → M_n(z, x, M_n(z, y, w))`, where `y` is the
/// outer child at `y_pos`, `x` the inner child at `x_pos`, and the shared
/// `z` has n−2 operands.
pub fn assoc_swap(net: &mut Network, outer: NodeId, inner_pos: usize, x_pos: usize, y_pos: usize) -> RewriteResult {
    let ch = maj_children(net, outer)?;
    let inner = same_arity_inner(net, &ch, inner_pos)?;
    if y_pos == inner_pos || y_pos >= ch.len() || x_pos >= inner.len() {
        return not_applicable("bad operand positions");
    }
    let (y, x) = (ch[y_pos], inner[x_pos]);
    let z = without(&ch, &[inner_pos, y_pos]);
    let Some(w) = multiset_minus(&without(&inner, &[x_pos]), &z) else {
        return not_applicable("outer and inner do not share n-2 operands");
    };
    debug_assert_eq!(w.len(), 1);
    let mut new_inner = z.clone();
    new_inner.extend([y, w[0]]);
    let new_inner = net.make_maj(&new_inner)?;
    let mut new_outer = z;
    new_outer.extend([x, new_inner]);
    let e = net.make_maj(&new_outer)?;
    note(net, RuleTag::AssocSwap, outer, e);
    Ok(e)
}

/// `M_n(x_1^{n-1}, M_n(y)) → M_n(M_n(x, y_1), …, M_n(x, y_k), y_{k+1}, …, y_n)`
/// with `k = wrap_count` ∈ [⌈n/2⌉, n−1], wrapping the first `k` inner
/// operands in canonical order.
pub fn distribute_in(net: &mut Network, outer: NodeId, inner_pos: usize, wrap_count: usize) -> RewriteResult {
    let n = maj_children(net, outer)?.len();
    if wrap_count < n.div_ceil(2) || wrap_count > n - 1 {
        return not_applicable(format!("wrap count {wrap_count} outside [{}, {}]", n.div_ceil(2), n - 1));
    }
    let keep: Vec<usize> = (wrap_count..n).collect();
    distribute_in_keeping(net, outer, inner_pos, &keep)
}

/// [`distribute_in`] with an explicit choice of the inner operand positions
/// left unwrapped; between 1 and ⌊n/2⌋ of them.
pub fn distribute_in_keeping(net: &mut Network, outer: NodeId, inner_pos: usize, keep: &[usize]) -> RewriteResult {
    let ch = maj_children(net, outer)?;
    let n = ch.len();
    let inner = same_arity_inner(net, &ch, inner_pos)?;
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.len() > n / 2 || keep.iter().any(|&k| k >= n) {
        return not_applicable("unwrapped operand count must be in [1, n/2]");
    }
    let x = without(&ch, &[inner_pos]);
    let mut top = Vec::with_capacity(n);
    for (i, &y) in inner.iter().enumerate() {
        if keep.contains(&i) {
            top.push(y);
        } else {
            let mut wrapped = x.clone();
            wrapped.push(y);
            top.push(net.make_maj(&wrapped)?);
        }
    }
    let e = net.make_maj(&top)?;
    note(net, RuleTag::DistributeIn, outer, e);
    Ok(e)
}

/// A group of distributed children: the shared (n−1)-operand multiset and,
/// for each member position, its residual operand.
struct DistGroup {
    shared: Vec<Edge>,
    members: Vec<(usize, Edge)>,
}

fn distributed_group(net: &Network, ch: &[Edge]) -> Option<DistGroup> {
    let n = ch.len();
    let wrapped = |e: Edge| !e.is_complemented() && net.is_maj(e.node()) && net.arity(e.node()) == n;
    let mut best: Option<DistGroup> = None;
    for &seed in ch.iter().filter(|&&e| wrapped(e)) {
        let seed_ch = net.children(seed.node());
        for r in 0..n {
            if r > 0 && seed_ch[r] == seed_ch[r - 1] {
                continue;
            }
            let shared = without(seed_ch, &[r]);
            if best.as_ref().is_some_and(|b| b.shared == shared) {
                continue;
            }
            let members: Vec<(usize, Edge)> = ch
                .iter()
                .enumerate()
                .filter(|&(_, &e)| wrapped(e))
                .filter_map(|(i, &e)| multiset_minus(net.children(e.node()), &shared).map(|rest| (i, rest[0])))
                .collect();
            if best.as_ref().is_none_or(|b| members.len() > b.members.len()) {
                best = Some(DistGroup { shared, members });
            }
        }
    }
    best
}

/// Unwrap one distributed child:
/// `M_n(M_n(x, y_1), …, M_n(x, y_k), y_{k+1}, …) → M_n(M_n(x, y_1), …, M_n(x, y_{k-1}), y_k, …)`
/// when `k − 1 ≥ ⌈n/2⌉`. Both sides equal `M_n(x, M_n(y))`; one majority
/// operator is saved. The last member in canonical order is unwrapped.
pub fn distribute_out(net: &mut Network, node: NodeId) -> RewriteResult {
    let mut ch = maj_children(net, node)?;
    let n = ch.len();
    let group = match distributed_group(net, &ch) {
        Some(g) if g.members.len() > n.div_ceil(2) => g,
        _ => return not_applicable("fewer than ⌈n/2⌉+1 distributed children"),
    };
    let &(pos, residual) = group.members.last().expect("group is non-empty");
    ch[pos] = residual;
    let e = net.make_maj(&ch)?;
    note(net, RuleTag::DistributeOut, node, e);
    Ok(e)
}

/// Factor a distributed group of k ≥ ⌈n/2⌉ children completely:
/// `M_n(M_n(x, y_1), …, M_n(x, y_k), y_{k+1}, …, y_n) → M_n(x, M_n(y))`.
pub fn distribute_factor(net: &mut Network, node: NodeId) -> RewriteResult {
    let ch = maj_children(net, node)?;
    let n = ch.len();
    let group = match distributed_group(net, &ch) {
        Some(g) if g.members.len() >= n.div_ceil(2) => g,
        _ => return not_applicable("fewer than ⌈n/2⌉ distributed children"),
    };
    let member_pos: Vec<usize> = group.members.iter().map(|&(p, _)| p).collect();
    let mut inner: Vec<Edge> = group.members.iter().map(|&(_, r)| r).collect();
    inner.extend(without(&ch, &member_pos));
    let inner = net.make_maj(&inner)?;
    let mut top = group.shared;
    top.push(inner);
    let e = net.make_maj(&top)?;
    note(net, RuleTag::DistributeOut, node, e);
    Ok(e)
}

/// `¬M_n(x) → M_n(¬x)`. `edge` must be a complemented edge into a majority
/// node; the result is an uncomplemented edge.
pub fn inv_propagate(net: &mut Network, edge: Edge) -> RewriteResult {
    if !edge.is_complemented() {
        return not_applicable("edge is not complemented");
    }
    let ch = maj_children(net, edge.node())?;
    let flipped: Vec<Edge> = ch.iter().map(|&c| !c).collect();
    let e = net.make_maj(&flipped)?;
    note(net, RuleTag::InvPropagate, edge.node(), e);
    Ok(e)
}

/// Relevance substitution.
///
/// The operand at `target` only influences `M_n` when the other n−1
/// operands are tied. If the operand at `pivot` occurs exactly (n−1)/2
/// times among them, a tie forces every other one of them to equal its
/// complement. So inside the cone of the target operand, the node of the
/// operand at `replaced` may be replaced by the complement of the pivot.
/// For n = 3 this is `M(x, y, z) = M(x, y, z[x/¬y])`.
pub fn relevance_subst(net: &mut Network, node: NodeId, target: usize, pivot: usize, replaced: usize) -> RewriteResult {
    let ch = maj_children(net, node)?;
    let n = ch.len();
    if target >= n || pivot >= n || replaced >= n || target == pivot || target == replaced {
        return not_applicable("bad operand positions");
    }
    let y = ch[pivot];
    let x = ch[replaced];
    if x == y {
        return not_applicable("replaced operand equals the pivot");
    }
    if x.is_constant() {
        return not_applicable("constants are not substituted");
    }
    let others = without(&ch, &[target]);
    if others.iter().filter(|&&e| e == y).count() != (n - 1) / 2 {
        return not_applicable("pivot does not occupy exactly half of the other operands");
    }
    // x = ¬y under a tie, so node(x) = ¬y xor complement(x).
    let image = (!y).xor(x.is_complemented());
    let map = HashMap::from([(x.node(), image)]);
    let new_target = net.rebuild(&[ch[target]], &map)?[0];
    if new_target == ch[target] {
        return Ok(node.into());
    }
    let mut new_ch = ch;
    new_ch[target] = new_target;
    let e = net.make_maj(&new_ch)?;
    note(net, RuleTag::RelevanceSubst, node, e);
    Ok(e)
}

/// Every rule instance whose pattern matches at `node`. Instances that
/// would only reproduce the node itself are omitted, except commutativity.
pub fn applicable_rules(net: &Network, node: NodeId) -> Vec<RewriteRule> {
    let mut out = Vec::new();
    if !net.is_maj(node) {
        return out;
    }
    let ch = net.children(node).to_vec();
    let n = ch.len();
    out.push(RewriteRule::Commute);
    out.push(RewriteRule::InvPropagate);
    if threshold_edge(&ch).is_some() {
        out.push(RewriteRule::MajThreshold);
    }
    if complementary_pair(&ch).is_some() {
        out.push(RewriteRule::MajAnnihilate);
        out.push(RewriteRule::ArityDeflate);
    }
    if n + 2 <= net.max_arity() {
        let mut fillers = ch.clone();
        fillers.push(Edge::ZERO);
        fillers.sort_unstable();
        fillers.dedup();
        out.extend(fillers.into_iter().map(|filler| RewriteRule::ArityInflate { filler }));
    }
    for (inner, &ie) in ch.iter().enumerate() {
        if ie.is_complemented() || !net.is_maj(ie.node()) || net.arity(ie.node()) != n {
            continue;
        }
        if inner > 0 && ch[inner - 1] == ie {
            continue;
        }
        let inner_ch = net.children(ie.node()).to_vec();
        for wrap_count in n.div_ceil(2)..n {
            out.push(RewriteRule::DistributeIn { inner, wrap_count });
        }
        for y in 0..n {
            if y == inner || (y > 0 && ch[y - 1] == ch[y] && y - 1 != inner) {
                continue;
            }
            let z = without(&ch, &[inner, y]);
            for x in 0..n {
                if x > 0 && inner_ch[x - 1] == inner_ch[x] {
                    continue;
                }
                if multiset_minus(&without(&inner_ch, &[x]), &z).is_some() {
                    out.push(RewriteRule::AssocSwap { inner, x, y });
                }
            }
        }
    }
    if let Some(g) = distributed_group(net, &ch) {
        if g.members.len() > n.div_ceil(2) {
            out.push(RewriteRule::DistributeOut { factor: false });
        }
        if g.members.len() >= n.div_ceil(2) {
            out.push(RewriteRule::DistributeOut { factor: true });
        }
    }
    let mut counts: HashMap<Edge, usize> = HashMap::new();
    for target in 0..n {
        if target > 0 && ch[target] == ch[target - 1] {
            continue;
        }
        let cone = net.cone(&[ch[target]]);
        counts.clear();
        for (i, &e) in ch.iter().enumerate() {
            if i != target {
                *counts.entry(e).or_default() += 1;
            }
        }
        for (pivot, &y) in ch.iter().enumerate() {
            if pivot == target || counts[&y] != (n - 1) / 2 || ch[..pivot].iter().enumerate().any(|(i, &e)| e == y && i != target) {
                continue;
            }
            for (replaced, &x) in ch.iter().enumerate() {
                if replaced == target || x == y || x.is_constant() || cone.binary_search(&x.node()).is_err() {
                    continue;
                }
                if ch[..replaced].iter().enumerate().any(|(i, &e)| e == x && i != target) {
                    continue;
                }
                out.push(RewriteRule::RelevanceSubst { target, pivot, replaced });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::expr::build_exact;
    use crate::oracle::simulate;

    fn setup(names: &str) -> Network {
        let mut net = Network::new();
        for n in names.split_whitespace() {
            net.add_input(n).unwrap();
        }
        net
    }

    fn build(net: &mut Network, text: &str) -> Edge {
        build_exact(net, text).unwrap()
    }

    fn pos(net: &Network, node: Edge, child: Edge) -> usize {
        net.children(node.node()).iter().position(|&e| e == child).expect("child present")
    }

    fn assert_same_function(net: &Network, a: Edge, b: Edge) {
        assert_eq!(simulate(net, a).unwrap(), simulate(net, b).unwrap());
    }

    #[test]
    fn commute_examples() {
        let mut net = setup("a b c d e");
        let shuffled = build(&mut net, "M5(b,a,c,d,e)");
        let sorted = build(&mut net, "M5(a,b,c,d,e)");
        let swapped = build(&mut net, "M5(a,b,c,e,d)");
        assert_eq!(commute_canonicalize(&mut net, shuffled.node()).unwrap(), sorted);
        assert_eq!(commute_canonicalize(&mut net, sorted.node()).unwrap(), sorted);
        assert_eq!(commute_canonicalize(&mut net, swapped.node()).unwrap(), sorted);
        let a = net.input("a").unwrap().node();
        assert!(commute_canonicalize(&mut net, a).is_err());
    }

    #[test]
    fn threshold_examples() {
        let mut net = setup("x z a b c");
        let f = build(&mut net, "M3(x,x,z)");
        assert_eq!(maj_threshold(&mut net, f.node()).unwrap(), net.input("x").unwrap());
        let g = build(&mut net, "M5(a,a,a,b,c)");
        assert_eq!(maj_threshold(&mut net, g.node()).unwrap(), net.input("a").unwrap());
        let h = build(&mut net, "M5(1,1,1,a,b)");
        assert_eq!(maj_threshold(&mut net, h.node()).unwrap(), Edge::ONE);
        let irreducible = build(&mut net, "M3(a,b,c)");
        assert!(matches!(maj_threshold(&mut net, irreducible.node()), Err(RewriteError::NotApplicable(_))));
    }

    #[test]
    fn annihilate_examples() {
        let mut net = setup("a b c d e g x y");
        let m7 = build(&mut net, "M7(a,b,c,d,e,g,!g)");
        let m5 = build(&mut net, "M5(a,b,c,d,e)");
        assert_eq!(maj_annihilate(&mut net, m7.node()).unwrap(), m5);

        let boundary = build(&mut net, "M3(x,y,!y)");
        assert_eq!(maj_annihilate(&mut net, boundary.node()).unwrap(), net.input("x").unwrap());

        let twice = build(&mut net, "M5(a,!a,b,!b,c)");
        let once = maj_annihilate(&mut net, twice.node()).unwrap();
        assert_eq!(net.arity(once.node()), 3);
        let result = maj_annihilate(&mut net, once.node()).unwrap();
        assert_eq!(result, net.input("c").unwrap());
        assert_same_function(&net, twice, result);
    }

    #[test]
    fn inflate_examples() {
        let mut net = setup("a b c x");
        let m3 = build(&mut net, "M3(a,b,c)");
        let x = net.input("x").unwrap();
        let inflated = arity_inflate(&mut net, m3.node(), x).unwrap();
        assert_eq!(inflated, build(&mut net, "M5(a,b,c,x,!x)"));
        let c = net.input("c").unwrap();
        let with_c = arity_inflate(&mut net, m3.node(), c).unwrap();
        assert_eq!(with_c, build(&mut net, "M5(a,b,c,!c,c)"));
        assert_same_function(&net, m3, with_c);
        assert_eq!(maj_annihilate(&mut net, inflated.node()).unwrap(), m3);
        assert_eq!(arity_deflate(&mut net, with_c.node()).unwrap(), m3);
    }

    #[test]
    fn inflate_respects_cap() {
        let mut net = Network::with_max_arity(5).unwrap();
        for n in ["a", "b", "c", "d", "e"] {
            net.add_input(n).unwrap();
        }
        let m5 = build(&mut net, "M5(a,b,c,d,e)");
        let a = net.input("a").unwrap();
        assert!(matches!(arity_inflate(&mut net, m5.node(), a), Err(RewriteError::Net(NetError::Arity { .. }))));
    }

    #[test]
    fn assoc_examples() {
        let mut net = setup("a b c d g h");
        let f = build(&mut net, "M5(a,b,c,d,M5(a,b,c,g,h))");
        let inner = build(&mut net, "M5(a,b,c,g,h)");
        let (d, g) = (net.input("d").unwrap(), net.input("g").unwrap());
        let (ip, yp) = (pos(&net, f, inner), pos(&net, f, d));
        let xp = pos(&net, inner, g);
        let out = assoc_swap(&mut net, f.node(), ip, xp, yp).unwrap();
        assert_eq!(out, build(&mut net, "M5(a,b,c,g,M5(a,b,c,d,h))"));
        assert_same_function(&net, f, out);

        let mut net = setup("x u y z");
        let f = build(&mut net, "M3(x,u,M3(y,u,z))");
        let inner = build(&mut net, "M3(y,u,z)");
        let (x, z) = (net.input("x").unwrap(), net.input("z").unwrap());
        let (ip, yp, xp) = (pos(&net, f, inner), pos(&net, f, x), pos(&net, inner, z));
        let out = assoc_swap(&mut net, f.node(), ip, xp, yp).unwrap();
        assert_eq!(out, build(&mut net, "M3(z,u,M3(y,u,x))"));
    }

    #[test]
    fn assoc_requires_n_minus_2_shared() {
        let mut net = setup("a b c d g h k");
        let f = build(&mut net, "M5(a,b,k,d,M5(a,b,c,g,h))");
        let inner = build(&mut net, "M5(a,b,c,g,h)");
        let ip = pos(&net, f, inner);
        for y in 0..5 {
            for x in 0..5 {
                if y != ip {
                    assert!(matches!(assoc_swap(&mut net, f.node(), ip, x, y), Err(RewriteError::NotApplicable(_))));
                }
            }
        }
    }

    #[test]
    fn distribute_in_examples() {
        let mut net = setup("a b c d e g x y z w k t v");
        let f = build(&mut net, "M7(a,b,c,d,e,g,M7(x,y,z,w,k,t,v))");
        let inner = build(&mut net, "M7(x,y,z,w,k,t,v)");
        let ip = pos(&net, f, inner);
        let out = distribute_in(&mut net, f.node(), ip, 4).unwrap();
        let expected = build(
            &mut net,
            "M7(M7(a,b,c,d,e,g,x),M7(a,b,c,d,e,g,y),M7(a,b,c,d,e,g,z),M7(a,b,c,d,e,g,w),k,t,v)",
        );
        assert_eq!(out, expected);
        for wrap in 4..=6 {
            let e = distribute_in(&mut net, f.node(), ip, wrap).unwrap();
            assert_same_function(&net, f, e);
        }
        assert!(distribute_in(&mut net, f.node(), ip, 3).is_err());
        assert!(distribute_in(&mut net, f.node(), ip, 7).is_err());

        let mut net = setup("x y u v z");
        let f = build(&mut net, "M3(x,y,M3(u,v,z))");
        let inner = build(&mut net, "M3(u,v,z)");
        let ip = pos(&net, f, inner);
        let out = distribute_in(&mut net, f.node(), ip, 2).unwrap();
        assert_eq!(out, build(&mut net, "M3(M3(x,y,u),M3(x,y,v),z)"));
    }

    #[test]
    fn distribute_out_example() {
        let mut net = setup("a b c d e g h x");
        let f = build(&mut net, "M5(M5(a,b,c,x,!x),M5(a,b,d,x,!x),M5(a,b,e,x,!x),M5(a,b,g,x,!x),h)");
        let out = distribute_out(&mut net, f.node()).unwrap();
        let expected = build(&mut net, "M5(M5(a,b,c,x,!x),M5(a,b,d,x,!x),M5(a,b,e,x,!x),g,h)");
        assert_eq!(out, expected);
        assert_same_function(&net, f, out);
        // three members left: cannot unwrap further, but can factor
        assert!(distribute_out(&mut net, out.node()).is_err());
        let factored = distribute_factor(&mut net, out.node()).unwrap();
        assert_same_function(&net, f, factored);
        assert_eq!(net.metrics(&[factored]).size, 2);
    }

    #[test]
    fn distribute_out_needs_shared_operands() {
        let mut net = setup("a b c d e g h");
        let f = build(&mut net, "M5(M3(a,b,c),M3(d,e,g),h,a,b)");
        assert!(matches!(distribute_out(&mut net, f.node()), Err(RewriteError::NotApplicable(_))));
    }

    #[test]
    fn distribute_round_trip() {
        let mut net = setup("x1 x2 x3 x4 z1 z2 z3 z4 z5");
        let f = build(&mut net, "M5(x1,x2,x3,x4,M5(z1,z2,z3,z4,z5))");
        let inner = build(&mut net, "M5(z1,z2,z3,z4,z5)");
        let ip = pos(&net, f, inner);
        let wrapped = distribute_in(&mut net, f.node(), ip, 4).unwrap();
        let peeled = distribute_out(&mut net, wrapped.node()).unwrap();
        assert_same_function(&net, f, peeled);
        let back = distribute_factor(&mut net, peeled.node()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn inv_propagate_examples() {
        let mut net = setup("a b c d e g h x y");
        let m9 = build(&mut net, "M9(a,b,c,d,e,g,h,x,y)");
        let out = inv_propagate(&mut net, !m9).unwrap();
        assert!(!out.is_complemented());
        assert_eq!(out, build(&mut net, "M9(!a,!b,!c,!d,!e,!g,!h,!x,!y)"));
        assert_same_function(&net, !m9, out);
        let back = inv_propagate(&mut net, !out).unwrap();
        assert_eq!(back, m9);
        assert!(inv_propagate(&mut net, m9).is_err());
        let a = net.input("a").unwrap();
        assert!(inv_propagate(&mut net, !a).is_err());
    }

    #[test]
    fn relevance_classic_form() {
        // M(x, y, z) = M(x, y, z[x/!y])
        let mut net = setup("x y p q");
        let f = build(&mut net, "M3(x,y,M3(x,p,q))");
        let inner = build(&mut net, "M3(x,p,q)");
        let (x, y) = (net.input("x").unwrap(), net.input("y").unwrap());
        let (t, pv, r) = (pos(&net, f, inner), pos(&net, f, y), pos(&net, f, x));
        let out = relevance_subst(&mut net, f.node(), t, pv, r).unwrap();
        assert_eq!(out, build(&mut net, "M3(x,y,M3(!y,p,q))"));
        assert_same_function(&net, f, out);
    }

    #[test]
    fn relevance_without_occurrence_is_identity() {
        let mut net = setup("x y p q");
        let f = build(&mut net, "M3(x,y,M3(p,q,!p))");
        let inner = build(&mut net, "M3(p,q,!p)");
        let (x, y) = (net.input("x").unwrap(), net.input("y").unwrap());
        let (t, pv, r) = (pos(&net, f, inner), pos(&net, f, y), pos(&net, f, x));
        assert_eq!(relevance_subst(&mut net, f.node(), t, pv, r).unwrap(), f);
    }

    #[test]
    fn relevance_five_ary() {
        let mut net = setup("a b c");
        let f = build(&mut net, "M5(a,!M3(a,b,c),!M3(a,b,c),M3(a,b,c),M3(!a,b,c))");
        for rule in applicable_rules(&net, f.node()) {
            if let RewriteRule::RelevanceSubst { .. } = rule {
                let e = rule.apply(&mut net, f.node()).unwrap();
                assert_same_function(&net, f, e);
            }
        }
    }

    #[test]
    fn relevance_rejects_bad_pivot() {
        let mut net = setup("a b c d e");
        let f = build(&mut net, "M5(a,b,c,d,M3(a,b,e))");
        // pivot `b` occurs once, not twice, among the other four operands
        let inner = build(&mut net, "M3(a,b,e)");
        let (a, b) = (net.input("a").unwrap(), net.input("b").unwrap());
        let (t, pv, r) = (pos(&net, f, inner), pos(&net, f, b), pos(&net, f, a));
        assert!(matches!(relevance_subst(&mut net, f.node(), t, pv, r), Err(RewriteError::NotApplicable(_))));
    }

    #[test]
    fn every_applicable_rule_is_sound_on_worked_formulas() {
        let mut net = setup("a b c d e g h");
        let roots = [
            "M5(M3(a,b,c),M3(a,b,d),M3(a,b,e),M3(a,b,g),h)",
            "M5(M3(a,b,c),M5(M5(a,b,c,0,0),!b,c,0,0),!a,!b,0)",
            "M3(a,!M3(a,b,c),M3(!a,b,c))",
            "M5(a,b,c,d,M5(a,b,c,g,h))",
        ];
        for text in roots {
            let f = build(&mut net, text);
            for id in net.maj_cone(&[f]) {
                for rule in applicable_rules(&net, id) {
                    let e = rule.apply(&mut net, id).unwrap();
                    assert_same_function(&net, id.into(), e);
                }
            }
        }
    }
}
