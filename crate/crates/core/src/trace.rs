//! Rewrite trace records.

use std::fmt;

use crate::net::NodeId;

/// Identifies which rewrite rule produced a trace event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleTag {
    Commute,
    MajThreshold,
    MajAnnihilate,
    ArityInflate,
    ArityDeflate,
    AssocSwap,
    DistributeIn,
    DistributeOut,
    InvPropagate,
    RelevanceSubst,
    /// Child replacement validated by simulation of the node's support.
    Resubstitute,
    /// Input fixed to a constant during SAT branching.
    Cofactor,
}

impl RuleTag {
    pub fn name(self) -> &'static str {
        match self {
            RuleTag::Commute => "commute",
            RuleTag::MajThreshold => "maj-threshold",
            RuleTag::MajAnnihilate => "maj-annihilate",
            RuleTag::ArityInflate => "arity-inflate",
            RuleTag::ArityDeflate => "arity-deflate",
            RuleTag::AssocSwap => "assoc-swap",
            RuleTag::DistributeIn => "distribute-in",
            RuleTag::DistributeOut => "distribute-out",
            RuleTag::InvPropagate => "inv-propagate",
            RuleTag::RelevanceSubst => "relevance-subst",
            RuleTag::Resubstitute => "resubstitute",
            RuleTag::Cofactor => "cofactor",
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One applied rewrite: rule tag, the node it was applied at, and a
/// human-readable description of the match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub rule: RuleTag,
    pub node: Option<NodeId>,
    pub detail: String,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Some(n) => write!(f, "{} @{}: {}", self.rule, n, self.detail),
            None => write!(f, "{}: {}", self.rule, self.detail),
        }
    }
}
