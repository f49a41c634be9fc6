//! Majority-inverter networks with odd-arity majority operators.
//!
//! A [`Network`] is a DAG of n-ary majority nodes whose edges may carry a
//! complementation flag. On top of it the crate provides:
//!
//! * [`axioms`]: the commutativity, majority, associativity, distributivity
//!   and inverter-propagation rewrites as oriented, local rules;
//! * [`oracle`]: exhaustive truth-table semantics used as ground truth;
//! * [`optimize`]: inflate / simplify / deflate optimization and late-input
//!   rebalancing;
//! * [`sat`]: satisfiability of majority networks and MNF formulas;
//! * [`frontend`]: the expression grammar, the `.mign` netlist format and DOT
//!   export;
//! * [`cli`]: the `majn` command-line driver.

pub mod axioms;
pub mod cli;
pub mod frontend;
pub mod net;
pub mod optimize;
pub mod oracle;
pub mod random;
pub mod sat;
pub mod trace;

pub use net::{CostMetrics, Edge, NetError, Network, Node, NodeId, DEFAULT_MAX_ARITY};
pub use oracle::TruthTable;
pub use trace::{RuleTag, TraceEvent};
