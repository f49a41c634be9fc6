//! Text formats: majority expressions, `.mign` netlists and DOT.

pub mod dot;
pub mod expr;
pub mod netlist;

use thiserror::Error;

use crate::net::NetError;

pub use dot::{export_dot, to_dot};
pub use expr::{build, build_exact, expr_network, parse_expr, to_expr, MajExpression, ParseError, ParseErrorKind};
pub use netlist::{load_netlist, parse_netlist, save_netlist, write_netlist};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: {message}")]
    Netlist { line: usize, message: String },
    #[error("{line}:{column}: undefined reference `{name}`")]
    Dangling { name: String, line: usize, column: usize },
    #[error("line {line}: cyclic definition through `{name}`")]
    Cycle { name: String, line: usize },
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("{0}")]
    Io(String),
}
