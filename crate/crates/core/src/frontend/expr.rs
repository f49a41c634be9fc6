//! Majority expressions: `M5(M3(a,b,c),!d,0,1,e)`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr  := 'M' INT '(' expr (',' expr)* ')' | ('!' | '¬') expr | IDENT | '0' | '1'
//! IDENT := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! `INT` must equal the number of arguments and be odd and at least 3. An
//! identifier of the form `M<digits>` not followed by `(` is a variable.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::net::{Edge, NetError, Network, Node};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MajExpression {
    Maj(Vec<MajExpression>),
    Var(String),
    Const(bool),
    Not(Box<MajExpression>),
}

impl MajExpression {
    pub fn var(name: &str) -> MajExpression {
        MajExpression::Var(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: MajExpression) -> MajExpression {
        MajExpression::Not(Box::new(e))
    }

    /// Number of `Maj` applications in the tree (shared subterms counted
    /// once per occurrence).
    pub fn maj_count(&self) -> usize {
        match self {
            MajExpression::Maj(args) => 1 + args.iter().map(MajExpression::maj_count).sum::<usize>(),
            MajExpression::Not(e) => e.maj_count(),
            _ => 0,
        }
    }
}

impl fmt::Display for MajExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MajExpression::Maj(args) => {
                write!(f, "M{}(", args.len())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            MajExpression::Var(name) => f.write_str(name),
            MajExpression::Const(b) => f.write_str(if *b { "1" } else { "0" }),
            MajExpression::Not(e) => write!(f, "!{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    ArityMismatch { declared: usize, found: usize },
    InvalidArity(usize),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{line}:{column}: {}", describe(.kind))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::Syntax(msg) => msg.clone(),
        ParseErrorKind::ArityMismatch { declared, found } => {
            format!("M{declared} applied to {found} arguments")
        }
        ParseErrorKind::InvalidArity(n) => format!("majority arity {n} must be odd and at least 3"),
    }
}

pub(crate) struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Self::at(src, 1, 1)
    }

    pub(crate) fn at(src: &'a str, line: usize, column: usize) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, line, column, _src: src }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    pub(crate) fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.column, kind }
    }

    pub(crate) fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    pub(crate) fn expect(&mut self, want: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.syntax(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.syntax(format!("expected `{want}`, found end of input"))),
        }
    }

    /// Consume `c` if it is next.
    pub(crate) fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// Identifier or integer literal.
    pub(crate) fn word(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    pub(crate) fn negations(&mut self) -> usize {
        let mut count = 0;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('!') | Some('¬') => {
                    self.bump();
                    count += 1;
                }
                _ => return count,
            }
        }
    }

    pub(crate) fn position(&self) -> (usize, usize) {
        (self.line, self.column)
    }
}

pub(crate) fn is_ident(word: &str) -> bool {
    word.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
}

fn maj_arity(word: &str) -> Option<usize> {
    let digits = word.strip_prefix('M')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn parse_term(cur: &mut Cursor) -> Result<MajExpression, ParseError> {
    let negs = cur.negations();
    let (line, column) = cur.position();
    let Some(word) = cur.word() else {
        return Err(match cur.peek() {
            Some(c) => cur.syntax(format!("unexpected `{c}`")),
            None => cur.syntax("unexpected end of input"),
        });
    };
    let mut expr = match word.as_str() {
        "0" => MajExpression::Const(false),
        "1" => MajExpression::Const(true),
        w if !is_ident(w) => {
            return Err(ParseError { line, column, kind: ParseErrorKind::Syntax(format!("invalid token `{w}`")) });
        }
        w => match maj_arity(w) {
            Some(declared) if cur.eat('(') => {
                let mut args = vec![parse_term(cur)?];
                while cur.eat(',') {
                    args.push(parse_term(cur)?);
                }
                cur.expect(')')?;
                let err = |kind| ParseError { line, column, kind };
                if declared < 3 || declared % 2 == 0 {
                    return Err(err(ParseErrorKind::InvalidArity(declared)));
                }
                if declared != args.len() {
                    return Err(err(ParseErrorKind::ArityMismatch { declared, found: args.len() }));
                }
                MajExpression::Maj(args)
            }
            _ => MajExpression::Var(w.to_string()),
        },
    };
    for _ in 0..negs {
        expr = MajExpression::not(expr);
    }
    Ok(expr)
}

pub fn parse_expr(text: &str) -> Result<MajExpression, ParseError> {
    let mut cur = Cursor::new(text);
    let e = parse_term(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.syntax("trailing input after expression"));
    }
    Ok(e)
}

/// Add `expr` to `net`. Variables resolve to inputs by name; unknown names
/// are declared as new inputs in order of first appearance. With `exact`
/// the structure is kept as written (only hashed); otherwise construction
/// applies the majority reductions.
pub fn build(net: &mut Network, expr: &MajExpression, exact: bool) -> Result<Edge, NetError> {
    Ok(match expr {
        MajExpression::Const(b) => net.constant(*b),
        MajExpression::Var(name) => net.input_or_add(name),
        MajExpression::Not(e) => !build(net, e, exact)?,
        MajExpression::Maj(args) => {
            let ch = args.iter().map(|a| build(net, a, exact)).collect::<Result<Vec<_>, _>>()?;
            if exact {
                net.make_maj_exact(&ch)?
            } else {
                net.make_maj(&ch)?
            }
        }
    })
}

/// Parse and add an expression with structure preserved.
pub fn build_exact(net: &mut Network, text: &str) -> Result<Edge, super::FrontendError> {
    let expr = parse_expr(text)?;
    Ok(build(net, &expr, true)?)
}

/// Network holding one expression as output `name`; inputs are declared in
/// order of first appearance.
pub fn expr_network(expr: &MajExpression, name: &str) -> Result<Network, NetError> {
    let mut net = Network::new();
    net.set_max_arity(max_arity_of(expr).max(net.max_arity()) | 1)?;
    let root = build(&mut net, expr, true)?;
    net.add_output(name, root)?;
    Ok(net)
}

fn max_arity_of(expr: &MajExpression) -> usize {
    match expr {
        MajExpression::Maj(args) => args.iter().map(max_arity_of).max().unwrap_or(0).max(args.len()),
        MajExpression::Not(e) => max_arity_of(e),
        _ => 0,
    }
}

/// Expand the cone of `root` into a tree expression. Shared nodes are
/// duplicated, so this is exponential for deep reconvergent networks.
pub fn to_expr(net: &Network, root: Edge) -> MajExpression {
    let mut memo: HashMap<crate::net::NodeId, MajExpression> = HashMap::new();
    for id in net.cone(&[root]) {
        let e = match net.node(id) {
            Node::ConstZero => MajExpression::Const(false),
            Node::Input(name) => MajExpression::Var(name.clone()),
            Node::Maj(ch) => MajExpression::Maj(ch.iter().map(|&c| edge_expr(&memo, c)).collect()),
        };
        memo.insert(id, e);
    }
    edge_expr(&memo, root)
}

fn edge_expr(memo: &HashMap<crate::net::NodeId, MajExpression>, e: Edge) -> MajExpression {
    let base = memo[&e.node()].clone();
    match (base, e.is_complemented()) {
        (MajExpression::Const(b), true) => MajExpression::Const(!b),
        (base, true) => MajExpression::not(base),
        (base, false) => base,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use MajExpression::*;

    fn v(n: &str) -> MajExpression {
        MajExpression::var(n)
    }

    #[test]
    fn parses_flat_majority() {
        assert_eq!(parse_expr("M5(a,b,c,d,e)").unwrap(), Maj(vec![v("a"), v("b"), v("c"), v("d"), v("e")]));
    }

    #[test]
    fn parses_nested_example() {
        let e = parse_expr("M5(M3(a,b,c),M3(a,b,d),M3(a,b,e),M3(a,b,g),h)").unwrap();
        let m3 = |x: &str| Maj(vec![v("a"), v("b"), v(x)]);
        assert_eq!(e, Maj(vec![m3("c"), m3("d"), m3("e"), m3("g"), v("h")]));
        assert_eq!(e.maj_count(), 5);
    }

    #[test]
    fn negation_constants_whitespace() {
        let e = parse_expr(" M3 ( !a , ¬ 1 ,\n 0 ) ").unwrap();
        assert_eq!(e, Maj(vec![MajExpression::not(v("a")), MajExpression::not(Const(true)), Const(false)]));
        assert_eq!(e.to_string(), "M3(!a,!1,0)");
    }

    #[test]
    fn arity_errors() {
        let err = parse_expr("M4(a,b,c,d)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::InvalidArity(4));
        let err = parse_expr("M3(a,b)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::ArityMismatch { declared: 3, found: 2 });
        assert_eq!(parse_expr("M1(a)").unwrap_err().kind, ParseErrorKind::InvalidArity(1));
    }

    #[test]
    fn syntax_errors_carry_location() {
        let err = parse_expr("M3(a,b,\n  c").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(err.line, 2);
        let err = parse_expr("M3(a,b,c) x").unwrap_err();
        assert_eq!((err.line, err.column), (1, 11));
        assert!(parse_expr("M3(a,,c)").is_err());
        assert!(parse_expr("2").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn m_identifier_without_parens_is_a_variable() {
        assert_eq!(parse_expr("M3").unwrap(), v("M3"));
        assert_eq!(parse_expr("M3(M5,b,c)").unwrap(), Maj(vec![v("M5"), v("b"), v("c")]));
    }

    #[test]
    fn build_and_expand() {
        let e = parse_expr("M3(a,!M3(a,b,c),M3(!a,b,c))").unwrap();
        let net = expr_network(&e, "sum").unwrap();
        assert_eq!(net.input_names().collect::<Vec<_>>(), ["a", "b", "c"]);
        let root = net.output("sum").unwrap();
        assert_eq!(net.metrics(&[root]).size, 3);
        let back = to_expr(&net, root);
        // canonical child order may differ from the text, semantics must not
        let net2 = expr_network(&back, "sum").unwrap();
        let r2 = net2.output("sum").unwrap();
        assert!(crate::oracle::check_equiv(&net, root, &net2, r2).unwrap().is_equivalent());
    }
}
