//! Small arithmetic expression language shared by maps, gauges and custom
//! premetrics.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | atom
//! atom   := number | 'pi' | 't' | 'x' | 'y' | ('x' | 'y') '[' int ']'
//!         | func '(' expr (',' expr)* ')' | '(' expr ')'
//! func   := abs | min | max | sign | sqrt
//! ```
//!
//! Bare `x` and `y` are shorthands for `x[0]` and `y[0]`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    X(usize),
    Y(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Min,
    Max,
    Sign,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// Bindings an expression is evaluated against.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings<'a> {
    pub t: f64,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

impl<'a> Bindings<'a> {
    pub fn scalar(t: f64) -> Self {
        Bindings { t, x: &[], y: &[] }
    }

    pub fn point(x: &'a [f64]) -> Self {
        Bindings { t: 0.0, x, y: &[] }
    }

    pub fn pair(x: &'a [f64], y: &'a [f64]) -> Self {
        Bindings { t: 0.0, x, y }
    }
}

/// Which variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Gauges: only `t`.
    Scalar,
    /// Self-maps: `x[i]` with `i < dim`.
    Point { dim: usize },
    /// Premetrics and distances: `x[i]`, `y[i]` with `i < dim`.
    Pair { dim: usize },
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let mut parser = Parser::new(source);
        let root = parser.expr()?;
        parser.skip_ws();
        if parser.pos < parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(Expr {
            source: source.trim().to_string(),
            root,
        })
    }

    /// Parses and checks variable references against `scope`.
    pub fn parse_in(source: &str, scope: Scope) -> Result<Self> {
        let e = Self::parse(source)?;
        e.check_scope(scope)?;
        Ok(e)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, b: &Bindings<'_>) -> f64 {
        eval_node(&self.root, b)
    }

    pub fn check_scope(&self, scope: Scope) -> Result<()> {
        let mut vars = Vec::new();
        collect_vars(&self.root, &mut vars);
        for v in vars {
            let ok = match (scope, v) {
                (Scope::Scalar, Var::T) => true,
                (Scope::Point { dim }, Var::X(i)) => i < dim,
                (Scope::Pair { dim }, Var::X(i) | Var::Y(i)) => i < dim,
                _ => false,
            };
            if !ok {
                return Err(Error::Config(format!(
                    "expression `{}` references {} which is not available here",
                    self.source,
                    VarDisplay(v)
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl core::str::FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

struct VarDisplay(Var);

impl fmt::Display for VarDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Var::T => f.write_str("t"),
            Var::X(i) => write!(f, "x[{}]", i),
            Var::Y(i) => write!(f, "y[{}]", i),
        }
    }
}

fn collect_vars(node: &Node, out: &mut Vec<Var>) {
    match node {
        Node::Const(_) => {}
        Node::Var(v) => out.push(*v),
        Node::Neg(a) => collect_vars(a, out),
        Node::Bin(_, a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        Node::Call(_, args) => args.iter().for_each(|a| collect_vars(a, out)),
    }
}

fn eval_node(node: &Node, b: &Bindings<'_>) -> f64 {
    match node {
        Node::Const(c) => *c,
        Node::Var(Var::T) => b.t,
        Node::Var(Var::X(i)) => b.x.get(*i).copied().unwrap_or(f64::NAN),
        Node::Var(Var::Y(i)) => b.y.get(*i).copied().unwrap_or(f64::NAN),
        Node::Neg(a) => -eval_node(a, b),
        Node::Bin(op, l, r) => {
            let (l, r) = (eval_node(l, b), eval_node(r, b));
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => l / r,
            }
        }
        Node::Call(func, args) => match func {
            Func::Abs => eval_node(&args[0], b).abs(),
            Func::Sqrt => math::sqrt(eval_node(&args[0], b)),
            Func::Sign => {
                let v = eval_node(&args[0], b);
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    v
                }
            }
            Func::Min => args
                .iter()
                .map(|a| eval_node(a, b))
                .fold(f64::INFINITY, f64::min),
            Func::Max => args
                .iter()
                .map(|a| eval_node(a, b))
                .fold(f64::NEG_INFINITY, f64::max),
        },
    }
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
}

impl<'s> Parser<'s> {
    fn new(s: &'s str) -> Self {
        Parser {
            src: s.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let bytes = self.src;
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = core::str::from_utf8(&bytes[start..i]).map_err(|_| self.error("bad utf-8"))?;
        let value: f64 = text.parse().map_err(|_| self.error("malformed number"))?;
        self.pos = i;
        Ok(Node::Const(value))
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match name {
            "pi" => Ok(Node::Const(core::f64::consts::PI)),
            "t" => Ok(Node::Var(Var::T)),
            "x" | "y" => {
                let index = if self.eat(b'[') {
                    let idx = self.index()?;
                    self.expect(b']')?;
                    idx
                } else {
                    0
                };
                Ok(Node::Var(if name == "x" {
                    Var::X(index)
                } else {
                    Var::Y(index)
                }))
            }
            "abs" | "min" | "max" | "sign" | "sqrt" => {
                let func = match name {
                    "abs" => Func::Abs,
                    "min" => Func::Min,
                    "max" => Func::Max,
                    "sign" => Func::Sign,
                    _ => Func::Sqrt,
                };
                self.expect(b'(')?;
                let mut args = alloc::vec![self.expr()?];
                while self.eat(b',') {
                    args.push(self.expr()?);
                }
                self.expect(b')')?;
                let arity_ok = match func {
                    Func::Min | Func::Max => args.len() >= 2,
                    _ => args.len() == 1,
                };
                if !arity_ok {
                    return Err(self.error(&format!("wrong number of arguments for `{}`", name)));
                }
                Ok(Node::Call(func, args))
            }
            _ => {
                self.pos = start;
                Err(self.error(&format!("unknown identifier `{}`", name)))
            }
        }
    }

    fn index(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        core::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected a coordinate index"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_t(src: &str, t: f64) -> f64 {
        Expr::parse(src).unwrap().eval(&Bindings::scalar(t))
    }

    #[test]
    fn precedence_and_unary() {
        assert_eq!(eval_t("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(eval_t("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(eval_t("-t / 2", 4.0), -2.0);
        assert_eq!(eval_t("8 - 2 - 1", 0.0), 5.0);
        assert_eq!(eval_t("7/12*t", 12.0), 7.0);
        assert_eq!(eval_t("2.5e-1 * 4", 0.0), 1.0);
    }

    #[test]
    fn functions() {
        assert_eq!(eval_t("abs(-3)", 0.0), 3.0);
        assert_eq!(eval_t("min(3, t, 5)", 1.0), 1.0);
        assert_eq!(eval_t("max(3, t)", 1.0), 3.0);
        assert_eq!(eval_t("sign(t)", -2.0), -1.0);
        assert_eq!(eval_t("sqrt(t)", 9.0), 3.0);
        assert_eq!(eval_t("t/(1+t)", 1.0), 0.5);
    }

    #[test]
    fn coordinates() {
        let e = Expr::parse("abs(x[0]-y[0]) + abs(x[1] - y[1])").unwrap();
        let v = e.eval(&Bindings::pair(&[1.0, 1.0], &[0.0, 0.0]));
        assert_eq!(v, 2.0);
        let e = Expr::parse("x/2").unwrap();
        assert_eq!(e.eval(&Bindings::point(&[3.0])), 1.5);
    }

    #[test]
    fn scope_errors() {
        assert!(Expr::parse_in("x[2]", Scope::Point { dim: 2 }).is_err());
        assert!(Expr::parse_in("t", Scope::Point { dim: 2 }).is_err());
        assert!(Expr::parse_in("y", Scope::Point { dim: 1 }).is_err());
        assert!(Expr::parse_in("x[1] - y[1]", Scope::Pair { dim: 2 }).is_ok());
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "",
            "1 +",
            "foo(1)",
            "abs(1, 2)",
            "max(1)",
            "(1",
            "1 2",
            "x[",
            "$",
        ] {
            assert!(Expr::parse(bad).is_err(), "{bad:?} should not parse");
        }
    }
}
