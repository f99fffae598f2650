//! Symbolic tails: expressions in the index `n` giving the value of a
//! function at the reserved point `p_n = 1/(n+2)`.
//!
//! Text syntax: `n`, `i`, decimal constants, `+ - * /`, parentheses and
//! the functions `conj`, `sqrt` (of the non-negative real part), `recip`
//! (zero maps to zero) and `supp` (indicator of a non-zero value).
//! `a / b` is shorthand for `a * recip(b)`.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use crate::algebra::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(C64),
    Index,
    Sum(Vec<Arc<Node>>),
    Prod(Vec<Arc<Node>>),
    Conj(Arc<Node>),
    Sqrt(Arc<Node>),
    Recip(Arc<Node>),
    Supp(Arc<Node>),
}

#[derive(Clone, PartialEq)]
pub struct TailExpr(Arc<Node>);

fn sqrt_nonneg(v: C64) -> C64 {
    C64::new(v.re.max(0.0).sqrt(), 0.0)
}

fn recip_nonzero(v: C64) -> C64 {
    if v == C64::new(0.0, 0.0) {
        v
    } else {
        v.inv()
    }
}

fn support(v: C64) -> C64 {
    if v == C64::new(0.0, 0.0) {
        C64::new(0.0, 0.0)
    } else {
        C64::new(1.0, 0.0)
    }
}

type Memo = HashMap<*const Node, Rc<Vec<C64>>>;

impl Node {
    /// Values at every index in `ns`. Subterms are shared between parents,
    /// so each node is evaluated once per call.
    fn eval_all(self: &Arc<Self>, ns: &[usize], memo: &mut Memo) -> Rc<Vec<C64>> {
        let key = Arc::as_ptr(self);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let map = |x: &Arc<Node>, memo: &mut Memo, f: fn(C64) -> C64| -> Vec<C64> {
            x.eval_all(ns, memo).iter().map(|&v| f(v)).collect()
        };
        let fold = |xs: &[Arc<Node>], memo: &mut Memo, unit: C64, op: fn(C64, C64) -> C64| -> Vec<C64> {
            let mut acc = vec![unit; ns.len()];
            for x in xs {
                for (a, v) in acc.iter_mut().zip(x.eval_all(ns, memo).iter()) {
                    *a = op(*a, *v);
                }
            }
            acc
        };
        let out = match self.as_ref() {
            Node::Const(c) => vec![*c; ns.len()],
            Node::Index => ns.iter().map(|&n| C64::new(n as f64, 0.0)).collect(),
            Node::Sum(xs) => fold(xs, memo, C64::new(0.0, 0.0), |a, b| a + b),
            Node::Prod(xs) => fold(xs, memo, C64::new(1.0, 0.0), |a, b| a * b),
            Node::Conj(x) => map(x, memo, |v| v.conj()),
            Node::Sqrt(x) => map(x, memo, sqrt_nonneg),
            Node::Recip(x) => map(x, memo, recip_nonzero),
            Node::Supp(x) => map(x, memo, support),
        };
        let out = Rc::new(out);
        memo.insert(key, out.clone());
        out
    }

    fn as_const(&self) -> Option<C64> {
        match self {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }
}

impl TailExpr {
    pub fn constant(c: C64) -> Self {
        Self(Arc::new(Node::Const(c)))
    }

    pub fn real(r: f64) -> Self {
        Self::constant(C64::new(r, 0.0))
    }

    pub fn index() -> Self {
        Self(Arc::new(Node::Index))
    }

    pub fn eval(&self, n: usize) -> C64 {
        self.eval_many(&[n])[0]
    }

    /// Values at each index of `ns`, evaluating shared subterms once.
    pub fn eval_many(&self, ns: &[usize]) -> Vec<C64> {
        let mut memo = Memo::new();
        self.0.eval_all(ns, &mut memo).as_ref().clone()
    }

    pub fn as_constant(&self) -> Option<C64> {
        self.0.as_const()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::nary(true, [&self.0, &other.0])
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::nary(false, [&self.0, &other.0])
    }

    pub fn scale(&self, alpha: C64) -> Self {
        self.mul(&Self::constant(alpha))
    }

    pub fn conj(&self) -> Self {
        self.unary(Node::Conj, |v| v.conj())
    }

    pub fn sqrt(&self) -> Self {
        self.unary(Node::Sqrt, sqrt_nonneg)
    }

    pub fn recip(&self) -> Self {
        self.unary(Node::Recip, recip_nonzero)
    }

    pub fn supp(&self) -> Self {
        self.unary(Node::Supp, support)
    }

    fn unary(&self, wrap: fn(Arc<Node>) -> Node, fold: fn(C64) -> C64) -> Self {
        match self.0.as_const() {
            Some(c) => Self::constant(fold(c)),
            None => Self(Arc::new(wrap(self.0.clone()))),
        }
    }

    /// Flattening n-ary sum/product with constant folding.
    fn nary<'a>(is_sum: bool, parts: impl IntoIterator<Item = &'a Arc<Node>>) -> Self {
        let unit = if is_sum { C64::new(0.0, 0.0) } else { C64::new(1.0, 0.0) };
        let mut acc = unit;
        let mut rest: Vec<Arc<Node>> = Vec::new();
        let push = |node: &Arc<Node>, acc: &mut C64, rest: &mut Vec<Arc<Node>>| match node.as_ref() {
            Node::Const(c) => {
                if is_sum {
                    *acc += c
                } else {
                    *acc *= c
                }
            }
            _ => rest.push(node.clone()),
        };
        for p in parts {
            match (is_sum, p.as_ref()) {
                (true, Node::Sum(xs)) | (false, Node::Prod(xs)) => {
                    for x in xs {
                        push(x, &mut acc, &mut rest);
                    }
                }
                _ => push(p, &mut acc, &mut rest),
            }
        }
        if !is_sum && acc == C64::new(0.0, 0.0) {
            return Self::constant(acc);
        }
        if rest.is_empty() {
            return Self::constant(acc);
        }
        if acc != unit {
            rest.insert(0, Arc::new(Node::Const(acc)));
        }
        if rest.len() == 1 {
            return Self(rest.pop().unwrap());
        }
        Self(Arc::new(if is_sum { Node::Sum(rest) } else { Node::Prod(rest) }))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

fn fmt_real(f: &mut fmt::Formatter<'_>, r: f64) -> fmt::Result {
    if r < 0.0 || (r == 0.0 && r.is_sign_negative()) {
        write!(f, "(-{})", -r)
    } else {
        write!(f, "{r}")
    }
}

fn fmt_node(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
    match node {
        Node::Const(c) if c.im == 0.0 => fmt_real(f, c.re),
        Node::Const(c) => {
            f.write_str("(")?;
            fmt_real(f, c.re)?;
            f.write_str("+")?;
            fmt_real(f, c.im)?;
            f.write_str("*i)")
        }
        Node::Index => f.write_str("n"),
        Node::Sum(xs) | Node::Prod(xs) => {
            let sep = if matches!(node, Node::Sum(_)) { " + " } else { " * " };
            f.write_str("(")?;
            for (k, x) in xs.iter().enumerate() {
                if k > 0 {
                    f.write_str(sep)?;
                }
                fmt_node(f, x)?;
            }
            f.write_str(")")
        }
        Node::Conj(x) => call(f, "conj", x),
        Node::Sqrt(x) => call(f, "sqrt", x),
        Node::Recip(x) => call(f, "recip", x),
        Node::Supp(x) => call(f, "supp", x),
    }
}

fn call(f: &mut fmt::Formatter<'_>, name: &str, x: &Node) -> fmt::Result {
    write!(f, "{name}(")?;
    fmt_node(f, x)?;
    f.write_str(")")
}

impl fmt::Display for TailExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_node(f, &self.0)
    }
}

impl fmt::Debug for TailExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TailExpr({self})")
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Expr(format!("{msg} at offset {}", self.pos))
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<TailExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.scale(C64::new(-1.0, 0.0)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TailExpr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<TailExpr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.scale(C64::new(-1.0, 0.0)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<TailExpr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match word {
                    "n" => Ok(TailExpr::index()),
                    "i" => Ok(TailExpr::constant(C64::new(0.0, 1.0))),
                    "conj" | "sqrt" | "recip" | "supp" => {
                        self.expect(b'(')?;
                        let inner = self.expr()?;
                        self.expect(b')')?;
                        Ok(match word {
                            "conj" => inner.conj(),
                            "sqrt" => inner.sqrt(),
                            "recip" => inner.recip(),
                            _ => inner.supp(),
                        })
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("unknown identifier '{word}'")))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<TailExpr> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let exp_sign =
                (c == b'+' || c == b'-') && self.pos > start && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(TailExpr::real(v)),
            _ => {
                self.pos = start;
                Err(self.error(&format!("bad number '{text}'")))
            }
        }
    }
}
