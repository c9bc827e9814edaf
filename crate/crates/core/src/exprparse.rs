//! A small arithmetic expression language for problem data.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | variable | constant | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^-x` is `2^(-x)`. Variables are `x`, `y`, `t`, `s`;
//! constants `pi`, `e`; functions `exp`, `sin`, `cos`, `sqrt`, `abs`.

use std::fmt;

use thiserror::Error;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    T,
    S,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::T => "t",
            Var::S => "s",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl UnaryOp {
    fn function(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => UnaryOp::Exp,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "sqrt" => UnaryOp::Sqrt,
            "abs" => UnaryOp::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}", .expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<String> },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }

    /// The source line followed by a caret under the error position.
    pub fn caret(&self, src: &str) -> String {
        let off = self.offset().min(src.len());
        let col = src[..off].chars().count();
        format!("{src}\n{}^", " ".repeat(col))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation of `{node}` failed: {cause}")]
    Domain { node: String, cause: String },
    #[error("variable `{0}` is not bound")]
    UnboundVariable(&'static str),
}

/// Values for the expression variables; unset variables are unbound.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bindings {
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub t: Option<f64>,
    pub s: Option<f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn x(mut self, v: f64) -> Self {
        self.x = Some(v);
        self
    }
    pub fn y(mut self, v: f64) -> Self {
        self.y = Some(v);
        self
    }
    pub fn t(mut self, v: f64) -> Self {
        self.t = Some(v);
        self
    }
    pub fn s(mut self, v: f64) -> Self {
        self.s = Some(v);
        self
    }

    fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::X => self.x,
            Var::Y => self.y,
            Var::T => self.t,
            Var::S => self.s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
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
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                expected: vec!["number".into()],
            })?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else {
            let tok = match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                _ => {
                    return Err(ParseError::Syntax {
                        offset: start,
                        expected: vec!["operator, operand or parenthesis".into()],
                    })
                }
            };
            out.push((tok, start));
            i += 1;
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail(&["shallower nesting"]);
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let e = match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()?
            }
            _ => self.power()?,
        };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        const OPERAND: &[&str] = &["number", "variable", "function", "'('"];
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                self.enter()?;
                let e = self.expr()?;
                self.depth -= 1;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let off = self.offset();
                self.bump();
                let var = match name.as_str() {
                    "x" => Some(Var::X),
                    "y" => Some(Var::Y),
                    "t" => Some(Var::T),
                    "s" => Some(Var::S),
                    _ => None,
                };
                if let Some(v) = var {
                    return Ok(Expr::Var(v));
                }
                match name.as_str() {
                    "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
                    "e" => return Ok(Expr::Const(std::f64::consts::E)),
                    _ => {}
                }
                let Some(op) = UnaryOp::function(&name) else {
                    return Err(ParseError::UnknownIdentifier { name, offset: off });
                };
                if *self.peek() != Tok::LParen {
                    return self.fail(&["'('"]);
                }
                self.bump();
                self.enter()?;
                let arg = self.expr()?;
                self.depth -= 1;
                self.expect_rparen()?;
                Ok(Expr::Unary(op, Box::new(arg)))
            }
            _ => self.fail(OPERAND),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            self.fail(&["')'", "operator"])
        }
    }
}

/// Parse an expression. Errors carry the byte offset of the offending token.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    if *p.peek() == Tok::End {
        return p.fail(&["expression"]);
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

impl Expr {
    pub fn eval(&self, b: &Bindings) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => return Ok(*c),
            Expr::Var(v) => return b.get(*v).ok_or(EvalError::UnboundVariable(v.name())),
            Expr::Unary(op, a) => {
                let a = a.eval(b)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Abs => a.abs(),
                    UnaryOp::Sqrt => {
                        if a < 0.0 {
                            return Err(self.domain_error("square root of a negative number"));
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Binary(op, l, r) => {
                let l = l.eval(b)?;
                let r = r.eval(b)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(self.domain_error("division by zero"));
                        }
                        l / r
                    }
                    BinOp::Pow => l.powf(r),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain_error(if v.is_nan() { "undefined result" } else { "overflow" }))
        }
    }

    fn domain_error(&self, cause: &str) -> EvalError {
        EvalError::Domain {
            node: self.to_string(),
            cause: cause.to_string(),
        }
    }

    /// Whether the expression references `v`.
    pub fn uses(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Unary(_, a) => a.uses(v),
            Expr::Binary(_, l, r) => l.uses(v) || r.uses(v),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(c) if c.is_sign_negative() => 3,
            Expr::Const(_) | Expr::Var(_) => 5,
            Expr::Unary(UnaryOp::Neg, _) => 3,
            Expr::Unary(..) => 5,
            Expr::Binary(op, ..) => op.precedence(),
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints with the minimal parentheses needed to reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{:?}", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                a.write_child(f, 3)
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                if *op == BinOp::Pow {
                    l.write_child(f, 5)?;
                    f.write_str("^")?;
                    r.write_child(f, 3)
                } else {
                    l.write_child(f, p)?;
                    write!(f, " {} ", op.symbol())?;
                    r.write_child(f, p + 1)
                }
            }
        }
    }
}
