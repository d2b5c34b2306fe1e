//! Small arithmetic-expression language for forcing terms and initial data.
//!
//! Grammar: numbers, variables `x`, `t`, `theta`, binary `+ - * / ^`, unary
//! minus, the functions `sin cos exp sqrt abs max min`, and parentheses.
//! `^` binds tightest and associates to the right; unary minus binds below it
//! (`-x^2` is `-(x^2)`). Parse errors carry byte offsets.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    T,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
    Max,
    Min,
}

impl Func {
    fn arity(&self) -> usize {
        match self {
            Func::Max | Func::Min => 2,
            _ => 1,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Max => "max",
            Func::Min => "min",
        }
    }
}

/// Parsed forcing expression.
#[derive(Debug, Clone, PartialEq)]
pub enum ForcingExpression {
    Num(f64),
    Var(Var),
    Neg(Box<ForcingExpression>),
    Binary(BinOp, Box<ForcingExpression>, Box<ForcingExpression>),
    Call(Func, Vec<ForcingExpression>),
}

impl ForcingExpression {
    pub fn parse(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, len: text.len() };
        let e = p.expression()?;
        match p.peek() {
            None => Ok(e),
            Some(tok) => Err(Error::Parse {
                offset: tok.offset,
                message: format!("unexpected trailing input `{}`", tok.kind),
            }),
        }
    }

    /// Evaluate at a point; variables the expression does not use are ignored.
    pub fn eval(&self, x: f64, t: f64, theta: f64) -> f64 {
        match self {
            ForcingExpression::Num(v) => *v,
            ForcingExpression::Var(Var::X) => x,
            ForcingExpression::Var(Var::T) => t,
            ForcingExpression::Var(Var::Theta) => theta,
            ForcingExpression::Neg(e) => -e.eval(x, t, theta),
            ForcingExpression::Binary(op, a, b) => {
                let (a, b) = (a.eval(x, t, theta), b.eval(x, t, theta));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            ForcingExpression::Call(f, args) => {
                let a = args[0].eval(x, t, theta);
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Sqrt => a.sqrt(),
                    Func::Abs => a.abs(),
                    Func::Max => a.max(args[1].eval(x, t, theta)),
                    Func::Min => a.min(args[1].eval(x, t, theta)),
                }
            }
        }
    }

    /// True if the expression mentions `theta`.
    pub fn uses_theta(&self) -> bool {
        match self {
            ForcingExpression::Var(Var::Theta) => true,
            ForcingExpression::Var(_) | ForcingExpression::Num(_) => false,
            ForcingExpression::Neg(e) => e.uses_theta(),
            ForcingExpression::Binary(_, a, b) => a.uses_theta() || b.uses_theta(),
            ForcingExpression::Call(_, args) => args.iter().any(|a| a.uses_theta()),
        }
    }
}

// Canonical fully parenthesized form; printing and re-parsing is idempotent.
impl fmt::Display for ForcingExpression {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingExpression::Num(v) => write!(out, "{v}"),
            ForcingExpression::Var(Var::X) => write!(out, "x"),
            ForcingExpression::Var(Var::T) => write!(out, "t"),
            ForcingExpression::Var(Var::Theta) => write!(out, "theta"),
            ForcingExpression::Neg(e) => write!(out, "(-{e})"),
            ForcingExpression::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(out, "({a}{sym}{b})")
            }
            ForcingExpression::Call(f, args) => {
                write!(out, "{}(", f.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(out, ",")?;
                    }
                    write!(out, "{a}")?;
                }
                write!(out, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Num(v) => write!(out, "{v}"),
            TokenKind::Ident(s) => write!(out, "{s}"),
            TokenKind::Plus => write!(out, "+"),
            TokenKind::Minus => write!(out, "-"),
            TokenKind::Star => write!(out, "*"),
            TokenKind::Slash => write!(out, "/"),
            TokenKind::Caret => write!(out, "^"),
            TokenKind::LParen => write!(out, "("),
            TokenKind::RParen => write!(out, ")"),
            TokenKind::Comma => write!(out, ","),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let offset = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' => {
                let kind = match c {
                    '+' => TokenKind::Plus,
                    '-' => TokenKind::Minus,
                    '*' => TokenKind::Star,
                    '/' => TokenKind::Slash,
                    '^' => TokenKind::Caret,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    _ => TokenKind::Comma,
                };
                tokens.push(Token { kind, offset });
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // exponent suffix
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| Error::Parse {
                    offset: start,
                    message: format!("bad number literal `{lit}`"),
                })?;
                tokens.push(Token { kind: TokenKind::Num(v), offset });
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                tokens.push(Token { kind: TokenKind::Ident(text[start..i].to_string()), offset });
            }
            _ => {
                return Err(Error::Parse { offset, message: format!("unexpected character `{c}`") });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_offset(&self) -> usize {
        self.len
    }

    fn expression(&mut self) -> Result<ForcingExpression> {
        let mut lhs = self.term()?;
        while let Some(tok) = self.peek() {
            let op = match tok.kind {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = ForcingExpression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ForcingExpression> {
        let mut lhs = self.unary()?;
        while let Some(tok) = self.peek() {
            let op = match tok.kind {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = ForcingExpression::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ForcingExpression> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Minus)) {
            self.bump();
            return Ok(ForcingExpression::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ForcingExpression> {
        let base = self.atom()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            self.bump();
            let exp = self.unary()?;
            return Ok(ForcingExpression::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ForcingExpression> {
        let tok = self.bump().ok_or_else(|| Error::Parse {
            offset: self.end_offset(),
            message: "incomplete expression".into(),
        })?;
        match tok.kind {
            TokenKind::Num(v) => Ok(ForcingExpression::Num(v)),
            TokenKind::LParen => {
                let e = self.expression()?;
                self.expect_rparen()?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                let func = match name.as_str() {
                    "x" => return Ok(ForcingExpression::Var(Var::X)),
                    "t" => return Ok(ForcingExpression::Var(Var::T)),
                    "theta" => return Ok(ForcingExpression::Var(Var::Theta)),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    "abs" => Func::Abs,
                    "max" => Func::Max,
                    "min" => Func::Min,
                    _ => {
                        return Err(Error::Parse {
                            offset: tok.offset,
                            message: format!("unknown identifier `{name}`"),
                        })
                    }
                };
                match self.peek().map(|t| &t.kind) {
                    Some(TokenKind::LParen) => {
                        self.bump();
                    }
                    _ => {
                        return Err(Error::Parse {
                            offset: tok.offset,
                            message: format!("function `{name}` needs an argument list"),
                        })
                    }
                }
                let mut args = vec![self.expression()?];
                while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Comma)) {
                    self.bump();
                    args.push(self.expression()?);
                }
                self.expect_rparen()?;
                if args.len() != func.arity() {
                    return Err(Error::Parse {
                        offset: tok.offset,
                        message: format!(
                            "`{name}` takes {} argument(s), got {}",
                            func.arity(),
                            args.len()
                        ),
                    });
                }
                Ok(ForcingExpression::Call(func, args))
            }
            other => Err(Error::Parse {
                offset: tok.offset,
                message: format!("unexpected token `{other}`"),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.bump() {
            Some(Token { kind: TokenKind::RParen, .. }) => Ok(()),
            Some(tok) => Err(Error::Parse {
                offset: tok.offset,
                message: format!("expected `)`, found `{}`", tok.kind),
            }),
            None => Err(Error::Parse {
                offset: self.end_offset(),
                message: "expected `)` before end of input".into(),
            }),
        }
    }
}
