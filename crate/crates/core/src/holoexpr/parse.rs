use thiserror::Error;

use super::{Func, HoloExpr, Node};
use crate::scalar::{cx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` at offset {offset} takes {expected} argument(s), found {found}")]
    Arity {
        name: String,
        offset: usize,
        expected: usize,
        found: usize,
    },
}

impl ParseError {
    /// Byte offset of the failure, when one is known.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. } => Some(*offset),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { offset, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Lexeme>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'.' {
                pos += 1;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
            }
            if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                let mut p = pos + 1;
                if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
                    p += 1;
                }
                if p < bytes.len() && bytes[p].is_ascii_digit() {
                    while p < bytes.len() && bytes[p].is_ascii_digit() {
                        p += 1;
                    }
                    pos = p;
                }
            }
            let s = &text[start..pos];
            let value: f64 = s
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{s}`")))?;
            out.push(Lexeme { tok: Tok::Num(value), offset: start });
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = pos;
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            out.push(Lexeme { tok: Tok::Ident(text[start..pos].to_string()), offset: start });
        } else if b"+-*/^(),".contains(&c) {
            out.push(Lexeme { tok: Tok::Sym(c as char), offset: pos });
            pos += 1;
        } else {
            let ch = text[pos..].chars().next().unwrap_or('?');
            return Err(syntax(pos, format!("unexpected character `{ch}`")));
        }
    }
    out.push(Lexeme { tok: Tok::End, offset: text.len() });
    Ok(out)
}

struct Parser<T> {
    toks: Vec<Lexeme>,
    pos: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Real> Parser<T> {
    fn peek(&self) -> &Lexeme {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Lexeme {
        let l = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        l
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self) -> ParseError {
        let l = self.peek();
        match &l.tok {
            Tok::End => syntax(l.offset, "unexpected end of input"),
            Tok::Num(_) => syntax(l.offset, "unexpected number"),
            Tok::Ident(name) => syntax(l.offset, format!("unexpected identifier `{name}`")),
            Tok::Sym(c) => syntax(l.offset, format!("unexpected `{c}`")),
        }
    }

    fn expr(&mut self) -> Result<Node<T>, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node<T>, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node<T>, ParseError> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node<T>, ParseError> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let offset = self.peek().offset;
        let negate = self.eat('-');
        let exponent = self.power()?;
        let n = fold_integer(&exponent).ok_or_else(|| syntax(offset, "exponent must be an integer constant"))?;
        let n = if negate { -n } else { n };
        Ok(Node::Pow(Box::new(base), n))
    }

    fn primary(&mut self) -> Result<Node<T>, ParseError> {
        let lexeme = self.peek().clone();
        match lexeme.tok {
            Tok::Num(x) => {
                self.bump();
                Ok(Node::Const(cx(T::lit(x), T::zero())))
            }
            Tok::Sym('(') => {
                self.bump();
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.unexpected());
                }
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "z" => Ok(Node::Var),
                    "i" => Ok(Node::Const(cx(T::zero(), T::one()))),
                    _ => {
                        let func = Func::from_name(&name).ok_or(ParseError::UnknownIdentifier {
                            name: name.clone(),
                            offset: lexeme.offset,
                        })?;
                        self.call_args(func, lexeme.offset)
                    }
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn call_args(&mut self, func: Func, offset: usize) -> Result<Node<T>, ParseError> {
        let arity = |found| ParseError::Arity { name: func.name().to_string(), offset, expected: 1, found };
        if !self.eat('(') {
            return Err(arity(0));
        }
        if self.eat(')') {
            return Err(arity(0));
        }
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        if !self.eat(')') {
            return Err(self.unexpected());
        }
        if args.len() != 1 {
            return Err(arity(args.len()));
        }
        Ok(Node::Call(func, Box::new(args.pop().expect("one argument"))))
    }
}

fn fold_integer<T: Real>(node: &Node<T>) -> Option<i32> {
    if node.contains_var() {
        return None;
    }
    let v = HoloExpr::from_node(node.clone()).eval(cx(T::zero(), T::zero())).ok()?;
    let (re, im) = (v.re.to_f64_lossy(), v.im.to_f64_lossy());
    if im != 0.0 || re.fract() != 0.0 || re.abs() > i32::MAX as f64 {
        return None;
    }
    Some(re as i32)
}

impl<T: Real> HoloExpr<T> {
    /// Parses an expression in `z`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let toks = lex(text)?;
        if toks.len() == 1 {
            return Err(ParseError::Empty);
        }
        let mut p = Parser::<T> { toks, pos: 0, _marker: std::marker::PhantomData };
        let root = p.expr()?;
        if p.peek().tok != Tok::End {
            return Err(p.unexpected());
        }
        Ok(Self::from_node(root))
    }
}

impl<T: Real> std::str::FromStr for HoloExpr<T> {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
