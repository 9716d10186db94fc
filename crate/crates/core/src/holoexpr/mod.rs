//! Holomorphic expressions of one complex variable `z`.
//!
//! Expressions are parsed from a small infix language, evaluated pointwise
//! with principal branches, and differentiated symbolically. The grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' ['-'] power)?      exponent must fold to an integer
//! primary := number | 'z' | 'i' | func '(' expr ')' | '(' expr ')'
//! func    := exp | log | sinh | cosh | sqrt
//! ```
//!
//! Precedence is `^` > unary `-` > `* /` > `+ -`; binary `+ - * /` associate
//! to the left and `^` to the right. Whitespace is insignificant. Numbers are
//! decimal literals with an optional exponent (`2`, `0.5`, `.5`, `1e-3`).

mod diff;
mod eval;
mod fmt;
mod parse;

use std::ops;

use crate::scalar::{cx, Cx, Real};

pub use eval::EvalFlag;
pub use parse::ParseError;

/// Elementary functions available in the expression language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree node.
#[derive(Clone, Debug, PartialEq)]
pub enum Node<T> {
    Const(Cx<T>),
    Var,
    Neg(Box<Node<T>>),
    Add(Box<Node<T>>, Box<Node<T>>),
    Sub(Box<Node<T>>, Box<Node<T>>),
    Mul(Box<Node<T>>, Box<Node<T>>),
    Div(Box<Node<T>>, Box<Node<T>>),
    Pow(Box<Node<T>>, i32),
    Call(Func, Box<Node<T>>),
}

impl<T: Real> Node<T> {
    fn is_const(&self, value: f64) -> bool {
        matches!(self, Node::Const(c) if c.re == T::lit(value) && c.im == T::zero())
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.contains_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Node::Const(_) | Node::Var => 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => 1 + a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

/// A holomorphic function of `z`, stored as an immutable expression tree.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloExpr<T> {
    root: Node<T>,
}

impl<T: Real> HoloExpr<T> {
    pub fn from_node(root: Node<T>) -> Self {
        Self { root }
    }

    pub fn node(&self) -> &Node<T> {
        &self.root
    }

    pub fn into_node(self) -> Node<T> {
        self.root
    }

    pub fn z() -> Self {
        Self::from_node(Node::Var)
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::from_node(Node::Const(c))
    }

    pub fn real(x: T) -> Self {
        Self::constant(cx(x, T::zero()))
    }

    pub fn zero() -> Self {
        Self::real(T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn is_zero(&self) -> bool {
        self.root.is_const(0.0)
    }

    pub fn is_constant(&self) -> bool {
        !self.root.contains_var()
    }

    pub fn call(f: Func, arg: Self) -> Self {
        Self::from_node(Node::Call(f, Box::new(arg.root)))
    }

    pub fn exp(self) -> Self {
        Self::call(Func::Exp, self)
    }

    pub fn ln(self) -> Self {
        Self::call(Func::Log, self)
    }

    pub fn sinh(self) -> Self {
        Self::call(Func::Sinh, self)
    }

    pub fn cosh(self) -> Self {
        Self::call(Func::Cosh, self)
    }

    pub fn sqrt(self) -> Self {
        Self::call(Func::Sqrt, self)
    }

    pub fn powi(self, n: i32) -> Self {
        Self::from_node(Node::Pow(Box::new(self.root), n))
    }

    pub fn scale(self, c: Cx<T>) -> Self {
        Self::constant(c) * self
    }
}

impl<T: Real> ops::Neg for HoloExpr<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_node(Node::Neg(Box::new(self.root)))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $variant:ident) => {
        impl<T: Real> ops::$tr for HoloExpr<T> {
            type Output = Self;
            fn $method(self, rhs: Self) -> Self {
                Self::from_node(Node::$variant(Box::new(self.root), Box::new(rhs.root)))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

/// An expression bundled with its symbolic derivative.
#[derive(Clone, Debug)]
pub struct Differentiated<T> {
    pub f: HoloExpr<T>,
    pub df: HoloExpr<T>,
}

impl<T: Real> Differentiated<T> {
    pub fn new(f: &HoloExpr<T>) -> Self {
        Self { f: f.clone(), df: f.differentiate() }
    }

    /// `(f(z), f'(z))`.
    pub fn eval(&self, z: Cx<T>) -> Result<(Cx<T>, Cx<T>), EvalFlag> {
        Ok((self.f.eval(z)?, self.df.eval(z)?))
    }
}
