use super::{Func, HoloExpr, Node};
use crate::scalar::{cx, Real};

// Constructors that fold multiplication by 0/1 and addition of 0. They keep
// derivative trees from growing with dead branches; nothing else is simplified.

fn konst<T: Real>(x: f64) -> Node<T> {
    Node::Const(cx(T::lit(x), T::zero()))
}

fn add<T: Real>(a: Node<T>, b: Node<T>) -> Node<T> {
    if a.is_const(0.0) {
        b
    } else if b.is_const(0.0) {
        a
    } else {
        Node::Add(Box::new(a), Box::new(b))
    }
}

fn sub<T: Real>(a: Node<T>, b: Node<T>) -> Node<T> {
    if b.is_const(0.0) {
        a
    } else if a.is_const(0.0) {
        neg(b)
    } else {
        Node::Sub(Box::new(a), Box::new(b))
    }
}

fn neg<T: Real>(a: Node<T>) -> Node<T> {
    if a.is_const(0.0) {
        a
    } else {
        Node::Neg(Box::new(a))
    }
}

fn mul<T: Real>(a: Node<T>, b: Node<T>) -> Node<T> {
    if a.is_const(0.0) || b.is_const(0.0) {
        konst(0.0)
    } else if a.is_const(1.0) {
        b
    } else if b.is_const(1.0) {
        a
    } else {
        Node::Mul(Box::new(a), Box::new(b))
    }
}

fn div<T: Real>(a: Node<T>, b: Node<T>) -> Node<T> {
    if a.is_const(0.0) {
        konst(0.0)
    } else {
        Node::Div(Box::new(a), Box::new(b))
    }
}

fn d<T: Real>(node: &Node<T>) -> Node<T> {
    match node {
        Node::Const(_) => konst(0.0),
        Node::Var => konst(1.0),
        Node::Neg(a) => neg(d(a)),
        Node::Add(a, b) => add(d(a), d(b)),
        Node::Sub(a, b) => sub(d(a), d(b)),
        Node::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
        Node::Div(a, b) => {
            // (a'b - ab') / b^2
            let num = sub(mul(d(a), (**b).clone()), mul((**a).clone(), d(b)));
            div(num, Node::Pow(b.clone(), 2))
        }
        Node::Pow(a, n) => match *n {
            0 => konst(0.0),
            1 => d(a),
            n => {
                let outer = mul(konst(n as f64), Node::Pow(a.clone(), n - 1));
                mul(outer, d(a))
            }
        },
        Node::Call(f, a) => {
            let inner = d(a);
            let outer = match f {
                Func::Exp => node.clone(),
                Func::Sinh => Node::Call(Func::Cosh, a.clone()),
                Func::Cosh => Node::Call(Func::Sinh, a.clone()),
                Func::Log => return div(inner, (**a).clone()),
                Func::Sqrt => return div(inner, mul(konst(2.0), node.clone())),
            };
            mul(outer, inner)
        }
    }
}

impl<T: Real> HoloExpr<T> {
    /// Exact symbolic derivative `d/dz`. The result is not simplified beyond
    /// dropping zero and unit factors.
    pub fn differentiate(&self) -> HoloExpr<T> {
        HoloExpr::from_node(d(self.node()))
    }
}
