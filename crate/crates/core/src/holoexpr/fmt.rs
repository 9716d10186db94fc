use std::fmt;

use super::{HoloExpr, Node};
use crate::scalar::Real;

fn write_const<T: Real>(f: &mut fmt::Formatter<'_>, re: T, im: T) -> fmt::Result {
    let zero = T::zero();
    if im == zero {
        if re < zero {
            write!(f, "(-{})", -re)
        } else {
            write!(f, "{re}")
        }
    } else if re == zero && im == T::one() {
        write!(f, "i")
    } else if re == zero {
        if im < zero {
            write!(f, "(-{}*i)", -im)
        } else {
            write!(f, "({im}*i)")
        }
    } else if im < zero {
        write!(f, "({re} - {}*i)", -im)
    } else {
        write!(f, "({re} + {im}*i)")
    }
}

fn write_node<T: Real>(f: &mut fmt::Formatter<'_>, node: &Node<T>) -> fmt::Result {
    match node {
        Node::Const(c) => write_const(f, c.re, c.im),
        Node::Var => write!(f, "z"),
        Node::Neg(a) => {
            write!(f, "(-")?;
            write_node(f, a)?;
            write!(f, ")")
        }
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            let op = match node {
                Node::Add(..) => "+",
                Node::Sub(..) => "-",
                Node::Mul(..) => "*",
                _ => "/",
            };
            write!(f, "(")?;
            write_node(f, a)?;
            write!(f, " {op} ")?;
            write_node(f, b)?;
            write!(f, ")")
        }
        Node::Pow(a, n) => {
            if matches!(**a, Node::Pow(..)) {
                write!(f, "(")?;
                write_node(f, a)?;
                write!(f, ")")?;
            } else {
                write_node(f, a)?;
            }
            write!(f, "^{n}")
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a)?;
            write!(f, ")")
        }
    }
}

/// Prints a fully parenthesized form that parses back to the same tree.
impl<T: Real> fmt::Display for HoloExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, self.node())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_parseable_text() {
        let e = HoloExpr::<f64>::parse("-exp(2*z)^2 / (1 - i*z) + z^-3").unwrap();
        assert_eq!(e.to_string(), "(((-exp((2 * z))^2) / (1 - (i * z))) + z^-3)");
        let back = HoloExpr::<f64>::parse(&e.to_string()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn nested_powers_keep_structure() {
        use crate::scalar::cx;
        let e = HoloExpr::<f64>::z().powi(2).powi(3);
        assert_eq!(e.to_string(), "(z^2)^3");
        let back = HoloExpr::<f64>::parse(&e.to_string()).unwrap();
        assert_eq!(back, e);
        let c = HoloExpr::<f64>::constant(cx(0.5, -2.0));
        let v = HoloExpr::<f64>::parse(&c.to_string()).unwrap().eval(cx(0.0, 0.0)).unwrap();
        assert_eq!(v, cx(0.5, -2.0));
    }
}
