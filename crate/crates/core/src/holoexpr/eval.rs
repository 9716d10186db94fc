use thiserror::Error;

use super::{Func, HoloExpr, Node};
use crate::scalar::{cx, is_finite, Cx, Real};

/// Why a pointwise evaluation produced no usable value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalFlag {
    /// Division by zero, `log(0)` or a negative power of zero.
    #[error("evaluation at a pole")]
    Pole,
    /// Overflow or another non-finite intermediate.
    #[error("non-finite value")]
    NonFinite,
}

fn checked<T: Real>(v: Cx<T>) -> Result<Cx<T>, EvalFlag> {
    if is_finite(v) {
        Ok(v)
    } else {
        Err(EvalFlag::NonFinite)
    }
}

fn is_zero<T: Real>(v: Cx<T>) -> bool {
    v.re == T::zero() && v.im == T::zero()
}

fn eval_node<T: Real>(node: &Node<T>, z: Cx<T>) -> Result<Cx<T>, EvalFlag> {
    match node {
        Node::Const(c) => Ok(*c),
        Node::Var => Ok(z),
        Node::Neg(a) => Ok(-eval_node(a, z)?),
        Node::Add(a, b) => checked(eval_node(a, z)? + eval_node(b, z)?),
        Node::Sub(a, b) => checked(eval_node(a, z)? - eval_node(b, z)?),
        Node::Mul(a, b) => checked(eval_node(a, z)? * eval_node(b, z)?),
        Node::Div(a, b) => {
            let num = eval_node(a, z)?;
            let den = eval_node(b, z)?;
            if is_zero(den) {
                return Err(EvalFlag::Pole);
            }
            checked(num / den)
        }
        Node::Pow(a, n) => {
            let base = eval_node(a, z)?;
            if *n < 0 && is_zero(base) {
                return Err(EvalFlag::Pole);
            }
            checked(powi(base, *n))
        }
        Node::Call(f, a) => {
            let x = eval_node(a, z)?;
            let y = match f {
                Func::Exp => x.exp(),
                Func::Log => {
                    if is_zero(x) {
                        return Err(EvalFlag::Pole);
                    }
                    x.ln()
                }
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Sqrt => x.sqrt(),
            };
            checked(y)
        }
    }
}

/// Integer power by binary exponentiation; negative powers invert first.
fn powi<T: Real>(base: Cx<T>, n: i32) -> Cx<T> {
    let mut b = if n < 0 { cx(T::one(), T::zero()) / base } else { base };
    let mut e = n.unsigned_abs();
    let mut acc = cx(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b;
        }
        b = b * b;
        e >>= 1;
    }
    acc
}

impl<T: Real> HoloExpr<T> {
    /// Value at `z` using principal branches for `log` and `sqrt`.
    pub fn eval(&self, z: Cx<T>) -> Result<Cx<T>, EvalFlag> {
        eval_node(self.node(), z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = HoloExpr<f64>;

    #[test]
    fn basic_values() {
        let v = E::parse("z^2+1").unwrap().eval(cx(0.0, 1.0)).unwrap();
        assert_eq!(v, cx(0.0, 0.0));
        let v = E::parse("cosh(z)").unwrap().eval(cx(0.0, 0.0)).unwrap();
        assert_eq!(v, cx(1.0, 0.0));
    }

    #[test]
    fn exp_matches_series() {
        // Taylor series with exact rational terms summed in reverse.
        let mut terms = vec![1.0f64];
        for k in 1..30 {
            let prev = terms[k - 1];
            terms.push(prev / k as f64);
        }
        let series: f64 = terms.iter().rev().sum();
        let v = E::parse("exp(z)").unwrap().eval(cx(1.0, 0.0)).unwrap();
        assert!((v.re - series).abs() < 4e-16, "{} vs {}", v.re, series);
        assert!((v.re - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn poles_are_flagged() {
        assert_eq!(E::parse("1/z").unwrap().eval(cx(0.0, 0.0)), Err(EvalFlag::Pole));
        assert_eq!(E::parse("log(z)").unwrap().eval(cx(0.0, 0.0)), Err(EvalFlag::Pole));
        assert_eq!(E::parse("z^-2").unwrap().eval(cx(0.0, 0.0)), Err(EvalFlag::Pole));
        assert_eq!(E::parse("exp(exp(z))").unwrap().eval(cx(10.0, 0.0)), Err(EvalFlag::NonFinite));
    }

    #[test]
    fn principal_branches() {
        let v = E::parse("sqrt(z)").unwrap().eval(cx(-4.0, 0.0)).unwrap();
        assert!((v - cx(0.0, 2.0)).norm() < 1e-15);
        let v = E::parse("log(z)").unwrap().eval(cx(-1.0, 0.0)).unwrap();
        assert!((v - cx(0.0, std::f64::consts::PI)).norm() < 1e-15);
    }

    #[test]
    fn integer_powers() {
        let z = cx(0.3, -1.2);
        for n in -5..=7 {
            let v = E::parse(&format!("z^{n}")).unwrap().eval(z).unwrap();
            let expected = z.powi(n);
            assert!((v - expected).norm() < 1e-12 * expected.norm().max(1.0), "n={n}");
        }
    }
}
