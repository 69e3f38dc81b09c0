//! Bivariate real expressions.
//!
//! A small infix language over the free variables `x` and `y`:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x' | 'y' | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`. Builtins are `exp ln sqrt abs sin cos` (one argument) and
//! `min max` (two or more arguments).
//!
//! Parsed expressions are immutable and cheap to clone; evaluation is
//! reentrant and never returns a non-finite value.

mod compiled;
mod parser;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use parser::parse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {position}: {message}")]
pub struct ParseError {
    /// Character offset into the source.
    pub position: usize,
    pub message: String,
}

/// A non-finite or undefined value was produced while evaluating at `(x, y)`.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error at ({x}, {y}): {message}")]
pub struct EvalError {
    pub x: f64,
    pub y: f64,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => " * ",
            BinOp::Div => " / ",
            BinOp::Pow => "^",
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sin,
    Cos,
    Min,
    Max,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    /// `true` when the function takes a variable argument list (at least two).
    pub fn is_variadic(self) -> bool {
        matches!(self, Func::Min | Func::Max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Binary {
        op: BinOp,
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    Call {
        func: Func,
        args: Vec<Node>,
    },
}

impl Node {
    pub fn binary(op: BinOp, lhs: Node, rhs: Node) -> Node {
        Node::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Binary { op, .. } => op.precedence(),
            Node::Neg(_) => 3,
            Node::Num(_) | Node::Var(_) | Node::Call { .. } => 5,
        }
    }

    fn eval(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        let domain = |message: String| EvalError { x, y, message };
        let value = match self {
            Node::Num(v) => *v,
            Node::Var(Var::X) => x,
            Node::Var(Var::Y) => y,
            Node::Neg(inner) => -inner.eval(x, y)?,
            Node::Binary { op, lhs, rhs } => {
                let l = lhs.eval(x, y)?;
                let r = rhs.eval(x, y)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(domain(format!("division of {l} by zero")));
                        }
                        l / r
                    }
                    BinOp::Pow => power(l, r).ok_or_else(|| {
                        domain(format!("{l}^{r} is not a real number"))
                    })?,
                }
            }
            Node::Call { func, args } => {
                let first = args[0].eval(x, y)?;
                match func {
                    Func::Exp => first.exp(),
                    Func::Ln => {
                        if first <= 0.0 {
                            return Err(domain(format!("ln of non-positive value {first}")));
                        }
                        first.ln()
                    }
                    Func::Sqrt => {
                        if first < 0.0 {
                            return Err(domain(format!("sqrt of negative value {first}")));
                        }
                        first.sqrt()
                    }
                    Func::Abs => first.abs(),
                    Func::Sin => first.sin(),
                    Func::Cos => first.cos(),
                    Func::Min | Func::Max => {
                        let mut acc = first;
                        for arg in &args[1..] {
                            let v = arg.eval(x, y)?;
                            acc = if *func == Func::Min { acc.min(v) } else { acc.max(v) };
                        }
                        acc
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(domain(format!("non-finite result {value}")))
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(v) => write_number(*v, f),
            Node::Var(Var::X) => f.write_str("x"),
            Node::Var(Var::Y) => f.write_str("y"),
            Node::Neg(inner) => {
                f.write_str("-")?;
                inner.write_child(f, inner.precedence() < 3)
            }
            Node::Binary { op, lhs, rhs } => {
                let prec = op.precedence();
                let (wrap_l, wrap_r) = if *op == BinOp::Pow {
                    // the exponent is parsed as a unary expression
                    (lhs.precedence() <= prec, rhs.precedence() < 3)
                } else {
                    (lhs.precedence() < prec, rhs.precedence() <= prec)
                };
                lhs.write_child(f, wrap_l)?;
                f.write_str(op.symbol())?;
                rhs.write_child(f, wrap_r)
            }
            Node::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    arg.write(f)?;
                }
                f.write_str(")")
            }
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, wrap: bool) -> fmt::Result {
        if wrap {
            f.write_str("(")?;
            self.write(f)?;
            f.write_str(")")
        } else {
            self.write(f)
        }
    }
}

fn write_number(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v.is_sign_negative() {
        f.write_str("(-")?;
        write_number(-v, f)?;
        return f.write_str(")");
    }
    if v != 0.0 && !(1e-5..1e16).contains(&v) {
        write!(f, "{v:e}")
    } else {
        write!(f, "{v}")
    }
}

/// `base^n` by binary exponentiation, with the reciprocal taken last for
/// negative `n`.
fn powi(mut base: f64, n: i32) -> f64 {
    let mut rest = n.unsigned_abs();
    let mut acc = 1.0;
    loop {
        if rest & 1 == 1 {
            acc *= base;
        }
        rest >>= 1;
        if rest == 0 {
            break;
        }
        base *= base;
    }
    if n < 0 {
        1.0 / acc
    } else {
        acc
    }
}

/// Real-valued power; `None` for a negative base with a non-integer exponent.
fn power(base: f64, exponent: f64) -> Option<f64> {
    if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        Some(powi(base, exponent as i32))
    } else if base < 0.0 {
        None
    } else {
        Some(base.powf(exponent))
    }
}

/// A parsed bivariate expression in `x` and `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionExpr {
    root: Arc<Node>,
    program: Arc<compiled::Program>,
}

impl FunctionExpr {
    pub fn from_node(root: Node) -> Self {
        FunctionExpr {
            program: Arc::new(compiled::Program::compile(&root)),
            root: Arc::new(root),
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::from_node(Node::Num(value))
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        match self.program.run(x, y) {
            Some(value) => Ok(value),
            None => self.root.eval(x, y),
        }
    }

    /// `self / divisor` as a new expression.
    pub fn div_scalar(&self, divisor: f64) -> FunctionExpr {
        Self::from_node(Node::binary(
            BinOp::Div,
            (*self.root).clone(),
            Node::Num(divisor),
        ))
    }

    /// `self * other` as a new expression.
    pub fn product(&self, other: &FunctionExpr) -> FunctionExpr {
        self.combine(BinOp::Mul, other)
    }

    fn combine(&self, op: BinOp, other: &FunctionExpr) -> FunctionExpr {
        Self::from_node(Node::binary(
            op,
            (*self.root).clone(),
            (*other.root).clone(),
        ))
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(f)
    }
}

impl std::str::FromStr for FunctionExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Add for &FunctionExpr {
    type Output = FunctionExpr;

    fn add(self, rhs: &FunctionExpr) -> FunctionExpr {
        self.combine(BinOp::Add, rhs)
    }
}

impl Sub for &FunctionExpr {
    type Output = FunctionExpr;

    fn sub(self, rhs: &FunctionExpr) -> FunctionExpr {
        self.combine(BinOp::Sub, rhs)
    }
}

impl Mul<f64> for &FunctionExpr {
    type Output = FunctionExpr;

    fn mul(self, rhs: f64) -> FunctionExpr {
        FunctionExpr::from_node(Node::binary(
            BinOp::Mul,
            Node::Num(rhs),
            (*self.root).clone(),
        ))
    }
}

impl Neg for &FunctionExpr {
    type Output = FunctionExpr;

    fn neg(self) -> FunctionExpr {
        FunctionExpr::from_node(Node::Neg(Box::new((*self.root).clone())))
    }
}

impl Serialize for FunctionExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FunctionExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let source = String::deserialize(deserializer)?;
        parse(&source).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Reference = fn(f64, f64) -> f64;

    fn e(s: &str) -> FunctionExpr {
        parse(s).unwrap()
    }

    #[test]
    fn evaluates_simple_products() {
        assert_eq!(e("x*y").eval(0.5, 0.5).unwrap(), 0.25);
        assert_eq!(e("x+y").eval(1.0, 0.0).unwrap(), 1.0);
        assert_eq!(e("-x^2").eval(3.0, 0.0).unwrap(), -9.0);
        assert_eq!(e("2^3^2").eval(0.0, 0.0).unwrap(), 512.0);
        assert_eq!(e("max(x, y, 3)").eval(1.0, 2.0).unwrap(), 3.0);
        assert_eq!(e("min(x, y)").eval(1.0, 2.0).unwrap(), 1.0);
        assert_eq!(e("1.5e1 - .5").eval(0.0, 0.0).unwrap(), 14.5);
    }

    #[test]
    fn ln_at_zero_is_a_domain_error() {
        let err = e("ln(x)").eval(0.0, 0.0).unwrap_err();
        assert_eq!((err.x, err.y), (0.0, 0.0));
        assert!(err.message.contains("ln"));
    }

    #[test]
    fn other_domain_errors() {
        assert!(e("sqrt(x)").eval(-1.0, 0.0).is_err());
        assert!(e("1/x").eval(0.0, 0.0).is_err());
        assert!(e("x^0.5").eval(-4.0, 0.0).is_err());
        assert!(e("exp(x)").eval(1000.0, 0.0).is_err());
        assert_eq!(e("x^0.5").eval(4.0, 0.0).unwrap(), 2.0);
        assert_eq!(e("x^3").eval(-2.0, 0.0).unwrap(), -8.0);
    }

    #[test]
    fn display_uses_minimal_parentheses() {
        assert_eq!(e("x*(1-y)").to_string(), "x * (1 - y)");
        assert_eq!(e("(x^2)^3").to_string(), "(x^2)^3");
        assert_eq!(e("x^2^3").to_string(), "x^2^3");
        assert_eq!(e("(-x)^2").to_string(), "(-x)^2");
        assert_eq!(e("x - (y - 1)").to_string(), "x - (y - 1)");
        assert_eq!(e("x^-y").to_string(), "x^-y");
        assert_eq!(FunctionExpr::constant(1e-10).to_string(), "1e-10");
    }

    #[test]
    fn builders_produce_expected_values() {
        let h = e("x^2");
        let k = e("y^2");
        let f = (&h - &k).div_scalar(2.0);
        assert_eq!(f.eval(3.0, 1.0).unwrap(), 4.0);
        assert_eq!((&h + &k).eval(3.0, 1.0).unwrap(), 10.0);
        assert_eq!((-&h).eval(3.0, 1.0).unwrap(), -9.0);
        assert_eq!((&h * 0.5).eval(3.0, 1.0).unwrap(), 4.5);
        assert_eq!(h.product(&k).eval(3.0, 2.0).unwrap(), 36.0);
        // printed form reparses to the same tree
        assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn serde_uses_source_text() {
        let f = e("x*y + 1");
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, "\"x * y + 1\"");
        let back: FunctionExpr = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    fn arb_node() -> impl Strategy<Value = Node> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|n| Node::Num(n as f64 / 8.0)),
            Just(Node::Var(Var::X)),
            Just(Node::Var(Var::Y)),
        ];
        leaf.prop_recursive(5, 40, 3, |inner| {
            let ops = prop_oneof![
                Just(BinOp::Add),
                Just(BinOp::Sub),
                Just(BinOp::Mul),
                Just(BinOp::Div),
                Just(BinOp::Pow),
            ];
            let funcs = prop_oneof![
                Just(Func::Exp),
                Just(Func::Ln),
                Just(Func::Sqrt),
                Just(Func::Abs),
                Just(Func::Sin),
                Just(Func::Cos),
            ];
            prop_oneof![
                inner.clone().prop_map(|n| Node::Neg(Box::new(n))),
                (ops, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Node::binary(op, l, r)),
                (funcs, inner.clone()).prop_map(|(func, a)| Node::Call { func, args: vec![a] }),
                proptest::collection::vec(inner, 2..4).prop_map(|args| Node::Call {
                    func: Func::Max,
                    args
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(node in arb_node()) {
            let expr = FunctionExpr::from_node(node);
            let reparsed = parse(&expr.to_string()).unwrap();
            prop_assert_eq!(reparsed, expr);
        }

        #[test]
        fn polynomial_eval_matches_direct_arithmetic(
            x in -10.0f64..10.0,
            y in -10.0f64..10.0,
        ) {
            let cases: [(&str, Reference); 4] = [
                ("x*y", |x, y| x * y),
                ("x^2 + y^2", |x, y| x.powi(2) + y.powi(2)),
                ("3*x^3 - 2*x*y + 0.5", |x, y| 3.0 * x.powi(3) - 2.0 * x * y + 0.5),
                ("(x + y)^2 - (x - y)^2", |x, y| (x + y).powi(2) - (x - y).powi(2)),
            ];
            for (src, direct) in cases {
                prop_assert_eq!(e(src).eval(x, y).unwrap(), direct(x, y));
            }
        }

        #[test]
        fn eval_is_deterministic(node in arb_node(), x in 0.0f64..2.0, y in 0.0f64..2.0) {
            let expr = FunctionExpr::from_node(node);
            prop_assert_eq!(expr.eval(x, y), expr.eval(x, y));
        }

        #[test]
        fn compiled_eval_matches_tree_eval(node in arb_node(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let expr = FunctionExpr::from_node(node);
            let fast = expr.eval(x, y);
            let tree = expr.root.eval(x, y);
            prop_assert_eq!(fast.is_ok(), tree.is_ok());
            if let (Ok(a), Ok(b)) = (fast, tree) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
