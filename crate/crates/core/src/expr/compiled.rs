//! Postfix programs for fast evaluation.
//!
//! Variable-free subtrees are folded to constants and integer powers with a
//! literal exponent become `powi`. Every operation is the one the tree
//! evaluator performs, in the same order, so results agree bit for bit.
//! `run` reports any domain error as `None` and leaves the diagnosis to the
//! tree evaluator.

use super::{power, powi, BinOp, Func, Node, Var};

/// Stack capacity of the fast path; deeper programs use the tree evaluator.
const MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    X,
    Y,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    PowI(i32),
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sin,
    Cos,
    Min(usize),
    Max(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Program {
    ops: Vec<Op>,
    depth: usize,
}

fn has_vars(node: &Node) -> bool {
    match node {
        Node::Num(_) => false,
        Node::Var(_) => true,
        Node::Neg(inner) => has_vars(inner),
        Node::Binary { lhs, rhs, .. } => has_vars(lhs) || has_vars(rhs),
        Node::Call { args, .. } => args.iter().any(has_vars),
    }
}

fn emit(node: &Node, ops: &mut Vec<Op>) {
    if !has_vars(node) {
        if let Ok(v) = node.eval(0.0, 0.0) {
            ops.push(Op::Const(v));
            return;
        }
    }
    match node {
        Node::Num(v) => ops.push(Op::Const(*v)),
        Node::Var(Var::X) => ops.push(Op::X),
        Node::Var(Var::Y) => ops.push(Op::Y),
        Node::Neg(inner) => {
            emit(inner, ops);
            ops.push(Op::Neg);
        }
        Node::Binary { op, lhs, rhs } => {
            emit(lhs, ops);
            let exponent = match (op, has_vars(rhs)) {
                (BinOp::Pow, false) => rhs.eval(0.0, 0.0).ok(),
                _ => None,
            };
            match exponent {
                Some(e) if e.fract() == 0.0 && e.abs() <= 64.0 => ops.push(Op::PowI(e as i32)),
                _ => {
                    emit(rhs, ops);
                    ops.push(match op {
                        BinOp::Add => Op::Add,
                        BinOp::Sub => Op::Sub,
                        BinOp::Mul => Op::Mul,
                        BinOp::Div => Op::Div,
                        BinOp::Pow => Op::Pow,
                    });
                }
            }
        }
        Node::Call { func, args } => {
            for arg in args {
                emit(arg, ops);
            }
            ops.push(match func {
                Func::Exp => Op::Exp,
                Func::Ln => Op::Ln,
                Func::Sqrt => Op::Sqrt,
                Func::Abs => Op::Abs,
                Func::Sin => Op::Sin,
                Func::Cos => Op::Cos,
                Func::Min => Op::Min(args.len()),
                Func::Max => Op::Max(args.len()),
            });
        }
    }
}

impl Program {
    pub fn compile(node: &Node) -> Program {
        let mut ops = Vec::new();
        emit(node, &mut ops);
        let (mut height, mut depth) = (0usize, 0usize);
        for op in &ops {
            match op {
                Op::Const(_) | Op::X | Op::Y => height += 1,
                Op::Add | Op::Sub | Op::Mul | Op::Div | Op::Pow => height -= 1,
                Op::Min(n) | Op::Max(n) => height -= n - 1,
                _ => {}
            }
            depth = depth.max(height);
        }
        Program { ops, depth }
    }

    pub fn run(&self, x: f64, y: f64) -> Option<f64> {
        if self.depth > MAX_DEPTH {
            return None;
        }
        let mut stack = [0.0f64; MAX_DEPTH];
        let mut sp = 0usize;
        for op in &self.ops {
            let value = match *op {
                Op::Const(v) => {
                    sp += 1;
                    v
                }
                Op::X => {
                    sp += 1;
                    x
                }
                Op::Y => {
                    sp += 1;
                    y
                }
                Op::Min(n) | Op::Max(n) => {
                    let args = &stack[sp - n..sp];
                    let mut acc = args[0];
                    for &v in &args[1..] {
                        acc = if matches!(op, Op::Min(_)) { acc.min(v) } else { acc.max(v) };
                    }
                    sp -= n - 1;
                    acc
                }
                Op::Add | Op::Sub | Op::Mul | Op::Div | Op::Pow => {
                    sp -= 1;
                    let (l, r) = (stack[sp - 1], stack[sp]);
                    match op {
                        Op::Add => l + r,
                        Op::Sub => l - r,
                        Op::Mul => l * r,
                        Op::Div if r == 0.0 => return None,
                        Op::Div => l / r,
                        _ => power(l, r)?,
                    }
                }
                unary => {
                    let v = stack[sp - 1];
                    match unary {
                        Op::Neg => -v,
                        Op::PowI(e) => powi(v, e),
                        Op::Exp => v.exp(),
                        Op::Ln if v <= 0.0 => return None,
                        Op::Ln => v.ln(),
                        Op::Sqrt if v < 0.0 => return None,
                        Op::Sqrt => v.sqrt(),
                        Op::Abs => v.abs(),
                        Op::Sin => v.sin(),
                        Op::Cos => v.cos(),
                        _ => unreachable!(),
                    }
                }
            };
            if !value.is_finite() {
                return None;
            }
            stack[sp - 1] = value;
        }
        Some(stack[0])
    }
}
