use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
    Pow,
}

impl Function {
    pub const ALL: [Function; 10] = [
        Function::Sin,
        Function::Cos,
        Function::Tan,
        Function::Exp,
        Function::Log,
        Function::Sqrt,
        Function::Abs,
        Function::Min,
        Function::Max,
        Function::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Tan => "tan",
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Sqrt => "sqrt",
            Function::Abs => "abs",
            Function::Min => "min",
            Function::Max => "max",
            Function::Pow => "pow",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Function::Min | Function::Max | Function::Pow => 2,
            _ => 1,
        }
    }
}

/// Expression tree over variables `x₀ … x_{d-1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Constant(f64),
    Variable(usize),
    Neg(Box<Expression>),
    Binary(BinaryOp, Box<Expression>, Box<Expression>),
    Call(Function, Vec<Expression>),
}

fn domain(node: &Expression, detail: impl Into<String>) -> Error {
    Error::Domain {
        node: node.to_string(),
        detail: detail.into(),
    }
}

/// `base^exponent` without a complex branch.
pub(crate) fn real_pow(base: f64, exponent: f64) -> std::result::Result<f64, &'static str> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err("negative base with non-integer exponent");
    }
    if base == 0.0 && exponent < 0.0 {
        return Err("zero raised to a negative power");
    }
    Ok(base.powf(exponent))
}

impl Expression {
    pub fn constant(v: f64) -> Self {
        Expression::Constant(v)
    }

    pub fn var(i: usize) -> Self {
        Expression::Variable(i)
    }

    pub fn binary(op: BinaryOp, lhs: Expression, rhs: Expression) -> Self {
        Expression::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(f: Function, args: Vec<Expression>) -> Self {
        Expression::Call(f, args)
    }

    /// Highest variable index referenced, if any.
    pub fn max_variable(&self) -> Option<usize> {
        match self {
            Expression::Constant(_) => None,
            Expression::Variable(i) => Some(*i),
            Expression::Neg(e) => e.max_variable(),
            Expression::Binary(_, a, b) => a.max_variable().max(b.max_variable()),
            Expression::Call(_, args) => args.iter().filter_map(|a| a.max_variable()).max(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expression::Constant(_) | Expression::Variable(_) => 1,
            Expression::Neg(e) => 1 + e.node_count(),
            Expression::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
            Expression::Call(_, args) => 1 + args.iter().map(Self::node_count).sum::<usize>(),
        }
    }

    /// Evaluates at `point`. Any non-finite intermediate is a domain error
    /// naming the offending sub-expression.
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        let v = match self {
            Expression::Constant(c) => *c,
            Expression::Variable(i) => *point.get(*i).ok_or(Error::DimensionMismatch {
                expected: i + 1,
                actual: point.len(),
            })?,
            Expression::Neg(e) => -e.eval(point)?,
            Expression::Binary(op, a, b) => {
                let x = a.eval(point)?;
                let y = b.eval(point)?;
                match op {
                    BinaryOp::Add => x + y,
                    BinaryOp::Sub => x - y,
                    BinaryOp::Mul => x * y,
                    BinaryOp::Div => {
                        if y == 0.0 {
                            return Err(domain(self, "division by zero"));
                        }
                        x / y
                    }
                    BinaryOp::Pow => real_pow(x, y).map_err(|d| domain(self, d))?,
                }
            }
            Expression::Call(f, args) => {
                let x = args[0].eval(point)?;
                match f {
                    Function::Sin => x.sin(),
                    Function::Cos => x.cos(),
                    Function::Tan => x.tan(),
                    Function::Exp => x.exp(),
                    Function::Log => {
                        if x <= 0.0 {
                            return Err(domain(self, "logarithm of a non-positive value"));
                        }
                        x.ln()
                    }
                    Function::Sqrt => {
                        if x < 0.0 {
                            return Err(domain(self, "square root of a negative value"));
                        }
                        x.sqrt()
                    }
                    Function::Abs => x.abs(),
                    Function::Min => x.min(args[1].eval(point)?),
                    Function::Max => x.max(args[1].eval(point)?),
                    Function::Pow => real_pow(x, args[1].eval(point)?).map_err(|d| domain(self, d))?,
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(domain(self, format!("non-finite result {v}")))
        }
    }
}

/// Fully parenthesized form; re-parsing it reproduces the same tree.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Constant(c) => write!(f, "{c:?}"),
            Expression::Variable(i) => write!(f, "x{}", i + 1),
            Expression::Neg(e) => write!(f, "(-{e})"),
            Expression::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expression::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
