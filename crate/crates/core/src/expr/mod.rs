//! A small formula language for sequences.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          right-associative
//! atom   := number | 'n' | 'x' | 'pi' | 'e' | name '(' args ')' | '(' expr ')'
//! ```
//!
//! `(-1)^n` is recognised as an alternating-sign marker. Functions: `log`,
//! `exp`, `sin`, `cos`, `abs`, `sqrt`, `floor`, `pow(a, b)`, `fact`, `dfact`,
//! `loggamma`.

mod eval;
mod parse;

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

pub use eval::{eval_logdomain, eval_with_x, EvalError};
pub use parse::{parse, ParseError, ParseErrorKind};

use crate::source::{RatioSource, TermError, TermSource};
use crate::value::SignedLogValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// The sequence index.
    N,
    /// The argument of a transform `f(x)`.
    X,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Log,
    Exp,
    Sin,
    Cos,
    Abs,
    Sqrt,
    Floor,
    Pow,
    Fact,
    Dfact,
    LogGamma,
}

impl Func {
    pub const ALL: [Func; 11] = [
        Func::Log,
        Func::Exp,
        Func::Sin,
        Func::Cos,
        Func::Abs,
        Func::Sqrt,
        Func::Floor,
        Func::Pow,
        Func::Fact,
        Func::Dfact,
        Func::LogGamma,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Floor => "floor",
            Func::Pow => "pow",
            Func::Fact => "fact",
            Func::Dfact => "dfact",
            Func::LogGamma => "loggamma",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    /// `(-1)^n`
    AltSign,
}

impl Expr {
    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn call1(f: Func, a: Expr) -> Expr {
        Expr::Call(f, alloc::vec![a])
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) | Expr::AltSign => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    /// Whether the tree mentions `(-1)^n` anywhere.
    pub fn has_alt_sign(&self) -> bool {
        match self {
            Expr::AltSign => true,
            Expr::Num(_) | Expr::Var(_) => false,
            Expr::Neg(a) => a.has_alt_sign(),
            Expr::Bin(_, a, b) => a.has_alt_sign() || b.has_alt_sign(),
            Expr::Call(_, args) => args.iter().any(Expr::has_alt_sign),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::AltSign => 1,
            Expr::Neg(a) => 1 + a.size(),
            Expr::Bin(_, a, b) => 1 + a.size() + b.size(),
            Expr::Call(_, args) => 1 + args.iter().map(Expr::size).sum::<usize>(),
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    /// Prints with the minimal parentheses that reparse to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::N) => f.write_str("n"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::AltSign => f.write_str("(-1)^n"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_child(f, a, a.precedence() < 3)
            }
            Expr::Bin(BinOp::Pow, a, b) => {
                write_child(f, a, a.precedence() <= 4)?;
                f.write_str("^")?;
                write_child(f, b, b.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = self.precedence();
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => unreachable!(),
                };
                write_child(f, a, a.precedence() < p)?;
                f.write_str(sym)?;
                write_child(f, b, b.precedence() <= p)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn domain_error(n: u64, e: EvalError) -> TermError {
    TermError::Domain {
        index: n,
        detail: e.to_string(),
    }
}

/// `a_n` given by a formula in `n`.
#[derive(Debug, Clone)]
pub struct ExprSource {
    expr: Expr,
    name: String,
}

impl ExprSource {
    pub fn new(expr: Expr, text: &str) -> Self {
        ExprSource {
            expr,
            name: text.trim().to_string(),
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl TermSource for ExprSource {
    fn name(&self) -> &str {
        &self.name
    }

    fn term(&self, n: u64) -> Result<SignedLogValue, TermError> {
        if n == 0 {
            return Err(TermError::BeforeStart { index: 0, first: 1 });
        }
        eval_logdomain(&self.expr, n).map_err(|e| domain_error(n, e))
    }
}

/// `a_1 = 1` and `a_{n+1}/a_n − 1` given by a formula in `n`.
pub struct ExprRatioSource {
    expr: Arc<Expr>,
    inner: RatioSource,
}

impl ExprRatioSource {
    pub fn new(expr: Expr, text: &str) -> Self {
        let expr = Arc::new(expr);
        let e = Arc::clone(&expr);
        let inner = RatioSource::new(text.trim(), 1, SignedLogValue::ONE, move |n| {
            eval_logdomain(&e, n).map_or(f64::NAN, |v| v.to_real())
        });
        ExprRatioSource { expr, inner }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// Replaces a bare non-finite report with the evaluator's domain message.
    fn explain(&self, err: TermError) -> TermError {
        if let TermError::NonFinite { index } = err {
            if let Err(e) = eval_logdomain(&self.expr, index - 1) {
                return domain_error(index - 1, e);
            }
        }
        err
    }
}

impl TermSource for ExprRatioSource {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn term(&self, n: u64) -> Result<SignedLogValue, TermError> {
        self.inner.term(n).map_err(|e| self.explain(e))
    }

    fn ratio(&self, n: u64) -> Option<f64> {
        self.inner.ratio(n)
    }

    fn log_span(&self, from: u64, to: u64) -> Result<f64, TermError> {
        self.inner.log_span(from, to).map_err(|e| self.explain(e))
    }

    fn scan(
        &self,
        from: u64,
        to: u64,
        f: &mut dyn FnMut(u64, SignedLogValue),
    ) -> Result<(), TermError> {
        self.inner.scan(from, to, f).map_err(|e| self.explain(e))
    }
}
