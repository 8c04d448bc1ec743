//! Log-domain evaluation.

use alloc::string::{String, ToString};
use core::fmt;

use super::{BinOp, Expr, Func, Var};
use crate::special::{ln_gamma, log_double_factorial};
use crate::value::{Sign, SignedLogValue};

/// A domain violation, with the offending subexpression.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalError {
    pub subexpr: String,
    pub detail: &'static str,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in `{}`", self.detail, self.subexpr)
    }
}

impl core::error::Error for EvalError {}

struct Env {
    n: u64,
    x: Option<SignedLogValue>,
}

fn fail(e: &Expr, detail: &'static str) -> EvalError {
    EvalError {
        subexpr: e.to_string(),
        detail,
    }
}

fn finite_real(e: &Expr, v: SignedLogValue) -> Result<f64, EvalError> {
    let r = v.to_real();
    if r.is_finite() {
        Ok(r)
    } else {
        Err(fail(e, "value out of range"))
    }
}

fn checked_log(e: &Expr, sign: Sign, logmag: f64) -> Result<SignedLogValue, EvalError> {
    if sign == Sign::Zero {
        return Ok(SignedLogValue::ZERO);
    }
    if logmag == f64::NEG_INFINITY {
        return Ok(SignedLogValue::ZERO);
    }
    SignedLogValue::new(sign, logmag).ok_or_else(|| fail(e, "overflow"))
}

/// A nonnegative integer argument, as required by `fact` / `dfact`.
fn whole(e: &Expr, v: SignedLogValue) -> Result<u64, EvalError> {
    let r = finite_real(e, v)?;
    let k = libm::round(r);
    if r < 0.0 || libm::fabs(r - k) > 1e-9 * k.max(1.0) || k > 9.0e15 {
        return Err(fail(e, "argument must be a nonnegative integer"));
    }
    Ok(k as u64)
}

fn power(e: &Expr, base: SignedLogValue, exp: f64) -> Result<SignedLogValue, EvalError> {
    if !exp.is_finite() {
        return Err(fail(e, "exponent out of range"));
    }
    match base.sign() {
        Sign::Zero if exp > 0.0 => Ok(SignedLogValue::ZERO),
        Sign::Zero if exp == 0.0 => Ok(SignedLogValue::ONE),
        Sign::Zero => Err(fail(e, "zero raised to a negative power")),
        Sign::Positive => checked_log(e, Sign::Positive, exp * base.logmag()),
        Sign::Negative => {
            let k = libm::round(exp);
            if k != exp || libm::fabs(k) > 9.0e15 {
                return Err(fail(e, "negative base with non-integer exponent"));
            }
            let sign = if (k as i64) % 2 == 0 {
                Sign::Positive
            } else {
                Sign::Negative
            };
            checked_log(e, sign, exp * base.logmag())
        }
    }
}

fn eval(e: &Expr, env: &Env) -> Result<SignedLogValue, EvalError> {
    match e {
        Expr::Num(v) => SignedLogValue::from_real(*v).ok_or_else(|| fail(e, "non-finite literal")),
        Expr::Var(Var::N) => Ok(SignedLogValue::from_real(env.n as f64).unwrap_or(SignedLogValue::ZERO)),
        Expr::Var(Var::X) => env.x.ok_or_else(|| fail(e, "x is only defined in transforms")),
        Expr::AltSign => Ok(if env.n % 2 == 0 {
            SignedLogValue::ONE
        } else {
            -SignedLogValue::ONE
        }),
        Expr::Neg(a) => Ok(-eval(a, env)?),
        Expr::Bin(op, a, b) => {
            let x = eval(a, env)?;
            let y = eval(b, env)?;
            match op {
                BinOp::Add => Ok(x.add(y)),
                BinOp::Sub => Ok(x.sub(y)),
                BinOp::Mul => checked_log(e, x.sign() * y.sign(), x.logmag() + y.logmag()),
                BinOp::Div => {
                    if y.is_zero() {
                        return Err(fail(e, "division by zero"));
                    }
                    checked_log(e, x.sign() * y.sign(), x.logmag() - y.logmag())
                }
                BinOp::Pow => power(e, x, finite_real(b, y)?),
            }
        }
        Expr::Call(func, args) => {
            let x = eval(&args[0], env)?;
            match func {
                Func::Log => {
                    if x.sign() != Sign::Positive {
                        return Err(fail(e, "log of a non-positive value"));
                    }
                    Ok(SignedLogValue::from_real(x.logmag()).unwrap_or(SignedLogValue::ZERO))
                }
                Func::Exp => {
                    let r = finite_real(&args[0], x)?;
                    checked_log(e, Sign::Positive, r)
                }
                Func::Sin => Ok(SignedLogValue::from_real(libm::sin(finite_real(&args[0], x)?))
                    .unwrap_or(SignedLogValue::ZERO)),
                Func::Cos => Ok(SignedLogValue::from_real(libm::cos(finite_real(&args[0], x)?))
                    .unwrap_or(SignedLogValue::ZERO)),
                Func::Abs => Ok(x.abs()),
                Func::Sqrt => {
                    if x.sign() == Sign::Negative {
                        return Err(fail(e, "sqrt of a negative value"));
                    }
                    checked_log(e, x.sign(), 0.5 * x.logmag())
                }
                Func::Floor => {
                    let r = finite_real(&args[0], x)?;
                    Ok(SignedLogValue::from_real(libm::floor(r)).unwrap_or(SignedLogValue::ZERO))
                }
                Func::Pow => {
                    let y = eval(&args[1], env)?;
                    power(e, x, finite_real(&args[1], y)?)
                }
                Func::Fact => {
                    let k = whole(e, x)?;
                    Ok(SignedLogValue::from_log(ln_gamma(k as f64 + 1.0)))
                }
                Func::Dfact => {
                    let k = whole(e, x)?;
                    Ok(SignedLogValue::from_log(log_double_factorial(k)))
                }
                Func::LogGamma => {
                    if x.sign() != Sign::Positive {
                        return Err(fail(e, "loggamma of a non-positive value"));
                    }
                    let r = finite_real(&args[0], x)?;
                    SignedLogValue::from_real(ln_gamma(r)).ok_or_else(|| fail(e, "overflow"))
                }
            }
        }
    }
}

/// Evaluates `e` at index `n` in sign + log-magnitude arithmetic.
pub fn eval_logdomain(e: &Expr, n: u64) -> Result<SignedLogValue, EvalError> {
    eval(e, &Env { n, x: None })
}

/// Evaluates a transform `f(x)` at `x`, with `n` available as well.
pub fn eval_with_x(e: &Expr, n: u64, x: SignedLogValue) -> Result<SignedLogValue, EvalError> {
    eval(e, &Env { n, x: Some(x) })
}
