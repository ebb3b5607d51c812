//! Evaluation of arithmetic expressions for `is/2` and comparisons.

use std::cmp::Ordering;

use super::error::{EngineError, ErrorKind};
use super::subst::Substitution;
use super::term::Term;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Number {
    Int(i64),
    Float(f64),
}

impl Number {
    pub fn to_term(self) -> Term {
        match self {
            Number::Int(n) => Term::Int(n),
            Number::Float(x) => Term::Float(x),
        }
    }

    fn as_f64(self) -> f64 {
        match self {
            Number::Int(n) => n as f64,
            Number::Float(x) => x,
        }
    }

    /// Numeric comparison with integer-to-float promotion.
    pub fn compare(self, other: Number) -> Ordering {
        match (self, other) {
            (Number::Int(a), Number::Int(b)) => a.cmp(&b),
            (a, b) => a.as_f64().total_cmp(&b.as_f64()),
        }
    }
}

fn overflow(culprit: &Term) -> EngineError {
    EngineError::new(ErrorKind::Overflow, culprit.clone(), "integer result out of range")
}

fn zero_divisor(culprit: &Term) -> EngineError {
    EngineError::new(ErrorKind::Arithmetic, culprit.clone(), "division by zero")
}

fn float_result(x: f64, culprit: &Term) -> Result<Number, EngineError> {
    if x.is_finite() {
        Ok(Number::Float(x))
    } else {
        Err(EngineError::new(
            ErrorKind::Arithmetic,
            culprit.clone(),
            "float result is undefined or infinite",
        ))
    }
}

fn int_op(
    a: Number,
    b: Number,
    culprit: &Term,
    ints: fn(i64, i64) -> Option<i64>,
    floats: fn(f64, f64) -> f64,
) -> Result<Number, EngineError> {
    match (a, b) {
        (Number::Int(x), Number::Int(y)) => ints(x, y).map(Number::Int).ok_or_else(|| overflow(culprit)),
        (x, y) => float_result(floats(x.as_f64(), y.as_f64()), culprit),
    }
}

fn require_ints(a: Number, b: Number, culprit: &Term) -> Result<(i64, i64), EngineError> {
    match (a, b) {
        (Number::Int(x), Number::Int(y)) => Ok((x, y)),
        _ => Err(EngineError::type_error("integer", culprit.clone())),
    }
}

/// Evaluates `expr` under `s`.
pub fn eval_arith(expr: &Term, s: &Substitution) -> Result<Number, EngineError> {
    let expr = s.deref(expr);
    match expr {
        Term::Int(n) => Ok(Number::Int(*n)),
        Term::Float(x) => Ok(Number::Float(*x)),
        Term::Var(_) => Err(EngineError::instantiation(expr.clone())),
        Term::Atom(_) => Err(EngineError::type_error("evaluable", expr.clone())),
        Term::Compound(f, args) => {
            let culprit = || s.resolve(expr);
            match (&**f, args.len()) {
                ("-", 1) => match eval_arith(&args[0], s)? {
                    Number::Int(n) => n.checked_neg().map(Number::Int).ok_or_else(|| overflow(&culprit())),
                    Number::Float(x) => Ok(Number::Float(-x)),
                },
                ("abs", 1) => match eval_arith(&args[0], s)? {
                    Number::Int(n) => n.checked_abs().map(Number::Int).ok_or_else(|| overflow(&culprit())),
                    Number::Float(x) => Ok(Number::Float(x.abs())),
                },
                (op, 2) => {
                    let a = eval_arith(&args[0], s)?;
                    let b = eval_arith(&args[1], s)?;
                    binary(op, a, b, &culprit())
                }
                _ => Err(EngineError::type_error("evaluable", culprit())),
            }
        }
    }
}

fn binary(op: &str, a: Number, b: Number, culprit: &Term) -> Result<Number, EngineError> {
    match op {
        "+" => int_op(a, b, culprit, i64::checked_add, |x, y| x + y),
        "-" => int_op(a, b, culprit, i64::checked_sub, |x, y| x - y),
        "*" => int_op(a, b, culprit, i64::checked_mul, |x, y| x * y),
        "/" => match (a, b) {
            (_, Number::Int(0)) => Err(zero_divisor(culprit)),
            (_, Number::Float(0.0)) => Err(zero_divisor(culprit)),
            (Number::Int(x), Number::Int(y)) => {
                if x.checked_rem(y) == Some(0) {
                    x.checked_div(y).map(Number::Int).ok_or_else(|| overflow(culprit))
                } else if y == -1 {
                    Err(overflow(culprit))
                } else {
                    float_result(x as f64 / y as f64, culprit)
                }
            }
            (x, y) => float_result(x.as_f64() / y.as_f64(), culprit),
        },
        "//" => {
            let (x, y) = require_ints(a, b, culprit)?;
            if y == 0 {
                return Err(zero_divisor(culprit));
            }
            x.checked_div(y).map(Number::Int).ok_or_else(|| overflow(culprit))
        }
        "mod" => {
            let (x, y) = require_ints(a, b, culprit)?;
            if y == 0 {
                return Err(zero_divisor(culprit));
            }
            // Result takes the sign of the divisor.
            let r = if y == -1 { 0 } else { x % y };
            Ok(Number::Int(if r != 0 && (r < 0) != (y < 0) { r + y } else { r }))
        }
        "min" => Ok(if b.compare(a) == Ordering::Less { b } else { a }),
        "max" => Ok(if b.compare(a) == Ordering::Greater { b } else { a }),
        _ => Err(EngineError::type_error("evaluable", culprit.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prolog::parser::read_term;

    fn eval(src: &str) -> Result<Number, EngineError> {
        eval_arith(&read_term(src).unwrap(), &Substitution::new())
    }

    #[test]
    fn precedence_and_basic_ops() {
        assert_eq!(eval("3+4*2").unwrap(), Number::Int(11));
        assert_eq!(eval("7 mod 2").unwrap(), Number::Int(1));
        assert_eq!(eval("-7 mod 2").unwrap(), Number::Int(1));
        assert_eq!(eval("7 mod -2").unwrap(), Number::Int(-1));
        assert_eq!(eval("-7 // 2").unwrap(), Number::Int(-3));
        assert_eq!(eval("abs(-4) + min(2, 3) * max(1, 5)").unwrap(), Number::Int(14));
        assert_eq!(eval("- (2)").unwrap(), Number::Int(-2));
    }

    #[test]
    fn division_yields_int_only_when_exact() {
        assert_eq!(eval("6/3").unwrap(), Number::Int(2));
        assert_eq!(eval("7/2").unwrap(), Number::Float(3.5));
        assert_eq!(eval("1.0+2").unwrap(), Number::Float(3.0));
    }

    #[test]
    fn errors() {
        let unbound = eval_arith(&Term::var("X", 0), &Substitution::new()).unwrap_err();
        assert_eq!(unbound.kind, ErrorKind::Instantiation);
        assert_eq!(eval("foo + 1").unwrap_err().kind, ErrorKind::Type);
        assert_eq!(eval("1 / 0").unwrap_err().kind, ErrorKind::Arithmetic);
        assert_eq!(eval("1 mod 0").unwrap_err().kind, ErrorKind::Arithmetic);
        assert_eq!(eval("1.5 // 2").unwrap_err().kind, ErrorKind::Type);
        assert_eq!(eval("9223372036854775807 + 1").unwrap_err().kind, ErrorKind::Overflow);
        assert_eq!(eval("-9223372036854775808 // -1").unwrap_err().kind, ErrorKind::Overflow);
        assert_eq!(eval("abs(-9223372036854775808)").unwrap_err().kind, ErrorKind::Overflow);
    }

    #[test]
    fn bound_variables_are_followed() {
        let mut s = Substitution::new();
        s.bind(0, Term::Int(5));
        let expr = read_term("X * 2").unwrap();
        assert_eq!(eval_arith(&expr, &s).unwrap(), Number::Int(10));
    }
}
