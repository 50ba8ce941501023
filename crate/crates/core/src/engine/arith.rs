//! Arithmetic evaluation for `is/2` and the numeric comparison builtins.

use super::bindings::Bindings;
use crate::syntax::{SourceSpan, Term, TermKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Num {
    Int(i64),
    Float(f64),
}

impl Num {
    pub fn as_f64(self) -> f64 {
        match self {
            Num::Int(v) => v as f64,
            Num::Float(v) => v,
        }
    }

    pub fn to_term(self, span: SourceSpan) -> Term {
        match self {
            Num::Int(v) => Term::int(v, span),
            Num::Float(v) => Term::float(v, span),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArithErrorKind {
    Instantiation,
    Type(String),
    ZeroDivisor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArithError {
    pub kind: ArithErrorKind,
    pub span: SourceSpan,
}

fn type_error(msg: impl Into<String>, span: SourceSpan) -> ArithError {
    ArithError { kind: ArithErrorKind::Type(msg.into()), span }
}

fn checked(span: SourceSpan, v: Option<i64>) -> Result<Num, ArithError> {
    v.map(Num::Int).ok_or_else(|| type_error("integer overflow", span))
}

/// Evaluate a ground arithmetic expression under the given bindings.
pub fn eval_arith(term: &Term, bindings: &Bindings) -> Result<Num, ArithError> {
    let t = bindings.deref(term);
    let span = t.span;
    match &t.kind {
        TermKind::Int(v) => Ok(Num::Int(*v)),
        TermKind::Float(v) => Ok(Num::Float(*v)),
        TermKind::Var(..) => Err(ArithError { kind: ArithErrorKind::Instantiation, span }),
        TermKind::Atom(a) => Err(type_error(format!("`{a}` is not a number"), span)),
        TermKind::Compound(f, args) => match (f.as_str(), args.len()) {
            ("+", 2) => binop(&t, bindings, span, |a, b| checked(span, a.checked_add(b)), |a, b| a + b),
            ("-", 2) => binop(&t, bindings, span, |a, b| checked(span, a.checked_sub(b)), |a, b| a - b),
            ("*", 2) => binop(&t, bindings, span, |a, b| checked(span, a.checked_mul(b)), |a, b| a * b),
            ("-", 1) => match eval_arith(&args[0], bindings)? {
                Num::Int(v) => checked(span, v.checked_neg()),
                Num::Float(v) => Ok(Num::Float(-v)),
            },
            ("abs", 1) => match eval_arith(&args[0], bindings)? {
                Num::Int(v) => checked(span, v.checked_abs()),
                Num::Float(v) => Ok(Num::Float(v.abs())),
            },
            ("/", 2) => {
                let (a, b) = eval_pair(&t, bindings)?;
                match (a, b) {
                    (_, Num::Int(0)) => Err(ArithError { kind: ArithErrorKind::ZeroDivisor, span }),
                    (_, Num::Float(0.0)) => {
                        Err(ArithError { kind: ArithErrorKind::ZeroDivisor, span })
                    }
                    // Integer division only when exact; otherwise a float.
                    (Num::Int(x), Num::Int(y)) if x % y == 0 => checked(span, x.checked_div(y)),
                    (x, y) => Ok(Num::Float(x.as_f64() / y.as_f64())),
                }
            }
            ("//", 2) => {
                let (a, b) = int_pair(&t, bindings, "//")?;
                if b == 0 {
                    return Err(ArithError { kind: ArithErrorKind::ZeroDivisor, span });
                }
                // Truncates toward zero.
                checked(span, a.checked_div(b))
            }
            ("mod", 2) => {
                let (a, b) = int_pair(&t, bindings, "mod")?;
                if b == 0 {
                    return Err(ArithError { kind: ArithErrorKind::ZeroDivisor, span });
                }
                // Floored modulo: the result takes the divisor's sign.
                let r = a.checked_rem(b).ok_or_else(|| type_error("integer overflow", span))?;
                Ok(Num::Int(if r != 0 && (r < 0) != (b < 0) { r + b } else { r }))
            }
            ("min", 2) => {
                let (a, b) = eval_pair(&t, bindings)?;
                Ok(pick(a, b, |x, y| x <= y))
            }
            ("max", 2) => {
                let (a, b) = eval_pair(&t, bindings)?;
                Ok(pick(a, b, |x, y| x >= y))
            }
            (other, n) => Err(type_error(format!("unknown arithmetic function {other}/{n}"), span)),
        },
    }
}

fn eval_pair(t: &Term, bindings: &Bindings) -> Result<(Num, Num), ArithError> {
    let args = t.args();
    Ok((eval_arith(&args[0], bindings)?, eval_arith(&args[1], bindings)?))
}

fn int_pair(t: &Term, bindings: &Bindings, op: &str) -> Result<(i64, i64), ArithError> {
    match eval_pair(t, bindings)? {
        (Num::Int(a), Num::Int(b)) => Ok((a, b)),
        _ => Err(type_error(format!("`{op}` requires integer arguments"), t.span)),
    }
}

fn pick(a: Num, b: Num, keep_a: impl Fn(f64, f64) -> bool) -> Num {
    if keep_a(a.as_f64(), b.as_f64()) {
        a
    } else {
        b
    }
}

fn binop(
    t: &Term,
    bindings: &Bindings,
    span: SourceSpan,
    int_op: impl Fn(i64, i64) -> Result<Num, ArithError>,
    float_op: impl Fn(f64, f64) -> f64,
) -> Result<Num, ArithError> {
    let (a, b) = eval_pair(t, bindings)?;
    match (a, b) {
        (Num::Int(x), Num::Int(y)) => int_op(x, y),
        (x, y) => {
            let v = float_op(x.as_f64(), y.as_f64());
            let _ = span;
            Ok(Num::Float(v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_query;

    fn eval(src: &str) -> Result<Num, ArithError> {
        let t = parse_query(src).unwrap();
        eval_arith(&t, &Bindings::new())
    }

    #[test]
    fn precedence_applies() {
        assert_eq!(eval("2+3*4").unwrap(), Num::Int(14));
    }

    #[test]
    fn modulo() {
        assert_eq!(eval("7 mod 2").unwrap(), Num::Int(1));
        assert_eq!(eval("-7 mod 2").unwrap(), Num::Int(1));
        assert_eq!(eval("7 mod -2").unwrap(), Num::Int(-1));
    }

    #[test]
    fn unbound_variable_is_instantiation_error() {
        let err = eval("X + 1").unwrap_err();
        assert_eq!(err.kind, ArithErrorKind::Instantiation);
    }

    #[test]
    fn division_yields_float_unless_exact() {
        assert_eq!(eval("6 / 3").unwrap(), Num::Int(2));
        assert_eq!(eval("7 / 2").unwrap(), Num::Float(3.5));
        assert_eq!(eval("7 // 2").unwrap(), Num::Int(3));
        assert_eq!(eval("-7 // 2").unwrap(), Num::Int(-3));
    }

    #[test]
    fn zero_divisor_detected() {
        assert_eq!(eval("1 / 0").unwrap_err().kind, ArithErrorKind::ZeroDivisor);
        assert_eq!(eval("1 // 0").unwrap_err().kind, ArithErrorKind::ZeroDivisor);
        assert_eq!(eval("1 mod 0").unwrap_err().kind, ArithErrorKind::ZeroDivisor);
    }

    #[test]
    fn non_numeric_atom_is_type_error() {
        assert!(matches!(eval("a + 1").unwrap_err().kind, ArithErrorKind::Type(_)));
    }

    #[test]
    fn unary_minus_abs_min_max() {
        assert_eq!(eval("- (3+4)").unwrap(), Num::Int(-7));
        assert_eq!(eval("abs(-3)").unwrap(), Num::Int(3));
        assert_eq!(eval("min(2, 1.5)").unwrap(), Num::Float(1.5));
        assert_eq!(eval("max(2, 1.5)").unwrap(), Num::Int(2));
    }

    #[test]
    fn mixed_promotes_to_float() {
        assert_eq!(eval("1 + 0.5").unwrap(), Num::Float(1.5));
    }
}
